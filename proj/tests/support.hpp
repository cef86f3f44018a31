#pragma once

#include "monopole/hyperbolic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <complex>
#include <random>
#include <vector>

namespace testing_support {

using monopole::cplx;
using monopole::hyperbolic::BoundaryPoint;
using monopole::hyperbolic::PointUHS;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed = 20240611) : gen(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
    cplx complex_in_disc(double r) {
        const double rad = r * std::sqrt(uniform(0.0, 1.0));
        return std::polar(rad, uniform(0.0, 2.0 * monopole::pi));
    }
    cplx complex_box(double a) { return {uniform(-a, a), uniform(-a, a)}; }
    PointUHS point(double spread = 1.5, double zmin = 0.3, double zmax = 2.5) {
        return PointUHS(uniform(-spread, spread), uniform(-spread, spread), uniform(zmin, zmax));
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

/// Hyperbolic length of the geodesic arc between p and q, integrated along the Euclidean circle
/// orthogonal to the boundary (or the vertical segment) with adaptive quadrature.
inline double arc_length_oracle(const PointUHS& p, const PointUHS& q) {
    using boost::math::quadrature::gauss_kronrod;
    const double dx = q.x() - p.x(), dy = q.y() - p.y();
    const double horiz = std::hypot(dx, dy);
    if (horiz < 1e-14) {
        auto f = [](double z) { return 1.0 / z; };
        return std::abs(gauss_kronrod<double, 61>::integrate(f, std::min(p.z(), q.z()), std::max(p.z(), q.z()), 15, 1e-14));
    }
    // Coordinate s along the horizontal direction from p; circle center at s = c on the boundary.
    const double c = (horiz * horiz + q.z() * q.z() - p.z() * p.z()) / (2.0 * horiz);
    const double R = std::hypot(c, p.z());
    const double a0 = std::atan2(p.z(), -c);
    const double a1 = std::atan2(q.z(), horiz - c);
    // Point on circle: (c + R cos a, R sin a); element |d gamma| / z = da / sin a.
    auto f = [](double a) { return 1.0 / std::sin(a); };
    return std::abs(gauss_kronrod<double, 61>::integrate(f, std::min(a0, a1), std::max(a0, a1), 15, 1e-14));
}

/// Neville extrapolation of samples f(h_k) to h = 0.
inline double extrapolate_to_zero(std::vector<double> h, std::vector<double> f) {
    const std::size_t n = h.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t k = n - 1; k >= m; --k) {
            f[k] = (h[k - m] * f[k] - h[k] * f[k - 1]) / (h[k - m] - h[k]);
            if (k == m) break;
        }
    return f[n - 1];
}

/// Golden-section minimization of f on [a, b]; returns the minimal value.
template <class F>
double minimize(F f, double a, double b) {
    const auto r = boost::math::tools::brent_find_minima(f, a, b, 50);
    return r.second;
}

/// Complex-step derivative of a real-analytic function of several real variables.
template <class F>
double complex_step(F f, std::vector<double> x, std::size_t k, double h = 1e-30) {
    std::vector<cplx> xc(x.begin(), x.end());
    xc[k] += cplx(0.0, h);
    return f(xc).imag() / h;
}

} // namespace testing_support
