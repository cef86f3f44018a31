#pragma once

#include "core.hpp"
#include "hyperbolic.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <limits>

/// Twistor space of oriented geodesics in H^3, P1 x P1 minus the anti-diagonal.
namespace monopole::twistor {

using hyperbolic::BoundaryPoint;
using hyperbolic::Mobius;
using hyperbolic::OrientedGeodesic;
using hyperbolic::PointUHS;
using hyperbolic::tau;

/// (z, w) = (end point, antipode of start point) of an oriented geodesic.
class TwistorPoint {
public:
    TwistorPoint(BoundaryPoint z, BoundaryPoint w) : z_(z), w_(w) {
        if (hyperbolic::chordal_distance(z_, tau(w_)) < 1e-14)
            throw DomainError("twistor point lies on the anti-diagonal");
    }
    TwistorPoint(cplx z, cplx w) : TwistorPoint(BoundaryPoint::finite(z), BoundaryPoint::finite(w)) {}

    const BoundaryPoint& z() const { return z_; }
    const BoundaryPoint& w() const { return w_; }
    bool finite() const { return !z_.is_infinity() && !w_.is_infinity(); }

private:
    BoundaryPoint z_, w_;
};

inline TwistorPoint from_geodesic(const OrientedGeodesic& g) { return {g.end(), tau(g.start())}; }

inline OrientedGeodesic to_geodesic(const TwistorPoint& p) { return {tau(p.w()), p.z()}; }

/// Orientation reversal (z, w) -> (tau w, tau z).
inline TwistorPoint sigma(const TwistorPoint& p) { return {tau(p.w()), tau(p.z())}; }

/// Action of an isometry on twistor space; tau-equivariant maps (rotations about O) act diagonally.
inline TwistorPoint transform(const Mobius& m, const TwistorPoint& p) {
    return from_geodesic(OrientedGeodesic(m(tau(p.w())), m(p.z())));
}

/// Components (dz-bar, dw-bar) of the (0,1) part of theta in the finite chart.
inline std::array<cplx, 2> theta01(cplx z, cplx w) {
    const cplx d1 = (1.0 + std::norm(z)) * (1.0 + std::conj(z) * w);
    const cplx d2 = (1.0 + std::norm(w)) * (1.0 + z * std::conj(w));
    if (std::abs(1.0 + std::conj(z) * w) < 1e-300) throw PoleError("theta is singular on the anti-diagonal");
    return {(z - w) / d1, (z - w) / d2};
}

/// cosh of the distance from O to the geodesic (z, w).
inline double cosh_rho_endpoints(cplx z, cplx w) {
    const double den = std::abs(1.0 + z * std::conj(w));
    if (den == 0.0) throw PoleError("anti-diagonal: distance is infinite");
    return std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w))) / den;
}

/// Closest point to O on the geodesic (z, w) written in real variables, so T may be a complex
/// number for complex-step differentiation. Returns (x, y, height).
template <class T>
std::array<T, 3> closest_point_real(T zr, T zi, T wr, T wi) {
    using std::sqrt;
    const T z2 = zr * zr + zi * zi;
    const T w2 = wr * wr + wi * wi;
    const T mu = T(1.0) / (T(1.0) + T(2.0) * w2 + z2 * w2);
    const T re = T(1.0) + zr * wr + zi * wi;
    const T im = zi * wr - zr * wi;
    const T height = mu * sqrt((T(1.0) + z2) * (T(1.0) + w2)) * sqrt(re * re + im * im);
    return {mu * ((T(1.0) + w2) * zr - (T(1.0) + z2) * wr), mu * ((T(1.0) + w2) * zi - (T(1.0) + z2) * wi), height};
}

inline PointUHS closest_point_finite(cplx z, cplx w) {
    const auto f = closest_point_real<double>(z.real(), z.imag(), w.real(), w.imag());
    return PointUHS(f[0], f[1], f[2]);
}

/// Closest point to O on the geodesic p; charts at infinity are handled by a rotation about O.
inline PointUHS closest_point(const TwistorPoint& p) {
    if (p.finite()) return closest_point_finite(p.z().value(), p.w().value());
    const std::array<Mobius, 3> rotations{hyperbolic::chart_rotation(),
                                          hyperbolic::rotation_to_infinity(BoundaryPoint::finite({2.0, 1.0})),
                                          hyperbolic::rotation_to_infinity(BoundaryPoint::finite({-0.5, 3.0}))};
    for (const auto& R : rotations) {
        const TwistorPoint q = transform(R, p);
        if (q.finite()) return R.inverse()(closest_point_finite(q.z().value(), q.w().value()));
    }
    throw ChartError("no finite chart found for twistor point");
}

/// Polynomial section of O(a, b) in the finite chart, sum c_jk z^j w^k.
class BiDegreeSection {
public:
    BiDegreeSection(int a, int b) : c_(Eigen::MatrixXcd::Zero(a + 1, b + 1)) {
        if (a < 0 || b < 0) throw PreconditionError("degrees must be nonnegative");
    }
    explicit BiDegreeSection(Eigen::MatrixXcd coeffs) : c_(std::move(coeffs)) {
        if (c_.rows() < 1 || c_.cols() < 1) throw PreconditionError("empty coefficient matrix");
    }

    static BiDegreeSection constant(cplx v) {
        BiDegreeSection s(0, 0);
        s.c_(0, 0) = v;
        return s;
    }

    int degree_z() const { return static_cast<int>(c_.rows()) - 1; }
    int degree_w() const { return static_cast<int>(c_.cols()) - 1; }
    const Eigen::MatrixXcd& coeffs() const { return c_; }
    cplx coeff(int j, int k) const { return c_(j, k); }

    cplx operator()(cplx z, cplx w) const {
        cplx acc = 0.0, zp = 1.0;
        for (int j = 0; j <= degree_z(); ++j, zp *= z) {
            cplx row = 0.0, wp = 1.0;
            for (int k = 0; k <= degree_w(); ++k, wp *= w) row += c_(j, k) * wp;
            acc += zp * row;
        }
        return acc;
    }

    BiDegreeSection operator*(const BiDegreeSection& o) const {
        BiDegreeSection r(degree_z() + o.degree_z(), degree_w() + o.degree_w());
        for (int j = 0; j <= degree_z(); ++j)
            for (int k = 0; k <= degree_w(); ++k)
                for (int m = 0; m <= o.degree_z(); ++m)
                    for (int n = 0; n <= o.degree_w(); ++n) r.c_(j + m, k + n) += c_(j, k) * o.c_(m, n);
        return r;
    }

    BiDegreeSection pow(int e) const {
        if (e < 0) throw PreconditionError("negative power of a section");
        BiDegreeSection r = constant(1.0);
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    /// Same section in the chart (1/z, w): p(z, w) = z^a q(1/z, w).
    BiDegreeSection chart_swap_z() const { return BiDegreeSection(Eigen::MatrixXcd(c_.colwise().reverse())); }

    /// Image under the real structure: c_jk -> (-1)^l (-1)^(j+k) conj(c_{l-k, l-j}).
    BiDegreeSection reality_involution() const {
        const int l = degree_z();
        if (degree_w() != l) throw PreconditionError("reality involution needs equal bidegree");
        BiDegreeSection r(l, l);
        for (int j = 0; j <= l; ++j)
            for (int k = 0; k <= l; ++k)
                r.c_(j, k) = ((l + j + k) % 2 == 0 ? 1.0 : -1.0) * std::conj(c_(l - k, l - j));
        return r;
    }

    bool is_sigma_real(double tol = 1e-12) const {
        if (degree_w() != degree_z()) return false;
        const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
        return (reality_involution().c_ - c_).cwiseAbs().maxCoeff() <= tol * scale;
    }

private:
    Eigen::MatrixXcd c_;
};

/// Normalized section of O(1,1) vanishing on the twistor line of x = (xi, c):
/// [(z - xi) + conj(xi) z w - (|xi|^2 + c^2) w] / c.
inline BiDegreeSection twistor_line_section(const PointUHS& x) {
    const cplx xi = x.xi();
    const double c = x.z();
    BiDegreeSection s(1, 1);
    Eigen::MatrixXcd m(2, 2);
    m(0, 0) = -xi / c;
    m(1, 0) = 1.0 / c;
    m(0, 1) = -(std::norm(xi) + c * c) / c;
    m(1, 1) = std::conj(xi) / c;
    return BiDegreeSection(m);
}

/// Recovers the point whose twistor line is the zero set of a (1,1) section of the form above.
inline PointUHS point_of_line_section(const BiDegreeSection& s) {
    if (s.degree_z() != 1 || s.degree_w() != 1) throw PreconditionError("expected a (1,1) section");
    const cplx c10 = s.coeff(1, 0);
    if (std::abs(c10) == 0.0) throw DomainError("section is not a twistor line section");
    const cplx xi = -s.coeff(0, 0) / c10;
    const double c2 = (-s.coeff(0, 1) / c10).real() - std::norm(xi);
    if (!(c2 > 0.0)) throw DomainError("section is not a twistor line section");
    return PointUHS(xi, std::sqrt(c2));
}

/// p-tilde = prod p-tilde_i^{l_i} for the centers of V.
inline BiDegreeSection ptilde(const hyperbolic::MultiCenterPotential& V) {
    BiDegreeSection r = BiDegreeSection::constant(1.0);
    for (std::size_t i = 0; i < V.size(); ++i) r = r * twistor_line_section(V.centers()[i]).pow(V.charges()[i]);
    return r;
}

/// Integrand 2 / (1 + |zeta|^2)^2.
inline double gamma_L_integrand(cplx zeta) { return 2.0 / sq(1.0 + std::norm(zeta)); }

/// Integral of 2/(1+|zeta|^2)^2 over the plane against the 2-form dzeta ^ dzeta-bar,
/// oriented so that dzeta ^ dzeta-bar = +2i dx dy. Truncated to |zeta| < R when R is finite.
inline cplx gamma_L_integral(double R = std::numeric_limits<double>::infinity()) {
    auto radial = [](double r) { return gamma_L_integrand(r) * 2.0 * pi * r; };
    double area;
    if (std::isinf(R)) {
        boost::math::quadrature::exp_sinh<double> integrator;
        area = integrator.integrate(radial, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
    } else {
        area = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, R, 15, 1e-14);
    }
    return 2.0 * I * area;
}

} // namespace monopole::twistor
