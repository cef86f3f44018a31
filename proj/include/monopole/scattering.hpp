#pragma once

#include "core.hpp"
#include "hyperbolic.hpp"
#include "metric.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <functional>
#include <vector>

/// Scattering equation (d/dt + A(gamma') - i Phi) s = 0 along geodesics.
namespace monopole::scattering {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Vec3 = std::array<double, 3>;

/// Higgs field and connection component along the tangent at arc-length parameter t.
struct FieldValue {
    Mat2 phi;
    Mat2 a;
};

using FieldSampler = std::function<FieldValue(double)>;

/// Coefficient matrix of ds/dt = (i Phi - A) s.
inline Mat2 generator(const FieldValue& f) { return I * f.phi - f.a; }

enum class Scheme { Dopri5, Fehlberg78 };

namespace detail {

using State = std::vector<cplx>;

/// Integrates ds/dt = L(t) s for a state of n columns packed column-major in 2x n.
inline void propagate(const FieldSampler& fields, State& s, double ta, double tb, double tol, Scheme scheme) {
    namespace ode = boost::numeric::odeint;
    const std::size_t cols = s.size() / 2;
    auto rhs = [&](const State& x, State& dx, double t) {
        const Mat2 L = generator(fields(t));
        for (std::size_t c = 0; c < cols; ++c) {
            dx[2 * c] = L(0, 0) * x[2 * c] + L(0, 1) * x[2 * c + 1];
            dx[2 * c + 1] = L(1, 0) * x[2 * c] + L(1, 1) * x[2 * c + 1];
        }
    };
    const double dt0 = (tb - ta) / 64.0;
    if (scheme == Scheme::Dopri5) {
        auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
        ode::integrate_adaptive(stepper, rhs, s, ta, tb, dt0);
    } else {
        auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
        ode::integrate_adaptive(stepper, rhs, s, ta, tb, dt0);
    }
    for (const cplx& v : s)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw PoleError("scattering solution blew up: singularity on the path");
}

/// Divides the state by its largest entry and returns the log of the factor.
inline double renormalize(State& s) {
    double m = 0.0;
    for (const cplx& v : s) m = std::max(m, std::abs(v));
    if (m == 0.0) throw IllConditionedError("solution vanished");
    for (cplx& v : s) v /= m;
    return std::log(m);
}

/// Segments of length at most max_len covering [ta, tb] (either orientation).
inline std::vector<double> subdivide(double ta, double tb, double max_len) {
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(tb - ta) / max_len)));
    std::vector<double> r(n + 1);
    for (int k = 0; k <= n; ++k) r[k] = ta + (tb - ta) * k / n;
    return r;
}

} // namespace detail

struct Checkpoint {
    double t;
    Mat2 M;
    double logscale; ///< H(t) = exp(logscale) M
};

struct FundamentalSolution {
    std::vector<Checkpoint> path;

    /// log of the entrywise l1 norm of H at checkpoint j.
    double log_norm_l1(std::size_t j) const { return path[j].logscale + std::log(path[j].M.cwiseAbs().sum()); }
    /// log |det H| at checkpoint j.
    double log_abs_det(std::size_t j) const {
        return 2.0 * path[j].logscale + std::log(std::abs(path[j].M.determinant()));
    }
};

/// Matrix solution with H(times[0]) = I recorded at every requested time.
inline FundamentalSolution integrate_fundamental(const FieldSampler& fields, const std::vector<double>& times,
                                                 double tol = 1e-10, Scheme scheme = Scheme::Dopri5,
                                                 double max_segment = 0.5) {
    if (times.size() < 2) throw PreconditionError("need at least two times");
    detail::State s{1.0, 0.0, 0.0, 1.0};
    double logscale = 0.0;
    FundamentalSolution sol;
    auto record = [&](double t) {
        Mat2 M;
        M << s[0], s[2], s[1], s[3];
        sol.path.push_back({t, M, logscale});
    };
    record(times[0]);
    for (std::size_t j = 1; j < times.size(); ++j) {
        const auto seg = detail::subdivide(times[j - 1], times[j], max_segment);
        for (std::size_t k = 1; k < seg.size(); ++k) {
            detail::propagate(fields, s, seg[k - 1], seg[k], tol, scheme);
            logscale += detail::renormalize(s);
        }
        record(times[j]);
    }
    return sol;
}

inline FundamentalSolution integrate_fundamental(const FieldSampler& fields, double t0, double t1, double tol = 1e-10,
                                                 Scheme scheme = Scheme::Dopri5, int checkpoints = 16) {
    std::vector<double> times(checkpoints + 1);
    for (int k = 0; k <= checkpoints; ++k) times[k] = t0 + (t1 - t0) * k / checkpoints;
    return integrate_fundamental(fields, times, tol, scheme);
}

enum class End { Positive, Negative };

/// Unit direction at t = 0 of the solution decaying at the chosen end, obtained by integrating
/// from t = +-T toward 0 starting from the decaying eigenvector of the generator at the horizon.
inline Vec2 decaying_solution(const FieldSampler& fields, End end, double T_horizon = 40.0, double tol = 1e-10,
                              Scheme scheme = Scheme::Dopri5) {
    const double t_start = end == End::Positive ? T_horizon : -T_horizon;
    Eigen::ComplexEigenSolver<Mat2> es(generator(fields(t_start)));
    const auto ev = es.eigenvalues();
    if (std::abs(ev[0].real() - ev[1].real()) < 1e-8) throw IllConditionedError("no spectral gap at the horizon");
    // Decaying forward in t means the eigenvalue with smaller real part at +T and larger at -T.
    int pick = ev[0].real() < ev[1].real() ? 0 : 1;
    if (end == End::Negative) pick = 1 - pick;
    const Vec2 seed = es.eigenvectors().col(pick).normalized();
    detail::State s{seed[0], seed[1]};
    const auto seg = detail::subdivide(t_start, 0.0, 0.5);
    for (std::size_t k = 1; k < seg.size(); ++k) {
        detail::propagate(fields, s, seg[k - 1], seg[k], tol, scheme);
        detail::renormalize(s);
    }
    Vec2 v(s[0], s[1]);
    return v.normalized();
}

/// Distance between complex lines spanned by unit vectors a and b.
inline double direction_distance(const Vec2& a, const Vec2& b) {
    const cplx ip = b.dot(a);
    const cplx phase = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cplx(1.0);
    return (a - phase * b).norm();
}

/// Symplectic pairing det[a b].
inline cplx pairing(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

struct DecayingData {
    Vec2 s0;       ///< decays as t -> +infinity
    Vec2 s0_prime; ///< decays as t -> -infinity
    cplx pairing;
};

inline DecayingData decaying_data(const FieldSampler& fields, double T_horizon = 40.0, double tol = 1e-10,
                                  Scheme scheme = Scheme::Dopri5) {
    const Vec2 a = decaying_solution(fields, End::Positive, T_horizon, tol, scheme);
    const Vec2 b = decaying_solution(fields, End::Negative, T_horizon, tol, scheme);
    return {a, b, pairing(a, b)};
}

/// |<s0, s0'>| for unit directions; zero exactly on spectral lines.
inline double spectral_indicator(const DecayingData& d) { return std::abs(d.pairing); }

inline double spectral_indicator(const FieldSampler& fields, double T_horizon = 40.0, double tol = 1e-10) {
    return spectral_indicator(decaying_data(fields, T_horizon, tol));
}

/// Operator norm of M = P+ - P- for the splitting into decaying subspaces at t = 0.
inline double m_gamma_norm(const DecayingData& d, double min_pairing = 1e-14) {
    if (std::abs(d.pairing) < min_pairing) throw IllConditionedError("spectral line: M_gamma is undefined");
    Eigen::RowVector2cd w;
    w << d.s0_prime[1], -d.s0_prime[0];
    const Mat2 P = d.s0 * w / d.pairing;
    const Mat2 M = 2.0 * P - Mat2::Identity();
    Eigen::JacobiSVD<Mat2> svd(M);
    return svd.singularValues()[0];
}

inline double m_gamma_norm(const FieldSampler& fields, double T_horizon = 40.0, double tol = 1e-10) {
    return m_gamma_norm(decaying_data(fields, T_horizon, tol));
}

// Fixtures.

/// Constant abelian field of mass m: Phi = diag(i m, -i m), A = 0.
inline FieldSampler trivial_u1(double m) {
    return [m](double) {
        FieldValue f;
        f.phi << I * m, 0.0, 0.0, -I * m;
        f.a.setZero();
        return f;
    };
}

/// Pauli matrices.
inline std::array<Mat2, 3> pauli() {
    Mat2 s1, s2, s3;
    s1 << 0.0, 1.0, 1.0, 0.0;
    s2 << 0.0, -I, I, 0.0;
    s3 << 1.0, 0.0, 0.0, -1.0;
    return {s1, s2, s3};
}

/// Profiles of the charge-one spherically symmetric SU(2) monopole of unit mass:
/// H(r) = 2 (coth 2r - 1/(2r)), W(r) = 2 (1 - 2r / sinh 2r) / (2r).
inline double ps_higgs_profile(double r) {
    const double R = 2.0 * r;
    if (R < 1e-3) return 2.0 * (R / 3.0 - R * R * R / 45.0);
    return 2.0 * (1.0 / std::tanh(R) - 1.0 / R);
}

inline double ps_gauge_profile(double r) {
    const double R = 2.0 * r;
    if (R < 1e-3) return 2.0 * (R / 6.0 - 7.0 * R * R * R / 360.0);
    const double e = std::exp(-R);
    const double R_over_sinh = 2.0 * R * e / (1.0 - e * e);
    return 2.0 * (1.0 - R_over_sinh) / R;
}

/// Fields of the charge-one monopole centered at c, with T_a = -(i/2) sigma_a:
/// Phi = -H(r) n^a T_a, A_i = W(r) eps_{aij} n^j T_a. This pair satisfies D Phi = *F.
struct PSMonopole {
    Vec3 center{0.0, 0.0, 0.0};

    FieldValue at(const Vec3& x, const Vec3& d) const {
        const Vec3 y{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        const auto s = pauli();
        FieldValue f;
        f.phi.setZero();
        f.a.setZero();
        if (r == 0.0) return f;
        const Vec3 n{y[0] / r, y[1] / r, y[2] / r};
        const Vec3 dxn{d[1] * n[2] - d[2] * n[1], d[2] * n[0] - d[0] * n[2], d[0] * n[1] - d[1] * n[0]};
        const double H = ps_higgs_profile(r), W = ps_gauge_profile(r);
        for (int a = 0; a < 3; ++a) {
            const Mat2 T = -0.5 * I * s[a];
            f.phi += -H * n[a] * T;
            f.a += W * dxn[a] * T;
        }
        return f;
    }

    /// Sampler along the line x0 + t d.
    FieldSampler along(const Vec3& x0, const Vec3& d) const {
        return [m = *this, x0, d](double t) { return m.at({x0[0] + t * d[0], x0[1] + t * d[1], x0[2] + t * d[2]}, d); };
    }
};

/// Abelian field Phi = diag(iV, -iV), A = diag(i a, -i a) with a = omega-connection along the
/// hyperbolic geodesic g parameterized by arc length from its closest point to base.
inline FieldSampler abelian_hyperbolic(const hyperbolic::MultiCenterPotential& V,
                                       const hyperbolic::OrientedGeodesic& g,
                                       const hyperbolic::PointUHS& base = hyperbolic::O) {
    const metric::DiracConnection w(V);
    return [V, w, g, base](double t) {
        const auto x = hyperbolic::geodesic_point(g, base, t);
        const double v = hyperbolic::potential(V, x);
        const double h = 1e-5;
        const auto xp = hyperbolic::geodesic_point(g, base, t + h);
        const auto xm = hyperbolic::geodesic_point(g, base, t - h);
        const Vec3 vel{(xp.x() - xm.x()) / (2 * h), (xp.y() - xm.y()) / (2 * h), (xp.z() - xm.z()) / (2 * h)};
        double a = 0.0;
        if (w.size() > 0) {
            const auto A = w.A(x);
            a = A[0] * vel[0] + A[1] * vel[1] + A[2] * vel[2];
        }
        FieldValue f;
        f.phi << I * v, 0.0, 0.0, -I * v;
        f.a << I * a, 0.0, 0.0, -I * a;
        return f;
    };
}

/// Geodesic of the growth experiment in coordinates adapted to a center at O: the w = 0 slice
/// geodesic (z, 0) with z real, i.e. the vertical line above z.
inline hyperbolic::OrientedGeodesic growth_geodesic(double impact) {
    return {hyperbolic::BoundaryPoint::infinity(), hyperbolic::BoundaryPoint::finite(impact)};
}

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> impacts;
    std::vector<double> log_norms;
};

inline GrowthFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    GrowthFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    const double mean = sy / n;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_tot += sq(y[i] - mean);
        ss_res += sq(y[i] - f.slope * x[i] - f.intercept);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

/// log ||H|| over t in [-delta, delta] for the growth geodesic at the given impact parameter,
/// with the configuration moved so that center i sits at O.
inline double growth_log_norm(const hyperbolic::MultiCenterPotential& V, std::size_t i, double delta, double impact,
                              double tol = 1e-10) {
    const auto Va = V.transformed(hyperbolic::adapted_isometry(V.centers()[i]));
    const auto fields = abelian_hyperbolic(Va, growth_geodesic(impact));
    const auto sol = integrate_fundamental(fields, std::vector<double>{-delta, delta}, tol);
    return sol.log_norm_l1(1);
}

/// Least-squares slope of log ||H(z)|| against log(1/|z|).
inline GrowthFit abelian_growth_exponent(const hyperbolic::MultiCenterPotential& V, std::size_t i, double delta,
                                         const std::vector<double>& z_samples, double tol = 1e-10) {
    if (i >= V.size()) throw RangeError("center index out of range");
    if (z_samples.size() < 2) throw PreconditionError("need at least two impact parameters");
    std::vector<double> x, y;
    for (double z : z_samples) {
        if (!(z > 0.0 && z < delta)) throw RangeError("impact parameters must lie in (0, delta)");
        x.push_back(std::log(1.0 / z));
        y.push_back(growth_log_norm(V, i, delta, z, tol));
    }
    GrowthFit f = least_squares(x, y);
    f.impacts = z_samples;
    f.log_norms = y;
    return f;
}

/// l sinh^{-1}(delta / |z|), the integral of l / (2 sqrt(t^2 + z^2)) over [-delta, delta].
inline double model_growth_integral(int l, double delta, double impact) { return l * std::asinh(delta / impact); }

} // namespace monopole::scattering
