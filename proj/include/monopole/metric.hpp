#pragma once

#include "core.hpp"
#include "curvature.hpp"
#include "hyperbolic.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <vector>

/// Geometry of the charge-one moduli space: circle bundle over H^3 minus the centers with
/// connection omega, d omega = *dV, its conformal metric and the Kahler metrics of each boundary gauge.
namespace monopole::metric {

using curvature::Mat4;
using curvature::Vec4;
using hyperbolic::BoundaryPoint;
using hyperbolic::Mobius;
using hyperbolic::MultiCenterPotential;
using hyperbolic::PointUHS;
using Vec3 = std::array<double, 3>;

/// Coordinates (x, y, z, theta) on the circle bundle; orientation dx dy dz dtheta.
struct MFramePoint {
    double x = 0.0, y = 0.0, z = 1.0, theta = 0.0;
    Vec4 vec() const { return {x, y, z, theta}; }
    static MFramePoint from(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
    PointUHS base() const { return PointUHS(x, y, z); }
};

enum class Patch { North, South };

/// Sum over centers of the Dirac potentials (l_i/2)(cos theta_i -+ 1) d phi_i in geodesic polar
/// coordinates about p_i. The optional perturbation adds eps * x dy, which is not closed.
class DiracConnection {
public:
    explicit DiracConnection(const MultiCenterPotential& V, double perturbation = 0.0)
        : centers_(V.centers()), charges_(V.charges()), eps_(perturbation) {}

    std::size_t size() const { return centers_.size(); }
    double perturbation() const { return eps_; }

    /// cos of the polar angle about center i, measured from the upward vertical at p_i.
    double cos_polar(std::size_t i, double x, double y, double z) const {
        const auto& p = centers_[i];
        const double d2 = sq(x - p.x()) + sq(y - p.y());
        const double c = p.z();
        return (d2 + z * z - c * c) / std::sqrt((d2 + sq(z - c)) * (d2 + sq(z + c)));
    }

    /// Patch regular at the given point: north (string below the center) when cos theta >= 0.
    std::vector<Patch> patches_at(const PointUHS& x) const {
        std::vector<Patch> r;
        for (std::size_t i = 0; i < centers_.size(); ++i)
            r.push_back(cos_polar(i, x.x(), x.y(), x.z()) >= 0.0 ? Patch::North : Patch::South);
        return r;
    }

    /// Components (A_x, A_y, A_z) with omega = dtheta + A.
    Vec3 A(double x, double y, double z, const std::vector<Patch>& patches) const {
        if (!(z > 0.0)) throw DomainError("connection evaluated outside the upper half-space");
        Vec3 a{0.0, eps_ * x, 0.0};
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const auto& p = centers_[i];
            const double dx = x - p.x(), dy = y - p.y();
            const double d2 = dx * dx + dy * dy;
            if (d2 == 0.0) throw PoleError("connection evaluated on a Dirac string axis");
            const double ct = cos_polar(i, x, y, z);
            const double f = 0.5 * charges_[i] * (ct + (patches[i] == Patch::North ? -1.0 : 1.0));
            a[0] += f * (-dy / d2);
            a[1] += f * (dx / d2);
        }
        return a;
    }

    Vec3 A(const PointUHS& x) const { return A(x.x(), x.y(), x.z(), patches_at(x)); }

private:
    std::vector<PointUHS> centers_;
    std::vector<int> charges_;
    double eps_;
};

/// Coordinate components of V h + V^{-1} omega (x) omega given V and A at a point.
inline Mat4 gh_metric(double V, double z, const Vec3& A) {
    Mat4 g = Mat4::Zero();
    for (int a = 0; a < 3; ++a) {
        g(a, a) += V / (z * z);
        for (int b = 0; b < 3; ++b) g(a, b) += A[a] * A[b] / V;
        g(a, 3) = g(3, a) = A[a] / V;
    }
    g(3, 3) = 1.0 / V;
    return g;
}

/// The self-dual conformal representative V h + V^{-1} omega^2 at p.
inline Mat4 metric_asd(const MultiCenterPotential& V, const DiracConnection& w, const MFramePoint& p) {
    const PointUHS x = p.base();
    return gh_metric(hyperbolic::potential(V, x), x.z(), w.A(x));
}

/// Sampler for metric_asd with Dirac patches frozen at the base point, for stencil use.
inline curvature::MetricSampler asd_sampler(const MultiCenterPotential& V, const DiracConnection& w,
                                            const MFramePoint& base) {
    const auto patches = w.patches_at(base.base());
    return [V, w, patches](const Vec4& q) {
        const PointUHS x(q[0], q[1], q[2]);
        return gh_metric(hyperbolic::potential(V, x), q[2], w.A(q[0], q[1], q[2], patches));
    };
}

/// Kahler structure g = z^2 (V h + V^{-1} omega^2) in coordinates rotated about O so that u is at
/// infinity (z is then the horospherical height q_u). All samplers take rotated coordinates.
class KahlerStructure {
public:
    KahlerStructure(const MultiCenterPotential& V, const BoundaryPoint& u, double perturbation = 0.0)
        : rotation_(hyperbolic::rotation_to_infinity(u)), V_(V.transformed(rotation_)), w_(V_, perturbation) {}

    const Mobius& rotation() const { return rotation_; }
    const MultiCenterPotential& potential() const { return V_; }
    const DiracConnection& connection() const { return w_; }

    /// Point in rotated coordinates corresponding to a point in the original coordinates.
    MFramePoint to_rotated(const MFramePoint& p) const {
        const PointUHS r = rotation_(p.base());
        return {r.x(), r.y(), r.z(), p.theta};
    }

    static Mat4 metric_from(double V, double z, const Vec3& A) { return z * z * gh_metric(V, z, A); }

    /// J on vectors in coordinates (x, y, z, theta); J* dx = dy, J* dz = z V^{-1} omega.
    static Mat4 J_from(double V, double z, const Vec3& A) {
        Mat4 P = Mat4::Identity();
        P(3, 0) = A[0];
        P(3, 1) = A[1];
        P(3, 2) = A[2];
        Mat4 K = Mat4::Zero();
        K(1, 0) = -1.0;
        K(0, 1) = 1.0;
        K(3, 2) = -V / z;
        K(2, 3) = z / V;
        return P.inverse() * K * P;
    }

    static Mat4 Omega_from(double V, double z, const Vec3& A) { return J_from(V, z, A).transpose() * metric_from(V, z, A); }

    Mat4 metric(const MFramePoint& p) const { return eval(p, &metric_from); }
    Mat4 J(const MFramePoint& p) const { return eval(p, &J_from); }
    Mat4 Omega(const MFramePoint& p) const { return eval(p, &Omega_from); }

    curvature::MetricSampler metric_sampler(const MFramePoint& base) const { return sampler(base, &metric_from); }
    curvature::EndomorphismSampler J_sampler(const MFramePoint& base) const { return sampler(base, &J_from); }
    curvature::MetricSampler Omega_sampler(const MFramePoint& base) const { return sampler(base, &Omega_from); }

private:
    using Builder = Mat4 (*)(double, double, const Vec3&);
    Mat4 eval(const MFramePoint& p, Builder f) const {
        const PointUHS x = p.base();
        return f(hyperbolic::potential(V_, x), x.z(), w_.A(x));
    }
    std::function<Mat4(const Vec4&)> sampler(const MFramePoint& base, Builder f) const {
        const auto patches = w_.patches_at(base.base());
        return [V = V_, w = w_, patches, f](const Vec4& q) {
            const PointUHS x(q[0], q[1], q[2]);
            return f(hyperbolic::potential(V, x), q[2], w.A(q[0], q[1], q[2], patches));
        };
    }

    Mobius rotation_;
    MultiCenterPotential V_;
    DiracConnection w_;
};

/// Default stencil step: 1e-3 times the local length scale (height and distance to the centers).
inline double default_step(const MultiCenterPotential& V, const MFramePoint& p) {
    double s = p.z;
    for (const auto& c : V.centers())
        s = std::min(s, std::sqrt(sq(p.x - c.x()) + sq(p.y - c.y()) + sq(p.z - c.z())));
    return 1e-3 * s;
}

inline curvature::CurvatureReport curvature(const curvature::MetricSampler& f, const MFramePoint& p, double step) {
    return curvature::curvature(f, p.vec(), step);
}

inline double dOmega_residual(const curvature::MetricSampler& Omega, const MFramePoint& p, double step) {
    return curvature::exterior_derivative_residual(Omega, p.vec(), step);
}

inline double nijenhuis_residual(const curvature::EndomorphismSampler& J, const MFramePoint& p, double step) {
    return curvature::nijenhuis_residual(J, p.vec(), step);
}

/// max over components of |d omega - *dV|, with *dV = z^{-1} *_E dV, by extrapolated central differences.
inline double domega_star_dv_residual(const MultiCenterPotential& V, const DiracConnection& w, const PointUHS& x,
                                      double step) {
    const auto patches = w.patches_at(x);
    auto Af = [&](const Vec4& q) {
        const Vec3 a = w.A(q[0], q[1], q[2], patches);
        Mat4 m = Mat4::Zero();
        m(0, 0) = a[0];
        m(0, 1) = a[1];
        m(0, 2) = a[2];
        return m;
    };
    const Vec4 p{x.x(), x.y(), x.z(), 0.0};
    std::array<Mat4, 3> dA;
    for (int k = 0; k < 3; ++k) dA[k] = curvature::d1_extrapolated(Af, p, k, step);
    const Vec3 curl{dA[1](0, 2) - dA[2](0, 1), dA[2](0, 0) - dA[0](0, 2), dA[0](0, 1) - dA[1](0, 0)};
    const auto g = hyperbolic::potential_gradient(V, x);
    double r = 0.0;
    for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(curl[k] - g[k] / x.z()));
    return r;
}

/// 2 lim rho_i V along the vertical ray into p_i, by polynomial extrapolation in rho.
inline double abelian_charge(const MultiCenterPotential& V, std::size_t i, double rho0 = 0.05, int levels = 7) {
    if (i >= V.size()) throw RangeError("center index out of range");
    const PointUHS& p = V.centers()[i];
    std::vector<double> rho(levels), f(levels);
    for (int k = 0; k < levels; ++k) {
        rho[k] = rho0 / std::pow(2.0, k);
        f[k] = 2.0 * rho[k] * hyperbolic::potential(V, PointUHS(p.x(), p.y(), p.z() * std::exp(rho[k])));
    }
    // Neville's scheme evaluated at rho = 0.
    for (int m = 1; m < levels; ++m)
        for (int k = levels - 1; k >= m; --k) f[k] = (rho[k - m] * f[k] - rho[k] * f[k - 1]) / (rho[k - m] - rho[k]);
    return f[levels - 1];
}

/// Exterior algebra in dimension n with forms stored as full antisymmetric component arrays.
namespace forms {

struct Form {
    int n = 4;
    int p = 0;
    std::vector<double> c; ///< n^p components
    Form(int n_, int p_) : n(n_), p(p_), c(static_cast<std::size_t>(std::pow(n_, p_)), 0.0) {}
    double& at(const std::vector<int>& I) { return c[flat(I)]; }
    double at(const std::vector<int>& I) const { return c[flat(I)]; }
    std::size_t flat(const std::vector<int>& I) const {
        std::size_t k = 0;
        for (int i : I) k = k * n + i;
        return k;
    }
};

inline double perm_sign(std::vector<int> v) {
    double s = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) return 0.0;
            if (v[i] > v[j]) s = -s;
        }
    return s;
}

inline void for_each_index(int n, int p, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> I(p, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(n, p));
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t r = k;
        for (int j = p - 1; j >= 0; --j) {
            I[j] = static_cast<int>(r % n);
            r /= n;
        }
        f(I);
    }
}

/// Basic form dx^{i1} ^ ... ^ dx^{ip}.
inline Form basic(int n, const std::vector<int>& I) {
    Form f(n, static_cast<int>(I.size()));
    for_each_index(n, f.p, [&](const std::vector<int>& J) {
        std::vector<int> pos;
        for (int j : J) {
            auto it = std::find(I.begin(), I.end(), j);
            if (it == I.end()) return;
            pos.push_back(static_cast<int>(it - I.begin()));
        }
        f.at(J) = perm_sign(pos);
    });
    return f;
}

inline Form one_form(const std::vector<double>& comps) {
    Form f(static_cast<int>(comps.size()), 1);
    f.c = comps;
    return f;
}

inline Form wedge(const Form& a, const Form& b) {
    Form r(a.n, a.p + b.p);
    double fact_a = 1.0, fact_b = 1.0;
    for (int i = 2; i <= a.p; ++i) fact_a *= i;
    for (int i = 2; i <= b.p; ++i) fact_b *= i;
    std::vector<int> perm(r.p);
    for_each_index(r.n, r.p, [&](const std::vector<int>& I) {
        std::iota(perm.begin(), perm.end(), 0);
        double s = 0.0;
        do {
            std::vector<int> A(a.p), B(b.p);
            for (int k = 0; k < a.p; ++k) A[k] = I[perm[k]];
            for (int k = 0; k < b.p; ++k) B[k] = I[perm[a.p + k]];
            s += perm_sign(perm) * a.at(A) * b.at(B);
        } while (std::next_permutation(perm.begin(), perm.end()));
        r.at(I) = s / (fact_a * fact_b);
    });
    return r;
}

/// Hodge star for metric g (coordinate components) with the coordinate orientation.
inline Form hodge(const Eigen::MatrixXd& g, const Form& a) {
    const int n = a.n;
    const Eigen::MatrixXd gi = g.inverse();
    const double vol = std::sqrt(g.determinant());
    Form up(n, a.p);
    for_each_index(n, a.p, [&](const std::vector<int>& I) {
        double s = 0.0;
        for_each_index(n, a.p, [&](const std::vector<int>& K) {
            double w = a.at(K);
            if (w == 0.0) return;
            for (int j = 0; j < a.p; ++j) w *= gi(I[j], K[j]);
            s += w;
        });
        up.at(I) = s;
    });
    double fact = 1.0;
    for (int i = 2; i <= a.p; ++i) fact *= i;
    Form r(n, n - a.p);
    for_each_index(n, n - a.p, [&](const std::vector<int>& J) {
        double s = 0.0;
        for_each_index(n, a.p, [&](const std::vector<int>& I) {
            std::vector<int> full(I);
            full.insert(full.end(), J.begin(), J.end());
            s += up.at(I) * perm_sign(full);
        });
        r.at(J) = vol * s / fact;
    });
    return r;
}

/// Pulls a form on the first three coordinates back to dimension 4.
inline Form lift3to4(const Form& a) {
    Form r(4, a.p);
    for_each_index(3, a.p, [&](const std::vector<int>& I) { r.at(I) = a.at(I); });
    return r;
}

inline double max_diff(const Form& a, const Form& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

} // namespace forms

/// Max residual of  *^ alpha = V^{-1} (*alpha) ^ omega  (alpha a 2-form on H^3) and
/// *^ (alpha ^ omega) = V *alpha  (alpha a 1-form), over coordinate basis forms, with the metric
/// built from w_metric and omega taken from w_identity (normally the same connection).
inline double hodge_identity_residuals(const MultiCenterPotential& V, const DiracConnection& w_metric,
                                       const DiracConnection& w_identity, const MFramePoint& p) {
    const PointUHS x = p.base();
    const double v = hyperbolic::potential(V, x);
    const Mat4 g4 = gh_metric(v, x.z(), w_metric.A(x));
    const Eigen::Matrix3d h = Eigen::Matrix3d::Identity() / (x.z() * x.z());
    const Vec3 a = w_identity.A(x);
    const forms::Form omega = forms::one_form({a[0], a[1], a[2], 1.0});
    double r = 0.0;
    for (const std::vector<int>& I : std::vector<std::vector<int>>{{0, 1}, {1, 2}, {2, 0}}) {
        const forms::Form alpha3 = forms::basic(3, I);
        const forms::Form lhs = forms::hodge(g4, forms::lift3to4(alpha3));
        forms::Form rhs = forms::wedge(forms::lift3to4(forms::hodge(h, alpha3)), omega);
        for (auto& c : rhs.c) c /= v;
        r = std::max(r, forms::max_diff(lhs, rhs));
    }
    for (int i = 0; i < 3; ++i) {
        const forms::Form alpha3 = forms::basic(3, {i});
        const forms::Form lhs = forms::hodge(g4, forms::wedge(forms::lift3to4(alpha3), omega));
        forms::Form rhs = forms::lift3to4(forms::hodge(h, alpha3));
        for (auto& c : rhs.c) c *= v;
        r = std::max(r, forms::max_diff(lhs, rhs));
    }
    return r;
}

inline double hodge_identity_residuals(const MultiCenterPotential& V, const DiracConnection& w, const MFramePoint& p) {
    return hodge_identity_residuals(V, w, w, p);
}

/// (q_{u1} / q_{u2})^2 at p, the conformal factor relating the Kahler metrics of two gauges.
inline double conformal_gauge_factor(const BoundaryPoint& u1, const BoundaryPoint& u2, const MFramePoint& p) {
    const PointUHS x = p.base();
    return sq(hyperbolic::horospherical_height(u1, hyperbolic::O, x) /
              hyperbolic::horospherical_height(u2, hyperbolic::O, x));
}

/// Kahler metric of gauge u at p (original coordinates), obtained as the square of the height of the
/// rotated point times the conformal metric.
inline Mat4 gauge_metric(const MultiCenterPotential& V, const DiracConnection& w, const BoundaryPoint& u,
                         const MFramePoint& p) {
    const double q = hyperbolic::rotation_to_infinity(u)(p.base()).z();
    return q * q * metric_asd(V, w, p);
}

/// Relative Frobenius residual of g_{u1} = factor * g_{u2} at p.
inline double gauge_identity_residual(const MultiCenterPotential& V, const DiracConnection& w, const BoundaryPoint& u1,
                                      const BoundaryPoint& u2, const MFramePoint& p) {
    const Mat4 g1 = gauge_metric(V, w, u1, p);
    const Mat4 g2 = gauge_metric(V, w, u2, p);
    return (g1 - conformal_gauge_factor(u1, u2, p) * g2).norm() / g1.norm();
}

} // namespace monopole::metric
