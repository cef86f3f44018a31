#pragma once

#include "core.hpp"

#include <array>
#include <cstddef>
#include <vector>

/// Hyperbolic 3-space in the upper half-space model, metric (dx^2 + dy^2 + dz^2) / z^2.
namespace monopole::hyperbolic {

/// A point of the sphere at infinity, stored as a chart value or the point at infinity.
class BoundaryPoint {
public:
    static BoundaryPoint finite(cplx v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("boundary value must be finite; use BoundaryPoint::infinity()");
        return BoundaryPoint(v, false);
    }
    static BoundaryPoint infinity() { return BoundaryPoint({0.0, 0.0}, true); }

    bool is_infinity() const { return inf_; }
    cplx value() const {
        if (inf_) throw ChartError("boundary point is at infinity in this chart");
        return v_;
    }

    friend bool operator==(const BoundaryPoint& a, const BoundaryPoint& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }

private:
    BoundaryPoint(cplx v, bool inf) : v_(v), inf_(inf) {}
    cplx v_;
    bool inf_;
};

/// Chordal distance on the Riemann sphere (diameter 2).
inline double chordal_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
    if (a.is_infinity() && b.is_infinity()) return 0.0;
    if (a.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(b.value()));
    if (b.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(a.value()));
    const cplx u = a.value(), v = b.value();
    return 2.0 * std::abs(u - v) / std::sqrt((1.0 + std::norm(u)) * (1.0 + std::norm(v)));
}

/// Antipodal map about O, zeta -> -1/conj(zeta).
inline BoundaryPoint tau(const BoundaryPoint& p) {
    if (p.is_infinity()) return BoundaryPoint::finite(0.0);
    const cplx v = p.value();
    if (v == cplx(0.0)) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(-1.0 / std::conj(v));
}

class PointUHS {
public:
    PointUHS(double x, double y, double z) : x_(x), y_(y), z_(z) {
        if (!(z > 0.0) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw DomainError("upper half-space point needs finite coordinates and z > 0");
    }
    PointUHS(cplx xi, double z) : PointUHS(xi.real(), xi.imag(), z) {}

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    cplx xi() const { return {x_, y_}; }

    friend bool operator==(const PointUHS& a, const PointUHS& b) {
        return a.x_ == b.x_ && a.y_ == b.y_ && a.z_ == b.z_;
    }

private:
    double x_, y_, z_;
};

/// The base point (0,0,1).
inline const PointUHS O{0.0, 0.0, 1.0};

/// Element of SL(2,C) acting on the boundary by Mobius maps and on H^3 by isometries.
struct Mobius {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mobius identity() { return {}; }

    /// Rescales to determinant one.
    static Mobius normalized(cplx a, cplx b, cplx c, cplx d) {
        const cplx det = a * d - b * c;
        if (std::abs(det) == 0.0) throw DomainError("singular Mobius matrix");
        const cplx s = std::sqrt(det);
        return {a / s, b / s, c / s, d / s};
    }

    Mobius inverse() const { return {d, -b, -c, a}; }

    Mobius operator*(const Mobius& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    BoundaryPoint operator()(const BoundaryPoint& p) const {
        if (p.is_infinity()) {
            if (c == cplx(0.0)) return BoundaryPoint::infinity();
            return BoundaryPoint::finite(a / c);
        }
        const cplx zeta = p.value();
        const cplx den = c * zeta + d;
        if (den == cplx(0.0)) return BoundaryPoint::infinity();
        return BoundaryPoint::finite((a * zeta + b) / den);
    }

    PointUHS operator()(const PointUHS& p) const {
        const cplx xi = p.xi();
        const double z = p.z();
        const cplx cd = c * xi + d;
        const double D = std::norm(cd) + std::norm(c) * z * z;
        const cplx xi2 = ((a * xi + b) * std::conj(cd) + a * std::conj(c) * z * z) / D;
        return PointUHS(xi2, z / D);
    }
};

/// Isometry sending q to O by a translation and dilation.
inline Mobius adapted_isometry(const PointUHS& q) {
    const double s = std::sqrt(q.z());
    return {1.0 / s, -q.xi() / s, 0.0, s};
}

/// Rotation about O sending u to infinity (identity when u is already infinity).
inline Mobius rotation_to_infinity(const BoundaryPoint& u) {
    if (u.is_infinity()) return Mobius::identity();
    const cplx v = u.value();
    const double n = std::sqrt(1.0 + std::norm(v));
    return {std::conj(v) / n, 1.0 / n, -1.0 / n, v / n};
}

/// Fixed rotation about O used when a computation hits a coordinate singularity.
inline Mobius chart_rotation() {
    const double r = 1.0 / std::sqrt(2.0);
    return {r, I * r, I * r, r};
}

class OrientedGeodesic {
public:
    OrientedGeodesic(BoundaryPoint start, BoundaryPoint end) : start_(start), end_(end) {
        if (chordal_distance(start, end) < 1e-14)
            throw DomainError("geodesic endpoints coincide");
    }
    const BoundaryPoint& start() const { return start_; }
    const BoundaryPoint& end() const { return end_; }
    OrientedGeodesic reversed() const { return {end_, start_}; }

private:
    BoundaryPoint start_, end_;
};

/// Mobius map sending start to 0 and end to infinity.
inline Mobius geodesic_frame(const OrientedGeodesic& g) {
    if (g.end().is_infinity()) return {1.0, -g.start().value(), 0.0, 1.0};
    if (g.start().is_infinity()) return {0.0, -1.0, 1.0, -g.end().value()};
    const cplx s = g.start().value(), e = g.end().value();
    return Mobius::normalized(1.0, -s, 1.0, -e);
}

inline double cosh_dist(const PointUHS& p, const PointUHS& q) {
    const double d2 = sq(p.x() - q.x()) + sq(p.y() - q.y()) + sq(p.z() - q.z());
    return 1.0 + d2 / (2.0 * p.z() * q.z());
}

/// Hyperbolic distance, evaluated as 2 asinh(|p - q|_E / (2 sqrt(z_p z_q))) for accuracy near 0.
inline double dist(const PointUHS& p, const PointUHS& q) {
    const double e = std::sqrt(sq(p.x() - q.x()) + sq(p.y() - q.y()) + sq(p.z() - q.z()));
    return 2.0 * std::asinh(e / (2.0 * std::sqrt(p.z() * q.z())));
}

/// Horospherical height q_u with q_u(base) = 1.
inline double horospherical_height(const BoundaryPoint& u, const PointUHS& base, const PointUHS& x) {
    if (u.is_infinity()) return x.z() / base.z();
    const cplx v = u.value();
    auto poisson = [&](const PointUHS& p) { return p.z() / (std::norm(p.xi() - v) + p.z() * p.z()); };
    return poisson(x) / poisson(base);
}

/// Busemann function of the geodesic ending at u, normalized to vanish at base.
inline double busemann(const BoundaryPoint& u, const PointUHS& base, const PointUHS& x) {
    return std::log(horospherical_height(u, base, x));
}

/// Green's function as a function of distance, 1 / (e^{2 rho} - 1).
inline double green_of_rho(double rho) {
    if (!(rho > 0.0)) throw PoleError("Green's function evaluated at its pole");
    return 1.0 / std::expm1(2.0 * rho);
}

inline double green(const PointUHS& p, const PointUHS& x) { return green_of_rho(dist(p, x)); }

/// Euclidean-coordinate gradient of G_p at x.
inline std::array<double, 3> green_gradient(const PointUHS& p, const PointUHS& x) {
    const double rho = dist(p, x);
    if (!(rho > 0.0)) throw PoleError("Green's function gradient evaluated at its pole");
    const double s = std::sinh(rho);
    const double dG_dC = -0.5 / (s * s * s);
    const double zz = p.z() * x.z();
    const double dx = x.x() - p.x(), dy = x.y() - p.y(), dz = x.z() - p.z();
    const double e2 = dx * dx + dy * dy + dz * dz;
    return {dG_dC * dx / zz, dG_dC * dy / zz, dG_dC * (dz / zz - e2 / (2.0 * zz * x.z()))};
}

/// V = lambda + sum l_i G_{p_i}.
class MultiCenterPotential {
public:
    MultiCenterPotential(double lambda, std::vector<PointUHS> centers, std::vector<int> charges, double mass = 0.0)
        : lambda_(lambda), centers_(std::move(centers)), charges_(std::move(charges)), mass_(mass) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw PreconditionError("lambda must be finite and >= 0");
        if (!(mass >= 0.0) || !std::isfinite(mass)) throw PreconditionError("mass must be finite and >= 0");
        if (centers_.size() != charges_.size()) throw PreconditionError("one charge per center required");
        for (int l : charges_)
            if (l <= 0) throw PreconditionError("charges must be positive integers");
        for (std::size_t i = 0; i < centers_.size(); ++i)
            for (std::size_t j = i + 1; j < centers_.size(); ++j)
                if (dist(centers_[i], centers_[j]) < 1e-12) throw PreconditionError("centers must be distinct");
    }

    /// Potential of the charge-one moduli construction: lambda = 1 + 2m and doubled charges.
    static MultiCenterPotential moduli(double mass, std::vector<PointUHS> centers, std::vector<int> charges) {
        for (int& l : charges) l *= 2;
        return MultiCenterPotential(1.0 + 2.0 * mass, std::move(centers), std::move(charges), mass);
    }

    double lambda() const { return lambda_; }
    double mass() const { return mass_; }
    const std::vector<PointUHS>& centers() const { return centers_; }
    const std::vector<int>& charges() const { return charges_; }
    std::size_t size() const { return centers_.size(); }
    int total_charge() const {
        int l = 0;
        for (int c : charges_) l += c;
        return l;
    }

    /// Same potential with every center moved by an isometry.
    MultiCenterPotential transformed(const Mobius& m) const {
        std::vector<PointUHS> moved;
        moved.reserve(centers_.size());
        for (const auto& p : centers_) moved.push_back(m(p));
        return MultiCenterPotential(lambda_, std::move(moved), charges_, mass_);
    }

private:
    double lambda_;
    std::vector<PointUHS> centers_;
    std::vector<int> charges_;
    double mass_;
};

inline double potential(const MultiCenterPotential& V, const PointUHS& x) {
    double v = V.lambda();
    for (std::size_t i = 0; i < V.size(); ++i) {
        const double rho = dist(V.centers()[i], x);
        if (!(rho > 0.0)) throw PoleError("potential evaluated at a center");
        v += V.charges()[i] * green_of_rho(rho);
    }
    return v;
}

inline std::array<double, 3> potential_gradient(const MultiCenterPotential& V, const PointUHS& x) {
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < V.size(); ++i) {
        const auto gi = green_gradient(V.centers()[i], x);
        for (int k = 0; k < 3; ++k) g[k] += V.charges()[i] * gi[k];
    }
    return g;
}

/// True when x lies on the closed geodesic segment joining two of the centers.
inline bool is_geodesically_trapped(const PointUHS& x, const std::vector<PointUHS>& centers, double tol = 1e-9) {
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            const double defect = dist(centers[i], x) + dist(x, centers[j]) - dist(centers[i], centers[j]);
            if (defect <= tol) return true;
        }
    return false;
}

/// Arc-length point of g, with t = 0 the point of g closest to base and t increasing toward g.end().
inline PointUHS geodesic_point(const OrientedGeodesic& g, const PointUHS& base, double t) {
    const Mobius M = geodesic_frame(g);
    const PointUHS b = M(base);
    const double h = std::sqrt(std::norm(b.xi()) + b.z() * b.z());
    return M.inverse()(PointUHS(0.0, 0.0, h * std::exp(t)));
}

inline PointUHS closest_point_on_geodesic(const OrientedGeodesic& g, const PointUHS& base) {
    return geodesic_point(g, base, 0.0);
}

/// Hyperbolic Laplace-Beltrami operator, z^2 (f_xx + f_yy + f_zz) - z f_z, given Euclidean derivatives.
inline double laplacian_from_derivatives(double z, double fxx, double fyy, double fzz, double fz) {
    return z * z * (fxx + fyy + fzz) - z * fz;
}

} // namespace monopole::hyperbolic
