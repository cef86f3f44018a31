#pragma once

#include "core.hpp"
#include "polynomial.hpp"

#include <array>
#include <optional>
#include <vector>

/// Deformation coordinates of lifted spectral curves in L^2 minus the zero section and the
/// holomorphic symplectic form omega_D.
namespace monopole::symplectic {

/// Graph of one sheet, zeta -> (eta_i(zeta), u_i(zeta)), as truncated Taylor series.
struct Sheet {
    Polynomial eta;
    Polynomial u;
};

struct SheetData {
    std::vector<Sheet> sheets;
    int k() const { return static_cast<int>(sheets.size()); }
};

struct SheetTangent {
    Polynomial eta;
    Polynomial u;
};

/// Infinitesimal deformation sum_i eta'_i d/d eta + u'_i d/d u.
struct TangentVector {
    std::vector<SheetTangent> sheets;

    TangentVector operator+(const TangentVector& o) const {
        TangentVector r;
        for (std::size_t i = 0; i < sheets.size(); ++i)
            r.sheets.push_back({sheets[i].eta + o.sheets[i].eta, sheets[i].u + o.sheets[i].u});
        return r;
    }
    TangentVector operator*(cplx s) const {
        TangentVector r;
        for (const auto& t : sheets) r.sheets.push_back({t.eta * s, t.u * s});
        return r;
    }
};

struct MarkedDivisor {
    cplx zeta0;
    explicit MarkedDivisor(cplx z) : zeta0(z) {
        if (z == cplx(0.0)) throw PreconditionError("divisor point must satisfy zeta0 != 0");
    }
    /// zeta / zeta0 - 1.
    Polynomial vanishing() const { return Polynomial({-1.0, 1.0 / zeta0}); }
};

/// Tangent vector (zeta/zeta0 - 1) * (q_eta_i, q_u_i), which vanishes at the divisor.
inline TangentVector marked_tangent(const MarkedDivisor& D, const std::vector<SheetTangent>& q) {
    TangentVector X;
    const Polynomial v = D.vanishing();
    for (const auto& s : q) X.sheets.push_back({v * s.eta, v * s.u});
    return X;
}

inline bool is_marked(const TangentVector& X, const MarkedDivisor& D, double tol = 1e-10) {
    for (const auto& s : X.sheets) {
        const double scale = 1.0 + std::abs(s.eta[0]) + std::abs(s.u[0]);
        if (std::abs(s.eta(D.zeta0)) > tol * scale || std::abs(s.u(D.zeta0)) > tol * scale) return false;
    }
    return true;
}

namespace detail {
inline void check_inputs(const TangentVector& X1, const TangentVector& X2, const SheetData& S, const MarkedDivisor& D) {
    if (X1.sheets.size() != S.sheets.size() || X2.sheets.size() != S.sheets.size())
        throw PreconditionError("tangent vectors and sheet data disagree on k");
    if (!is_marked(X1, D) || !is_marked(X2, D)) throw PreconditionError("tangent vectors must vanish at the divisor");
}
} // namespace detail

/// sum_i (eta'_{i,1}(0) u'_{i,2}(0) - eta'_{i,2}(0) u'_{i,1}(0)) / u_i(0).
inline cplx omega_D_residue(const TangentVector& X1, const TangentVector& X2, const SheetData& S,
                            const MarkedDivisor& D) {
    detail::check_inputs(X1, X2, S, D);
    cplx total = 0.0;
    for (int i = 0; i < S.k(); ++i) {
        const cplx u0 = S.sheets[i].u[0];
        if (u0 == cplx(0.0)) throw PoleError("u_i(0) = 0");
        total += (X1.sheets[i].eta[0] * X2.sheets[i].u[0] - X2.sheets[i].eta[0] * X1.sheets[i].u[0]) / u0;
    }
    return total;
}

/// Trapezoid rule on |zeta| = r for the Serre-duality contour integral
/// (1/2 pi i) oint sum_i N_i / ((zeta/zeta0 - 1)^2 u_i) dzeta / zeta.
inline cplx omega_D_contour(const TangentVector& X1, const TangentVector& X2, const SheetData& S,
                            const MarkedDivisor& D, int nodes = 2048, double r = 1.0) {
    detail::check_inputs(X1, X2, S, D);
    if (nodes < 64) throw PreconditionError("at least 64 quadrature nodes required");
    if (std::abs(std::abs(D.zeta0) - r) < 1e-6) throw IllConditionedError("divisor point lies on the contour");
    cplx total = 0.0;
    for (int n = 0; n < nodes; ++n) {
        const cplx zeta = std::polar(r, 2.0 * pi * n / nodes);
        const cplx v = zeta / D.zeta0 - 1.0;
        cplx g = 0.0;
        for (int i = 0; i < S.k(); ++i) {
            const cplx u = S.sheets[i].u(zeta);
            if (std::abs(u) < 1e-300) throw PoleError("u_i vanishes on the contour");
            const auto& a = X1.sheets[i];
            const auto& b = X2.sheets[i];
            g += (a.eta(zeta) * b.u(zeta) - b.eta(zeta) * a.u(zeta)) / u;
        }
        total += g / (v * v);
    }
    return total / static_cast<double>(nodes);
}

using Tangent3 = std::array<cplx, 3>; ///< components (d zeta, d eta, d u)

/// The 3-form d zeta ^ d eta ^ du/u on three tangent vectors, in the frame s^4 of the finite chart.
inline cplx rho_form(cplx /*zeta*/, cplx /*eta*/, cplx u, const Tangent3& v1, const Tangent3& v2, const Tangent3& v3) {
    if (u == cplx(0.0)) throw PoleError("rho has a pole along u = 0");
    const cplx a = v1[0], b = v2[0], c = v3[0];
    const cplx d = v1[1], e = v2[1], f = v3[1];
    const cplx g = v1[2] / u, h = v2[2] / u, i = v3[2] / u;
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

/// Sign relating the two chart expressions: rho~(J v) zeta^4 = rho_chart_sign * rho(v), where
/// s~ = zeta s is the O(1) frame convention.
inline constexpr double rho_chart_sign = -1.0;

} // namespace monopole::symplectic
