#pragma once

#include "core.hpp"
#include "polynomial.hpp"

#include <array>
#include <functional>
#include <vector>

/// Mini-twistor space TP1 of oriented lines in R^3 with fibre coordinate eta on O(2).
namespace monopole::euclidean {

using Vec3 = std::array<double, 3>;

/// Point of TP1 in chart 0 (zeta, eta) or chart 1 (zeta~ = 1/zeta, eta~ = eta / zeta^2).
struct MiniTwistorPoint {
    int chart = 0;
    cplx zeta;
    cplx eta;

    MiniTwistorPoint in_chart(int target) const {
        if (target == chart) return *this;
        if (zeta == cplx(0.0)) throw ChartError("point lies outside the overlap of the two charts");
        return {target, 1.0 / zeta, eta / (zeta * zeta)};
    }
};

/// Real structure (zeta, eta) -> (-1/conj zeta, -conj eta / conj zeta^2), written chart-free.
inline MiniTwistorPoint tau_T(const MiniTwistorPoint& p) {
    // In either chart the map is zeta -> -1/conj(zeta) and lands in the same chart with
    // eta -> -conj(eta)/conj(zeta)^2; at zeta = 0 it switches charts with zeta~ = 0, eta~ = -conj(eta).
    if (p.zeta == cplx(0.0)) return {1 - p.chart, 0.0, -std::conj(p.eta)};
    const cplx zb = std::conj(p.zeta);
    return {p.chart, -1.0 / zb, -std::conj(p.eta) / (zb * zb)};
}

/// The dzeta-bar component of theta^{0,1}.
inline cplx theta01_T(cplx zeta, cplx eta) { return 2.0 * eta / sq(1.0 + std::norm(zeta)); }

/// psi = eta^k + a_1 eta^{k-1} + ... + a_k with deg a_i <= 2i.
class CurveO2k {
public:
    explicit CurveO2k(std::vector<Polynomial> a) : a_(std::move(a)) {
        if (a_.empty()) throw PreconditionError("curve needs k >= 1");
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (a_[i].degree() > 2 * static_cast<int>(i + 1)) throw PreconditionError("coefficient degree exceeds 2i");
    }

    int k() const { return static_cast<int>(a_.size()); }
    const std::vector<Polynomial>& coefficients() const { return a_; }

    cplx operator()(cplx zeta, cplx eta) const {
        cplx acc = 1.0;
        for (const auto& ai : a_) acc = acc * eta + ai(zeta);
        return acc;
    }

    /// Polynomial in eta over a fixed zeta.
    Polynomial fibre_polynomial(cplx zeta) const {
        std::vector<cplx> c(k() + 1);
        c[k()] = 1.0;
        for (int i = 1; i <= k(); ++i) c[k() - i] = a_[i - 1](zeta);
        return Polynomial(std::move(c));
    }

    /// a_i -> coefficients c'_m = (-1)^{i+m} conj(c_{2i-m}).
    CurveO2k reality_involution() const {
        std::vector<Polynomial> r;
        for (int i = 1; i <= k(); ++i) {
            std::vector<cplx> c(2 * i + 1);
            for (int m = 0; m <= 2 * i; ++m)
                c[m] = (((i + m) % 2 == 0) ? 1.0 : -1.0) * std::conj(a_[i - 1][2 * i - m]);
            r.emplace_back(std::move(c));
        }
        return CurveO2k(std::move(r));
    }

    bool is_real(double tol = 1e-12) const {
        const CurveO2k r = reality_involution();
        for (int i = 1; i <= k(); ++i)
            for (int m = 0; m <= 2 * i; ++m)
                if (std::abs(r.a_[i - 1][m] - a_[i - 1][m]) > tol) return false;
        return true;
    }

private:
    std::vector<Polynomial> a_;
};

/// Section eta_p(zeta) = (x1 + i x2) + 2 x3 zeta - (x1 - i x2) zeta^2 of oriented lines through p.
inline Polynomial line_section(const Vec3& p) {
    const cplx u{p[0], p[1]};
    return Polynomial({u, 2.0 * p[2], -std::conj(u)});
}

inline CurveO2k charge1_curve(const Vec3& p) { return CurveO2k({line_section(p) * cplx(-1.0)}); }

/// Point p of a real charge-one curve.
inline Vec3 center_of_charge1(const CurveO2k& c) {
    if (c.k() != 1) throw UnsupportedError("only charge-one curves have a single center");
    const Polynomial eta = c.coefficients()[0] * cplx(-1.0);
    return {eta[0].real(), eta[0].imag(), 0.5 * eta[1].real()};
}

/// Unit direction of the oriented lines over zeta.
inline Vec3 line_direction(cplx zeta) {
    const double n = 1.0 + std::norm(zeta);
    return {-2.0 * zeta.real() / n, -2.0 * zeta.imag() / n, (1.0 - std::norm(zeta)) / n};
}

/// Closest point to the origin on the line (eta, zeta), in real variables for complex-step use.
template <class T>
std::array<T, 3> closest_point_euc_real(T er, T ei, T zr, T zi) {
    const T n = T(1.0) + zr * zr + zi * zi;
    const T n2 = n * n;
    // Re{conj(eta) v} for v = (1 - zeta^2, i(1 + zeta^2), 2 zeta).
    const T z2r = zr * zr - zi * zi, z2i = T(2.0) * zr * zi;
    auto re_prod = [&](T vr, T vi) { return er * vr + ei * vi; };
    return {re_prod(T(1.0) - z2r, -z2i) / n2, re_prod(-z2i, T(1.0) + z2r) / n2, re_prod(T(2.0) * zr, T(2.0) * zi) / n2};
}

inline Vec3 closest_point_euc(cplx eta, cplx zeta) {
    return closest_point_euc_real<double>(eta.real(), eta.imag(), zeta.real(), zeta.imag());
}

/// Line bundle L^s with transition exp(-s eta / zeta) from chart 0 to chart 1.
struct LPatchBundle {
    double s = 1.0;
    cplx transition(cplx zeta, cplx eta) const {
        if (zeta == cplx(0.0)) throw ChartError("transition undefined at zeta = 0");
        return std::exp(-s * eta / zeta);
    }
    cplx to_chart1(cplx zeta, cplx eta, cplx u0) const { return transition(zeta, eta) * u0; }
    cplx to_chart0(cplx zeta, cplx eta, cplx u1) const { return u1 / transition(zeta, eta); }
};

/// Nonvanishing trivialization of L^2 over a real charge-one curve.
struct L2Trivialization {
    Vec3 p;
    cplx u0(cplx zeta) const { return std::exp(2.0 * p[2] - 2.0 * cplx(p[0], -p[1]) * zeta); }
    cplx u1(cplx zeta_t) const { return std::exp(-2.0 * p[2] - 2.0 * cplx(p[0], p[1]) * zeta_t); }
    /// |u1(1/zeta) - exp(-2 eta/zeta) u0(zeta)| relative to |u1|.
    double overlap_defect(cplx zeta) const {
        const cplx eta = line_section(p)(zeta);
        const cplx lhs = u1(1.0 / zeta);
        return std::abs(lhs - LPatchBundle{2.0}.to_chart1(zeta, eta, u0(zeta))) / std::abs(lhs);
    }
};

inline L2Trivialization l2_trivialization(const CurveO2k& curve) {
    if (curve.k() != 1) throw UnsupportedError("explicit trivializations exist here only for k = 1");
    if (!curve.is_real(1e-10)) throw PreconditionError("curve is not real");
    return {center_of_charge1(curve)};
}

struct L2Coords {
    cplx zeta, eta, u;
};

/// Patching of L^2 minus the zero section: (zeta, eta, u) -> (1/zeta, eta/zeta^2, e^{eta/zeta} u).
inline L2Coords l2_patch_transition(cplx zeta, cplx eta, cplx u) {
    if (zeta == cplx(0.0)) throw ChartError("zeta = 0 is outside the overlap");
    if (u == cplx(0.0)) throw ChartError("u = 0 is the removed zero section");
    return {1.0 / zeta, eta / (zeta * zeta), std::exp(eta / zeta) * u};
}

inline L2Coords l2_patch_inverse(cplx zt, cplx et, cplx ut) {
    if (zt == cplx(0.0)) throw ChartError("zeta~ = 0 is outside the overlap");
    if (ut == cplx(0.0)) throw ChartError("u~ = 0 is the removed zero section");
    // eta/zeta = eta~ / zeta~.
    return {1.0 / zt, et / (zt * zt), std::exp(-et / zt) * ut};
}

/// Holomorphic Jacobian d(zeta~, eta~, u~)/d(zeta, eta, u), row-major.
inline std::array<std::array<cplx, 3>, 3> l2_patch_jacobian(cplx zeta, cplx eta, cplx u) {
    const cplx e = std::exp(eta / zeta);
    const cplx z2 = zeta * zeta;
    return {{{-1.0 / z2, 0.0, 0.0},
             {-2.0 * eta / (z2 * zeta), 1.0 / z2, 0.0},
             {-eta * u * e / z2, u * e / zeta, e}}};
}

/// Intersection points (eta, u) of the lifted curve with the fibre over zeta*. For k = 1 the
/// trivialization of L^2 supplies u; for k > 1 the caller provides u as a function of (zeta, eta).
inline std::vector<std::pair<cplx, cplx>> fiber_coordinates(const CurveO2k& curve, cplx zeta_star,
                                                            const std::function<cplx(cplx, cplx)>& u_of = {},
                                                            double branch_tol = 1e-6) {
    if (curve.k() == 1 && !u_of) {
        const L2Trivialization t = l2_trivialization(curve);
        return {{line_section(t.p)(zeta_star), t.u0(zeta_star)}};
    }
    if (!u_of) throw UnsupportedError("k > 1 needs explicit trivialization data");
    const std::vector<cplx> roots = curve.fibre_polynomial(zeta_star).roots();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < branch_tol * (1.0 + std::abs(roots[i])))
                throw DegenerateError("zeta* is a branch point: repeated sheet");
    std::vector<std::pair<cplx, cplx>> r;
    for (const cplx& e : roots) r.emplace_back(e, u_of(zeta_star, e));
    return r;
}

} // namespace monopole::euclidean
