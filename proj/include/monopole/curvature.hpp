#pragma once

#include "core.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>

/// Finite-difference curvature of 4-dimensional Riemannian metrics given as coordinate samplers.
namespace monopole::curvature {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using MetricSampler = std::function<Mat4(const Vec4&)>;
using EndomorphismSampler = std::function<Mat4(const Vec4&)>;

/// Fully covariant 4-tensor, index order (a, b, c, d) -> a*64 + b*16 + c*4 + d.
using Tensor4 = std::array<double, 256>;

inline constexpr int idx(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }

struct CurvatureReport {
    double scalar = 0.0;
    double ricci_norm = 0.0;
    double weyl_sd_norm = 0.0;
    double weyl_asd_norm = 0.0;
    double riemann_norm = 0.0;
    double step = 0.0;
};

namespace detail {

template <class F>
auto sample(const F& f, const Vec4& p) {
    try {
        return f(p);
    } catch (const std::domain_error& e) {
        throw DomainError(std::string("finite-difference stencil leaves the domain: ") + e.what());
    }
}

inline Vec4 shifted(const Vec4& p, int a, double da, int b = -1, double db = 0.0) {
    Vec4 q = p;
    q[a] += da;
    if (b >= 0) q[b] += db;
    return q;
}

} // namespace detail

/// Fourth-order central first derivative of a matrix-valued function along coordinate a.
template <class F>
Mat4 d1(const F& f, const Vec4& p, int a, double h) {
    using detail::sample;
    using detail::shifted;
    return (-sample(f, shifted(p, a, 2 * h)) + 8.0 * sample(f, shifted(p, a, h)) - 8.0 * sample(f, shifted(p, a, -h)) +
            sample(f, shifted(p, a, -2 * h))) /
           (12.0 * h);
}

/// d1 at steps h and h/2 combined by Richardson extrapolation.
template <class F>
Mat4 d1_extrapolated(const F& f, const Vec4& p, int a, double h) {
    return (16.0 * d1(f, p, a, 0.5 * h) - d1(f, p, a, h)) / 15.0;
}

struct MetricJet {
    Mat4 g;
    std::array<Mat4, 4> dg;
    std::array<std::array<Mat4, 4>, 4> ddg;
};

inline MetricJet metric_jet(const MetricSampler& f, const Vec4& p, double h) {
    using detail::sample;
    using detail::shifted;
    static constexpr std::array<double, 4> off{2.0, 1.0, -1.0, -2.0};
    static constexpr std::array<double, 4> w1{-1.0, 8.0, -8.0, 1.0};
    MetricJet J;
    J.g = sample(f, p);
    for (int a = 0; a < 4; ++a) {
        std::array<Mat4, 4> s;
        for (int k = 0; k < 4; ++k) s[k] = sample(f, shifted(p, a, off[k] * h));
        J.dg[a] = (w1[0] * s[0] + w1[1] * s[1] + w1[2] * s[2] + w1[3] * s[3]) / (12.0 * h);
        J.ddg[a][a] = (-s[0] + 16.0 * s[1] - 30.0 * J.g + 16.0 * s[2] - s[3]) / (12.0 * h * h);
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            Mat4 acc = Mat4::Zero();
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) acc += w1[i] * w1[j] * sample(f, shifted(p, a, off[i] * h, b, off[j] * h));
            J.ddg[a][b] = acc / (144.0 * h * h);
            J.ddg[b][a] = J.ddg[a][b];
        }
    return J;
}

/// R_abcd with the convention that the round sphere has positive sectional curvature.
inline Tensor4 riemann_from_jet(const MetricJet& J) {
    const Mat4 gi = J.g.inverse();
    // Gamma^e_bc.
    double G[4][4][4];
    for (int e = 0; e < 4; ++e)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double s = 0.0;
                for (int d = 0; d < 4; ++d) s += gi(e, d) * (J.dg[b](d, c) + J.dg[c](d, b) - J.dg[d](b, c));
                G[e][b][c] = 0.5 * s;
            }
    Tensor4 R{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double v = 0.5 * (J.ddg[b][c](a, d) + J.ddg[a][d](b, c) - J.ddg[b][d](a, c) - J.ddg[a][c](b, d));
                    for (int e = 0; e < 4; ++e)
                        for (int f = 0; f < 4; ++f)
                            v += J.g(e, f) * (G[e][b][c] * G[f][a][d] - G[e][b][d] * G[f][a][c]);
                    R[idx(a, b, c, d)] = v;
                }
    return R;
}

inline double levi_civita(int a, int b, int c, int d) {
    const std::array<int, 4> p{a, b, c, d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] == p[j]) return 0.0;
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] > p[j]) ++inversions;
    return inversions % 2 == 0 ? 1.0 : -1.0;
}

/// Curvature invariants from coordinate Riemann tensor and metric, using an oriented orthonormal frame.
inline CurvatureReport report_from_riemann(const Tensor4& R, const Mat4& g, double step) {
    Eigen::LLT<Mat4> llt(g);
    if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
    const Mat4 L = llt.matrixL();
    const Mat4 E = L.transpose().inverse(); // columns: orthonormal frame, positively oriented
    Tensor4 F{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            for (int c = 0; c < 4; ++c)
                                for (int d = 0; d < 4; ++d)
                                    s += R[idx(a, b, c, d)] * E(a, i) * E(b, j) * E(c, k) * E(d, l);
                    F[idx(i, j, k, l)] = s;
                }
    Mat4 Ric = Mat4::Zero();
    for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i) Ric(j, l) += F[idx(i, j, i, l)];
    const double s = Ric.trace();
    auto kn = [](const Mat4& h, const Mat4& k, int a, int b, int c, int d) {
        return h(a, c) * k(b, d) + h(b, d) * k(a, c) - h(a, d) * k(b, c) - h(b, c) * k(a, d);
    };
    const Mat4 Id = Mat4::Identity();
    Tensor4 C{};
    double rn = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const double v = F[idx(a, b, c, d)];
                    rn += v * v;
                    C[idx(a, b, c, d)] = v - 0.5 * kn(Ric, Id, a, b, c, d) + s / 12.0 * kn(Id, Id, a, b, c, d);
                }
    double sd = 0.0, asd = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double star = 0.0;
                    for (int m = 0; m < 4; ++m)
                        for (int n = 0; n < 4; ++n) star += 0.5 * levi_civita(a, b, m, n) * C[idx(m, n, c, d)];
                    const double wp = 0.5 * (C[idx(a, b, c, d)] + star);
                    const double wm = 0.5 * (C[idx(a, b, c, d)] - star);
                    sd += wp * wp;
                    asd += wm * wm;
                }
    CurvatureReport rep;
    rep.scalar = s;
    rep.ricci_norm = Ric.norm();
    rep.weyl_sd_norm = std::sqrt(sd);
    rep.weyl_asd_norm = std::sqrt(asd);
    rep.riemann_norm = std::sqrt(rn);
    rep.step = step;
    return rep;
}

inline Tensor4 riemann(const MetricSampler& f, const Vec4& p, double h) { return riemann_from_jet(metric_jet(f, p, h)); }

/// Curvature at p from steps h and h/2, Richardson-extrapolated on the Riemann tensor.
inline CurvatureReport curvature(const MetricSampler& f, const Vec4& p, double step) {
    if (!(step > 0.0)) throw PreconditionError("step must be positive");
    const Tensor4 R1 = riemann(f, p, step);
    const Tensor4 R2 = riemann(f, p, 0.5 * step);
    Tensor4 R{};
    for (std::size_t i = 0; i < R.size(); ++i) R[i] = (16.0 * R2[i] - R1[i]) / 15.0;
    return report_from_riemann(R, detail::sample(f, p), step);
}

/// Single-step curvature without extrapolation.
inline CurvatureReport curvature_single(const MetricSampler& f, const Vec4& p, double step) {
    return report_from_riemann(riemann(f, p, step), detail::sample(f, p), step);
}

/// max |d Omega| over coordinate triples, for a sampler returning the antisymmetric matrix Omega_ab.
inline double exterior_derivative_residual(const MetricSampler& omega, const Vec4& p, double step,
                                           bool extrapolate = true) {
    std::array<Mat4, 4> d;
    for (int a = 0; a < 4; ++a) d[a] = extrapolate ? d1_extrapolated(omega, p, a, step) : d1(omega, p, a, step);
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c)
                r = std::max(r, std::abs(d[a](b, c) + d[b](c, a) + d[c](a, b)));
    return r;
}

/// max |N^a_bc| of the Nijenhuis tensor of J^a_b.
inline double nijenhuis_residual(const EndomorphismSampler& Jf, const Vec4& p, double step) {
    const Mat4 J = detail::sample(Jf, p);
    std::array<Mat4, 4> dJ;
    for (int d = 0; d < 4; ++d) dJ[d] = d1_extrapolated(Jf, p, d, step);
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double n = 0.0;
                for (int d = 0; d < 4; ++d) {
                    n += J(d, b) * dJ[d](a, c) - J(d, c) * dJ[d](a, b);
                    n -= J(a, d) * (dJ[b](d, c) - dJ[c](d, b));
                }
                r = std::max(r, std::abs(n));
            }
    return r;
}

} // namespace monopole::curvature
