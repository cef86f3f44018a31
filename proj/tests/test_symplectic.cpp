#include "monopole/euclidean.hpp"
#include "monopole/symplectic.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace monopole;
using namespace monopole::symplectic;
using testing_support::Rng;

namespace {

Polynomial random_poly(Rng& rng, int degree, double scale) {
    std::vector<cplx> c(degree + 1);
    for (auto& v : c) v = rng.complex_box(scale);
    return Polynomial(std::move(c));
}

/// Sheets with u bounded away from zero on |zeta| <= 1.3.
SheetData random_sheets(Rng& rng, int k) {
    SheetData S;
    for (int i = 0; i < k; ++i) {
        Polynomial u = random_poly(rng, 4, 0.04);
        u = u + Polynomial::constant(std::polar(rng.uniform(1.0, 2.0), rng.uniform(0, 2 * pi)));
        S.sheets.push_back({random_poly(rng, 4, 1.0), u});
    }
    return S;
}

TangentVector random_marked(Rng& rng, const MarkedDivisor& D, int k) {
    std::vector<SheetTangent> q;
    for (int i = 0; i < k; ++i) q.push_back({random_poly(rng, 3, 1.0), random_poly(rng, 3, 1.0)});
    return marked_tangent(D, q);
}

MarkedDivisor random_divisor(Rng& rng, bool allow_inside = true) {
    const bool inside = allow_inside && rng.uniform(0, 1) < 0.3;
    const double r = inside ? rng.uniform(0.3, 0.7) : rng.uniform(1.5, 3.0);
    return MarkedDivisor(std::polar(r, rng.uniform(0, 2 * pi)));
}

/// Sum of d eta ^ du/u over the sheets, evaluated on the values of X1, X2 at zeta = 0.
cplx product_form(const TangentVector& X1, const TangentVector& X2, const SheetData& S) {
    cplx total = 0.0;
    for (int i = 0; i < S.k(); ++i) {
        const cplx e1 = X1.sheets[i].eta(0.0), e2 = X2.sheets[i].eta(0.0);
        const cplx u1 = X1.sheets[i].u(0.0), u2 = X2.sheets[i].u(0.0);
        total += (e1 * u2 - e2 * u1) / S.sheets[i].u(0.0);
    }
    return total;
}

struct HandExample {
    SheetData S{{{Polynomial({0.0}), Polynomial({1.0})}}};
    MarkedDivisor D{cplx(2.0, 0.5)};
    TangentVector X1 = marked_tangent(D, {{Polynomial({1.0}), Polynomial({0.0})}});
    TangentVector X2 = marked_tangent(D, {{Polynomial({0.0}), Polynomial({1.0})}});
};

} // namespace

TEST(OmegaD, HandExampleEqualsOne) {
    HandExample h;
    EXPECT_NEAR(std::abs(omega_D_residue(h.X1, h.X2, h.S, h.D) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(omega_D_contour(h.X1, h.X2, h.S, h.D) - 1.0), 0.0, 1e-12);
    // Divisor inside the contour: the double pole is cancelled by the marking.
    HandExample g;
    g.D = MarkedDivisor(cplx(0.2, -0.3));
    g.X1 = marked_tangent(g.D, {{Polynomial({1.0}), Polynomial({0.0})}});
    g.X2 = marked_tangent(g.D, {{Polynomial({0.0}), Polynomial({1.0})}});
    EXPECT_NEAR(std::abs(omega_D_contour(g.X1, g.X2, g.S, g.D) - 1.0), 0.0, 1e-12);
}

TEST(OmegaD, Antisymmetric) {
    Rng rng(71);
    for (int t = 0; t < 20; ++t) {
        const int k = rng.integer(1, 3);
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng);
        const TangentVector X = random_marked(rng, D, k), Y = random_marked(rng, D, k);
        EXPECT_EQ(omega_D_residue(X, X, S, D), cplx(0.0));
        EXPECT_LT(std::abs(omega_D_contour(X, X, S, D)), 1e-12);
        EXPECT_LT(std::abs(omega_D_residue(X, Y, S, D) + omega_D_residue(Y, X, S, D)), 1e-12);
    }
}

TEST(OmegaD, Bilinear) {
    Rng rng(72);
    for (int t = 0; t < 20; ++t) {
        const int k = rng.integer(1, 3);
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng);
        const TangentVector X = random_marked(rng, D, k), Y = random_marked(rng, D, k), Z = random_marked(rng, D, k);
        const cplx a = rng.complex_box(2), b = rng.complex_box(2);
        const cplx lhs = omega_D_residue(X * a + Y * b, Z, S, D);
        const cplx rhs = a * omega_D_residue(X, Z, S, D) + b * omega_D_residue(Y, Z, S, D);
        EXPECT_LT(std::abs(lhs - rhs), 1e-12 * (1 + std::abs(lhs)));
    }
}

TEST(OmegaD, ContourMatchesResidueOnRandomData) {
    Rng rng(73);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int k = rng.integer(1, 3);
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng);
        const TangentVector X = random_marked(rng, D, k), Y = random_marked(rng, D, k);
        worst = std::max(worst, std::abs(omega_D_contour(X, Y, S, D) - omega_D_residue(X, Y, S, D)));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(OmegaD, MatchesProductSymplecticForm) {
    Rng rng(74);
    for (int t = 0; t < 50; ++t) {
        const int k = rng.integer(1, 3);
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng);
        const TangentVector X = random_marked(rng, D, k), Y = random_marked(rng, D, k);
        EXPECT_LT(std::abs(omega_D_contour(X, Y, S, D) - product_form(X, Y, S)), 1e-8);
    }
}

TEST(OmegaD, RadiusIndependence) {
    Rng rng(75);
    double drift = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int k = rng.integer(1, 3);
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng, false);
        const TangentVector X = random_marked(rng, D, k), Y = random_marked(rng, D, k);
        const cplx ref = omega_D_contour(X, Y, S, D, 2048, 1.0);
        for (double r : {0.8, 0.9, 1.1, 1.2}) drift = std::max(drift, std::abs(omega_D_contour(X, Y, S, D, 2048, r) - ref));
    }
    EXPECT_LT(drift, 1e-8);
}

TEST(OmegaD, GramMatrixHasFullRank) {
    Rng rng(76);
    for (int k = 1; k <= 3; ++k) {
        const SheetData S = random_sheets(rng, k);
        const MarkedDivisor D = random_divisor(rng);
        std::vector<TangentVector> X;
        for (int j = 0; j < 2 * k; ++j) X.push_back(random_marked(rng, D, k));
        Eigen::MatrixXcd G(2 * k, 2 * k);
        for (int a = 0; a < 2 * k; ++a)
            for (int b = 0; b < 2 * k; ++b) G(a, b) = omega_D_contour(X[a], X[b], S, D);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(G);
        lu.setThreshold(1e-8);
        EXPECT_EQ(lu.rank(), 2 * k);
        EXPECT_LT((G + G.transpose()).norm(), 1e-10 * G.norm());
        // Vectors with only eta components span an isotropic subspace.
        std::vector<TangentVector> Y;
        for (int j = 0; j < k; ++j) {
            std::vector<SheetTangent> q;
            for (int i = 0; i < k; ++i) q.push_back({random_poly(rng, 2, 1.0), Polynomial({0.0})});
            Y.push_back(marked_tangent(D, q));
        }
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) EXPECT_LT(std::abs(omega_D_contour(Y[a], Y[b], S, D)), 1e-12);
    }
}

TEST(OmegaD, CoordinateMapIsInjective) {
    // Marked tangents are determined by their values (eta'_i(0), u'_i(0)) at zeta = 0.
    Rng rng(77);
    const int k = 3;
    const MarkedDivisor D = random_divisor(rng);
    Eigen::MatrixXcd M(2 * k, 2 * k);
    for (int j = 0; j < 2 * k; ++j) {
        const TangentVector X = random_marked(rng, D, k);
        for (int i = 0; i < k; ++i) {
            M(2 * i, j) = X.sheets[i].eta(0.0);
            M(2 * i + 1, j) = X.sheets[i].u(0.0);
        }
    }
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXcd>(M).rank(), 2 * k);
}

TEST(OmegaD, Errors) {
    HandExample h;
    EXPECT_THROW(MarkedDivisor(0.0), PreconditionError);
    const TangentVector unmarked{{{Polynomial({1.0}), Polynomial({0.0})}}};
    EXPECT_THROW(omega_D_residue(unmarked, h.X2, h.S, h.D), PreconditionError);
    EXPECT_THROW(omega_D_contour(h.X1, h.X2, h.S, h.D, 32), PreconditionError);
    const MarkedDivisor on_circle(std::polar(1.0, 0.3));
    const TangentVector a = marked_tangent(on_circle, {{Polynomial({1.0}), Polynomial({0.0})}});
    const TangentVector b = marked_tangent(on_circle, {{Polynomial({0.0}), Polynomial({1.0})}});
    EXPECT_THROW(omega_D_contour(a, b, h.S, on_circle), IllConditionedError);
    const SheetData bad{{{Polynomial({0.0}), Polynomial({0.0, 1.0})}}};
    EXPECT_THROW(omega_D_residue(h.X1, h.X2, bad, h.D), PoleError);
    const SheetData two{{{Polynomial({0.0}), Polynomial({1.0})}, {Polynomial({0.0}), Polynomial({1.0})}}};
    EXPECT_THROW(omega_D_residue(h.X1, h.X2, two, h.D), PreconditionError);
}

TEST(RhoForm, Normalization) {
    const cplx u(0.7, -1.3);
    EXPECT_NEAR(std::abs(rho_form(0.3, 0.1, u, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, u}) - 1.0), 0.0, 1e-15);
    EXPECT_THROW(rho_form(0.3, 0.1, 0.0, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}), PoleError);
}

TEST(RhoForm, Alternating) {
    Rng rng(78);
    for (int t = 0; t < 20; ++t) {
        Tangent3 a, b, c;
        for (int i = 0; i < 3; ++i) {
            a[i] = rng.complex_box(1);
            b[i] = rng.complex_box(1);
            c[i] = rng.complex_box(1);
        }
        const cplx u = rng.complex_box(1) + 1.5;
        const cplx v = rho_form(0.0, 0.0, u, a, b, c);
        EXPECT_LT(std::abs(v + rho_form(0.0, 0.0, u, b, a, c)), 1e-14);
        EXPECT_LT(std::abs(v + rho_form(0.0, 0.0, u, a, c, b)), 1e-14);
        EXPECT_LT(std::abs(v - rho_form(0.0, 0.0, u, b, c, a)), 1e-14);
        EXPECT_LT(std::abs(rho_form(0.0, 0.0, u, a, a, c)), 1e-14);
    }
}

TEST(RhoForm, ChartCovariance) {
    Rng rng(79);
    double worst = 0.0, worst_fd = 0.0;
    for (int t = 0; t < 50; ++t) {
        const cplx z = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * pi));
        const cplx e = rng.complex_box(1), u = rng.complex_box(1) + 1.2;
        std::array<Tangent3, 3> v;
        for (auto& w : v)
            for (auto& x : w) x = rng.complex_box(1);
        const auto J = euclidean::l2_patch_jacobian(z, e, u);
        std::array<Tangent3, 3> w{};
        for (int a = 0; a < 3; ++a)
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) w[a][r] += J[r][c] * v[a][c];
        const euclidean::L2Coords img = euclidean::l2_patch_transition(z, e, u);
        const cplx lhs = rho_form(img.zeta, img.eta, img.u, w[0], w[1], w[2]) * std::pow(z, 4);
        const cplx rhs = rho_chart_sign * rho_form(z, e, u, v[0], v[1], v[2]);
        worst = std::max(worst, std::abs(lhs - rhs) / (1 + std::abs(rhs)));

        // Same pullback with a central-difference Jacobian as an independent oracle.
        std::array<Tangent3, 3> wf{};
        const double h = 1e-6;
        for (int a = 0; a < 3; ++a) {
            const auto p = euclidean::l2_patch_transition(z + h * v[a][0], e + h * v[a][1], u + h * v[a][2]);
            const auto m = euclidean::l2_patch_transition(z - h * v[a][0], e - h * v[a][1], u - h * v[a][2]);
            wf[a] = {(p.zeta - m.zeta) / (2 * h), (p.eta - m.eta) / (2 * h), (p.u - m.u) / (2 * h)};
        }
        const cplx lf = rho_form(img.zeta, img.eta, img.u, wf[0], wf[1], wf[2]) * std::pow(z, 4);
        worst_fd = std::max(worst_fd, std::abs(lf - rhs) / (1 + std::abs(rhs)));
    }
    EXPECT_LT(worst, 1e-10);
    EXPECT_LT(worst_fd, 1e-6);
}
