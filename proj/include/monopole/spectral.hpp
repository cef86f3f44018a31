#pragma once

#include "core.hpp"
#include "hyperbolic.hpp"
#include "polynomial.hpp"
#include "twistor.hpp"

#include <vector>

/// Spectral data of charge-one singular hyperbolic monopoles on a twistor line P_q.
namespace monopole::spectral {

using hyperbolic::BoundaryPoint;
using hyperbolic::Mobius;
using hyperbolic::MultiCenterPotential;
using hyperbolic::PointUHS;

/// The quadratic a zeta^2 + 2 b zeta - conj(a) on P_q in adapted coordinates.
class QuadraticRestriction {
public:
    QuadraticRestriction(cplx a, double b) : a_(a), b_(b) {
        if (a == cplx(0.0) && b == 0.0) throw DegenerateError("restricted section vanishes identically");
    }

    cplx a() const { return a_; }
    double b() const { return b_; }
    double delta() const { return std::sqrt(b_ * b_ + std::norm(a_)); }
    double discriminant() const { return 4.0 * (b_ * b_ + std::norm(a_)); }

    cplx operator()(cplx zeta) const { return a_ * zeta * zeta + 2.0 * b_ * zeta - std::conj(a_); }
    Polynomial polynomial() const { return Polynomial({-std::conj(a_), 2.0 * b_, a_}); }

    /// (-b + Delta)/a, evaluated without cancellation.
    cplx alpha() const {
        require_finite_roots();
        const double D = delta();
        return b_ >= 0.0 ? std::conj(a_) / (b_ + D) : (D - b_) / a_;
    }
    /// (-b - Delta)/a, which equals tau(alpha).
    cplx beta() const {
        require_finite_roots();
        const double D = delta();
        return b_ >= 0.0 ? -(b_ + D) / a_ : -std::conj(a_) / (D - b_);
    }

private:
    void require_finite_roots() const {
        if (std::abs(a_) <= 1e-8 * delta()) throw ChartError("a = 0: rotate the chart before factoring");
    }
    cplx a_;
    double b_;
};

/// Adapted coordinates for q: translate and dilate q to O, then apply an optional rotation about O.
inline Mobius adapted_chart(const PointUHS& q, const Mobius& rotation = Mobius::identity()) {
    return rotation * hyperbolic::adapted_isometry(q);
}

/// Restriction of a twistor-line section to P_q, written in q-adapted coordinates.
inline QuadraticRestriction restrict_to_line(const twistor::BiDegreeSection& section, const PointUHS& q,
                                             const Mobius& rotation = Mobius::identity()) {
    const PointUHS p = twistor::point_of_line_section(section);
    if (hyperbolic::dist(p, q) < 1e-12) throw DegenerateError("q coincides with the center: restriction vanishes");
    const PointUHS pa = adapted_chart(q, rotation)(p);
    const double c = pa.z();
    return QuadraticRestriction(std::conj(pa.xi()) / c, (1.0 - std::norm(pa.xi()) - c * c) / (2.0 * c));
}

/// zeta^l conj(y(tau zeta)) for a polynomial y of degree at most l.
inline Polynomial antipodal_conjugate(const Polynomial& y, int l) {
    std::vector<cplx> r(l + 1, 0.0);
    for (int m = 0; m <= l; ++m) {
        const int k = l - m;
        r[m] = ((k % 2 == 0) ? 1.0 : -1.0) * std::conj(y[k]);
    }
    return Polynomial(std::move(r));
}

struct FactorPair {
    Polynomial x;
    Polynomial y;
    cplx phase{1.0};
    int degree = 0;
};

/// Factorization of prod q_i^{l_i} as x y with x = y*, unique up to the unit phase.
inline FactorPair factor(const std::vector<QuadraticRestriction>& quadratics, const std::vector<int>& charges,
                         cplx phase = 1.0) {
    if (quadratics.size() != charges.size()) throw PreconditionError("one charge per quadratic required");
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw PreconditionError("phase must have unit modulus");
    std::vector<cplx> alphas, betas;
    cplx prod_a = 1.0;
    double abs_A2 = 1.0;
    int l = 0;
    for (std::size_t i = 0; i < quadratics.size(); ++i) {
        const auto& q = quadratics[i];
        const int li = charges[i];
        if (li <= 0) throw PreconditionError("charges must be positive");
        const cplx al = q.alpha(), be = q.beta();
        for (std::size_t j = 0; j < alphas.size(); ++j)
            if (std::abs(alphas[j] - al) < 1e-12) throw PreconditionError("repeated centers in factorization");
        for (int k = 0; k < li; ++k) {
            alphas.push_back(al);
            betas.push_back(be);
        }
        prod_a *= std::pow(q.a(), li);
        abs_A2 *= std::pow(q.b() + q.delta(), li);
        l += li;
    }
    const cplx A = phase * std::sqrt(abs_A2);
    const cplx B = prod_a / A;
    return {Polynomial::from_roots(alphas, A), Polynomial::from_roots(betas, B), phase, l};
}

/// Largest |x - y*| relative to the coefficient scale.
inline double reality_defect(const FactorPair& f) {
    const Polynomial ys = antipodal_conjugate(f.y, f.degree);
    double scale = 0.0, defect = 0.0;
    for (int m = 0; m <= f.degree; ++m) {
        scale = std::max(scale, std::abs(f.x[m]));
        defect = std::max(defect, std::abs(f.x[m] - ys[m]));
    }
    return defect / std::max(scale, 1e-300);
}

struct DivisorPoint {
    cplx root;
    int multiplicity;
};

struct SpectralDataC1 {
    PointUHS q;
    double mass;
    double lambda;
    Mobius chart;                     ///< adapted coordinates in which zeta is measured
    bool rotated;                     ///< true when a rotation about O was needed (some a_i = 0)
    std::vector<QuadraticRestriction> quadratics;
    std::vector<int> doubled_charges; ///< 2 l_i
    FactorPair lift;                  ///< chart functions (x, y) on P_q; s = 1 in adapted coordinates
    std::vector<DivisorPoint> divisor;

    /// p-tilde with doubled charges restricted to P_q, evaluated from the twistor-line sections directly.
    cplx ptilde_on_line(cplx zeta, const MultiCenterPotential& V) const {
        cplx v = 1.0;
        for (std::size_t i = 0; i < V.size(); ++i)
            v *= std::pow(twistor::twistor_line_section(chart(V.centers()[i]))(zeta, zeta), doubled_charges[i]);
        return v;
    }

    std::vector<DivisorPoint> sigma_divisor() const {
        std::vector<DivisorPoint> r;
        for (const auto& d : divisor) r.push_back({-1.0 / std::conj(d.root), d.multiplicity});
        return r;
    }
};

inline SpectralDataC1 lift_with_chart(const PointUHS& q, const MultiCenterPotential& V, const Mobius& rotation,
                                      bool rotated, cplx phase) {
    std::vector<QuadraticRestriction> quads;
    std::vector<int> doubled;
    for (std::size_t i = 0; i < V.size(); ++i) {
        quads.push_back(restrict_to_line(twistor::twistor_line_section(V.centers()[i]), q, rotation));
        doubled.push_back(2 * V.charges()[i]);
    }
    FactorPair f = factor(quads, doubled, phase);
    std::vector<DivisorPoint> D;
    for (std::size_t i = 0; i < quads.size(); ++i) D.push_back({quads[i].alpha(), doubled[i]});
    return {q, V.mass(), 1.0 + 2.0 * V.mass(), adapted_chart(q, rotation), rotated, quads, doubled, f, D};
}

/// Real lifting of the twistor line P_q for the monopole with potential data V (charges l_i, mass m).
/// The lift uses lambda = 1 + 2m and doubled charges 2 l_i.
inline SpectralDataC1 lift_twistor_line(const PointUHS& q, const MultiCenterPotential& V, cplx phase = 1.0) {
    for (const auto& p : V.centers())
        if (hyperbolic::dist(p, q) < 1e-12) throw DegenerateError("q coincides with a center");
    try {
        return lift_with_chart(q, V, Mobius::identity(), false, phase);
    } catch (const ChartError&) {
        return lift_with_chart(q, V, hyperbolic::chart_rotation(), true, phase);
    }
}

/// max |x y - p-tilde| / max |p-tilde| over n points on each of the circles |zeta| = 1/2, 1, 2.
inline double lift_product_residual(const SpectralDataC1& s, const MultiCenterPotential& V, int n = 64) {
    double num = 0.0, den = 0.0;
    for (double r : {0.5, 1.0, 2.0})
        for (int k = 0; k < n; ++k) {
            const cplx zeta = std::polar(r, 2.0 * pi * (k + 0.5) / n);
            const cplx p = s.ptilde_on_line(zeta, V);
            num = std::max(num, std::abs(s.lift.x(zeta) * s.lift.y(zeta) - p));
            den = std::max(den, std::abs(p));
        }
    return num / std::max(den, 1e-300);
}

inline int genus_of_spectral_curve(int k) {
    if (k < 1) throw PreconditionError("charge must be positive");
    return (k - 1) * (k - 1);
}

} // namespace monopole::spectral
