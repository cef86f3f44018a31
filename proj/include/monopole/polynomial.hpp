#pragma once

#include "core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace monopole {

/// Dense complex polynomial (or truncated Taylor series) with ascending coefficients.
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<cplx> c) : c_(c) {
        if (c_.empty()) c_.push_back(0.0);
    }
    explicit Polynomial(std::vector<cplx> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    static Polynomial constant(cplx v) { return Polynomial({v}); }
    static Polynomial monomial(int n, cplx v = 1.0) {
        std::vector<cplx> c(n + 1, 0.0);
        c[n] = v;
        return Polynomial(std::move(c));
    }
    /// prod (zeta - r) over the given roots.
    static Polynomial from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
        Polynomial p = constant(lead);
        for (const cplx& r : roots) p = p * Polynomial({-r, 1.0});
        return p;
    }

    const std::vector<cplx>& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx operator[](std::size_t i) const { return i < c_.size() ? c_[i] : cplx(0.0); }

    cplx operator()(cplx z) const {
        cplx acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() == 1) return constant(0.0);
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
        return Polynomial(std::move(d));
    }

    Polynomial operator+(const Polynomial& o) const {
        std::vector<cplx> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = (*this)[i] + o[i];
        return Polynomial(std::move(r));
    }
    Polynomial operator-(const Polynomial& o) const { return *this + o * cplx(-1.0); }
    Polynomial operator*(cplx s) const {
        std::vector<cplx> r = c_;
        for (auto& v : r) v *= s;
        return Polynomial(std::move(r));
    }
    Polynomial operator*(const Polynomial& o) const {
        std::vector<cplx> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Polynomial(std::move(r));
    }
    Polynomial pow(int e) const {
        Polynomial r = constant(1.0);
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    /// Drops coefficients beyond the given degree.
    Polynomial truncated(int deg) const {
        std::vector<cplx> r(c_.begin(), c_.begin() + std::min<std::size_t>(c_.size(), deg + 1));
        return Polynomial(std::move(r));
    }

    /// Roots from the companion matrix after trimming negligible leading coefficients.
    std::vector<cplx> roots(double rel_tol = 1e-14) const {
        const double scale = std::abs(*std::max_element(c_.begin(), c_.end(),
                                                        [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }));
        int n = degree();
        while (n > 0 && std::abs(c_[n]) <= rel_tol * scale) --n;
        if (n <= 0) return {};
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -c_[i] / c_[n];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
        return r;
    }

private:
    std::vector<cplx> c_;
};

} // namespace monopole
