#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace monopole {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Raised when a value leaves the domain of an operation (for example z <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation at a singular point of a potential, Green's function or form.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An operation needs a different affine chart (value at infinity, zero coefficient).
class ChartError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input data violates a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The problem is numerically ill posed (no spectral gap, contour hits a pole, ...).
class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested case is outside what is implemented (e.g. k != 1 trivializations).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Restriction or factorization degenerates (e.g. the restricted section vanishes identically).
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double sq(double v) { return v * v; }

} // namespace monopole
