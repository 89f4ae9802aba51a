#pragma once

// Truncated power series in the monomial basis: value = sum c_k x^k for
// k = 0..degree_cap, together with the interval the series is meant to be
// used on. Iterates, corrections and residual integrands are all carried in
// this form.
//
// Arithmetic requires both operands to live on the same interval with the
// same cap; products are truncated above the cap. All operations are value
// semantic.

#include <vector>

#include "opim/errors.hpp"

namespace opim {

inline constexpr int kDefaultDegreeCap = 32;

class TruncatedSeries {
public:
    // Zero series.
    TruncatedSeries(int degree_cap, double lo, double hi);

    static TruncatedSeries constant(double value, int degree_cap, double lo, double hi);
    // The series "x".
    static TruncatedSeries identity(int degree_cap, double lo, double hi);
    // Coefficients c_0.. (shorter arrays are zero padded; longer ones are
    // rejected).
    static TruncatedSeries from_coefficients(const std::vector<double>& coeffs,
                                             int degree_cap, double lo, double hi);

    int degree_cap() const { return int(coeffs_.size()) - 1; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    // c_k; zero above the cap.
    double coefficient(int k) const;
    void set_coefficient(int k, double value);

    // Index of the highest nonzero coefficient, or -1 for the zero series.
    int degree() const;

    bool in_domain(double x) const { return x >= lo_ && x <= hi_; }

    // Horner evaluation. Works for any x; callers that care about the
    // interval check in_domain first.
    double eval(double x) const;

    TruncatedSeries operator+(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-(const TruncatedSeries& rhs) const;
    TruncatedSeries operator*(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-() const;
    TruncatedSeries operator*(double scalar) const;

    TruncatedSeries& operator+=(const TruncatedSeries& rhs);
    TruncatedSeries& operator-=(const TruncatedSeries& rhs);

    // c_k -> (k+1) c_{k+1}; the cap is kept and the top coefficient
    // becomes zero.
    TruncatedSeries derivative() const;

    // Antiderivative with the given constant term. Throws SeriesError when
    // a nonzero coefficient would land above the cap.
    TruncatedSeries antiderivative(double constant_term) const;

private:
    void check_compatible(const TruncatedSeries& rhs) const;

    std::vector<double> coeffs_;
    double lo_, hi_;
};

TruncatedSeries operator*(double scalar, const TruncatedSeries& s);

// s^k for k >= 0 by repeated multiplication (truncating like operator*).
TruncatedSeries pow(const TruncatedSeries& s, int k);

}  // namespace opim
