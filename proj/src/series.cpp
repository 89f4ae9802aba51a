#include "opim/series.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace opim {

namespace {

std::string cap_mismatch_message(int lhs, int rhs) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "degree cap mismatch (%d vs %d)", lhs, rhs);
    return buf;
}

}  // namespace

TruncatedSeries::TruncatedSeries(int degree_cap, double lo, double hi)
    : coeffs_(std::size_t(degree_cap) + 1, 0.0), lo_(lo), hi_(hi) {
    if (degree_cap < 0) throw SeriesError("degree cap must be nonnegative");
    if (!(lo < hi)) throw SeriesError("series interval is empty");
}

TruncatedSeries TruncatedSeries::constant(double value, int degree_cap, double lo, double hi) {
    TruncatedSeries s(degree_cap, lo, hi);
    s.coeffs_[0] = value;
    return s;
}

TruncatedSeries TruncatedSeries::identity(int degree_cap, double lo, double hi) {
    if (degree_cap < 1) throw SeriesError("degree cap too small for identity");
    TruncatedSeries s(degree_cap, lo, hi);
    s.coeffs_[1] = 1.0;
    return s;
}

TruncatedSeries TruncatedSeries::from_coefficients(const std::vector<double>& coeffs,
                                                   int degree_cap, double lo, double hi) {
    TruncatedSeries s(degree_cap, lo, hi);
    if (int(coeffs.size()) > degree_cap + 1)
        throw SeriesError("coefficient list longer than degree cap allows");
    std::copy(coeffs.begin(), coeffs.end(), s.coeffs_.begin());
    return s;
}

double TruncatedSeries::coefficient(int k) const {
    if (k < 0) throw SeriesError("negative coefficient index");
    return k < int(coeffs_.size()) ? coeffs_[std::size_t(k)] : 0.0;
}

void TruncatedSeries::set_coefficient(int k, double value) {
    if (k < 0 || k >= int(coeffs_.size()))
        throw SeriesError("coefficient index outside degree cap");
    coeffs_[std::size_t(k)] = value;
}

int TruncatedSeries::degree() const {
    for (int k = int(coeffs_.size()) - 1; k >= 0; --k)
        if (coeffs_[std::size_t(k)] != 0.0) return k;
    return -1;
}

double TruncatedSeries::eval(double x) const {
    double acc = 0.0;
    for (int k = int(coeffs_.size()) - 1; k >= 0; --k)
        acc = acc * x + coeffs_[std::size_t(k)];
    return acc;
}

void TruncatedSeries::check_compatible(const TruncatedSeries& rhs) const {
    if (coeffs_.size() != rhs.coeffs_.size())
        throw SeriesError(cap_mismatch_message(degree_cap(), rhs.degree_cap()));
    if (lo_ != rhs.lo_ || hi_ != rhs.hi_)
        throw SeriesError("series interval mismatch");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& rhs) const {
    TruncatedSeries out = *this;
    out += rhs;
    return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& rhs) const {
    TruncatedSeries out = *this;
    out -= rhs;
    return out;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& rhs) {
    check_compatible(rhs);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& rhs) {
    check_compatible(rhs);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    return *this;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& rhs) const {
    check_compatible(rhs);
    TruncatedSeries out(degree_cap(), lo_, hi_);
    int cap = degree_cap();
    for (int i = 0; i <= cap; ++i) {
        double ci = coeffs_[std::size_t(i)];
        if (ci == 0.0) continue;
        for (int j = 0; i + j <= cap; ++j)
            out.coeffs_[std::size_t(i + j)] += ci * rhs.coeffs_[std::size_t(j)];
    }
    return out;
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries out = *this;
    for (double& c : out.coeffs_) c = -c;
    return out;
}

TruncatedSeries TruncatedSeries::operator*(double scalar) const {
    TruncatedSeries out = *this;
    for (double& c : out.coeffs_) c *= scalar;
    return out;
}

TruncatedSeries operator*(double scalar, const TruncatedSeries& s) { return s * scalar; }

TruncatedSeries TruncatedSeries::derivative() const {
    TruncatedSeries out(degree_cap(), lo_, hi_);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        out.coeffs_[k - 1] = double(k) * coeffs_[k];
    return out;
}

TruncatedSeries TruncatedSeries::antiderivative(double constant_term) const {
    if (degree() == degree_cap())
        throw SeriesError("antiderivative would exceed the degree cap");
    TruncatedSeries out(degree_cap(), lo_, hi_);
    out.coeffs_[0] = constant_term;
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k)
        out.coeffs_[k + 1] = coeffs_[k] / double(k + 1);
    return out;
}

TruncatedSeries pow(const TruncatedSeries& s, int k) {
    if (k < 0) throw SeriesError("negative series power");
    TruncatedSeries out = TruncatedSeries::constant(1.0, s.degree_cap(), s.lo(), s.hi());
    for (int i = 0; i < k; ++i) out = out * s;
    return out;
}

}  // namespace opim
