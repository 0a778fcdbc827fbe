#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nctwist/common.hpp"

namespace nctwist {

// Complex formal power series truncated at a fixed order N: coefficient j
// multiplies the j-th power of the formal deformation symbol. All values
// taking part in one computation must share the same order; mixing orders
// throws instead of silently re-truncating.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(int order) : coeffs_(check_order(order) + 1, cplx{}) {}

  static TruncatedSeries constant(int order, cplx value) {
    TruncatedSeries s(order);
    s.coeffs_[0] = value;
    return s;
  }

  static TruncatedSeries one(int order) { return constant(order, 1.0); }

  // The formal generator itself (coefficient 1 in degree 1).
  static TruncatedSeries hbar(int order) {
    TruncatedSeries s(order);
    if (order < 1) throw std::invalid_argument("TruncatedSeries::hbar: order must be >= 1");
    s.coeffs_[1] = 1.0;
    return s;
  }

  static TruncatedSeries from_coeffs(std::vector<cplx> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("TruncatedSeries: empty coefficient list");
    TruncatedSeries s(static_cast<int>(coeffs.size()) - 1);
    s.coeffs_ = std::move(coeffs);
    return s;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  cplx coeff(int j) const { return coeffs_[static_cast<std::size_t>(j)]; }
  void set_coeff(int j, cplx v) { coeffs_[static_cast<std::size_t>(j)] = v; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{}; });
  }

  // Smallest j with nonzero coefficient; order()+1 when the series is zero.
  int valuation() const {
    for (int j = 0; j <= order(); ++j)
      if (coeffs_[static_cast<std::size_t>(j)] != cplx{}) return j;
    return order() + 1;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_order(a, b, "add");
    TruncatedSeries r(a.order());
    for (int j = 0; j <= a.order(); ++j) r.coeffs_[j] = a.coeffs_[j] + b.coeffs_[j];
    return r;
  }

  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_order(a, b, "subtract");
    TruncatedSeries r(a.order());
    for (int j = 0; j <= a.order(); ++j) r.coeffs_[j] = a.coeffs_[j] - b.coeffs_[j];
    return r;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries r(order());
    for (int j = 0; j <= order(); ++j) r.coeffs_[j] = -coeffs_[j];
    return r;
  }

  // Cauchy product truncated at the common order.
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_order(a, b, "multiply");
    TruncatedSeries r(a.order());
    for (int i = 0; i <= a.order(); ++i) {
      if (a.coeffs_[i] == cplx{}) continue;
      for (int j = 0; i + j <= a.order(); ++j) r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return r;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, cplx z) {
    TruncatedSeries r(a.order());
    for (int j = 0; j <= a.order(); ++j) r.coeffs_[j] = a.coeffs_[j] * z;
    return r;
  }
  friend TruncatedSeries operator*(cplx z, const TruncatedSeries& a) { return a * z; }

  TruncatedSeries& operator+=(const TruncatedSeries& b) { return *this = *this + b; }
  TruncatedSeries& operator-=(const TruncatedSeries& b) { return *this = *this - b; }
  TruncatedSeries& operator*=(const TruncatedSeries& b) { return *this = *this * b; }

  static void require_same_order(const TruncatedSeries& a, const TruncatedSeries& b,
                                 const char* what) {
    if (a.order() != b.order())
      throw std::invalid_argument(std::string("TruncatedSeries: order mismatch in ") + what +
                                  " (" + std::to_string(a.order()) + " vs " +
                                  std::to_string(b.order()) + ")");
  }

 private:
  static int check_order(int order) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries: negative order");
    return order;
  }

  std::vector<cplx> coeffs_;
};

inline double max_abs_diff(const TruncatedSeries& a, const TruncatedSeries& b) {
  return (a - b).max_abs();
}

// exp of a series with vanishing constant term; the sum terminates at the
// truncation order.
inline TruncatedSeries exp(const TruncatedSeries& a) {
  if (a.coeff(0) != cplx{})
    throw std::invalid_argument("exp: series must have zero constant term");
  TruncatedSeries result = TruncatedSeries::one(a.order());
  TruncatedSeries power = TruncatedSeries::one(a.order());
  for (int j = 1; j <= a.order(); ++j) {
    power *= a;
    if (power.is_zero()) break;
    result += power * cplx{1.0 / factorial(j), 0.0};
  }
  return result;
}

// Multiplicative inverse; requires a nonzero constant term. Coefficients
// come from the standard long-division recurrence.
inline TruncatedSeries invert(const TruncatedSeries& a) {
  if (a.coeff(0) == cplx{})
    throw std::invalid_argument("invert: series has zero constant term");
  TruncatedSeries b(a.order());
  const cplx inv0 = 1.0 / a.coeff(0);
  b.set_coeff(0, inv0);
  for (int j = 1; j <= a.order(); ++j) {
    cplx acc{};
    for (int i = 1; i <= j; ++i) acc += a.coeff(i) * b.coeff(j - i);
    b.set_coeff(j, -inv0 * acc);
  }
  return b;
}

// Element of the parameter ideal: a series with vanishing constant term
// (enforced exactly at construction).
class DeformationParameter {
 public:
  explicit DeformationParameter(TruncatedSeries s) : series_(std::move(s)) {
    if (series_.coeff(0) != cplx{})
      throw std::invalid_argument("DeformationParameter: constant term must be zero");
  }

  static DeformationParameter zero(int order) {
    return DeformationParameter(TruncatedSeries(order));
  }

  static DeformationParameter hbar(int order) {
    return DeformationParameter(TruncatedSeries::hbar(order));
  }

  // Coefficients c_1, c_2, ... of powers 1, 2, ... of the formal symbol.
  static DeformationParameter from_tail(int order, const std::vector<cplx>& tail) {
    TruncatedSeries s(order);
    for (std::size_t i = 0; i < tail.size(); ++i) {
      const int j = static_cast<int>(i) + 1;
      if (j > order) break;
      s.set_coeff(j, tail[i]);
    }
    return DeformationParameter(std::move(s));
  }

  const TruncatedSeries& series() const { return series_; }
  int order() const { return series_.order(); }

 private:
  TruncatedSeries series_;
};

// Parameter automorphism r . theta = theta / (1 + r theta). Integer r gives
// the group action generated by degree shifts; rational r is its extension.
inline DeformationParameter alpha(const Rational& r, const DeformationParameter& theta) {
  const TruncatedSeries& t = theta.series();
  TruncatedSeries denom = TruncatedSeries::one(t.order()) + t * cplx{r.value(), 0.0};
  return DeformationParameter(t * invert(denom));
}

inline DeformationParameter alpha(long long k, const DeformationParameter& theta) {
  return alpha(Rational(k), theta);
}

}  // namespace nctwist
