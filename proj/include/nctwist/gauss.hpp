#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nctwist/series.hpp"

namespace nctwist {

inline constexpr std::size_t kGaussTermCap = 10000;
inline constexpr double kGaussMergeTol = 1e-12;

// One summand coeff * (x - center)^degree * exp(-width (x - center)^2),
// with a series-valued coefficient. Re(width) > 0 keeps every term
// integrable on the line.
struct GaussTerm {
  TruncatedSeries coeff;
  int degree = 0;
  cplx center{};
  cplx width{};

  GaussTerm(TruncatedSeries c, int d, cplx ctr, cplx w)
      : coeff(std::move(c)), degree(d), center(ctr), width(w) {
    if (degree < 0) throw std::invalid_argument("GaussTerm: negative degree");
    if (!(width.real() > 0.0))
      throw std::invalid_argument("GaussTerm: Re(width) must be positive");
  }
};

// Finite sum of polynomial-times-Gaussian terms, closed under the analytic
// operations below. Terms sharing (degree, center, width) are merged by
// simplify(), which every operation calls before returning.
class GaussSum {
 public:
  explicit GaussSum(int order) : order_(order) {}

  static GaussSum zero(int order) { return GaussSum(order); }

  static GaussSum single(TruncatedSeries coeff, int degree, cplx center, cplx width) {
    GaussSum f(coeff.order());
    f.terms_.emplace_back(std::move(coeff), degree, center, width);
    return f;
  }

  // Plain Gaussian exp(-width (x - center)^2) with unit coefficient.
  static GaussSum gaussian(int order, cplx width, cplx center = {}) {
    return single(TruncatedSeries::one(order), 0, center, width);
  }

  int order() const { return order_; }
  const std::vector<GaussTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void append(GaussTerm term) {
    if (!term.coeff.is_zero()) terms_.push_back(std::move(term));
  }

  friend GaussSum operator+(const GaussSum& a, const GaussSum& b) {
    a.require_same_order(b);
    GaussSum r = a;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    return r.simplified();
  }

  friend GaussSum operator-(const GaussSum& a, const GaussSum& b) { return a + b.scaled(-1.0); }

  GaussSum scaled(cplx z) const {
    GaussSum r(order_);
    for (const auto& t : terms_) r.append({t.coeff * z, t.degree, t.center, t.width});
    return r;
  }

  GaussSum scaled(const TruncatedSeries& s) const {
    GaussSum r(order_);
    for (const auto& t : terms_) r.append({t.coeff * s, t.degree, t.center, t.width});
    return r;
  }

  // Merge terms with coincident keys (within tolerance) and drop zero
  // coefficients; throws past the term cap instead of degrading.
  GaussSum simplified(std::size_t term_cap = kGaussTermCap) const {
    GaussSum r(order_);
    std::vector<GaussTerm> sorted = terms_;
    std::sort(sorted.begin(), sorted.end(), [](const GaussTerm& a, const GaussTerm& b) {
      if (a.degree != b.degree) return a.degree < b.degree;
      if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
      if (a.center.imag() != b.center.imag()) return a.center.imag() < b.center.imag();
      if (a.width.real() != b.width.real()) return a.width.real() < b.width.real();
      return a.width.imag() < b.width.imag();
    });
    for (auto& t : sorted) {
      if (!r.terms_.empty()) {
        GaussTerm& last = r.terms_.back();
        if (last.degree == t.degree && std::abs(last.center - t.center) <= kGaussMergeTol &&
            std::abs(last.width - t.width) <= kGaussMergeTol) {
          last.coeff += t.coeff;
          continue;
        }
      }
      r.terms_.push_back(std::move(t));
    }
    r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(),
                                  [](const GaussTerm& t) { return t.coeff.is_zero(); }),
                   r.terms_.end());
    if (r.terms_.size() > term_cap)
      throw std::length_error("GaussSum: term cap exceeded (" +
                              std::to_string(r.terms_.size()) + " terms)");
    return r;
  }

  // Term-by-term product. Gaussian factors merge into a single Gaussian
  // about the weighted center, and the polynomial parts are re-expanded
  // about it binomially.
  friend GaussSum pointwise_mul(const GaussSum& f, const GaussSum& g) {
    f.require_same_order(g);
    GaussSum r(f.order_);
    for (const auto& a : f.terms_) {
      for (const auto& b : g.terms_) {
        const cplx w = a.width + b.width;
        const cplx c = (a.width * a.center + b.width * b.center) / w;
        const cplx dc = a.center - b.center;
        const cplx k = std::exp(-a.width * b.width * dc * dc / w);
        const TruncatedSeries base = (a.coeff * b.coeff) * k;
        // (x-c_a)^da (x-c_b)^db about the new center c.
        const cplx da_shift = c - a.center;
        const cplx db_shift = c - b.center;
        for (int i = 0; i <= a.degree; ++i) {
          const cplx fa = binomial(a.degree, i) * std::pow(da_shift, a.degree - i);
          if (fa == cplx{}) continue;
          for (int j = 0; j <= b.degree; ++j) {
            const cplx fb = binomial(b.degree, j) * std::pow(db_shift, b.degree - j);
            if (fb == cplx{}) continue;
            r.append({base * (fa * fb), i + j, c, w});
          }
        }
      }
    }
    return r.simplified();
  }

  GaussSum derivative() const {
    GaussSum r(order_);
    for (const auto& t : terms_) {
      if (t.degree > 0)
        r.append({t.coeff * cplx{static_cast<double>(t.degree), 0.0}, t.degree - 1, t.center,
                  t.width});
      r.append({t.coeff * (-2.0 * t.width), t.degree + 1, t.center, t.width});
    }
    return r.simplified();
  }

  // f(x - s) for real s, realized exactly on the centers.
  GaussSum real_shift(double s) const {
    GaussSum r(order_);
    for (const auto& t : terms_) r.append({t.coeff, t.degree, t.center + s, t.width});
    return r;
  }

  // Multiplication by sum_i poly[i] x^i with series coefficients; each
  // power of x re-expands about the term's own center.
  GaussSum mul_xpoly(std::span<const TruncatedSeries> poly) const {
    GaussSum r(order_);
    for (const auto& t : terms_) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly[i].is_zero()) continue;
        for (std::size_t j = 0; j <= i; ++j) {
          const cplx f = binomial(static_cast<int>(i), static_cast<int>(j)) *
                         std::pow(t.center, static_cast<double>(i - j));
          if (f == cplx{}) continue;
          r.append({t.coeff * poly[i] * f, t.degree + static_cast<int>(j), t.center, t.width});
        }
      }
    }
    return r.simplified();
  }

  // f evaluated at x + rho + eps x for series rho, eps of positive
  // valuation: the terminating expansion sum_j (rho + eps x)^j / j! f^(j).
  GaussSum formal_shift(const TruncatedSeries& rho, const TruncatedSeries& eps) const {
    if (rho.coeff(0) != cplx{} || eps.coeff(0) != cplx{})
      throw std::invalid_argument("formal_shift: arguments must have zero constant term");
    const int n = order_;
    GaussSum result(n);
    GaussSum deriv = *this;
    std::vector<TruncatedSeries> rho_pow{TruncatedSeries::one(n)};
    std::vector<TruncatedSeries> eps_pow{TruncatedSeries::one(n)};
    for (int j = 1; j <= n; ++j) {
      rho_pow.push_back(rho_pow.back() * rho);
      eps_pow.push_back(eps_pow.back() * eps);
    }
    for (int j = 0; j <= n; ++j) {
      if (j > 0) deriv = deriv.derivative();
      if (deriv.is_zero()) break;
      // (rho + eps x)^j / j! as a polynomial in x.
      std::vector<TruncatedSeries> poly;
      poly.reserve(static_cast<std::size_t>(j) + 1);
      bool any = false;
      for (int i = 0; i <= j; ++i) {
        TruncatedSeries c =
            rho_pow[static_cast<std::size_t>(j - i)] * eps_pow[static_cast<std::size_t>(i)] *
            cplx{binomial(j, i) / factorial(j), 0.0};
        any = any || !c.is_zero();
        poly.push_back(std::move(c));
      }
      if (!any) continue;
      result = result + (j == 0 ? deriv : deriv.mul_xpoly(poly));
    }
    return result.simplified();
  }

  // Multiplication by exp(i beta x) for real beta, absorbed by completing
  // the square: the center moves into the complex plane, the width is kept.
  GaussSum phase_mul(double beta) const {
    if (beta == 0.0) return *this;
    GaussSum r(order_);
    for (const auto& t : terms_) {
      const cplx ib{0.0, beta};
      const cplx prefactor = std::exp(ib * t.center - beta * beta / (4.0 * t.width));
      const cplx new_center = t.center + ib / (2.0 * t.width);
      const cplx shift = new_center - t.center;  // i beta / (2 width)
      for (int j = 0; j <= t.degree; ++j) {
        const cplx f = binomial(t.degree, j) * std::pow(shift, t.degree - j);
        if (f == cplx{}) continue;
        r.append({t.coeff * (prefactor * f), j, new_center, t.width});
      }
    }
    return r.simplified();
  }

  // Closed-form moments: odd degrees vanish, even degrees give
  // (d-1)!! (2w)^{-d/2} sqrt(pi/w); complex centers are handled by contour
  // shift, valid because Re(width) > 0.
  TruncatedSeries integrate() const {
    TruncatedSeries total(order_);
    for (const auto& t : terms_) {
      if (t.degree % 2 == 1) continue;
      cplx moment = std::sqrt(kPi / t.width);
      moment *= double_factorial(t.degree - 1) / std::pow(2.0 * t.width, t.degree / 2);
      total += t.coeff * moment;
    }
    return total;
  }

  TruncatedSeries evaluate(double x) const { return evaluate(cplx{x, 0.0}); }

  TruncatedSeries evaluate(cplx x) const {
    TruncatedSeries total(order_);
    for (const auto& t : terms_) {
      const cplx u = x - t.center;
      total += t.coeff * (std::pow(u, t.degree) * std::exp(-t.width * u * u));
    }
    return total;
  }

  // Crude upper estimate of max_j sup_x |coefficient_j(f)(x)| over real x;
  // used to decide when lattice-sum tails are negligible.
  double sup_estimate() const {
    double total = 0.0;
    for (const auto& t : terms_) {
      const double re_w = t.width.real();
      const double b = -t.center.imag();
      const double im_w = t.width.imag();
      // |(x-c)^d e^{-w(x-c)^2}| = (v^2+b^2)^{d/2} exp(-Re w v^2 + 2 Im w b v + Re w b^2)
      // with v = x - Re c; scan around the exponential's maximum.
      const double v0 = im_w * b / re_w;
      const double half_window = 6.0 / std::sqrt(re_w) + std::sqrt(static_cast<double>(t.degree) / re_w + 1e-30);
      double m = 0.0;
      for (int i = -24; i <= 24; ++i) {
        const double v = v0 + half_window * static_cast<double>(i) / 24.0;
        const double mag = std::pow(v * v + b * b, t.degree / 2.0) *
                           std::exp(-re_w * v * v + 2.0 * im_w * b * v + re_w * b * b);
        m = std::max(m, mag);
      }
      total += t.coeff.max_abs() * 2.0 * m;
    }
    return total;
  }

  void require_same_order(const GaussSum& other) const {
    if (order_ != other.order_)
      throw std::invalid_argument("GaussSum: series order mismatch");
  }

 private:
  int order_;
  std::vector<GaussTerm> terms_;
};

}  // namespace nctwist
