#pragma once

#include <array>
#include <compare>
#include <map>
#include <span>
#include <vector>

#include "nctwist/series.hpp"

namespace nctwist {

// One tensor leg in normal order t^t_exp q^q_exp p^p_exp. The generators
// obey [p, q] = t with t central; reordering products into this form is
// the job of normal_order_product below.
struct LegMonomial {
  int t_exp = 0;
  int q_exp = 0;
  int p_exp = 0;

  bool is_identity() const { return t_exp == 0 && q_exp == 0 && p_exp == 0; }
  auto operator<=>(const LegMonomial&) const = default;
};

inline LegMonomial leg_p(int e = 1) { return {0, 0, e}; }
inline LegMonomial leg_q(int e = 1) { return {0, e, 0}; }
inline LegMonomial leg_t(int e = 1) { return {e, 0, 0}; }

// Element of the enveloping algebra of the Heisenberg Lie algebra, tensored
// with itself up to four times, with truncated-series coefficients. Terms
// are kept in normal form and zero coefficients are pruned after every
// operation, so equality is comparison of coefficient maps.
class TensorElement {
 public:
  static constexpr int kMaxLegs = 4;
  using Key = std::array<LegMonomial, kMaxLegs>;
  using TermMap = std::map<Key, TruncatedSeries>;

  TensorElement(int legs, int order) : legs_(check_legs(legs)), order_(order) {}

  static TensorElement unit(int legs, int order) {
    TensorElement u(legs, order);
    u.terms_.emplace(Key{}, TruncatedSeries::one(order));
    return u;
  }

  static TensorElement zero(int legs, int order) { return TensorElement(legs, order); }

  // Single term c * (monomial in the given legs).
  static TensorElement monomial(int order, std::span<const LegMonomial> legs,
                                TruncatedSeries coeff) {
    TensorElement u(static_cast<int>(legs.size()), order);
    Key key{};
    for (std::size_t i = 0; i < legs.size(); ++i) key[i] = legs[i];
    u.add_term(key, std::move(coeff));
    return u;
  }

  static TensorElement monomial(int order, std::initializer_list<LegMonomial> legs,
                                TruncatedSeries coeff) {
    return monomial(order, std::span<const LegMonomial>(legs.begin(), legs.size()),
                    std::move(coeff));
  }

  int legs() const { return legs_; }
  int order() const { return order_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Key& key, const TruncatedSeries& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend TensorElement operator+(const TensorElement& a, const TensorElement& b) {
    a.require_compatible(b, "add");
    TensorElement r = a;
    for (const auto& [key, coeff] : b.terms_) r.add_term(key, coeff);
    return r;
  }

  friend TensorElement operator-(const TensorElement& a, const TensorElement& b) {
    a.require_compatible(b, "subtract");
    TensorElement r = a;
    for (const auto& [key, coeff] : b.terms_) r.add_term(key, -coeff);
    return r;
  }

  friend TensorElement operator*(const TensorElement& a, const TruncatedSeries& s) {
    TensorElement r(a.legs_, a.order_);
    for (const auto& [key, coeff] : a.terms_) r.add_term(key, coeff * s);
    return r;
  }

  friend TensorElement operator*(const TensorElement& a, cplx z) {
    TensorElement r(a.legs_, a.order_);
    for (const auto& [key, coeff] : a.terms_) r.add_term(key, coeff * z);
    return r;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [key, coeff] : terms_) m = std::max(m, coeff.max_abs());
    return m;
  }

  void require_compatible(const TensorElement& b, const char* what) const {
    if (legs_ != b.legs_)
      throw std::invalid_argument(std::string("TensorElement: leg-count mismatch in ") + what);
    if (order_ != b.order_)
      throw std::invalid_argument(std::string("TensorElement: order mismatch in ") + what);
  }

 private:
  static int check_legs(int legs) {
    if (legs < 1 || legs > kMaxLegs)
      throw std::invalid_argument("TensorElement: leg count must be between 1 and 4");
    return legs;
  }

  int legs_;
  int order_;
  TermMap terms_;
};

namespace detail {

// p^a q^b = sum_k k! C(a,k) C(b,k) q^{b-k} t^k p^{a-k}; this expands the
// product of two normal-ordered leg monomials back into normal form.
inline void leg_product(const LegMonomial& u, const LegMonomial& v,
                        std::vector<std::pair<double, LegMonomial>>& out) {
  out.clear();
  const int a1 = u.p_exp, b2 = v.q_exp;
  const int kmax = std::min(a1, b2);
  for (int k = 0; k <= kmax; ++k) {
    const double c = factorial(k) * binomial(a1, k) * binomial(b2, k);
    LegMonomial m;
    m.t_exp = u.t_exp + v.t_exp + k;
    m.q_exp = u.q_exp + b2 - k;
    m.p_exp = a1 - k + v.p_exp;
    out.emplace_back(c, m);
  }
}

}  // namespace detail

// Product in the enveloping algebra, computed legwise and reduced to normal
// form. Truncation happens through the series coefficients.
inline TensorElement normal_order_product(const TensorElement& a, const TensorElement& b) {
  a.require_compatible(b, "normal_order_product");
  const int legs = a.legs();
  TensorElement result(legs, a.order());

  std::array<std::vector<std::pair<double, LegMonomial>>, TensorElement::kMaxLegs> expansions;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const TruncatedSeries base = ca * cb;
      if (base.is_zero()) continue;
      for (int l = 0; l < legs; ++l) detail::leg_product(ka[l], kb[l], expansions[l]);

      // Cartesian product over the per-leg expansions.
      std::array<std::size_t, TensorElement::kMaxLegs> idx{};
      while (true) {
        double scalar = 1.0;
        TensorElement::Key key{};
        for (int l = 0; l < legs; ++l) {
          const auto& [c, m] = expansions[l][idx[l]];
          scalar *= c;
          key[l] = m;
        }
        result.add_term(key, base * cplx{scalar, 0.0});

        int l = 0;
        for (; l < legs; ++l) {
          if (++idx[l] < expansions[l].size()) break;
          idx[l] = 0;
        }
        if (l == legs) break;
      }
    }
  }
  return result;
}

// Coproduct on the chosen leg (0-based): p, q, t are primitive, so a
// normal-ordered monomial expands binomially into the two replacement legs.
// Legs after the chosen one shift up by one.
inline TensorElement coproduct(const TensorElement& u, int leg) {
  if (u.legs() >= TensorElement::kMaxLegs)
    throw std::invalid_argument("coproduct: element already has the maximum number of legs");
  if (leg < 0 || leg >= u.legs()) throw std::invalid_argument("coproduct: leg out of range");

  TensorElement result(u.legs() + 1, u.order());
  for (const auto& [key, coeff] : u.terms()) {
    const LegMonomial m = key[leg];
    for (int i = 0; i <= m.t_exp; ++i)
      for (int j = 0; j <= m.q_exp; ++j)
        for (int k = 0; k <= m.p_exp; ++k) {
          const double c =
              binomial(m.t_exp, i) * binomial(m.q_exp, j) * binomial(m.p_exp, k);
          TensorElement::Key nk{};
          for (int l = 0; l < leg; ++l) nk[l] = key[l];
          nk[leg] = LegMonomial{i, j, k};
          nk[leg + 1] = LegMonomial{m.t_exp - i, m.q_exp - j, m.p_exp - k};
          for (int l = leg + 1; l < u.legs(); ++l) nk[l + 1] = key[l];
          result.add_term(nk, coeff * cplx{c, 0.0});
        }
  }
  return result;
}

// Counit on the chosen leg: keeps the terms whose monomial there is the
// identity and drops that leg.
inline TensorElement counit(const TensorElement& u, int leg) {
  if (u.legs() < 2) throw std::invalid_argument("counit: element must have at least 2 legs");
  if (leg < 0 || leg >= u.legs()) throw std::invalid_argument("counit: leg out of range");

  TensorElement result(u.legs() - 1, u.order());
  for (const auto& [key, coeff] : u.terms()) {
    if (!key[leg].is_identity()) continue;
    TensorElement::Key nk{};
    for (int l = 0, o = 0; l < u.legs(); ++l) {
      if (l == leg) continue;
      nk[o++] = key[l];
    }
    result.add_term(nk, coeff);
  }
  return result;
}

// Places the legs of u at the given (strictly increasing, 0-based)
// positions of a wider tensor product, filling the rest with identities.
// This realizes the subscript placement notation for multi-leg elements.
inline TensorElement embed(const TensorElement& u, int total_legs,
                           std::span<const int> positions) {
  if (static_cast<int>(positions.size()) != u.legs())
    throw std::invalid_argument("embed: one position per leg required");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 0 || positions[i] >= total_legs)
      throw std::invalid_argument("embed: position out of range");
    if (i > 0 && positions[i] <= positions[i - 1])
      throw std::invalid_argument("embed: positions must be strictly increasing");
  }

  TensorElement result(total_legs, u.order());
  for (const auto& [key, coeff] : u.terms()) {
    TensorElement::Key nk{};
    for (int l = 0; l < u.legs(); ++l) nk[positions[static_cast<std::size_t>(l)]] = key[l];
    result.add_term(nk, coeff);
  }
  return result;
}

inline TensorElement embed(const TensorElement& u, int total_legs,
                           std::initializer_list<int> positions) {
  return embed(u, total_legs, std::span<const int>(positions.begin(), positions.size()));
}

// exp of an element all of whose coefficients vanish at order zero; the
// power series terminates because each power raises the valuation.
inline TensorElement exp_tensor(const TensorElement& u) {
  for (const auto& [key, coeff] : u.terms())
    if (coeff.coeff(0) != cplx{})
      throw std::invalid_argument("exp_tensor: coefficient with nonzero constant term");

  TensorElement result = TensorElement::unit(u.legs(), u.order());
  TensorElement power = TensorElement::unit(u.legs(), u.order());
  for (int j = 1; j <= u.order(); ++j) {
    power = normal_order_product(power, u);
    if (power.is_zero()) break;
    result = result + power * cplx{1.0 / factorial(j), 0.0};
  }
  return result;
}

// Twisting element exp{theta p (x) q} and its inverse.
inline TensorElement build_twist(const DeformationParameter& theta, bool inverse = false) {
  const TruncatedSeries c = inverse ? -theta.series() : theta.series();
  TensorElement exponent =
      TensorElement::monomial(theta.order(), {leg_p(), leg_q()}, c);
  return exp_tensor(exponent);
}

// Three-leg element exp{-p (x) (theta - theta' - theta theta' t) (x) q}
// controlling how the two-parameter twists fail to interchange.
inline TensorElement build_coassociator(const DeformationParameter& theta,
                                        const DeformationParameter& theta_prime,
                                        bool inverse = false) {
  const int order = theta.order();
  TruncatedSeries::require_same_order(theta.series(), theta_prime.series(),
                                      "build_coassociator");
  const TruncatedSeries diff = theta.series() - theta_prime.series();
  const TruncatedSeries prod = theta.series() * theta_prime.series();

  TensorElement exponent =
      TensorElement::monomial(order, {leg_p(), LegMonomial{}, leg_q()}, -diff) +
      TensorElement::monomial(order, {leg_p(), leg_t(), leg_q()}, prod);
  if (inverse) exponent = exponent * cplx{-1.0, 0.0};
  return exp_tensor(exponent);
}

enum class CoproductMode { plain, twisted };

// Coproduct on one leg, optionally conjugated by the twist: the twisted
// coproduct of h is F Delta(h) F^{-1} computed inside the two new legs.
inline TensorElement coproduct(const TensorElement& u, int leg, CoproductMode mode,
                               const DeformationParameter& theta) {
  TensorElement expanded = coproduct(u, leg);
  if (mode == CoproductMode::plain) return expanded;
  const TensorElement twist = build_twist(theta);
  const TensorElement twist_inv = build_twist(theta, /*inverse=*/true);
  const int L = expanded.legs();
  const std::array<int, 2> pos{leg, leg + 1};
  const TensorElement f = embed(twist, L, std::span<const int>(pos.data(), 2));
  const TensorElement f_inv = embed(twist_inv, L, std::span<const int>(pos.data(), 2));
  return normal_order_product(f, normal_order_product(expanded, f_inv));
}

// Largest coefficient magnitude by which the coassociator fails to
// intertwine the two iterated inverse twists.
inline double twist_intertwiner_defect(const DeformationParameter& theta,
                                       const DeformationParameter& theta_prime,
                                       bool drop_coassociator = false) {
  const int order = theta.order();
  const TensorElement f_theta_inv = build_twist(theta, true);
  const TensorElement f_prime_inv = build_twist(theta_prime, true);

  const TensorElement lhs = normal_order_product(
      coproduct(f_theta_inv, 0), embed(f_prime_inv, 3, {0, 1}));

  TensorElement rhs =
      normal_order_product(coproduct(f_prime_inv, 1), embed(f_theta_inv, 3, {1, 2}));
  if (!drop_coassociator)
    rhs = normal_order_product(rhs, build_coassociator(theta, theta_prime));

  return (lhs - rhs).max_abs_coeff();
}

// Pentagon defect for the twisted coassociator in four legs. The
// parenthesized placements use the twisted coproduct by default; the plain
// mode is the negative control.
inline double pentagon_defect(const DeformationParameter& theta,
                              CoproductMode mode = CoproductMode::twisted) {
  const TensorElement phi = build_coassociator(theta, theta);

  const TensorElement phi_12_34 = coproduct(phi, 2, mode, theta);
  const TensorElement phi_p12_34 = coproduct(phi, 0, mode, theta);
  const TensorElement phi_234 = embed(phi, 4, {1, 2, 3});
  const TensorElement phi_1_23_4 = coproduct(phi, 1, mode, theta);
  const TensorElement phi_123 = embed(phi, 4, {0, 1, 2});

  const TensorElement lhs = normal_order_product(phi_12_34, phi_p12_34);
  const TensorElement rhs =
      normal_order_product(phi_234, normal_order_product(phi_1_23_4, phi_123));
  return (lhs - rhs).max_abs_coeff();
}

// Counit axiom for the coassociator: applying the counit to the middle leg
// must give the unit two-leg element.
inline double counitality_defect(const DeformationParameter& theta) {
  const TensorElement phi = build_coassociator(theta, theta);
  const TensorElement reduced = counit(phi, 1);
  return (reduced - TensorElement::unit(2, theta.order())).max_abs_coeff();
}

enum class Generator { p, q, t };

inline TensorElement generator_element(Generator g, int order) {
  const LegMonomial m = g == Generator::p ? leg_p() : (g == Generator::q ? leg_q() : leg_t());
  return TensorElement::monomial(order, {m}, TruncatedSeries::one(order));
}

// Defect of quasi-coassociativity for one generator: the doubly-applied
// twisted coproduct must agree with its opposite bracketing conjugated by
// the coassociator.
inline double quasi_coassociativity_defect(Generator g, const DeformationParameter& theta) {
  const TensorElement h = generator_element(g, theta.order());
  const TensorElement once = coproduct(h, 0, CoproductMode::twisted, theta);
  const TensorElement lhs = coproduct(once, 1, CoproductMode::twisted, theta);
  const TensorElement inner = coproduct(once, 0, CoproductMode::twisted, theta);

  const TensorElement phi = build_coassociator(theta, theta);
  const TensorElement phi_inv = build_coassociator(theta, theta, /*inverse=*/true);
  const TensorElement rhs =
      normal_order_product(phi, normal_order_product(inner, phi_inv));
  return (lhs - rhs).max_abs_coeff();
}

}  // namespace nctwist
