#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace qmx {

/// Numeric policy shared by every q-series evaluation: the base q and the
/// truncation rules for infinite sums and products.
class QContext {
 public:
  /// Throws Error{InvalidArgument} unless 0 < q < 1, rel_tol > 0,
  /// tail_cutoff > 0 and max_terms >= 1.
  explicit QContext(double q, double rel_tol = 1e-12, double tail_cutoff = 1e-18,
                    std::size_t max_terms = 10'000);

  double q() const noexcept { return q_; }
  double rel_tol() const noexcept { return rel_tol_; }
  double tail_cutoff() const noexcept { return tail_cutoff_; }
  std::size_t max_terms() const noexcept { return max_terms_; }

  /// q^e.
  double pow(double e) const noexcept { return std::pow(q_, e); }

  /// 1 - q^e, accurate for q close to 1 and exactly zero at e == 0.
  double one_minus_pow(double e) const noexcept { return -std::expm1(e * log_q_); }

  QContext with_q(double q) const { return QContext(q, rel_tol_, tail_cutoff_, max_terms_); }

  friend bool operator==(const QContext&, const QContext&) = default;

 private:
  double q_;
  double log_q_;
  double rel_tol_;
  double tail_cutoff_;
  std::size_t max_terms_;
};

struct SeriesValue {
  double value = 0.0;
  std::size_t terms_used = 0;
  /// Bound on the truncation error, in the units of value.
  double tail_estimate = 0.0;
};

/// (a;q)_n = prod_{k<n} (1 - a q^k). Throws InvalidArgument for n < 0.
double q_pochhammer(double a, int n, const QContext& ctx);

/// (q^e;q)_n for an exact power of q. Each factor is formed as 1 - q^{e+k}
/// without rounding q^{e+k} first, so a factor with e+k == 0 is exactly zero.
double q_pochhammer_pow(int exponent, int n, const QContext& ctx);

enum class ProductUse {
  Direct,
  /// The product will be inverted; a vanishing factor is reported as PoleHit.
  Reciprocal,
};

/// (a;q)_inf, truncated once |a q^k| < tail_cutoff. tail_estimate bounds the
/// contribution of the dropped factors.
SeriesValue q_pochhammer_inf(double a, const QContext& ctx, ProductUse use = ProductUse::Direct);

/// Gaussian binomial [n, k]_q; zero for k outside 0..n.
double q_binomial(int n, int k, const QContext& ctx);

/// e_q(z) = 1/(z;q)_inf. Product form, valid for every z off the poles z = q^{-k}.
SeriesValue little_qexp(double z, const QContext& ctx);

/// E_q(z) = (-z;q)_inf.
SeriesValue big_qexp(double z, const QContext& ctx);

/// Parameter of a basic hypergeometric series. Exact powers of q are kept
/// symbolic so that q^{-N} numerators terminate the series without any
/// floating-point pattern matching.
class HyperParam {
 public:
  static HyperParam value(double a) { return HyperParam(a, 0, false); }
  static HyperParam q_power(int exponent) { return HyperParam(0.0, exponent, true); }

  bool is_q_power() const noexcept { return is_power_; }
  int exponent() const noexcept { return exponent_; }
  double resolve(const QContext& ctx) const { return is_power_ ? ctx.pow(exponent_) : value_; }

  /// 1 - a q^k.
  double one_minus_shifted(int k, const QContext& ctx) const {
    return is_power_ ? ctx.one_minus_pow(exponent_ + k) : 1.0 - value_ * ctx.pow(k);
  }

  /// N when the parameter is q^{-N} with N >= 0.
  std::optional<int> termination_index() const noexcept {
    if (is_power_ && exponent_ <= 0) return -exponent_;
    return std::nullopt;
  }

 private:
  HyperParam(double v, int e, bool p) : value_(v), exponent_(e), is_power_(p) {}

  double value_;
  int exponent_;
  bool is_power_;
};

/*!
  r phi s (numerators; denominators; q, z).

  Terms are generated by their ratio and summed in increasing order with
  compensated accumulation. A numerator q^{-N} terminates the sum at n = N and
  the result carries no tail. Otherwise the sum runs until a term drops below
  tail_cutoff relative to the partial sum while the term ratio is below one.

  Errors: NonConvergent when the series diverges for this (r, s, z) or
  max_terms is reached; DenominatorPole when some (b;q)_n vanishes before
  termination.
*/
SeriesValue basic_hypergeometric(std::span<const HyperParam> numerators,
                                 std::span<const HyperParam> denominators, double z,
                                 const QContext& ctx);

}  // namespace qmx
