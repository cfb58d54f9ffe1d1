#include "qmx/qseries.hpp"

#include <algorithm>
#include <cfloat>
#include <string>

#include "qmx/compensated_sum.hpp"
#include "qmx/error.hpp"

namespace qmx {

QContext::QContext(double q, double rel_tol, double tail_cutoff, std::size_t max_terms)
    : q_(q), log_q_(0.0), rel_tol_(rel_tol), tail_cutoff_(tail_cutoff), max_terms_(max_terms) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(Errc::InvalidArgument, "q must lie in (0,1), got " + std::to_string(q));
  }
  if (!(rel_tol > 0.0) || !(tail_cutoff > 0.0) || max_terms < 1) {
    throw Error(Errc::InvalidArgument, "tolerances must be positive and max_terms >= 1");
  }
  log_q_ = std::log(q);
}

double q_pochhammer(double a, int n, const QContext& ctx) {
  if (n < 0) throw Error(Errc::InvalidArgument, "q_pochhammer: negative length");
  double prod = 1.0;
  for (int k = 0; k < n; ++k) prod *= 1.0 - a * ctx.pow(k);
  return prod;
}

double q_pochhammer_pow(int exponent, int n, const QContext& ctx) {
  if (n < 0) throw Error(Errc::InvalidArgument, "q_pochhammer_pow: negative length");
  double prod = 1.0;
  for (int k = 0; k < n; ++k) prod *= ctx.one_minus_pow(exponent + k);
  return prod;
}

SeriesValue q_pochhammer_inf(double a, const QContext& ctx, ProductUse use) {
  if (a == 0.0) return {1.0, 0, 0.0};
  double prod = 1.0;
  std::size_t k = 0;
  double t = a;
  while (std::fabs(t) >= ctx.tail_cutoff()) {
    if (k >= ctx.max_terms()) {
      throw Error(Errc::NonConvergent, "infinite product exceeded max_terms at a=" + std::to_string(a));
    }
    const double factor = 1.0 - t;
    if (use == ProductUse::Reciprocal && std::fabs(factor) <= ctx.rel_tol()) {
      throw Error(Errc::PoleHit, "factor 1 - a q^" + std::to_string(k) + " vanishes");
    }
    prod *= factor;
    ++k;
    t = a * ctx.pow(static_cast<double>(k));
  }
  // |log prod_{j>=k}(1 - a q^j)| <= |t| / ((1-q)(1-|t|))
  const double log_bound = std::fabs(t) / ((1.0 - ctx.q()) * (1.0 - std::fabs(t)));
  return {prod, k, std::fabs(prod) * std::expm1(log_bound)};
}

double q_binomial(int n, int k, const QContext& ctx) {
  if (n < 0) throw Error(Errc::InvalidArgument, "q_binomial: negative n");
  if (k < 0 || k > n) return 0.0;
  const int m = std::min(k, n - k);
  double value = 1.0;
  for (int j = 1; j <= m; ++j) {
    value *= ctx.one_minus_pow(n - m + j) / ctx.one_minus_pow(j);
  }
  return value;
}

SeriesValue little_qexp(double z, const QContext& ctx) {
  const SeriesValue prod = q_pochhammer_inf(z, ctx, ProductUse::Reciprocal);
  const double value = 1.0 / prod.value;
  return {value, prod.terms_used, std::fabs(value) * prod.tail_estimate / std::fabs(prod.value)};
}

SeriesValue big_qexp(double z, const QContext& ctx) { return q_pochhammer_inf(-z, ctx); }

namespace {

double int_pow(double base, int exponent) {
  double result = 1.0;
  const bool invert = exponent < 0;
  for (int i = 0; i < std::abs(exponent); ++i) result *= base;
  return invert ? 1.0 / result : result;
}

}  // namespace

SeriesValue basic_hypergeometric(std::span<const HyperParam> numerators,
                                 std::span<const HyperParam> denominators, double z,
                                 const QContext& ctx) {
  const int r = static_cast<int>(numerators.size());
  const int s = static_cast<int>(denominators.size());

  std::optional<int> stop;
  for (const auto& a : numerators) {
    if (auto idx = a.termination_index()) stop = stop ? std::min(*stop, *idx) : *idx;
  }
  if (!stop && z != 0.0) {
    if (r > s + 1) throw Error(Errc::NonConvergent, "non-terminating series with r > s+1 diverges");
    if (r == s + 1 && std::fabs(z) >= 1.0) {
      throw Error(Errc::NonConvergent, "non-terminating series with r = s+1 needs |z| < 1");
    }
  }

  const int power = 1 + s - r;
  CompensatedSum sum(1.0);
  double term = 1.0;
  double largest = 1.0;
  std::size_t terms_used = 1;

  for (int n = 0;; ++n) {
    if (stop && n >= *stop) return {sum.value(), terms_used, 0.0};
    if (terms_used >= ctx.max_terms()) {
      throw Error(Errc::NonConvergent, "series exceeded max_terms");
    }

    double ratio = z;
    for (const auto& a : numerators) ratio *= a.one_minus_shifted(n, ctx);
    for (const auto& b : denominators) {
      const double f = b.one_minus_shifted(n, ctx);
      const double scale = std::max(1.0, std::fabs(b.resolve(ctx) * ctx.pow(n)));
      if (f == 0.0 || std::fabs(f) <= ctx.rel_tol() * scale) {
        throw Error(Errc::DenominatorPole, "(b;q)_n vanishes at n=" + std::to_string(n + 1));
      }
      ratio /= f;
    }
    ratio /= ctx.one_minus_pow(n + 1);
    if (power != 0) ratio *= int_pow(-ctx.pow(n), power);

    const double next = term * ratio;
    if (next == 0.0) return {sum.value(), terms_used, 0.0};

    if (!stop) {
      const double reference = std::max(std::fabs(sum.value()), largest * DBL_EPSILON);
      const double rho = std::fabs(ratio);
      if (std::fabs(next) <= ctx.tail_cutoff() * reference && rho < 1.0) {
        return {sum.value(), terms_used, std::fabs(next) / (1.0 - rho)};
      }
    }

    sum += next;
    term = next;
    largest = std::max(largest, std::fabs(next));
    ++terms_used;
  }
}

}  // namespace qmx
