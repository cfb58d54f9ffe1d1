#include "qmx/meixner.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qmx/compensated_sum.hpp"
#include "qmx/error.hpp"

namespace qmx {

namespace {

void require_index(int v, const char* what) {
  if (v < 0) throw Error(Errc::InvalidArgument, std::string(what) + " must be non-negative");
}

double sign_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// C(n+beta-1, n) for real beta.
double rising_binomial(int n, double beta) {
  double v = 1.0;
  for (int k = 1; k <= n; ++k) v *= (beta - 1.0 + k) / k;
  return v;
}

}  // namespace

MeixnerParams MeixnerParams::from_b(double b, double c, const QContext& ctx) {
  if (!(b > 0.0 && b < 1.0)) throw Error(Errc::InvalidArgument, "b must lie in (0,1)");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::InvalidArgument, "c must be positive");
  return MeixnerParams(std::nullopt, b, c, 0, ctx);
}

MeixnerParams MeixnerParams::from_beta(int beta, double c, const QContext& ctx) {
  if (beta < 1) throw Error(Errc::InvalidArgument, "beta must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::InvalidArgument, "c must be positive");
  return MeixnerParams(beta, 0.0, c, 0, ctx);
}

double MeixnerParams::b() const { return beta_ ? ctx_.pow(*beta_ - 1) : b_; }

HyperParam MeixnerParams::bq() const {
  return beta_ ? HyperParam::q_power(*beta_) : HyperParam::value(b_ * ctx_.q());
}

MeixnerParams MeixnerParams::shifted(int db, int dc) const {
  MeixnerParams p = *this;
  if (p.beta_) {
    *p.beta_ += db;
    if (*p.beta_ < 1) throw Error(Errc::InvalidArgument, "shifted beta must be >= 1");
  } else {
    p.b_ *= ctx_.pow(db);
    if (!(p.b_ > 0.0 && p.b_ < 1.0)) throw Error(Errc::InvalidArgument, "shifted b left (0,1)");
  }
  p.c_shift_ += dc;
  return p;
}

MatrixElementParams::MatrixElementParams(double theta, int beta, const QContext& ctx)
    : theta_base_(theta), beta_(beta), ctx_(ctx) {
  if (beta < 1) throw Error(Errc::InvalidArgument, "beta must be >= 1");
  if (!std::isfinite(theta)) throw Error(Errc::InvalidArgument, "theta must be finite");
}

MatrixElementParams MatrixElementParams::transformed(int sign, int half_shift) const {
  MatrixElementParams mp = *this;
  mp.theta_base_ *= (sign < 0 ? -1.0 : 1.0);
  mp.half_shift_ += half_shift;
  return mp;
}

MeixnerParams MatrixElementParams::meixner_params() const {
  if (theta_base_ == 0.0) throw Error(Errc::InvalidArgument, "theta = 0 has no polynomial family");
  return MeixnerParams::from_beta(beta_, theta_base_ * theta_base_, ctx_).shifted(0, half_shift_);
}

double qmeixner(int n, int x, const MeixnerParams& p) {
  require_index(n, "degree n");
  require_index(x, "variable x");
  const QContext& ctx = p.ctx();
  const std::array<HyperParam, 2> nums{HyperParam::q_power(-n), HyperParam::q_power(-x)};
  const std::array<HyperParam, 1> dens{p.bq()};
  const double z = -ctx.pow(n + 1) / p.c();
  return basic_hypergeometric(nums, dens, z, ctx).value;
}

double weight(int x, const MatrixElementParams& mp) {
  require_index(x, "variable x");
  const double t = mp.theta_sq();
  if (t == 0.0) throw Error(Errc::InvalidArgument, "weight needs theta != 0");
  const QContext& ctx = mp.ctx();
  const int beta = mp.beta();
  return std::pow(t, x) * q_binomial(x + beta - 1, x, ctx) * ctx.pow(0.5 * x * (x - 1)) /
         q_pochhammer(-t, x + beta, ctx);
}

double norm_factor(int n, const MatrixElementParams& mp) {
  require_index(n, "degree n");
  const double t = mp.theta_sq();
  if (t == 0.0) throw Error(Errc::InvalidArgument, "norm_factor needs theta != 0");
  const QContext& ctx = mp.ctx();
  const int beta = mp.beta();
  // theta^{-2n} q^{n(n-1)/2} (-theta^2 q^{-n};q)_n = q^{-n} (-q/theta^2;q)_n
  return ctx.pow(-n) * q_pochhammer_pow(1, n, ctx) * q_pochhammer(-ctx.q() / t, n, ctx) *
         q_pochhammer_pow(1, beta - 1, ctx) / q_pochhammer_pow(1, n + beta - 1, ctx);
}

double xi(int n, int x, const MatrixElementParams& mp) {
  require_index(n, "row n");
  require_index(x, "column x");
  const double theta = mp.theta();
  if (theta == 0.0) return n == x ? 1.0 : 0.0;
  const QContext& ctx = mp.ctx();
  const int beta = mp.beta();
  const double t = mp.theta_sq();
  // theta^n q^{-n(n-1)/4} (-theta^2 q^{-n};q)_n^{-1/2} = sgn(theta)^n q^{n/2} (-q/theta^2;q)_n^{-1/2};
  // theta^x keeps its sign too.
  const double radicand = q_binomial(n + beta - 1, n, ctx) * q_binomial(x + beta - 1, x, ctx) /
                          (q_pochhammer(-t, x + beta, ctx) * q_pochhammer(-ctx.q() / t, n, ctx));
  const double sign = sign_power(x) * (theta < 0.0 ? sign_power(n + x) : 1.0);
  return sign * std::pow(std::fabs(theta), x) * ctx.pow(0.25 * x * (x - 1) + 0.5 * n) *
         std::sqrt(radicand) * qmeixner(n, x, mp.meixner_params());
}

DualMeixner duality_transform(int n, int x, const MeixnerParams& p) {
  return {x, n, p.shifted(0, x - n)};
}

DualXi duality_transform(int n, int x, const MatrixElementParams& mp) {
  return {x, n, mp.transformed(-1, x - n), mp.ctx().pow(0.5 * (n - x))};
}

double classical_meixner(int n, int x, double beta, double c) {
  require_index(n, "degree n");
  require_index(x, "variable x");
  if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
  if (!(c > 0.0 && c < 1.0)) throw Error(Errc::InvalidArgument, "c must lie in (0,1)");
  const double z = 1.0 - 1.0 / c;
  CompensatedSum sum(1.0);
  double term = 1.0;
  for (int g = 0; g < std::min(n, x); ++g) {
    term *= (g - n) * (g - x) / ((beta + g) * (g + 1.0)) * z;
    sum += term;
  }
  return sum.value();
}

double classical_xi_limit(int n, int x, double beta, double tau) {
  require_index(n, "row n");
  require_index(x, "column x");
  if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
  const double t = std::tanh(tau);
  const double s = t * t - 1.0;
  // t^{n+x} (1 - 1/t^2)^g = t^{n+x-2g} (t^2 - 1)^g keeps tau = 0 finite.
  CompensatedSum sum(std::pow(t, n + x));
  double coef = 1.0;
  for (int g = 0; g < std::min(n, x); ++g) {
    coef *= (g - n) * (g - x) / ((beta + g) * (g + 1.0));
    sum += coef * std::pow(t, n + x - 2 * (g + 1)) * std::pow(s, g + 1);
  }
  return sign_power(x) * std::sqrt(rising_binomial(n, beta) * rising_binomial(x, beta)) *
         std::pow(std::cosh(tau), -beta) * sum.value();
}

}  // namespace qmx
