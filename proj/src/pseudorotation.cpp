#include "qmx/pseudorotation.hpp"

#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmx/error.hpp"

namespace qmx {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Coefficient of M^k in the series of e_q (1/(q;q)_k) or E_q (q^{k(k-1)/2}/(q;q)_k),
// updated from k-1 to k.
double next_coefficient(double previous, int k, QExpKind kind, const QContext& ctx) {
  double c = previous / ctx.one_minus_pow(k);
  if (kind == QExpKind::Big) c *= ctx.pow(k - 1);
  return c;
}

OperatorMatrix scaled_diag(const FockTruncation& t, const std::function<double(int, int)>& f) {
  return OperatorMatrix::diagonal(t, f);
}

OperatorMatrix negate(const OperatorMatrix& m) { return -1.0 * m; }

// e_q / E_q of scale*X, using the exact forms when the shape allows.
OperatorMatrix qexp_any(const OperatorMatrix& x, QExpKind kind, double scale, const QContext& ctx) {
  if (x.is_diagonal() || x.is_strictly_lower() || x.is_strictly_upper()) {
    return matrix_qexp(x, kind, scale, ctx);
  }
  return matrix_qexp_series(x, kind, scale, ctx);
}

}  // namespace

OperatorMatrix matrix_qexp(const OperatorMatrix& x, QExpKind kind, double scale, const QContext& ctx) {
  const FockTruncation& t = x.basis();
  if (x.is_diagonal()) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.dim(), x.dim());
    for (int i = 0; i < x.dim(); ++i) {
      const double z = scale * x.entries()(i, i);
      out(i, i) = kind == QExpKind::Little ? little_qexp(z, ctx).value : big_qexp(z, ctx).value;
    }
    return {t, std::move(out)};
  }
  if (!x.is_strictly_lower() && !x.is_strictly_upper()) {
    throw Error(Errc::UnsupportedShape, "q-exponential argument is neither diagonal nor nilpotent");
  }
  const OperatorMatrix m = scale * x;
  OperatorMatrix result = OperatorMatrix::identity(t);
  OperatorMatrix power = OperatorMatrix::identity(t);
  double coef = 1.0;
  for (int k = 1; k <= x.dim(); ++k) {
    power = m * power;
    if (power.entries().isZero(0.0)) break;
    coef = next_coefficient(coef, k, kind, ctx);
    result = result + coef * power;
  }
  return result;
}

OperatorMatrix matrix_qexp_series(const OperatorMatrix& x, QExpKind kind, double scale, const QContext& ctx) {
  const FockTruncation& t = x.basis();
  const OperatorMatrix m = scale * x;
  OperatorMatrix result = OperatorMatrix::identity(t);
  OperatorMatrix power = OperatorMatrix::identity(t);
  double coef = 1.0;
  for (std::size_t k = 1; k < ctx.max_terms(); ++k) {
    power = m * power;
    coef = next_coefficient(coef, static_cast<int>(k), kind, ctx);
    const OperatorMatrix term = coef * power;
    result = result + term;
    const double size = max_abs(term.entries());
    if (size == 0.0 || size < ctx.tail_cutoff() * max_abs(result.entries())) return result;
  }
  throw Error(Errc::NonConvergent, "matrix q-exponential series exceeded max_terms");
}

OperatorMatrix sqrt_diagonal(const OperatorMatrix& d) {
  if (!d.is_diagonal()) throw Error(Errc::UnsupportedShape, "square root needs a diagonal operator");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d.dim(), d.dim());
  for (int i = 0; i < d.dim(); ++i) {
    const double v = d.entries()(i, i);
    if (v < 0.0) throw Error(Errc::DomainViolation, "negative diagonal entry under square root");
    out(i, i) = std::sqrt(v);
  }
  return {d.basis(), std::move(out)};
}

UOperator build_U(double theta, const FockTruncation& t, const QContext& ctx) {
  if (t.n_a_max() < 4 || t.n_b_max() < 4) {
    throw Error(Errc::TruncationTooSmall, "U needs both truncation caps >= 4");
  }
  const Oscillators osc = build_oscillators(t, ctx);
  const double q = ctx.q();
  const OperatorMatrix weight = scaled_diag(t, [&](int a, int b) { return ctx.pow(0.5 * (b - a + 1)); });
  const OperatorMatrix raise = weight * (osc.Ap * osc.Bp);
  const OperatorMatrix lower = weight * (osc.Am * osc.Bm);

  const OperatorMatrix left = sqrt_diagonal(matrix_qexp(
      scaled_diag(t, [&](int a, int) { return ctx.pow(-a); }), QExpKind::Little, -theta * theta, ctx));
  const OperatorMatrix right = sqrt_diagonal(matrix_qexp(
      scaled_diag(t, [&](int, int b) { return ctx.pow(b + 1); }), QExpKind::Big, theta * theta, ctx));
  const OperatorMatrix e_raise = matrix_qexp(raise, QExpKind::Little, theta * (1.0 - q), ctx);
  const OperatorMatrix e_lower = matrix_qexp(lower, QExpKind::Big, -theta * (1.0 - q), ctx);

  return {theta, left * (e_raise * (e_lower * right)), t, ctx};
}

UOperator build_U(const MatrixElementParams& mp, const FockTruncation& t) {
  return build_U(mp.theta(), t, mp.ctx());
}

InteriorBlock u_interior(const FockTruncation& t) {
  return {t.n_a_max() - (t.n_a_max() + 3) / 4, t.n_b_max() - (t.n_b_max() + 3) / 4};
}

double element(const UOperator& u, int beta, int n, int x) {
  const InteriorBlock blk = u_interior(u.truncation);
  auto inside = [&](int k) { return k >= 0 && k <= blk.a_max && k + beta - 1 <= blk.b_max; };
  if (beta < 1 || !inside(n) || !inside(x)) {
    throw Error(Errc::OutOfBlock, "sector element (" + std::to_string(n) + "," + std::to_string(x) +
                                      ") outside the interior block");
  }
  return u.matrix({n, n + beta - 1}, {x, x + beta - 1});
}

UnitarityResidual unitarity_residual(const UOperator& u, int beta, int n_block) {
  const SectorBasis s = sector(u.truncation, beta);
  const auto k = static_cast<Eigen::Index>(n_block + 1);
  if (n_block < 0 || k > static_cast<Eigen::Index>(s.indices.size())) {
    throw Error(Errc::OutOfBlock, "unitarity block exceeds the sector");
  }
  const Eigen::MatrixXd block = sector_block(u.matrix, s);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd uu = (block * block.transpose()).topLeftCorner(k, k) - id;
  const Eigen::MatrixXd du = (block.transpose() * block).topLeftCorner(k, k) - id;
  return {max_abs(uu), max_abs(du)};
}

namespace {

IdentityCheck compare(OperatorMatrix lhs, OperatorMatrix rhs, InteriorBlock block) {
  const double r = identity_residual({lhs, negate(rhs)}, block_indices(lhs.basis(), block));
  return {std::move(lhs), std::move(rhs), r};
}

void require_pair(const UOperator& u, const UOperator& u_shifted) {
  if (!(u.truncation == u_shifted.truncation) || !(u.ctx == u_shifted.ctx)) {
    throw Error(Errc::InvalidArgument, "operators built on different truncations or q");
  }
}

OperatorMatrix lowering_rhs(const UOperator& u, const Oscillators& o) {
  const FockTruncation& t = u.truncation;
  const double th = u.theta;
  const QContext& ctx = u.ctx;
  return o.Am * scaled_diag(t, [&](int, int b) { return std::sqrt(1.0 + th * th * ctx.pow(b)); }) +
         th * (scaled_diag(t, [&](int a, int b) { return ctx.pow(0.5 * (a + b)); }) * o.Bp);
}

OperatorMatrix raising_rhs(const UOperator& u, const Oscillators& o) {
  const FockTruncation& t = u.truncation;
  const double th = u.theta;
  const QContext& ctx = u.ctx;
  return o.Ap * scaled_diag(t, [&](int, int b) { return std::sqrt(1.0 + th * th * ctx.pow(b)); }) +
         th * (o.Bm * scaled_diag(t, [&](int a, int b) { return ctx.pow(0.5 * (a + b)); }));
}

}  // namespace

IdentityCheck conjugated_lowering(const UOperator& u, const UOperator& u_shifted, InteriorBlock block) {
  require_pair(u, u_shifted);
  const Oscillators o = build_oscillators(u.truncation, u.ctx);
  return compare(u_shifted.matrix.adjoint() * (o.Am * u.matrix), lowering_rhs(u, o), block);
}

IdentityCheck conjugated_raising(const UOperator& u, const UOperator& u_shifted, InteriorBlock block) {
  require_pair(u, u_shifted);
  const Oscillators o = build_oscillators(u.truncation, u.ctx);
  return compare(u.matrix.adjoint() * (o.Ap * u_shifted.matrix), raising_rhs(u, o), block);
}

IdentityCheck intertwined_lowering(const UOperator& u, const UOperator& u_shifted, InteriorBlock block) {
  require_pair(u, u_shifted);
  const Oscillators o = build_oscillators(u.truncation, u.ctx);
  return compare(o.Am * u.matrix, u_shifted.matrix * lowering_rhs(u, o), block);
}

IdentityCheck intertwined_raising(const UOperator& u, const UOperator& u_shifted, InteriorBlock block) {
  require_pair(u, u_shifted);
  const Oscillators o = build_oscillators(u.truncation, u.ctx);
  return compare(o.Ap * u_shifted.matrix, u.matrix * raising_rhs(u, o), block);
}

IdentityCheck conjugated_lowering_dual(const UOperator& u, InteriorBlock block) {
  const FockTruncation& t = u.truncation;
  const QContext& ctx = u.ctx;
  const double th = u.theta;
  const Oscillators o = build_oscillators(t, ctx);
  const OperatorMatrix half = scaled_diag(t, [&](int a, int) { return ctx.pow(-0.5 * a); });
  OperatorMatrix lhs = u.matrix * (half * (o.Am * u.matrix.adjoint()));
  OperatorMatrix rhs =
      half * (o.Am * scaled_diag(t, [&](int a, int) { return std::sqrt(1.0 + th * th * ctx.pow(-a)); })) -
      th * (scaled_diag(t, [&](int a, int b) { return ctx.pow(-a + 0.5 * b); }) * o.Bp);
  return compare(std::move(lhs), std::move(rhs), block);
}

IdentityCheck conjugated_raising_dual(const UOperator& u, InteriorBlock block) {
  const FockTruncation& t = u.truncation;
  const QContext& ctx = u.ctx;
  const double th = u.theta;
  const Oscillators o = build_oscillators(t, ctx);
  const OperatorMatrix half = scaled_diag(t, [&](int a, int) { return ctx.pow(-0.5 * a); });
  OperatorMatrix lhs = u.matrix * (o.Ap * (half * u.matrix.adjoint()));
  OperatorMatrix rhs =
      scaled_diag(t, [&](int a, int) { return std::sqrt(1.0 + th * th * ctx.pow(-a)); }) * (o.Ap * half) -
      th * (scaled_diag(t, [&](int a, int) { return ctx.pow(-a); }) *
            (o.Bm * scaled_diag(t, [&](int, int b) { return ctx.pow(0.5 * b); })));
  return compare(std::move(lhs), std::move(rhs), block);
}

OperatorMatrix classical_U(double tau, const FockTruncation& t) {
  const ClassicalOperators c = build_classical(t);
  const Eigen::MatrixXd gen = tau * (c.Jp.entries() - c.Jm.entries());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.dim(), t.dim());
  for (int d = -t.n_a_max(); d <= t.n_b_max(); ++d) {
    std::vector<int> idx;
    for (int a = 0; a <= t.n_a_max(); ++a)
      if (t.contains(a, a + d)) idx.push_back(t.index(a, a + d));
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i) block(i, j) = gen(idx[i], idx[j]);
    const Eigen::MatrixXd e = block.exp();
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i) out(idx[i], idx[j]) = e(i, j);
  }
  return {t, std::move(out)};
}

double qbch_residual(QBchForm form, const OperatorMatrix& x, const OperatorMatrix& y, double lambda,
                     double alpha, const QContext& ctx, const std::vector<int>& block) {
  const double qa = ctx.pow(alpha);
  const OperatorMatrix lhs =
      form == QBchForm::First
          ? matrix_qexp(x, QExpKind::Big, lambda, ctx) * y * matrix_qexp(x, QExpKind::Little, -lambda * qa, ctx)
          : matrix_qexp(x, QExpKind::Little, lambda, ctx) * y * matrix_qexp(x, QExpKind::Big, -lambda * qa, ctx);

  OperatorMatrix commutator = y;
  OperatorMatrix series = y;
  double coef = 1.0;
  constexpr int kMaxDepth = 60;
  for (int n = 0; n < kMaxDepth; ++n) {
    commutator = form == QBchForm::First ? ctx.pow(n) * (x * commutator) - qa * (commutator * x)
                                         : x * commutator - ctx.pow(n) * qa * (commutator * x);
    coef *= lambda / ctx.one_minus_pow(n + 1);
    const OperatorMatrix term = coef * commutator;
    series = series + term;
    const double size = max_abs(term.entries());
    if (size == 0.0 || size < ctx.tail_cutoff() * max_abs(series.entries())) break;
  }
  return identity_residual({lhs, negate(series)}, block);
}

double qexp_sum_residual(QExpKind kind, const OperatorMatrix& x, const OperatorMatrix& y, const QContext& ctx,
                         const std::vector<int>& block) {
  const OperatorMatrix lhs = qexp_any(x + y, kind, 1.0, ctx);
  const OperatorMatrix rhs = kind == QExpKind::Little ? qexp_any(y, kind, 1.0, ctx) * qexp_any(x, kind, 1.0, ctx)
                                                      : qexp_any(x, kind, 1.0, ctx) * qexp_any(y, kind, 1.0, ctx);
  return identity_residual({lhs, negate(rhs)}, block);
}

namespace {

struct PairOps {
  OperatorMatrix up;      // A_+ B_+
  OperatorMatrix down;    // A_- B_-
  OperatorMatrix b_diag;  // q^{-B_0-1} / (1-q)^2
  OperatorMatrix a_diag;  // q^{A_0} / (1-q)^2
};

PairOps pair_ops(const Oscillators& osc, const QContext& ctx) {
  const FockTruncation& t = osc.A0.basis();
  const double k = 1.0 / ((1.0 - ctx.q()) * (1.0 - ctx.q()));
  return {osc.Ap * osc.Bp, osc.Am * osc.Bm, scaled_diag(t, [&](int, int b) { return k * ctx.pow(-b - 1); }),
          scaled_diag(t, [&](int a, int) { return k * ctx.pow(a); })};
}

}  // namespace

IdentityCheck reorder_little(double a, double b, const Oscillators& osc, const QContext& ctx,
                            InteriorBlock block) {
  const PairOps p = pair_ops(osc, ctx);
  const auto L = QExpKind::Little;
  const OperatorMatrix lhs =
      matrix_qexp(p.down, L, a, ctx) * (matrix_qexp(p.b_diag, L, -a * b, ctx) * matrix_qexp(p.up, L, b, ctx));
  const OperatorMatrix rhs =
      matrix_qexp(p.up, L, b, ctx) * (matrix_qexp(p.a_diag, L, -a * b, ctx) * matrix_qexp(p.down, L, a, ctx));
  return compare(lhs, rhs, block);
}

IdentityCheck reorder_big(double g, double d, const Oscillators& osc, const QContext& ctx,
                         InteriorBlock block) {
  const PairOps p = pair_ops(osc, ctx);
  const auto B = QExpKind::Big;
  const OperatorMatrix lhs =
      matrix_qexp(p.up, B, g, ctx) * (matrix_qexp(p.b_diag, B, g * d, ctx) * matrix_qexp(p.down, B, d, ctx));
  const OperatorMatrix rhs =
      matrix_qexp(p.down, B, d, ctx) * (matrix_qexp(p.a_diag, B, g * d, ctx) * matrix_qexp(p.up, B, g, ctx));
  return compare(lhs, rhs, block);
}

IdentityCheck reorder_mixed(double g, double d, const Oscillators& osc, const QContext& ctx,
                           InteriorBlock block) {
  const PairOps p = pair_ops(osc, ctx);
  const auto L = QExpKind::Little;
  const auto B = QExpKind::Big;
  const OperatorMatrix lhs = matrix_qexp(p.down, B, g, ctx) * matrix_qexp(p.up, L, d, ctx);
  const OperatorMatrix rhs =
      matrix_qexp(p.b_diag, L, g * d, ctx) *
      (matrix_qexp(p.up, L, d, ctx) * (matrix_qexp(p.down, B, g, ctx) * matrix_qexp(p.a_diag, B, -g * d, ctx)));
  return compare(lhs, rhs, block);
}

}  // namespace qmx
