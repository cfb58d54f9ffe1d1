#include "qmx/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCore>

#include "qmx/error.hpp"

namespace qmx {

FockTruncation::FockTruncation(int n_a_max, int n_b_max) : n_a_max_(n_a_max), n_b_max_(n_b_max) {
  if (n_a_max < 1 || n_b_max < 1) {
    throw Error(Errc::InvalidArgument, "truncation caps must be >= 1");
  }
}

int FockTruncation::index(int n_a, int n_b) const {
  if (!contains(n_a, n_b)) {
    throw Error(Errc::OutOfTruncation,
                "state (" + std::to_string(n_a) + "," + std::to_string(n_b) + ") outside truncation");
  }
  return n_a * (n_b_max_ + 1) + n_b;
}

FockState FockTruncation::state(int index) const {
  if (index < 0 || index >= dim()) throw Error(Errc::OutOfTruncation, "index outside truncation");
  return {index / (n_b_max_ + 1), index % (n_b_max_ + 1)};
}

OperatorMatrix::OperatorMatrix(FockTruncation basis, Eigen::MatrixXd entries)
    : basis_(basis), entries_(std::move(entries)) {
  if (entries_.rows() != basis_.dim() || entries_.cols() != basis_.dim()) {
    throw Error(Errc::InvalidArgument, "matrix shape does not match the truncation");
  }
}

OperatorMatrix OperatorMatrix::identity(const FockTruncation& t) {
  return {t, Eigen::MatrixXd::Identity(t.dim(), t.dim())};
}

OperatorMatrix OperatorMatrix::zero(const FockTruncation& t) {
  return {t, Eigen::MatrixXd::Zero(t.dim(), t.dim())};
}

OperatorMatrix OperatorMatrix::diagonal(const FockTruncation& t,
                                        const std::function<double(int, int)>& f) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    const FockState s = t.state(i);
    m(i, i) = f(s.n_a, s.n_b);
  }
  return {t, std::move(m)};
}

double OperatorMatrix::operator()(FockState row, FockState col) const {
  return entries_(basis_.index(row.n_a, row.n_b), basis_.index(col.n_a, col.n_b));
}

bool OperatorMatrix::is_diagonal() const {
  for (int j = 0; j < dim(); ++j)
    for (int i = 0; i < dim(); ++i)
      if (i != j && entries_(i, j) != 0.0) return false;
  return true;
}

bool OperatorMatrix::is_strictly_lower() const {
  for (int j = 0; j < dim(); ++j)
    for (int i = 0; i <= j; ++i)
      if (entries_(i, j) != 0.0) return false;
  return true;
}

bool OperatorMatrix::is_strictly_upper() const {
  for (int j = 0; j < dim(); ++j)
    for (int i = j; i < dim(); ++i)
      if (entries_(i, j) != 0.0) return false;
  return true;
}

namespace {

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!(a.basis() == b.basis())) throw Error(Errc::InvalidArgument, "operators on different truncations");
}

}  // namespace

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  // Ladder operators, q-exponentials of them and U itself are mostly zero;
  // a sparse left factor turns the O(d^3) product into O(nnz * d).
  auto mostly_zero = [](const Eigen::MatrixXd& m) { return (m.array() != 0.0).count() * 8 <= m.size(); };
  if (mostly_zero(a.entries_)) {
    const Eigen::SparseMatrix<double> s = a.entries_.sparseView();
    return {a.basis_, Eigen::MatrixXd(s * b.entries_)};
  }
  if (mostly_zero(b.entries_)) {
    const Eigen::SparseMatrix<double> s = b.entries_.sparseView();
    return {a.basis_, Eigen::MatrixXd(a.entries_ * s)};
  }
  return {a.basis_, a.entries_ * b.entries_};
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.basis_, a.entries_ + b.entries_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.basis_, a.entries_ - b.entries_};
}

namespace {

// a_lower(n) and b_lower(n) are <n-1| X_- |n> for each oscillator; the raising
// operators are their transposes.
Oscillators assemble(const FockTruncation& t, const std::function<double(int)>& a_lower,
                     const std::function<double(int)>& b_lower) {
  const int d = t.dim();
  Eigen::MatrixXd am = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const FockState s = t.state(i);
    if (s.n_a > 0) am(t.index(s.n_a - 1, s.n_b), i) = a_lower(s.n_a);
    if (s.n_b > 0) bm(t.index(s.n_a, s.n_b - 1), i) = b_lower(s.n_b);
  }
  Eigen::MatrixXd ap = am.transpose();
  Eigen::MatrixXd bp = bm.transpose();
  return {OperatorMatrix::diagonal(t, [](int a, int) { return double(a); }),
          OperatorMatrix(t, std::move(ap)),
          OperatorMatrix(t, std::move(am)),
          OperatorMatrix::diagonal(t, [](int, int b) { return double(b); }),
          OperatorMatrix(t, std::move(bp)),
          OperatorMatrix(t, std::move(bm))};
}

}  // namespace

Oscillators build_oscillators(const FockTruncation& t, const QContext& ctx) {
  const double one_minus_q = 1.0 - ctx.q();
  return assemble(
      t, [&](int n) { return std::sqrt(ctx.one_minus_pow(n) / one_minus_q); },
      [&](int n) { return std::sqrt(-ctx.one_minus_pow(-n) / one_minus_q); });
}

SuGenerators build_J(const Oscillators& osc, const QContext& ctx) {
  const FockTruncation& t = osc.A0.basis();
  const OperatorMatrix j0 = 0.5 * (osc.A0 + osc.B0 + OperatorMatrix::identity(t));
  const OperatorMatrix weight =
      OperatorMatrix::diagonal(t, [&](int a, int b) { return ctx.pow(0.5 * (b - a + 2)); });
  return {j0, weight * (osc.Ap * osc.Bp), weight * (osc.Am * osc.Bm)};
}

SuGenerators build_J(const FockTruncation& t, const QContext& ctx) {
  return build_J(build_oscillators(t, ctx), ctx);
}

ClassicalOperators build_classical(const FockTruncation& t) {
  auto root = [](int n) { return std::sqrt(double(n)); };
  Oscillators o = assemble(t, root, root);
  OperatorMatrix j0 = 0.5 * (o.A0 + o.B0 + OperatorMatrix::identity(t));
  OperatorMatrix jp = o.Ap * o.Bp;
  OperatorMatrix jm = o.Am * o.Bm;
  return {o.A0, o.Ap, o.Am, o.B0, o.Bp, o.Bm, j0, jp, jm};
}

SectorBasis sector(const FockTruncation& t, int beta) {
  if (beta < 1) throw Error(Errc::InvalidArgument, "beta must be >= 1");
  SectorBasis s{beta, {}};
  for (int n = 0; t.contains(n, n + beta - 1); ++n) s.indices.push_back(t.index(n, n + beta - 1));
  if (s.indices.empty()) {
    throw Error(Errc::EmptySector, "no state of sector beta=" + std::to_string(beta) + " fits");
  }
  return s;
}

LadderAction ladder_power_action(Ladder which, int power, int x, int beta, const FockTruncation& t,
                                 const QContext& ctx) {
  if (power < 0 || x < 0 || beta < 1) throw Error(Errc::InvalidArgument, "invalid ladder arguments");
  if (!t.contains(x, x + beta - 1)) throw Error(Errc::OutOfTruncation, "source state outside truncation");
  const double scale = std::pow(1.0 - ctx.q(), -power);
  const double mu = power;
  if (which == Ladder::Lowering) {
    if (power > x) return {0.0, std::nullopt};
    const double radicand = q_pochhammer_pow(-x, power, ctx) * q_pochhammer_pow(1 - x - beta, power, ctx) *
                            ctx.pow(mu * x - 0.5 * mu * (mu - 1));
    return {scale * std::sqrt(radicand), x - power};
  }
  const int y = x + power;
  if (!t.contains(y, y + beta - 1)) throw Error(Errc::OutOfTruncation, "image state outside truncation");
  const double radicand = q_pochhammer_pow(x + 1, power, ctx) * q_pochhammer_pow(x + beta, power, ctx) *
                          ctx.pow(-mu * (x + beta) - 0.5 * mu * (mu - 1));
  return {scale * std::sqrt(radicand), y};
}

InteriorBlock interior_with_margin(const FockTruncation& t, int margin) {
  const InteriorBlock b{t.n_a_max() - margin, t.n_b_max() - margin};
  if (b.a_max < 0 || b.b_max < 0) throw Error(Errc::TruncationTooSmall, "margin exceeds truncation");
  return b;
}

std::vector<int> block_indices(const FockTruncation& t, InteriorBlock block) {
  std::vector<int> out;
  for (int a = 0; a <= std::min(block.a_max, t.n_a_max()); ++a)
    for (int b = 0; b <= std::min(block.b_max, t.n_b_max()); ++b) out.push_back(t.index(a, b));
  return out;
}

double identity_residual(const std::vector<OperatorMatrix>& terms, const std::vector<int>& indices) {
  double worst = 0.0;
  for (int j : indices) {
    for (int i : indices) {
      double sum = 0.0;
      double scale = 0.0;
      for (const auto& t : terms) {
        sum += t.entries()(i, j);
        scale += std::fabs(t.entries()(i, j));
      }
      worst = std::max(worst, std::fabs(sum) / std::max(1.0, scale));
    }
  }
  return worst;
}

double block_max_abs(const OperatorMatrix& m, const std::vector<int>& indices) {
  double worst = 0.0;
  for (int j : indices)
    for (int i : indices) worst = std::max(worst, std::fabs(m.entries()(i, j)));
  return worst;
}

double sector_leakage(const OperatorMatrix& m) {
  const FockTruncation& t = m.basis();
  double worst = 0.0;
  for (int j = 0; j < m.dim(); ++j) {
    const FockState c = t.state(j);
    for (int i = 0; i < m.dim(); ++i) {
      const FockState r = t.state(i);
      if (r.n_b - r.n_a != c.n_b - c.n_a) worst = std::max(worst, std::fabs(m.entries()(i, j)));
    }
  }
  return worst;
}

Eigen::MatrixXd sector_block(const OperatorMatrix& m, const SectorBasis& s) {
  const auto k = static_cast<Eigen::Index>(s.indices.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m.entries()(s.indices[i], s.indices[j]);
  return out;
}

}  // namespace qmx
