#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qmx/error.hpp"
#include "qmx/pseudorotation.hpp"

using namespace qmx;
using doctest::Approx;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no qmx::Error thrown");
  return Errc::InvalidArgument;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("matrix q-exponentials") {
  const QContext ctx(0.5);
  const FockTruncation t(6, 6);
  const Oscillators o = build_oscillators(t, ctx);
  const OperatorMatrix id = OperatorMatrix::identity(t);

  CHECK(matrix_qexp(OperatorMatrix::zero(t), QExpKind::Little, 1.0, ctx).entries().isIdentity(0.0));
  CHECK(matrix_qexp(OperatorMatrix::zero(t), QExpKind::Big, 1.0, ctx).entries().isIdentity(0.0));

  SUBCASE("little and big with opposite scales are inverse for nilpotent arguments") {
    const OperatorMatrix x = o.Ap * o.Bp;
    for (double s : {0.3, -0.7, 1.5}) {
      const OperatorMatrix e = matrix_qexp(x, QExpKind::Little, s, ctx);
      const OperatorMatrix big = matrix_qexp(x, QExpKind::Big, -s, ctx);
      const double scale = e.entries().cwiseAbs().rowwise().sum().maxCoeff() * big.entries().cwiseAbs().colwise().sum().maxCoeff();
      CHECK(max_abs((e * big).entries() - id.entries()) <= 1e-15 * scale);
    }
  }
  SUBCASE("single-entry nilpotent argument") {
    const FockTruncation small(1, 1);
    const Oscillators so = build_oscillators(small, ctx);
    const OperatorMatrix x = so.Ap;  // one entry, x^2 = 0
    const OperatorMatrix e = matrix_qexp(x, QExpKind::Little, 0.8, ctx);
    const Eigen::MatrixXd want = Eigen::MatrixXd::Identity(4, 4) + 0.8 / (1 - 0.5) * x.entries();
    CHECK(max_abs(e.entries() - want) <= 1e-15);
  }
  SUBCASE("diagonal arguments use the scalar functions") {
    const OperatorMatrix d = OperatorMatrix::diagonal(t, [&](int a, int b) { return ctx.pow(a) - 0.1 * b; });
    const OperatorMatrix e = matrix_qexp(d, QExpKind::Little, 0.4, ctx);
    const OperatorMatrix big = matrix_qexp(d, QExpKind::Big, 0.4, ctx);
    for (int i = 0; i < t.dim(); ++i) {
      const double z = 0.4 * d.entries()(i, i);
      CHECK(e.entries()(i, i) == Approx(little_qexp(z, ctx).value).epsilon(1e-14));
      CHECK(big.entries()(i, i) == Approx(big_qexp(z, ctx).value).epsilon(1e-14));
    }
  }
  SUBCASE("series form agrees on nilpotent arguments") {
    const OperatorMatrix x = o.Am * o.Bm;
    for (QExpKind k : {QExpKind::Little, QExpKind::Big}) {
      const OperatorMatrix a = matrix_qexp(x, k, 0.6, ctx);
      const OperatorMatrix b = matrix_qexp_series(x, k, 0.6, ctx);
      CHECK(max_abs(a.entries() - b.entries()) <= 1e-12 * max_abs(a.entries()));
    }
  }
  CHECK(code_of([&] { matrix_qexp(o.Ap + o.Am, QExpKind::Little, 0.1, ctx); }) == Errc::UnsupportedShape);
  CHECK(code_of([&] { sqrt_diagonal(-1.0 * id); }) == Errc::DomainViolation);
  CHECK(sqrt_diagonal(4.0 * id).entries().isApprox(2.0 * id.entries()));
}

TEST_CASE("building U") {
  const QContext ctx(0.5);
  const FockTruncation t(16, 16);
  CHECK(code_of([&] { build_U(0.5, FockTruncation(3, 8), ctx); }) == Errc::TruncationTooSmall);

  const UOperator zero = build_U(0.0, t, ctx);
  CHECK(max_abs(zero.matrix.entries() - Eigen::MatrixXd::Identity(t.dim(), t.dim())) <= 1e-15);

  const UOperator u = build_U(0.5, t, ctx);
  CHECK(sector_leakage(u.matrix) <= 1e-12);
  CHECK(element(u, 1, 0, 0) == Approx(1.0 / std::sqrt(1.25)).epsilon(1e-12));
  for (int beta : {1, 2, 3}) {
    CHECK(element(u, beta, 0, 0) == Approx(xi(0, 0, MatrixElementParams(0.5, beta, ctx))).epsilon(1e-12));
  }
  const InteriorBlock in = u_interior(t);
  CHECK(in.a_max == 12);
  CHECK(code_of([&] { element(u, 1, 0, 13); }) == Errc::OutOfBlock);
}

TEST_CASE("operator elements match the closed form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uth(-0.8, 0.8);
  for (double q : {0.4, 0.6}) {
    const QContext ctx(q);
    const FockTruncation t(20, 20);
    for (int rep = 0; rep < 2; ++rep) {
      const double theta = uth(rng);
      const UOperator u = build_U(theta, t, ctx);
      for (int beta : {1, 2, 3}) {
        const MatrixElementParams mp(theta, beta, ctx);
        for (int n = 0; n <= 7; ++n)
          for (int x = 0; x <= 7; ++x) CHECK(std::fabs(element(u, beta, n, x) - xi(n, x, mp)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("rows of U are orthonormal") {
  const QContext ctx(0.5);
  const UOperator u = build_U(0.6, FockTruncation(24, 24), ctx);
  for (int beta : {1, 2, 3}) CHECK(unitarity_residual(u, beta, 8).u_udagger <= 1e-9);
}

TEST_CASE("conjugation identities") {
  const QContext ctx(0.5);
  const FockTruncation t(16, 16);
  const InteriorBlock blk{6, 6};

  SUBCASE("theta = 0 reduces to the bare operators") {
    const UOperator u = build_U(0.0, t, ctx);
    const Oscillators o = build_oscillators(t, ctx);
    const auto idx = block_indices(t, blk);
    const IdentityCheck l = conjugated_lowering(u, u, blk);
    CHECK(l.residual <= 1e-15);
    CHECK(identity_residual({l.lhs, -1.0 * o.Am}, idx) <= 1e-15);
    CHECK(conjugated_raising(u, u, blk).residual <= 1e-15);
    CHECK(conjugated_lowering_dual(u, blk).residual <= 1e-15);
    CHECK(conjugated_raising_dual(u, blk).residual <= 1e-15);
  }
  SUBCASE("right side on the ground state is the pure B_+ term") {
    const double theta = 0.5;
    const UOperator u = build_U(theta, t, ctx);
    const UOperator us = build_U(theta / std::sqrt(ctx.q()), t, ctx);
    const IdentityCheck l = conjugated_lowering(u, us, blk);
    const int g = t.index(0, 0);
    const Eigen::VectorXd col = l.rhs.entries().col(g);
    CHECK(col(t.index(0, 1)) == Approx(theta).epsilon(1e-14));
    CHECK(col.cwiseAbs().sum() == Approx(theta).epsilon(1e-14));
  }
  SUBCASE("U X U^dagger forms and the intertwined forms hold") {
    const FockTruncation big(24, 24);
    for (double theta : {0.3, -0.5}) {
      const UOperator u = build_U(theta, big, ctx);
      const UOperator us = build_U(theta / std::sqrt(ctx.q()), big, ctx);
      const InteriorBlock b{8, 8};
      CHECK(conjugated_lowering_dual(u, b).residual <= 1e-9);
      CHECK(conjugated_raising_dual(u, b).residual <= 1e-9);
      CHECK(intertwined_lowering(u, us, b).residual <= 1e-9);
      CHECK(intertwined_raising(u, us, b).residual <= 1e-9);
    }
  }
}

TEST_CASE("classical pseudorotation") {
  const FockTruncation t(24, 24);
  CHECK(max_abs(classical_U(0.0, t).entries() - Eigen::MatrixXd::Identity(t.dim(), t.dim())) <= 1e-15);
  const OperatorMatrix u = classical_U(0.4, t);
  const Eigen::MatrixXd s1 = sector_block(u, sector(t, 1));
  CHECK(s1(0, 0) == Approx(1.0 / std::cosh(0.4)).epsilon(1e-10));
  for (int beta : {1, 2}) {
    const Eigen::MatrixXd s = sector_block(u, sector(t, beta));
    for (int n = 0; n <= 6; ++n)
      for (int x = 0; x <= 6; ++x) CHECK(std::fabs(s(n, x) - classical_xi_limit(n, x, beta, 0.4)) <= 1e-8);
  }
  const Eigen::MatrixXd top = s1.topRows(10);
  CHECK(max_abs(top * top.transpose() - Eigen::MatrixXd::Identity(10, 10)) <= 1e-12);
}

TEST_CASE("q-BCH expansions and the exponential sum rule") {
  for (double q : {0.5, 0.9}) {
    const QContext ctx(q);
    const FockTruncation t(20, 20);
    const Oscillators o = build_oscillators(t, ctx);
    const auto blk = block_indices(t, interior_with_margin(t, 5));
    const OperatorMatrix w = OperatorMatrix::diagonal(t, [&](int a, int b) { return (1 - q) * ctx.pow(0.5 * (b - a + 1)); });
    const OperatorMatrix x = w * (o.Ap * o.Bp);
    for (double lambda : {0.3, -0.3}) {
      CHECK(qbch_residual(QBchForm::First, x, o.A0, lambda, 0.3, ctx, blk) <= 1e-10);
      CHECK(qbch_residual(QBchForm::Second, x, o.A0, lambda, -0.3, ctx, blk) <= 1e-10);
    }
    const OperatorMatrix qa = OperatorMatrix::diagonal(t, [&](int a, int) { return 0.3 * ctx.pow(a); });
    const OperatorMatrix ap = 0.3 * o.Ap;
    CHECK(qexp_sum_residual(QExpKind::Little, qa, ap, ctx, blk) <= 1e-10);
    CHECK(qexp_sum_residual(QExpKind::Big, qa, ap, ctx, blk) <= 1e-10);
  }
}

TEST_CASE("reordering identities") {
  SUBCASE("small parameters on a small block") {
    const QContext ctx(0.5);
    const FockTruncation t(20, 20);
    const Oscillators o = build_oscillators(t, ctx);
    const InteriorBlock b{3, 3};
    CHECK(reorder_little(0.01, 0.01, o, ctx, b).residual <= 1e-9);
    CHECK(reorder_big(0.01, -0.01, o, ctx, b).residual <= 1e-9);
    CHECK(reorder_mixed(0.01, -0.01, o, ctx, b).residual <= 1e-9);
  }
  SUBCASE("ground-state entry carries the boundary term e_q(-c) e_q(-q/c)") {
    const QContext ctx(0.5);
    const FockTruncation t(40, 40);
    const Oscillators o = build_oscillators(t, ctx);
    const double a = 0.3;
    const double c = a * a / ((1 - 0.5) * (1 - 0.5));
    const IdentityCheck r = reorder_little(a, a, o, ctx, {5, 5});
    const double e = little_qexp(-c, ctx).value;
    const double boundary = e * little_qexp(-0.5 / c, ctx).value;
    CHECK(r.lhs.entries()(0, 0) == Approx(e - boundary).epsilon(1e-10));
    CHECK(r.rhs.entries()(0, 0) == Approx(e).epsilon(1e-10));
  }
}
