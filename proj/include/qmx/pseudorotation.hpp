#pragma once

#include "qmx/meixner.hpp"
#include "qmx/oscillator.hpp"
#include "qmx/qseries.hpp"

namespace qmx {

enum class QExpKind { Little, Big };

/// e_q(scale X) or E_q(scale X) for a diagonal or strictly triangular X.
/// Diagonal arguments are exponentiated entrywise through the scalar product
/// forms; nilpotent ones by their finite power series. Anything else is
/// UnsupportedShape.
OperatorMatrix matrix_qexp(const OperatorMatrix& x, QExpKind kind, double scale, const QContext& ctx);

/// Power series sum_k c_k (scale X)^k for an arbitrary X, summed until the
/// term falls below tail_cutoff relative to the sum. NonConvergent past max_terms.
OperatorMatrix matrix_qexp_series(const OperatorMatrix& x, QExpKind kind, double scale, const QContext& ctx);

/// Entrywise square root of a diagonal operator with non-negative entries.
OperatorMatrix sqrt_diagonal(const OperatorMatrix& d);

struct UOperator {
  double theta;
  OperatorMatrix matrix;
  FockTruncation truncation;
  QContext ctx;
};

/// U(theta) = e_q^{1/2}(-theta^2 q^{-A_0}) e_q(theta(1-q) q^{(B_0-A_0+1)/2} A_+B_+)
///            E_q(-theta(1-q) q^{(B_0-A_0+1)/2} A_-B_-) E_q^{1/2}(theta^2 q^{B_0+1}).
/// Throws TruncationTooSmall when either cap is below 4 (no interior left).
UOperator build_U(double theta, const FockTruncation& t, const QContext& ctx);
UOperator build_U(const MatrixElementParams& mp, const FockTruncation& t);

/// Levels excluded at the top of each oscillator: ceil(cap/4).
InteriorBlock u_interior(const FockTruncation& t);

/// <n|_beta U |x>_beta. OutOfBlock unless both states lie in u_interior.
double element(const UOperator& u, int beta, int n, int x);

struct UnitarityResidual {
  double u_udagger;
  double udagger_u;
};

/// Max |(S S^T - I)| and |(S^T S - I)| over sector levels n, n' <= n_block,
/// where S is the beta-sector block of U. U is block diagonal in beta, so the
/// sector block carries the full sums.
UnitarityResidual unitarity_residual(const UOperator& u, int beta, int n_block);

struct IdentityCheck {
  OperatorMatrix lhs;
  OperatorMatrix rhs;
  double residual;
};

/// U^dagger(q^{-1/2} theta) A_- U(theta) against
/// A_- sqrt(1 + theta^2 q^{B_0}) + theta q^{(A_0+B_0)/2} B_+.
IdentityCheck conjugated_lowering(const UOperator& u, const UOperator& u_shifted, InteriorBlock block);

/// U^dagger(theta) A_+ U(q^{-1/2} theta) against
/// A_+ sqrt(1 + theta^2 q^{B_0}) + theta B_- q^{(A_0+B_0)/2}.
IdentityCheck conjugated_raising(const UOperator& u, const UOperator& u_shifted, InteriorBlock block);

/// U(theta) q^{-A_0/2} A_- U^dagger(theta) against
/// q^{-A_0/2} A_- sqrt(1 + theta^2 q^{-A_0}) - theta q^{-A_0} q^{B_0/2} B_+.
IdentityCheck conjugated_lowering_dual(const UOperator& u, InteriorBlock block);

/// U(theta) A_+ q^{-A_0/2} U^dagger(theta) against
/// sqrt(1 + theta^2 q^{-A_0}) A_+ q^{-A_0/2} - theta q^{-A_0} B_- q^{B_0/2}.
IdentityCheck conjugated_raising_dual(const UOperator& u, InteriorBlock block);

/// A_- U(theta) against U(q^{-1/2} theta) R, R the right side of conjugated_lowering.
IdentityCheck intertwined_lowering(const UOperator& u, const UOperator& u_shifted, InteriorBlock block);

/// A_+ U(q^{-1/2} theta) against U(theta) R, R the right side of conjugated_raising.
IdentityCheck intertwined_raising(const UOperator& u, const UOperator& u_shifted, InteriorBlock block);

/// exp(tau (J~_+ - J~_-)), exponentiated one beta-sector block at a time.
OperatorMatrix classical_U(double tau, const FockTruncation& t);

enum class QBchForm {
  /// E_q(lambda X) Y e_q(-lambda q^alpha X), commutators [X,Y]_{n+1} = q^n X C - q^alpha C X.
  First,
  /// e_q(lambda X) Y E_q(-lambda q^alpha X), commutators [X,Y]'_{n+1} = X C - q^{n+alpha} C X.
  Second,
};

/// Residual between the conjugated product and its nested q-commutator
/// series. X must be nilpotent or diagonal. The series stops once a term is
/// below tail_cutoff relative to the sum, or after 60 terms.
double qbch_residual(QBchForm form, const OperatorMatrix& x, const OperatorMatrix& y, double lambda,
                     double alpha, const QContext& ctx, const std::vector<int>& block);

/// For XY = qYX: residual of e_q(X+Y) = e_q(Y) e_q(X) (Little) or
/// E_q(X+Y) = E_q(X) E_q(Y) (Big).
double qexp_sum_residual(QExpKind kind, const OperatorMatrix& x, const OperatorMatrix& y, const QContext& ctx,
                         const std::vector<int>& block);

/// e_q(a A_-B_-) e_q(-a b q^{-B_0-1}/(1-q)^2) e_q(b A_+B_+) against
/// e_q(b A_+B_+) e_q(-a b q^{A_0}/(1-q)^2) e_q(a A_-B_-).
IdentityCheck reorder_little(double a, double b, const Oscillators& osc, const QContext& ctx,
                            InteriorBlock block);

/// E_q(g A_+B_+) E_q(g d q^{-B_0-1}/(1-q)^2) E_q(d A_-B_-) against
/// E_q(d A_-B_-) E_q(g d q^{A_0}/(1-q)^2) E_q(g A_+B_+).
IdentityCheck reorder_big(double g, double d, const Oscillators& osc, const QContext& ctx,
                         InteriorBlock block);

/// E_q(g A_-B_-) e_q(d A_+B_+) against
/// e_q(g d q^{-B_0-1}/(1-q)^2) e_q(d A_+B_+) E_q(g A_-B_-) E_q(-g d q^{A_0}/(1-q)^2).
IdentityCheck reorder_mixed(double g, double d, const Oscillators& osc, const QContext& ctx,
                           InteriorBlock block);

}  // namespace qmx
