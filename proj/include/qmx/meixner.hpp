#pragma once

#include <optional>

#include "qmx/qseries.hpp"

namespace qmx {

/// Parameters (b, c) of the q-Meixner family M_n(q^{-x}; b, c; q).
///
/// c is held as c_base * q^{c_shift} with an integer shift so that the
/// duality map c -> c q^{x-n} and the parameter drift in the contiguous
/// relations (c/q, c q) stay exact and reversible.
class MeixnerParams {
 public:
  /// Real b in (0,1), c > 0. Throws InvalidArgument otherwise.
  static MeixnerParams from_b(double b, double c, const QContext& ctx);
  /// Integer beta >= 1, b = q^{beta-1}, c > 0. Throws InvalidArgument otherwise.
  static MeixnerParams from_beta(int beta, double c, const QContext& ctx);

  double b() const;
  double c() const { return c_base_ * ctx_.pow(c_shift_); }
  std::optional<int> beta() const { return beta_; }
  double c_base() const noexcept { return c_base_; }
  int c_shift() const noexcept { return c_shift_; }
  const QContext& ctx() const noexcept { return ctx_; }

  /// The denominator parameter bq of the defining 2phi1.
  HyperParam bq() const;

  /// b -> b q^{db} (beta -> beta + db), c -> c q^{dc}.
  MeixnerParams shifted(int db, int dc) const;

  friend bool operator==(const MeixnerParams&, const MeixnerParams&) = default;

 private:
  MeixnerParams(std::optional<int> beta, double b, double c_base, int c_shift, const QContext& ctx)
      : beta_(beta), b_(b), c_base_(c_base), c_shift_(c_shift), ctx_(ctx) {}

  std::optional<int> beta_;
  double b_;
  double c_base_;
  int c_shift_;
  QContext ctx_;
};

/// Signed theta and sector label beta of the pseudorotation matrix elements.
/// theta is held as theta_base * q^{half_shift/2}; see MeixnerParams.
///
/// theta == 0 is accepted and describes U = identity: xi reduces to a
/// Kronecker delta. weight, norm_factor and meixner_params need theta != 0.
class MatrixElementParams {
 public:
  MatrixElementParams(double theta, int beta, const QContext& ctx);

  double theta() const { return theta_base_ * ctx_.pow(0.5 * half_shift_); }
  double theta_sq() const { return theta_base_ * theta_base_ * ctx_.pow(half_shift_); }
  int beta() const noexcept { return beta_; }
  const QContext& ctx() const noexcept { return ctx_; }

  /// theta -> sign * theta * q^{half_shift/2}.
  MatrixElementParams transformed(int sign, int half_shift) const;

  /// (b, c) = (q^{beta-1}, theta^2), with the q-shift of theta carried over.
  MeixnerParams meixner_params() const;

  friend bool operator==(const MatrixElementParams&, const MatrixElementParams&) = default;

 private:
  double theta_base_;
  int half_shift_ = 0;
  int beta_;
  QContext ctx_;
};

/// M_n(q^{-x}; b, c; q), summed exactly over gamma = 0..min(n, x).
double qmeixner(int n, int x, const MeixnerParams& p);

/// omega_x = theta^{2x} [x+beta-1, x]_q q^{x(x-1)/2} / (-theta^2; q)_{x+beta}.
double weight(int x, const MatrixElementParams& mp);

/// sum_x omega_x M_n(q^{-x})^2, in closed form:
/// q^{n(n-1)/2} theta^{-2n} (q;q)_n (-theta^2 q^{-n};q)_n (q;q)_{beta-1} / (q;q)_{n+beta-1}.
double norm_factor(int n, const MatrixElementParams& mp);

/// Closed-form matrix element xi_{n,x}^{(beta)}(theta) = <n|_beta U(theta) |x>_beta.
double xi(int n, int x, const MatrixElementParams& mp);

struct DualMeixner {
  int n;
  int x;
  MeixnerParams params;
};

/// (n, x, c) -> (x, n, c q^{x-n}); M_n(q^{-x}; b, c) = M_x(q^{-n}; b, c q^{x-n}).
DualMeixner duality_transform(int n, int x, const MeixnerParams& p);

struct DualXi {
  int n;
  int x;
  MatrixElementParams params;
  double prefactor;
};

/// xi_{n,x}(theta) = prefactor * xi_{x,n}(theta'), with prefactor q^{(n-x)/2}
/// and theta' = -theta q^{(x-n)/2}.
DualXi duality_transform(int n, int x, const MatrixElementParams& mp);

/// Classical Meixner polynomial sum_g (-n)_g (-x)_g / ((beta)_g g!) (1 - 1/c)^g.
/// Requires beta > 0 and 0 < c < 1.
double classical_meixner(int n, int x, double beta, double c);

/// q -> 1 limit of xi with theta = sinh(tau):
/// (-1)^x C(n+beta-1,n)^{1/2} C(x+beta-1,x)^{1/2} tanh^{n+x}(tau) cosh^{-beta}(tau) M_n(x; beta, tanh^2 tau).
/// Finite at tau = 0, where it reduces to the Kronecker delta.
double classical_xi_limit(int n, int x, double beta, double tau);

}  // namespace qmx
