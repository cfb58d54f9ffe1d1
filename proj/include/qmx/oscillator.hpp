#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "qmx/qseries.hpp"

namespace qmx {

struct FockState {
  int n_a;
  int n_b;
  friend bool operator==(const FockState&, const FockState&) = default;
};

/// Product of two truncated Fock spaces, n_a <= n_a_max and n_b <= n_b_max.
/// Index layout: index = n_a * (n_b_max + 1) + n_b.
class FockTruncation {
 public:
  /// Throws InvalidArgument unless both caps are >= 1.
  FockTruncation(int n_a_max, int n_b_max);

  int n_a_max() const noexcept { return n_a_max_; }
  int n_b_max() const noexcept { return n_b_max_; }
  int dim() const noexcept { return (n_a_max_ + 1) * (n_b_max_ + 1); }

  bool contains(int n_a, int n_b) const noexcept {
    return n_a >= 0 && n_b >= 0 && n_a <= n_a_max_ && n_b <= n_b_max_;
  }
  /// Throws OutOfTruncation for states outside the truncation.
  int index(int n_a, int n_b) const;
  FockState state(int index) const;

  friend bool operator==(const FockTruncation&, const FockTruncation&) = default;

 private:
  int n_a_max_;
  int n_b_max_;
};

/// Dense real operator on a truncated product space.
class OperatorMatrix {
 public:
  OperatorMatrix(FockTruncation basis, Eigen::MatrixXd entries);

  static OperatorMatrix identity(const FockTruncation& t);
  static OperatorMatrix zero(const FockTruncation& t);
  /// Diagonal operator with entries f(n_a, n_b).
  static OperatorMatrix diagonal(const FockTruncation& t, const std::function<double(int, int)>& f);

  const FockTruncation& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  int dim() const noexcept { return basis_.dim(); }

  /// <row| M |col>.
  double operator()(FockState row, FockState col) const;

  OperatorMatrix adjoint() const { return {basis_, entries_.transpose()}; }

  bool is_diagonal() const;
  /// Strictly lower triangular in index order: every entry maps to a higher index.
  bool is_strictly_lower() const;
  bool is_strictly_upper() const;

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return {a.basis_, s * a.entries_}; }

 private:
  FockTruncation basis_;
  Eigen::MatrixXd entries_;
};

/// A_0, A_+, A_-, B_0, B_+, B_- on the product space. Raising operators
/// annihilate the top level of their oscillator.
struct Oscillators {
  OperatorMatrix A0, Ap, Am, B0, Bp, Bm;
};

Oscillators build_oscillators(const FockTruncation& t, const QContext& ctx);

struct SuGenerators {
  OperatorMatrix J0, Jp, Jm;
};

/// J_0 = (A_0 + B_0 + 1)/2, J_+- = q^{(B_0 - A_0 + 2)/2} A_+- B_+-.
SuGenerators build_J(const Oscillators& osc, const QContext& ctx);
SuGenerators build_J(const FockTruncation& t, const QContext& ctx);

/// Ordinary boson counterparts at q = 1, with J~_+- = A~_+- B~_+-.
struct ClassicalOperators {
  OperatorMatrix A0, Ap, Am, B0, Bp, Bm, J0, Jp, Jm;
};

ClassicalOperators build_classical(const FockTruncation& t);

/// States |n>_beta = |n, n+beta-1> inside the truncation, ordered by n.
struct SectorBasis {
  int beta;
  std::vector<int> indices;
};

/// Throws InvalidArgument for beta < 1 and EmptySector when no state fits.
SectorBasis sector(const FockTruncation& t, int beta);

enum class Ladder { Lowering, Raising };

struct LadderAction {
  double coefficient;
  /// Sector label n of the image; empty when the image is zero.
  std::optional<int> target;
};

/// (A_-B_-)^mu |x>_beta or (A_+B_+)^mu |x>_beta in closed form.
/// Throws OutOfTruncation when the source or image state leaves the truncation.
LadderAction ladder_power_action(Ladder which, int power, int x, int beta, const FockTruncation& t,
                                 const QContext& ctx);

/// Inclusive cut n_a <= a_max, n_b <= b_max used to exclude truncation edges.
struct InteriorBlock {
  int a_max;
  int b_max;
};

/// Interior block that drops `margin` levels at the top of each oscillator.
InteriorBlock interior_with_margin(const FockTruncation& t, int margin);

std::vector<int> block_indices(const FockTruncation& t, InteriorBlock block);

/// Entrywise residual of sum(terms) = 0 on the block: the largest
/// |sum_k T_k(i,j)| / max(1, sum_k |T_k(i,j)|).
double identity_residual(const std::vector<OperatorMatrix>& terms, const std::vector<int>& indices);

/// Largest |M(i,j)| with i, j in the block.
double block_max_abs(const OperatorMatrix& m, const std::vector<int>& indices);

/// Largest entry connecting states with different n_b - n_a.
double sector_leakage(const OperatorMatrix& m);

/// Submatrix <n|_beta M |x>_beta over the sector basis.
Eigen::MatrixXd sector_block(const OperatorMatrix& m, const SectorBasis& s);

}  // namespace qmx
