#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmx {

enum class RelationId {
  Backward,
  Forward,
  Difference,
  CompBackward,
  CompForward,
  Recurrence,
  OrthoDegree,
  OrthoVariable,
  Duality,
  DualityXi,
  DualBackward,
  DualForward,
  DualDifference,
  DualCompBackward,
  DualCompForward,
  DualRecurrence,
  GenfunDegree,
  GenfunVariable,
  LimitXi,
  LimitPoly,
};

/// Upper-case registry name, e.g. "DUAL_COMP_FORWARD".
std::string_view relation_name(RelationId id) noexcept;
/// Throws UnknownRelation for names outside the registry.
RelationId parse_relation(std::string_view name);
/// Every relation in registry order.
const std::vector<RelationId>& all_relations();

/// Parameter axes. Each relation sweeps the axes it uses, in the fixed order
/// q, beta, theta, z, tau, n, x.
struct Grid {
  std::vector<double> q{0.4, 0.7, 0.95};
  std::vector<int> beta{1, 2, 4};
  std::vector<double> theta{0.3, 0.7};
  std::vector<int> n{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> x{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> z{0.2, 0.6};
  std::vector<double> tau{0.3, 0.6};
  /// Limit relations use q = 1 - 10^{-k}.
  std::vector<int> k{2, 3, 4};
  /// Limit relations only visit n, x <= limit_max.
  int limit_max = 4;
};

struct GridPoint {
  double q = 0.0;
  int beta = 0;
  double theta = 0.0;
  int n = 0;
  int x = 0;
  double z = 0.0;
  double tau = 0.0;
};

struct PointResult {
  GridPoint point;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  /// |lhs - rhs| / scale; for limit relations, zero when the error sequence
  /// decreases and the worst growth ratio otherwise.
  double rel_residual = 0.0;
  /// Truncation tail of infinite sums in units of the scale; added to the tolerance.
  double tail_budget = 0.0;
  bool domain_violation = false;
  bool passed = false;
  std::string note;
};

struct RelationReport {
  RelationId id;
  double tolerance = 0.0;
  std::vector<PointResult> points;
  /// Over points inside the relation's domain.
  double max_residual = 0.0;
  std::size_t domain_violations = 0;
  bool passed = false;
};

/// Evaluates both sides of one identity at every grid point. Points outside
/// the relation's domain are kept in the report, flagged, and skipped for
/// pass/fail. Throws EmptyGrid when the grid yields no point.
RelationReport check(RelationId id, const Grid& grid, double tol);

struct TolProfile {
  double tol = 1e-9;
  /// Empty means every relation.
  std::vector<RelationId> relations;
  std::optional<Grid> grid;
};

std::vector<RelationReport> check_all(const TolProfile& profile);

/// Errors below this count as exact in q -> 1 limit checks.
inline constexpr double kLimitFloor = 1e-13;

/// Zero when an error sequence over increasing k strictly decreases (entries at
/// or below kLimitFloor are exempt); otherwise the worst growth ratio.
double monotonicity_residual(const std::vector<double>& errors);

}  // namespace qmx
