#include "qmx/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "qmx/compensated_sum.hpp"
#include "qmx/error.hpp"
#include "qmx/meixner.hpp"
#include "qmx/qseries.hpp"

namespace qmx {

namespace {

constexpr std::array<std::pair<RelationId, std::string_view>, 20> kNames{{
    {RelationId::Backward, "BACKWARD"},
    {RelationId::Forward, "FORWARD"},
    {RelationId::Difference, "DIFFERENCE"},
    {RelationId::CompBackward, "COMP_BACKWARD"},
    {RelationId::CompForward, "COMP_FORWARD"},
    {RelationId::Recurrence, "RECURRENCE"},
    {RelationId::OrthoDegree, "ORTHO_DEGREE"},
    {RelationId::OrthoVariable, "ORTHO_VARIABLE"},
    {RelationId::Duality, "DUALITY"},
    {RelationId::DualityXi, "DUALITY_XI"},
    {RelationId::DualBackward, "DUAL_BACKWARD"},
    {RelationId::DualForward, "DUAL_FORWARD"},
    {RelationId::DualDifference, "DUAL_DIFFERENCE"},
    {RelationId::DualCompBackward, "DUAL_COMP_BACKWARD"},
    {RelationId::DualCompForward, "DUAL_COMP_FORWARD"},
    {RelationId::DualRecurrence, "DUAL_RECURRENCE"},
    {RelationId::GenfunDegree, "GENFUN_DEGREE"},
    {RelationId::GenfunVariable, "GENFUN_VARIABLE"},
    {RelationId::LimitXi, "LIMIT_XI"},
    {RelationId::LimitPoly, "LIMIT_POLY"},
}};

// Two sides of an identity plus what is needed to judge them.
struct Sides {
  double lhs;
  double rhs;
  double scale;  // 0 means max(|lhs|, |rhs|, 1)
  double tail = 0.0;
};

struct DomainViolation {
  std::string why;
};

// M_n(q^{-x}) with beta and c shifted from the base point. An exactly zero
// coefficient skips the evaluation, so M_{-1} never needs a value.
class Family {
 public:
  Family(const GridPoint& p, const QContext& ctx)
      : ctx_(ctx), base_(MeixnerParams::from_beta(p.beta, p.theta * p.theta, ctx)) {}

  double operator()(int n, int x, int dbeta = 0, int dc = 0) const {
    return qmeixner(n, x, base_.shifted(dbeta, dc));
  }

  double term(double coef, int n, int x, int dbeta = 0, int dc = 0) const {
    if (coef == 0.0) return 0.0;
    return coef * (*this)(n, x, dbeta, dc);
  }

 private:
  const QContext& ctx_;
  MeixnerParams base_;
};

// Sums f(0), f(1), ... until three consecutive terms fall below
// tail_cutoff times the reference (running max of |term| or |partial sum|).
struct AdaptiveSum {
  double value;
  double tail;
};

enum class Reference { RunningMax, PartialSum };

AdaptiveSum adaptive_sum(const std::function<double(int)>& f, Reference ref, const QContext& ctx) {
  CompensatedSum sum;
  double largest = 0.0;
  int small_run = 0;
  double last = 0.0;
  double before_last = 0.0;
  for (std::size_t k = 0; k < ctx.max_terms(); ++k) {
    const double t = f(static_cast<int>(k));
    sum += t;
    largest = std::max(largest, std::fabs(t));
    const double r = ref == Reference::RunningMax ? largest : std::fabs(sum.value());
    small_run = std::fabs(t) < ctx.tail_cutoff() * r ? small_run + 1 : 0;
    before_last = last;
    last = t;
    if (small_run >= 3) {
      double ratio = before_last != 0.0 ? std::fabs(last / before_last) : 0.0;
      ratio = std::min(ratio, 0.99);
      return {sum.value(), std::fabs(last) * ratio / (1.0 - ratio)};
    }
  }
  throw Error(Errc::NonConvergent, "adaptive sum exceeded max_terms");
}

using Evaluator = std::function<Sides(const GridPoint&, const QContext&)>;

// ---- contiguous relations in the degree n -------------------------------

Sides backward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = t * ctx.one_minus_pow(b) * m(n + 1, x);
  const double rhs = m.term(ctx.q() * ctx.one_minus_pow(-x) * (1.0 + t * ctx.pow(x + b - 1)), n, x - 1, 1, -1) +
                     t * ctx.one_minus_pow(x + b) * m(n, x, 1, -1);
  return {lhs, rhs, 0.0};
}

Sides forward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = m.term(ctx.one_minus_pow(n) / (t * ctx.pow(x) * ctx.one_minus_pow(b)), n - 1, x, 1, -1);
  const double rhs = m(n, x) - m(n, x + 1);
  return {lhs, rhs, 0.0};
}

Sides difference(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double down = ctx.one_minus_pow(x) * (1.0 + t * ctx.pow(x + b - 1));
  const double up = t * ctx.pow(x) * ctx.one_minus_pow(x + b);
  const double lhs = ctx.one_minus_pow(n) * m(n, x);
  const double rhs = -up * m(n, x + 1) + (down + up) * m(n, x) - m.term(down, n, x - 1);
  return {lhs, rhs, 0.0};
}

Sides comp_backward(const GridPoint& p, const QContext& ctx) {
  if (p.beta < 2) throw DomainViolation{"needs beta >= 2"};
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = m.term(ctx.pow(n + 1) / t * ctx.one_minus_pow(-x) / ctx.one_minus_pow(b - 1), n, x - 1);
  const double rhs = m(n + 1, x, -1) - m(n, x, -1);
  return {lhs, rhs, 0.0};
}

Sides comp_forward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = t * ctx.pow(n) * ctx.one_minus_pow(b) * m(n, x + 1);
  const double rhs = t * ctx.one_minus_pow(n + b) * m(n, x, 1) -
                     m.term((ctx.pow(n) + t) * ctx.one_minus_pow(n), n - 1, x, 1);
  return {lhs, rhs, 0.0};
}

Sides recurrence(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double down = ctx.q() * ctx.one_minus_pow(n) * (ctx.pow(n) + t);
  const double up = t * ctx.one_minus_pow(n + b);
  const double lhs = ctx.pow(2 * n + 1) * ctx.one_minus_pow(-x) * m(n, x);
  const double rhs = m.term(down, n - 1, x) - (down + up) * m(n, x) + up * m(n + 1, x);
  return {lhs, rhs, 0.0};
}

// ---- orthogonality ------------------------------------------------------

Sides ortho_degree(const GridPoint& p, const QContext& ctx) {
  const MatrixElementParams mp(p.theta, p.beta, ctx);
  const Family m(p, ctx);
  const AdaptiveSum s = adaptive_sum([&](int y) { return weight(y, mp) * m(p.n, y) * m(p.x, y); },
                                     Reference::RunningMax, ctx);
  const double nn = norm_factor(p.n, mp);
  const double nx = norm_factor(p.x, mp);
  return {s.value, p.n == p.x ? nn : 0.0, std::sqrt(nn * nx), s.tail};
}

Sides ortho_variable(const GridPoint& p, const QContext& ctx) {
  const MatrixElementParams mp(p.theta, p.beta, ctx);
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  // theta^{2k} q^{-k(k-1)/2} / (-theta^2 q^{-k};q)_k = q^k / (-q/theta^2;q)_k, which stays finite for large k.
  const AdaptiveSum s = adaptive_sum(
      [&](int k) {
        const double w = q_binomial(k + p.beta - 1, k, ctx) * ctx.pow(k) / q_pochhammer(-ctx.q() / t, k, ctx);
        return w * m(k, p.x) * m(k, p.n);
      },
      Reference::RunningMax, ctx);
  const double wx = weight(p.x, mp);
  const double wn = weight(p.n, mp);
  return {s.value, p.n == p.x ? 1.0 / wx : 0.0, 1.0 / std::sqrt(wx * wn), s.tail};
}

// ---- duality ------------------------------------------------------------

Sides duality(const GridPoint& p, const QContext& ctx) {
  const MeixnerParams base = MeixnerParams::from_beta(p.beta, p.theta * p.theta, ctx);
  const DualMeixner d = duality_transform(p.n, p.x, base);
  return {qmeixner(p.n, p.x, base), qmeixner(d.n, d.x, d.params), 0.0};
}

Sides duality_xi(const GridPoint& p, const QContext& ctx) {
  const MatrixElementParams mp(p.theta, p.beta, ctx);
  const DualXi d = duality_transform(p.n, p.x, mp);
  return {xi(p.n, p.x, mp), d.prefactor * xi(d.n, d.x, d.params), 0.0};
}

// ---- contiguous relations in the variable x -----------------------------

Sides dual_backward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = t * ctx.pow(x + 1) * ctx.one_minus_pow(b) * m(n, x + 1);
  const double rhs = t * ctx.pow(x + 1) * ctx.one_minus_pow(n + b) * m(n, x, 1) -
                     m.term(ctx.q() * ctx.one_minus_pow(n) * (1.0 + t * ctx.pow(x + b)), n - 1, x, 1, -1);
  return {lhs, rhs, 0.0};
}

Sides dual_forward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = m.term(ctx.one_minus_pow(-x) / (t * ctx.one_minus_pow(b)), n, x - 1, 1);
  const double rhs = m(n + 1, x, 0, 1) - m(n, x);
  return {lhs, rhs, 0.0};
}

Sides dual_difference(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double down = ctx.one_minus_pow(n) * (1.0 + t * ctx.pow(x + b - 1));
  const double up = t * ctx.pow(x) * ctx.one_minus_pow(n + b);
  const double lhs = ctx.one_minus_pow(x) * m(n, x);
  const double rhs = -m.term(down, n - 1, x, 0, -1) + (down + up) * m(n, x) - up * m(n + 1, x, 0, 1);
  return {lhs, rhs, 0.0};
}

Sides dual_comp_backward(const GridPoint& p, const QContext& ctx) {
  if (p.beta < 2) throw DomainViolation{"needs beta >= 2"};
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = m.term(ctx.q() / t * ctx.one_minus_pow(n) / ctx.one_minus_pow(b - 1), n - 1, x, 0, -1);
  const double rhs = m(n, x, -1) - m(n, x + 1, -1, -1);
  return {lhs, rhs, 0.0};
}

Sides dual_comp_forward(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double lhs = t * ctx.pow(x) * ctx.one_minus_pow(b) * m(n + 1, x, 0, 1);
  const double rhs = t * ctx.one_minus_pow(x + b) * m(n, x, 1) -
                     m.term((ctx.pow(n) + t) * ctx.one_minus_pow(x), n, x - 1, 1, 1);
  return {lhs, rhs, 0.0};
}

Sides dual_recurrence(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const int n = p.n, x = p.x, b = p.beta;
  const double down = ctx.q() * ctx.one_minus_pow(x) * (ctx.pow(n) + t);
  const double up = t * ctx.one_minus_pow(x + b);
  const double lhs = ctx.pow(x + 1) * ctx.one_minus_pow(n) * m(n, x);
  const double rhs = -m.term(down, n, x - 1, 0, 1) + (down + up) * m(n, x) - up * m(n, x + 1, 0, -1);
  return {lhs, rhs, 0.0};
}

// ---- generating functions -----------------------------------------------

Sides genfun_degree(const GridPoint& p, const QContext& ctx) {
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const double z = p.z;
  const double zqb = z * ctx.pow(p.beta);
  const std::array<HyperParam, 1> nums{HyperParam::q_power(-p.x)};
  const std::array<HyperParam, 1> dens{HyperParam::value(zqb)};
  const double phi = basic_hypergeometric(nums, dens, -z * ctx.q() / t, ctx).value;
  const SeriesValue e = little_qexp(z, ctx);
  const SeriesValue big = big_qexp(-zqb, ctx);
  const double lhs = e.value * big.value * phi;

  double coef = 1.0;  // z^k (q^beta;q)_k / (q;q)_k
  int next = 0;
  const AdaptiveSum s = adaptive_sum(
      [&](int k) {
        for (; next < k; ++next) coef *= z * ctx.one_minus_pow(p.beta + next) / ctx.one_minus_pow(next + 1);
        return coef * m(k, p.x);
      },
      Reference::PartialSum, ctx);
  const double tail = s.tail + std::fabs(phi) * (e.tail_estimate * std::fabs(big.value) +
                                                 std::fabs(e.value) * big.tail_estimate);
  return {lhs, s.value, 0.0, tail};
}

Sides genfun_variable(const GridPoint& p, const QContext& ctx) {
  if (std::fabs(p.z) * ctx.pow(-p.n) > 0.9) throw DomainViolation{"needs |z| q^{-n} <= 0.9"};
  const Family m(p, ctx);
  const double t = p.theta * p.theta;
  const double z = p.z;
  const std::array<HyperParam, 2> nums{HyperParam::q_power(-p.n), HyperParam::value(0.0)};
  const std::array<HyperParam, 1> dens{HyperParam::value(ctx.q() / z)};
  const double phi = basic_hypergeometric(nums, dens, -ctx.pow(p.n + 1) / t, ctx).value;
  const double lhs = phi / q_pochhammer(z, p.beta, ctx);

  double coef = 1.0;
  int next = 0;
  const AdaptiveSum s = adaptive_sum(
      [&](int y) {
        for (; next < y; ++next) coef *= z * ctx.one_minus_pow(p.beta + next) / ctx.one_minus_pow(next + 1);
        return coef * m(p.n, y);
      },
      Reference::PartialSum, ctx);
  return {lhs, s.value, 0.0, s.tail};
}

// ---- q -> 1 limits ------------------------------------------------------

PointResult limit_point(RelationId id, const GridPoint& p, const std::vector<int>& ks, const QContext& base) {
  std::vector<double> err;
  std::string note;
  for (int k : ks) {
    const QContext ctx = base.with_q(1.0 - std::pow(10.0, -k));
    double e = 0.0;
    if (id == RelationId::LimitXi) {
      const MatrixElementParams mp(std::sinh(p.tau), p.beta, ctx);
      e = std::fabs(xi(p.n, p.x, mp) - classical_xi_limit(p.n, p.x, p.beta, p.tau));
    } else {
      const double c = std::tanh(p.tau) * std::tanh(p.tau);
      const MeixnerParams mq = MeixnerParams::from_beta(p.beta, c / (1.0 - c), ctx);
      e = std::fabs(qmeixner(p.n, p.x, mq) - classical_meixner(p.n, p.x, p.beta, c));
    }
    err.push_back(e);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%sk=%d:%.3e", note.empty() ? "" : " ", k, e);
    note += buf;
  }
  PointResult r;
  r.point = p;
  r.lhs = err.back();
  r.rhs = err.front();
  r.abs_residual = err.back();
  r.rel_residual = monotonicity_residual(err);
  r.note = note;
  return r;
}

struct RelationDef {
  Evaluator eval;
  bool uses_theta = true;
  bool uses_z = false;
};

RelationDef def_for(RelationId id) {
  switch (id) {
    case RelationId::Backward: return {backward};
    case RelationId::Forward: return {forward};
    case RelationId::Difference: return {difference};
    case RelationId::CompBackward: return {comp_backward};
    case RelationId::CompForward: return {comp_forward};
    case RelationId::Recurrence: return {recurrence};
    case RelationId::OrthoDegree: return {ortho_degree};
    case RelationId::OrthoVariable: return {ortho_variable};
    case RelationId::Duality: return {duality};
    case RelationId::DualityXi: return {duality_xi};
    case RelationId::DualBackward: return {dual_backward};
    case RelationId::DualForward: return {dual_forward};
    case RelationId::DualDifference: return {dual_difference};
    case RelationId::DualCompBackward: return {dual_comp_backward};
    case RelationId::DualCompForward: return {dual_comp_forward};
    case RelationId::DualRecurrence: return {dual_recurrence};
    case RelationId::GenfunDegree: return {genfun_degree, true, true};
    case RelationId::GenfunVariable: return {genfun_variable, true, true};
    case RelationId::LimitXi:
    case RelationId::LimitPoly: return {nullptr, false, false};
  }
  throw Error(Errc::UnknownRelation, "unregistered relation");
}

bool is_limit(RelationId id) { return id == RelationId::LimitXi || id == RelationId::LimitPoly; }

std::vector<GridPoint> points_for(RelationId id, const Grid& g) {
  std::vector<GridPoint> out;
  if (is_limit(id)) {
    if (g.k.empty()) return out;
    for (int b : g.beta)
      for (double tau : g.tau)
        for (int n : g.n)
          for (int x : g.x)
            if (n <= g.limit_max && x <= g.limit_max) out.push_back({0.0, b, 0.0, n, x, 0.0, tau});
    return out;
  }
  const RelationDef s = def_for(id);
  const std::vector<double> zs = s.uses_z ? g.z : std::vector<double>{0.0};
  for (double q : g.q)
    for (int b : g.beta)
      for (double th : g.theta)
        for (double z : zs)
          for (int n : g.n)
            for (int x : g.x) out.push_back({q, b, th, n, x, z, 0.0});
  return out;
}

}  // namespace

std::string_view relation_name(RelationId id) noexcept {
  for (const auto& [rid, name] : kNames)
    if (rid == id) return name;
  return "UNKNOWN";
}

RelationId parse_relation(std::string_view name) {
  for (const auto& [rid, n] : kNames)
    if (n == name) return rid;
  throw Error(Errc::UnknownRelation, "no relation named '" + std::string(name) + "'");
}

const std::vector<RelationId>& all_relations() {
  static const std::vector<RelationId> ids = [] {
    std::vector<RelationId> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return ids;
}

RelationReport check(RelationId id, const Grid& grid, double tol) {
  const std::vector<GridPoint> points = points_for(id, grid);
  if (points.empty()) {
    throw Error(Errc::EmptyGrid, "grid yields no point for " + std::string(relation_name(id)));
  }
  RelationReport report{id, tol, {}, 0.0, 0, true};
  const QContext base(0.5);
  const RelationDef def = def_for(id);

  for (const GridPoint& p : points) {
    PointResult r;
    if (is_limit(id)) {
      r = limit_point(id, p, grid.k, base);
    } else {
      r.point = p;
      try {
        const QContext ctx(p.q);
        const Sides s = def.eval(p, ctx);
        const double scale = s.scale > 0.0 ? s.scale : std::max({std::fabs(s.lhs), std::fabs(s.rhs), 1.0});
        r.lhs = s.lhs;
        r.rhs = s.rhs;
        r.abs_residual = std::fabs(s.lhs - s.rhs);
        r.rel_residual = r.abs_residual / scale;
        r.tail_budget = s.tail / scale;
      } catch (const DomainViolation& v) {
        r.domain_violation = true;
        r.note = v.why;
      }
    }
    if (r.domain_violation) {
      ++report.domain_violations;
      r.passed = false;
    } else {
      r.passed = r.rel_residual <= tol + r.tail_budget;
      report.max_residual = std::max(report.max_residual, r.rel_residual);
      report.passed = report.passed && r.passed;
    }
    report.points.push_back(std::move(r));
  }
  if (report.domain_violations == report.points.size()) report.passed = false;
  return report;
}

double monotonicity_residual(const std::vector<double>& errors) {
  double worst = 0.0;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] <= kLimitFloor || errors[i] < errors[i - 1]) continue;
    worst = std::max(worst, errors[i - 1] > 0.0 ? errors[i] / errors[i - 1] : 1.0);
  }
  return worst;
}

std::vector<RelationReport> check_all(const TolProfile& profile) {
  const Grid grid = profile.grid.value_or(Grid{});
  const std::vector<RelationId>& ids = profile.relations.empty() ? all_relations() : profile.relations;
  std::vector<RelationReport> out;
  out.reserve(ids.size());
  for (RelationId id : ids) out.push_back(check(id, grid, profile.tol));
  return out;
}

}  // namespace qmx
