#include "qmx/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qmx/error.hpp"
#include "qmx/meixner.hpp"
#include "qmx/pseudorotation.hpp"
#include "qmx/verify.hpp"

namespace qmx::cli {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

using Field = std::variant<long long, double, std::string>;

struct Record {
  std::vector<Field> params;
  std::vector<double> values;
  std::vector<double> residuals;
};

// One command's output: column names plus rows.
struct Table {
  std::string command;
  std::vector<std::string> param_names;
  std::vector<std::string> value_names;
  std::vector<std::string> residual_names;
  std::vector<std::pair<std::string, Field>> metadata;
  std::vector<Record> records;
};

std::string csv_field(const Field& f) {
  if (const auto* i = std::get_if<long long>(&f)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&f)) return format_double(*d);
  return std::get<std::string>(f);
}

nlohmann::ordered_json json_field(const Field& f) {
  if (const auto* i = std::get_if<long long>(&f)) return *i;
  if (const auto* d = std::get_if<double>(&f)) return *d;
  return std::get<std::string>(f);
}

void write_csv(const Table& t, std::ostream& out) {
  std::vector<std::string> header = t.param_names;
  header.insert(header.end(), t.value_names.begin(), t.value_names.end());
  header.insert(header.end(), t.residual_names.begin(), t.residual_names.end());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const Record& r : t.records) {
    std::string line;
    for (const Field& f : r.params) line += csv_field(f) + ",";
    for (double v : r.values) line += format_double(v) + ",";
    for (double v : r.residuals) line += format_double(v) + ",";
    if (!line.empty()) line.pop_back();
    out << line << '\n';
  }
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["command"] = t.command;
  nlohmann::ordered_json meta;
  meta["version"] = kVersion;
  for (const auto& [k, v] : t.metadata) meta[k] = json_field(v);
  doc["metadata"] = meta;
  doc["columns"] = {{"params", t.param_names}, {"values", t.value_names}, {"residuals", t.residual_names}};
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const Record& r : t.records) {
    nlohmann::ordered_json rec;
    nlohmann::ordered_json params;
    for (std::size_t i = 0; i < r.params.size(); ++i) params[t.param_names[i]] = json_field(r.params[i]);
    rec["params"] = params;
    rec["values"] = r.values;
    if (!t.residual_names.empty()) rec["residuals"] = r.residuals;
    recs.push_back(std::move(rec));
  }
  doc["records"] = std::move(recs);
  out << doc.dump(2) << '\n';
}

void emit(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    write_json(t, out);
  } else {
    write_csv(t, out);
  }
}

// Flags shared by the subcommands.
struct Common {
  double q = 0.5;
  int beta = 1;
  double b = 0.0;
  double theta = 0.0;
  double c = 0.0;
  int nmax = 5;
  int xmax = 5;
  int trunc = 0;
  double tol = 1e-9;
  std::string format = "csv";
  CLI::Option* beta_opt = nullptr;
  CLI::Option* b_opt = nullptr;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* c_opt = nullptr;
};

void add_format(CLI::App* app, Common& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_family_params(CLI::App* app, Common& o) {
  app->add_option("--q", o.q, "Base q in (0,1)");
  o.beta_opt = app->add_option("--beta", o.beta, "Integer beta >= 1 (b = q^{beta-1})");
  o.b_opt = app->add_option("--b", o.b, "Real b in (0,1)");
  o.beta_opt->excludes(o.b_opt);
  o.theta_opt = app->add_option("--theta", o.theta, "Signed theta (c = theta^2)");
  o.c_opt = app->add_option("--c", o.c, "c > 0");
  o.theta_opt->excludes(o.c_opt);
}

void add_ranges(CLI::App* app, Common& o) {
  app->add_option("--nmax", o.nmax, "Largest degree / row")->check(CLI::NonNegativeNumber);
  app->add_option("--xmax", o.xmax, "Largest variable / column")->check(CLI::NonNegativeNumber);
}

double c_value(const Common& o) {
  if (o.c_opt->count()) return o.c;
  if (o.theta_opt->count()) return o.theta * o.theta;
  throw Error(Errc::InvalidArgument, "one of --theta or --c is required");
}

double theta_value(const Common& o) {
  if (o.theta_opt->count()) return o.theta;
  if (o.c_opt->count()) {
    if (!(o.c >= 0.0)) throw Error(Errc::InvalidArgument, "c must be non-negative");
    return std::sqrt(o.c);
  }
  throw Error(Errc::InvalidArgument, "one of --theta or --c is required");
}

std::string echo(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

// ---- tabulate -------------------------------------------------------------

int cmd_tabulate(const Common& o, const std::string& family, const std::string& command, std::ostream& out) {
  Table t{command, {"n", "x"}, {"value"}, {}, {{"family", family}, {"q", o.q}}, {}};
  if (family == "classical") {
    const double beta = o.b_opt->count() ? o.b : static_cast<double>(o.beta);
    const double c = c_value(o);
    t.metadata.emplace_back("beta", beta);
    t.metadata.emplace_back("c", c);
    for (int n = 0; n <= o.nmax; ++n)
      for (int x = 0; x <= o.xmax; ++x)
        t.records.push_back({{Field{n * 1LL}, Field{x * 1LL}}, {classical_meixner(n, x, beta, c)}, {}});
  } else {
    const QContext ctx(o.q);
    const double c = c_value(o);
    const MeixnerParams p =
        o.b_opt->count() ? MeixnerParams::from_b(o.b, c, ctx) : MeixnerParams::from_beta(o.beta, c, ctx);
    t.metadata.emplace_back("b", p.b());
    t.metadata.emplace_back("c", c);
    for (int n = 0; n <= o.nmax; ++n)
      for (int x = 0; x <= o.xmax; ++x) t.records.push_back({{Field{n * 1LL}, Field{x * 1LL}}, {qmeixner(n, x, p)}, {}});
  }
  emit(t, o.format, out);
  return kOk;
}

// ---- xi -------------------------------------------------------------------

int cmd_xi(const Common& o, const std::string& source, const std::string& command, std::ostream& out) {
  if (o.b_opt->count()) throw Error(Errc::InvalidArgument, "xi needs an integer --beta, not --b");
  const QContext ctx(o.q);
  const double theta = theta_value(o);
  const MatrixElementParams mp(theta, o.beta, ctx);
  const int span = std::max(o.nmax, o.xmax);
  const int trunc = o.trunc > 0 ? o.trunc : std::max(24, 2 * span);
  const bool want_closed = source != "operator";
  const bool want_operator = source != "closed";

  std::optional<UOperator> u;
  if (want_operator) {
    if (trunc < 2 * span) {
      throw Error(Errc::TruncationTooSmall,
                  "--trunc " + std::to_string(trunc) + " is below 2*max(nmax, xmax) = " + std::to_string(2 * span));
    }
    u = build_U(mp, FockTruncation(trunc, trunc));
  }

  Table t{command, {"n", "x"}, {}, {}, {{"q", o.q}, {"beta", o.beta * 1LL}, {"theta", theta}}, {}};
  if (want_operator) t.metadata.emplace_back("trunc", trunc * 1LL);
  if (want_closed) t.value_names.push_back("closed");
  if (want_operator) t.value_names.push_back("operator");
  if (want_closed && want_operator) t.residual_names.push_back("discrepancy");

  for (int n = 0; n <= o.nmax; ++n) {
    for (int x = 0; x <= o.xmax; ++x) {
      Record r{{Field{n * 1LL}, Field{x * 1LL}}, {}, {}};
      double closed = 0.0;
      double op = 0.0;
      if (want_closed) r.values.push_back(closed = xi(n, x, mp));
      if (want_operator) r.values.push_back(op = element(*u, o.beta, n, x));
      if (want_closed && want_operator) r.residuals.push_back(std::fabs(closed - op));
      t.records.push_back(std::move(r));
    }
  }
  emit(t, o.format, out);
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyFlags {
  std::vector<std::string> relations;
  std::vector<double> q;
  std::vector<int> beta;
  std::vector<double> theta;
};

int cmd_verify(const Common& o, const VerifyFlags& f, bool n_given, bool x_given, const std::string& command,
               std::ostream& out, std::ostream& err) {
  TolProfile profile;
  profile.tol = o.tol;
  for (const std::string& name : f.relations) profile.relations.push_back(parse_relation(name));
  Grid grid;
  if (!f.q.empty()) grid.q = f.q;
  if (!f.beta.empty()) grid.beta = f.beta;
  if (!f.theta.empty()) grid.theta = f.theta;
  auto range = [](int top) {
    std::vector<int> v;
    for (int i = 0; i <= top; ++i) v.push_back(i);
    return v;
  };
  if (n_given) grid.n = range(o.nmax);
  if (x_given) grid.x = range(o.xmax);
  profile.grid = grid;

  const std::vector<RelationReport> reports = check_all(profile);
  Table t{command,
          {"relation", "status"},
          {"points", "domain_violations", "max_residual"},
          {},
          {{"tolerance", o.tol}},
          {}};
  bool all = true;
  for (const RelationReport& r : reports) {
    all = all && r.passed;
    t.records.push_back({{Field{std::string(relation_name(r.id))}, Field{std::string(r.passed ? "PASS" : "FAIL")}},
                         {static_cast<double>(r.points.size()), static_cast<double>(r.domain_violations),
                          r.max_residual},
                         {}});
  }
  emit(t, o.format, out);
  const auto failed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.passed; });
  err << "verify: " << reports.size() - failed << "/" << reports.size() << " relations passed at tol "
      << format_double(o.tol) << '\n';
  return all ? kOk : kVerificationFailed;
}

// ---- limit ----------------------------------------------------------------

struct LimitFlags {
  std::string kind = "xi";
  std::vector<int> k{2, 3, 4};
  int n = 1;
  int x = 1;
  double tau = 0.5;
};

int cmd_limit(const Common& o, const LimitFlags& f, const std::string& command, std::ostream& out) {
  for (int k : f.k)
    if (k < 1) throw Error(Errc::InvalidArgument, "--k entries must be positive");
  Table t{command, {"k", "q"}, {"error"}, {}, {{"kind", f.kind}, {"beta", o.beta * 1LL}, {"tau", f.tau}}, {}};
  const int trunc = o.trunc > 0 ? o.trunc : 24;
  std::optional<Eigen::MatrixXd> classical;
  if (f.kind == "operator") {
    const FockTruncation ft(trunc, trunc);
    classical = sector_block(classical_U(f.tau, ft), sector(ft, o.beta));
    t.metadata.emplace_back("trunc", trunc * 1LL);
    t.metadata.emplace_back("nmax", o.nmax * 1LL);
  } else {
    t.metadata.emplace_back("n", f.n * 1LL);
    t.metadata.emplace_back("x", f.x * 1LL);
  }

  std::vector<double> errors;
  for (int k : f.k) {
    const QContext ctx(1.0 - std::pow(10.0, -k));
    double e = 0.0;
    if (f.kind == "poly") {
      const double c = std::tanh(f.tau) * std::tanh(f.tau);
      if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "kind=poly needs tau != 0");
      const MeixnerParams p = MeixnerParams::from_beta(o.beta, c / (1.0 - c), ctx);
      e = std::fabs(qmeixner(f.n, f.x, p) - classical_meixner(f.n, f.x, o.beta, c));
    } else if (f.kind == "xi") {
      const MatrixElementParams mp(std::sinh(f.tau), o.beta, ctx);
      e = std::fabs(xi(f.n, f.x, mp) - classical_xi_limit(f.n, f.x, o.beta, f.tau));
    } else {
      const UOperator u = build_U(std::sinh(f.tau), FockTruncation(trunc, trunc), ctx);
      for (int n = 0; n <= o.nmax; ++n)
        for (int x = 0; x <= o.nmax; ++x) e = std::max(e, std::fabs(element(u, o.beta, n, x) - (*classical)(n, x)));
    }
    errors.push_back(e);
    t.records.push_back({{Field{k * 1LL}, Field{ctx.q()}}, {e}, {}});
  }
  emit(t, o.format, out);
  return monotonicity_residual(errors) == 0.0 ? kOk : kVerificationFailed;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::UnknownRelation:
    case Errc::EmptyGrid:
    case Errc::EmptySector:
      return kUsage;
    default:
      return kNumeric;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-Meixner polynomials and q-pseudorotation matrix elements", "qmx"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common tab_o, xi_o, ver_o, lim_o;
  std::string family = "qmeixner";
  std::string source = "closed";
  VerifyFlags vf;
  LimitFlags lf;

  CLI::App* tab = app.add_subcommand("tabulate", "Table of polynomial values M_n(x)");
  tab->add_option("--family", family)->check(CLI::IsMember({"qmeixner", "classical"}));
  add_family_params(tab, tab_o);
  add_ranges(tab, tab_o);
  add_format(tab, tab_o);

  CLI::App* xic = app.add_subcommand("xi", "Matrix elements <n|U(theta)|x> in one beta sector");
  add_family_params(xic, xi_o);
  add_ranges(xic, xi_o);
  xic->add_option("--trunc", xi_o.trunc, "Oscillator cap for the operator source");
  xic->add_option("--source", source)->check(CLI::IsMember({"closed", "operator", "both"}));
  add_format(xic, xi_o);

  CLI::App* ver = app.add_subcommand("verify", "Check registered identities over a parameter grid");
  ver->add_option("--relation", vf.relations, "Relation name (repeatable)");
  ver->add_option("--q", vf.q, "Grid values of q");
  ver->add_option("--beta", vf.beta, "Grid values of beta");
  ver->add_option("--theta", vf.theta, "Grid values of theta");
  CLI::Option* ver_n = ver->add_option("--nmax", ver_o.nmax, "Grid n = 0..nmax")->check(CLI::NonNegativeNumber);
  CLI::Option* ver_x = ver->add_option("--xmax", ver_o.xmax, "Grid x = 0..xmax")->check(CLI::NonNegativeNumber);
  ver->add_option("--tol", ver_o.tol, "Relative tolerance")->check(CLI::PositiveNumber);
  add_format(ver, ver_o);

  CLI::App* lim = app.add_subcommand("limit", "Error against the q = 1 - 10^{-k} limit");
  lim->add_option("--kind", lf.kind)->check(CLI::IsMember({"poly", "xi", "operator"}));
  lim->add_option("--k", lf.k, "Exponents k (repeatable)");
  lim->add_option("--n", lf.n)->check(CLI::NonNegativeNumber);
  lim->add_option("--x", lf.x)->check(CLI::NonNegativeNumber);
  lim->add_option("--beta", lim_o.beta)->check(CLI::PositiveNumber);
  lim->add_option("--tau", lf.tau);
  lim->add_option("--nmax", lim_o.nmax, "Block size for kind=operator")->check(CLI::NonNegativeNumber);
  lim->add_option("--trunc", lim_o.trunc, "Oscillator cap for kind=operator");
  add_format(lim, lim_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = echo(argc, argv);
  try {
    if (tab->parsed()) return cmd_tabulate(tab_o, family, command, out);
    if (xic->parsed()) return cmd_xi(xi_o, source, command, out);
    if (ver->parsed()) return cmd_verify(ver_o, vf, ver_n->count() > 0, ver_x->count() > 0, command, out, err);
    return cmd_limit(lim_o, lf, command, out);
  } catch (const Error& e) {
    err << "qmx: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace qmx::cli
