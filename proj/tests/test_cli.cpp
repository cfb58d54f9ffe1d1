#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qmx/cli.hpp"
#include "qmx/meixner.hpp"

using namespace qmx;
using doctest::Approx;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qmx_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qmx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(cli::format_double(v)) == v);
  CHECK(cli::format_double(0.5) == "0.5");
}

TEST_CASE("tabulate") {
  SUBCASE("degree zero row is all ones") {
    const Run r = qmx_run({"tabulate", "--q", "0.5", "--b", "0.5", "--c", "1", "--nmax", "0", "--xmax", "4"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"n", "x", "value"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] == "1");
  }
  SUBCASE("x = 0 column is all ones and the spot value matches the library") {
    const Run r = qmx_run({"tabulate", "--q", "0.5", "--b", "0.5", "--c", "1", "--nmax", "3", "--xmax", "2"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][1] == "0") CHECK(rows[i][2] == "1");
      if (rows[i][0] == "1" && rows[i][1] == "1") {
        const QContext ctx(0.5);
        CHECK(std::stod(rows[i][2]) == qmeixner(1, 1, MeixnerParams::from_b(0.5, 1.0, ctx)));
      }
    }
  }
  SUBCASE("classical family") {
    const Run r = qmx_run({"tabulate", "--family", "classical", "--beta", "1", "--c", "0.5", "--nmax", "1", "--xmax", "1"});
    REQUIRE(r.code == 0);
    CHECK(csv(r.out).back() == std::vector<std::string>{"1", "1", "0"});
  }
  SUBCASE("csv and json carry the same values") {
    const std::vector<std::string> base{"tabulate", "--q", "0.7", "--beta", "2", "--theta", "0.4", "--nmax", "3", "--xmax", "3"};
    const Run c = qmx_run(base);
    std::vector<std::string> js = base;
    js.insert(js.end(), {"--format", "json"});
    const Run j = qmx_run(js);
    REQUIRE(c.code == 0);
    REQUIRE(j.code == 0);
    const auto rows = csv(c.out);
    const auto doc = nlohmann::json::parse(j.out);
    REQUIRE(doc["records"].size() == rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(doc["records"][i - 1]["values"][0].get<double>() == std::stod(rows[i][2]));
      CHECK(doc["records"][i - 1]["params"]["n"].get<int>() == std::stoi(rows[i][0]));
    }
    CHECK(doc["metadata"]["version"] == cli::kVersion);
  }
  SUBCASE("invalid parameters are usage errors") {
    CHECK(qmx_run({"tabulate", "--b", "1.5", "--c", "1"}).code == 2);
    CHECK(qmx_run({"tabulate", "--beta", "1"}).code == 2);
    CHECK(qmx_run({"tabulate", "--beta", "1", "--b", "0.5", "--c", "1"}).code == 2);
    CHECK(qmx_run({"tabulate", "--theta", "0.3", "--c", "1"}).code == 2);
    CHECK(qmx_run({"tabulate", "--q", "1.5", "--c", "1"}).code == 2);
    CHECK(qmx_run({}).code == 2);
    CHECK(qmx_run({"frobnicate"}).code == 2);
  }
}

TEST_CASE("xi") {
  SUBCASE("ground-state entry") {
    const Run r = qmx_run({"xi", "--q", "0.5", "--beta", "2", "--theta", "0.6", "--nmax", "1", "--xmax", "1"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    CHECK(std::stod(rows[1][2]) == Approx(1.0 / std::sqrt((1 + 0.36) * (1 + 0.18))).epsilon(1e-15));
  }
  SUBCASE("both sources agree") {
    const Run r = qmx_run({"xi", "--q", "0.5", "--beta", "1", "--theta", "0.7", "--nmax", "6", "--xmax", "6", "--source", "both"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"n", "x", "closed", "operator", "discrepancy"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) < 1e-9);
  }
  SUBCASE("theta = 0 gives the identity") {
    const Run r = qmx_run({"xi", "--theta", "0", "--nmax", "3", "--xmax", "3", "--source", "both"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const std::string want = rows[i][0] == rows[i][1] ? "1" : "0";
      CHECK(rows[i][2] == want);
      CHECK(std::stod(rows[i][3]) == Approx(std::stod(want)));
    }
  }
  SUBCASE("too small a truncation is a numeric error") {
    CHECK(qmx_run({"xi", "--theta", "0.5", "--nmax", "8", "--xmax", "8", "--trunc", "10", "--source", "operator"}).code == 3);
  }
  SUBCASE("closed source ignores the truncation") {
    CHECK(qmx_run({"xi", "--theta", "0.5", "--nmax", "8", "--xmax", "8", "--trunc", "10"}).code == 0);
  }
}

TEST_CASE("verify") {
  SUBCASE("single relation filter") {
    const Run r = qmx_run({"verify", "--relation", "RECURRENCE"});
    CHECK(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "RECURRENCE");
    CHECK(rows[1][1] == "PASS");
  }
  SUBCASE("unreachable tolerance fails") {
    CHECK(qmx_run({"verify", "--relation", "DIFFERENCE", "--tol", "1e-18"}).code == 1);
  }
  SUBCASE("unknown relation is a usage error") {
    CHECK(qmx_run({"verify", "--relation", "NOPE"}).code == 2);
  }
  SUBCASE("grid overrides") {
    const Run r = qmx_run({"verify", "--relation", "DUALITY", "--q", "0.3", "--beta", "3", "--theta", "0.5", "--nmax", "2",
                           "--xmax", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["records"][0]["values"][0].get<double>() == 6.0);
  }
  SUBCASE("default run reports the dual orthogonality as the only failure") {
    const Run r = qmx_run({"verify"});
    CHECK(r.code == 1);
    const auto rows = csv(r.out);
    CHECK(rows.size() == 21);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK((rows[i][1] == "FAIL") == (rows[i][0] == "ORTHO_VARIABLE"));
  }
  SUBCASE("output is byte-identical across runs") {
    CHECK(qmx_run({"verify", "--relation", "GENFUN_DEGREE"}).out == qmx_run({"verify", "--relation", "GENFUN_DEGREE"}).out);
  }
}

TEST_CASE("limit") {
  SUBCASE("polynomial limit at the trivial corner is exact") {
    const Run r = qmx_run({"limit", "--kind", "poly", "--n", "0", "--x", "0"});
    CHECK(r.code == 0);
    const auto rows = csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] == "0");
  }
  SUBCASE("matrix-element limit converges") {
    const Run r = qmx_run({"limit", "--kind", "xi", "--n", "1", "--x", "1", "--beta", "1", "--tau", "0.5", "--k", "2", "--k", "3", "--k", "4"});
    CHECK(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[2][2]) < std::stod(rows[1][2]));
    CHECK(std::stod(rows[3][2]) < std::stod(rows[2][2]));
  }
  SUBCASE("operator limit at tau = 0 is exact") {
    const Run r = qmx_run({"limit", "--kind", "operator", "--tau", "0", "--trunc", "8", "--nmax", "3"});
    CHECK(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) == 0.0);
  }
  SUBCASE("bad kind") {
    CHECK(qmx_run({"limit", "--kind", "banana"}).code == 2);
    CHECK(qmx_run({"limit", "--k", "0"}).code == 2);
  }
}
