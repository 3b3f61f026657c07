#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nevlab/runner.hpp"

using namespace nevlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_of(const NevanlinnaTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nevlab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ErrorKind kind_of(const std::string& text) {
  try {
    auto cfg = parse_config(text);
    compute_experiment(cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ConfigParse;
}

}  // namespace

TEST_CASE("ini documents") {
  auto doc = IniDocument::parse("# comment\n[a]\nx = 1, 2\n; other comment\ny=  3+2i  \n\n[b]\nz = inf\n");
  CHECK(doc.section_names() == std::vector<std::string>{"a", "b"});
  CHECK(*doc.get("a", "x") == "1, 2");
  CHECK(*doc.get("a", "y") == "3+2i");
  CHECK(!doc.get("a", "z"));
  CHECK(doc.section("missing").empty());
  CHECK_THROWS_AS(IniDocument::parse("x = 1\n"), Error);
  CHECK_THROWS_AS(IniDocument::parse("[a]\nx = 1\nx = 2\n"), Error);
  CHECK_THROWS_AS(IniDocument::parse("[a\n"), Error);
  CHECK_THROWS_AS(IniDocument::parse("[a]\njunk\n"), Error);

  CHECK(parse_complex("3+2i") == cplx(3, 2));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("1/2") == cplx(0.5L, 0));
  CHECK(parse_target("inf").infinite);
  CHECK_THROWS_AS(split_list("1,,2"), Error);
}

TEST_CASE("config validation") {
  CHECK(kind_of("[experiment]\nname = x\n") == ErrorKind::ConfigParse);
  CHECK(kind_of("[experiment]\nkind = nope\n") == ErrorKind::ConfigParse);
  CHECK(kind_of("[experiment]\nkind = fmt\n[map]\ngallery = exp\n") == ErrorKind::ConfigParse);
  CHECK(kind_of("[experiment]\nkind = fmt\n[map]\ngallery = nonexistent\n[targets]\nvalues = 0\n") ==
        ErrorKind::UnknownName);
  CHECK(kind_of("[experiment]\nkind = cartan\n[curve]\ngallery = nonexistent\n[hyperplanes]\nh0 = 1, 0\n") ==
        ErrorKind::UnknownName);
  CHECK(kind_of("[experiment]\nkind = growth-index\n[map]\ngallery = pole-disc\n[grid]\nkind = explicit\n"
                "radii = 0.5, 0.9, 1.2\n") == ErrorKind::ConfigParse);
  CHECK(kind_of("[experiment]\nkind = fmt\neps = -1\n") == ErrorKind::ConfigParse);
  CHECK(kind_of("[experiment]\nkind = fmt\n[bogus]\n") == ErrorKind::ConfigParse);
  CHECK(exit_code_for(ErrorKind::ConfigParse) == 2);
  CHECK(exit_code_for(ErrorKind::UnknownName) == 2);
  CHECK(exit_code_for(ErrorKind::NoConvergence) == 3);

  auto cfg = parse_config(
      "[experiment]\nkind = nochka\nname = n\n[curve]\ngallery = exp-degenerate\n[plane]\nb0 = 1, 0, 0\n"
      "b1 = 0, 1, 0\n[hyperplanes]\nh0 = 1, 2, 3\nh1 = 1+i, 1, -1\n[grid]\nkind = geometric\nr0 = 2\nr1 = 30\nn = 5\n"
      "[assert]\nmin_slack = >= -1\ntheta = in 1, 2\n");
  CHECK(cfg.kind == ExperimentKind::Nochka);
  CHECK(cfg.plane.size() == 2);
  REQUIRE(cfg.hyperplanes.size() == 2);
  CHECK(std::abs(cfg.hyperplanes[1].normal[0] - cplx(1, 1) / std::sqrt(4.0L)) < 1e-15L);
  CHECK(cfg.grid.n == 5);
  REQUIRE(cfg.assertions.size() == 2);
  CHECK(cfg.assertions[1].op == "in");
  CHECK(cfg.assertions[1].hi == 2);
}

TEST_CASE("fmt run writes the fixed schema") {
  auto cfg = parse_config("[experiment]\nkind = fmt\nname = fmt-exp\n[map]\ngallery = exp\n[targets]\nvalues = 0\n");
  auto out = scratch("fmt");
  auto res = run_experiment(cfg, out, true);
  std::string csv = slurp(out / "table.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
    CHECK(line.find(",,") == std::string::npos);
  }
  CHECK(rows == 48);
  CHECK(res.table.summary.at("residual_range_max") <= 1);
  CHECK(slurp(out / "summary.txt").find("kind = fmt\n") != std::string::npos);
  std::string svg = slurp(out / "plot.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(">fmt-exp<") != std::string::npos);
}

TEST_CASE("golden tables") {
  const std::filesystem::path golden(NEVLAB_GOLDEN_DIR);
  auto synth = parse_config("[experiment]\nkind = growth-index\nname = s\n[map]\nsynthetic = log-pole\nkappa = 2\n");
  auto r1 = compute_experiment(synth);
  CHECK(csv_of(r1.table) == slurp(golden / "growth_synthetic.csv"));
  CHECK(std::fabs(r1.table.summary.at("c_est") - 0.5L) < 1e-9L);

  auto calc = parse_config(
      "[experiment]\nkind = calculus-lemma\nname = c\nh = identity\n[grid]\nkind = geometric\nr0 = 0.01\nr1 = 50\n"
      "n = 60\n");
  auto r2 = compute_experiment(calc);
  CHECK(csv_of(r2.table) == slurp(golden / "calculus_identity.csv"));
  CHECK(r2.table.summary.at("weighted_measure") <= 1);
  CHECK(r2.table.summary.at("flagged_max_r") < 1);
}

TEST_CASE("growth index of the Poincare pullback through the runner") {
  auto cfg = parse_config("[experiment]\nkind = growth-index\nname = g\n[map]\ngallery = lambda-poincare\n");
  auto out = scratch("growth");
  run_experiment(cfg, out);
  std::string summary = slurp(out / "summary.txt");
  auto pos = summary.find("c_est = ");
  REQUIRE(pos != std::string::npos);
  real c = std::stold(summary.substr(pos + 8));
  CHECK(c >= 0.9L);
  CHECK(c <= 1.1L);
}

TEST_CASE("results do not depend on the worker count") {
  auto cfg = parse_config(
      "[experiment]\nkind = smt-riemann\nname = d\n[map]\ngallery = quadratic\n[targets]\nvalues = 0, inf\n"
      "[grid]\nkind = geometric\nr0 = 0.3\nr1 = 20\nn = 12\n");
  set_worker_threads(1);
  std::string a = csv_of(compute_experiment(cfg).table);
  set_worker_threads(4);
  std::string b = csv_of(compute_experiment(cfg).table);
  set_worker_threads(1);
  CHECK(a == b);
}

TEST_CASE("exceptional set accounting") {
  NevanlinnaTable pos;
  pos.grid = RadialGrid::geometric(1, 10, 5);
  for (real r : pos.grid.radii) {
    TableRow row;
    row.r = r;
    row.T = r;
    row.slack = 1;
    pos.rows.push_back(row);
  }
  auto e = exceptional_set_measure(pos, 0, 0.1L);
  CHECK(e.flagged_radii.empty());
  CHECK(e.weighted_measure == 0);
  CHECK(e.finite);

  // Slack < 0 on the whole tail of the unit disc with T = log 1/(1-r) and c = 1.
  NevanlinnaTable tail;
  tail.grid = RadialGrid::boundary(1, 0.5L, 1e-4L, 40);
  for (real r : tail.grid.radii) {
    TableRow row;
    row.r = r;
    row.T = -std::log1p(-r);
    row.slack = -1;
    tail.rows.push_back(row);
  }
  auto t = exceptional_set_measure(tail, 1, 0.1L);
  CHECK(t.flagged_radii.size() == tail.rows.size());
  CHECK(t.weighted_measure > 10);
  CHECK_FALSE(t.finite);
}

TEST_CASE("error records") {
  auto out = scratch("error");
  write_error_record(out, ErrorKind::UnknownName, "unknown gallery name: nonexistent");
  auto j = nlohmann::json::parse(slurp(out / "error.json"));
  CHECK(j["error"] == error_kind_name(ErrorKind::UnknownName));
  CHECK(j["exit_code"] == 2);
  CHECK(j["message"] == "unknown gallery name: nonexistent");
}
