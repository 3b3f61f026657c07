#include "nevlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nevlab/exact.hpp"
#include "nevlab/ldl.hpp"
#include "nevlab/nochka.hpp"

namespace nevlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::ConfigParse, what); }

real parse_real(const std::string& s) {
  std::string t = trim(s);
  if (t == "inf") return kInf;
  try {
    return to_real(parse_rational(t));
  } catch (const Error&) {
    config_error("not a number: '" + s + "'");
  }
}

int parse_int(const std::string& s) {
  real v = parse_real(s);
  if (!std::isfinite(v) || v != std::floor(v)) config_error("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& s) {
  std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  config_error("not a boolean: '" + s + "'");
}

std::vector<cplx> parse_cvec(const std::string& s) {
  std::vector<cplx> v;
  for (const auto& x : split_list(s)) v.push_back(parse_complex(x));
  return v;
}

std::string fmt_num(real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15Lg", x);
  return buf;
}

Assertion parse_assertion(const std::string& key, const std::string& raw) {
  Assertion a;
  a.key = key;
  std::string v = trim(raw);
  for (const char* op : {"<=", ">=", "=="}) {
    if (v.rfind(op, 0) == 0) {
      a.op = op;
      a.lo = a.hi = parse_real(v.substr(2));
      return a;
    }
  }
  if (v.rfind("in ", 0) == 0) {
    auto parts = split_list(v.substr(3));
    if (parts.size() != 2) config_error("assertion '" + key + "': expected 'in lo, hi'");
    a.op = "in";
    a.lo = parse_real(parts[0]);
    a.hi = parse_real(parts[1]);
    return a;
  }
  config_error("assertion '" + key + "': expected <=, >=, == or in");
}

const std::set<std::string> kKnownSections = {"experiment", "map", "curve", "targets", "hyperplanes",
                                               "plane", "grid", "assert"};

}  // namespace

// ---------- INI ----------

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  Section* cur = nullptr;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') config_error("line " + std::to_string(lineno) + ": unterminated section header");
      std::string name = trim(t.substr(1, t.size() - 2));
      if (name.empty()) config_error("line " + std::to_string(lineno) + ": empty section name");
      if (doc.has(name)) config_error("line " + std::to_string(lineno) + ": repeated section [" + name + "]");
      doc.sections_.push_back({name, {}});
      cur = &doc.sections_.back().second;
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    if (!cur) config_error("line " + std::to_string(lineno) + ": key outside a section");
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(lineno) + ": empty key");
    for (const auto& kv : *cur)
      if (kv.first == key) config_error("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    cur->push_back({key, value});
  }
  return doc;
}

bool IniDocument::has(const std::string& section) const {
  return std::any_of(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
}

const IniDocument::Section& IniDocument::section(const std::string& name) const {
  static const Section empty;
  for (const auto& s : sections_)
    if (s.first == name) return s.second;
  return empty;
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
  for (const auto& kv : this->section(section))
    if (kv.first == key) return kv.second;
  return std::nullopt;
}

std::vector<std::string> IniDocument::section_names() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) out.push_back(s.first);
  return out;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    std::string t = trim(cur);
    if (t.empty()) config_error("empty list entry in '" + s + "'");
    out.push_back(t);
  }
  if (out.empty()) config_error("empty list");
  return out;
}

cplx parse_complex(const std::string& s) {
  try {
    return parse_gauss(s).to_cplx();
  } catch (const Error&) {
    config_error("not a complex number: '" + s + "'");
  }
}

P1Point parse_target(const std::string& s) {
  if (trim(s) == "inf") return P1Point::inf();
  return P1Point::at(parse_complex(s));
}

// ---------- config ----------

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Fmt: return "fmt";
    case ExperimentKind::SmtRiemann: return "smt-riemann";
    case ExperimentKind::Cartan: return "cartan";
    case ExperimentKind::Nochka: return "nochka";
    case ExperimentKind::Ahlfors: return "ahlfors";
    case ExperimentKind::Plucker: return "plucker";
    case ExperimentKind::Ldl: return "ldl";
    case ExperimentKind::GrowthIndex: return "growth-index";
    case ExperimentKind::CalculusLemma: return "calculus-lemma";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::Fmt, ExperimentKind::SmtRiemann, ExperimentKind::Cartan, ExperimentKind::Nochka,
                 ExperimentKind::Ahlfors, ExperimentKind::Plucker, ExperimentKind::Ldl, ExperimentKind::GrowthIndex,
                 ExperimentKind::CalculusLemma})
    if (s == experiment_kind_name(k)) return k;
  config_error("unknown experiment kind '" + s + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  IniDocument doc = IniDocument::parse(text);
  for (const auto& s : doc.section_names())
    if (!kKnownSections.count(s)) config_error("unknown section [" + s + "]");

  ExperimentConfig cfg;
  auto kind = doc.get("experiment", "kind");
  if (!kind) config_error("[experiment] kind is required");
  cfg.kind = parse_experiment_kind(*kind);

  for (const auto& [key, value] : doc.section("experiment")) {
    if (key == "kind") continue;
    else if (key == "name") cfg.name = value;
    else if (key == "eps") cfg.eps = parse_real(value);
    else if (key == "delta") cfg.delta = parse_real(value);
    else if (key == "k") cfg.k = parse_int(value);
    else if (key == "lambda") cfg.lambda = parse_real(value);
    else if (key == "growth") cfg.growth = parse_real(value);
    else if (key == "gamma") cfg.gamma = value;
    else if (key == "h") cfg.h = value;
    else if (key == "second_order") cfg.second_order = parse_bool(value);
    else if (key == "cross_check") cfg.cross_check = parse_bool(value);
    else if (key == "cap") cfg.cap = parse_real(value);
    else if (key == "window") cfg.window = static_cast<size_t>(parse_int(value));
    else config_error("unknown key '" + key + "' in [experiment]");
  }
  if (cfg.name.empty() || cfg.name.find_first_of("\n<>&") != std::string::npos)
    config_error("experiment name must be nonempty plain text");
  if (!(cfg.eps > 0)) config_error("eps must be positive");
  if (!(cfg.delta > 0 && cfg.delta < 1)) config_error("delta must lie in (0, 1)");
  if (!(cfg.cap > 0)) config_error("cap must be positive");
  if (cfg.gamma != "growth" && cfg.gamma != "inverse-distance")
    config_error("gamma must be growth or inverse-distance");

  for (const auto& [key, value] : doc.section("map")) {
    if (key == "gallery") cfg.map_gallery = value;
    else if (key == "synthetic") cfg.synthetic = value;
    else if (key == "kappa") cfg.kappa = parse_real(value);
    else cfg.map_params[key] = value;
  }
  if (!cfg.synthetic.empty() && cfg.synthetic != "log-pole") config_error("unknown synthetic characteristic");
  if (!(cfg.kappa > 0)) config_error("kappa must be positive");
  for (const auto& [key, value] : doc.section("curve")) {
    if (key == "gallery") cfg.curve_gallery = value;
    else cfg.curve_params[key] = value;
  }

  if (auto t = doc.get("targets", "values"))
    for (const auto& x : split_list(*t)) cfg.targets.push_back(parse_target(x));
  for (const auto& [key, value] : doc.section("hyperplanes")) {
    auto v = parse_cvec(value);
    if (std::all_of(v.begin(), v.end(), [](cplx x) { return x == cplx(0); }))
      config_error("hyperplane '" + key + "' has a zero normal");
    cfg.hyperplanes.emplace_back(v);
  }
  for (const auto& kv : doc.section("plane")) cfg.plane.push_back(parse_cvec(kv.second));

  for (const auto& [key, value] : doc.section("grid")) {
    if (key == "kind") cfg.grid.kind = value;
    else if (key == "r0") cfg.grid.r0 = parse_real(value);
    else if (key == "r1") cfg.grid.r1 = parse_real(value);
    else if (key == "d0") cfg.grid.d0 = parse_real(value);
    else if (key == "d1") cfg.grid.d1 = parse_real(value);
    else if (key == "n") cfg.grid.n = parse_int(value);
    else if (key == "radii")
      for (const auto& x : split_list(value)) cfg.grid.radii.push_back(parse_real(x));
    else config_error("unknown key '" + key + "' in [grid]");
  }
  const auto& gk = cfg.grid.kind;
  if (gk != "standard" && gk != "geometric" && gk != "boundary" && gk != "explicit")
    config_error("grid kind must be standard, geometric, boundary or explicit");
  if (gk == "explicit" && cfg.grid.radii.empty()) config_error("explicit grid needs radii");
  if ((gk == "geometric" || gk == "boundary") && cfg.grid.n < 3) config_error("grid needs n >= 3");

  for (const auto& [key, value] : doc.section("assert")) cfg.assertions.push_back(parse_assertion(key, value));

  bool needs_map = cfg.kind == ExperimentKind::Fmt || cfg.kind == ExperimentKind::SmtRiemann ||
                   cfg.kind == ExperimentKind::Ldl ||
                   (cfg.kind == ExperimentKind::GrowthIndex && cfg.synthetic.empty());
  bool needs_curve = cfg.kind == ExperimentKind::Cartan || cfg.kind == ExperimentKind::Nochka ||
                     cfg.kind == ExperimentKind::Ahlfors || cfg.kind == ExperimentKind::Plucker;
  if (needs_map && cfg.map_gallery.empty()) config_error("[map] gallery is required");
  if (needs_curve && cfg.curve_gallery.empty()) config_error("[curve] gallery is required");
  if (cfg.kind == ExperimentKind::Fmt && cfg.targets.empty()) config_error("fmt needs [targets] values");
  if ((cfg.kind == ExperimentKind::Cartan || cfg.kind == ExperimentKind::Nochka ||
       cfg.kind == ExperimentKind::Ahlfors) &&
      cfg.hyperplanes.empty())
    config_error("[hyperplanes] is required");
  if (cfg.kind == ExperimentKind::Nochka && cfg.plane.empty()) config_error("nochka needs [plane]");
  if (cfg.kind == ExperimentKind::CalculusLemma && cfg.h != "log-pole" && cfg.h != "identity" &&
      cfg.h != "constant")
    config_error("h must be log-pole, identity or constant");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::pair<HoloMap, TargetGeometry> config_map(const ExperimentConfig& cfg) {
  return gallery(cfg.map_gallery, cfg.map_params);
}

ProjCurve config_curve(const ExperimentConfig& cfg) {
  if (cfg.curve_gallery != "inline") return curve_gallery(cfg.curve_gallery, cfg.curve_params);
  std::vector<HoloMap> comps;
  for (int j = 0;; ++j) {
    auto it = cfg.curve_params.find("f" + std::to_string(j));
    if (it == cfg.curve_params.end()) break;
    comps.push_back(make_polynomial(parse_poly(it->second)));
  }
  if (comps.size() != cfg.curve_params.size()) config_error("inline curve keys must be f0, f1, ...");
  if (comps.size() < 2) config_error("inline curve needs at least f0 and f1");
  return ProjCurve(std::move(comps), "inline");
}

RadialGrid config_grid(const ExperimentConfig& cfg, real R) {
  const GridSpec& g = cfg.grid;
  RadialGrid out;
  if (g.kind == "boundary" && std::isinf(R)) config_error("boundary grid needs a finite disc");
  try {
    if (g.kind == "standard") out = RadialGrid::standard(R);
    else if (g.kind == "geometric") out = RadialGrid::geometric(g.r0, g.r1, g.n);
    else if (g.kind == "boundary") out = RadialGrid::boundary(R, g.d0, g.d1, g.n);
    else out = RadialGrid::from_radii(g.radii, R);
  } catch (const Error& e) {
    config_error(std::string("bad grid: ") + e.what());
  }
  if (out.size() < 3) config_error("grid needs at least three radii");
  for (size_t i = 0; i < out.size(); ++i) {
    real r = out.radii[i];
    if (!(r > 0 && r < R)) config_error("grid radius " + fmt_num(r) + " outside (0, R)");
    if (i > 0 && !(r > out.radii[i - 1])) config_error("grid radii must increase");
  }
  out.R = R;
  return out;
}

// ---------- experiments ----------

namespace {

NevanlinnaTable fmt_table(const ExperimentConfig& cfg) {
  auto [f, g] = config_map(cfg);
  RadialGrid grid = config_grid(cfg, f.disc().radius);
  NevanlinnaTable tab;
  tab.grid = grid;
  const size_t n = grid.size();
  auto ct = characteristic_table(f, g, grid, cfg.cross_check);
  tab.rows.resize(n);
  for (size_t i = 0; i < n; ++i) {
    tab.rows[i].r = grid.radii[i];
    tab.rows[i].T = ct.T[i];
    tab.rows[i].T_area = ct.T_area[i];
    tab.rows[i].m_total = 0;
    tab.rows[i].N_total = 0;
  }
  for (const auto& a : cfg.targets) {
    std::string label = target_label(a);
    tab.target_labels.push_back(label);
    PreimageSet pre(f, g, a, grid.radii.back(), true);
    std::vector<real> m(n), N(n), res(n);
    parallel_for(n, [&](size_t i) {
      m[i] = proximity_with(f, g, grid.radii[i], a, pre);
      N[i] = pre.counting(grid.radii[i]);
    });
    for (size_t i = 0; i < n; ++i) {
      res[i] = m[i] + N[i] - ct.T[i];
      tab.rows[i].m_total += m[i];
      tab.rows[i].N_total += N[i];
    }
    auto [lo, hi] = std::minmax_element(res.begin(), res.end());
    tab.summary["residual_min:" + label] = *lo;
    tab.summary["residual_max:" + label] = *hi;
    tab.summary["residual_range:" + label] = *hi - *lo;
    tab.columns["residual:" + label] = res;
    tab.m.push_back(std::move(m));
    tab.N.push_back(std::move(N));
  }
  real worst = 0;
  for (const auto& [k, v] : tab.summary)
    if (k.rfind("residual_range:", 0) == 0) worst = std::max(worst, v);
  tab.summary["residual_range_max"] = worst;
  tab.summary["cross_check_drift"] = ct.max_drift;
  return tab;
}

NevanlinnaTable growth_table(const ExperimentConfig& cfg) {
  NevanlinnaTable tab;
  std::vector<real> T, T_area;
  if (!cfg.synthetic.empty()) {
    tab.grid = config_grid(cfg, 1);
    for (real r : tab.grid.radii) T.push_back(-cfg.kappa * std::log1p(-r));
    T_area.assign(T.size(), kNaN);
  } else {
    auto [f, g] = config_map(cfg);
    tab.grid = config_grid(cfg, f.disc().radius);
    auto ct = characteristic_table(f, g, tab.grid, cfg.cross_check);
    T = ct.T;
    T_area = ct.T_area;
    tab.summary["cross_check_drift"] = ct.max_drift;
  }
  GrowthIndexEstimate e = growth_index_from_values(tab.grid, T, cfg.window);
  tab.rows.resize(T.size());
  for (size_t i = 0; i < T.size(); ++i) {
    tab.rows[i].r = tab.grid.radii[i];
    tab.rows[i].T = T[i];
    tab.rows[i].T_area = T_area[i];
  }
  tab.summary["c_est"] = e.c_est;
  tab.summary["kappa"] = e.kappa;
  tab.summary["fit_rms"] = e.rms;
  tab.summary["bounded"] = e.bounded ? 1 : 0;
  tab.summary["definitional"] = e.definitional ? 1 : 0;
  return tab;
}

NevanlinnaTable smt_table(const ExperimentConfig& cfg) {
  auto [f, g] = config_map(cfg);
  RadialGrid grid = config_grid(cfg, f.disc().radius);
  auto tab = smt_riemann_report(f, g, cfg.targets, grid, cfg.eps, cfg.growth);
  // The defect relation needs the map's own growth index next to the supplied c.
  if (!f.disc().is_plane()) {
    std::vector<real> T;
    for (const auto& row : tab.rows) T.push_back(row.T);
    try {
      tab.summary["c_est"] = growth_index_from_values(grid, T, cfg.window).c_est;
    } catch (const Error&) {
      tab.summary["c_est"] = kNaN;
    }
  } else {
    tab.summary["c_est"] = 0;
  }
  return tab;
}

NevanlinnaTable plucker_table(const ExperimentConfig& cfg) {
  ProjCurve c = config_curve(cfg);
  RadialGrid grid = config_grid(cfg, c.disc().radius);
  const int k = cfg.k;
  if (k < 0 || k >= c.n()) fail(ErrorKind::PreconditionViolation, "Plucker needs 0 <= k < n");
  const size_t n = grid.size();
  auto Tk = characteristic_fk_table(c, k, grid, cfg.cross_check);
  std::vector<real> Tm(n, 0), Tp;
  if (k > 0) Tm = characteristic_fk_table(c, k - 1, grid, false).T;
  Tp = characteristic_fk_table(c, k + 1, grid, false).T;
  std::vector<real> S(n), Nd(n), res(n);
  parallel_for(n, [&](size_t i) {
    S[i] = s_k(c, k, grid.radii[i]);
    Nd[i] = n_dk(c, k, grid.radii[i]);
  });
  NevanlinnaTable tab;
  tab.grid = grid;
  tab.rows.resize(n);
  for (size_t i = 0; i < n; ++i) {
    res[i] = Nd[i] + Tm[i] - 2 * Tk.T[i] + Tp[i] - S[i];
    auto& row = tab.rows[i];
    row.r = grid.radii[i];
    row.T = Tk.T[i];
    row.T_area = Tk.T_area[i];
    row.N_ram = Nd[i];
    row.S_k = S[i];
  }
  auto [lo, hi] = std::minmax_element(res.begin(), res.end());
  tab.columns["residual"] = res;
  tab.summary["k"] = k;
  tab.summary["residual_min"] = *lo;
  tab.summary["residual_max"] = *hi;
  tab.summary["residual_range"] = *hi - *lo;
  tab.summary["cross_check_drift"] = Tk.max_drift;
  return tab;
}

NevanlinnaTable ahlfors_table(const ExperimentConfig& cfg) {
  ProjCurve c = config_curve(cfg);
  RadialGrid grid = config_grid(cfg, c.disc().radius);
  if (cfg.hyperplanes.size() != 1) config_error("ahlfors takes exactly one hyperplane");
  auto res = ahlfors_estimate_check(c, cfg.k, cfg.hyperplanes[0], cfg.lambda, grid);
  auto Tk = characteristic_fk_table(c, cfg.k, grid, false);
  NevanlinnaTable tab;
  tab.grid = grid;
  std::vector<real> lhs, rhs;
  for (size_t i = 0; i < res.rows.size(); ++i) {
    const auto& a = res.rows[i];
    TableRow row;
    row.r = a.r;
    row.T = Tk.T[i];
    row.slack = a.rhs - a.lhs;
    row.exceptional = a.ok ? 0 : 1;
    tab.rows.push_back(row);
    lhs.push_back(a.lhs);
    rhs.push_back(a.rhs);
  }
  tab.columns["lhs"] = lhs;
  tab.columns["rhs"] = rhs;
  tab.summary["k"] = cfg.k;
  tab.summary["lambda"] = cfg.lambda;
  tab.summary["C"] = res.C;
  tab.summary["all_ok"] = res.all_ok ? 1 : 0;
  real ms = kInf;
  for (const auto& row : tab.rows) ms = std::min(ms, row.slack);
  tab.summary["min_slack"] = ms;
  return tab;
}

NevanlinnaTable ldl_table(const ExperimentConfig& cfg) {
  auto [f, g] = config_map(cfg);
  RadialGrid grid = config_grid(cfg, f.disc().radius);
  GammaPolicy pol = cfg.gamma == "inverse-distance" ? GammaPolicy::inverse_distance() : GammaPolicy::growth(cfg.eps);
  LdlReport rep = ldl_residual(f, grid, cfg.k, cfg.delta, pol);
  NevanlinnaTable tab;
  tab.grid = grid;
  std::vector<real> lg;
  real max_lhs = 0;
  for (const auto& r : rep.rows) {
    TableRow row;
    row.r = r.r;
    row.T = r.T;
    row.m_total = r.lhs;
    row.slack = r.rhs - r.lhs;
    row.exceptional = r.exceptional ? 1 : 0;
    tab.rows.push_back(row);
    lg.push_back(r.log_gamma);
    max_lhs = std::max(max_lhs, r.lhs);
  }
  tab.columns["log_gamma"] = lg;
  tab.summary["k"] = cfg.k;
  tab.summary["delta"] = cfg.delta;
  tab.summary["c"] = rep.c;
  tab.summary["C0"] = rep.C0;
  tab.summary["C_log"] = rep.C_log;
  tab.summary["flagged"] = rep.flagged;
  tab.summary["weighted_measure"] = rep.weighted_measure;
  tab.summary["max_lhs"] = max_lhs;
  return tab;
}

NevanlinnaTable calculus_table(const ExperimentConfig& cfg) {
  std::function<real(real)> h, gamma;
  real R = kInf;
  if (cfg.h == "log-pole") {
    h = [](real r) { return -std::log1p(-r); };
    gamma = [](real r) { return 1 / (1 - r); };
    R = 1;
  } else if (cfg.h == "identity") {
    h = [](real r) { return r; };
    gamma = [](real) { return real(1); };
  } else {
    h = [](real) { return real(2); };
    gamma = [](real) { return real(1); };
  }
  RadialGrid grid = config_grid(cfg, R);
  auto res = calculus_lemma_check(h, gamma, cfg.delta, grid, cfg.second_order);
  NevanlinnaTable tab;
  tab.grid = grid;
  const real d = cfg.delta;
  for (size_t i = 0; i < grid.size(); ++i) {
    real r = grid.radii[i];
    TableRow row;
    row.r = r;
    row.T = h(r);
    real bound = cfg.second_order ? std::pow(r, d) * std::pow(gamma(r), 2 + d) * std::pow(h(r), (1 + d) * (1 + d))
                                  : std::pow(h(r), 1 + d) * gamma(r);
    if (!std::isnan(res.derivative[i])) {
      row.slack = bound - res.derivative[i];
      row.exceptional = res.flagged[i] ? 1 : 0;
    }
    tab.rows.push_back(row);
  }
  tab.summary["delta"] = d;
  tab.summary["second_order"] = cfg.second_order ? 1 : 0;
  tab.summary["weighted_measure"] = res.weighted_measure;
  tab.summary["flagged"] = static_cast<real>(res.flagged_radii.size());
  tab.summary["flagged_max_r"] = res.flagged_radii.empty() ? 0 : res.flagged_radii.back();
  return tab;
}

bool uses_exceptional(ExperimentKind k) {
  return k == ExperimentKind::SmtRiemann || k == ExperimentKind::Cartan || k == ExperimentKind::Nochka;
}

}  // namespace

ExperimentResult compute_experiment(const ExperimentConfig& cfg) {
  ExperimentResult out;
  switch (cfg.kind) {
    case ExperimentKind::Fmt: out.table = fmt_table(cfg); break;
    case ExperimentKind::SmtRiemann: out.table = smt_table(cfg); break;
    case ExperimentKind::Cartan: {
      ProjCurve c = config_curve(cfg);
      out.table = cartan_smt_report(c, cfg.hyperplanes, config_grid(cfg, c.disc().radius), cfg.eps, cfg.growth);
      break;
    }
    case ExperimentKind::Nochka: {
      ProjCurve c = config_curve(cfg);
      out.table =
          nochka_smt_report(c, cfg.plane, cfg.hyperplanes, config_grid(cfg, c.disc().radius), cfg.eps, cfg.growth);
      break;
    }
    case ExperimentKind::Ahlfors: out.table = ahlfors_table(cfg); break;
    case ExperimentKind::Plucker: out.table = plucker_table(cfg); break;
    case ExperimentKind::Ldl: out.table = ldl_table(cfg); break;
    case ExperimentKind::GrowthIndex: out.table = growth_table(cfg); break;
    case ExperimentKind::CalculusLemma: out.table = calculus_table(cfg); break;
  }
  if (uses_exceptional(cfg.kind)) {
    out.exceptional = exceptional_set_measure(out.table, out.table.summary.at("c"), cfg.eps, cfg.cap);
    out.has_exceptional = true;
  }
  return out;
}

// ---------- output ----------

void write_csv(std::ostream& os, const NevanlinnaTable& t) {
  os << kCsvHeader << '\n';
  for (const auto& row : t.rows) {
    os << fmt_num(row.r) << ',' << fmt_num(row.T) << ',' << fmt_num(row.T_area) << ',' << fmt_num(row.m_total) << ','
       << fmt_num(row.N_total) << ',' << fmt_num(row.N_ram) << ',' << fmt_num(row.S_k) << ',' << fmt_num(row.slack)
       << ',' << (row.exceptional < 0 ? std::string("nan") : std::to_string(row.exceptional)) << '\n';
  }
}

void write_summary(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& res) {
  os << "experiment = " << cfg.name << '\n';
  os << "kind = " << experiment_kind_name(cfg.kind) << '\n';
  os << "rows = " << res.table.rows.size() << '\n';
  for (const auto& [k, v] : res.table.summary) os << k << " = " << fmt_num(v) << '\n';
  if (res.has_exceptional) {
    const auto& e = res.exceptional;
    os << "exceptional_radii = ";
    for (size_t i = 0; i < e.flagged_radii.size(); ++i) os << (i ? ", " : "") << fmt_num(e.flagged_radii[i]);
    os << '\n';
    os << "exceptional_weighted_measure = " << fmt_num(e.weighted_measure) << '\n';
    os << "exceptional_cap = " << fmt_num(e.cap) << '\n';
    os << "exceptional_verdict = " << (e.finite ? "finite" : "infinite") << '\n';
  }
}

std::string render_svg(const NevanlinnaTable& t, const std::string& title) {
  const real W = 640, H = 400, L = 60, Rm = 20, Tp = 30, B = 50;
  struct Series {
    const char* color;
    std::vector<std::pair<real, real>> pts;
  };
  std::vector<Series> series = {{"#1f77b4", {}}, {"#ff7f0e", {}}, {"#2ca02c", {}}, {"#d62728", {}}};
  real ymin = kInf, ymax = -kInf, xmin = kInf, xmax = -kInf;
  for (const auto& row : t.rows) {
    real x = std::log(row.r);
    real ys[4] = {row.T, row.m_total, row.N_total, row.slack};
    for (int s = 0; s < 4; ++s) {
      if (!std::isfinite(ys[s])) continue;
      series[s].pts.push_back({x, ys[s]});
      ymin = std::min(ymin, ys[s]);
      ymax = std::max(ymax, ys[s]);
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  if (!(ymax > ymin)) {
    ymin -= 1;
    ymax += 1;
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  auto px = [&](real x) { return L + (x - xmin) / (xmax - xmin) * (W - L - Rm); };
  auto py = [&](real y) { return H - B - (y - ymin) / (ymax - ymin) * (H - Tp - B); };
  std::ostringstream os;
  char buf[64];
  auto num = [&](real v) {
    std::snprintf(buf, sizeof buf, "%.2Lf", v);
    return std::string(buf);
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << num(L) << "\" y1=\"" << num(H - B) << "\" x2=\"" << num(W - Rm) << "\" y2=\"" << num(H - B)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(L) << "\" y1=\"" << num(Tp) << "\" x2=\"" << num(L) << "\" y2=\"" << num(H - B)
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num((L + W - Rm) / 2) << "\" y=\"" << num(H - 15)
     << "\" text-anchor=\"middle\" font-size=\"12\">log r</text>\n";
  os << "<text x=\"15\" y=\"" << num((Tp + H - B) / 2) << "\" font-size=\"12\" transform=\"rotate(-90 15 "
     << num((Tp + H - B) / 2) << ")\" text-anchor=\"middle\">value</text>\n";
  for (const auto& s : series) {
    if (s.pts.size() < 2) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (size_t i = 0; i < s.pts.size(); ++i)
      os << (i ? " " : "") << num(px(s.pts[i].first)) << ',' << num(py(s.pts[i].second));
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<AssertionOutcome> check_assertions(const ExperimentConfig& cfg, const ExperimentResult& res) {
  std::vector<AssertionOutcome> out;
  for (const auto& a : cfg.assertions) {
    AssertionOutcome o;
    o.assertion = a;
    if (a.key == "rows") {
      o.value = static_cast<real>(res.table.rows.size());
    } else if (a.key == "exceptional_weighted_measure" && res.has_exceptional) {
      o.value = res.exceptional.weighted_measure;
    } else {
      auto it = res.table.summary.find(a.key);
      if (it == res.table.summary.end()) config_error("assertion on unknown summary key '" + a.key + "'");
      o.value = it->second;
    }
    if (a.op == "<=") o.ok = o.value <= a.hi;
    else if (a.op == ">=") o.ok = o.value >= a.lo;
    else if (a.op == "==") o.ok = o.value == a.lo;
    else o.ok = o.value >= a.lo && o.value <= a.hi;
    out.push_back(o);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out, bool svg) {
  ExperimentResult res = compute_experiment(cfg);
  std::filesystem::create_directories(out);
  {
    std::ofstream f(out / "table.csv", std::ios::binary);
    write_csv(f, res.table);
  }
  {
    std::ofstream f(out / "summary.txt", std::ios::binary);
    write_summary(f, cfg, res);
  }
  if (svg) {
    std::ofstream f(out / "plot.svg", std::ios::binary);
    f << render_svg(res.table, cfg.name);
  }
  return res;
}

int exit_code_for(ErrorKind k) {
  return k == ErrorKind::ConfigParse || k == ErrorKind::UnknownName ? 2 : 3;
}

void write_error_record(const std::filesystem::path& out, ErrorKind kind, const std::string& message) {
  nlohmann::json j;
  j["error"] = error_kind_name(kind);
  j["message"] = message;
  j["exit_code"] = exit_code_for(kind);
  std::filesystem::create_directories(out);
  std::ofstream f(out / "error.json", std::ios::binary);
  f << j.dump(2) << '\n';
}

}  // namespace nevlab
