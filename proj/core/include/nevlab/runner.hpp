#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nevlab/nevan.hpp"
#include "nevlab/projcurve.hpp"
#include "nevlab/table.hpp"

namespace nevlab {

// `key = value` lines under `[section]` headers. Lines starting with '#' or ';' are comments.
// Keys keep file order; a repeated key in one section is a parse error.
class IniDocument {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static IniDocument parse(const std::string& text);
  bool has(const std::string& section) const;
  const Section& section(const std::string& name) const;  // empty when absent
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::vector<std::string> section_names() const;

 private:
  std::vector<std::pair<std::string, Section>> sections_;
};

std::vector<std::string> split_list(const std::string& s, char sep = ',');
cplx parse_complex(const std::string& s);
// "inf" or a complex number.
P1Point parse_target(const std::string& s);

enum class ExperimentKind { Fmt, SmtRiemann, Cartan, Nochka, Ahlfors, Plucker, Ldl, GrowthIndex, CalculusLemma };
const char* experiment_kind_name(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct GridSpec {
  std::string kind = "standard";  // standard | geometric | boundary | explicit
  real r0 = 1, r1 = 50, d0 = 0.5L, d1 = 5e-4L;
  int n = 48;
  std::vector<real> radii;
};

struct Assertion {
  std::string key;  // summary key, or "rows"
  std::string op;   // <=, >=, ==, in
  real lo = 0, hi = 0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Fmt;
  std::string name = "experiment";

  // [map]: gallery name plus parameters, or `synthetic = log-pole` with `kappa` (growth-index only).
  std::string map_gallery;
  Params map_params;
  std::string synthetic;
  real kappa = 1;

  // [curve]: gallery name plus parameters, or `gallery = inline` with f0, f1, ... coefficient lists.
  std::string curve_gallery;
  Params curve_params;

  std::vector<P1Point> targets;
  std::vector<Hyperplane> hyperplanes;
  std::vector<std::vector<cplx>> plane;
  GridSpec grid;

  real eps = 0.1L;
  real delta = 0.5L;
  int k = 1;
  real lambda = 0.5L;
  std::optional<real> growth;  // supplied growth index c
  std::string gamma = "growth";  // ldl: growth | inverse-distance
  std::string h = "log-pole";    // calculus-lemma: log-pole | identity | constant
  bool second_order = false;
  bool cross_check = true;
  real cap = 10;
  size_t window = 12;

  std::vector<Assertion> assertions;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// The map or curve named by the config; UnknownName for unknown galleries.
std::pair<HoloMap, TargetGeometry> config_map(const ExperimentConfig& cfg);
ProjCurve config_curve(const ExperimentConfig& cfg);
RadialGrid config_grid(const ExperimentConfig& cfg, real R);

struct ExperimentResult {
  NevanlinnaTable table;
  ExceptionalSummary exceptional;
  bool has_exceptional = false;
};

// Computes the table; no files are written.
ExperimentResult compute_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "r,T,T_area,m_total,N_total,N_ram,S_k,slack,exceptional";
void write_csv(std::ostream& os, const NevanlinnaTable& t);
void write_summary(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& res);
// T, m, N and slack against log r.
std::string render_svg(const NevanlinnaTable& t, const std::string& title);

struct AssertionOutcome {
  Assertion assertion;
  real value = kNaN;
  bool ok = false;
};
std::vector<AssertionOutcome> check_assertions(const ExperimentConfig& cfg, const ExperimentResult& res);

// Writes table.csv, summary.txt and optionally plot.svg into out (created if needed).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out, bool svg = false);

// 2 for config and name errors, 3 otherwise.
int exit_code_for(ErrorKind k);
// error.json with kind, message and exit code.
void write_error_record(const std::filesystem::path& out, ErrorKind kind, const std::string& message);

}  // namespace nevlab
