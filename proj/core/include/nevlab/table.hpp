#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nevlab/quad.hpp"

namespace nevlab {

inline constexpr real kNaN = std::numeric_limits<real>::quiet_NaN();

struct TableRow {
  real r = kNaN;
  real T = kNaN;
  real T_area = kNaN;
  real m_total = kNaN;
  real N_total = kNaN;
  real N_ram = kNaN;
  real S_k = kNaN;
  real slack = kNaN;
  int exceptional = -1;  // -1 not applicable, else 0/1
};

struct NevanlinnaTable {
  RadialGrid grid;
  std::vector<TableRow> rows;
  std::vector<std::string> target_labels;
  std::vector<std::vector<real>> m;  // per target, per radius
  std::vector<std::vector<real>> N;
  // Extra per-radius columns.
  std::map<std::string, std::vector<real>> columns;
  // Fitted constants, growth data, defects and other scalar outputs.
  std::map<std::string, real> summary;
};

struct ExceptionalSummary {
  std::vector<real> flagged_radii;
  real weighted_measure = 0;
  real cap = 10;
  bool finite = true;
};

// Flags slack < 0 and sums exp((c + eps) T) dr over flagged radii.
ExceptionalSummary exceptional_set_measure(const NevanlinnaTable& t, real c, real eps, real cap = 10);

struct SlackFit {
  real C0 = 0;
  real C_log = 0;
  std::vector<real> slack;
};

// D_i = LHS_i - main_i. Fits D ~ C_log log+ T + C0 on the first third of the grid (C_log >= 0,
// C0 the max residual) and returns slack_i = C0 + C_log log+ T_i - D_i.
SlackFit fit_slack(const std::vector<real>& D, const std::vector<real>& T);
// Same with an arbitrary log term X in place of log+ T.
SlackFit fit_slack_on(const std::vector<real>& D, const std::vector<real>& X);

// Shared right-hand side main term: main_coeff * T + err_coeff * ((1+eps)(c+eps) T + eps log+ r).
real smt_rhs(real main_coeff, real err_coeff, real c, real eps, real T, real r);

inline real log_plus(real x) { return x > 1 ? std::log(x) : real(0); }

// Least-squares line y = a + b x.
struct LineFit {
  real intercept = 0, slope = 0, rms = 0;
};
LineFit fit_line(const std::vector<real>& x, const std::vector<real>& y);

// Worker count for per-radius loops.
void set_worker_threads(int n);
int worker_threads();
// Calls fn(i) for i in [0, n) on up to worker_threads() threads; rethrows the first error by index.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace nevlab
