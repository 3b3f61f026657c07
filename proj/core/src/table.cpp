#include "nevlab/table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace nevlab {

ExceptionalSummary exceptional_set_measure(const NevanlinnaTable& t, real c, real eps, real cap) {
  ExceptionalSummary s;
  s.cap = cap;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TableRow& row = t.rows[i];
    if (!(row.slack < 0)) continue;
    s.flagged_radii.push_back(row.r);
    real w = i < t.grid.weights.size() ? t.grid.weights[i] : real(0);
    s.weighted_measure += std::exp((c + eps) * row.T) * w;
  }
  s.finite = s.weighted_measure <= cap;
  return s;
}

LineFit fit_line(const std::vector<real>& x, const std::vector<real>& y) {
  size_t n = x.size();
  LineFit f;
  if (n == 0) return f;
  real mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  real sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  real ss = 0;
  for (size_t i = 0; i < n; ++i) {
    real e = y[i] - f.intercept - f.slope * x[i];
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

SlackFit fit_slack_on(const std::vector<real>& D, const std::vector<real>& X) {
  size_t n = D.size();
  size_t k = std::max<size_t>(2, n / 3);
  k = std::min(k, n);
  std::vector<real> x(X.begin(), X.begin() + k), y(D.begin(), D.begin() + k);
  SlackFit s;
  LineFit lf = fit_line(x, y);
  s.C_log = std::max<real>(0, lf.slope);
  s.C0 = -kInf;
  for (size_t i = 0; i < k; ++i) s.C0 = std::max(s.C0, D[i] - s.C_log * X[i]);
  for (size_t i = 0; i < n; ++i) s.slack.push_back(s.C0 + s.C_log * X[i] - D[i]);
  return s;
}

SlackFit fit_slack(const std::vector<real>& D, const std::vector<real>& T) {
  std::vector<real> X;
  for (real t : T) X.push_back(log_plus(t));
  return fit_slack_on(D, X);
}

real smt_rhs(real main_coeff, real err_coeff, real c, real eps, real T, real r) {
  return main_coeff * T + err_coeff * ((1 + eps) * (c + eps) * T + eps * log_plus(r));
}

namespace {
std::atomic<int> g_threads{1};
}

void set_worker_threads(int n) { g_threads.store(std::max(1, n)); }
int worker_threads() { return g_threads.load(); }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  size_t nt = std::min<size_t>(static_cast<size_t>(worker_threads()), n);
  std::vector<std::exception_ptr> errors(n);
  if (nt <= 1) {
    for (size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nt; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace nevlab
