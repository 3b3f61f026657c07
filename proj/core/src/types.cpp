#include "nevlab/types.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace nevlab {

namespace {
std::atomic<int> g_mode{0};
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainViolation: return "domain-violation";
    case ErrorKind::PrecisionFailure: return "precision-failure";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::GridTooCoarse: return "grid-too-coarse";
    case ErrorKind::ZeroOnCircle: return "zero-on-circle";
    case ErrorKind::OriginHitsTarget: return "origin-hits-target";
    case ErrorKind::DegenerateCurve: return "degenerate-curve";
    case ErrorKind::StationaryPoint: return "stationary-point";
    case ErrorKind::CrossCheckMismatch: return "cross-check-mismatch";
    case ErrorKind::SingularAverage: return "singular-average";
    case ErrorKind::FitUnstable: return "fit-unstable";
    case ErrorKind::MissingC: return "missing-c";
    case ErrorKind::ImageInHyperplane: return "image-in-hyperplane";
    case ErrorKind::InfeasibleAtScanResolution: return "infeasible-at-scan-resolution";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::ConfigParse: return "config-parse";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void set_precision_mode(PrecisionMode m) { g_mode.store(m == PrecisionMode::Double ? 1 : 0); }

PrecisionMode precision_mode() {
  return g_mode.load() == 1 ? PrecisionMode::Double : PrecisionMode::Extended;
}

void precision_mode_from_env() {
  const char* v = std::getenv("NEVLAB_PRECISION");
  if (!v || !*v || std::strcmp(v, "extended") == 0) {
    set_precision_mode(PrecisionMode::Extended);
  } else if (std::strcmp(v, "double") == 0) {
    set_precision_mode(PrecisionMode::Double);
  } else {
    fail(ErrorKind::ConfigParse, std::string("NEVLAB_PRECISION must be double or extended, got ") + v);
  }
}

}  // namespace nevlab
