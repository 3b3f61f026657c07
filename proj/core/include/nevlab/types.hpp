#pragma once

#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nevlab {

using real = long double;
using cplx = std::complex<real>;

inline constexpr real kPi = std::numbers::pi_v<real>;
inline constexpr real kTwoPi = 2 * std::numbers::pi_v<real>;
inline constexpr real kInf = std::numeric_limits<real>::infinity();

enum class ErrorKind {
  DomainViolation,
  PrecisionFailure,
  UnknownName,
  NoConvergence,
  GridTooCoarse,
  ZeroOnCircle,
  OriginHitsTarget,
  DegenerateCurve,
  StationaryPoint,
  CrossCheckMismatch,
  SingularAverage,
  FitUnstable,
  MissingC,
  ImageInHyperplane,
  InfeasibleAtScanResolution,
  PreconditionViolation,
  ConfigParse,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Floating mode for map evaluation. Extended is native long double.
enum class PrecisionMode { Extended, Double };
void set_precision_mode(PrecisionMode m);
PrecisionMode precision_mode();
// Reads NEVLAB_PRECISION; unknown values are a config error.
void precision_mode_from_env();

inline cplx round_to_mode(cplx z) {
  if (precision_mode() == PrecisionMode::Double)
    return {static_cast<real>(static_cast<double>(z.real())),
            static_cast<real>(static_cast<double>(z.imag()))};
  return z;
}

}  // namespace nevlab
