#pragma once

#include <stdexcept>
#include <string>

namespace cfield {

// Characteristic length (m) used to mix force and torque units wherever a
// wrench is collapsed to a single norm (calibration, SOCP torque rows).
inline constexpr double kCharacteristicLength = 0.05;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfield
