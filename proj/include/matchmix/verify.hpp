#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace matchmix {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failed = 0;
  double worst = 0.0;  // suite-specific worst error or margin
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what);
  std::string line() const;  // "<name>: PASS 12/12" style summary
};

// Engine results against dense-matrix computations on random instances.
SuiteResult exactness_suite(std::size_t instances, std::uint64_t seed);
// Path reversal on lifted walks: `qualifying` qualifying paths over `instances` graphs.
SuiteResult reversal_suite(std::size_t qualifying, std::size_t instances, std::uint64_t seed);
SuiteResult pairing_suite(std::size_t trials, std::uint64_t seed);
SuiteResult heat_kernel_suite();
SuiteResult sandwich_suite(std::size_t instances, std::uint64_t seed);
SuiteResult lamplighter_suite(std::size_t trials, std::uint64_t seed);

// Heat-kernel bands, frozen after one calibration run (observed ranges:
// cycle 1024 ratio [1.03, 1.26], torus 32^2 ratio [1.00, 1.64], both sups
// below 0.57).
struct HeatBands {
  double ratio_lo, ratio_hi;
  double sup_sqrt_t_max;
};
inline constexpr HeatBands kCycleHeatBands{0.8, 1.6, 1.0};
inline constexpr HeatBands kTorusHeatBands{0.8, 2.0, 1.0};

}  // namespace matchmix
