#pragma once

#include "finsler_app/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace finsler::app {

/// One identity checked over all samples.
struct IdentityRecord {
  std::string name;
  std::string group;  // module the identity belongs to
  int samples = 0;
  int errors = 0;  // samples whose evaluation threw
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::string note;  // first error message, if a sample threw
};

struct VerifyReport {
  std::string background;
  int dim = 0;
  double g = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
  int rejections = 0;  // velocity draws discarded because q <= q_min
  bool landsberg_condition = false;
  double condition_k = 0.0;  // k at the first sample when the condition holds
  std::vector<IdentityRecord> records;
  bool passed = true;  // conjunction of all record passes

  nlohmann::json to_json() const;
  void print_table(std::ostream& os) const;
};

/// Runs the whole identity suite on `samples` seeded random points of the
/// configured background. Deterministic for fixed (config, seed, samples).
VerifyReport run_verification(const RunConfig& cfg, std::uint64_t seed, int samples);

}  // namespace finsler::app
