#pragma once

#include "finsler_app/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace finsler::app {

enum ExitCode : int { kExitPass = 0, kExitFailure = 1, kExitUsage = 2 };

/// Every printed quantity at one (x, y). Fields that need q > q_min are
/// omitted and listed under "singular" when y is collinear with b.
nlohmann::json evaluate_point(const RunConfig& cfg, const Vector& x, const Vector& y);

struct VerifyOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  int samples = 50;
  std::optional<std::string> json_path;
};

struct GeodesicOptions {
  std::string config_path;
  std::string x0;
  std::string y0;
  double t_end = 1.0;
  double step = 1e-3;
  std::string out_path;
};

/// The commands write their normal output to `out`, diagnostics to `err`,
/// and return the process exit code.
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const std::string& config_path, const std::string& x, const std::string& y,
             std::ostream& out, std::ostream& err);
int cmd_geodesic(const GeodesicOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace finsler::app
