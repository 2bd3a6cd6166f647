#pragma once

#include "finsler/background.hpp"
#include "finsler/finsleroid.hpp"
#include "finsler/numkit.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace finsler::app {

/// Acceptance thresholds of the verification suite. Relative unless noted.
struct Tolerances {
  double algebraic = 1e-10;         // closed form vs closed form
  double first_derivative = 1e-8;   // closed form vs first derivatives
  double second_derivative = 1e-7;  // closed form vs second derivatives
  double cartan = 1e-6;             // A_i vs trace of dg/dy
  double third_jets = 1e-9;         // cascade vs third derivatives by jets
  double third_fd = 1e-4;           // cascade vs third derivatives by central differences
  double spray_numeric = 1e-6;      // closed spray vs numeric Christoffel spray
  double determinant = 1e-9;
  double numeric_inverse = 1e-9;
  double homogeneity = 1e-12;
  double berwald = 1e-12;           // absolute, N = 2 third cascade
  double landsberg = 1e-9;          // absolute, dotA entries
  double generating = 1e-8;
  double generating_third = 1e-6;
  double branch = 1e-6;             // K across b = 0
  double method_agreement = 1e-6;   // jets vs central-fd
  double connection_fd = 1e-8;      // absolute, analytic vs finite-difference Christoffels

  static Tolerances from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Box from which sample points x are drawn.
struct Sampling {
  double x_low = -0.5;
  double x_high = 0.5;
};

/// A parsed configuration document:
///   {"background": {...}, "charge": {"g": g},
///    "diff": {"method": "forward-jets"|"central-fd", "levels": n, "step_scale": s},
///    "tolerances": {...}, "sampling": {"x_low": lo, "x_high": hi}}
struct RunConfig {
  nlohmann::json background_json;
  BackgroundSpace space;
  Charge charge;
  DiffConfig diff;
  Tolerances tol;
  Sampling sampling;
};

/// Throws ConfigError (malformed document) or ChargeRangeError (|g| >= 2).
RunConfig parse_config(const nlohmann::json& j);
/// Reads and parses a config file. Throws ConfigError if unreadable.
RunConfig load_config(const std::string& path);

/// "0.1,0.2,-0.3" -> vector. Throws ConfigError.
Vector parse_csv_vector(const std::string& text);

}  // namespace finsler::app
