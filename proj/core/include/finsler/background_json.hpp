#pragma once

#include "finsler/background.hpp"

#include <nlohmann/json.hpp>

namespace finsler {

/// Builds a background from its JSON description. Recognized kinds:
///   {"kind": "euclidean", "dim": N, "direction": [...], "twist": t}
///   {"kind": "warped", "dim": N, "sigma": {"form": "exp", "kappa": k}}
///   {"kind": "warped", "dim": N, "sigma": {"form": "cosh", "lambda": l}}
///   {"kind": "normal", "dim": N, "alpha": a, "beta": b}
///   {"kind": "tabulated", "a0": [[...]], "a_slopes": [[[...]]], "b0": [...], "b_slopes": [[...]]}
/// Throws ConfigError on missing or ill-typed fields.
BackgroundSpace background_from_json(const nlohmann::json& j);

}  // namespace finsler
