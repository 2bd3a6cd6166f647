#include "finsler/background_json.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace finsler {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("background: missing field \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError(std::string("background: \"") + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

int dimension(const json& j) {
  const json& v = field(j, "dim");
  if (!v.is_number_integer() || v.get<int>() < 2)
    throw ConfigError("background: \"dim\" must be an integer >= 2");
  return v.get<int>();
}

Vector vector_of(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string("background: ") + what + " must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string("background: ") + what + " must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix matrix_of(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("background: ") + what + " must be a matrix");
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = vector_of(v[static_cast<std::size_t>(i)], what);
    if (row.size() != n) throw ConfigError(std::string("background: ") + what + " must be square");
    out.row(i) = row.transpose();
  }
  return out;
}

BackgroundSpace euclidean(const json& j) {
  const int n = dimension(j);
  Vector dir = Vector::Unit(n, 0);
  if (j.contains("direction")) {
    dir = vector_of(j.at("direction"), "\"direction\"");
    if (dir.size() != n) throw ConfigError("background: \"direction\" must have dim entries");
  }
  return make_euclidean_space(n, dir, number_or(j, "twist", 0.0));
}

BackgroundSpace warped(const json& j) {
  const int n = dimension(j);
  const json& s = field(j, "sigma");
  const json& form = field(s, "form");
  if (form == "exp") return make_exponential_warped_space(n, number(s, "kappa"));
  if (form == "cosh") {
    const double l = number(s, "lambda");
    return make_warped_space(
        n, [l](double t) { return std::cosh(l * t); },
        [l](double t) { return l * std::sinh(l * t); }, "warped-cosh");
  }
  throw ConfigError("background: sigma.form must be \"exp\" or \"cosh\"");
}

BackgroundSpace tabulated(const json& j) {
  const Matrix a0 = matrix_of(field(j, "a0"), "\"a0\"");
  const Vector b0 = vector_of(field(j, "b0"), "\"b0\"");
  std::vector<Matrix> a_slopes;
  std::vector<Vector> b_slopes;
  if (j.contains("a_slopes"))
    for (const auto& m : j.at("a_slopes")) a_slopes.push_back(matrix_of(m, "\"a_slopes\""));
  if (j.contains("b_slopes"))
    for (const auto& v : j.at("b_slopes")) b_slopes.push_back(vector_of(v, "\"b_slopes\""));
  return make_tabulated_space(a0, a_slopes, b0, b_slopes);
}

}  // namespace

BackgroundSpace background_from_json(const nlohmann::json& j) {
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw ConfigError("background: \"kind\" must be a string");
  const auto k = kind.get<std::string>();
  try {
    if (k == "euclidean") return euclidean(j);
    if (k == "warped") return warped(j);
    if (k == "normal") return make_normal_space(dimension(j), number(j, "alpha"), number(j, "beta"));
    if (k == "tabulated") return tabulated(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("background: ") + e.what());
  }
  throw ConfigError("background: unknown kind \"" + k + "\"");
}

}  // namespace finsler
