#include "finsler_app/config.hpp"

#include "finsler/background_json.hpp"
#include "finsler/errors.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace finsler::app {

namespace {

using nlohmann::json;

struct TolField {
  const char* key;
  double Tolerances::*member;
};

constexpr TolField kTolFields[] = {
    {"algebraic", &Tolerances::algebraic},
    {"first_derivative", &Tolerances::first_derivative},
    {"second_derivative", &Tolerances::second_derivative},
    {"cartan", &Tolerances::cartan},
    {"third_jets", &Tolerances::third_jets},
    {"third_fd", &Tolerances::third_fd},
    {"spray_numeric", &Tolerances::spray_numeric},
    {"determinant", &Tolerances::determinant},
    {"numeric_inverse", &Tolerances::numeric_inverse},
    {"homogeneity", &Tolerances::homogeneity},
    {"berwald", &Tolerances::berwald},
    {"landsberg", &Tolerances::landsberg},
    {"generating", &Tolerances::generating},
    {"generating_third", &Tolerances::generating_third},
    {"branch", &Tolerances::branch},
    {"method_agreement", &Tolerances::method_agreement},
    {"connection_fd", &Tolerances::connection_fd},
};

double positive_number(const json& j, const std::string& what) {
  if (!j.is_number() || !(j.get<double>() > 0.0))
    throw ConfigError(what + " must be a positive number");
  return j.get<double>();
}

}  // namespace

Tolerances Tolerances::from_json(const json& j) {
  Tolerances t;
  if (j.is_null()) return t;
  if (!j.is_object()) throw ConfigError("tolerances must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& f : kTolFields) {
      if (key == f.key) {
        t.*(f.member) = positive_number(value, "tolerances." + key);
        known = true;
      }
    }
    if (!known) throw ConfigError("unknown tolerance \"" + key + "\"");
  }
  return t;
}

json Tolerances::to_json() const {
  json j = json::object();
  for (const auto& f : kTolFields) j[f.key] = this->*(f.member);
  return j;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("background")) throw ConfigError("config: missing \"background\"");
  if (!j.contains("charge") || !j.at("charge").is_object() || !j.at("charge").contains("g") ||
      !j.at("charge").at("g").is_number())
    throw ConfigError("config: \"charge\" must be an object with numeric \"g\"");

  const Charge charge = Charge::from_g(j.at("charge").at("g").get<double>());
  BackgroundSpace space = background_from_json(j.at("background"));

  DiffConfig diff;
  if (j.contains("diff")) {
    const json& d = j.at("diff");
    if (!d.is_object()) throw ConfigError("config: \"diff\" must be an object");
    if (d.contains("method")) {
      if (!d.at("method").is_string()) throw ConfigError("diff.method must be a string");
      diff.method = parse_diff_method(d.at("method").get<std::string>());
    }
    if (d.contains("levels")) {
      if (!d.at("levels").is_number_integer()) throw ConfigError("diff.levels must be an integer");
      diff.richardson_levels = d.at("levels").get<int>();
    }
    if (d.contains("step_scale")) diff.fd_step_scale = positive_number(d.at("step_scale"), "diff.step_scale");
    try {
      diff.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("diff: ") + e.what());
    }
  }

  Sampling sampling;
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    if (!s.is_object() || !s.value("x_low", json(0.0)).is_number() ||
        !s.value("x_high", json(0.0)).is_number())
      throw ConfigError("config: \"sampling\" must hold numeric x_low and x_high");
    sampling.x_low = s.value("x_low", sampling.x_low);
    sampling.x_high = s.value("x_high", sampling.x_high);
    if (!(sampling.x_low < sampling.x_high)) throw ConfigError("sampling: x_low must be < x_high");
  }

  return RunConfig{j.at("background"), std::move(space), charge, diff,
                   Tolerances::from_json(j.value("tolerances", json())), sampling};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Vector parse_csv_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: \"" + item + "\" in \"" + text + "\"");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigError("not a number: \"" + item + "\" in \"" + text + "\"");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("empty coordinate list");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace finsler::app
