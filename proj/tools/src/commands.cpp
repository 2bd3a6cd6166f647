#include "finsler_app/commands.hpp"

#include "finsler/errors.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/spray.hpp"
#include "finsler_app/verify.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace finsler::app {

namespace {

using nlohmann::json;

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

}  // namespace

json evaluate_point(const RunConfig& cfg, const Vector& x, const Vector& y) {
  const Site site = site_at(cfg.space, x);
  const Frame f = frame_at(site, y);
  const auto s = evaluate_K(cfg.charge, f);
  json j;
  j["g"] = cfg.charge.g;
  j["K"] = s.K;
  j["B"] = s.B;
  j["Phi"] = s.Phi;
  j["J"] = s.J;
  j["L"] = s.L;
  j["S"] = f.S;
  j["b"] = f.b;
  j["q"] = f.q;
  j["in_finsleroid"] = s.K <= 1.0;
  j["y_dn"] = to_json(lower_y(cfg.charge, f, s.K, s.B));
  if (f.regular()) {
    const MetricEval m = evaluate_metric(cfg.charge, f);
    const Connection conn = connection_at(cfg.space, x, cfg.diff);
    j["g_dn"] = to_json(m.g_dn);
    j["g_up"] = to_json(m.g_up);
    j["det_ratio"] = m.det_ratio;
    j["A_dn"] = to_json(m.A_dn);
    j["G_up"] = to_json(geodesic_spray_closed(cfg.charge, f, conn));
    j["singular"] = json::array();
  } else {
    j["singular"] = json::array({"g_dn", "g_up", "det_ratio", "A_dn", "G_up"});
  }
  return j;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  VerifyReport rep;
  try {
    const RunConfig cfg = load_config(opt.config_path);
    rep = run_verification(cfg, opt.seed, opt.samples);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  rep.print_table(out);
  if (opt.json_path) {
    std::ofstream js(*opt.json_path);
    if (!js) {
      err << "error: cannot write " << *opt.json_path << '\n';
      return kExitUsage;
    }
    js << rep.to_json().dump(2) << '\n';
    if (!js) {
      err << "error: failed writing " << *opt.json_path << '\n';
      return kExitUsage;
    }
  }
  return rep.passed ? kExitPass : kExitFailure;
}

int cmd_eval(const std::string& config_path, const std::string& x, const std::string& y,
             std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    out << std::setw(2) << evaluate_point(cfg, parse_csv_vector(x), parse_csv_vector(y)) << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitPass;
}

int cmd_geodesic(const GeodesicOptions& opt, std::ostream& out, std::ostream& err) {
  GeodesicTrace trace;
  try {
    if (!(opt.step > 0.0)) throw ConfigError("--step must be > 0");
    if (!(opt.t_end > 0.0)) throw ConfigError("--t-end must be > 0");
    const RunConfig cfg = load_config(opt.config_path);
    const Vector x0 = parse_csv_vector(opt.x0);
    const Vector y0 = parse_csv_vector(opt.y0);
    if (x0.size() != cfg.space.dim() || y0.size() != cfg.space.dim())
      throw ConfigError("--x0 and --y0 need one entry per coordinate");
    std::ofstream csv(opt.out_path);
    if (!csv) throw ConfigError("cannot write " + opt.out_path);
    try {
      trace = integrate_geodesic(geodesic_spray_function(cfg.space, cfg.charge, cfg.diff), x0, y0,
                                 opt.t_end, opt.step, finsleroid_monitor(cfg.space, cfg.charge));
    } catch (const IntegrationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitFailure;
    }
    write_trace_csv(csv, trace);
    if (!csv) throw ConfigError("failed writing " + opt.out_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  out << "points=" << trace.size() << " t_final=" << trace.times.back()
      << " max_K_drift=" << std::scientific << std::setprecision(3) << trace.max_K_drift
      << " truncated=" << (trace.truncated ? "yes" : "no");
  if (trace.truncated) out << " reason=\"" << trace.truncation_reason << '"';
  out << '\n';
  return kExitPass;
}

}  // namespace finsler::app
