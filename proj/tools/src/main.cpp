#include "finsler_app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace finsler::app;
  CLI::App app{"Finsleroid-Finsler metric, spray and geodesic toolkit"};
  app.require_subcommand(1);

  VerifyOptions vopt;
  std::string vjson;
  auto* verify = app.add_subcommand("verify", "Check every identity over seeded random samples");
  verify->add_option("--config", vopt.config_path, "JSON config")->required();
  verify->add_option("--seed", vopt.seed, "PRNG seed")->required();
  verify->add_option("--samples", vopt.samples, "Number of random (x, y) samples")->required();
  verify->add_option("--json", vjson, "Write the JSON report here");

  std::string econfig, ex, ey;
  auto* eval = app.add_subcommand("eval", "Print every quantity at one (x, y) as JSON");
  eval->add_option("--config", econfig, "JSON config")->required();
  eval->add_option("--x", ex, "Point, comma separated")->required();
  eval->add_option("--y", ey, "Tangent vector, comma separated")->required();

  GeodesicOptions gopt;
  auto* geo = app.add_subcommand("geodesic", "Integrate a geodesic with RK4 and write a CSV trace");
  geo->add_option("--config", gopt.config_path, "JSON config")->required();
  geo->add_option("--x0", gopt.x0, "Initial point, comma separated")->required();
  geo->add_option("--y0", gopt.y0, "Initial velocity, comma separated")->required();
  geo->add_option("--t-end", gopt.t_end, "Final time")->required();
  geo->add_option("--step", gopt.step, "Fixed RK4 step")->required();
  geo->add_option("--out", gopt.out_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (*verify) {
    if (!vjson.empty()) vopt.json_path = vjson;
    return cmd_verify(vopt, std::cout, std::cerr);
  }
  if (*eval) return cmd_eval(econfig, ex, ey, std::cout, std::cerr);
  return cmd_geodesic(gopt, std::cout, std::cerr);
}
