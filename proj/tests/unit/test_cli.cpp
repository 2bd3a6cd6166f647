#include "finsler/errors.hpp"
#include "finsler_app/commands.hpp"
#include "finsler_app/config.hpp"
#include "finsler_app/verify.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace finsler::app {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string config(const std::string& name) { return std::string(FINSLER_CONFIG_DIR) + "/" + name; }

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("finsler_cli_test_" + name); }

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = temp_path(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(Config, RejectsChargeOutsideOpenInterval) {
  for (double g : {2.0, -2.0, 2.5}) {
    json j = json::parse(slurp(config("warped.json")));
    j["charge"]["g"] = g;
    EXPECT_THROW(parse_config(j), ChargeRangeError) << g;
    const std::string path = write_temp("bad_charge.json", j.dump());
    std::ostringstream out, err;
    EXPECT_EQ(cmd_verify({path, 1, 5, std::nullopt}, out, err), kExitUsage);
    EXPECT_NE(err.str().find("-2 < g < 2"), std::string::npos) << err.str();
  }
}

TEST(Config, MalformedDocumentsAreUsageErrors) {
  EXPECT_THROW(parse_config(json::parse(R"({"charge": {"g": 0.5}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"background": {"kind": "warped", "dim": 3}, "charge": {}})")),
               ConfigError);
  EXPECT_THROW(parse_csv_vector("0.1,,0.3"), ConfigError);
  EXPECT_THROW(parse_csv_vector("abc"), ConfigError);
  EXPECT_EQ(parse_csv_vector("0.5,-1,2e-3").size(), 3);
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify({"/nonexistent/config.json", 1, 5, std::nullopt}, out, err), kExitUsage);
}

TEST(Verify, WarpedConfigPasses) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify({config("warped.json"), 42, 50, std::nullopt}, out, err), kExitPass) << out.str();
  EXPECT_TRUE(err.str().empty());
}

TEST(Verify, TwoDimensionalReportContainsBerwaldRow) {
  const VerifyReport rep = run_verification(load_config(config("warped2d.json")), 7, 20);
  bool found = false;
  for (const auto& r : rep.records)
    if (r.name == "G3 ≡ 0 (Berwald)") {
      found = true;
      EXPECT_TRUE(r.passed);
    }
  EXPECT_TRUE(found);
  EXPECT_TRUE(rep.passed);
}

TEST(Verify, JsonReportIsDeterministic) {
  const std::string a = temp_path("report_a.json").string();
  const std::string b = temp_path("report_b.json").string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_verify({config("normal.json"), 9, 10, a}, out, err), kExitPass);
  ASSERT_EQ(cmd_verify({config("normal.json"), 9, 10, b}, out, err), kExitPass);
  const std::string ta = slurp(a);
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b));
  const json j = json::parse(ta);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["samples"], 10);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_GT(j["identities"].size(), 10u);
}

TEST(Verify, UnwritableJsonPathIsUsageError) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify({config("warped.json"), 1, 3, std::string("/nonexistent/dir/r.json")}, out, err), kExitUsage);
}

TEST(Eval, ZeroChargeGivesRiemannianLength) {
  json j = json::parse(slurp(config("normal.json")));
  j["charge"]["g"] = 0.0;
  const RunConfig cfg = parse_config(j);
  const Vector x = parse_csv_vector("0.1,0.2,-0.1");
  const Vector y = parse_csv_vector("0.3,-0.7,0.5");
  const json e = evaluate_point(cfg, x, y);
  EXPECT_NEAR(e["K"].get<double>(), e["S"].get<double>(), 1e-14 * e["S"].get<double>());
  EXPECT_TRUE(e["singular"].empty());
}

TEST(Eval, ConstructionPointValue) {
  // warped.json: g = 1, b = dt and sigma(0) = 1, so y = (1, 1, 0) at the origin has b = q = 1.
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval(config("warped.json"), "0,0,0", "1,1,0", out, err), kExitPass) << err.str();
  const json e = json::parse(out.str());
  EXPECT_NEAR(e["b"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(e["q"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(e["K"].get<double>(), 3.1705527203181942, 1e-14);
  EXPECT_FALSE(e["in_finsleroid"].get<bool>());
}

TEST(Eval, CollinearVelocityListsSingularFields) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval(config("warped.json"), "0,0,0", "2,0,0", out, err), kExitPass) << err.str();
  const json e = json::parse(out.str());
  EXPECT_FALSE(e.contains("g_dn"));
  EXPECT_FALSE(e.contains("G_up"));
  EXPECT_EQ(e["singular"].size(), 5u);
  EXPECT_TRUE(std::isfinite(e["K"].get<double>()));
  std::ostringstream out2, err2;
  EXPECT_EQ(cmd_eval(config("warped.json"), "0,0", "1,1,0", out2, err2), kExitUsage);
}

TEST(Geodesic, WritesCsvAndSummary) {
  const std::string csv = temp_path("trace.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_geodesic({config("warped.json"), "0,0,0", "0.6,-0.5,0.4", 0.5, 0.01, csv}, out, err), kExitPass)
      << err.str();
  EXPECT_NE(out.str().find("points=51"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("truncated=no"), std::string::npos);
  std::istringstream is(slurp(csv));
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "t,x1,x2,x3,y1,y2,y3,K");
}

TEST(Geodesic, BadArgumentsAreUsageErrors) {
  const std::string csv = temp_path("unused.csv").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_geodesic({config("warped.json"), "0,0,0", "0.6,-0.5,0.4", 0.5, 0.0, csv}, out, err), kExitUsage);
  EXPECT_EQ(cmd_geodesic({config("warped.json"), "0,0,0", "0.6,-0.5,0.4", 0.5, -0.1, csv}, out, err), kExitUsage);
  EXPECT_EQ(cmd_geodesic({config("warped.json"), "0,0,0", "0.6,-0.5,0.4", 0.5, 0.01, "/nonexistent/dir/t.csv"}, out,
                         err),
            kExitUsage);
  EXPECT_EQ(cmd_geodesic({config("warped.json"), "0,0", "0.6,-0.5,0.4", 0.5, 0.01, csv}, out, err), kExitUsage);
}

}  // namespace
}  // namespace finsler::app
