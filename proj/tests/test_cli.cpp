#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "nleig/nleig.hpp"

using namespace nleig;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nleig_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const Json& cfg) {
  const fs::path p = dir / "cfg.json";
  write_file_atomic(p, cfg.dump(2));
  return p;
}

struct Process {
  int exit_code = -1;
  std::string stderr_text;
  std::string stdout_text;
};

Process run_cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string(NLEIG_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Process p;
  p.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  p.stderr_text = read_file(err);
  p.stdout_text = read_file(out);
  return p;
}

Json small_solve_config() {
  return Json{{"kernel", {{"kind", "gaussian"}, {"width", 1.0}}},
              {"nonlinearity", {{"kind", "exp"}}},
              {"grid", {{"L", 25.0}, {"n", 2000}}},
              {"K", 1.0}};
}

}  // namespace

TEST(Cli, SolveHappyPath) {
  const fs::path dir = scratch("solve");
  const fs::path cfg = write_config(dir, small_solve_config());
  const Process p = run_cli("solve --config " + cfg.string() + " --output " + (dir / "out").string(), dir);
  ASSERT_EQ(p.exit_code, 0) << p.stderr_text;
  for (const char* f : {"solution.json", "V.csv", "U.csv", "meta.json"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const Json sol = Json::parse(read_file(dir / "out" / "solution.json"));
  EXPECT_TRUE(sol["converged"].get<bool>());
  EXPECT_GT(sol["sigma"].get<double>(), 1.0);
  const Json meta = Json::parse(read_file(dir / "out" / "meta.json"));
  EXPECT_EQ(meta["version"], kVersion);
  EXPECT_FALSE(meta["unvalidated"].get<bool>());
  EXPECT_EQ(meta["config"]["solver"]["tol_residual"].get<double>(), 1e-10);
  EXPECT_TRUE(meta.contains("stopping_rule"));
  EXPECT_EQ(read_file(dir / "out" / "V.csv").substr(0, 8), "x,value\n");
}

TEST(Cli, MetaJsonSufficesToRerun) {
  const fs::path dir = scratch("rerun");
  const fs::path cfg = write_config(dir, small_solve_config());
  ASSERT_EQ(run_cli("solve --config " + cfg.string() + " --output " + (dir / "a").string(), dir).exit_code, 0);
  const Process p =
      run_cli("solve --config " + (dir / "a" / "meta.json").string() + " --output " + (dir / "b").string(), dir);
  ASSERT_EQ(p.exit_code, 0) << p.stderr_text;
  EXPECT_EQ(read_file(dir / "a" / "V.csv"), read_file(dir / "b" / "V.csv"));
  EXPECT_EQ(read_file(dir / "a" / "solution.json"), read_file(dir / "b" / "solution.json"));
}

TEST(Cli, TwoBumpValidationFails) {
  const fs::path dir = scratch("twobump");
  Json cfg = small_solve_config();
  cfg["kernel"] = {{"kind", "two_bump"}, {"width", 1.0}, {"separation", 3.0}};
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("validate-kernel --config " + path.string() + " --output " + (dir / "out").string(), dir);
  EXPECT_EQ(p.exit_code, 2);
  EXPECT_NE(p.stderr_text.find("unimodality"), std::string::npos) << p.stderr_text;
  const Process q = run_cli("validate-kernel --config " + path.string() + " --output " + (dir / "explore").string() +
                                " --allow-nonstandard",
                            dir);
  EXPECT_EQ(q.exit_code, 0) << q.stderr_text;
  const Json meta = Json::parse(read_file(dir / "explore" / "meta.json"));
  EXPECT_TRUE(meta["unvalidated"].get<bool>());
  const Json v = Json::parse(read_file(dir / "explore" / "validation.json"));
  EXPECT_FALSE(v["pass"].get<bool>());
}

TEST(Cli, HighEnergyRejectsIndicator) {
  const fs::path dir = scratch("he_indicator");
  Json cfg = small_solve_config();
  cfg["kernel"] = {{"kind", "indicator"}};
  cfg["grid"] = {{"L", 25.0}, {"n", 4000}};
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("high-energy --config " + path.string() + " --output " + (dir / "out").string(), dir);
  EXPECT_EQ(p.exit_code, 2);
  EXPECT_NE(p.stderr_text.find("high-energy"), std::string::npos) << p.stderr_text;
}

TEST(Cli, InvalidConfigExitsTwo) {
  const fs::path dir = scratch("invalid");
  Json cfg = small_solve_config();
  cfg["bogus"] = 1;
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("solve --config " + path.string() + " --output " + (dir / "out").string(), dir);
  EXPECT_EQ(p.exit_code, 2);
  EXPECT_NE(p.stderr_text.find("bogus"), std::string::npos);
}

TEST(Cli, NonConvergenceExitsThree) {
  const fs::path dir = scratch("noconv");
  Json cfg = small_solve_config();
  cfg["solver"] = {{"max_iter", 5}};
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("solve --config " + path.string() + " --output " + (dir / "out").string(), dir);
  EXPECT_EQ(p.exit_code, 3);
  const Json sol = Json::parse(read_file(dir / "out" / "solution.json"));
  EXPECT_FALSE(sol["converged"].get<bool>());
}

TEST(Cli, SweepWritesTable) {
  const fs::path dir = scratch("sweep");
  Json cfg = small_solve_config();
  cfg["K_list"] = {0.5, 1.0};
  const fs::path path = write_config(dir, cfg);
  const Process p =
      run_cli("sweep-k --config " + path.string() + " --output " + (dir / "out").string() + " --threads 2", dir);
  ASSERT_EQ(p.exit_code, 0) << p.stderr_text;
  const std::string csv = read_file(dir / "out" / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "K,sigma,P,Q,residual,el_residual,iterations");
  EXPECT_TRUE(fs::exists(dir / "out" / "sweep.json"));
}

TEST(Cli, DecayWritesReport) {
  const fs::path dir = scratch("decay");
  const Json cfg = {{"kernel", {{"kind", "ode"}}},
                    {"nonlinearity", {{"kind", "quadratic"}, {"alpha", 1.0}, {"beta", 2.0}}},
                    {"grid", {{"L", 40.0}, {"n", 4096}}},
                    {"K", 1.0}};
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("decay --config " + path.string() + " --output " + (dir / "out").string(), dir);
  ASSERT_EQ(p.exit_code, 0) << p.stderr_text;
  const Json d = Json::parse(read_file(dir / "out" / "decay.json"));
  EXPECT_NEAR(d["lambda_fit"].get<double>(), d["lambda_theory"].get<double>(), 0.05 * d["lambda_theory"].get<double>());
  EXPECT_TRUE(fs::exists(dir / "out" / "a_c.csv"));
}

TEST(Cli, UniquenessProbeReportsSupport) {
  const fs::path dir = scratch("probe");
  Json cfg = small_solve_config();
  cfg["n_starts"] = 3;
  const fs::path path = write_config(dir, cfg);
  const Process p = run_cli("uniqueness-probe --config " + path.string() + " --output " + (dir / "out").string(), dir);
  ASSERT_EQ(p.exit_code, 0) << p.stderr_text;
  EXPECT_NE(p.stdout_text.find("conjecture support: yes"), std::string::npos);
  const Json r = Json::parse(read_file(dir / "out" / "uniqueness.json"));
  EXPECT_EQ(r["conjecture_support"], "yes");
}

TEST(Cli, UnknownCommandRejected) {
  const fs::path dir = scratch("unknown");
  const fs::path path = write_config(dir, small_solve_config());
  EXPECT_NE(run_cli("frobnicate --config " + path.string() + " --output " + dir.string(), dir).exit_code, 0);
}

TEST(EmitPlotData, HeaderAndSidecar) {
  const fs::path dir = scratch("emit");
  const Table t{{"eps", "sigma", "d_ratio", "profile_err"}, {{0.2, 1.01, 0.25, 0.1}, {0.1, 1.002, 0.2, 0.05}}};
  emit_plot_data(t, Json{{"d0", 0.48}}, dir / "kdv.csv");
  const std::string csv = read_file(dir / "kdv.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "eps,sigma,d_ratio,profile_err");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const Json side = Json::parse(read_file(dir / "kdv.json"));
  EXPECT_EQ(side["predictors"]["d0"].get<double>(), 0.48);
  emit_plot_data(t, Json{{"d0", 0.48}}, dir / "again.csv");
  EXPECT_EQ(read_file(dir / "again.csv"), csv);
}

TEST(EmitPlotData, EmptyRows) {
  const fs::path dir = scratch("emit_empty");
  try {
    emit_plot_data(Table{{"eps"}, {}}, Json::object(), dir / "x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyResult);
  }
}

TEST(ProfileCsv, RoundTripIsExact) {
  const fs::path dir = scratch("csv");
  const Grid g = make_grid(3.0, 64);
  const Profile p = Profile::sample(g, [](double x) { return std::exp(-x * x) / 3.0; });
  write_profile_csv(dir / "p.csv", p);
  const Profile q = read_profile_csv(dir / "p.csv", g);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(p[j], q[j]);
  EXPECT_THROW(read_profile_csv(dir / "p.csv", make_grid(3.0, 32)), Error);
}

TEST(RunConfig, DefaultsEchoed) {
  const RunConfig cfg = parse_run_config(Json::object());
  const Json j = to_json(cfg);
  EXPECT_EQ(j["kernel"]["kind"], "gaussian");
  EXPECT_EQ(j["grid"]["L"].get<double>(), 25.0);
  EXPECT_TRUE(j["c"].is_null());
  const RunConfig back = parse_run_config(j);
  EXPECT_EQ(to_json(back), j);
}
