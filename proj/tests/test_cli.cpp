#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dare/cli.hpp"
#include "dare/io.hpp"

using namespace dare;
namespace fs = std::filesystem;

namespace {

cli::ParseOutcome parse(std::vector<const char*> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "dare");
  std::ostringstream out, err;
  auto r = cli::parse_args(static_cast<int>(args.size()), args.data(), out, err);
  if (err_text) *err_text = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dare_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_config(cli::RunConfig cfg, const fs::path& dir) {
  cfg.output_dir = dir;
  std::ostringstream out, err;
  return cli::run(cfg, out, err);
}

}  // namespace

TEST_CASE("parse: example1 compare-orders") {
  const auto r = parse({"compare-orders", "--example1", "--epsilon", "1.5", "--orders", "2,3"});
  REQUIRE(r.config);
  CHECK(r.config->command == cli::Command::CompareOrders);
  CHECK(r.config->source.kind == cli::SourceKind::Example1);
  CHECK(r.config->source.example1.epsilon == 1.5);
  CHECK(r.config->orders == std::vector<int>{2, 3});
  CHECK(r.config->write_csv);
  CHECK(r.config->write_json);
}

TEST_CASE("parse: scalar, random and overrides") {
  const auto s = parse({"solve", "--scalar", "2,1,0", "--tol", "1e-9", "--max-iter", "50"});
  REQUIRE(s.config);
  CHECK(s.config->source.kind == cli::SourceKind::Scalar);
  CHECK(s.config->source.scalar_a == std::complex<double>(2, 0));
  CHECK(*s.config->tol == 1e-9);
  CHECK(*s.config->max_iter == 50);

  const auto r = parse({"verify", "--random", "--n", "5", "--seed", "7", "--format", "json"});
  REQUIRE(r.config);
  CHECK(r.config->source.random_n == 5);
  CHECK(r.config->seed == 7);
  CHECK_FALSE(r.config->write_csv);
}

TEST_CASE("parse: usage errors") {
  std::string err;
  CHECK(parse({"solve"}, &err).exit_code == cli::kExitUsage);
  CHECK(parse({"solve", "--example1", "--example2"}).exit_code == cli::kExitUsage);
  CHECK(parse({"solve", "--example1", "--orders", "0"}).exit_code == cli::kExitUsage);
  CHECK(parse({"solve", "--scalar", "1,2"}).exit_code == cli::kExitUsage);
  CHECK(parse({"solve", "--example1", "--format", "xml"}).exit_code == cli::kExitUsage);
  CHECK(parse({}).exit_code == cli::kExitUsage);
  const auto help = parse({"--help"});
  CHECK_FALSE(help.config);
  CHECK(help.exit_code == cli::kExitOk);
}

TEST_CASE("run: compare-orders on Example 1 writes two CSVs and a summary") {
  const auto dir = fresh_dir("compare");
  auto cfg = *parse({"compare-orders", "--example1", "--epsilon", "1.5", "--orders", "2,3"}).config;
  CHECK(run_config(cfg, dir) == cli::kExitOk);
  CHECK(fs::exists(dir / "example1_r2.csv"));
  CHECK(fs::exists(dir / "example1_r3.csv"));
  const auto summary = io::json::parse(slurp(dir / "example1_summary.json"));
  REQUIRE(summary.at("runs").size() == 2);
  for (const auto& run : summary.at("runs")) {
    CHECK(run.at("converged") == true);
    CHECK_NOTHROW(io::validate_report_json(run.at("report")));
  }
  CHECK(summary.at("problem").at("params").at("b").size() == 2);
}

TEST_CASE("run: Example 2 with the plain iteration exits 2") {
  const auto dir = fresh_dir("example2");
  auto cfg = *parse({"solve", "--example2", "--orders", "1", "--max-iter", "1000"}).config;
  CHECK(run_config(cfg, dir) == cli::kExitNotConverged);
  const auto rep = io::json::parse(slurp(dir / "example2_r1.json"));
  CHECK(rep.at("converged") == false);
}

TEST_CASE("run: verify on a random problem passes") {
  const auto dir = fresh_dir("verify");
  auto cfg = *parse({"verify", "--random", "--n", "5", "--seed", "7"}).config;
  CHECK(run_config(cfg, dir) == cli::kExitOk);
  const auto doc = io::json::parse(slurp(dir / "random_verify.json"));
  CHECK(doc.at("all_passed") == true);
}

TEST_CASE("run: unreadable problem file exits 1") {
  const auto dir = fresh_dir("badfile");
  io::write_text(dir / "bad.json", "{\"n\": 2, \"A\": []}");
  auto cfg = *parse({"solve", "--file", (dir / "bad.json").c_str()}).config;
  cfg.output_dir = dir;
  std::ostringstream out, err;
  CHECK(cli::run(cfg, out, err) == cli::kExitUsage);
  CHECK(err.str().find("bad.json") != std::string::npos);
  CHECK(err.str().find("/A") != std::string::npos);
}

TEST_CASE("run: saved problem reloads through --file") {
  const auto dir = fresh_dir("save");
  auto cfg = *parse({"solve", "--example1", "--seed", "4"}).config;
  cfg.save_problem = dir / "p.json";
  CHECK(run_config(cfg, dir) == cli::kExitOk);
  auto again = *parse({"solve", "--file", (dir / "p.json").c_str()}).config;
  CHECK(run_config(again, dir) == cli::kExitOk);
  CHECK(slurp(dir / "example1_r2.csv") == slurp(dir / "p_r2.csv"));
}

TEST_CASE("run: bench writes deterministic counters") {
  const auto dir = fresh_dir("bench");
  auto cfg = *parse({"bench", "--example1", "--orders", "1,2,4", "--repeat", "2"}).config;
  CHECK(run_config(cfg, dir) == cli::kExitOk);
  const std::string first = slurp(dir / "example1_bench.csv");
  CHECK(run_config(cfg, dir) == cli::kExitOk);
  CHECK(slurp(dir / "example1_bench.csv") == first);
  CHECK(first.find("elapsed_ms") == std::string::npos);
}

TEST_CASE("binary: output directory from the environment") {
  const auto dir = fresh_dir("env");
  const std::string cmd = "DARE_OUTPUT_DIR=" + dir.string() + " " + DARE_CLI_PATH +
                          " solve --scalar 0.5,1,1 --orders 1 > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "scalar_r1.csv"));
}
