#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dare/problems.hpp"
#include "dare/riccati.hpp"

namespace dare::cli {

enum class Command { Solve, Bench, CompareOrders, Verify };

enum class SourceKind { Example1, Example2, Scalar, Random, File };

struct ProblemSource {
  SourceKind kind = SourceKind::Example1;
  Example1Params example1;
  std::complex<double> scalar_a{2.0, 0.0};
  double scalar_g = 1.0;
  double scalar_h = 0.0;
  long random_n = 5;
  std::optional<double> random_cap;
  std::filesystem::path file;
};

struct RunConfig {
  Command command = Command::Solve;
  ProblemSource source;
  /// 1 selects the plain iteration, r >= 2 the accelerated iteration of order r.
  std::vector<int> orders{2};
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> stagnation_window;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
  bool write_csv = true;
  bool write_json = true;
  bool timing = false;
  int repeat = 3;
  std::optional<std::filesystem::path> save_problem;
};

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutputDirEnv = "DARE_OUTPUT_DIR";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Parses argv. Returns the config, or an exit code when parsing ended the run
/// (help printed, or a usage error reported on `err`).
struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
};
ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Builds the problem named by the source (seed applies to example1 and random).
DareProblemd build_problem(const ProblemSource& src, std::uint64_t seed);

/// Short label used as the stem of output file names.
std::string problem_label(const ProblemSource& src);

/// Executes the command. 0 on success, 2 when a mandatory run did not converge
/// (or, for verify, when a check failed), 1 on usage or I/O errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool passed = false;
  bool skipped = false;
  std::string note;
};

/// Invariant suite for a single problem; used by the verify command.
std::vector<CheckResult> verify_problem(const DareProblemd& p, std::uint64_t seed);

}  // namespace dare::cli
