#include "dare/cli.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <exception>
#include <future>
#include <ostream>
#include <sstream>
#include <utility>

#include "dare/analysis.hpp"
#include "dare/errors.hpp"
#include "dare/io.hpp"

namespace dare::cli {

namespace {

using io::json;

struct SourceFlags {
  bool example1 = false;
  bool example2 = false;
  bool random = false;
  std::string scalar;
  std::string file;
  double b_re = 0, b_im = 0;
  double scalar_a_im = 0;
  std::string formats = "csv,json";
};

void add_common_options(CLI::App& sub, RunConfig& cfg, SourceFlags& f) {
  sub.add_flag("--example1", f.example1, "5x5 family with a fixed 3x3 block and a seeded 2x2 block");
  sub.add_flag("--example2", f.example2, "fixed 7x7 instance with H = -3.5 I");
  sub.add_option("--scalar", f.scalar, "1x1 problem given as A,G,H (real A)");
  sub.add_option("--scalar-a-im", f.scalar_a_im, "imaginary part of the scalar A");
  sub.add_flag("--random", f.random, "random PSD problem (see --n, --seed, --cap)");
  sub.add_option("--file", f.file, "problem JSON file");

  sub.add_option("--epsilon", cfg.source.example1.epsilon, "example1: epsilon");
  sub.add_option("--g", cfg.source.example1.g, "example1: g");
  sub.add_option("--a", cfg.source.example1.a, "example1: a");
  sub.add_option("--c", cfg.source.example1.c, "example1: c");
  sub.add_option("--b-re", f.b_re, "example1: real part of b (default: drawn from the seed)");
  sub.add_option("--b-im", f.b_im, "example1: imaginary part of b");
  sub.add_option("--n", cfg.source.random_n, "random: dimension")->check(CLI::PositiveNumber);
  sub.add_option("--cap", cfg.source.random_cap, "random: cap on ||A||_2");
  sub.add_option("--seed", cfg.seed, "seed for example1 and random problems");

  sub.add_option("--orders", cfg.orders, "comma-separated orders; 1 = plain iteration")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub.add_option("--tol", cfg.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--max-iter", cfg.max_iter, "iteration budget")->check(CLI::PositiveNumber);
  sub.add_option("--stagnation-window", cfg.stagnation_window, "stagnation window")
      ->check(CLI::PositiveNumber);
  sub.add_option("--output-dir", cfg.output_dir, "directory for CSV/JSON output");
  sub.add_option("--format", f.formats, "subset of csv,json");
  sub.add_flag("--timing", cfg.timing, "record wall-clock times (outputs are then not reproducible)");
  sub.add_option("--repeat", cfg.repeat, "bench: repetitions per order")->check(CLI::PositiveNumber);
  sub.add_option("--save-problem", cfg.save_problem, "also write the problem as JSON");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

void resolve_source(RunConfig& cfg, const SourceFlags& f, const CLI::App& sub) {
  int count = int(f.example1) + int(f.example2) + int(f.random) + int(!f.scalar.empty()) +
              int(!f.file.empty());
  if (count != 1) {
    throw CLI::ValidationError("problem source",
                               "exactly one of --example1, --example2, --scalar, --random, --file");
  }
  if (f.example1) cfg.source.kind = SourceKind::Example1;
  if (f.example2) cfg.source.kind = SourceKind::Example2;
  if (f.random) cfg.source.kind = SourceKind::Random;
  if (!f.file.empty()) {
    cfg.source.kind = SourceKind::File;
    cfg.source.file = f.file;
  }
  if (!f.scalar.empty()) {
    const auto parts = split(f.scalar, ',');
    if (parts.size() != 3) throw CLI::ValidationError("--scalar", "expected A,G,H");
    try {
      cfg.source.kind = SourceKind::Scalar;
      cfg.source.scalar_a = {std::stod(parts[0]), f.scalar_a_im};
      cfg.source.scalar_g = std::stod(parts[1]);
      cfg.source.scalar_h = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--scalar", "expected three numbers A,G,H");
    }
  }
  if (sub.count("--b-re") || sub.count("--b-im")) cfg.source.example1.b = {f.b_re, f.b_im};
  cfg.source.example1.seed = cfg.seed;

  cfg.write_csv = cfg.write_json = false;
  for (const auto& fmt : split(f.formats, ',')) {
    if (fmt == "csv") {
      cfg.write_csv = true;
    } else if (fmt == "json") {
      cfg.write_json = true;
    } else {
      throw CLI::ValidationError("--format", "unknown format '" + fmt + "'");
    }
  }
  if (cfg.orders.empty()) throw CLI::ValidationError("--orders", "must not be empty");
}

StoppingRule<double> stopping_rule(const RunConfig& cfg, int order) {
  StoppingRule<double> s = order == 1 ? StoppingRule<double>::plain() : StoppingRule<double>::accelerated();
  if (cfg.tol) s.tol = *cfg.tol;
  if (cfg.max_iter) s.max_iter = *cfg.max_iter;
  if (cfg.stagnation_window) s.stagnation_window = *cfg.stagnation_window;
  s.record_timing = cfg.timing;
  return s;
}

struct RunOutcome {
  int order = 1;
  std::optional<SolveReport<double>> report;
  std::string error;

  bool converged() const { return report && report->converged; }
};

RunOutcome solve_one(const DareProblemd& p, const RunConfig& cfg, int order) {
  RunOutcome o;
  o.order = order;
  try {
    o.report = solve_with_order(p, order, stopping_rule(cfg, order));
  } catch (const Error& e) {
    o.error = e.what();
  }
  return o;
}

json run_entry(const DareProblemd& p, const RunOutcome& o) {
  json entry = {{"order", o.order}, {"converged", o.converged()}};
  if (!o.report) {
    entry["error"] = o.error;
    return entry;
  }
  const SolveReport<double>& rep = *o.report;
  entry["report"] = io::report_to_json(rep, false);

  RateReport<double> rates;
  if (rep.residual_history.size() >= 4) {
    RateOptions<double> opt;
    opt.step = o.order;
    rates = estimate_rates<double>(rep.residual_history, std::nullopt, opt);
  }
  json bound = nullptr;
  if (rep.converged) {
    try {
      rates = with_bound(rates, rate_bound_from_solution(p, rep.solution));
      bound = rates.predicted_bound;
    } catch (const Error&) {
    }
  }
  entry["rates"] = {{"r_linear_rate", rates.r_linear_rate ? json(*rates.r_linear_rate) : json(nullptr)},
                    {"r_superlinear_order", rates.r_superlinear_order ? json(*rates.r_superlinear_order)
                                                                      : json(nullptr)},
                    {"predicted_bound", bound},
                    {"bound_satisfied", rates.bound_satisfied}};
  const auto cls = classify_solution(p, rep);
  entry["classification"] = {{"is_solution", cls.is_solution},
                             {"minimality_evidence", to_string(cls.minimality_evidence)},
                             {"stabilizing", to_string(cls.stabilizing)}};
  return entry;
}

void print_outcome(std::ostream& out, const RunOutcome& o) {
  out << "order=" << o.order;
  if (!o.report) {
    out << " error=\"" << o.error << "\"\n";
    return;
  }
  const auto& rep = *o.report;
  out << " converged=" << (rep.converged ? "true" : "false") << " iterations=" << rep.iterations
      << " residual=" << io::format_double(rep.residual_history.back())
      << " termination=" << to_string(rep.termination);
  if (rep.closed_loop_spectrum) {
    out << " rho_closed_loop=" << io::format_double(rep.closed_loop_spectrum->spectral_radius);
  }
  out << '\n';
}

std::string order_stem(const std::string& label, int order) {
  return label + "_r" + std::to_string(order);
}

int cmd_solve(const RunConfig& cfg, const DareProblemd& p, const std::filesystem::path& dir,
              const std::string& label, std::ostream& out) {
  bool all_converged = true;
  for (int order : cfg.orders) {
    const RunOutcome o = solve_one(p, cfg, order);
    print_outcome(out, o);
    all_converged = all_converged && o.converged();
    if (!o.report) continue;
    if (cfg.write_csv) io::write_text(dir / (order_stem(label, order) + ".csv"), io::residual_csv(*o.report));
    if (cfg.write_json) {
      json doc = io::report_to_json(*o.report, true);
      io::validate_report_json(doc);
      io::write_text(dir / (order_stem(label, order) + ".json"), doc.dump(2) + "\n");
    }
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

json source_json(const RunConfig& cfg) {
  const ProblemSource& s = cfg.source;
  json j = {{"label", problem_label(s)}, {"seed", cfg.seed}};
  switch (s.kind) {
    case SourceKind::Example1: {
      const auto b = example1_b(s.example1);
      j["params"] = {{"epsilon", s.example1.epsilon}, {"g", s.example1.g}, {"a", s.example1.a},
                     {"c", s.example1.c}, {"b", {b.real(), b.imag()}}};
      break;
    }
    case SourceKind::Scalar:
      j["params"] = {{"A", {s.scalar_a.real(), s.scalar_a.imag()}}, {"G", s.scalar_g}, {"H", s.scalar_h}};
      break;
    case SourceKind::Random:
      j["params"] = {{"n", s.random_n}, {"cap", s.random_cap ? json(*s.random_cap) : json(nullptr)}};
      break;
    case SourceKind::File:
      j["params"] = {{"file", s.file.string()}};
      break;
    case SourceKind::Example2:
      break;
  }
  return j;
}

int cmd_compare(const RunConfig& cfg, const DareProblemd& p, const std::filesystem::path& dir,
                const std::string& label, std::ostream& out) {
  std::vector<std::future<RunOutcome>> jobs;
  for (int order : cfg.orders) {
    jobs.push_back(std::async(std::launch::async, [&p, &cfg, order] { return solve_one(p, cfg, order); }));
  }
  std::vector<RunOutcome> outcomes;
  for (auto& j : jobs) outcomes.push_back(j.get());

  bool all_converged = true;
  json runs = json::array();
  for (const RunOutcome& o : outcomes) {
    print_outcome(out, o);
    all_converged = all_converged && o.converged();
    json entry = run_entry(p, o);
    if (o.report) {
      io::validate_report_json(entry.at("report"));
      const std::string csv = order_stem(label, o.order) + ".csv";
      if (cfg.write_csv) io::write_text(dir / csv, io::residual_csv(*o.report));
      entry["csv"] = cfg.write_csv ? json(csv) : json(nullptr);
    }
    runs.push_back(std::move(entry));
  }
  if (cfg.write_json) {
    const json summary = {{"problem", source_json(cfg)},
                          {"guarantees_checked", p.guarantees_checked()},
                          {"runs", runs}};
    io::write_text(dir / (label + "_summary.json"), summary.dump(2) + "\n");
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_bench(const RunConfig& cfg, const DareProblemd& p, const std::filesystem::path& dir,
              const std::string& label, std::ostream& out) {
  std::string csv = "order,repeat,iterations,converged,final_residual,f_applications,riccati_applications";
  csv += cfg.timing ? ",elapsed_ms\n" : "\n";
  bool all_converged = true;
  for (int order : cfg.orders) {
    for (int rep_i = 1; rep_i <= cfg.repeat; ++rep_i) {
      const RunOutcome o = solve_one(p, cfg, order);
      all_converged = all_converged && o.converged();
      if (rep_i == 1) print_outcome(out, o);
      if (!o.report) continue;
      const auto& rep = *o.report;
      csv += std::to_string(order) + "," + std::to_string(rep_i) + "," + std::to_string(rep.iterations) +
             "," + (rep.converged ? "1" : "0") + "," + io::format_double(rep.residual_history.back()) +
             "," + std::to_string(rep.f_applications) + "," + std::to_string(rep.riccati_applications);
      if (cfg.timing) csv += "," + io::format_double(rep.elapsed_ms.back());
      csv += "\n";
    }
  }
  if (cfg.write_csv) io::write_text(dir / (label + "_bench.csv"), csv);
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_verify(const RunConfig& cfg, const DareProblemd& p, const std::filesystem::path& dir,
               const std::string& label, std::ostream& out) {
  const auto checks = verify_problem(p, cfg.seed);
  bool ok = true;
  json arr = json::array();
  for (const auto& c : checks) {
    const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    out << "[" << status << "] " << c.name << " value=" << io::format_double(c.value)
        << " threshold=" << io::format_double(c.threshold);
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << '\n';
    ok = ok && (c.skipped || c.passed);
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                   {"passed", c.passed}, {"skipped", c.skipped}, {"note", c.note}});
  }
  if (cfg.write_json) {
    const json doc = {{"problem", source_json(cfg)}, {"checks", arr}, {"all_passed", ok}};
    io::write_text(dir / (label + "_verify.json"), doc.dump(2) + "\n");
  }
  return ok ? kExitOk : kExitNotConverged;
}

}  // namespace

DareProblemd build_problem(const ProblemSource& src, std::uint64_t seed) {
  switch (src.kind) {
    case SourceKind::Example1: {
      Example1Params q = src.example1;
      q.seed = seed;
      return example1(q);
    }
    case SourceKind::Example2:
      return example2();
    case SourceKind::Scalar:
      return scalar_problem(src.scalar_a, src.scalar_g, src.scalar_h);
    case SourceKind::Random:
      return random_psd_problem(src.random_n, seed, src.random_cap);
    case SourceKind::File:
      return io::load_problem(src.file);
  }
  throw ValidationError("unknown problem source");
}

std::string problem_label(const ProblemSource& src) {
  switch (src.kind) {
    case SourceKind::Example1:
      return "example1";
    case SourceKind::Example2:
      return "example2";
    case SourceKind::Scalar:
      return "scalar";
    case SourceKind::Random:
      return "random";
    case SourceKind::File:
      return src.file.stem().string();
  }
  return "problem";
}

ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal positive semidefinite solutions of X = H + A* X (I + G X)^{-1} A"};
  app.require_subcommand(1);

  RunConfig cfg;
  SourceFlags flags;
  struct Sub {
    const char* name;
    Command cmd;
    const char* help;
  };
  const Sub subs[] = {
      {"solve", Command::Solve, "solve with each order and write residual CSV and report JSON"},
      {"bench", Command::Bench, "repeat solves and write work counters (and times with --timing)"},
      {"compare-orders", Command::CompareOrders, "one CSV per order plus a summary JSON"},
      {"verify", Command::Verify, "run the invariant suite on one problem"},
  };
  std::vector<std::pair<CLI::App*, Command>> apps;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common_options(*sub, cfg, flags);
    apps.emplace_back(sub, s.cmd);
  }

  try {
    app.parse(argc, argv);
    for (auto& [sub, cmd] : apps) {
      if (sub->parsed()) {
        cfg.command = cmd;
        resolve_source(cfg, flags, *sub);
        if (!sub->count("--output-dir")) {
          if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
        }
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
  }
  return {cfg, kExitOk};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  DareProblemd p;
  try {
    p = build_problem(cfg.source, cfg.seed);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string label = problem_label(cfg.source);
  const std::filesystem::path dir = cfg.output_dir;
  try {
    std::filesystem::create_directories(dir);
    if (cfg.save_problem) io::save_problem(*cfg.save_problem, p);
    switch (cfg.command) {
      case Command::Solve:
        return cmd_solve(cfg, p, dir, label, out);
      case Command::CompareOrders:
        return cmd_compare(cfg, p, dir, label, out);
      case Command::Bench:
        return cmd_bench(cfg, p, dir, label, out);
      case Command::Verify:
        return cmd_verify(cfg, p, dir, label, out);
    }
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dare::cli
