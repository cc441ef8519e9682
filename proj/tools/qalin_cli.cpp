#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qalin/errors.hpp"
#include "qalin/experiments.hpp"
#include "qalin/model_spec.hpp"
#include "qalin/qubo.hpp"
#include "qalin/rate.hpp"
#include "qalin/solver.hpp"

namespace {

using namespace qalin;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr const char* kOutputDirEnv = "QALIN_OUTPUT_DIR";

// Errors that map to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

constexpr const char* kModelGrammar = R"(Model specs:
  normal                         untruncated normal correction
  a1 | a2 | a3 | a4              truncated-normal presets (-2,2) (0,2) (0.5,2) (0.5,1)
  trunc:d1=X:d2=Y                truncated normal on (X, Y)
  boltzmann:KIND:r=R:p=P         finite-qubit Boltzmann sampler, KIND = positive | signed
Lists are comma separated, e.g. a1,a2,boltzmann:positive:r=-1:p=1.
Output goes to --out, else to $QALIN_OUTPUT_DIR/<default name>, else stdout.
Exit codes: 0 ok, 1 domain or verification failure, 2 usage error.)";

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CorrectionModel parse_or_usage(const std::string& text) {
  try {
    return parse_model(text);
  } catch (const ModelSpecError& e) {
    throw UsageError(std::string(e.what()) + "\n  " + text + "\n  " + std::string(e.column(), ' ') + "^");
  }
}

// Runs `write` against the resolved destination.
void emit(const std::string& out_path, const std::string& default_name,
          const std::function<void(std::ostream&)>& write) {
  std::string path = out_path;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / default_name).string();
    }
  }
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::string> header(const std::string& command, const std::string& config) {
  return {std::string("qalin ") + QALIN_VERSION + " " + command, "config: " + config};
}

struct SolveArgs {
  double a = 0, b = 0, beta = 0, tol = 0;
  std::string model, kind;
  std::optional<int> r, p;
  std::uint64_t seed = 0;
  int max_iter = 0;
  bool zero_l0 = false;
  std::string out;
};

int run_solve(const SolveArgs& args) {
  std::string spec = args.model;
  const bool bare_boltzmann = spec == "boltzmann";
  if (bare_boltzmann) {
    if (args.kind.empty() || !args.r || !args.p) {
      throw UsageError("--model boltzmann requires --kind, --r and --p");
    }
    spec += ":" + args.kind + ":r=" + std::to_string(*args.r) + ":p=" + std::to_string(*args.p);
  } else if (!args.kind.empty() || args.r || args.p) {
    throw UsageError("--kind/--r/--p only apply to --model boltzmann");
  }
  const auto model = parse_or_usage(spec);
  const auto inst = normalize(args.a, args.b);
  const SolveOptions opts{.beta = args.beta, .seed = args.seed, .max_iter = args.max_iter,
                          .tol = args.tol, .zero_initial_exponent = args.zero_l0};
  const auto trace = solve(inst, model, opts);
  const std::string config = "a=" + num(args.a) + " b=" + num(args.b) + " beta=" + num(args.beta) +
                             " model=" + model_id(model) + " seed=" + std::to_string(args.seed) +
                             " max_iter=" + std::to_string(args.max_iter) + " tol=" + num(args.tol) +
                             " zero_l0=" + (args.zero_l0 ? "1" : "0") +
                             " normalized_a=" + num(inst.a) + " normalized_b=" + num(inst.b);
  emit(args.out, "trace.csv", [&](std::ostream& out) { write_trace_csv(out, trace, header("solve", config)); });
  return kOk;
}

struct QuboArgs {
  double a = 0, b = 0;
  int r = 0, p = 0;
  std::string format = "coo";
  std::string out;
  bool verify = false;
};

int run_qubo(const QuboArgs& args) {
  const BitRange range{args.r, args.p};
  try {
    validate(range);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto problem = build_qubo(args.a, args.b, range);
  const auto format = args.format == "json" ? QuboFormat::Json : QuboFormat::CooText;
  const std::string config = "a=" + num(args.a) + " b=" + num(args.b) + " r=" + std::to_string(args.r) +
                             " p=" + std::to_string(args.p) + " format=" + args.format;
  emit(args.out, "qubo." + std::string(args.format == "json" ? "json" : "coo"),
       [&](std::ostream& out) { export_qubo(problem, format, out, header("qubo", config)); });
  if (args.verify) {
    if (range.width() + 1 > 12) throw UsageError("--verify supports at most 12 qubits (p - r + 1 <= 12)");
    const double dev = max_identity_deviation(problem);
    std::cerr << "max deviation " << num(dev) << '\n';
    if (!(dev <= 1e-12)) {
      std::cerr << "verification failed (tolerance 1e-12)\n";
      return kFailure;
    }
  }
  return kOk;
}

struct RateArgs {
  std::string models;
  double beta_min = 0, beta_max = 0;
  int beta_steps = 0;
  int a_steps = AGridSpec{}.points;
  int c_steps = CGridSpec{}.points;
  std::vector<double> a_values;
  int threads = 1;
  std::string out;
};

int run_rate_curve(const RateArgs& args) {
  if (args.models.empty()) throw UsageError("--models must name at least one model");
  std::vector<CorrectionModel> models;
  try {
    models = parse_model_list(args.models);
  } catch (const ModelSpecError& e) {
    throw UsageError(std::string(e.what()) + "\n  " + args.models + "\n  " + std::string(e.column(), ' ') + "^");
  }
  if (!(args.beta_min > 0.0) || args.beta_max < args.beta_min) {
    throw UsageError("need 0 < --beta-min <= --beta-max");
  }
  RateOptions opts;
  opts.a_grid.points = args.a_steps;
  opts.c_grid.points = args.c_steps;
  opts.threads = args.threads;
  const auto betas = linear_grid(args.beta_min, args.beta_max, args.beta_steps);
  const auto points = rate_curve(models, betas, opts, args.a_values);
  std::string config = "models=" + args.models + " beta_min=" + num(args.beta_min) +
                       " beta_max=" + num(args.beta_max) + " beta_steps=" + std::to_string(args.beta_steps) +
                       " a_steps=" + std::to_string(args.a_steps) + " c_steps=" + std::to_string(args.c_steps);
  for (double a : args.a_values) config += " a=" + num(a);
  emit(args.out, "rate_curve.csv", [&](std::ostream& out) { write_rate_csv(out, points, header("rate-curve", config)); });
  return kOk;
}

struct McArgs {
  std::string model;
  double a = 0.5, b = 0.7, beta = 0, s = 1.0;
  int n_traj = 1000, n_iter = 40, threads = 1;
  std::uint64_t seed = 0;
  bool zero_l0 = false, standard_l0 = false;
  std::string format = "json";
  std::string out;
};

int run_mc(const McArgs& args) {
  const auto model = parse_or_usage(args.model);
  if (args.s < 1.0) throw UsageError("--s must be >= 1");
  if (args.n_traj < 1 || args.n_iter < 1) throw UsageError("--n-traj and --n-iter must be positive");
  McOptions opts{.s = args.s, .n_traj = args.n_traj, .n_iter = args.n_iter, .seed = args.seed,
                 .threads = args.threads};
  if (args.zero_l0) opts.zero_initial_exponent = true;
  if (args.standard_l0) opts.zero_initial_exponent = false;
  const auto summary = mc_convergence(model, args.a, args.b, args.beta, opts);
  const bool zero_l = opts.zero_initial_exponent.value_or(std::holds_alternative<NormalModel>(model));
  const std::string config = "model=" + model_id(model) + " a=" + num(args.a) + " b=" + num(args.b) +
                             " beta=" + num(args.beta) + " s=" + num(args.s) +
                             " n_traj=" + std::to_string(args.n_traj) + " n_iter=" + std::to_string(args.n_iter) +
                             " seed=" + std::to_string(args.seed) + " zero_l0=" + (zero_l ? "1" : "0");
  const auto lines = header("mc", config);
  emit(args.out, "mc." + args.format, [&](std::ostream& out) {
    if (args.format == "csv") {
      write_mc_csv(out, summary, lines);
    } else {
      write_mc_json(out, summary, lines);
    }
  });
  return kOk;
}

struct LimitArgs {
  double a = 1.0, b = 0.5, beta = 1.0, d1 = 0.0, d2 = 2.0;
  std::string mode = "line";
  std::vector<int> widths{6, 10, 14, 16};
  std::string format = "csv";
  std::string out;
};

int run_limit_check(const LimitArgs& args) {
  std::vector<BitRange> ranges;
  for (int w : args.widths) {
    if (w < 1) throw UsageError("--widths entries must be positive");
    ranges.push_back(args.mode == "line" ? BitRange{-(w / 2), w - w / 2} : BitRange{0, w});
  }
  const LimitMode mode = args.mode == "line" ? LimitMode{FullLine{}} : LimitMode{Interval{args.d1, args.d2}};
  std::vector<LimitRow> rows;
  try {
    rows = limit_check(args.a, args.b, args.beta, ranges, mode);
  } catch (const ResourceLimit& e) {
    throw UsageError(e.what());
  }
  std::string config = "a=" + num(args.a) + " b=" + num(args.b) + " beta=" + num(args.beta) + " mode=" + args.mode;
  if (args.mode == "interval") config += " d1=" + num(args.d1) + " d2=" + num(args.d2);
  const auto lines = header("limit-check", config);
  emit(args.out, "limit_check." + args.format, [&](std::ostream& out) {
    if (args.format == "csv") {
      write_limit_csv(out, rows, lines);
      return;
    }
    nlohmann::json doc;
    doc["config"] = lines;
    auto arr = nlohmann::json::array();
    for (const auto& row : rows) {
      arr.push_back({{"r", row.range.r}, {"p", row.range.p}, {"width", row.range.width()},
                     {"support_size", row.support_size}, {"ks", row.ks}});
    }
    doc["rows"] = std::move(arr);
    out << doc.dump(2) << '\n';
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qalin: annealer-driven iterative refinement for a x = b"};
  app.footer(kModelGrammar);
  app.set_version_flag("--version", std::string(QALIN_VERSION));
  app.require_subcommand(1);

  std::function<int()> action;

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Run one refinement trajectory and write its trace CSV");
  solve_cmd->add_option("--a", solve_args.a, "Coefficient a (nonzero)")->required();
  solve_cmd->add_option("--b", solve_args.b, "Right-hand side b")->required();
  solve_cmd->add_option("--beta", solve_args.beta, "Sampler precision beta")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_option("--model", solve_args.model, "Model spec, or bare 'boltzmann' with --kind/--r/--p")->required();
  solve_cmd->add_option("--kind", solve_args.kind, "Boltzmann support kind")->check(CLI::IsMember({"signed", "positive"}));
  solve_cmd->add_option("--r", solve_args.r, "Lowest bit exponent");
  solve_cmd->add_option("--p", solve_args.p, "Highest bit exponent");
  solve_cmd->add_option("--seed", solve_args.seed, "Random stream seed")->required();
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "Iteration limit")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", solve_args.tol, "Stop once |b - a x| <= tol")->check(CLI::NonNegativeNumber);
  solve_cmd->add_flag("--paper-l0", solve_args.zero_l0, "Use l = 0 on the first step");
  solve_cmd->add_option("--out", solve_args.out, "Output file ('-' for stdout)");
  solve_cmd->callback([&] { action = [&] { return run_solve(solve_args); }; });

  QuboArgs qubo_args;
  auto* qubo_cmd = app.add_subcommand("qubo", "Export the QUBO for (a x - b)^2 in two's-complement encoding");
  qubo_cmd->add_option("--a", qubo_args.a, "Coefficient a (nonzero)")->required();
  qubo_cmd->add_option("--b", qubo_args.b, "Right-hand side b")->required();
  qubo_cmd->add_option("--r", qubo_args.r, "Lowest bit exponent")->required();
  qubo_cmd->add_option("--p", qubo_args.p, "Sign bit exponent")->required();
  qubo_cmd->add_option("--format", qubo_args.format, "coo or json")->check(CLI::IsMember({"coo", "json"}));
  qubo_cmd->add_option("--out", qubo_args.out, "Output file ('-' for stdout)");
  qubo_cmd->add_flag("--verify", qubo_args.verify, "Exhaustively check the energy identity (<= 12 qubits)");
  qubo_cmd->callback([&] { action = [&] { return run_qubo(qubo_args); }; });

  RateArgs rate_args;
  auto* rate_cmd = app.add_subcommand("rate-curve", "Tabulate E_max(beta) (and optional E(a, beta)) per model");
  rate_cmd->add_option("--models", rate_args.models, "Comma-separated model specs")->required();
  rate_cmd->add_option("--beta-min", rate_args.beta_min, "First beta")->required();
  rate_cmd->add_option("--beta-max", rate_args.beta_max, "Last beta")->required();
  rate_cmd->add_option("--beta-steps", rate_args.beta_steps, "Number of beta points")->required()->check(CLI::PositiveNumber);
  rate_cmd->add_option("--a-steps", rate_args.a_steps, "Grid points for the max over a")->check(CLI::Range(2, 100000));
  rate_cmd->add_option("--c-steps", rate_args.c_steps, "Grid points for the max over c")->check(CLI::Range(2, 100000));
  rate_cmd->add_option("--a-values", rate_args.a_values, "Also emit E(a, beta) rows for these a")->delimiter(',');
  rate_cmd->add_option("--threads", rate_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  rate_cmd->add_option("--out", rate_args.out, "Output file ('-' for stdout)");
  rate_cmd->callback([&] { action = [&] { return run_rate_curve(rate_args); }; });

  McArgs mc_args;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo convergence summary of the error recursion");
  mc_cmd->add_option("--model", mc_args.model, "Model spec")->required();
  mc_cmd->add_option("--a", mc_args.a, "Coefficient a");
  mc_cmd->add_option("--b", mc_args.b, "Right-hand side b");
  mc_cmd->add_option("--beta", mc_args.beta, "Sampler precision beta")->required()->check(CLI::PositiveNumber);
  mc_cmd->add_option("--s", mc_args.s, "Scale factor s >= 1 for the s^n-scaled error outcome");
  mc_cmd->add_option("--n-traj", mc_args.n_traj, "Trajectories");
  mc_cmd->add_option("--n-iter", mc_args.n_iter, "Iterations per trajectory");
  mc_cmd->add_option("--seed", mc_args.seed, "Random stream seed");
  mc_cmd->add_option("--threads", mc_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* zero_flag = mc_cmd->add_flag("--paper-l0", mc_args.zero_l0, "Force l = 0 on the first step");
  mc_cmd->add_flag("--standard-l0", mc_args.standard_l0, "Force the residual exponent on the first step")->excludes(zero_flag);
  mc_cmd->add_option("--format", mc_args.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  mc_cmd->add_option("--out", mc_args.out, "Output file ('-' for stdout)");
  mc_cmd->callback([&] { action = [&] { return run_mc(mc_args); }; });

  LimitArgs limit_args;
  auto* limit_cmd = app.add_subcommand("limit-check", "KS distance of finite Boltzmann laws to their normal limits");
  limit_cmd->add_option("--a", limit_args.a, "Coefficient a");
  limit_cmd->add_option("--b", limit_args.b, "Right-hand side b");
  limit_cmd->add_option("--beta", limit_args.beta, "Sampler precision beta")->check(CLI::PositiveNumber);
  limit_cmd->add_option("--mode", limit_args.mode, "line or interval")->check(CLI::IsMember({"line", "interval"}));
  limit_cmd->add_option("--d1", limit_args.d1, "Interval lower end");
  limit_cmd->add_option("--d2", limit_args.d2, "Interval upper end");
  limit_cmd->add_option("--widths", limit_args.widths, "Bit widths p - r, nondecreasing")->delimiter(',');
  limit_cmd->add_option("--format", limit_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  limit_cmd->add_option("--out", limit_args.out, "Output file ('-' for stdout)");
  limit_cmd->callback([&] { action = [&] { return run_limit_check(limit_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DegenerateProblem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
