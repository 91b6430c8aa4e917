// Command-line front end: generation, polytope dumps, universality
// diagnostics, fingerprints, comparison, and coverage reports. Every
// artifact embeds its run manifest; replaying a manifest reproduces the
// output byte for byte regardless of the thread count.
//
// Exit codes: 0 success, 2 user/validation errors (machine-readable JSON on
// stderr), 1 internal failures.

#include <chrono>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <distcone/admissible.hpp>
#include <distcone/distance_matrix.hpp>
#include <distcone/io.hpp>
#include <distcone/matrix_distribution.hpp>
#include <distcone/sampler.hpp>
#include <distcone/universality.hpp>
#include <distcone/version.hpp>

using namespace distcone;

namespace {

struct CliError : std::runtime_error {
  CliError(std::string kind_, const std::string& msg)
      : std::runtime_error(msg), kind(std::move(kind_)) {}
  std::string kind;
};

std::string resolve_output(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* dir = std::getenv("DISTCONE_OUT_DIR"))
    return std::string(dir) + "/" + path;
  return path;
}

/// The command as recorded in artifacts: binary basename, without execution
/// details that must not influence output bytes (output path, thread count).
std::vector<std::string> normalized_command(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    if (i == 0) {
      const auto slash = arg.find_last_of('/');
      if (slash != std::string::npos) arg = arg.substr(slash + 1);
      out.push_back(std::move(arg));
      continue;
    }
    if (arg == "--threads" || arg == "-o" || arg == "--output") {
      ++i;  // skip its value
      continue;
    }
    if (arg.rfind("--threads=", 0) == 0 || arg.rfind("--output=", 0) == 0 ||
        arg.rfind("-o=", 0) == 0)
      continue;
    out.push_back(std::move(arg));
  }
  return out;
}

struct Emitter {
  std::string output;
  bool pretty = false;

  void emit(Json j, const Manifest& manifest) const {
    j["manifest"] = manifest_to_json(manifest);
    const std::string text = pretty ? j.dump(2) + "\n" : dump_artifact(j);
    if (output.empty()) {
      std::cout << text;
    } else {
      write_file(resolve_output(output), text);
    }
  }
};

Manifest make_manifest(const std::vector<std::string>& command,
                       std::optional<std::uint64_t> seed,
                       const std::vector<std::string>& inputs) {
  Manifest m;
  m.command = command;
  if (seed) {
    m.seed = *seed;
    m.has_seed = true;
  }
  for (const auto& path : inputs) m.input_digests.emplace_back(path, file_digest(path));
  return m;
}

Json compare_result_json(const CompareResult& r) {
  Json j;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["same"] = r.same;
  j["occupied_bins"] = r.occupied_bins;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"distance-matrix cone toolkit"};
  app.set_version_flag("--version", std::string(kToolName) + " " +
                                        kToolVersion + " (format " +
                                        std::to_string(kFormatVersion) +
                                        ", generator " + kGeneratorId + ")");
  app.require_subcommand(1);
  app.fallthrough();

  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  app.add_option("--threads", threads, "worker threads where applicable");
  bool pretty = false;
  app.add_flag("--pretty", pretty, "indent human-oriented output");

  const std::vector<std::string> command = normalized_command(argc, argv);

  // gen-random --------------------------------------------------------------
  auto* gen_random = app.add_subcommand(
      "gen-random", "grow a random distance matrix by the Markov chain");
  int gr_steps = 10;
  std::string gr_gamma = "exp:1";
  std::string gr_policy = "auto";
  std::uint64_t gr_seed = 0;
  std::string gr_out;
  gen_random->add_option("--steps", gr_steps, "growth steps")->required();
  gen_random->add_option("--gamma", gr_gamma,
                         "shift law: exp:r | halfnormal:s | uniform:lo,hi | "
                         "table:v=w,...");
  gen_random->add_option("--policy", gr_policy,
                         "M_r policy: auto | vertex | hitrun | interval:lo,hi");
  gen_random->add_option("--seed", gr_seed, "random seed")->required();
  gen_random->add_option("-o,--output", gr_out, "output file (stdout if absent)");

  // gen-universal -----------------------------------------------------------
  auto* gen_uni = app.add_subcommand(
      "gen-universal", "deterministic universal-matrix prefix construction");
  int gu_steps = 100;
  std::string gu_schedule = "diagonal";
  int gu_variant = 0;
  std::uint64_t gu_seed = 0;
  std::string gu_out;
  gen_uni->add_option("--steps", gu_steps, "growth steps")->required();
  gen_uni->add_option("--schedule", gu_schedule, "level schedule (diagonal)");
  gen_uni->add_option("--variant", gu_variant, "dense enumeration variant");
  gen_uni->add_option("--seed", gu_seed, "random seed")->required();
  gen_uni->add_option("-o,--output", gu_out, "output file");

  // gen-graph ---------------------------------------------------------------
  auto* gen_graph = app.add_subcommand(
      "gen-graph", "Erdos-Renyi {1,2}-valued graph metric");
  Eigen::Index gg_n = 0;
  double gg_p = 0.5;
  std::uint64_t gg_seed = 0;
  std::string gg_out;
  gen_graph->add_option("--n", gg_n, "number of points")->required();
  gen_graph->add_option("--p", gg_p, "edge probability in (0,1)");
  gen_graph->add_option("--seed", gg_seed, "random seed")->required();
  gen_graph->add_option("-o,--output", gg_out, "output file");

  // extremal ----------------------------------------------------------------
  auto* extremal = app.add_subcommand(
      "extremal", "exact extremal points of the admissible polytope");
  std::string ex_matrix;
  int ex_cap = kDefaultVertexCap;
  std::string ex_out;
  extremal->add_option("--matrix", ex_matrix, "rational-mode matrix JSON")
      ->required();
  extremal->add_option("--cap", ex_cap, "order cap for the enumeration");
  extremal->add_option("-o,--output", ex_out, "output file");

  // check-universal ----------------------------------------------------------
  auto* check = app.add_subcommand(
      "check-universal", "universality defect at a corner size");
  std::string cu_matrix;
  int cu_n = 1;
  int cu_probes = 200;
  double cu_eps = 0.1;
  std::uint64_t cu_seed = 0;
  std::string cu_out;
  check->add_option("--matrix", cu_matrix, "matrix JSON or CSV")->required();
  check->add_option("--n", cu_n, "corner size")->required();
  check->add_option("--probes", cu_probes, "number of probe targets");
  check->add_option("--epsilon", cu_eps, "pass threshold for the defect");
  check->add_option("--seed", cu_seed, "probe seed")->required();
  check->add_option("-o,--output", cu_out, "output file");

  // fingerprint ---------------------------------------------------------------
  auto* fp = app.add_subcommand("fingerprint",
                                "sampled matrix-distribution fingerprint");
  std::string fp_triple;
  int fp_k = 3;
  std::int64_t fp_samples = 10000;
  int fp_bins = 64;
  std::uint64_t fp_seed = 0;
  std::string fp_out;
  fp->add_option("--triple", fp_triple, "metric triple JSON")->required();
  fp->add_option("--k", fp_k, "submatrix order");
  fp->add_option("--samples", fp_samples, "number of sample matrices");
  fp->add_option("--bins", fp_bins, "uniform bins over [0, diameter]");
  fp->add_option("--seed", fp_seed, "sampling seed")->required();
  fp->add_option("-o,--output", fp_out, "output file");

  // compare -------------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "two-sample fingerprint equality");
  std::string cmp_a, cmp_b;
  double cmp_alpha = 0.01;
  std::string cmp_out;
  cmp->add_option("first", cmp_a, "fingerprint JSON")->required();
  cmp->add_option("second", cmp_b, "fingerprint JSON")->required();
  cmp->add_option("--alpha", cmp_alpha, "test level");
  cmp->add_option("-o,--output", cmp_out, "output file");

  // coverage --------------------------------------------------------------------
  auto* cov = app.add_subcommand(
      "coverage", "coverage diagnostic separating matrix distributions");
  std::string cov_matrix;
  double cov_eps = 0.1;
  Eigen::Index cov_N = 0;
  std::string cov_out;
  cov->add_option("--matrix", cov_matrix, "matrix JSON or CSV")->required();
  cov->add_option("--epsilon", cov_eps, "coverage radius")->required();
  cov->add_option("--N", cov_N, "prefix size")->required();
  cov->add_option("-o,--output", cov_out, "output file");

  // invariance ---------------------------------------------------------------
  auto* inv = app.add_subcommand(
      "invariance", "exchangeability and NW-shift invariance check");
  std::string inv_triple;
  int inv_k = 3;
  std::int64_t inv_samples = 10000;
  std::uint64_t inv_seed = 0;
  std::string inv_out;
  inv->add_option("--triple", inv_triple, "metric triple JSON")->required();
  inv->add_option("--k", inv_k, "submatrix order");
  inv->add_option("--samples", inv_samples, "number of samples");
  inv->add_option("--seed", inv_seed, "sampling seed")->required();
  inv->add_option("-o,--output", inv_out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help / --version
      std::exit(app.exit(e));
    }
    throw CliError("usage", e.what());
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto load_float_matrix = [](const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
      return matrix_from_csv(read_file(path), path);
    return load_matrix_as<double>(path);
  };

  if (*gen_random) {
    GrowthConfig cfg;
    cfg.gamma = GammaSpec::parse(gr_gamma);
    cfg.policy = MrPolicy::parse(gr_policy);
    cfg.seed = gr_seed;
    if (gr_steps < 1) throw CliError("domain", "steps must be >= 1");
    const auto r = grow_random(cfg, gr_steps);
    Json j = matrix_to_json(r);
    j["gamma"] = cfg.gamma.describe();
    j["policy"] = cfg.policy.describe();
    j["steps"] = gr_steps;
    Emitter{gr_out, pretty}.emit(
        std::move(j), make_manifest(command, gr_seed, {}));
  } else if (*gen_uni) {
    if (gu_schedule != "diagonal")
      throw CliError("domain", "unknown schedule '" + gu_schedule + "'");
    if (gu_steps < 1) throw CliError("domain", "steps must be >= 1");
    UniversalSchedule sched;
    sched.seed = gu_seed;
    sched.variant = gu_variant;
    const auto grown = grow_universal(sched, gu_steps);
    Json j = matrix_to_json(grown.matrix);
    j["schedule"] = gu_schedule;
    j["variant"] = gu_variant;
    j["steps"] = gu_steps;
    j["max_projection_error"] =
        *std::max_element(grown.projection_errors.begin(),
                          grown.projection_errors.end());
    Emitter{gu_out, pretty}.emit(
        std::move(j), make_manifest(command, gu_seed, {}));
  } else if (*gen_graph) {
    if (gg_n < 1) throw CliError("domain", "n must be >= 1");
    if (!(gg_p > 0.0) || !(gg_p < 1.0))
      throw CliError("domain", "p must lie strictly between 0 and 1");
    const auto r = random_graph_metric(gg_n, gg_p, gg_seed);
    Json j = matrix_to_json(r);
    j["p"] = gg_p;
    Emitter{gg_out, pretty}.emit(
        std::move(j), make_manifest(command, gg_seed, {}));
  } else if (*extremal) {
    const auto r = load_matrix_as<Rational>(ex_matrix);
    const auto P = build(r);
    const auto mk = minkowski_decompose(P, ex_cap);
    Emitter{ex_out, pretty}.emit(
        polytope_to_json(P, mk),
        make_manifest(command, std::nullopt, {ex_matrix}));
  } else if (*check) {
    const auto r = load_float_matrix(cu_matrix);
    const auto report = universality_defect(r, cu_n, cu_probes, cu_seed);
    Json j;
    j["format"] = std::string(kToolName) + "/defect/" +
                  std::to_string(kFormatVersion);
    j["n"] = report.n;
    j["samples_used"] = report.samples_used;
    j["epsilon_achieved"] = report.epsilon_achieved;
    j["epsilon"] = cu_eps;
    j["universal_at_scale"] = report.epsilon_achieved < cu_eps;
    Json wit = Json::array();
    for (const auto& w : report.witnesses) {
      Json e;
      std::vector<double> target(w.target.data(),
                                 w.target.data() + w.target.size());
      e["target"] = std::move(target);
      e["best_column"] = w.best_column;
      e["distance"] = w.distance;
      wit.push_back(std::move(e));
    }
    j["witnesses"] = std::move(wit);
    Emitter{cu_out, pretty}.emit(
        std::move(j), make_manifest(command, cu_seed, {cu_matrix}));
  } else if (*fp) {
    const auto T = load_triple(fp_triple);
    if (fp_bins < 1) throw CliError("domain", "bins must be >= 1");
    const auto grid = BinGrid::uniform(0.0, T.diameter() * (1 + 1e-9), fp_bins);
    const auto f = fingerprint(T, fp_k, fp_samples, grid, fp_seed, threads);
    Emitter{fp_out, pretty}.emit(
        fingerprint_to_json(f),
        make_manifest(command, fp_seed, {fp_triple}));
  } else if (*cmp) {
    const auto f1 = load_fingerprint(cmp_a);
    const auto f2 = load_fingerprint(cmp_b);
    Json j = compare_result_json(compare(f1, f2, cmp_alpha));
    j["alpha"] = cmp_alpha;
    Emitter{cmp_out, pretty}.emit(
        std::move(j),
        make_manifest(command, std::nullopt, {cmp_a, cmp_b}));
  } else if (*cov) {
    const auto r = load_float_matrix(cov_matrix);
    const auto c = coverage_condition(r, cov_eps, cov_N);
    Json j;
    j["format"] = std::string(kToolName) + "/coverage/" +
                  std::to_string(kFormatVersion);
    j["epsilon"] = cov_eps;
    j["N"] = cov_N;
    j["fraction"] = c.fraction;
    j["all_covered"] = c.all_covered;
    j["classification"] = c.fraction > 1.0 - cov_eps
                              ? "consistent-with-matrix-distribution"
                              : "not-a-matrix-distribution";
    Emitter{cov_out, pretty}.emit(
        std::move(j),
        make_manifest(command, std::nullopt, {cov_matrix}));
  } else if (*inv) {
    const auto T = load_triple(inv_triple);
    const auto report = invariance_check(T, inv_k, inv_samples, inv_seed);
    Json j;
    j["format"] = std::string(kToolName) + "/invariance/" +
                  std::to_string(kFormatVersion);
    j["perm_vs_raw"] = compare_result_json(report.perm_vs_raw);
    j["shift_vs_raw"] = compare_result_json(report.shift_vs_raw);
    j["perm_vs_shift"] = compare_result_json(report.perm_vs_shift);
    j["pass"] = report.pass;
    Emitter{inv_out, pretty}.emit(
        std::move(j), make_manifest(command, inv_seed, {inv_triple}));
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cerr << "[distcone] done in " << wall << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    Json err;
    err["error"] = e.kind;
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const ParseError& e) {
    Json err;
    err["error"] = "parse";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    Json err;
    err["error"] = "structure";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const InvalidDistanceMatrix& e) {
    Json err;
    err["error"] = "invalid_matrix";
    err["message"] = e.what();
    err["report"] = validation_report_to_json(e.report);
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const PolytopeCapExceeded& e) {
    Json err;
    err["error"] = "cap";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    Json err;
    err["error"] = "domain";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    Json err;
    err["error"] = "domain";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json err;
    err["error"] = "internal";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
