// sparec: sparse sampling recovery experiments on the torus.
//
// Subcommands: analyze, certify, search-points, recover, lebesgue, smoothness.
// Exit codes: 0 success, 1 assertion or threshold failure, 2 usage error,
// 3 numerical non-convergence.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "sparec/experiment.hpp"
#include "sparec/kernels.hpp"

namespace {

using namespace sparec;

struct CommonArgs {
  std::string config_file;
  std::string out_dir;
  std::string format = "json";
  ExperimentConfig cfg;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "flat key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory for report files");
  cmd->add_option("--format", args.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.cfg.seed, "experiment seed");
  cmd->add_option("--system", args.cfg.system, "trig|lacunary|perturbed");
  cmd->add_option("--G", args.cfg.G, "reference grid size");
  cmd->add_option("--N", args.cfg.N, "dictionary size");
  cmd->add_option("--v", args.cfg.v, "sparsity level");
  cmd->add_option("--m", args.cfg.m, "number of sample points");
  cmd->add_option("--p", args.cfg.p, "norm exponent");
  cmd->add_option("--runs", args.cfg.runs, "number of random inputs");
  cmd->add_option("--trials", args.cfg.trials, "point-search trials");
  cmd->add_option("--delta", args.cfg.delta, "noise level");
  cmd->add_option("--threshold", args.cfg.max_ratio_threshold, "max Lebesgue ratio");
  cmd->add_option("--budget-c", args.cfg.budget_constant_c, "iteration budget constant c");
  cmd->add_option("--target-D", args.cfg.target_D, "one-sided discretization target");
  cmd->add_option("--t", args.cfg.weakness_t, "WCGA weakness parameter");
  cmd->add_option("--b", args.cfg.lacunary_b, "lacunary ratio");
  cmd->add_option("--perturbation", args.cfg.perturbation, "perturbed-system magnitude");
  cmd->add_option("--subset-budget", args.cfg.subset_budget, "max enumerated supports");
  cmd->add_option("--restarts", args.cfg.restarts, "ascent restarts (p != 2 certification)");
}

// file-config values first, then explicit CLI flags on top
void finalize_config(const CLI::App* cmd, CommonArgs& args) {
  if (args.config_file.empty()) return;
  ExperimentConfig base = ExperimentConfig::from_file(args.config_file);
  ExperimentConfig overrides = args.cfg;
  args.cfg = base;
  auto keep = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (keep("--seed")) args.cfg.seed = overrides.seed;
  if (keep("--system")) args.cfg.system = overrides.system;
  if (keep("--G")) args.cfg.G = overrides.G;
  if (keep("--N")) args.cfg.N = overrides.N;
  if (keep("--v")) args.cfg.v = overrides.v;
  if (keep("--m")) args.cfg.m = overrides.m;
  if (keep("--p")) args.cfg.p = overrides.p;
  if (keep("--runs")) args.cfg.runs = overrides.runs;
  if (keep("--trials")) args.cfg.trials = overrides.trials;
  if (keep("--delta")) args.cfg.delta = overrides.delta;
  if (keep("--threshold")) args.cfg.max_ratio_threshold = overrides.max_ratio_threshold;
  if (keep("--budget-c")) args.cfg.budget_constant_c = overrides.budget_constant_c;
  if (keep("--target-D")) args.cfg.target_D = overrides.target_D;
  if (keep("--t")) args.cfg.weakness_t = overrides.weakness_t;
  if (keep("--b")) args.cfg.lacunary_b = overrides.lacunary_b;
  if (keep("--perturbation")) args.cfg.perturbation = overrides.perturbation;
  if (keep("--subset-budget")) args.cfg.subset_budget = overrides.subset_budget;
  if (keep("--restarts")) args.cfg.restarts = overrides.restarts;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  out << content;
}

AscentOptions ascent_of(const ExperimentConfig& cfg) {
  AscentOptions asc;
  asc.restarts = cfg.restarts;
  asc.iterations = cfg.ascent_iterations;
  asc.seed = cfg.seed ^ 0x5ca1ab1ef00dull;
  return asc;
}

int cmd_analyze(const CommonArgs& args) {
  GridDomain dom = GridDomain::uniform(args.cfg.G);
  FunctionSystem sys = make_system(args.cfg, dom);
  SystemConstants c = bessel_riesz_constants(sys, dom);
  nlohmann::json j = c.to_json();
  j["system"] = sys.descriptor();
  j["V_fast"] = c.singular ? nlohmann::json("inf") : nlohmann::json(incoherence_fast(c.K));
  std::cout << j.dump(2) << "\n";
  write_file(args.out_dir, "analyze.json", j.dump(2) + "\n");
  return 0;
}

int cmd_certify(const CommonArgs& args, const std::string& points, const std::string& sided_name,
                double epsilon) {
  GridDomain dom = GridDomain::uniform(args.cfg.G);
  FunctionSystem sys = make_system(args.cfg, dom);
  SampleSet xi = points == "uniform" ? SampleSet::uniform(args.cfg.m)
                                     : SampleSet::random(args.cfg.m, args.cfg.seed);
  const Sided sided = sided_name == "two" ? Sided::two_sided_eps : Sided::one_sided_D;
  DiscretizationCertificate cert = certify_universal(xi, sys, dom, args.cfg.v, Lp(args.cfg.p),
                                                     sided, args.cfg.subset_budget,
                                                     ascent_of(args.cfg));
  nlohmann::json j = cert.to_json();
  std::cout << j.dump(2) << "\n";
  write_file(args.out_dir, "certificate.json", j.dump(2) + "\n");
  if (!cert.ok()) return 1;
  if (sided == Sided::one_sided_D && cert.constant > args.cfg.target_D) return 1;
  if (sided == Sided::two_sided_eps && cert.constant > epsilon) return 1;
  return 0;
}

int cmd_search(const CommonArgs& args, const std::string& sided_name, double epsilon) {
  GridDomain dom = GridDomain::uniform(args.cfg.G);
  FunctionSystem sys = make_system(args.cfg, dom);
  const Sided sided = sided_name == "two" ? Sided::two_sided_eps : Sided::one_sided_D;
  SearchConfig sc{args.cfg.m, args.cfg.trials, args.cfg.seed, epsilon, args.cfg.target_D, true};
  SearchOutcome out = random_point_search(sys, dom, args.cfg.v, Lp(args.cfg.p), sided, sc,
                                          args.cfg.subset_budget, ascent_of(args.cfg));
  nlohmann::json j = out.to_json();
  std::cout << j.dump(2) << "\n";
  write_file(args.out_dir, "search.json", j.dump(2) + "\n");
  return out.success ? 0 : 3;
}

int report_experiment(const CommonArgs& args, const ExperimentReport& rep) {
  const std::string csv = rep.csv();
  const std::string summary = rep.aggregates.dump(2) + "\n";
  write_file(args.out_dir, "report.csv", csv);
  write_file(args.out_dir, "summary.json", summary);
  if (args.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << summary;
  }
  if (rep.search_failed) return 3;
  return rep.violations == 0 ? 0 : 1;
}

int cmd_lebesgue(const CommonArgs& args) {
  ExperimentReport rep = run_experiment(args.cfg);
  return report_experiment(args, rep);
}

int cmd_recover(const CommonArgs& args) {
  ExperimentConfig cfg = args.cfg;
  cfg.runs = 1;
  ExperimentReport rep = run_experiment(cfg);
  return report_experiment(args, rep);
}

int cmd_smoothness(const CommonArgs& args, std::size_t samples, std::size_t dim) {
  SmoothnessReport rep = smoothness_modulus_check(args.cfg.p, samples, dim, args.cfg.seed);
  nlohmann::json j = rep.to_json();
  std::cout << j.dump(2) << "\n";
  write_file(args.out_dir, "smoothness.json", j.dump(2) + "\n");
  return rep.violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse sampling recovery experiments"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* analyze = app.add_subcommand("analyze", "Bessel/Riesz constants of a system");
  add_common(analyze, args);

  std::string points = "random";
  std::string sided = "one";
  double epsilon = 0.5;
  auto* certify = app.add_subcommand("certify", "universal discretization certificate");
  add_common(certify, args);
  certify->add_option("--points", points, "uniform|random")
      ->check(CLI::IsMember({"uniform", "random"}));
  certify->add_option("--sided", sided, "one|two")->check(CLI::IsMember({"one", "two"}));
  certify->add_option("--epsilon", epsilon, "two-sided target epsilon");

  auto* search = app.add_subcommand("search-points", "random search for certified points");
  add_common(search, args);
  search->add_option("--sided", sided, "one|two")->check(CLI::IsMember({"one", "two"}));
  search->add_option("--epsilon", epsilon, "two-sided target epsilon");

  auto* recover = app.add_subcommand("recover", "run one input through an algorithm");
  add_common(recover, args);
  recover->add_option("--algorithm", args.cfg.algorithm, "wcga|alg1|alg2|lpw")
      ->check(CLI::IsMember({"wcga", "alg1", "alg2", "lpw"}));

  auto* lebesgue = app.add_subcommand("lebesgue", "Lebesgue-type ratio sweep");
  add_common(lebesgue, args);
  lebesgue->add_option("--algorithm", args.cfg.algorithm, "wcga|alg1|alg2|lpw")
      ->check(CLI::IsMember({"wcga", "alg1", "alg2", "lpw"}));

  std::size_t sm_samples = 10000, sm_dim = 8;
  auto* smooth = app.add_subcommand("smoothness", "modulus of smoothness check");
  add_common(smooth, args);
  smooth->add_option("--samples", sm_samples, "number of random triples");
  smooth->add_option("--dim", sm_dim, "discrete space dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    finalize_config(cmd, args);
    if (cmd == analyze) return cmd_analyze(args);
    if (cmd == certify) return cmd_certify(args, points, sided, epsilon);
    if (cmd == search) return cmd_search(args, sided, epsilon);
    if (cmd == recover) return cmd_recover(args);
    if (cmd == lebesgue) return cmd_lebesgue(args);
    if (cmd == smooth) return cmd_smoothness(args, sm_samples, sm_dim);
    return 2;
  } catch (const sparec::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
