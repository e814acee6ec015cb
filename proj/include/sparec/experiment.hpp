#pragma once

#include <string>

#include "sparec/analysis.hpp"
#include "sparec/combinatorial.hpp"
#include "sparec/discretization.hpp"
#include "sparec/random.hpp"
#include "sparec/wcga.hpp"

namespace sparec {

/// Flat experiment configuration. Files use one `key = value` per line
/// (# comments); CLI flags override file values.
struct ExperimentConfig {
  std::string system = "trig";  // trig | lacunary | perturbed
  std::size_t G = 1024;
  std::size_t N = 16;
  std::size_t v = 2;
  std::size_t m = 128;
  double p = 2.0;
  std::uint64_t seed = 1;
  std::size_t runs = 20;
  std::size_t trials = 20;       // point-search trials
  double delta = 0.0;            // noise level
  std::string algorithm = "wcga";  // wcga | alg1 | alg2 | lpw
  double max_ratio_threshold = 50.0;
  double budget_constant_c = 1.0;
  double target_D = 2.0;
  double weakness_t = 1.0;
  double lacunary_b = 2.0;
  double perturbation = 0.1;
  std::size_t subset_budget = 100000;
  std::size_t restarts = 8;          // ascent restarts for p != 2 certification
  std::size_t ascent_iterations = 60;
  double residual_tol = 1e-10;

  void apply_kv(const std::string& key, const std::string& value);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

struct ReportRow {
  std::size_t run = 0;
  std::string algorithm;
  std::string inequality;  // (mp), (mp2), (mp3), (I5), (I6), (ub16), (ub17), (A1), (A2)
  double p = 2.0;
  std::size_t v = 0, N = 0, m = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string input_hash;
  double error = 0.0;
  double sigma = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool violation = false;
  double D = 0.0, K = 0.0, V = 0.0, C1 = 0.0, C2 = 0.0;
  std::size_t iterations = 0;
  std::string stop_reason;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  nlohmann::json aggregates;
  bool search_failed = false;
  std::size_t violations = 0;

  std::string csv() const;
  static std::string csv_header();
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Build the configured dictionary on the domain.
FunctionSystem make_system(const ExperimentConfig& cfg, const GridDomain& dom);

/// A reproducible noisy-sparse test input: f0 = sparse + delta * h with
/// ||h||_inf = 1 measured on the grid, both parts analytic so off-grid sample
/// points are exact.
struct TestFunction {
  SparseElement sparse;
  CVec grid;
  CVec samples;
};

TestFunction make_test_function(const FunctionSystem& sys, const FunctionSystem& ambient,
                                const GridDomain& dom, const SampleSet& xi, std::size_t v,
                                double delta, Rng& rng);

/// FNV-1a hash of the raw bytes of a value vector (row provenance).
std::string hash_values(const CVec& values);

/// Print a double with round-trip precision (stable CSV formatting).
std::string format_double(double x);

}  // namespace sparec
