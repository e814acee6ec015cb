// End-to-end checks of the CLI: exit codes, report files, determinism.
// Invoked as: cli_tests <path-to-sparec-binary>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

namespace {

int failures = 0;

#define CHECK_MSG(cond, msg)                                             \
  do {                                                                   \
    if (!(cond)) {                                                       \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                << "\n";                                                 \
      ++failures;                                                        \
    }                                                                    \
  } while (0)

std::string g_cli;
std::filesystem::path g_tmp;

int run(const std::string& args, std::string* output = nullptr) {
  const std::filesystem::path out_file = g_tmp / "stdout.txt";
  const std::string cmd = g_cli + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <sparec binary>\n";
    return 2;
  }
  g_cli = argv[1];
  g_tmp = std::filesystem::temp_directory_path() /
          ("sparec_cli_tests_" + std::to_string(::getpid()));
  std::filesystem::create_directories(g_tmp);

  {
    std::string out;
    const int code = run("analyze --system trig --N 8 --G 64", &out);
    CHECK_MSG(code == 0, "analyze exit code " << code);
    const nlohmann::json j = nlohmann::json::parse(out);
    CHECK_MSG(std::abs(j.at("K").get<double>() - 1.0) < 1e-10, "analyze should report K = 1");
    CHECK_MSG(std::abs(j.at("R1").get<double>() - 1.0) < 1e-10, "analyze should report R1 = 1");
    CHECK_MSG(std::abs(j.at("R2").get<double>() - 1.0) < 1e-10, "analyze should report R2 = 1");
  }

  {
    // m < v: some subspace has vanishing samples, certificate must fail
    std::string out;
    const int code = run("certify --system trig --N 6 --G 64 --v 2 --m 1 --p 2 --points random", &out);
    CHECK_MSG(code == 1, "certify with m < v should exit 1, got " << code);
    CHECK_MSG(out.find("\"inf\"") != std::string::npos, "infinite constant report expected");
  }

  {
    std::string out;
    const int code =
        run("certify --system trig --N 4 --G 64 --v 1 --m 8 --p 2 --points uniform --target-D 1.5", &out);
    CHECK_MSG(code == 0, "uniform-point certification should pass, got " << code);
    CHECK_MSG(out.find("\"exact\": true") != std::string::npos, "p=2 certificate is exact");
  }

  {
    std::string out;
    const int code = run("no-such-command", &out);
    CHECK_MSG(code == 2, "usage error should exit 2, got " << code);
  }

  {
    std::string out;
    const int code = run("smoothness --p 3 --samples 500 --dim 6 --seed 4", &out);
    CHECK_MSG(code == 0, "smoothness exit code " << code);
    CHECK_MSG(out.find("\"violations\": 0") != std::string::npos, "no violations expected");
  }

  {
    // unattainable search target: numerical non-convergence exit code
    std::string out;
    const int code = run("search-points --system trig --N 6 --G 64 --v 2 --m 3 --p 2 "
                         "--trials 3 --target-D 1.000001 --seed 8",
                         &out);
    CHECK_MSG(code == 3, "failed search should exit 3, got " << code);
    CHECK_MSG(out.find("\"success\": false") != std::string::npos, "failure report expected");
  }

  {
    // perturbed system path end to end
    std::string out;
    const int code = run("analyze --system perturbed --N 6 --G 128 --perturbation 0.2 --seed 12", &out);
    CHECK_MSG(code == 0, "perturbed analyze exit " << code);
    const nlohmann::json j = nlohmann::json::parse(out);
    CHECK_MSG(j.at("R1").get<double>() < j.at("R2").get<double>() - 1e-6,
              "perturbed system should spread the Riesz constants");
    CHECK_MSG(j.at("uniform_bound").get<double>() <= 1.0 + 1e-12, "(I1) bound");
  }

  {
    // byte-identical CSV on rerun with identical config and seed
    const std::string common =
        "lebesgue --algorithm alg2 --system trig --N 6 --G 128 --v 1 --m 16 --p 2 --runs 3 "
        "--delta 0.05 --seed 9 --trials 5 --format csv";
    const auto dir1 = g_tmp / "rep1";
    const auto dir2 = g_tmp / "rep2";
    std::string out1, out2;
    const int c1 = run(common + " --out " + dir1.string(), &out1);
    const int c2 = run(common + " --out " + dir2.string(), &out2);
    CHECK_MSG(c1 == 0, "lebesgue run 1 exit " << c1 << ": " << out1);
    CHECK_MSG(c2 == 0, "lebesgue run 2 exit " << c2);
    const std::string csv1 = slurp(dir1 / "report.csv");
    const std::string csv2 = slurp(dir2 / "report.csv");
    CHECK_MSG(!csv1.empty(), "report.csv should not be empty");
    CHECK_MSG(csv1 == csv2, "CSV reports must be byte-identical across reruns");
    const std::string sum1 = slurp(dir1 / "summary.json");
    const std::string sum2 = slurp(dir2 / "summary.json");
    CHECK_MSG(sum1 == sum2, "JSON summaries must be byte-identical across reruns");

    // a different seed changes the rows
    std::string out3;
    const auto dir3 = g_tmp / "rep3";
    run(common + " --seed 10 --out " + dir3.string(), &out3);
    CHECK_MSG(slurp(dir3 / "report.csv") != csv1, "different seed should change the report");
  }

  {
    // config file + CLI override
    const auto cfg_path = g_tmp / "exp.cfg";
    std::ofstream cfg(cfg_path);
    cfg << "# demo config\n"
        << "algorithm = alg2\n"
        << "system = trig\n"
        << "N = 6\nG = 128\nv = 1\nm = 16\np = 2\nruns = 2\nseed = 3\ntrials = 5\n";
    cfg.close();
    const auto dir = g_tmp / "cfg_out";
    std::string out;
    const int code = run("lebesgue --config " + cfg_path.string() + " --runs 1 --format csv --out " +
                             dir.string(),
                         &out);
    CHECK_MSG(code == 0, "config-driven run exit " << code << ": " << out);
    const std::string csv = slurp(dir / "report.csv");
    // --runs 1 overrides the file's runs = 2: exactly one run index
    CHECK_MSG(csv.find("\n1,") == std::string::npos, "CLI override of runs failed:\n" << csv);
  }

  {
    std::string out;
    const int code = run("recover --algorithm wcga --system trig --N 8 --G 256 --v 1 --m 32 "
                         "--p 2 --seed 5 --trials 10",
                         &out);
    CHECK_MSG(code == 0, "recover exit " << code << ": " << out);
  }

  std::filesystem::remove_all(g_tmp);
  if (failures == 0) {
    std::cout << "cli_tests: all checks passed\n";
    return 0;
  }
  std::cerr << "cli_tests: " << failures << " failures\n";
  return 1;
}
