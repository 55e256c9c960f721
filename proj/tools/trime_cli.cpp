// Batch front end: trime mesh --config <file> [overrides]
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trime/trime.h"

namespace {

int report_failure(trime_status s, const char* what) {
  std::fprintf(stderr, "trime: %s failed (%s): %s\n", what, trime_status_name(s), trime_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D triangular mesh generator"};
  app.require_subcommand(1);
  CLI::App* mesh = app.add_subcommand("mesh", "generate a mesh from a run configuration");

  std::string config_path;
  std::string ntotal, alg, threads, seed, out_dir, interval;
  std::vector<std::string> sets;
  bool quiet = false;
  mesh->add_option("--config", config_path, "run configuration file")->required();
  mesh->add_option("--ntotal", ntotal, "target number of points");
  mesh->add_option("--alg", alg, "dm, cvd or hybrid")->check(CLI::IsMember({"dm", "cvd", "hybrid"}));
  mesh->add_option("--threads", threads, "worker threads");
  mesh->add_option("--seed", seed, "random seed");
  mesh->add_option("--out", out_dir, "output directory");
  mesh->add_option("--output-interval", interval, "0: final only, -1: initial and final, m: every m iterations");
  mesh->add_option("--set", sets, "extra key=value override (repeatable)");
  mesh->add_flag("-q,--quiet", quiet, "no summary on stdout");

  CLI11_PARSE(app, argc, argv);

  trime_config* cfg = nullptr;
  trime_status s = trime_config_load(config_path.c_str(), &cfg);
  if (s != TRIME_OK) return report_failure(s, "loading config");

  std::vector<std::pair<std::string, std::string>> overrides;
  if (!ntotal.empty()) overrides.emplace_back("n_total", ntotal);
  if (!alg.empty()) overrides.emplace_back("algorithm", alg);
  if (!threads.empty()) overrides.emplace_back("threads", threads);
  if (!seed.empty()) overrides.emplace_back("seed", seed);
  if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);
  if (!interval.empty()) overrides.emplace_back("output_interval", interval);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "trime: --set expects key=value, got '%s'\n", kv.c_str());
      trime_config_destroy(cfg);
      return 2;
    }
    overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) {
    s = trime_config_set(cfg, k.c_str(), v.c_str());
    if (s != TRIME_OK) {
      trime_config_destroy(cfg);
      return report_failure(s, ("setting " + k).c_str());
    }
  }

  trime_mesher* m = nullptr;
  s = trime_mesher_create(cfg, &m);
  trime_config_destroy(cfg);
  if (s != TRIME_OK) return report_failure(s, "creating mesher");
  s = trime_mesher_run(m, 1);
  if (s != TRIME_OK) {
    trime_mesher_destroy(m);
    return report_failure(s, "meshing");
  }

  if (!quiet) {
    size_t np = 0, nt = 0;
    long long iters = 0;
    char reason[64] = "";
    trime_summary sum{};
    trime_mesher_point_count(m, &np);
    trime_mesher_triangle_count(m, &nt);
    trime_mesher_iterations(m, &iters);
    trime_mesher_reason(m, reason, sizeof reason, nullptr);
    trime_mesher_summary(m, &sum);
    std::printf("points %zu triangles %zu iterations %lld termination %s\n", np, nt, iters, reason);
    std::printf("alpha median %.6g mean %.6g max %.6g stdev %.6g\n", sum.median_alpha,
                sum.mean_alpha, sum.max_alpha, sum.stdev_alpha);
    std::printf("beta  median %.6g mean %.6g max %.6g stdev %.6g\n", sum.median_beta,
                sum.mean_beta, sum.max_beta, sum.stdev_beta);
    std::printf("alpha<1.2 %.4g%%  alpha<2 %.4g%%\n", sum.pct_alpha_below_1_2,
                sum.pct_alpha_below_2);
  }
  trime_mesher_destroy(m);
  return 0;
}
