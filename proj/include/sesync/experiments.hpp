#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sesync/diagnostics.hpp"
#include "sesync/evaluation.hpp"
#include "sesync/registration.hpp"

namespace sesync {

/// 64-bit FNV-1a over the decimal string "seed:valueIdx:trialIdx"; adding
/// trials or values never perturbs earlier ones.
std::uint64_t derive_seed(std::uint64_t seed, int value_idx, int trial_idx);

struct ExperimentConfig {
  std::string kind;  // sweep-sigma1 | sweep-sigma2 | scale-n
  int n = 500;
  int d = 3;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  std::vector<double> sweep_values;
  std::vector<int> n_values;
  int trials = 25;
  std::uint64_t seed = 0;
  std::vector<Method> methods = {Method::kAse, Method::kTwoStage};
  int threads = 1;
  bool timing = false;  // when false, wall_ms is written as 0 (reproducible output)
};

struct TrialRecord {
  std::string kind;
  Method method = Method::kAse;
  int n = 0, d = 0;
  double sigma1 = 0, sigma2 = 0;
  int value_idx = 0, trial = 0;
  std::uint64_t seed = 0;
  ErrorReport report;
  double wall_ms = 0;
};

struct SweepResult {
  std::vector<TrialRecord> records;       // (value, trial, method) order
  std::vector<std::string> summary_rows;  // one per (method, value)
  std::optional<double> loglog_slope;     // scale-n only, absent for a single n
};

SweepResult run_sweep(const ExperimentConfig& config);
SweepResult run_scaling(const ExperimentConfig& config);

std::string csv_header();
std::string csv_row(const TrialRecord& rec, bool timing);
void write_csv(const SweepResult& result, const ExperimentConfig& config, std::ostream& out);

struct SelfTestCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct SelfTestOptions {
  std::uint64_t seed = 2024;
  /// Test hook: perturb the assembled data matrix so the null-space check fails.
  bool inject_omega_fault = false;
};

std::vector<SelfTestCheck> run_selftest(const SelfTestOptions& opts = {});
void print_selftest_report(const std::vector<SelfTestCheck>& checks, std::ostream& out);

/// Synthetic multi-scan fixture: `n_scans` views of a random point shape,
/// each expressed in its own frame, plus the exact pose graph.
struct SyntheticScans {
  std::vector<PointCloud> scans;
  std::vector<RigidMotion> motions;
  PoseGraph truth_graph;
  PointCloud world_shape;
};

SyntheticScans make_synthetic_scans(int n_scans, int points_per_scan, Rng& rng,
                                    double extent_mm = 100.0);

/// Run `fn(index)` for indices [0, count) on `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace sesync
