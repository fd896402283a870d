#include "sesync/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sesync {

std::uint64_t derive_seed(std::uint64_t seed, int value_idx, int trial_idx) {
  const std::string key = std::to_string(seed) + ":" + std::to_string(value_idx) + ":" +
                          std::to_string(trial_idx);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

EstimateSet run_method(Method method, const ObservationSet& obs) {
  switch (method) {
    case Method::kAse: return ase(obs);
    case Method::kTwoStage: return two_stage(obs);
    case Method::kNaiveProjection: return naive_projection(obs, true);
  }
  throw std::logic_error("unknown method");
}

struct Quartiles {
  double q1 = 0, median = 0, q3 = 0;
};

Quartiles quartiles(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  auto at = [&](double p) {
    const double pos = p * (xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - lo;
    return xs[lo] * (1 - frac) + xs[hi] * frac;
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

SweepResult run_grid(const ExperimentConfig& config,
                     const std::vector<std::pair<int, double>>& grid_nv) {
  // grid_nv: one (n, varied-value) entry per grid point.
  const int num_values = static_cast<int>(grid_nv.size());
  const int per_trial = static_cast<int>(config.methods.size());
  SweepResult result;
  result.records.resize(static_cast<std::size_t>(num_values) * config.trials * per_trial);

  parallel_for(num_values * config.trials, config.threads, [&](int task) {
    const int value_idx = task / config.trials;
    const int trial = task % config.trials;
    const auto [n, value] = grid_nv[value_idx];
    double sigma1 = config.sigma1, sigma2 = config.sigma2;
    if (config.kind == "sweep-sigma1") sigma1 = value;
    if (config.kind == "sweep-sigma2") sigma2 = value;

    const std::uint64_t trial_seed = derive_seed(config.seed, value_idx, trial);
    Rng rng(trial_seed);
    const GroundTruth gt = generate_ground_truth(n, config.d, 1.0, rng);
    const ObservationSet obs = synthesize_observations(gt, sigma1, sigma2, rng);

    for (int m = 0; m < per_trial; ++m) {
      const auto start = std::chrono::steady_clock::now();
      const EstimateSet est = run_method(config.methods[m], obs);
      const ErrorReport rep = error_report(est, gt);
      const auto stop = std::chrono::steady_clock::now();

      TrialRecord& rec =
          result.records[(static_cast<std::size_t>(value_idx) * config.trials + trial) *
                             per_trial +
                         m];
      rec.kind = config.kind;
      rec.method = config.methods[m];
      rec.n = n;
      rec.d = config.d;
      rec.sigma1 = sigma1;
      rec.sigma2 = sigma2;
      rec.value_idx = value_idx;
      rec.trial = trial;
      rec.seed = trial_seed;
      rec.report = rep;
      rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
  });

  // Summary rows per (method, value): q1/median/q3 of each metric.
  for (int m = 0; m < per_trial; ++m) {
    for (int v = 0; v < num_values; ++v) {
      std::vector<double> se, ar, mr, at, mt;
      const TrialRecord* first = nullptr;
      for (int trial = 0; trial < config.trials; ++trial) {
        const TrialRecord& rec =
            result.records[(static_cast<std::size_t>(v) * config.trials + trial) * per_trial + m];
        if (!first) first = &rec;
        se.push_back(rec.report.max_se_error);
        ar.push_back(rec.report.avg_rotation_deg);
        mr.push_back(rec.report.max_rotation_deg);
        at.push_back(rec.report.avg_translation_err);
        mt.push_back(rec.report.max_translation_err);
      }
      std::ostringstream row;
      row << "summary," << config.kind << ',' << method_name(config.methods[m]) << ','
          << first->n << ',' << first->d << ',' << format_double(first->sigma1) << ','
          << format_double(first->sigma2);
      for (const auto& metric : {se, ar, mr, at, mt}) {
        const Quartiles q = quartiles(metric);
        row << ',' << format_double(q.q1) << ',' << format_double(q.median) << ','
            << format_double(q.q3);
      }
      result.summary_rows.push_back(row.str());
    }
  }
  return result;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  if (config.kind != "sweep-sigma1" && config.kind != "sweep-sigma2")
    throw std::invalid_argument("run_sweep: kind must be sweep-sigma1 or sweep-sigma2");
  if (config.sweep_values.empty()) throw std::invalid_argument("run_sweep: empty value list");
  if (config.trials < 1) throw std::invalid_argument("run_sweep: trials >= 1 required");
  std::vector<std::pair<int, double>> grid;
  for (double v : config.sweep_values) grid.emplace_back(config.n, v);
  return run_grid(config, grid);
}

SweepResult run_scaling(const ExperimentConfig& config) {
  if (config.kind != "scale-n") throw std::invalid_argument("run_scaling: kind must be scale-n");
  if (config.n_values.empty()) throw std::invalid_argument("run_scaling: empty n list");
  if (config.trials < 1) throw std::invalid_argument("run_scaling: trials >= 1 required");
  std::vector<std::pair<int, double>> grid;
  for (int n : config.n_values) grid.emplace_back(n, 0.0);
  SweepResult result = run_grid(config, grid);

  if (config.n_values.size() >= 2) {
    // Median uniform error per n, least-squares slope in log-log space.
    const int per_trial = static_cast<int>(config.methods.size());
    std::vector<double> log_n, log_err;
    for (std::size_t v = 0; v < config.n_values.size(); ++v) {
      std::vector<double> errs;
      for (int trial = 0; trial < config.trials; ++trial)
        errs.push_back(result.records[(v * config.trials + trial) * per_trial].report.max_se_error);
      log_n.push_back(std::log(static_cast<double>(config.n_values[v])));
      log_err.push_back(std::log(quartiles(errs).median));
    }
    double mean_x = 0, mean_y = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mean_x += log_n[i];
      mean_y += log_err[i];
    }
    mean_x /= log_n.size();
    mean_y /= log_n.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mean_x) * (log_err[i] - mean_y);
      sxx += (log_n[i] - mean_x) * (log_n[i] - mean_x);
    }
    result.loglog_slope = sxy / sxx;
  }
  return result;
}

std::string csv_header() {
  return "experiment_id,kind,method,n,d,sigma1,sigma2,trial,seed,max_se_error,"
         "avg_rot_deg,max_rot_deg,avg_trans_err,max_trans_err,wall_ms";
}

std::string csv_row(const TrialRecord& rec, bool timing) {
  std::ostringstream os;
  os.precision(17);
  os << rec.kind << '-' << rec.seed << ',' << rec.kind << ',' << method_name(rec.method) << ','
     << rec.n << ',' << rec.d << ',' << rec.sigma1 << ',' << rec.sigma2 << ',' << rec.trial
     << ',' << rec.seed << ',' << rec.report.max_se_error << ',' << rec.report.avg_rotation_deg
     << ',' << rec.report.max_rotation_deg << ',' << rec.report.avg_translation_err << ','
     << rec.report.max_translation_err << ',' << (timing ? rec.wall_ms : 0.0);
  return os.str();
}

void write_csv(const SweepResult& result, const ExperimentConfig& config, std::ostream& out) {
  out << csv_header() << '\n';
  for (const auto& rec : result.records) out << csv_row(rec, config.timing) << '\n';
  for (const auto& row : result.summary_rows) out << row << '\n';
  if (config.kind == "scale-n") {
    if (result.loglog_slope)
      out << "slope," << format_double(*result.loglog_slope) << '\n';
    else
      out << "slope,absent\n";
  }
}

SyntheticScans make_synthetic_scans(int n_scans, int points_per_scan, Rng& rng,
                                    double extent_mm) {
  std::uniform_real_distribution<double> uni(-extent_mm / 2, extent_mm / 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SyntheticScans out;
  out.world_shape.label = "shape";
  for (int k = 0; k < points_per_scan; ++k)
    out.world_shape.points.emplace_back(uni(rng), uni(rng), uni(rng));

  Vector mean = Vector::Zero(3);
  for (int i = 0; i < n_scans; ++i) {
    RigidMotion g;
    g.R = random_rotation(rng, 3);
    g.t = Vector::NullaryExpr(3, [&](Eigen::Index) { return extent_mm * 0.2 * gauss(rng); });
    mean += g.t;
    out.motions.push_back(std::move(g));
  }
  mean /= n_scans;
  for (auto& g : out.motions) g.t -= mean;

  for (int i = 0; i < n_scans; ++i) {
    PointCloud scan;
    scan.label = "scan_" + std::to_string(i);
    const RigidMotion inv = invert(out.motions[i]);
    for (const auto& p : out.world_shape.points) scan.points.push_back(inv.apply(p));
    out.scans.push_back(std::move(scan));
  }
  out.truth_graph = PoseGraph::from_motions(out.motions);
  return out;
}

std::vector<SelfTestCheck> run_selftest(const SelfTestOptions& opts) {
  std::vector<SelfTestCheck> checks;
  auto add = [&](const std::string& name, double measured, double bound) {
    checks.push_back({name, measured <= bound, measured, bound});
  };

  Rng rng(opts.seed);
  const int n = 20, d = 3;
  const GroundTruth gt = generate_ground_truth(n, d, 1.0, rng);

  // Geometry: blockwise projection contraction on a random pair.
  {
    std::normal_distribution<double> gauss;
    Matrix X(n * d, d), Y(n * d, d);
    for (int i = 0; i < n; ++i) X.middleRows(i * d, d) = random_rotation(rng, d);
    for (int i = 0; i < Y.size(); ++i) Y(i / d, i % d) = gauss(rng);
    const double lhs = (project_so_blockwise(Y, d) - X).norm();
    add("blockwise projection contraction", lhs, 2.0 * (Y - X).norm());
  }

  // Omega null space on a noiseless instance (fault-injection hook here).
  {
    const ObservationSet obs = synthesize_observations(gt, 0.0, 0.0, rng);
    DataMatrix dm = build_omega(obs);
    if (opts.inject_omega_fault) dm.omega(0, 0) += 1.0;
    const Matrix r_star = gt.stacked_rotations();
    add("noiseless Omega null space ||Omega R*||", (dm.omega * r_star).norm(),
        1e-8 * dm.omega.norm() * std::sqrt(static_cast<double>(d)));

    Eigen::SelfAdjointEigenSolver<Matrix> es(dm.omega);
    add("noiseless eigen gap 2n - lambda_{d+1}", 2.0 * n - es.eigenvalues()(d), 1e-6);

    const EstimateSet est = ase(obs);
    const ErrorReport rep = error_report(est, gt);
    add("exact recovery max rotation deg", rep.max_rotation_deg, 1e-5);
    add("exact recovery max translation err", rep.max_translation_err, 1e-8);
  }

  // Decomposition identity and deterministic norm bounds on a noisy instance.
  {
    const ObservationSet obs = synthesize_observations(gt, 0.3, 0.3, rng);
    const GroundTruthDecomposition dec = build_ground_truth_decomposition(gt, obs);
    const Matrix r_star = gt.stacked_rotations();
    Matrix br = Matrix::Zero(n * d, n * d);
    for (int i = 0; i < n; ++i) br.block(i * d, i * d, d, d) = gt.rotations[i];
    const Matrix rhs = 2.0 * n * Matrix::Identity(n * d, n * d) -
                       2.0 * r_star * r_star.transpose() +
                       br * (dec.xi_star - dec.upsilon_star) * br.transpose() + dec.delta;
    add("H decomposition identity (rel err)", (dec.h - rhs).norm() / dec.h.norm(), 1e-8);
    for (const auto& c : check_norm_bounds(dec, gt))
      checks.push_back({"norm bound " + c.quantity, c.satisfied, c.value, c.bound});

    // Translation closed form vs the dense normal-equations oracle.
    const EstimateSet est = ase(obs);
    std::vector<Matrix> rotations;
    for (const auto& g : est.motions) rotations.push_back(g.R);
    const std::vector<Vector> closed = recover_translations(rotations, build_t_hat(obs));

    int row = 0;
    Matrix big_a = Matrix::Zero(n * (n - 1) * d + d, n * d);
    Vector big_b = Vector::Zero(n * (n - 1) * d + d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        big_a.block(row, j * d, d, d) = Matrix::Identity(d, d);
        big_a.block(row, i * d, d, d) = -Matrix::Identity(d, d);
        big_b.segment(row, d) = rotations[i].transpose() * obs.s.block(i * d, j, d, 1);
        row += d;
      }
    for (int i = 0; i < n; ++i)  // mean-zero gauge
      big_a.block(row, i * d, d, d) = Matrix::Identity(d, d);
    row += d;
    const Vector t_ls = big_a.colPivHouseholderQr().solve(big_b);
    double diff = 0.0, scale = 1e-30;
    for (int i = 0; i < n; ++i) {
      diff += (t_ls.segment(i * d, d) - closed[i]).squaredNorm();
      scale += closed[i].squaredNorm();
    }
    add("translation closed form vs LS oracle", std::sqrt(diff / scale), 1e-9);
  }

  return checks;
}

void print_selftest_report(const std::vector<SelfTestCheck>& checks, std::ostream& out) {
  out << "check,measured,bound,status\n";
  out.precision(10);
  for (const auto& c : checks)
    out << c.name << ',' << c.measured << ',' << c.bound << ','
        << (c.pass ? "pass" : "FAIL") << '\n';
}

}  // namespace sesync
