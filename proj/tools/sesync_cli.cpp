// Command-line harness for rigid-motion synchronization experiments:
// noise sweeps, scaling studies, diagnostics, a registration demo, and a
// self-test suite. All experiments are reproducible from (config, seed).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sesync/experiments.hpp"

namespace {

using namespace sesync;

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string field;
  while (std::getline(is, field, ',')) out.push_back(std::stod(field));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::istringstream is(csv);
  std::string field;
  while (std::getline(is, field, ',')) out.push_back(std::stoi(field));
  return out;
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::istringstream is(csv);
  std::string field;
  while (std::getline(is, field, ',')) {
    const auto m = method_from_name(field);
    if (!m) throw CLI::ValidationError("unknown method: " + field);
    out.push_back(*m);
  }
  return out;
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw CLI::RuntimeError("cannot open output path " + path, 1);
  fn(out);
}

struct CommonArgs {
  int n = 500;
  int d = 3;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  int trials = 25;
  std::uint64_t seed = 0;
  std::string methods = "ase,two-stage";
  std::string out;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--n", args.n, "number of motions");
  cmd->add_option("--d", args.d, "dimension");
  cmd->add_option("--sigma1", args.sigma1, "rotation-comparison noise std dev");
  cmd->add_option("--sigma2", args.sigma2, "translation-comparison noise std dev");
  cmd->add_option("--trials", args.trials, "independent realizations per grid point");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--methods", args.methods, "comma list: ase,two-stage,naive");
  cmd->add_option("--out", args.out, "output CSV path (default stdout)");
  cmd->add_option("--threads", args.threads, "worker threads");
  cmd->add_flag("--timing", args.timing, "record wall-clock times in the CSV");
  cmd->add_option("--config", "flat key=value config file; flags override its keys")
      ->expected(1);
}

// Expand "--config FILE" into the equivalent flags. The file is flat
// key=value text with '#' comments; a key is skipped when the matching flag
// is already on the command line, so explicit flags always win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::size_t at = args.size();
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      at = k;
      break;
    }
    if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      at = k;
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot read config file " + path);
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(file, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
    if (overridden) continue;
    extra.push_back(flag);
    if (!value.empty()) extra.push_back(value);
  }
  args.insert(args.begin() + at, extra.begin(), extra.end());
  return args;
}

ExperimentConfig to_config(const CommonArgs& args) {
  ExperimentConfig cfg;
  cfg.n = args.n;
  cfg.d = args.d;
  cfg.sigma1 = args.sigma1;
  cfg.sigma2 = args.sigma2;
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.methods = parse_methods(args.methods);
  cfg.threads = std::max(1, args.threads);
  cfg.timing = args.timing;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid-motion synchronization over SE(d): anchored spectral estimator, "
               "baselines, diagnostics, and experiment harness"};
  app.require_subcommand(1);

  // sweep -----------------------------------------------------------------
  CommonArgs sweep_args;
  std::string vary = "sigma2";
  std::string values = "0.25,0.5,1,2";
  auto* sweep = app.add_subcommand("sweep", "estimation error vs noise magnitude");
  add_common(sweep, sweep_args);
  sweep->add_option("--vary", vary, "which noise level to sweep: sigma1 or sigma2");
  sweep->add_option("--values", values, "comma list of swept values");

  // scale -----------------------------------------------------------------
  CommonArgs scale_args;
  scale_args.sigma1 = scale_args.sigma2 = 0.5;
  scale_args.methods = "ase";
  std::string nlist = "100,200,400";
  auto* scale = app.add_subcommand("scale", "uniform error vs n with log-log slope fit");
  add_common(scale, scale_args);
  scale->add_option("--nlist", nlist, "comma list of n values");

  // diagnose --------------------------------------------------------------
  CommonArgs diag_args;
  diag_args.n = 20;
  diag_args.sigma1 = diag_args.sigma2 = 0.3;
  auto* diagnose = app.add_subcommand(
      "diagnose", "ground-truth/noise decomposition report on a synthetic instance");
  add_common(diagnose, diag_args);

  // register --------------------------------------------------------------
  auto* reg = app.add_subcommand("register", "multiple point-set registration");
  bool demo = false;
  std::vector<std::string> scan_paths;
  std::string graph_path, method_name_arg = "ase", merged_out;
  int demo_scans = 5, demo_points = 500;
  double perturb_angle = 8.0, perturb_trans = 0.8;
  std::uint64_t reg_seed = 0;
  reg->add_flag("--demo", demo, "synthetic demo: generate scans, perturb, synchronize");
  reg->add_option("--scans", scan_paths, "ASCII PLY scan files");
  reg->add_option("--graph", graph_path, "pose graph CSV (i,j,R row-major,t)");
  reg->add_option("--method", method_name_arg, "ase | two-stage | naive");
  reg->add_option("--out", merged_out, "merged cloud output PLY");
  reg->add_option("--seed", reg_seed, "seed (demo mode)");
  reg->add_option("--demo-scans", demo_scans, "scan count (demo mode)");
  reg->add_option("--demo-points", demo_points, "points per scan (demo mode)");
  reg->add_option("--perturb-angle", perturb_angle, "max perturbation angle, degrees");
  reg->add_option("--perturb-trans", perturb_trans, "translation noise std dev, mm");

  // selftest --------------------------------------------------------------
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  bool inject_fault = false;
  std::uint64_t selftest_seed = 2024;
  selftest->add_flag("--inject-omega-fault", inject_fault)->group("");  // test hook
  selftest->add_option("--seed", selftest_seed, "seed");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes back-to-front
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sweep) {
      ExperimentConfig cfg = to_config(sweep_args);
      if (vary != "sigma1" && vary != "sigma2")
        throw CLI::ValidationError("--vary must be sigma1 or sigma2");
      cfg.kind = "sweep-" + vary;
      cfg.sweep_values = parse_doubles(values);
      const SweepResult result = run_sweep(cfg);
      write_to(sweep_args.out, [&](std::ostream& os) { write_csv(result, cfg, os); });
    } else if (*scale) {
      ExperimentConfig cfg = to_config(scale_args);
      cfg.kind = "scale-n";
      cfg.n_values = parse_ints(nlist);
      const SweepResult result = run_scaling(cfg);
      write_to(scale_args.out, [&](std::ostream& os) { write_csv(result, cfg, os); });
    } else if (*diagnose) {
      Rng rng(diag_args.seed);
      const GroundTruth gt = generate_ground_truth(diag_args.n, diag_args.d, 1.0, rng);
      const ObservationSet obs =
          synthesize_observations(gt, diag_args.sigma1, diag_args.sigma2, rng);
      const GroundTruthDecomposition dec = build_ground_truth_decomposition(gt, obs);
      std::vector<BoundCheck> checks = check_norm_bounds(dec, gt);
      for (auto& c : check_eigen_gap(dec)) checks.push_back(c);
      write_to(diag_args.out, [&](std::ostream& os) { write_report_csv(checks, os); });
    } else if (*reg) {
      const auto method = method_from_name(method_name_arg);
      if (!method) throw CLI::ValidationError("unknown method " + method_name_arg);
      if (demo) {
        Rng rng(reg_seed);
        SyntheticScans fixture = make_synthetic_scans(demo_scans, demo_points, rng);
        const PoseGraph noisy =
            perturb_pose_graph(fixture.truth_graph, perturb_angle, perturb_trans, rng);
        const RegistrationResult result = register_scans(fixture.scans, noisy, *method);

        GroundTruth gt;
        gt.n = demo_scans;
        gt.d = 3;
        for (const auto& g : fixture.motions) {
          gt.rotations.push_back(g.R);
          gt.translations.push_back(g.t);
          gt.max_translation_norm = std::max(gt.max_translation_norm, g.t.norm());
        }
        const ErrorReport rep = error_report(result.estimates, gt);
        std::cout << "method," << method_name(*method) << "\navg_rot_deg,"
                  << rep.avg_rotation_deg << "\nmax_rot_deg," << rep.max_rotation_deg
                  << "\navg_trans_mm," << rep.avg_translation_err << "\nmax_trans_mm,"
                  << rep.max_translation_err << '\n';
        if (!merged_out.empty()) save_ply(result.merged, merged_out);
      } else {
        if (scan_paths.empty() || graph_path.empty())
          throw CLI::ValidationError("register needs --demo or both --scans and --graph");
        std::vector<PointCloud> scans;
        for (const auto& p : scan_paths) scans.push_back(load_ply(p));
        const PoseGraph graph = load_pose_graph_csv(graph_path);
        const RegistrationResult result = register_scans(scans, graph, *method);
        if (!merged_out.empty()) save_ply(result.merged, merged_out);
        std::cout << "registered " << scans.size() << " scans, merged "
                  << result.merged.points.size() << " points\n";
      }
    } else if (*selftest) {
      SelfTestOptions opts;
      opts.seed = selftest_seed;
      opts.inject_omega_fault = inject_fault;
      const auto checks = run_selftest(opts);
      print_selftest_report(checks, std::cout);
      for (const auto& c : checks)
        if (!c.pass) return 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
