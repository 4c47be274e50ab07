#include "rdbia_cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <random>

#include "CLI11.hpp"
#include "rdbia/blocks.hpp"
#include "rdbia/bounds.hpp"
#include "rdbia/codetransform.hpp"
#include "rdbia/rdsolver.hpp"
#include "rdbia/textio.hpp"

namespace rdbia::cli {

namespace {

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw Error(ErrorCode::IoError, "cannot write " + path);
      os = &file;
    }
  }
  std::ostream& get() { return *os; }
};

ExperimentConfig load(const CommonArgs& args) {
  if (args.config_path.empty()) {
    throw Error(ErrorCode::BadArgument, "--config is required");
  }
  ExperimentConfig cfg = load_config(args.config_path);
  if (!args.D_override.empty()) cfg.D_list = args.D_override;
  if (!args.T_override.empty()) cfg.T_list = args.T_override;
  if (!args.tau_override.empty()) cfg.tau_list = args.tau_override;
  if (args.seed != 0) cfg.seed = args.seed;
  if (args.budget != 0) cfg.budget = args.budget;
  return cfg;
}

}  // namespace

int cmd_chain_info(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  OutStream out(args.out_path);
  const auto pi = stationary(cfg.chain);
  out.get() << "states: " << cfg.chain.num_states() << " (";
  for (std::size_t i = 0; i < cfg.chain.states.size(); ++i) {
    out.get() << (i ? "," : "") << cfg.chain.states[i];
  }
  out.get() << ")\n";
  out.get() << "primitivity_exponent: " << cfg.chain.primitivity_exponent << "\n";
  out.get() << "stationary:";
  for (double v : pi) out.get() << ' ' << format_g12(v);
  out.get() << "\n";
  out.get() << "tau,delta\n";
  for (int tau = 0; tau <= cfg.tau_max; ++tau) {
    out.get() << tau << ',' << format_g12(delta_tau(cfg.chain, tau)) << '\n';
  }
  return 0;
}

int cmd_rd_curve(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const int T = cfg.T_list.empty() ? 1 : cfg.T_list.front();
  const int tau = cfg.tau_list.empty() ? 0 : cfg.tau_list.front();
  std::vector<double> grid = cfg.D_grid.empty() ? cfg.D_list : cfg.D_grid;
  if (grid.empty()) {
    throw Error(ErrorCode::BadArgument, "need D_grid or D in the config");
  }
  const BlockSource src =
      tau == 0 ? block_distribution(cfg.chain, cfg.distortion, T, cfg.budget)
               : projected_distribution(cfg.chain, cfg.distortion, T, tau,
                                        cfg.budget);
  const RDCurve curve = rd_curve(src, grid, cfg.solver_options());
  OutStream out(args.out_path);
  write_csv(curve, out.get());
  return 0;
}

int cmd_bounds(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  if (cfg.T_list.empty()) {
    throw Error(ErrorCode::BadArgument, "bounds needs a non-empty T list");
  }
  if (cfg.D_list.empty()) {
    throw Error(ErrorCode::BadArgument, "bounds needs a non-empty D list");
  }
  if (cfg.initial_distributions.empty()) {
    throw Error(ErrorCode::BadArgument,
                "bounds needs initial_distributions in the config");
  }
  SweepSpec spec;
  spec.chains.emplace_back("chain", cfg.chain.P);
  spec.distortions.emplace_back("d0", cfg.distortion.d);
  spec.pis = cfg.initial_distributions;
  spec.T_list = cfg.T_list;
  spec.tau_filter = cfg.tau_list;
  spec.D_list = cfg.D_list;
  spec.tol_bits = cfg.bound_tol_bits;
  spec.budget = cfg.budget;
  const SweepResult result = run_bound_sweep(spec, cfg.solver_options(), args.jobs);
  OutStream out(args.out_path);
  write_csv(result.reports, out.get());
  std::cout << summary_json(result) << '\n';
  return result.failed == 0 ? 0 : 1;
}

int cmd_converge(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  if (cfg.T_list.empty() || cfg.D_list.empty()) {
    throw Error(ErrorCode::BadArgument, "converge needs T and D");
  }
  if (cfg.initial_distributions.empty()) {
    throw Error(ErrorCode::BadArgument,
                "converge needs initial_distributions in the config");
  }
  const ConvergenceTable table = convergence_experiment(
      cfg.chain.P, cfg.initial_distributions, cfg.distortion, cfg.D_list.front(),
      cfg.T_list, cfg.tau_ref, cfg.solver_options(), args.jobs, cfg.budget);
  OutStream out(args.out_path);
  write_csv(table, out.get());
  return 0;
}

int cmd_oracle_compare(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  if (cfg.D_list.empty()) {
    throw Error(ErrorCode::BadArgument, "oracle-compare needs a D list");
  }
  const BlockSource src = block_distribution(cfg.chain, cfg.distortion, 1);
  if (src.size() > 3) {
    throw Error(ErrorCode::AlphabetTooLarge,
                "oracle comparison needs at most 3 symbols");
  }
  OutStream out(args.out_path);
  out.get() << "D,solver_bits,oracle_bits,diff\n";
  double worst = 0.0;
  for (double D : cfg.D_list) {
    const double solver = rd_at_distortion(src, D, cfg.solver_options()).R;
    const double oracle = brute_force_rd(src, D, 0.01);
    const double diff = std::abs(solver - oracle);
    worst = std::max(worst, diff);
    out.get() << format_g12(D) << ',' << format_g12(solver) << ','
              << format_g12(oracle) << ',' << format_g12(diff) << '\n';
  }
  std::cout << "{\"max_diff_bits\": " << format_g12(worst) << "}\n";
  return worst <= 0.02 ? 0 : 1;
}

int cmd_code_demo(const CommonArgs& args) {
  const ExperimentConfig cfg = load(args);
  const std::size_t m = cfg.chain.num_states();
  const int T = cfg.T_list.empty() ? 5 : cfg.T_list.front();
  OutStream out(args.out_path);
  std::size_t violations = 0;
  std::size_t cases = 0;
  for (int tau = 0; tau < T; ++tau) {
    const int L = T - tau;
    std::vector<Codebook> books;
    books.push_back(identity_codebook(m, L));
    books.push_back(random_codebook(m, L, std::max(1.0, L / 2.0),
                                    cfg.seed + static_cast<std::uint64_t>(tau)));
    std::size_t total = 1;
    for (int i = 0; i < T; ++i) total *= m;
    for (const auto& book : books) {
      for (std::size_t idx = 0; idx < total; ++idx) {
        const std::vector<int> s = index_to_seq(idx, m, T);
        const auto td = transformed_code_distortion(cfg.distortion, book, s,
                                                    tau, 0);
        ++cases;
        if (td.full > td.projected + tau * cfg.distortion.d_max + 1e-12) {
          ++violations;
        }
      }
    }
  }
  out.get() << "padding_inequality_cases: " << cases << "\n";
  out.get() << "padding_inequality_violations: " << violations << "\n";

  // small joint source demo: correlated pair, additive two-part distortion
  std::vector<Axis> axes{Axis{2, {0.0, 1.0, 1.0, 0.0}},
                         Axis{2, {0.0, 1.0, 1.0, 0.0}}};
  std::vector<double> joint{0.35, 0.15, 0.1, 0.4};
  const BlockSource js = product_source(axes, joint, "demo_pair");
  bool dominance_ok = true;
  for (double D : cfg.D_list.empty() ? std::vector<double>{0.1, 0.2}
                                     : cfg.D_list) {
    const BoundReport r =
        check_marginal_dominance(js, D, cfg.bound_tol_bits, cfg.solver_options());
    dominance_ok = dominance_ok && r.pass;
    out.get() << "marginal_dominance D=" << format_g12(D)
              << " lhs=" << format_g12(r.lhs) << " rhs=" << format_g12(r.rhs)
              << (r.pass ? " pass" : " FAIL") << "\n";
  }
  return (violations == 0 && dominance_ok) ? 0 : 1;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"block-independent Markov chain rate-distortion toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)");
    cmd->add_option("--out", args.out_path, "output path (default: stdout)");
    cmd->add_option("--jobs", args.jobs, "worker threads for sweeps");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--budget", args.budget,
                    "override the super-symbol memory budget");
    cmd->add_option("--D", args.D_override, "override distortion levels");
    cmd->add_option("--T", args.T_override, "override block lengths");
    cmd->add_option("--tau", args.tau_override, "override projection depths");
  };

  auto* chain_info = app.add_subcommand("chain-info", "chain sanity report");
  auto* rd_curve_cmd = app.add_subcommand("rd-curve", "rate-distortion curve CSV");
  auto* bounds = app.add_subcommand("bounds", "inequality verification sweep");
  auto* converge = app.add_subcommand("converge", "normalized-rate convergence table");
  auto* oracle = app.add_subcommand("oracle-compare", "solver vs exhaustive oracle");
  auto* code_demo = app.add_subcommand("code-demo", "projection/padding code demo");
  for (auto* cmd : {chain_info, rd_curve_cmd, bounds, converge, oracle, code_demo}) {
    add_common(cmd);
  }

  try {
    app.parse(argc, argv);
    if (chain_info->parsed()) return cmd_chain_info(args);
    if (rd_curve_cmd->parsed()) return cmd_rd_curve(args);
    if (bounds->parsed()) return cmd_bounds(args);
    if (converge->parsed()) return cmd_converge(args);
    if (oracle->parsed()) return cmd_oracle_compare(args);
    if (code_demo->parsed()) return cmd_code_demo(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rdbia::cli
