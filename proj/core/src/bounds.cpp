#include "rdbia/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "rdbia/textio.hpp"

namespace rdbia {

namespace {

BoundReport gated(std::string name, std::string why, int T, int tau, double D,
                  std::string pi_label) {
  BoundReport r;
  r.name = std::move(name);
  r.preconditions_met = false;
  r.note = std::move(why);
  r.pass = false;
  r.T = T;
  r.tau = tau;
  r.D = D;
  r.pi_label = std::move(pi_label);
  return r;
}

BoundReport judged(std::string name, double lhs, double rhs, double tol, int T,
                   int tau, double D, std::string pi_label) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = r.margin >= -tol;
  r.T = T;
  r.tau = tau;
  r.D = D;
  r.pi_label = std::move(pi_label);
  return r;
}

void run_parallel(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& work) {
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          const std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

double k_constant(const DistortionSpec& spec, std::size_t m) {
  return 7.0 * (spec.d_max / spec.d_min) * 2.0 *
         std::log2(static_cast<double>(m));
}

bool delta_condition(double delta, const DistortionSpec& spec) {
  if (delta < 0.0) throw Error(ErrorCode::DomainError, "delta < 0");
  return delta <= 4.0 * spec.d_min / spec.d_max;
}

double xlog1overx(double delta) {
  if (delta < 0.0 || delta > 1.0) {
    throw Error(ErrorCode::DomainError,
                "x log2(1/x) used outside [0, 1]: " + format_g12(delta));
  }
  if (delta == 0.0) return 0.0;
  return delta * std::log2(1.0 / delta);
}

BoundReport check_initial_dist_bound(const MarkovChain& chain,
                                     const DistortionSpec& spec, int T, int tau,
                                     double D, double tol_bits,
                                     const SolverOptions& opts) {
  if (!(T > tau) || tau < 0 || !(D > 0.0)) {
    throw Error(ErrorCode::BadArgument, "need T > tau >= 0 and D > 0");
  }
  const double delta = delta_tau(chain, tau);
  if (!delta_condition(delta, spec)) {
    return gated("initial_dist",
                 "delta=" + format_g12(delta) + " above 4*d_min/d_max gate", T,
                 tau, D, "");
  }
  if (delta > 1.0) {
    return gated("initial_dist", "delta=" + format_g12(delta) + " above 1", T,
                 tau, D, "");
  }
  const double L = static_cast<double>(T - tau);
  const MarkovChain ref = with_initial(chain, stationary(chain));
  const BlockSource a = projected_distribution(chain, spec, T, tau);
  const BlockSource b = projected_distribution(ref, spec, T, tau);
  const double ra = rd_at_distortion(a, L * D, opts).R / L;
  const double rb = rd_at_distortion(b, L * D, opts).R / L;
  const double K = k_constant(spec, chain.num_states());
  return judged("initial_dist", std::abs(ra - rb), K * xlog1overx(delta),
                tol_bits, T, tau, D, "");
}

std::pair<BoundReport, BoundReport> check_sandwich(const MarkovChain& chain,
                                                   const DistortionSpec& spec,
                                                   int T, int tau, double D,
                                                   double tol_bits,
                                                   const SolverOptions& opts) {
  if (!(T > tau) || tau < 0 || !(D > 0.0)) {
    throw Error(ErrorCode::BadArgument, "need T > tau >= 0 and D > 0");
  }
  const BlockSource full = block_distribution(chain, spec, T);
  const BlockSource proj = projected_distribution(chain, spec, T, tau);
  const double TD = T * D;
  const double r_full = rd_at_distortion(full, TD, opts).R;
  const double r_proj = rd_at_distortion(proj, TD, opts).R;
  BoundReport lower =
      judged("sandwich_lower", r_proj, r_full, tol_bits, T, tau, D, "");
  BoundReport upper;
  if (TD > tau * spec.d_max) {
    const double r_shift = rd_at_distortion(proj, TD - tau * spec.d_max, opts).R;
    upper = judged("sandwich_upper", r_full, r_shift, tol_bits, T, tau, D, "");
  } else {
    upper = gated("sandwich_upper",
                  "TD=" + format_g12(TD) + " <= tau*d_max=" +
                      format_g12(tau * spec.d_max),
                  T, tau, D, "");
  }
  return {std::move(lower), std::move(upper)};
}

BoundReport check_convex_gap(const RDCurve& curve, double K0_bits,
                             double slack) {
  BoundReport worst;
  worst.name = "convex_gap";
  worst.pass = true;
  worst.margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
      const double a = curve.points[i].D;
      const double ap = curve.points[j].D;
      const double lhs = curve.points[i].R - curve.points[j].R;
      const double rhs = (K0_bits / a) * (ap - a);
      const double margin = rhs - lhs;
      if (!any || margin < worst.margin) {
        any = true;
        worst.lhs = lhs;
        worst.rhs = rhs;
        worst.margin = margin;
        worst.pass = margin >= -slack;
      }
    }
  }
  if (!any) {
    worst.margin = 0.0;
    worst.pass = true;
  }
  worst.T = curve.origin.T;
  worst.tau = curve.origin.tau;
  worst.pi_label = curve.origin.pi_label;
  return worst;
}

ConvergenceTable convergence_experiment(
    const Mat& P,
    const std::vector<std::pair<std::string, std::vector<double>>>& pis,
    const DistortionSpec& spec, double D, std::span<const int> T_list,
    int tau_for_reference, const SolverOptions& opts, int jobs,
    std::size_t budget) {
  if (!(D > 0.0)) throw Error(ErrorCode::BadArgument, "D must be > 0");
  if (T_list.empty()) throw Error(ErrorCode::BadArgument, "empty T list");
  std::vector<int> Ts(T_list.begin(), T_list.end());
  std::sort(Ts.begin(), Ts.end());

  // reference start: the stationary distribution
  MarkovChain probe = validate_chain(P, std::vector<double>(P.size(), 1.0 / P.size()));
  const std::vector<double> pi = stationary(probe);
  std::vector<std::pair<std::string, std::vector<double>>> starts;
  starts.emplace_back("pi", pi);
  starts.insert(starts.end(), pis.begin(), pis.end());

  for (const auto& [label, start] : starts) {
    const MarkovChain c = with_initial(probe, start);
    log_line(1, "converge: delta^(" + std::to_string(tau_for_reference) +
                    ") for " + label + " = " +
                    format_g12(delta_tau(c, tau_for_reference)));
  }

  struct Cell {
    int T;
    std::size_t start;
    double F = 0.0;
  };
  std::vector<Cell> cells;
  for (int T : Ts) {
    for (std::size_t s = 0; s < starts.size(); ++s) {
      cells.push_back(Cell{T, s});
    }
  }
  run_parallel(cells.size(), jobs, [&](std::size_t i) {
    Cell& cell = cells[i];
    const MarkovChain chain = with_initial(probe, starts[cell.start].second);
    const BlockSource src = block_distribution(chain, spec, cell.T, budget);
    cell.F = rd_at_distortion(src, cell.T * D, opts).R / cell.T;
  });

  ConvergenceTable table;
  table.D = D;
  table.tau_ref = tau_for_reference;
  std::map<int, double> F_ref;
  for (const auto& cell : cells) {
    if (starts[cell.start].first == "pi") F_ref[cell.T] = cell.F;
  }
  for (const auto& cell : cells) {
    ConvergenceRow row;
    row.T = cell.T;
    row.pi_label = starts[cell.start].first;
    row.F_bits = cell.F;
    row.gap_bits = std::abs(cell.F - F_ref.at(cell.T));
    const double ceiling = std::log2(static_cast<double>(P.size()));
    if (row.F_bits < -1e-9 || row.F_bits > ceiling + 1e-9) {
      throw Error(ErrorCode::DomainError,
                  "normalized rate outside [0, log2 m]");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepResult run_bound_sweep(const SweepSpec& spec, const SolverOptions& opts,
                            int jobs) {
  if (spec.chains.empty() || spec.distortions.empty() || spec.pis.empty() ||
      spec.T_list.empty() || spec.D_list.empty()) {
    throw Error(ErrorCode::BadArgument, "sweep needs chains/distortions/pis/T/D");
  }

  // Every distinct projected source in the sweep becomes one task holding all
  // absolute distortion levels queried from it; evaluating each task's grid
  // once (warm-started, ascending) also yields the curve for the convex-gap
  // check. pi index -1 denotes the stationary start.
  struct SourceKey {
    std::size_t chain_i, dist_i;
    int pi_i;
    int T, tau;
    auto operator<=>(const SourceKey&) const = default;
  };
  std::map<SourceKey, std::set<double>> tasks;
  auto add_query = [&](SourceKey key, double D_abs) {
    if (D_abs > 0.0) tasks[key].insert(D_abs);
  };
  auto tau_selected = [&](int tau) {
    return spec.tau_filter.empty() ||
           std::find(spec.tau_filter.begin(), spec.tau_filter.end(), tau) !=
               spec.tau_filter.end();
  };

  for (std::size_t ci = 0; ci < spec.chains.size(); ++ci) {
    for (std::size_t di = 0; di < spec.distortions.size(); ++di) {
      const double d_max = make_distortion(spec.distortions[di].second).d_max;
      for (std::size_t pi_i = 0; pi_i < spec.pis.size(); ++pi_i) {
        for (int T : spec.T_list) {
          for (int tau = 0; tau < T; ++tau) {
            if (!tau_selected(tau)) continue;
            for (double D : spec.D_list) {
              const double TD = T * D;
              const int p = static_cast<int>(pi_i);
              // sandwich lower
              add_query({ci, di, p, T, tau}, TD);
              add_query({ci, di, p, T, 0}, TD);
              // sandwich upper
              if (TD > tau * d_max) {
                add_query({ci, di, p, T, tau}, TD - tau * d_max);
              }
              // initial-distribution bound (gate evaluated later)
              add_query({ci, di, p, T, tau}, (T - tau) * D);
              add_query({ci, di, -1, T, tau}, (T - tau) * D);
            }
          }
        }
      }
    }
  }

  struct TaskResult {
    std::map<double, double> rate;  // absolute D -> R bits
    RDCurve curve;
  };
  std::vector<std::pair<SourceKey, std::set<double>>> task_list(tasks.begin(),
                                                                tasks.end());
  std::vector<TaskResult> results(task_list.size());

  run_parallel(task_list.size(), jobs, [&](std::size_t i) {
    const auto& [key, dset] = task_list[i];
    log_line(2, "sweep task " + spec.chains[key.chain_i].first + "/" +
                    spec.distortions[key.dist_i].first + "/pi" +
                    std::to_string(key.pi_i) + " T=" + std::to_string(key.T) +
                    " tau=" + std::to_string(key.tau));
    const Mat& P = spec.chains[key.chain_i].second;
    const DistortionSpec dspec =
        make_distortion(spec.distortions[key.dist_i].second);
    MarkovChain chain = validate_chain(
        P, std::vector<double>(P.size(), 1.0 / P.size()));
    if (key.pi_i >= 0) {
      chain = with_initial(chain, spec.pis[static_cast<std::size_t>(key.pi_i)].second);
    } else {
      chain = with_initial(chain, stationary(chain));
    }
    const BlockSource src =
        projected_distribution(chain, dspec, key.T, key.tau, spec.budget);
    std::vector<double> q;
    TaskResult& out = results[i];
    out.curve.origin = SourceOrigin{
        key.pi_i >= 0 ? spec.pis[static_cast<std::size_t>(key.pi_i)].first : "pi",
        key.T, key.tau};
    for (double D_abs : dset) {
      const RDPoint pt = rd_at_distortion_warm(src, D_abs, opts, q);
      out.rate[D_abs] = pt.R;
      out.curve.points.push_back(pt);
    }
  });

  std::map<SourceKey, const TaskResult*> by_key;
  for (std::size_t i = 0; i < task_list.size(); ++i) {
    by_key[task_list[i].first] = &results[i];
  }
  auto rate_at = [&](SourceKey key, double D_abs) {
    return by_key.at(key)->rate.at(D_abs);
  };

  SweepResult sweep;
  auto push = [&](BoundReport r) {
    ++sweep.total;
    if (!r.preconditions_met) {
      ++sweep.gated;
    } else if (r.pass) {
      ++sweep.passed;
    } else {
      ++sweep.failed;
    }
    sweep.reports.push_back(std::move(r));
  };

  for (std::size_t ci = 0; ci < spec.chains.size(); ++ci) {
    for (std::size_t di = 0; di < spec.distortions.size(); ++di) {
      const DistortionSpec dspec =
          make_distortion(spec.distortions[di].second);
      const std::string suffix =
          "/" + spec.chains[ci].first + "/" + spec.distortions[di].first;
      MarkovChain base = validate_chain(
          spec.chains[ci].second,
          std::vector<double>(spec.chains[ci].second.size(), 1.0 / spec.chains[ci].second.size()));
      const double K = k_constant(dspec, base.num_states());
      for (std::size_t pi_i = 0; pi_i < spec.pis.size(); ++pi_i) {
        const auto& [plabel, pvec] = spec.pis[pi_i];
        const MarkovChain chain = with_initial(base, pvec);
        const int p = static_cast<int>(pi_i);
        for (int T : spec.T_list) {
          for (int tau = 0; tau < T; ++tau) {
            if (!tau_selected(tau)) continue;
            const double delta = delta_tau(chain, tau);
            for (double D : spec.D_list) {
              const double TD = T * D;
              BoundReport lower = judged(
                  "sandwich_lower" + suffix, rate_at({ci, di, p, T, tau}, TD),
                  rate_at({ci, di, p, T, 0}, TD), spec.tol_bits, T, tau, D,
                  plabel);
              push(std::move(lower));
              if (TD > tau * dspec.d_max) {
                push(judged("sandwich_upper" + suffix,
                            rate_at({ci, di, p, T, 0}, TD),
                            rate_at({ci, di, p, T, tau}, TD - tau * dspec.d_max),
                            spec.tol_bits, T, tau, D, plabel));
              } else {
                push(gated("sandwich_upper" + suffix,
                           "TD <= tau*d_max", T, tau, D, plabel));
              }
              if (!delta_condition(delta, dspec)) {
                push(gated("initial_dist" + suffix,
                           "delta=" + format_g12(delta) + " above gate", T, tau,
                           D, plabel));
              } else if (delta > 1.0) {
                push(gated("initial_dist" + suffix,
                           "delta=" + format_g12(delta) + " above 1", T, tau, D,
                           plabel));
              } else {
                const double L = T - tau;
                const double ra = rate_at({ci, di, p, T, tau}, L * D) / L;
                const double rb = rate_at({ci, di, -1, T, tau}, L * D) / L;
                push(judged("initial_dist" + suffix, std::abs(ra - rb),
                            K * xlog1overx(delta), spec.tol_bits, T, tau, D,
                            plabel));
              }
            }
          }
        }
      }
    }
  }

  // one convex-gap report per evaluated source curve
  for (std::size_t i = 0; i < task_list.size(); ++i) {
    const auto& key = task_list[i].first;
    const std::string suffix = "/" + spec.chains[key.chain_i].first + "/" +
                               spec.distortions[key.dist_i].first;
    const double K0 = results[i].curve.points.empty()
                          ? 0.0
                          : (key.T - key.tau) *
                                std::log2(static_cast<double>(
                                    spec.chains[key.chain_i].second.size()));
    BoundReport r = check_convex_gap(results[i].curve, K0, spec.convex_slack);
    r.name += suffix;
    push(std::move(r));
  }
  return sweep;
}

void write_csv(std::span<const BoundReport> reports, std::ostream& os) {
  os << "name,T,tau,D,pi_label,lhs,rhs,margin,preconds,pass\n";
  for (const auto& r : reports) {
    os << r.name << ',' << r.T << ',' << r.tau << ',' << format_g12(r.D) << ','
       << r.pi_label << ',' << format_g12(r.lhs) << ',' << format_g12(r.rhs)
       << ',' << format_g12(r.margin) << ',' << (r.preconditions_met ? 1 : 0)
       << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

void write_csv(const ConvergenceTable& table, std::ostream& os) {
  os << "T,pi_label,F_bits,gap_bits\n";
  for (const auto& row : table.rows) {
    os << row.T << ',' << row.pi_label << ',' << format_g12(row.F_bits) << ','
       << format_g12(row.gap_bits) << '\n';
  }
}

std::string summary_json(const SweepResult& result) {
  return std::string("{\"total\": ") + std::to_string(result.total) +
         ", \"passed\": " + std::to_string(result.passed) +
         ", \"gated\": " + std::to_string(result.gated) + "}";
}

}  // namespace rdbia
