#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdbia/blocks.hpp"
#include "rdbia/rdsolver.hpp"

namespace rdbia {

// Outcome of one numeric inequality check: lhs <= rhs + tol when the listed
// preconditions hold. Gated checks (preconditions_met == false) never pass.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool preconditions_met = true;
  std::string note;       // why a check was gated, empty otherwise
  double margin = 0.0;    // rhs - lhs
  bool pass = false;
  // sweep context
  int T = 0;
  int tau = 0;
  double D = 0.0;
  std::string pi_label;
};

// K = 7 (d_max / d_min) * 2 log2(m) bits; the constant in front of the
// initial-distribution continuity bound. Independent of T, tau, D.
double k_constant(const DistortionSpec& spec, std::size_t m);

// Gate for the continuity bound: delta <= 4 d_min / d_max.
bool delta_condition(double delta, const DistortionSpec& spec);

// delta * log2(1/delta) with the value 0 at delta = 0; defined on [0, 1].
double xlog1overx(double delta);

// |(1/(T-tau)) R_{J_tau(pi')}((T-tau)D) - (1/(T-tau)) R_{J_tau(pi)}((T-tau)D)|
// <= K * delta log2(1/delta), checked whenever the delta gate (and delta <= 1)
// holds; otherwise reported as gated.
BoundReport check_initial_dist_bound(const MarkovChain& chain,
                                     const DistortionSpec& spec, int T, int tau,
                                     double D, double tol_bits = 1e-6,
                                     const SolverOptions& opts = {});

// The two-sided projection sandwich
//   R_{J_tau}(TD) <= R_{X^T}(TD) <= R_{J_tau}(TD - tau * d_max);
// the upper half needs TD > tau * d_max and is gated otherwise.
std::pair<BoundReport, BoundReport> check_sandwich(const MarkovChain& chain,
                                                   const DistortionSpec& spec,
                                                   int T, int tau, double D,
                                                   double tol_bits = 1e-6,
                                                   const SolverOptions& opts = {});

// Convex-gap property of a non-increasing convex curve with R(0) <= K0:
// R(a) - R(a') <= (K0 / a)(a' - a) for all grid pairs a < a'.
BoundReport check_convex_gap(const RDCurve& curve, double K0_bits,
                             double slack = 1e-9);

struct ConvergenceRow {
  int T = 0;
  std::string pi_label;
  double F_bits = 0.0;    // (1/T) R at distortion T*D
  double gap_bits = 0.0;  // |F(T, pi') - F(T, pi)|
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // sorted by T, then label
  double D = 0.0;
  int tau_ref = 0;          // diagnostic: delta^(tau_ref) is logged per start
};

// Normalized rates of the block sources for every (T, initial distribution),
// with the stationary start as the reference column.
ConvergenceTable convergence_experiment(
    const Mat& P, const std::vector<std::pair<std::string, std::vector<double>>>& pis,
    const DistortionSpec& spec, double D, std::span<const int> T_list,
    int tau_for_reference = 0, const SolverOptions& opts = {}, int jobs = 1,
    std::size_t budget = kDefaultBlockBudget);

// Full verification sweep over chains x distortions x starts x T x tau x D.
struct SweepSpec {
  std::vector<std::pair<std::string, Mat>> chains;
  std::vector<std::pair<std::string, Mat>> distortions;
  std::vector<std::pair<std::string, std::vector<double>>> pis;
  std::vector<int> T_list;
  std::vector<int> tau_filter;  // empty = every tau < T
  std::vector<double> D_list;
  double tol_bits = 1e-6;
  double convex_slack = 1e-9;
  std::size_t budget = kDefaultBlockBudget;
};

struct SweepResult {
  std::vector<BoundReport> reports;
  int total = 0;
  int passed = 0;
  int gated = 0;
  int failed = 0;
};

SweepResult run_bound_sweep(const SweepSpec& spec, const SolverOptions& opts = {},
                            int jobs = 1);

// CSV: name,T,tau,D,pi_label,lhs,rhs,margin,preconds,pass
void write_csv(std::span<const BoundReport> reports, std::ostream& os);
// CSV: T,pi_label,F_bits,gap_bits
void write_csv(const ConvergenceTable& table, std::ostream& os);
// {"total": n, "passed": k, "gated": g}
std::string summary_json(const SweepResult& result);

}  // namespace rdbia
