#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rdbia/blocks.hpp"

namespace rdbia {

// One point on a rate-distortion curve. D is absolute distortion per
// super-symbol, R is bits per super-symbol, slope is the exponent of the
// exp(slope * d) kernel that produced the point (0 on the zero-rate branch).
struct RDPoint {
  double D = 0.0;
  double R = 0.0;
  double slope = 0.0;
  int iters = 0;
  double gap = 0.0;  // certified accuracy of R, in bits
};

struct RDCurve {
  std::vector<RDPoint> points;  // sorted by D
  SourceOrigin origin;
};

struct SolverOptions {
  double ba_tol_bits = 1e-9;  // duality-gap target per alternating run
  int max_iters = 20000;      // per alternating run
  double d_tol_abs = 1e-9;    // distortion matching: max(d_tol_abs, d_tol_rel*D)
  double d_tol_rel = 1e-6;
  int max_slope_steps = 200;
};

// Shannon entropy in bits; zero-probability terms contribute 0.
double entropy_bits(std::span<const double> p);

// Smallest expected distortion achievable with a single reproduction
// super-symbol; the zero-rate threshold of the curve.
double d_zero(const BlockSource& src);

// One alternating-minimization run at a fixed strictly negative slope.
// Returns the parametric point (D_s, R_s); R_s is within `gap` bits of the
// true curve at D_s. Throws NoConvergence when the gap target is not met.
RDPoint ba_point(const BlockSource& src, double slope,
                 const SolverOptions& opts = {});

// Warm-started variant: q is the output-distribution iterate carried across
// calls (empty = start uniform).
RDPoint ba_point_warm(const BlockSource& src, double slope,
                      const SolverOptions& opts, std::vector<double>& q);

// R(D) at a target distortion via slope bisection; exact 0 for D >= d_zero.
RDPoint rd_at_distortion(const BlockSource& src, double D,
                         const SolverOptions& opts = {});
RDPoint rd_at_distortion_warm(const BlockSource& src, double D,
                              const SolverOptions& opts, std::vector<double>& q);

// Independent oracle: exhaustive search over test channels with each row
// discretized on the probability simplex. Alphabet must have <= 3
// super-symbols and grid_step <= 0.02. Upper-bounds the true R(D) within
// O(grid_step).
double brute_force_rd(const BlockSource& src, double D, double grid_step);

// Sweeps rd_at_distortion over an increasing positive grid and validates the
// monotone/convex curve invariants before returning.
RDCurve rd_curve(const BlockSource& src, std::span<const double> D_grid,
                 const SolverOptions& opts = {});

// CSV export: columns D,R_bits,slope,iters,gap.
void write_csv(const RDCurve& curve, std::ostream& os);

}  // namespace rdbia
