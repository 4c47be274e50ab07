#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rdbia/errors.hpp"

namespace rdbia {

// Dense row-major square matrix, sized for small state spaces.
using Mat = std::vector<std::vector<double>>;

// Finite-state Markov chain with a fixed initial distribution. Instances are
// immutable and only come out of validate_chain(), so holding one implies the
// transition matrix is row-stochastic and primitive (irreducible + aperiodic)
// and the initial distribution is a probability vector.
struct MarkovChain {
  std::vector<std::string> states;  // display names, size m
  Mat P;                            // m x m transition probabilities
  std::vector<double> pi0;          // initial distribution, size m
  int primitivity_exponent = 0;     // smallest k with P^k entrywise positive

  std::size_t num_states() const { return P.size(); }
};

// Checks row-stochasticity (1e-12), nonnegativity, and primitivity via the
// positive-power test up to the Wielandt exponent (m-1)^2 + 1. Throws
// Error{NotStochastic, NotPrimitive, BadInitial}.
MarkovChain validate_chain(Mat P, std::vector<double> pi0,
                           std::vector<std::string> states = {});

// Same transition matrix, different start.
MarkovChain with_initial(const MarkovChain& chain, std::vector<double> pi0);

// Unique stationary distribution, solved as a linear system with the
// normalization constraint replacing one balance equation.
std::vector<double> stationary(const MarkovChain& chain);

// Distribution of the state at time tau+1: pi0 * P^tau.
std::vector<double> t_step_distribution(const MarkovChain& chain, int tau);

// l1 distance between the time-(tau+1) distribution and the stationary one.
double delta_tau(const MarkovChain& chain, int tau);

// P^t by repeated squaring; rows renormalized after every multiply to damp
// floating-point drift.
Mat stochastic_power(const Mat& P, int t);

// True when v is entrywise nonnegative and sums to 1 within tol.
bool is_distribution(std::span<const double> v, double tol = 1e-12);

double l1(std::span<const double> a, std::span<const double> b);

}  // namespace rdbia
