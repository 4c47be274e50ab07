#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdbia/blocks.hpp"
#include "rdbia/bounds.hpp"
#include "rdbia/distortion.hpp"

namespace rdbia {

// Fixed-rate block code on length-L sequences over an m-ary alphabet:
// encode maps every source sequence to an index below 2^floor(rate_bits),
// decode maps every index to a reproduction sequence.
struct Codebook {
  std::size_t alphabet_size = 0;
  int block_length_in = 0;
  double rate_bits = 0.0;
  std::vector<std::size_t> encode_table;  // size m^L
  std::vector<std::size_t> decode_table;  // sequence index per code index

  std::size_t num_codewords() const { return decode_table.size(); }
  std::size_t encode(std::size_t seq_index) const;
  std::vector<int> decode(std::size_t code_index) const;
};

// decode(encode(s)) == s; needs 2^floor(rate_bits) >= m^L.
Codebook identity_codebook(std::size_t m, int L);
// Arbitrary total maps drawn from a seeded generator.
Codebook random_codebook(std::size_t m, int L, double rate_bits,
                         std::uint64_t seed);

// Drops the first tau coordinates.
std::vector<int> project(std::span<const int> s, int tau);
// Prepends tau copies of fill.
std::vector<int> extend(std::span<const int> t, int tau, int fill);

struct TransformedDistortion {
  double full = 0.0;       // distortion of the tau-padded reproduction
  double projected = 0.0;  // distortion of the coded suffix alone
};

// Codes the projected suffix of s with `code`, pads the reproduction back to
// length T with `fill`, and returns both distortions. The pair always
// satisfies full <= projected + tau * d_max.
TransformedDistortion transformed_code_distortion(const DistortionSpec& spec,
                                                  const Codebook& code,
                                                  std::span<const int> s,
                                                  int tau, int fill);

// Rate monotonicity under marginalization: for a source on a two-axis product
// alphabet with additive distortion, R of the first-axis marginal at D never
// exceeds R of the joint at D.
BoundReport check_marginal_dominance(const BlockSource& joint, double D,
                                     double tol_bits = 1e-6,
                                     const SolverOptions& opts = {});

}  // namespace rdbia
