#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rdbia/chain.hpp"

namespace rdbia {

// Per-letter distortion table on a shared source/reproduction alphabet:
// zero diagonal, strictly positive off-diagonal. Built via make_distortion.
struct DistortionSpec {
  Mat d;               // m x m, d[x][y] >= 0
  double d_max = 0.0;  // largest entry
  double d_min = 0.0;  // smallest strictly positive entry

  std::size_t alphabet_size() const { return d.size(); }
};

// Validates and caches d_max / d_min. Throws Error{NonzeroDiagonal,
// ZeroOffDiagonal, NegativeEntry}.
DistortionSpec make_distortion(Mat d);

// 0/1 distortion on m symbols.
DistortionSpec hamming_distortion(std::size_t m);

// Additive distortion between two equal-length symbol sequences:
// sum_j d(s[j], t[j]). Throws LengthMismatch / OutOfRange.
double block_distortion(const DistortionSpec& spec, std::span<const int> s,
                        std::span<const int> t);

}  // namespace rdbia
