#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rdbia/chain.hpp"
#include "rdbia/distortion.hpp"

namespace rdbia {

// Default cap on the number of super-symbols a source may hold.
inline constexpr std::size_t kDefaultBlockBudget = 65536;

// Pairwise super-symbol distortion is materialized below this size and
// decoded digit-by-digit at or above it.
inline constexpr std::size_t kMaterializeLimit = 4096;

// One coordinate of a sequence alphabet: its symbol count and the per-letter
// distortion table applied on it (row-major size x size, zero diagonal).
struct Axis {
  std::size_t size = 0;
  std::vector<double> letter_d;

  double d(std::size_t a, std::size_t b) const { return letter_d[a * size + b]; }
};

// Where a source came from, for reports and CSV labels.
struct SourceOrigin {
  std::string pi_label;
  int T = 0;
  int tau = 0;
};

// Explicit distribution over a product sequence alphabet together with the
// additive distortion between super-symbols. Immutable after construction;
// shareable across threads.
class BlockSource {
 public:
  BlockSource(std::vector<Axis> axes, std::vector<double> probs,
              SourceOrigin origin);

  std::size_t size() const { return probs_.size(); }
  std::size_t num_axes() const { return axes_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& probs() const { return probs_; }
  const SourceOrigin& origin() const { return origin_; }

  // Additive distortion between super-symbols s and t.
  double distortion(std::size_t s, std::size_t t) const;
  // sum over axes of the per-axis maximum.
  double max_distortion() const { return max_distortion_; }
  // Entropy ceiling log2(size) in bits.
  double log2_alphabet() const;

  bool uniform_alphabet() const;
  std::size_t base_alphabet_size() const;            // requires uniform axes
  std::size_t block_length() const { return axes_.size(); }

  // Digits of a super-symbol index, most significant axis first.
  std::vector<std::size_t> decode(std::size_t index) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
  std::vector<double> dmat_;  // materialized pairwise distortion, may be empty
  double max_distortion_ = 0.0;
  SourceOrigin origin_;
};

// Lexicographic sequence index: s(0) is the most significant digit.
std::size_t seq_to_index(std::span<const int> s, std::size_t m);
std::vector<int> index_to_seq(std::size_t index, std::size_t m, std::size_t L);

// Distribution of the first T steps of the chain as a vector source:
// probs[s] = pi0(s(1)) * prod p_{s(i) s(i+1)}. Throws BlockTooLarge when
// m^T exceeds the budget.
BlockSource block_distribution(const MarkovChain& chain,
                               const DistortionSpec& spec, int T,
                               std::size_t budget = kDefaultBlockBudget);

// Marginal on the last T - tau coordinates: the same product with the
// time-(tau+1) state distribution in front.
BlockSource projected_distribution(const MarkovChain& chain,
                                   const DistortionSpec& spec, int T, int tau,
                                   std::size_t budget = kDefaultBlockBudget);

// Source over an arbitrary product alphabet with an explicit distribution;
// every axis matrix must be square, nonnegative, zero on the diagonal.
BlockSource product_source(std::vector<Axis> axes, std::vector<double> probs,
                           std::string label);

// Marginal of a multi-axis source onto one axis, keeping that axis' letter
// distortion.
BlockSource axis_marginal(const BlockSource& src, std::size_t axis);

double l1_distance(const BlockSource& a, const BlockSource& b);

// CSV dump: columns seq,index,prob.
void write_csv(const BlockSource& src, std::ostream& os);

}  // namespace rdbia
