#include "rdbia/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rdbia/textio.hpp"

namespace rdbia {

namespace {

void validate_axis(const Axis& axis) {
  if (axis.size == 0 || axis.letter_d.size() != axis.size * axis.size) {
    throw Error(ErrorCode::ShapeMismatch, "axis table size mismatch");
  }
  for (std::size_t a = 0; a < axis.size; ++a) {
    for (std::size_t b = 0; b < axis.size; ++b) {
      const double v = axis.d(a, b);
      if (v < 0.0) throw Error(ErrorCode::NegativeEntry, "axis distortion < 0");
      if (a == b && v != 0.0) {
        throw Error(ErrorCode::NonzeroDiagonal, "axis diagonal must be 0");
      }
    }
  }
}

Axis axis_from_spec(const DistortionSpec& spec) {
  Axis axis;
  axis.size = spec.alphabet_size();
  axis.letter_d.reserve(axis.size * axis.size);
  for (const auto& row : spec.d) {
    axis.letter_d.insert(axis.letter_d.end(), row.begin(), row.end());
  }
  return axis;
}

// m^T guarded by the budget; throws instead of overflowing.
std::size_t checked_pow(std::size_t m, int T, std::size_t budget) {
  std::size_t n = 1;
  for (int i = 0; i < T; ++i) {
    if (n > budget / m) {
      throw Error(ErrorCode::BlockTooLarge,
                  "alphabet size exceeds budget of " + std::to_string(budget) +
                      " super-symbols");
    }
    n *= m;
  }
  if (n > budget) {
    throw Error(ErrorCode::BlockTooLarge,
                "alphabet size exceeds budget of " + std::to_string(budget) +
                    " super-symbols");
  }
  return n;
}

// probs[s] = start(s(1)) * prod_{i} P[s(i)][s(i+1)] built digit by digit;
// the last digit of a length-k prefix index is (index % m).
std::vector<double> chain_block_probs(const Mat& P,
                                      const std::vector<double>& start, int L) {
  const std::size_t m = P.size();
  std::vector<double> probs = start;
  for (int step = 1; step < L; ++step) {
    std::vector<double> next(probs.size() * m);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double pv = probs[i];
      const std::size_t last = i % m;
      for (std::size_t b = 0; b < m; ++b) next[i * m + b] = pv * P[last][b];
    }
    probs = std::move(next);
  }
  return probs;
}

}  // namespace

BlockSource::BlockSource(std::vector<Axis> axes, std::vector<double> probs,
                         SourceOrigin origin)
    : axes_(std::move(axes)), probs_(std::move(probs)), origin_(std::move(origin)) {
  if (axes_.empty()) throw Error(ErrorCode::BadArgument, "source needs axes");
  std::size_t n = 1;
  for (const auto& axis : axes_) {
    validate_axis(axis);
    n *= axis.size;
  }
  if (n != probs_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "probability vector does not match axes");
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t j = axes_.size(); j-- > 1;) {
    strides_[j - 1] = strides_[j] * axes_[j].size;
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw Error(ErrorCode::NegativeEntry, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw Error(ErrorCode::BadArgument,
                "probabilities sum to " + std::to_string(sum));
  }
  for (const auto& axis : axes_) {
    max_distortion_ +=
        *std::max_element(axis.letter_d.begin(), axis.letter_d.end());
  }
  if (probs_.size() < kMaterializeLimit) {
    dmat_.assign(probs_.size() * probs_.size(), 0.0);
    for (std::size_t s = 0; s < probs_.size(); ++s) {
      std::size_t sr = s;
      // accumulate one axis at a time to avoid re-decoding per pair
      for (std::size_t j = 0; j < axes_.size(); ++j) {
        const std::size_t sd = sr / strides_[j];
        sr %= strides_[j];
        for (std::size_t t = 0; t < probs_.size(); ++t) {
          const std::size_t td = (t / strides_[j]) % axes_[j].size;
          dmat_[s * probs_.size() + t] += axes_[j].d(sd, td);
        }
      }
    }
  }
}

double BlockSource::distortion(std::size_t s, std::size_t t) const {
  if (s >= size() || t >= size()) {
    throw Error(ErrorCode::OutOfRange, "super-symbol index out of range");
  }
  if (!dmat_.empty()) return dmat_[s * size() + t];
  double sum = 0.0;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const std::size_t sd = (s / strides_[j]) % axes_[j].size;
    const std::size_t td = (t / strides_[j]) % axes_[j].size;
    sum += axes_[j].d(sd, td);
  }
  return sum;
}

double BlockSource::log2_alphabet() const {
  double bits = 0.0;
  for (const auto& axis : axes_) bits += std::log2(static_cast<double>(axis.size));
  return bits;
}

bool BlockSource::uniform_alphabet() const {
  for (const auto& axis : axes_) {
    if (axis.size != axes_[0].size || axis.letter_d != axes_[0].letter_d) {
      return false;
    }
  }
  return true;
}

std::size_t BlockSource::base_alphabet_size() const {
  if (!uniform_alphabet()) {
    throw Error(ErrorCode::BadArgument, "axes are not uniform");
  }
  return axes_[0].size;
}

std::vector<std::size_t> BlockSource::decode(std::size_t index) const {
  std::vector<std::size_t> digits(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    digits[j] = (index / strides_[j]) % axes_[j].size;
  }
  return digits;
}

std::size_t seq_to_index(std::span<const int> s, std::size_t m) {
  std::size_t index = 0;
  for (int sym : s) {
    if (sym < 0 || static_cast<std::size_t>(sym) >= m) {
      throw Error(ErrorCode::OutOfRange, "symbol outside [0, m)");
    }
    index = index * m + static_cast<std::size_t>(sym);
  }
  return index;
}

std::vector<int> index_to_seq(std::size_t index, std::size_t m, std::size_t L) {
  std::size_t cap = 1;
  for (std::size_t j = 0; j < L; ++j) cap *= m;
  if (index >= cap) throw Error(ErrorCode::OutOfRange, "index outside alphabet");
  std::vector<int> s(L, 0);
  for (std::size_t j = L; j-- > 0;) {
    s[j] = static_cast<int>(index % m);
    index /= m;
  }
  return s;
}

BlockSource block_distribution(const MarkovChain& chain,
                               const DistortionSpec& spec, int T,
                               std::size_t budget) {
  if (T < 1) throw Error(ErrorCode::BadArgument, "T must be >= 1");
  if (spec.alphabet_size() != chain.num_states()) {
    throw Error(ErrorCode::ShapeMismatch, "distortion alphabet != chain states");
  }
  checked_pow(chain.num_states(), T, budget);
  std::vector<Axis> axes(static_cast<std::size_t>(T), axis_from_spec(spec));
  return BlockSource(std::move(axes), chain_block_probs(chain.P, chain.pi0, T),
                     SourceOrigin{"pi0", T, 0});
}

BlockSource projected_distribution(const MarkovChain& chain,
                                   const DistortionSpec& spec, int T, int tau,
                                   std::size_t budget) {
  if (T < 1 || tau < 0 || tau >= T) {
    throw Error(ErrorCode::BadArgument, "need 0 <= tau < T");
  }
  if (spec.alphabet_size() != chain.num_states()) {
    throw Error(ErrorCode::ShapeMismatch, "distortion alphabet != chain states");
  }
  checked_pow(chain.num_states(), T - tau, budget);
  const std::vector<double> start = t_step_distribution(chain, tau);
  std::vector<Axis> axes(static_cast<std::size_t>(T - tau), axis_from_spec(spec));
  return BlockSource(std::move(axes), chain_block_probs(chain.P, start, T - tau),
                     SourceOrigin{"pi0", T, tau});
}

BlockSource product_source(std::vector<Axis> axes, std::vector<double> probs,
                           std::string label) {
  return BlockSource(std::move(axes), std::move(probs),
                     SourceOrigin{std::move(label), 0, 0});
}

BlockSource axis_marginal(const BlockSource& src, std::size_t axis) {
  if (axis >= src.num_axes()) {
    throw Error(ErrorCode::OutOfRange, "axis out of range");
  }
  const std::size_t n = src.axes()[axis].size;
  std::vector<double> marg(n, 0.0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    marg[src.decode(i)[axis]] += src.probs()[i];
  }
  return BlockSource({src.axes()[axis]}, std::move(marg),
                     SourceOrigin{src.origin().pi_label + ":axis" +
                                      std::to_string(axis),
                                  src.origin().T, src.origin().tau});
}

double l1_distance(const BlockSource& a, const BlockSource& b) {
  if (a.num_axes() != b.num_axes()) {
    throw Error(ErrorCode::ShapeMismatch, "different number of axes");
  }
  for (std::size_t j = 0; j < a.num_axes(); ++j) {
    if (a.axes()[j].size != b.axes()[j].size) {
      throw Error(ErrorCode::ShapeMismatch, "axis sizes differ");
    }
  }
  return l1(a.probs(), b.probs());
}

void write_csv(const BlockSource& src, std::ostream& os) {
  os << "seq,index,prob\n";
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto digits = src.decode(i);
    for (std::size_t j = 0; j < digits.size(); ++j) os << digits[j];
    os << ',' << i << ',' << format_g12(src.probs()[i]) << '\n';
  }
}

}  // namespace rdbia
