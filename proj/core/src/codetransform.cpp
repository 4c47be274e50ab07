#include "rdbia/codetransform.hpp"

#include <cmath>
#include <random>

namespace rdbia {

namespace {

std::size_t pow_checked(std::size_t m, int L) {
  std::size_t n = 1;
  for (int i = 0; i < L; ++i) {
    if (n > (std::size_t{1} << 48) / m) {
      throw Error(ErrorCode::BlockTooLarge, "codebook alphabet too large");
    }
    n *= m;
  }
  return n;
}

}  // namespace

std::size_t Codebook::encode(std::size_t seq_index) const {
  if (seq_index >= encode_table.size()) {
    throw Error(ErrorCode::OutOfRange, "sequence index outside codebook domain");
  }
  return encode_table[seq_index];
}

std::vector<int> Codebook::decode(std::size_t code_index) const {
  if (code_index >= decode_table.size()) {
    throw Error(ErrorCode::OutOfRange, "code index outside codebook range");
  }
  return index_to_seq(decode_table[code_index], alphabet_size,
                      static_cast<std::size_t>(block_length_in));
}

Codebook identity_codebook(std::size_t m, int L) {
  const std::size_t n = pow_checked(m, L);
  const double rate = std::ceil(std::log2(static_cast<double>(n)));
  Codebook cb;
  cb.alphabet_size = m;
  cb.block_length_in = L;
  cb.rate_bits = rate;
  cb.encode_table.resize(n);
  cb.decode_table.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cb.encode_table[i] = i;
    cb.decode_table[i] = i;
  }
  return cb;
}

Codebook random_codebook(std::size_t m, int L, double rate_bits,
                         std::uint64_t seed) {
  const std::size_t n = pow_checked(m, L);
  const auto words = static_cast<std::size_t>(
      std::pow(2.0, std::floor(rate_bits)));
  if (words == 0) throw Error(ErrorCode::BadArgument, "rate gives no codewords");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_word(0, words - 1);
  std::uniform_int_distribution<std::size_t> pick_seq(0, n - 1);
  Codebook cb;
  cb.alphabet_size = m;
  cb.block_length_in = L;
  cb.rate_bits = rate_bits;
  cb.encode_table.resize(n);
  cb.decode_table.resize(words);
  for (auto& e : cb.encode_table) e = pick_word(rng);
  for (auto& d : cb.decode_table) d = pick_seq(rng);
  return cb;
}

std::vector<int> project(std::span<const int> s, int tau) {
  if (tau < 0 || static_cast<std::size_t>(tau) >= s.size()) {
    throw Error(ErrorCode::BadArgument,
                "tau must lie in [0, len(s)) for projection");
  }
  return std::vector<int>(s.begin() + tau, s.end());
}

std::vector<int> extend(std::span<const int> t, int tau, int fill) {
  if (tau < 0) throw Error(ErrorCode::BadArgument, "tau must be >= 0");
  std::vector<int> out(static_cast<std::size_t>(tau), fill);
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

TransformedDistortion transformed_code_distortion(const DistortionSpec& spec,
                                                  const Codebook& code,
                                                  std::span<const int> s,
                                                  int tau, int fill) {
  const std::vector<int> suffix = project(s, tau);
  if (static_cast<int>(suffix.size()) != code.block_length_in) {
    throw Error(ErrorCode::LengthMismatch,
                "codebook block length does not match T - tau");
  }
  const std::vector<int> repro =
      code.decode(code.encode(seq_to_index(suffix, code.alphabet_size)));
  TransformedDistortion out;
  out.projected = block_distortion(spec, suffix, repro);
  out.full = block_distortion(spec, s, extend(repro, tau, fill));
  return out;
}

BoundReport check_marginal_dominance(const BlockSource& joint, double D,
                                     double tol_bits,
                                     const SolverOptions& opts) {
  if (joint.num_axes() != 2) {
    throw Error(ErrorCode::BadArgument,
                "marginal dominance check expects a two-axis source");
  }
  const BlockSource a = axis_marginal(joint, 0);
  const double r_a = rd_at_distortion(a, D, opts).R;
  const double r_joint = rd_at_distortion(joint, D, opts).R;
  BoundReport r;
  r.name = "marginal_dominance";
  r.lhs = r_a;
  r.rhs = r_joint;
  r.margin = r.rhs - r.lhs;
  r.pass = r.margin >= -tol_bits;
  r.D = D;
  r.pi_label = joint.origin().pi_label;
  return r;
}

}  // namespace rdbia
