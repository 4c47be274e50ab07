#include "rdbia/distortion.hpp"

#include <limits>
#include <string>

namespace rdbia {

DistortionSpec make_distortion(Mat d) {
  if (d.empty()) throw Error(ErrorCode::BadArgument, "empty distortion matrix");
  const std::size_t m = d.size();
  for (const auto& row : d) {
    if (row.size() != m) {
      throw Error(ErrorCode::ShapeMismatch, "distortion matrix is not square");
    }
  }
  double d_max = 0.0;
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      const double v = d[x][y];
      if (v < 0.0) {
        throw Error(ErrorCode::NegativeEntry, "d(" + std::to_string(x) + "," +
                                                  std::to_string(y) + ") < 0");
      }
      if (x == y && v != 0.0) {
        throw Error(ErrorCode::NonzeroDiagonal,
                    "d(" + std::to_string(x) + "," + std::to_string(x) + ") != 0");
      }
      if (x != y && v == 0.0) {
        throw Error(ErrorCode::ZeroOffDiagonal, "d(" + std::to_string(x) + "," +
                                                    std::to_string(y) + ") == 0");
      }
      if (v > d_max) d_max = v;
      if (v > 0.0 && v < d_min) d_min = v;
    }
  }
  return DistortionSpec{std::move(d), d_max, d_min};
}

DistortionSpec hamming_distortion(std::size_t m) {
  Mat d(m, std::vector<double>(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) d[i][i] = 0.0;
  return make_distortion(std::move(d));
}

double block_distortion(const DistortionSpec& spec, std::span<const int> s,
                        std::span<const int> t) {
  if (s.size() != t.size()) {
    throw Error(ErrorCode::LengthMismatch, "sequences of different length");
  }
  const int m = static_cast<int>(spec.alphabet_size());
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] < 0 || s[j] >= m || t[j] < 0 || t[j] >= m) {
      throw Error(ErrorCode::OutOfRange, "symbol outside alphabet");
    }
    sum += spec.d[static_cast<std::size_t>(s[j])][static_cast<std::size_t>(t[j])];
  }
  return sum;
}

}  // namespace rdbia
