#include "rdbia/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace rdbia {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kZeroEntry = 1e-15;  // entries below this count as structural zeros

void check_square(const Mat& P) {
  if (P.size() < 2) {
    throw Error(ErrorCode::NotStochastic, "need at least 2 states");
  }
  for (const auto& row : P) {
    if (row.size() != P.size()) {
      throw Error(ErrorCode::NotStochastic, "matrix is not square");
    }
  }
}

Mat mat_mul(const Mat& a, const Mat& b) {
  const std::size_t m = a.size();
  Mat out(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += aik * b[k][j];
    }
  }
  return out;
}

void renormalize_rows(Mat& a) {
  for (auto& row : a) {
    double s = 0.0;
    for (double v : row) s += v;
    if (s > 0.0) {
      for (double& v : row) v /= s;
    }
  }
}

// Entrywise-positive test on the boolean support of P^k, k up to the Wielandt
// exponent. Returns 0 when no positive power exists.
int primitivity_exponent_of(const Mat& P) {
  const std::size_t m = P.size();
  const int wielandt = static_cast<int>((m - 1) * (m - 1) + 1);
  std::vector<std::vector<bool>> reach(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) reach[i][j] = P[i][j] > kZeroEntry;
  }
  const auto base = reach;
  for (int k = 1; k <= wielandt; ++k) {
    bool all_positive = true;
    for (const auto& row : reach) {
      for (bool v : row) {
        if (!v) {
          all_positive = false;
          break;
        }
      }
      if (!all_positive) break;
    }
    if (all_positive) return k;
    // reach <- reach * base over the boolean semiring
    std::vector<std::vector<bool>> next(m, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k2 = 0; k2 < m; ++k2) {
        if (!reach[i][k2]) continue;
        for (std::size_t j = 0; j < m; ++j) {
          if (base[k2][j]) next[i][j] = true;
        }
      }
    }
    reach = std::move(next);
  }
  return 0;
}

// Gaussian elimination with partial pivoting; A is consumed.
std::vector<double> solve_linear(Mat A, std::vector<double> b) {
  const std::size_t m = A.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
    }
    std::swap(A[col], A[pivot]);
    std::swap(b[col], b[pivot]);
    if (A[col][col] == 0.0) {
      throw Error(ErrorCode::NotPrimitive, "singular balance system");
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < m; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(m, 0.0);
  for (std::size_t r = m; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < m; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace

bool is_distribution(std::span<const double> v, double tol) {
  double sum = 0.0;
  for (double x : v) {
    if (x < 0.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

double l1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, "l1 over different lengths");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

MarkovChain validate_chain(Mat P, std::vector<double> pi0,
                           std::vector<std::string> states) {
  check_square(P);
  const std::size_t m = P.size();
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (double v : P[i]) {
      if (v < 0.0) {
        throw Error(ErrorCode::NotStochastic,
                    "negative transition probability in row " + std::to_string(i));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::NotStochastic,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
  if (pi0.size() != m || !is_distribution(pi0, kStochasticTol)) {
    throw Error(ErrorCode::BadInitial, "initial distribution invalid");
  }
  const int k = primitivity_exponent_of(P);
  if (k == 0) {
    throw Error(ErrorCode::NotPrimitive,
                "no entrywise-positive power up to the Wielandt exponent");
  }
  if (states.empty()) {
    for (std::size_t i = 0; i < m; ++i) states.push_back("s" + std::to_string(i));
  }
  if (states.size() != m) {
    throw Error(ErrorCode::BadInitial, "state name count does not match matrix size");
  }
  return MarkovChain{std::move(states), std::move(P), std::move(pi0), k};
}

MarkovChain with_initial(const MarkovChain& chain, std::vector<double> pi0) {
  if (pi0.size() != chain.num_states() || !is_distribution(pi0, kStochasticTol)) {
    throw Error(ErrorCode::BadInitial, "initial distribution invalid");
  }
  MarkovChain out = chain;
  out.pi0 = std::move(pi0);
  return out;
}

Mat stochastic_power(const Mat& P, int t) {
  if (t < 0) throw Error(ErrorCode::BadArgument, "negative power");
  const std::size_t m = P.size();
  Mat result(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) result[i][i] = 1.0;
  Mat base = P;
  int e = t;
  while (e > 0) {
    if (e & 1) {
      result = mat_mul(result, base);
      renormalize_rows(result);
    }
    e >>= 1;
    if (e > 0) {
      base = mat_mul(base, base);
      renormalize_rows(base);
    }
  }
  return result;
}

std::vector<double> stationary(const MarkovChain& chain) {
  const std::size_t m = chain.num_states();
  // (P^T - I) pi = 0 with the first equation replaced by sum(pi) = 1.
  Mat A(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) A[0][j] = 1.0;
  b[0] = 1.0;
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      A[i][j] = chain.P[j][i] - (i == j ? 1.0 : 0.0);
    }
  }
  std::vector<double> pi = solve_linear(std::move(A), std::move(b));
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-14) v = 0.0;
    sum += v;
  }
  for (double& v : pi) v /= sum;
  // residual check: ||pi P - pi||_1
  double residual = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double pj = 0.0;
    for (std::size_t i = 0; i < m; ++i) pj += pi[i] * chain.P[i][j];
    residual += std::abs(pj - pi[j]);
  }
  if (residual > 1e-12) {
    throw Error(ErrorCode::NoConvergence,
                "stationary residual " + std::to_string(residual));
  }
  return pi;
}

std::vector<double> t_step_distribution(const MarkovChain& chain, int tau) {
  if (tau < 0) throw Error(ErrorCode::BadArgument, "tau must be >= 0");
  const Mat Pt = stochastic_power(chain.P, tau);
  const std::size_t m = chain.num_states();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = chain.pi0[i];
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) out[j] += w * Pt[i][j];
  }
  return out;
}

double delta_tau(const MarkovChain& chain, int tau) {
  const std::vector<double> pit = t_step_distribution(chain, tau);
  const std::vector<double> pi = stationary(chain);
  return l1(pit, pi);
}

}  // namespace rdbia
