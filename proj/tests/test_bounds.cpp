#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rdbia/bounds.hpp"

using namespace rdbia;
using rdbia::testing::h2;

namespace {

const Mat kLazy{{0.9, 0.1}, {0.3, 0.7}};

MarkovChain lazy_chain(std::vector<double> pi0 = {1.0, 0.0}) {
  return validate_chain(kLazy, std::move(pi0));
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("k_constant substitutions") {
  CHECK(k_constant(hamming_distortion(2), 2) == doctest::Approx(14.0));
  const DistortionSpec skew = make_distortion({{0.0, 2.0}, {0.5, 0.0}});
  CHECK(k_constant(skew, 2) == doctest::Approx(56.0));
  // scaling the table leaves the ratio, and so the constant, unchanged
  const DistortionSpec scaled = make_distortion({{0.0, 6.0}, {1.5, 0.0}});
  CHECK(k_constant(scaled, 2) == doctest::Approx(56.0));
}

TEST_CASE("delta gate") {
  const DistortionSpec ham = hamming_distortion(2);
  for (double delta : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(delta_condition(delta, ham));  // threshold 4 covers all of [0, 2]
  }
  Mat skewed{{0.0, 100.0}, {1.0, 0.0}};
  const DistortionSpec harsh = make_distortion(skewed);
  CHECK(delta_condition(0.03, harsh));
  CHECK_FALSE(delta_condition(0.05, harsh));  // threshold 0.04
  CHECK(delta_condition(0.0, harsh));
}

TEST_CASE("xlog1overx") {
  CHECK(xlog1overx(0.0) == 0.0);
  CHECK(xlog1overx(1.0) == 0.0);
  CHECK(xlog1overx(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(xlog1overx(1.5), Error);
  CHECK_THROWS_AS(xlog1overx(-0.1), Error);
}

TEST_CASE("initial-distribution bound") {
  const DistortionSpec ham = hamming_distortion(2);
  SUBCASE("stationary start gives 0 <= 0") {
    MarkovChain c = lazy_chain();
    c = with_initial(c, stationary(c));
    const BoundReport r = check_initial_dist_bound(c, ham, 4, 1, 0.1);
    CHECK(r.preconditions_met);
    CHECK(r.pass);
    CHECK(r.lhs <= 1e-9);
    CHECK(r.rhs <= 1e-9);
  }
  SUBCASE("pipeline run passes with positive margin") {
    const BoundReport r = check_initial_dist_bound(lazy_chain(), ham, 6, 2, 0.1);
    CHECK(r.preconditions_met);
    CHECK(r.pass);
    CHECK(r.margin > 0.0);
    MESSAGE("initial_dist margin at T=6 tau=2: ", r.margin);
  }
  SUBCASE("harsh distortion ratio gates tau = 0") {
    const DistortionSpec harsh = make_distortion({{0.0, 100.0}, {1.0, 0.0}});
    const BoundReport r = check_initial_dist_bound(lazy_chain(), harsh, 4, 0, 0.1);
    CHECK_FALSE(r.preconditions_met);
    CHECK_FALSE(r.pass);
  }
  SUBCASE("delta above one is gated even when the ratio gate is open") {
    const MarkovChain c = lazy_chain({0.0, 1.0});  // delta^(0) = 1.5
    const BoundReport r = check_initial_dist_bound(c, ham, 3, 0, 0.1);
    CHECK_FALSE(r.preconditions_met);
  }
}

TEST_CASE("sandwich bounds") {
  const DistortionSpec ham = hamming_distortion(2);
  SUBCASE("tau = 0 collapses to equalities") {
    const auto [lower, upper] = check_sandwich(lazy_chain(), ham, 4, 0, 0.1);
    CHECK(lower.pass);
    CHECK(upper.pass);
    CHECK(std::abs(lower.lhs - lower.rhs) < 1e-6);
    CHECK(std::abs(upper.lhs - upper.rhs) < 1e-6);
  }
  SUBCASE("pipeline cell T=6 tau=1 D=0.3") {
    const auto [lower, upper] = check_sandwich(lazy_chain(), ham, 6, 1, 0.3);
    CHECK(lower.preconditions_met);
    CHECK(upper.preconditions_met);  // TD = 1.8 > 1
    CHECK(lower.pass);
    CHECK(upper.pass);
  }
  SUBCASE("upper half is gated when TD <= tau*d_max") {
    const auto [lower, upper] = check_sandwich(lazy_chain(), ham, 4, 3, 0.1);
    CHECK(lower.preconditions_met);
    CHECK(lower.pass);
    CHECK_FALSE(upper.preconditions_met);
  }
}

TEST_CASE("convex gap check") {
  SUBCASE("flat zero curve passes trivially") {
    RDCurve curve;
    curve.points = {RDPoint{0.1, 0.0, 0, 0, 0}, RDPoint{0.2, 0.0, 0, 0, 0}};
    CHECK(check_convex_gap(curve, 1.0).pass);
  }
  SUBCASE("closed-form binary hamming curve with K0 = 1") {
    RDCurve curve;
    for (double D = 0.05; D < 0.50; D += 0.05) {
      curve.points.push_back(RDPoint{D, 1.0 - h2(D), 0, 0, 0});
    }
    const BoundReport r = check_convex_gap(curve, 1.0);
    CHECK(r.pass);
  }
  SUBCASE("single point has no pairs and passes") {
    RDCurve curve;
    curve.points = {RDPoint{0.1, 0.7, 0, 0, 0}};
    CHECK(check_convex_gap(curve, 1.0).pass);
  }
  SUBCASE("a violating curve is caught") {
    RDCurve curve;
    curve.points = {RDPoint{0.1, 1.0, 0, 0, 0}, RDPoint{0.2, 0.0, 0, 0, 0}};
    CHECK_FALSE(check_convex_gap(curve, 0.5).pass);
  }
}

TEST_CASE("normalized difference instantiation of the rate ceiling") {
  // |1/(T-tau) - 1/T| R_{X^T}(TD) <= tau/(T(T-tau)) * T log2 m given
  // R <= T log2 m; checked on solver output
  const DistortionSpec ham = hamming_distortion(2);
  const MarkovChain c = lazy_chain();
  for (int T : {2, 4, 6}) {
    const auto src = block_distribution(c, ham, T);
    for (double D : {0.05, 0.1, 0.3}) {
      const double R = rd_at_distortion(src, T * D).R;
      CHECK(R <= T * std::log2(2.0) + 1e-9);
      for (int tau = 1; tau < T; ++tau) {
        const double lhs = std::abs(1.0 / (T - tau) - 1.0 / T) * R;
        const double rhs =
            (double(tau) / (double(T) * (T - tau))) * T * std::log2(2.0);
        CHECK(lhs <= rhs + 1e-9);
      }
    }
  }
}

TEST_CASE("convergence experiment") {
  const DistortionSpec ham = hamming_distortion(2);
  SUBCASE("stationary rows have zero gap") {
    std::vector<std::pair<std::string, std::vector<double>>> pis{
        {"pi_again", {0.75, 0.25}}};
    const std::vector<int> Ts{1, 2, 3};
    const ConvergenceTable table =
        convergence_experiment(kLazy, pis, ham, 0.1, Ts);
    for (const auto& row : table.rows) {
      if (row.pi_label == "pi_again") CHECK(row.gap_bits <= 1e-9);
      CHECK(row.F_bits >= 0.0);
      CHECK(row.F_bits <= 1.0 + 1e-9);
    }
  }
  SUBCASE("iid chains single-letterize") {
    const Mat iid{{0.5, 0.5}, {0.5, 0.5}};
    std::vector<std::pair<std::string, std::vector<double>>> pis{
        {"e0", {1.0, 0.0}}};
    const std::vector<int> Ts{1, 2, 3};
    const ConvergenceTable table =
        convergence_experiment(iid, pis, ham, 0.1, Ts);
    double f_ref = -1.0;
    for (const auto& row : table.rows) {
      if (row.pi_label != "pi") continue;
      if (f_ref < 0.0) f_ref = row.F_bits;
      CHECK(std::abs(row.F_bits - f_ref) < 1e-4);
    }
  }
  SUBCASE("parallel cells reproduce the serial table") {
    std::vector<std::pair<std::string, std::vector<double>>> pis{
        {"e0", {1.0, 0.0}}, {"e1", {0.0, 1.0}}};
    const std::vector<int> Ts{2, 4};
    const ConvergenceTable serial =
        convergence_experiment(kLazy, pis, ham, 0.1, Ts, 0, {}, 1);
    const ConvergenceTable parallel =
        convergence_experiment(kLazy, pis, ham, 0.1, Ts, 0, {}, 2);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      CHECK(serial.rows[i].pi_label == parallel.rows[i].pi_label);
      CHECK(serial.rows[i].F_bits == parallel.rows[i].F_bits);
    }
  }
}

TEST_CASE("small sweep runs clean and counts add up") {
  SweepSpec spec;
  spec.chains.emplace_back("lazy", kLazy);
  spec.distortions.emplace_back("hamming", Mat{{0.0, 1.0}, {1.0, 0.0}});
  spec.pis = {{"e0", {1.0, 0.0}}, {"e1", {0.0, 1.0}}};
  spec.T_list = {2, 3, 4};
  spec.D_list = {0.1, 0.3};
  const SweepResult result = run_bound_sweep(spec, {}, 2);
  CHECK(result.total ==
        static_cast<int>(result.reports.size()));
  CHECK(result.passed + result.gated + result.failed == result.total);
  CHECK(result.failed == 0);
  CHECK(result.gated > 0);  // e1 at tau=0 exceeds delta <= 1
  const std::string json = summary_json(result);
  CHECK(json.find("\"total\"") != std::string::npos);
  CHECK(json.find("\"gated\"") != std::string::npos);
}

}  // TEST_SUITE
