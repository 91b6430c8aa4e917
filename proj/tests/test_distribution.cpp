#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <distcone/matrix_distribution.hpp>
#include <distcone/sampler.hpp>

#include "fixtures.hpp"

using namespace distcone;
using namespace distcone::testing;

TEST_CASE("triple construction validates its pieces") {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  VectorXd w(2);
  w << 0.5, 0.5;
  CHECK_NOTHROW(MetricTriple::create({"a", "b"},
                                     DistanceMatrixD::unchecked(m), w));
  VectorXd bad_sum(2);
  bad_sum << 0.5, 0.6;
  CHECK_THROWS_AS(MetricTriple::create(
                      {"a", "b"}, DistanceMatrixD::unchecked(m), bad_sum),
                  std::invalid_argument);
  VectorXd zero_w(2);
  zero_w << 1.0, 0.0;
  CHECK_THROWS_AS(MetricTriple::create(
                      {"a", "b"}, DistanceMatrixD::unchecked(m), zero_w),
                  std::invalid_argument);
  CHECK_THROWS_AS(MetricTriple::create({"a", "b"}, DistanceMatrixD::zero(2),
                                       w),
                  std::invalid_argument);  // improper metric
}

TEST_CASE("one-point samples are the 1x1 zero matrix") {
  const auto T = two_point_triple(1.0, 0.5);
  const auto m = sample_matrix(T, 1, 9);
  CHECK(m.order() == 1);
  CHECK(m(0, 0) == 0.0);
}

TEST_CASE("two-point sampling hits the exact pair probability") {
  // P(r_12 = d) = 2 p (1 - p); exact enumeration over the 4 ordered pairs.
  const double p = 0.3;
  const auto T = two_point_triple(2.5, p);
  const Rng base(77);
  int hits = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    hits += sample_matrix(T, 2, rng)(0, 1) == 2.5;
  }
  const double expect = 2 * p * (1 - p);
  const double se = std::sqrt(expect * (1 - expect) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - expect) < 3.5 * se);
}

TEST_CASE("uniform four-point space: all-ones triples at rate 3/8") {
  const auto T = uniform_simplex_triple(4);
  const Rng base(31);
  int all_ones = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const auto m = sample_matrix(T, 3, rng);
    bool ones = true;
    for (int i = 0; i < 3 && ones; ++i)
      for (int j = i + 1; j < 3 && ones; ++j) {
        CHECK((m(i, j) == 0.0 || m(i, j) == 1.0));
        ones = m(i, j) == 1.0;
      }
    all_ones += ones;
  }
  const double expect = 24.0 / 64.0;
  const double se = std::sqrt(expect * (1 - expect) / n);
  CHECK(std::abs(static_cast<double>(all_ones) / n - expect) < 3.5 * se);
}

TEST_CASE("fingerprint of the fair two-point triple splits mass evenly") {
  const auto T = two_point_triple(1.0, 0.5);
  const auto grid = BinGrid::uniform(0.0, 1.0 + 1e-9, 64);
  const auto f = fingerprint(T, 2, 10000, grid, 5);
  CHECK(f.total() == 10000);
  CHECK(f.overflow == 0);
  double at_zero = 0, at_d = 0;
  for (const auto& [key, c] : f.counts) {
    if (key[0] == grid.bin_of(0.0)) at_zero += static_cast<double>(c);
    if (key[0] == grid.bin_of(1.0)) at_d += static_cast<double>(c);
  }
  CHECK(at_zero / 10000 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(at_d / 10000 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("unequal weights move the d-bin mass to 3/8") {
  const auto T = two_point_triple(1.0, 0.75);
  const auto grid = BinGrid::uniform(0.0, 1.0 + 1e-9, 64);
  const auto f = fingerprint(T, 2, 10000, grid, 6);
  double at_d = 0;
  for (const auto& [key, c] : f.counts)
    if (key[0] == grid.bin_of(1.0)) at_d += static_cast<double>(c);
  CHECK(std::abs(at_d / 10000 - 0.375) < 0.02);

  // Detectable against the fair triple at this sample size.
  const auto fair = fingerprint(two_point_triple(1.0, 0.5), 2, 10000, grid, 7);
  const auto cmp = compare(f, fair);
  CHECK_FALSE(cmp.same);
}

TEST_CASE("fingerprints flag out-of-grid distances") {
  const auto T = two_point_triple(3.0, 0.5);
  const auto grid = BinGrid::uniform(0.0, 1.0, 8);
  const auto f = fingerprint(T, 2, 500, grid, 8);
  CHECK(f.overflow > 0);
  CHECK(f.overflow_warning);
  CHECK(f.total() == 500);
}

TEST_CASE("compare: reflexive, symmetric, and strict on mismatches") {
  Rng rng(1);
  const auto T = random_five_atom_triple(rng);
  const auto grid = BinGrid::uniform(0.0, 2.2, 64);
  const auto f = fingerprint(T, 3, 4000, grid, 9);
  const auto self = compare(f, f);
  CHECK(self.statistic == 0.0);
  CHECK(self.same);

  const auto g = fingerprint(T, 3, 4000, grid, 10);
  const auto ab = compare(f, g);
  const auto ba = compare(g, f);
  CHECK(ab.statistic == ba.statistic);
  CHECK(ab.same);

  auto other = fingerprint(T, 2, 4000, grid, 11);
  CHECK_THROWS_AS(compare(f, other), std::invalid_argument);
  const auto coarse = fingerprint(T, 3, 4000, BinGrid::uniform(0.0, 2.2, 32), 9);
  CHECK_THROWS_AS(compare(f, coarse), std::invalid_argument);
}

TEST_CASE("relabeled triples produce indistinguishable fingerprints") {
  Rng rng(12);
  const auto T = random_five_atom_triple(rng);
  const auto U = relabel_random(T, rng);
  const auto grid = BinGrid::uniform(0.0, 2.2, 64);
  const auto f = fingerprint(T, 3, 10000, grid, 13);
  const auto g = fingerprint(U, 3, 10000, grid, 14);
  CHECK(compare(f, g).same);
}

TEST_CASE("a 0.2 bump on one distance is detected at 10^4 samples") {
  Rng rng(15);
  const auto T = random_five_atom_triple(rng);
  const auto U = perturb_one_distance(T, rng);
  const auto grid = BinGrid::uniform(0.0, 2.2, 64);
  const auto f = fingerprint(T, 3, 10000, grid, 16);
  const auto g = fingerprint(U, 3, 10000, grid, 17);
  const auto cmp = compare(f, g);
  CHECK_FALSE(cmp.same);
  // Exact analytic separation: the exact 3-point marginals differ.
  CHECK(exact_marginal(T, 3) != exact_marginal(U, 3));
}

TEST_CASE("coarsening a shared grid never raises the statistic") {
  Rng rng(18);
  const auto T = random_five_atom_triple(rng);
  const auto U = perturb_one_distance(T, rng);
  const auto fine_grid = BinGrid::uniform(0.0, 2.2, 64);
  const auto coarse_grid = BinGrid::uniform(0.0, 2.2, 32);  // shared edges
  const double fine = compare(fingerprint(T, 3, 6000, fine_grid, 19),
                              fingerprint(U, 3, 6000, fine_grid, 20))
                          .statistic;
  const double coarse = compare(fingerprint(T, 3, 6000, coarse_grid, 19),
                                fingerprint(U, 3, 6000, coarse_grid, 20))
                            .statistic;
  CHECK(coarse <= fine + 1e-12);
}

TEST_CASE("null calibration: same triple, disjoint seeds, few rejections") {
  Rng rng(21);
  const auto T = random_five_atom_triple(rng);
  const auto grid = BinGrid::uniform(0.0, 2.2, 64);
  int rejections = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto f = fingerprint(T, 3, 2000, grid, 1000 + 2 * t);
    const auto g = fingerprint(T, 3, 2000, grid, 1001 + 2 * t);
    rejections += !compare(f, g).same;
  }
  // alpha = 0.01 with a conservative union bound; 1.5% of 200 is 3.
  CHECK(rejections <= 3);
}

TEST_CASE("statistical verdicts match the exact oracle on small fixtures") {
  Rng rng(23);
  const auto grid = BinGrid::uniform(0.0, 2.2, 64);
  for (int t = 0; t < 6; ++t) {
    const auto T = random_five_atom_triple(rng);
    const bool isometric = t % 2 == 0;
    const auto U =
        isometric ? relabel_random(T, rng) : perturb_one_distance(T, rng);
    const bool oracle_equal = exact_marginal(T, 3) == exact_marginal(U, 3);
    const bool oracle_isometry = find_isometry(T, U).has_value();
    CHECK(oracle_equal == oracle_isometry);
    CHECK(oracle_isometry == isometric);
    const auto verdict = compare(fingerprint(T, 3, 10000, grid, 500 + t),
                                 fingerprint(U, 3, 10000, grid, 600 + t));
    CHECK(verdict.same == oracle_equal);
  }
}

TEST_CASE("ball measure estimator counts the closed ball") {
  const auto T = uniform_simplex_triple(4);
  const auto r = sample_matrix(T, 10000, 29);
  for (Eigen::Index i : {0, 17, 9999}) {
    const double est = ball_measure_estimate(r, i, 0.5);
    CHECK(std::abs(est - 0.25) < 0.02);
    CHECK(ball_measure_estimate(r, i, 2.0) == 1.0);
  }
  // l = 0 on a proper matrix counts only the center.
  Rng g(1);
  MatrixXd m = MatrixXd::Zero(3, 3);
  m(0, 1) = m(1, 0) = 1;
  m(0, 2) = m(2, 0) = 1.5;
  m(1, 2) = m(2, 1) = 2;
  const auto proper = DistanceMatrixD::from_square(m);
  CHECK(ball_measure_estimate(proper, 0, 0.0) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(ball_measure_estimate(proper, 5, 1.0), std::out_of_range);
}

TEST_CASE("empirical distribution: full order and constant matrices") {
  Rng rng(33);
  const auto T = random_five_atom_triple(rng);
  const auto r = sample_matrix(T, 6, 37);
  const auto full = empirical_distribution(r, 6, 50, 38);
  double mass = 0.0;
  for (const auto& [sub, w] : full.support) {
    mass += w;
    // Any S_n-invariant statistic matches r's exactly.
    CHECK(sub.square().sum() == doctest::Approx(r.square().sum()));
    CHECK(sub.diameter() == r.diameter());
  }
  CHECK(mass == doctest::Approx(1.0));

  MatrixXd c = MatrixXd::Constant(5, 5, 2.5);
  c.diagonal().setZero();
  const auto constant = DistanceMatrixD::unchecked(std::move(c));
  const auto point = empirical_distribution(constant, 3, 200, 39);
  REQUIRE(point.support.size() == 1);
  CHECK(point.support.front().second == doctest::Approx(1.0));
  CHECK(point.support.front().first(0, 1) == 2.5);
}

TEST_CASE("lemma-8 reconstruction: empirical entry law matches sampling") {
  const auto T = grid_triple();
  const auto r = sample_matrix(T, 4000, 41);
  std::vector<double> via_empirical;
  for (const auto& [sub, w] : empirical_distribution(r, 2, 6000, 42).support)
    for (int c = 0; c < static_cast<int>(w * 6000 + 0.5); ++c)
      via_empirical.push_back(sub(0, 1));
  std::vector<double> via_sampling;
  const Rng base(43);
  for (int s = 0; s < 6000; ++s) {
    Rng g = base.split(static_cast<std::uint64_t>(s));
    via_sampling.push_back(sample_matrix(T, 2, g)(0, 1));
  }
  std::sort(via_empirical.begin(), via_empirical.end());
  std::sort(via_sampling.begin(), via_sampling.end());
  // Tie-aware two-sample KS: the value set is discrete, so both pointers
  // must clear a tie block before the gap is evaluated.
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < via_empirical.size() || j < via_sampling.size()) {
    double v;
    if (i == via_empirical.size())
      v = via_sampling[j];
    else if (j == via_sampling.size())
      v = via_empirical[i];
    else
      v = std::min(via_empirical[i], via_sampling[j]);
    while (i < via_empirical.size() && via_empirical[i] == v) ++i;
    while (j < via_sampling.size() && via_sampling[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / via_empirical.size() -
                             static_cast<double>(j) / via_sampling.size()));
  }
  // Two-sample KS 1% critical value at 6000 vs 6000 is ~0.0297.
  CHECK(d < 0.0297);
}

TEST_CASE("coverage condition separates the counterexample regimes") {
  // I.i.d. [1/2, 1]: no distance ever drops below 0.3; exact zero fraction.
  const auto iid = iid_interval_matrix(400, 0.5, 1.0, 45);
  for (const Eigen::Index N : {1, 10, 50, 100}) {
    const auto cov = coverage_condition(iid, 0.3, N);
    CHECK(cov.fraction == 0.0);
    CHECK_FALSE(cov.all_covered);
  }

  // Point mass at the all-ones matrix: same verdict below distance 1.
  MatrixXd ones = MatrixXd::Ones(300, 300) - MatrixXd::Identity(300, 300);
  const auto r0 = DistanceMatrixD::unchecked(std::move(ones));
  CHECK(coverage_condition(r0, 0.999, 50).fraction == 0.0);

  // Samples from a finite triple: past the coupon-collection horizon every
  // column repeats an earlier atom (the seed is one where all ten atoms
  // show up within the first fifty draws, the typical case).
  const auto T = grid_triple();
  const auto samples = sample_matrix(T, 2000, 47);
  const auto cov = coverage_condition(samples, 0.1, 50);
  CHECK(cov.fraction >= 0.99);
  const auto tight = coverage_condition(samples, 1e-9, 60);
  CHECK(tight.fraction == 1.0);  // repeats give exact zeros
  CHECK(tight.all_covered);

  CHECK_THROWS_AS(coverage_condition(samples, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(coverage_condition(samples, 0.1, 2000),
                  std::invalid_argument);
}

TEST_CASE("invariance check passes on genuine triples") {
  Rng rng(47);
  const auto T = random_five_atom_triple(rng);
  const auto report = invariance_check(T, 3, 10000, 48);
  CHECK(report.perm_vs_raw.same);
  CHECK(report.shift_vs_raw.same);
  CHECK(report.perm_vs_shift.same);
  CHECK(report.pass);
}

TEST_CASE("invariance check passes on the iid matrix fixture") {
  const BinGrid grid = BinGrid::uniform(0.0, 1.0 + 1e-9, 64);
  MatrixSampler sampler = [](Rng& rng) {
    MatrixXd m = MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        m(i, j) = rng.uniform(0.5, 1.0);
        m(j, i) = m(i, j);
      }
    return DistanceMatrixD::unchecked(std::move(m));
  };
  const auto report = invariance_check_sampler(sampler, 3, 10000, grid, 49);
  CHECK(report.pass);
}

TEST_CASE("sorting samples breaks exchangeability and the check sees it") {
  Rng seed_rng(51);
  const auto T = random_five_atom_triple(seed_rng);
  const BinGrid grid = BinGrid::uniform(0.0, T.diameter() * 1.01, 64);
  // Adversarial sampler: atoms of each tuple sorted by index before the
  // matrix is formed, so the first rows are biased toward small indices.
  MatrixSampler sorted_sampler = [&T](Rng& rng) {
    std::vector<Eigen::Index> idx(4);
    for (auto& v : idx) v = T.draw_atom(rng);
    std::sort(idx.begin(), idx.end());
    MatrixXd m = MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        m(i, j) = idx[static_cast<std::size_t>(i)] ==
                          idx[static_cast<std::size_t>(j)]
                      ? 0.0
                      : T.metric()(idx[static_cast<std::size_t>(i)],
                                   idx[static_cast<std::size_t>(j)]);
        m(j, i) = m(i, j);
      }
    return DistanceMatrixD::unchecked(std::move(m));
  };
  const auto report = invariance_check_sampler(sorted_sampler, 3, 10000, grid, 52);
  CHECK_FALSE(report.perm_vs_raw.same);
  CHECK_FALSE(report.pass);
}
