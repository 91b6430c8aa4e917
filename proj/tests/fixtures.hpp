// Shared test fixtures and independent oracles for the distribution suites.

#ifndef DISTCONE_TESTS_FIXTURES_HPP
#define DISTCONE_TESTS_FIXTURES_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <distcone/matrix_distribution.hpp>
#include <distcone/rng.hpp>

namespace distcone::testing {

/// Exact law of the k-point sample matrix: enumerates all m^k ordered atom
/// tuples with product weights. Keys are the raw bytes of the entry tuple
/// and probabilities are exact rationals, so map equality is exact and
/// independent of enumeration order; adequate for m <= 6, k <= 3.
inline std::map<std::string, Rational> exact_marginal(const MetricTriple& T,
                                                      int k) {
  const Eigen::Index m = T.size();
  std::map<std::string, Rational> law;
  std::vector<Eigen::Index> tuple(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, int depth, const Rational& prob) -> void {
    if (depth == k) {
      std::vector<double> entries;
      for (int j = 1; j < k; ++j)
        for (int i = 0; i < j; ++i) {
          const auto a = tuple[static_cast<std::size_t>(i)];
          const auto b = tuple[static_cast<std::size_t>(j)];
          entries.push_back(a == b ? 0.0 : T.metric()(a, b));
        }
      std::string key(reinterpret_cast<const char*>(entries.data()),
                      entries.size() * sizeof(double));
      law[key] += prob;
      return;
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      tuple[static_cast<std::size_t>(depth)] = a;
      self(self, depth + 1, Rational(prob * Rational(T.weights()(a))));
    }
  };
  rec(rec, 0, Rational(1));
  return law;
}

/// Exhaustive search for a weight-preserving isometry between two triples
/// with exactly matching distances and weights.
inline std::optional<Permutation> find_isometry(const MetricTriple& a,
                                                const MetricTriple& b) {
  if (a.size() != b.size()) return std::nullopt;
  const Eigen::Index n = a.size();
  Permutation g = identity_permutation(n);
  do {
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i)
      ok = a.weights()(g[static_cast<std::size_t>(i)]) == b.weights()(i);
    for (Eigen::Index i = 0; i < n && ok; ++i)
      for (Eigen::Index j = i + 1; j < n && ok; ++j)
        ok = a.metric()(g[static_cast<std::size_t>(i)],
                        g[static_cast<std::size_t>(j)]) == b.metric()(i, j);
    if (ok) return g;
  } while (std::next_permutation(g.begin(), g.end()));
  return std::nullopt;
}

/// Random 5-atom triple: distances in [1.0, 1.8] (so one +0.2 bump keeps
/// every triangle valid) and weights floored away from zero.
inline MetricTriple random_five_atom_triple(Rng& rng) {
  const Eigen::Index n = 5;
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = rng.uniform(1.0, 1.8);
      m(j, i) = m(i, j);
    }
  VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.uniform(0.9, 1.1);
  w /= w.sum();
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back("p" + std::to_string(i + 1));
  return MetricTriple::create(std::move(names),
                              DistanceMatrixD::from_square(std::move(m)),
                              std::move(w));
}

/// Weight-preserving relabeling by a random permutation.
inline MetricTriple relabel_random(const MetricTriple& T, Rng& rng) {
  Permutation g = identity_permutation(T.size());
  for (Eigen::Index t = T.size() - 1; t > 0; --t)
    std::swap(g[static_cast<std::size_t>(t)],
              g[static_cast<std::size_t>(rng.below(
                  static_cast<std::uint64_t>(t + 1)))]);
  return T.relabeled(g);
}

/// Copy with +0.2 on one uniformly chosen distance.
inline MetricTriple perturb_one_distance(const MetricTriple& T, Rng& rng) {
  const Eigen::Index n = T.size();
  const auto pair = rng.below(static_cast<std::uint64_t>(n * (n - 1) / 2));
  MatrixXd m = T.metric().square();
  std::uint64_t c = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j, ++c)
      if (c == pair) {
        m(i, j) += 0.2;
        m(j, i) = m(i, j);
      }
  VectorXd w = T.weights();
  return MetricTriple::create(T.points(),
                              DistanceMatrixD::from_square(std::move(m)),
                              std::move(w));
}

/// The uniform k-point space with all distances 1.
inline MetricTriple uniform_simplex_triple(Eigen::Index n) {
  MatrixXd m = MatrixXd::Ones(n, n) - MatrixXd::Identity(n, n);
  VectorXd w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return MetricTriple::create(std::move(names),
                              DistanceMatrixD::unchecked(std::move(m)),
                              std::move(w));
}

inline MetricTriple two_point_triple(double d, double p) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 1) = m(1, 0) = d;
  VectorXd w(2);
  w << p, 1.0 - p;
  return MetricTriple::create({"a", "b"},
                              DistanceMatrixD::unchecked(std::move(m)),
                              std::move(w));
}

/// Ten atoms on a 5x2 unit grid, uniform weights.
inline MetricTriple grid_triple() {
  const Eigen::Index n = 10;
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double xi = static_cast<double>(i % 5), yi = static_cast<double>(i / 5);
      const double xj = static_cast<double>(j % 5), yj = static_cast<double>(j / 5);
      m(i, j) = std::hypot(xi - xj, yi - yj);
      m(j, i) = m(i, j);
    }
  VectorXd w = VectorXd::Constant(n, 0.1);
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back("g" + std::to_string(i + 1));
  return MetricTriple::create(std::move(names),
                              DistanceMatrixD::from_square(std::move(m)),
                              std::move(w));
}

}  // namespace distcone::testing

#endif  // DISTCONE_TESTS_FIXTURES_HPP
