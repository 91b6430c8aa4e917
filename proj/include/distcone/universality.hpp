/**
 * Finite-truncation diagnostics of universality. A matrix is universal when,
 * for every corner order n, its columns past n sweep the whole admissible
 * polytope of the corner. At desk scale that becomes a defect: the worst
 * distance (over sampled probe targets in A(p_n(r))) from a target to its
 * best-approximating column, in the sup norm on the first n rows.
 */

#ifndef DISTCONE_UNIVERSALITY_HPP
#define DISTCONE_UNIVERSALITY_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "distcone/admissible.hpp"
#include "distcone/distance_matrix.hpp"
#include "distcone/rng.hpp"
#include "distcone/walks.hpp"

namespace distcone {

struct DefectWitness {
  VectorXd target;
  int best_column = 0;  // 1-based column index of the nearest column
  double distance = 0.0;
};

struct DefectReport {
  int n = 0;
  /// max over probe targets of min over columns j > n of sup_i |r_ij - a_i|.
  double epsilon_achieved = 0.0;
  std::vector<DefectWitness> witnesses;
  int samples_used = 0;
};

/// Probe targets for A(corner): every extremal point first (when they are
/// enumerable), then Dirichlet hull mixtures with diagonal shifts whose
/// levels are geometrically weighted inside [0, shift_box].
struct ProbeOptions {
  int vertex_max_order = 5;
  double shift_box = 4.0;
  int burn_in_factor = 64;
  int step_factor = 4;
};

inline std::vector<VectorXd> probe_targets(const DistanceMatrix<double>& corner,
                                           int count, std::uint64_t seed,
                                           const ProbeOptions& opts = {}) {
  if (count < 1) throw std::invalid_argument("probe count must be >= 1");
  std::vector<VectorXd> targets;
  targets.reserve(static_cast<std::size_t>(count));
  Rng rng = Rng(seed).split(7);
  MrSampler sampler(corner, Rng(seed).split(8), opts.vertex_max_order,
                    opts.burn_in_factor, opts.step_factor);
  if (sampler.uses_vertices()) {
    for (const auto& v : sampler.vertices()) {
      if (static_cast<int>(targets.size()) >= count) break;
      targets.push_back(v);
    }
  }
  while (static_cast<int>(targets.size()) < count) {
    VectorXd v = sampler.uses_vertices() ? sampler.mixture(rng)
                                         : sampler.sample();
    // Geometric level weights: half the shifts land below box/2, a quarter
    // below box/4, and so on.
    int level = 0;
    while (level < 10 && rng.uniform01() < 0.5) ++level;
    const double lam =
        opts.shift_box * std::pow(2.0, -level) * rng.uniform01();
    v.array() += lam;
    targets.push_back(std::move(v));
  }
  return targets;
}

/// Defect of r at corner size n against explicit targets.
inline DefectReport universality_defect_against(
    const DistanceMatrix<double>& r, int n,
    const std::vector<VectorXd>& targets) {
  const Eigen::Index N = r.order();
  if (n < 1 || n >= N)
    throw std::invalid_argument(
        "universality defect needs 1 <= n < order (no columns beyond n "
        "otherwise)");
  if (!nw_corner(r, n).proper())
    throw std::domain_error("universality defect requires a proper corner");
  DefectReport report;
  report.n = n;
  report.samples_used = static_cast<int>(targets.size());
  for (const auto& a : targets) {
    if (a.size() != n) throw std::invalid_argument("target length mismatch");
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_j = n;
    for (Eigen::Index j = n; j < N; ++j) {
      double d = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        d = std::max(d, std::abs(r(i, j) - a(i)));
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    report.witnesses.push_back({a, static_cast<int>(best_j + 1), best});
    report.epsilon_achieved = std::max(report.epsilon_achieved, best);
  }
  return report;
}

/// Defect against `probes` seeded targets drawn from A(p_n(r)).
inline DefectReport universality_defect(const DistanceMatrix<double>& r, int n,
                                        int probes, std::uint64_t seed,
                                        const ProbeOptions& opts = {}) {
  const Eigen::Index N = r.order();
  if (n < 1 || n >= N)
    throw std::invalid_argument(
        "universality defect needs 1 <= n < order (no columns beyond n "
        "otherwise)");
  const auto corner = nw_corner(r, n);
  if (!corner.proper())
    throw std::domain_error("universality defect requires a proper corner");
  return universality_defect_against(r, n,
                                     probe_targets(corner, probes, seed, opts));
}

namespace detail {

inline void check_corner_match(const DistanceMatrix<double>& r,
                               const DistanceMatrix<double>& q, int n,
                               double epsilon) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(r(i, j) - q(i, j)) > epsilon / 2)
        throw std::invalid_argument(
            "corner mismatch beyond tolerance between r and q");
}

}  // namespace detail

/// Greedy epsilon-extension of the identity isometry on the first n points:
/// picks, column by column, an unused index of r minimizing the sup distance
/// to the next required column of q. On success the returned index list is
/// re-verified to satisfy max |r(i_k,i_s) - q(k,s)| < epsilon exactly.
/// Returned indices are 1-based positions i_{n+1}..i_K in r.
inline std::optional<std::vector<int>> epsilon_extend_isometry(
    const DistanceMatrix<double>& r, const DistanceMatrix<double>& q, int n,
    double epsilon, int cap = 64) {
  const Eigen::Index N = r.order();
  const Eigen::Index K = q.order();
  if (!(n >= 1 && n < K))
    throw std::invalid_argument("need 1 <= n < order(q)");
  if (K > cap) throw std::invalid_argument("q exceeds the extension cap");
  if (K - n > N - n) return std::nullopt;
  detail::check_corner_match(r, q, n, epsilon);

  std::vector<Eigen::Index> sel(static_cast<std::size_t>(K));
  for (int i = 0; i < n; ++i) sel[static_cast<std::size_t>(i)] = i;
  std::vector<bool> used(static_cast<std::size_t>(N), false);

  for (Eigen::Index t = n; t < K; ++t) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_j = -1;
    for (Eigen::Index j = n; j < N; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      double cost = 0.0;
      for (Eigen::Index s = 0; s < t; ++s)
        cost = std::max(cost, std::abs(r(sel[static_cast<std::size_t>(s)], j) -
                                       q(s, t)));
      if (cost < best) {  // ties break to the lowest index
        best = cost;
        best_j = j;
      }
    }
    if (best_j < 0) return std::nullopt;
    sel[static_cast<std::size_t>(t)] = best_j;
    used[static_cast<std::size_t>(best_j)] = true;
  }

  double achieved = 0.0;
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = a + 1; b < K; ++b)
      achieved = std::max(
          achieved, std::abs(r(sel[static_cast<std::size_t>(a)],
                               sel[static_cast<std::size_t>(b)]) -
                             q(a, b)));
  if (!(achieved < epsilon)) return std::nullopt;
  std::vector<int> out;
  for (Eigen::Index t = n; t < K; ++t)
    out.push_back(static_cast<int>(sel[static_cast<std::size_t>(t)] + 1));
  return out;
}

/// Exhaustive counterpart used to calibrate greedy failure rates; guarded to
/// K - n <= 3 and order(r) <= 40.
inline std::optional<std::vector<int>> epsilon_extend_isometry_exhaustive(
    const DistanceMatrix<double>& r, const DistanceMatrix<double>& q, int n,
    double epsilon) {
  const Eigen::Index N = r.order();
  const Eigen::Index K = q.order();
  if (!(n >= 1 && n < K))
    throw std::invalid_argument("need 1 <= n < order(q)");
  if (K - n > 3 || N > 40)
    throw std::invalid_argument("exhaustive search guarded to K-n <= 3, N <= 40");
  detail::check_corner_match(r, q, n, epsilon);

  std::vector<Eigen::Index> sel(static_cast<std::size_t>(K));
  for (int i = 0; i < n; ++i) sel[static_cast<std::size_t>(i)] = i;
  std::vector<bool> used(static_cast<std::size_t>(N), false);
  std::optional<std::vector<int>> found;

  auto dfs = [&](auto&& self, Eigen::Index t) -> bool {
    if (t == K) {
      std::vector<int> out;
      for (Eigen::Index s = n; s < K; ++s)
        out.push_back(static_cast<int>(sel[static_cast<std::size_t>(s)] + 1));
      found = std::move(out);
      return true;
    }
    for (Eigen::Index j = n; j < N; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      bool ok = true;
      for (Eigen::Index s = 0; s < t && ok; ++s)
        ok = std::abs(r(sel[static_cast<std::size_t>(s)], j) - q(s, t)) <
             epsilon;
      if (!ok) continue;
      sel[static_cast<std::size_t>(t)] = j;
      used[static_cast<std::size_t>(j)] = true;
      if (self(self, t + 1)) return true;
      used[static_cast<std::size_t>(j)] = false;
    }
    return false;
  };
  dfs(dfs, n);
  return found;
}

struct WeakDefect {
  double error = 0.0;
  std::vector<int> indices;  // 1-based rows of r realizing q
};

enum class SearchMode { Greedy, Exhaustive };

/// Best sup-norm approximation of the target matrix q by a submatrix of r on
/// distinct indices. Greedy follows the sequential column choice; the
/// exhaustive mode runs branch-and-bound over all injections and stops early
/// once the error reaches `stop_at`.
inline WeakDefect weak_universality_defect(const DistanceMatrix<double>& r,
                                           const DistanceMatrix<double>& q,
                                           double stop_at = 0.0,
                                           SearchMode mode = SearchMode::Greedy,
                                           int cap = 6) {
  const Eigen::Index N = r.order();
  const Eigen::Index n = q.order();
  if (n > N) throw std::invalid_argument("target larger than the matrix");
  if (n > cap) throw std::invalid_argument("target exceeds the size cap");

  std::vector<Eigen::Index> sel(static_cast<std::size_t>(n));
  std::vector<bool> used(static_cast<std::size_t>(N), false);

  if (mode == SearchMode::Greedy) {
    double error = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      double best = std::numeric_limits<double>::infinity();
      Eigen::Index best_j = -1;
      for (Eigen::Index j = 0; j < N; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cost = 0.0;
        for (Eigen::Index s = 0; s < t; ++s)
          cost = std::max(cost,
                          std::abs(r(sel[static_cast<std::size_t>(s)], j) -
                                   q(s, t)));
        if (cost < best) {
          best = cost;
          best_j = j;
        }
      }
      sel[static_cast<std::size_t>(t)] = best_j;
      used[static_cast<std::size_t>(best_j)] = true;
      error = std::max(error, best);
    }
    WeakDefect out;
    out.error = error;
    for (Eigen::Index t = 0; t < n; ++t)
      out.indices.push_back(static_cast<int>(sel[static_cast<std::size_t>(t)] + 1));
    return out;
  }

  WeakDefect best_found;
  best_found.error = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> best_sel(static_cast<std::size_t>(n));
  auto dfs = [&](auto&& self, Eigen::Index t, double partial) -> bool {
    if (t == n) {
      if (partial < best_found.error) {
        best_found.error = partial;
        best_sel = sel;
      }
      return partial <= stop_at;
    }
    for (Eigen::Index j = 0; j < N; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      double ext = partial;
      for (Eigen::Index s = 0; s < t; ++s)
        ext = std::max(ext, std::abs(r(sel[static_cast<std::size_t>(s)], j) -
                                     q(s, t)));
      if (ext >= best_found.error) continue;
      sel[static_cast<std::size_t>(t)] = j;
      used[static_cast<std::size_t>(j)] = true;
      const bool done = self(self, t + 1, ext);
      used[static_cast<std::size_t>(j)] = false;
      if (done) return true;
    }
    return false;
  };
  dfs(dfs, 0, 0.0);
  for (Eigen::Index idx : best_sel)
    best_found.indices.push_back(static_cast<int>(idx + 1));
  return best_found;
}

}  // namespace distcone

#endif  // DISTCONE_UNIVERSALITY_HPP
