/**
 * Empirical machinery around the matrix distribution of a metric triple
 * (finite metric space with strictly positive atom weights): i.i.d. sampling
 * of k-point distance submatrices, binned fingerprints as the desk-scale
 * surrogate of the full distribution, a two-sample equality test, the ball
 * measure estimator, permutation-averaged empirical distributions of one
 * matrix, the coverage diagnostic separating matrix distributions from mere
 * invariant measures, and an exchangeability/shift invariance check.
 */

#ifndef DISTCONE_MATRIX_DISTRIBUTION_HPP
#define DISTCONE_MATRIX_DISTRIBUTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distcone/distance_matrix.hpp"
#include "distcone/rng.hpp"
#include "distcone/scalar.hpp"
#include "distcone/version.hpp"

namespace distcone {

class MetricTriple {
 public:
  static MetricTriple create(std::vector<std::string> points,
                             DistanceMatrix<double> metric, VectorXd weights,
                             double tolerance = 1e-12) {
    if (static_cast<Eigen::Index>(points.size()) != metric.order() ||
        weights.size() != metric.order())
      throw std::invalid_argument("triple: size mismatch");
    if (!metric.proper())
      throw std::invalid_argument("triple: metric must be proper");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (!(weights(i) > 0))
        throw std::invalid_argument("triple: weights must be strictly positive");
    if (std::abs(weights.sum() - 1.0) > tolerance)
      throw std::invalid_argument("triple: weights must sum to 1");
    return MetricTriple(std::move(points), std::move(metric),
                        std::move(weights));
  }

  Eigen::Index size() const { return metric_.order(); }
  const std::vector<std::string>& points() const { return points_; }
  const DistanceMatrix<double>& metric() const { return metric_; }
  const VectorXd& weights() const { return weights_; }
  double diameter() const { return metric_.diameter(); }

  Eigen::Index draw_atom(Rng& rng) const {
    double u = rng.uniform01();
    for (Eigen::Index i = 0; i + 1 < weights_.size(); ++i) {
      u -= weights_(i);
      if (u < 0) return i;
    }
    return weights_.size() - 1;
  }

  /// Weight-preserving relabeling by `g` (same action as permute()).
  MetricTriple relabeled(const Permutation& g) const {
    std::vector<std::string> pts(points_.size());
    VectorXd w(weights_.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      pts[i] = points_[static_cast<std::size_t>(g[i])];
      w(static_cast<Eigen::Index>(i)) = weights_(g[i]);
    }
    return MetricTriple(std::move(pts), permute(metric_, g), std::move(w));
  }

 private:
  MetricTriple(std::vector<std::string> points, DistanceMatrix<double> metric,
               VectorXd weights)
      : points_(std::move(points)),
        metric_(std::move(metric)),
        weights_(std::move(weights)) {}

  std::vector<std::string> points_;
  DistanceMatrix<double> metric_;
  VectorXd weights_;
};

/// k points i.i.d. from the triple's weights (with repetition; repeats give
/// a semi-metric sample), returned as their distance matrix.
inline DistanceMatrix<double> sample_matrix(const MetricTriple& T,
                                            Eigen::Index k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_matrix: k must be >= 1");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  for (auto& v : idx) v = T.draw_atom(rng);
  MatrixXd m = MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const auto a = idx[static_cast<std::size_t>(i)];
      const auto b = idx[static_cast<std::size_t>(j)];
      m(i, j) = a == b ? 0.0 : T.metric()(a, b);
      m(j, i) = m(i, j);
    }
  return DistanceMatrix<double>::unchecked(std::move(m));
}

inline DistanceMatrix<double> sample_matrix(const MetricTriple& T,
                                            Eigen::Index k,
                                            std::uint64_t seed) {
  Rng rng(seed);
  return sample_matrix(T, k, rng);
}

/// Shared monotone bin grid; bin b covers [e_b, e_{b+1}), the last bin is
/// closed on the right. Values outside land in the overflow bucket.
struct BinGrid {
  VectorXd edges;

  static BinGrid uniform(double lo, double hi, int bins) {
    if (!(hi > lo) || bins < 1) throw std::invalid_argument("bad bin grid");
    BinGrid g;
    g.edges = VectorXd::LinSpaced(bins + 1, lo, hi);
    return g;
  }

  int bins() const { return static_cast<int>(edges.size()) - 1; }

  /// Bin index, or -1 for out-of-range values.
  int bin_of(double x) const {
    const double lo = edges(0);
    const double hi = edges(edges.size() - 1);
    if (!(x >= lo) || !(x <= hi)) return -1;
    if (x == hi) return bins() - 1;
    const auto* begin = edges.data();
    const auto* end = begin + edges.size();
    const auto it = std::upper_bound(begin, end, x);
    return static_cast<int>(it - begin) - 1;
  }

  bool operator==(const BinGrid& other) const {
    return edges.size() == other.edges.size() && edges == other.edges;
  }
};

/// Binned empirical distribution of k-point distance submatrices: counts
/// over the k(k-1)/2-tuples of bin indices (upper triangle in column-block
/// order), plus provenance for bit-exact replay.
struct Fingerprint {
  int k = 0;
  std::int64_t num_samples = 0;
  BinGrid grid;
  std::map<std::vector<int>, std::int64_t> counts;
  std::int64_t overflow = 0;
  bool overflow_warning = false;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorId;

  std::int64_t total() const {
    std::int64_t t = overflow;
    for (const auto& [key, c] : counts) t += c;
    return t;
  }
};

namespace detail {

inline std::vector<int> binned_upper(const DistanceMatrix<double>& m,
                                     const BinGrid& grid, bool& overflow) {
  const Eigen::Index k = m.order();
  std::vector<int> key;
  key.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
  overflow = false;
  for (Eigen::Index j = 1; j < k; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const int b = grid.bin_of(m(i, j));
      if (b < 0) overflow = true;
      key.push_back(b);
    }
  return key;
}

}  // namespace detail

/// Fingerprint over `num_samples` independent sample matrices. Sample s uses
/// the split stream (seed, s), so any parallel partition of the sample range
/// reproduces the same histogram; the merged counts are identical for every
/// thread count.
inline Fingerprint fingerprint(const MetricTriple& T, int k,
                               std::int64_t num_samples, const BinGrid& grid,
                               std::uint64_t seed, int threads = 1) {
  if (k < 2) throw std::invalid_argument("fingerprint: k must be >= 2");
  if (num_samples < 1)
    throw std::invalid_argument("fingerprint: need at least one sample");
  Fingerprint f;
  f.k = k;
  f.num_samples = num_samples;
  f.grid = grid;
  f.seed = seed;
  const Rng base(seed);

  auto accumulate = [&](std::int64_t from, std::int64_t to, Fingerprint& into) {
    for (std::int64_t s = from; s < to; ++s) {
      Rng rng = base.split(static_cast<std::uint64_t>(s));
      const auto m = sample_matrix(T, k, rng);
      bool over = false;
      auto key = detail::binned_upper(m, into.grid, over);
      if (over) {
        ++into.overflow;
        into.overflow_warning = true;
      } else {
        ++into.counts[key];
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || num_samples < 2 * threads) {
    accumulate(0, num_samples, f);
    return f;
  }
  std::vector<Fingerprint> parts(static_cast<std::size_t>(threads));
  for (auto& p : parts) p.grid = grid;
  std::vector<std::future<void>> work;
  const std::int64_t chunk = (num_samples + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t from = t * chunk;
    const std::int64_t to = std::min<std::int64_t>(num_samples, from + chunk);
    if (from >= to) break;
    work.push_back(std::async(std::launch::async, accumulate, from, to,
                              std::ref(parts[static_cast<std::size_t>(t)])));
  }
  for (auto& w : work) w.get();
  for (const auto& p : parts) {
    f.overflow += p.overflow;
    f.overflow_warning = f.overflow_warning || p.overflow_warning;
    for (const auto& [key, c] : p.counts) f.counts[key] += c;
  }
  return f;
}

struct CompareResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool same = false;
  int occupied_bins = 0;
};

namespace detail {

/// Sup of the lower-orthant cumulative frequency difference over every grid
/// corner. On a shared refinement, every coarse corner's orthant equals some
/// fine corner's orthant, so coarsening never increases the statistic.
inline double orthant_cdf_sup(const Fingerprint& f1, const Fingerprint& f2,
                              int& occupied) {
  const int d = f1.k * (f1.k - 1) / 2;
  const int bins = f1.grid.bins();
  std::map<std::vector<int>, std::pair<double, double>> freq;
  for (const auto& [key, c] : f1.counts)
    freq[key].first += static_cast<double>(c) / f1.num_samples;
  for (const auto& [key, c] : f2.counts)
    freq[key].second += static_cast<double>(c) / f2.num_samples;
  occupied = static_cast<int>(freq.size());

  double cells = 1.0;
  for (int t = 0; t < d; ++t) cells *= bins;
  if (cells <= (1 << 22)) {
    // Dense cumulative cube with one prefix pass per axis.
    const std::size_t total = static_cast<std::size_t>(cells);
    std::vector<double> diff(total, 0.0);
    std::vector<std::size_t> stride(static_cast<std::size_t>(d));
    std::size_t acc = 1;
    for (int t = 0; t < d; ++t) {
      stride[static_cast<std::size_t>(t)] = acc;
      acc *= static_cast<std::size_t>(bins);
    }
    auto flat = [&](const std::vector<int>& key) {
      std::size_t at = 0;
      for (int t = 0; t < d; ++t)
        at += stride[static_cast<std::size_t>(t)] *
              static_cast<std::size_t>(key[static_cast<std::size_t>(t)]);
      return at;
    };
    for (const auto& [key, fr] : freq) diff[flat(key)] = fr.first - fr.second;
    for (int axis = 0; axis < d; ++axis) {
      const std::size_t s = stride[static_cast<std::size_t>(axis)];
      for (std::size_t i = 0; i < total; ++i) {
        const std::size_t coord = (i / s) % static_cast<std::size_t>(bins);
        if (coord > 0) diff[i] += diff[i - s];
      }
    }
    double sup = 0.0;
    for (const double v : diff) sup = std::max(sup, std::abs(v));
    return sup;
  }

  // Sparse fallback for higher k: occupied corners plus their axis-maxed
  // projections, which restore full per-axis marginal sensitivity.
  std::vector<std::vector<int>> corners;
  for (const auto& [key, fr] : freq) {
    corners.push_back(key);
    for (int axis = 0; axis < d; ++axis) {
      auto proj = key;
      proj[static_cast<std::size_t>(axis)] = bins - 1;
      corners.push_back(std::move(proj));
    }
  }
  std::sort(corners.begin(), corners.end());
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  double sup = 0.0;
  for (const auto& corner : corners) {
    double c1 = 0.0, c2 = 0.0;
    for (const auto& [key, fr] : freq) {
      bool dominated = true;
      for (int t = 0; t < d && dominated; ++t)
        dominated = key[static_cast<std::size_t>(t)] <=
                    corner[static_cast<std::size_t>(t)];
      if (dominated) {
        c1 += fr.first;
        c2 += fr.second;
      }
    }
    sup = std::max(sup, std::abs(c1 - c2));
  }
  return sup;
}

}  // namespace detail

/// Two-sample equality test on matching fingerprints. The statistic is the
/// sup of the cumulative (lower-orthant) frequency difference over occupied
/// bins; the acceptance threshold is a two-sample Dvoretzky-style bound with
/// a union correction over the occupied bins:
///   c * sqrt((1/n1 + 1/n2) * log(2B/alpha)),  c = 1/sqrt(2).
inline CompareResult compare(const Fingerprint& f1, const Fingerprint& f2,
                             double alpha = 0.01) {
  if (f1.k != f2.k) throw std::invalid_argument("compare: k mismatch");
  if (!(f1.grid == f2.grid))
    throw std::invalid_argument("compare: bin grids differ");
  CompareResult out;
  out.statistic = detail::orthant_cdf_sup(f1, f2, out.occupied_bins);
  const double b = std::max(1, out.occupied_bins);
  const double n1 = static_cast<double>(f1.num_samples);
  const double n2 = static_cast<double>(f2.num_samples);
  out.threshold = std::sqrt(0.5) *
                  std::sqrt((1.0 / n1 + 1.0 / n2) * std::log(2.0 * b / alpha));
  out.same = out.statistic <= out.threshold;
  return out;
}

/// (1/n) #{k <= n : r(k,i) <= l}; the point itself counts through the closed
/// indicator, so l = 0 on a proper matrix gives 1/n.
inline double ball_measure_estimate(const DistanceMatrix<double>& r,
                                    Eigen::Index i, double l) {
  if (i < 0 || i >= r.order()) throw std::out_of_range("center index");
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < r.order(); ++k)
    if (r(k, i) <= l) ++count;
  return static_cast<double>(count) / static_cast<double>(r.order());
}

/// Monte Carlo empirical distribution of order-n submatrices under random
/// injections of {1..n} into the index set of r, with equal weights.
struct EmpiricalDistribution {
  int n = 0;
  std::vector<std::pair<DistanceMatrix<double>, double>> support;
};

inline EmpiricalDistribution empirical_distribution(
    const DistanceMatrix<double>& r, int n, int num_perm, std::uint64_t seed) {
  if (n < 1 || n > r.order())
    throw std::invalid_argument("empirical_distribution: bad submatrix order");
  if (num_perm < 1)
    throw std::invalid_argument("empirical_distribution: need draws");
  const Eigen::Index N = r.order();
  std::map<std::string, std::pair<DistanceMatrix<double>, double>> acc;
  const Rng base(seed);
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(N));
  for (int t = 0; t < num_perm; ++t) {
    Rng rng = base.split(static_cast<std::uint64_t>(t));
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    // Partial Fisher-Yates: the first n slots become the ordered injection.
    for (int s = 0; s < n; ++s) {
      const auto pick =
          s + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(N - s)));
      std::swap(pool[static_cast<std::size_t>(s)],
                pool[static_cast<std::size_t>(pick)]);
    }
    MatrixXd sub(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        sub(a, b) = a == b ? 0.0
                           : r(pool[static_cast<std::size_t>(a)],
                               pool[static_cast<std::size_t>(b)]);
    auto dm = DistanceMatrix<double>::unchecked(std::move(sub));
    std::string key(reinterpret_cast<const char*>(dm.square().data()),
                    sizeof(double) * static_cast<std::size_t>(n) *
                        static_cast<std::size_t>(n));
    auto [it, fresh] = acc.try_emplace(std::move(key), dm, 0.0);
    it->second.second += 1.0 / num_perm;
  }
  EmpiricalDistribution out;
  out.n = n;
  for (auto& [key, entry] : acc) out.support.push_back(std::move(entry));
  return out;
}

/// Finite-scale content of the coverage condition: among columns past N, the
/// fraction whose distance to the first N points falls below epsilon, plus
/// the all-columns-covered boolean.
struct Coverage {
  double fraction = 0.0;
  bool all_covered = false;
};

inline Coverage coverage_condition(const DistanceMatrix<double>& r,
                                   double epsilon, Eigen::Index N) {
  if (N < 1 || N >= r.order())
    throw std::invalid_argument("coverage_condition: need 1 <= N < order");
  const Eigen::Index n = r.order();
  Eigen::Index covered = 0;
  for (Eigen::Index j = N; j < n; ++j) {
    double best = r(0, j);
    for (Eigen::Index i = 1; i < N; ++i) best = std::min(best, r(i, j));
    if (best < epsilon) ++covered;
  }
  Coverage out;
  out.fraction = static_cast<double>(covered) / static_cast<double>(n - N);
  out.all_covered = covered == n - N;
  return out;
}

/// Emits one (k+1)-point sample matrix per call; the abstraction lets the
/// invariance check run on triples and on raw matrix-measure fixtures alike.
using MatrixSampler = std::function<DistanceMatrix<double>(Rng&)>;

struct InvarianceReport {
  CompareResult perm_vs_raw;
  CompareResult shift_vs_raw;
  CompareResult perm_vs_shift;
  bool pass = false;
};

/// Draws one set of (k+1)-point samples and fingerprints three views of it:
/// the leading k-corner, a per-sample random relabeling of that corner, and
/// the NW-shifted corner. For an exchangeable shift-invariant source all
/// three agree in distribution.
inline InvarianceReport invariance_check_sampler(const MatrixSampler& sampler,
                                                 int k,
                                                 std::int64_t num_samples,
                                                 const BinGrid& grid,
                                                 std::uint64_t seed,
                                                 double alpha = 0.01) {
  if (k < 2) throw std::invalid_argument("invariance check: k must be >= 2");
  Fingerprint raw, perm, shift;
  for (Fingerprint* f : {&raw, &perm, &shift}) {
    f->k = k;
    f->num_samples = num_samples;
    f->grid = grid;
    f->seed = seed;
  }
  const Rng base(seed);
  for (std::int64_t s = 0; s < num_samples; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const auto big = sampler(rng);
    if (big.order() != k + 1)
      throw std::invalid_argument("sampler must emit order k+1 matrices");
    Permutation g = identity_permutation(k);
    for (int t = k - 1; t > 0; --t)
      std::swap(g[static_cast<std::size_t>(t)],
                g[static_cast<std::size_t>(rng.below(
                    static_cast<std::uint64_t>(t + 1)))]);
    const auto corner = nw_corner(big, k);
    const std::array<std::pair<Fingerprint*, DistanceMatrix<double>>, 3> views{
        {{&raw, corner}, {&perm, permute(corner, g)}, {&shift, nw_shift(big)}}};
    for (const auto& [f, view] : views) {
      bool over = false;
      auto key = detail::binned_upper(view, f->grid, over);
      if (over) {
        ++f->overflow;
        f->overflow_warning = true;
      } else {
        ++f->counts[key];
      }
    }
  }
  InvarianceReport out;
  out.perm_vs_raw = compare(perm, raw, alpha);
  out.shift_vs_raw = compare(shift, raw, alpha);
  out.perm_vs_shift = compare(perm, shift, alpha);
  out.pass = out.perm_vs_raw.same && out.shift_vs_raw.same &&
             out.perm_vs_shift.same;
  return out;
}

inline InvarianceReport invariance_check(const MetricTriple& T, int k,
                                         std::int64_t num_samples,
                                         std::uint64_t seed,
                                         double alpha = 0.01) {
  const BinGrid grid = BinGrid::uniform(0.0, T.diameter() * (1 + 1e-9), 64);
  MatrixSampler sampler = [&T, k](Rng& rng) {
    return sample_matrix(T, k + 1, rng);
  };
  return invariance_check_sampler(sampler, k, num_samples, grid, seed, alpha);
}

}  // namespace distcone

#endif  // DISTCONE_MATRIX_DISTRIBUTION_HPP
