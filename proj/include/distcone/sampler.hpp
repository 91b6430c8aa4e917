/**
 * Generators of distance matrices.
 *
 * grow_random runs the Markov growth chain: starting from a single point,
 * each step samples a point v of the compact factor M_r of the current
 * admissible polytope, an independent diagonal shift lambda from a base
 * distribution on the half-line, and attaches v + lambda*(1,...,1) as a new
 * row/column. grow_universal is the deterministic counterpart: it revisits
 * every corner order infinitely often and attaches vectors whose projections
 * sweep an enumerated dense subset of the corner's admissible polytope.
 * random_graph_metric draws the {1,2}-valued metric of an Erdos-Renyi graph.
 *
 * Everything is reproducible from (generator id, seed, step count).
 */

#ifndef DISTCONE_SAMPLER_HPP
#define DISTCONE_SAMPLER_HPP

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distcone/admissible.hpp"
#include "distcone/distance_matrix.hpp"
#include "distcone/rng.hpp"
#include "distcone/scalar.hpp"
#include "distcone/walks.hpp"

namespace distcone {

/// Base distribution gamma on the half-line for diagonal shifts.
struct GammaSpec {
  enum class Kind { Exponential, HalfNormal, Uniform, Table };
  Kind kind = Kind::Exponential;
  double a = 1.0;  // rate / sigma / lower endpoint
  double b = 0.0;  // upper endpoint (uniform)
  std::vector<double> values;  // table support
  std::vector<double> weights;

  static GammaSpec exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("gamma: rate must be > 0");
    return {Kind::Exponential, rate, 0.0, {}, {}};
  }
  static GammaSpec half_normal(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("gamma: sigma must be > 0");
    return {Kind::HalfNormal, sigma, 0.0, {}, {}};
  }
  static GammaSpec uniform(double lo, double hi) {
    if (lo < 0 || hi < lo)
      throw std::invalid_argument("gamma: need 0 <= lo <= hi");
    return {Kind::Uniform, lo, hi, {}, {}};
  }
  static GammaSpec table(std::vector<double> values,
                         std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
      throw std::invalid_argument("gamma: bad table");
    double total = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0 || weights[i] <= 0)
        throw std::invalid_argument("gamma: table needs values >= 0, weights > 0");
      total += weights[i];
    }
    GammaSpec g{Kind::Table, 0, 0, std::move(values), std::move(weights)};
    for (auto& w : g.weights) w /= total;
    return g;
  }

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::Exponential:
        return rng.exponential(a);
      case Kind::HalfNormal:
        return rng.half_normal(a);
      case Kind::Uniform:
        return rng.uniform(a, b);
      case Kind::Table: {
        double u = rng.uniform01();
        for (std::size_t i = 0; i < values.size(); ++i) {
          u -= weights[i];
          if (u < 0) return values[i];
        }
        return values.back();
      }
    }
    return 0.0;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::Exponential:
        os << "exp:" << a;
        break;
      case Kind::HalfNormal:
        os << "halfnormal:" << a;
        break;
      case Kind::Uniform:
        os << "uniform:" << a << "," << b;
        break;
      case Kind::Table:
        os << "table:" << values.size() << "-atoms";
        break;
    }
    return os.str();
  }

  /// Parses "exp:1", "halfnormal:0.5", "uniform:0,2", "table:v=w,v=w,...".
  static GammaSpec parse(const std::string& text);
};

/// How points of M_r are drawn at each growth step.
struct MrPolicy {
  enum class Kind { Auto, VertexMixture, HitAndRun, IntervalIid };
  Kind kind = Kind::Auto;
  /// Orders up to this use exact vertex mixtures; larger ones use the chord
  /// walk. Enumeration cost rises steeply with the order (the vertex count
  /// roughly quintuples per unit), so the switch point sits well below the
  /// geometry cap.
  int vertex_max_order = 4;
  int burn_in_factor = 64;  // cold-start walk iterations per unit order
  int step_factor = 4;      // warm-start iterations per unit order and step
  double iid_lo = 0.5;      // IntervalIid column range
  double iid_hi = 1.0;

  std::string describe() const {
    switch (kind) {
      case Kind::Auto:
        return "auto";
      case Kind::VertexMixture:
        return "vertex";
      case Kind::HitAndRun:
        return "hitrun";
      case Kind::IntervalIid: {
        std::ostringstream os;
        os << "interval:" << iid_lo << "," << iid_hi;
        return os.str();
      }
    }
    return "auto";
  }

  static MrPolicy parse(const std::string& text);
};

struct GrowthConfig {
  GammaSpec gamma = GammaSpec::exponential(1.0);
  MrPolicy policy{};
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

/// The counterexample regime of i.i.d. entries in [lo, hi] with hi <= 2*lo:
/// any such matrix satisfies every triangle inequality outright.
inline GrowthConfig interval_fixture_config(double lo, double hi,
                                            std::uint64_t seed) {
  if (!(lo > 0) || !(hi >= lo) || !(hi <= 2 * lo))
    throw std::invalid_argument("interval fixture needs 0 < lo <= hi <= 2*lo");
  GrowthConfig cfg;
  cfg.gamma = GammaSpec::uniform(0.0, 0.0);
  cfg.policy.kind = MrPolicy::Kind::IntervalIid;
  cfg.policy.iid_lo = lo;
  cfg.policy.iid_hi = hi;
  cfg.seed = seed;
  return cfg;
}

/// Runs the growth chain for `steps` attachments; the result has order
/// steps + 1. Deterministic given cfg.seed.
inline DistanceMatrix<double> grow_random(const GrowthConfig& cfg, int steps) {
  if (steps < 1) throw std::invalid_argument("grow_random: steps must be >= 1");
  const Eigen::Index final_order = steps + 1;
  MatrixXd m = MatrixXd::Zero(final_order, final_order);
  Rng rng(cfg.seed);
  bool warned_fallback = false;

  VectorXd walk_x;  // hit-and-run state, extended alongside the matrix
  for (int k = 1; k <= steps; ++k) {
    const auto cur = DistanceMatrix<double>::unchecked(m.topLeftCorner(k, k));
    const auto P = build(cur);
    const bool explicit_vertex = cfg.policy.kind == MrPolicy::Kind::VertexMixture;
    const bool vertex_route =
        (cfg.policy.kind == MrPolicy::Kind::Auto || explicit_vertex) &&
        k <= std::min(cfg.policy.vertex_max_order, kHardVertexCap);
    if (explicit_vertex && !vertex_route && !warned_fallback) {
      std::cerr << "[distcone] vertex policy exceeded its order cap at order "
                << k << "; falling back to hit-and-run\n";
      warned_fallback = true;
    }

    std::vector<VectorXd> verts;
    if (vertex_route && cfg.policy.kind != MrPolicy::Kind::IntervalIid)
      verts = extremal_points_double(cur, kHardVertexCap);

    VectorXd a(k);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 256)
        throw std::logic_error("grow_random: could not draw admissible point");
      VectorXd v;
      if (cfg.policy.kind == MrPolicy::Kind::IntervalIid) {
        v = VectorXd::NullaryExpr(k, [&](Eigen::Index) {
          return rng.uniform(cfg.policy.iid_lo, cfg.policy.iid_hi);
        });
      } else if (vertex_route) {
        VectorXd mix = VectorXd::Zero(k);
        double total = 0;
        std::vector<double> w(verts.size());
        for (std::size_t t = 0; t < verts.size(); ++t) {
          w[t] = rng.exponential(1.0);
          total += w[t];
        }
        for (std::size_t t = 0; t < verts.size(); ++t)
          mix += (w[t] / total) * verts[t];
        v = std::move(mix);
      } else {
        if (walk_x.size() == 0) {
          walk_x = max_row_point(cur);
          chord_walk(m.topLeftCorner(k, k), walk_x, rng,
                     cfg.policy.burn_in_factor * k);
        } else if (walk_x.size() < k) {
          walk_x = extend_prefix(cur, walk_x, IntervalRule::Midpoint,
                                 cfg.tolerance);
          chord_walk(m.topLeftCorner(k, k), walk_x, rng,
                     cfg.policy.step_factor * k);
        } else {
          chord_walk(m.topLeftCorner(k, k), walk_x, rng,
                     cfg.policy.step_factor * k);
        }
        const double lam = minimal_shift(cur, walk_x);
        v = (walk_x - VectorXd::Constant(k, lam)).cwiseMax(0.0);
      }
      const double lambda = cfg.gamma.sample(rng);
      a = v + VectorXd::Constant(k, lambda);
      if (P.contains(a, cfg.tolerance)) break;
      // Rejected points are resampled, never clamped.
    }
    for (int i = 0; i < k; ++i) {
      m(i, k) = a(i);
      m(k, i) = a(i);
    }
  }
  return DistanceMatrix<double>::unchecked(std::move(m));
}

/// I.i.d. entries uniform in [lo, hi]; valid whenever hi <= 2*lo > 0.
inline DistanceMatrix<double> iid_interval_matrix(Eigen::Index n, double lo,
                                                  double hi,
                                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("order must be >= 1");
  if (!(lo > 0) || !(hi >= lo) || !(hi <= 2 * lo))
    throw std::invalid_argument("need 0 < lo <= hi <= 2*lo");
  Rng rng(seed);
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = rng.uniform(lo, hi);
      m(j, i) = m(i, j);
    }
  return DistanceMatrix<double>::unchecked(std::move(m));
}

/// Erdos-Renyi metric: distance 1 with probability p, else 2.
inline DistanceMatrix<double> random_graph_metric(Eigen::Index n, double p,
                                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("order must be >= 1");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("edge probability must lie in (0,1)");
  Rng rng(seed);
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = rng.uniform01() < p ? 1.0 : 2.0;
      m(j, i) = m(i, j);
    }
  return DistanceMatrix<double>::unchecked(std::move(m));
}

/// The level sequence 1; 1,2; 1,2,3; ... every level recurs infinitely often
/// and m_k <= k.
inline int diagonal_level(int k) {
  // k is 1-based; find the block b with b(b-1)/2 < k <= b(b+1)/2.
  int b = static_cast<int>((std::sqrt(8.0 * k + 1.0) - 1.0) / 2.0);
  while (b * (b + 1) / 2 < k) ++b;
  while (b > 1 && (b - 1) * b / 2 >= k) --b;
  return k - (b - 1) * b / 2;
}

/// Enumeration policy for the dense subsets Gamma_r of corner polytopes.
struct DensePolicy {
  int vertex_max_order = 5;  // exact vertex hulls at or below this order
  double shift_box = 4.0;    // dyadic sweep range for diagonal shifts
  int burn_in_factor = 64;   // walk seeding beyond the vertex cap
  int step_factor = 4;
  double min_coordinate = 1e-4;  // emitted points stay strictly positive
};

struct UniversalSchedule {
  DensePolicy dense{};
  std::uint64_t seed = 0;
  /// Rotates the interleaving of the shift sweep; alternate but equally
  /// dense enumeration orders for robustness comparisons.
  int variant = 0;
};

/// Deterministic diagonal-shift sweep: three interleaved strands cover the
/// box evenly, cover its lower quarter finely, and decay geometrically
/// toward zero, so both large and arbitrarily small shifts appear early.
inline double dense_shift(const DensePolicy& dense, int variant, int t) {
  const int strand = (t + variant) % 3;
  const int s = t / 3 + 1;
  switch (strand) {
    case 0:
      return dense.shift_box * van_der_corput(static_cast<std::uint64_t>(s));
    case 1:
      return 0.25 * dense.shift_box *
             van_der_corput(static_cast<std::uint64_t>(s));
    default:
      return dense.shift_box * std::pow(2.0, -(1 + s));
  }
}

namespace detail {

/// Lazy enumerator of a dense subset of A(r) with strictly positive
/// coordinates: hull sweeps of the extremal points (or walk points beyond
/// the enumeration cap) crossed with the deterministic shift sweep.
class DenseSetEnumerator {
 public:
  DenseSetEnumerator(DistanceMatrix<double> corner, const DensePolicy& dense,
                     int variant, Rng rng)
      : corner_(std::move(corner)),
        dense_(dense),
        variant_(variant),
        sampler_(corner_, rng, dense.vertex_max_order, dense.burn_in_factor,
                 dense.step_factor) {}

  /// Next point of Gamma_r; skips candidates with non-positive coordinates.
  VectorXd next() {
    for (;;) {
      const double lam = dense_shift(dense_, variant_, candidate_++);
      VectorXd v = sampler_.sample();
      v.array() += lam;
      if ((v.array() >= dense_.min_coordinate).all()) {
        if (!build(corner_).contains(v, 1e-9))
          throw std::logic_error("dense-set point left the polytope");
        return v;
      }
    }
  }

 private:
  DistanceMatrix<double> corner_;
  DensePolicy dense_;
  int variant_;
  MrSampler sampler_;
  int candidate_ = 0;
};

}  // namespace detail

struct UniversalGrowth {
  DistanceMatrix<double> matrix;
  /// Distance between each step's projection and its dense-set target; the
  /// construction keeps every entry under the 2^-k budget (here exactly 0).
  std::vector<double> projection_errors;
};

/// Deterministic inductive construction of a finite universal-matrix prefix:
/// at step k the attached vector projects onto the order-m_k corner exactly
/// at the next enumerated dense point of that corner's polytope, then grows
/// to full length through midpoint extension.
inline UniversalGrowth grow_universal(const UniversalSchedule& schedule,
                                      int steps) {
  if (steps < 1)
    throw std::invalid_argument("grow_universal: steps must be >= 1");
  const Eigen::Index final_order = steps + 1;
  MatrixXd m = MatrixXd::Zero(final_order, final_order);
  std::vector<double> errors;
  errors.reserve(steps);
  std::map<int, std::unique_ptr<detail::DenseSetEnumerator>> levels;
  const Rng base(schedule.seed);

  for (int k = 1; k <= steps; ++k) {
    const int level = diagonal_level(k);
    auto it = levels.find(level);
    if (it == levels.end()) {
      auto corner =
          DistanceMatrix<double>::unchecked(m.topLeftCorner(level, level));
      it = levels
               .emplace(level, std::make_unique<detail::DenseSetEnumerator>(
                                   std::move(corner), schedule.dense,
                                   schedule.variant,
                                   base.split(1000 + level)))
               .first;
    }
    const VectorXd target = it->second->next();
    const auto cur = DistanceMatrix<double>::unchecked(m.topLeftCorner(k, k));
    const VectorXd a = extend_prefix(cur, target, IntervalRule::Midpoint);
    const double err = (a.head(level) - target).cwiseAbs().maxCoeff();
    if (!(err < std::pow(2.0, -std::min(k, 1000)) || err == 0.0))
      throw std::logic_error("universal growth exceeded its tolerance budget");
    errors.push_back(err);
    for (int i = 0; i < k; ++i) {
      m(i, k) = a(i);
      m(k, i) = a(i);
    }
  }
  return {DistanceMatrix<double>::unchecked(std::move(m)), std::move(errors)};
}

inline GammaSpec GammaSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  try {
    if (head == "exp") return exponential(std::stod(rest));
    if (head == "halfnormal") return half_normal(std::stod(rest));
    if (head == "uniform") {
      const auto parts = split_list(rest);
      if (parts.size() != 2) throw std::invalid_argument("uniform:lo,hi");
      return uniform(std::stod(parts[0]), std::stod(parts[1]));
    }
    if (head == "table") {
      std::vector<double> values, weights;
      for (const auto& item : split_list(rest)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("table:value=weight,...");
        values.push_back(std::stod(item.substr(0, eq)));
        weights.push_back(std::stod(item.substr(eq + 1)));
      }
      return table(std::move(values), std::move(weights));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad gamma spec: '" + text + "'");
  }
  throw std::invalid_argument("unknown gamma kind: '" + head + "'");
}

inline MrPolicy MrPolicy::parse(const std::string& text) {
  MrPolicy p;
  if (text == "auto") {
    p.kind = Kind::Auto;
  } else if (text == "vertex") {
    p.kind = Kind::VertexMixture;
  } else if (text == "hitrun") {
    p.kind = Kind::HitAndRun;
  } else if (text.rfind("interval:", 0) == 0) {
    p.kind = Kind::IntervalIid;
    const auto rest = text.substr(9);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("interval:lo,hi");
    p.iid_lo = std::stod(rest.substr(0, comma));
    p.iid_hi = std::stod(rest.substr(comma + 1));
    if (!(p.iid_lo > 0) || !(p.iid_hi >= p.iid_lo) ||
        !(p.iid_hi <= 2 * p.iid_lo))
      throw std::invalid_argument("interval policy needs 0 < lo <= hi <= 2*lo");
  } else {
    throw std::invalid_argument("unknown policy: '" + text + "'");
  }
  return p;
}

}  // namespace distcone

#endif  // DISTCONE_SAMPLER_HPP
