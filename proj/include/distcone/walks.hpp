/**
 * Chord walks inside admissible polytopes. A hit-and-run step draws a random
 * direction, intersects the line with every constraint of A(r) (enumerated
 * on the fly, two coordinates per constraint), and jumps uniformly on the
 * feasible chord. Subtracting the maximal diagonal shift afterwards projects
 * a walk point onto the lower boundary of A(r), which lies inside M_r; that
 * is how points of the compact factor are sampled when the order is too
 * large for vertex enumeration.
 */

#ifndef DISTCONE_WALKS_HPP
#define DISTCONE_WALKS_HPP

#include <limits>
#include <optional>
#include <vector>

#include "distcone/admissible.hpp"
#include "distcone/distance_matrix.hpp"
#include "distcone/rng.hpp"
#include "distcone/scalar.hpp"

namespace distcone {

namespace detail {

// Fold constraint lhs + t*dir >= rhs into the running chord [lo, hi].
inline void fold_bound(double lhs, double dir, double rhs, double& lo,
                       double& hi) {
  if (dir > 0) {
    const double t = (rhs - lhs) / dir;
    if (t > lo) lo = t;
  } else if (dir < 0) {
    const double t = (rhs - lhs) / dir;
    if (t < hi) hi = t;
  }
}

}  // namespace detail

/// One hit-and-run step for x inside A(r); r is the full square matrix.
/// Returns false when the chord degenerates (lower-dimensional feasible set
/// or numerical squeeze); the point then stays put.
inline bool chord_step(const Eigen::Ref<const MatrixXd>& r, VectorXd& x,
                       VectorXd& dir, Rng& rng) {
  const Eigen::Index n = x.size();
  for (Eigen::Index i = 0; i < n; ++i) dir(i) = rng.normal();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::fold_bound(x(i), dir(i), 0.0, lo, hi);  // a_i >= 0
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double rij = r(i, j);
      const double u = x(i) - x(j);
      const double du = dir(i) - dir(j);
      // -r_ij <= u + t*du <= r_ij
      detail::fold_bound(u, du, -rij, lo, hi);
      detail::fold_bound(-u, -du, -rij, lo, hi);
      // (x_i + x_j) + t*(d_i + d_j) >= r_ij
      detail::fold_bound(x(i) + x(j), dir(i) + dir(j), rij, lo, hi);
    }
  }
  if (!(hi > lo)) return false;
  // Direction proportional to the diagonal leaves the chord unbounded; clamp
  // to a scale-sized window (probability-zero event, kept finite).
  const double scale = 10.0 * (1.0 + x.cwiseAbs().maxCoeff());
  if (lo < -scale) lo = -scale;
  if (hi > scale) hi = scale;
  if (!(hi > lo)) return false;
  x += rng.uniform(lo, hi) * dir;
  return true;
}

inline void chord_walk(const Eigen::Ref<const MatrixXd>& r, VectorXd& x,
                       Rng& rng, int iterations) {
  VectorXd dir(x.size());
  for (int t = 0; t < iterations; ++t) chord_step(r, x, dir, rng);
}

/// Draws points of M_r: Dirichlet-uniform mixtures of the extremal points
/// when the order is small enough to enumerate them, otherwise minimalized
/// hit-and-run states. Deterministic given the seed of `rng`.
class MrSampler {
 public:
  MrSampler(DistanceMatrix<double> base, Rng rng,
            int vertex_max_order = 5, int burn_factor = 64,
            int step_factor = 4)
      : base_(std::move(base)), rng_(rng), step_factor_(step_factor) {
    const int n = static_cast<int>(base_.order());
    if (n <= std::min(vertex_max_order, kHardVertexCap)) {
      vertices_ = extremal_points_double(base_, vertex_max_order);
    } else {
      x_ = max_row_point(base_);
      chord_walk(base_.square(), x_, rng_, burn_factor * n);
    }
  }

  bool uses_vertices() const { return !vertices_.empty(); }
  const std::vector<VectorXd>& vertices() const { return vertices_; }

  /// One point of M_r (up to float rounding on the mixture route).
  VectorXd sample() {
    if (!vertices_.empty()) return mixture(rng_);
    chord_walk(base_.square(), x_,
               rng_, step_factor_ * static_cast<int>(base_.order()));
    const VectorXd v =
        x_ - VectorXd::Constant(x_.size(), minimal_shift(base_, x_));
    return v.cwiseMax(0.0);
  }

  /// Dirichlet(1,...,1) mixture of the enumerated vertices.
  VectorXd mixture(Rng& rng) const {
    VectorXd out = VectorXd::Zero(base_.order());
    double total = 0.0;
    std::vector<double> w(vertices_.size());
    for (std::size_t t = 0; t < vertices_.size(); ++t) {
      w[t] = rng.exponential(1.0);
      total += w[t];
    }
    for (std::size_t t = 0; t < vertices_.size(); ++t)
      out += (w[t] / total) * vertices_[t];
    return out;
  }

 private:
  DistanceMatrix<double> base_;
  Rng rng_;
  int step_factor_;
  std::vector<VectorXd> vertices_;
  VectorXd x_;
};

}  // namespace distcone

#endif  // DISTCONE_WALKS_HPP
