/**
 * The admissible-vector polytope A(r) of a distance matrix r: all vectors a
 * with |a_i - a_j| <= r_ij <= a_i + a_j and a_i >= 0, i.e. the distance
 * columns that extend r by one point. A(r) decomposes as a Minkowski sum
 * M_r + Delta_n of a compact polytope and the nonnegative diagonal ray.
 *
 * Membership and chord queries never materialize the constraint system; the
 * three constraint families per index pair are enumerated on the fly from
 * the base matrix. Extremal points are computed exactly (rational scalars)
 * with an incremental double-description pass over the homogenized cone.
 */

#ifndef DISTCONE_ADMISSIBLE_HPP
#define DISTCONE_ADMISSIBLE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distcone/distance_matrix.hpp"
#include "distcone/scalar.hpp"

namespace distcone {

enum class Sense { LessEq, GreaterEq };

/// One halfspace, materialized only for serialization and oracles.
template <typename Scalar>
struct Halfspace {
  DenseVector<Scalar> coeffs;
  Scalar rhs;
  Sense sense;

  bool holds(const DenseVector<Scalar>& a, const Scalar& tol) const {
    const Scalar lhs = coeffs.dot(a);
    return sense == Sense::LessEq ? lhs <= rhs + tol : lhs >= rhs - tol;
  }
};

struct PolytopeCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultVertexCap = 7;
// Zero-sets are tracked in two 64-bit words; 1 + n + 3n(n-1)/2 rows fit
// for n <= 9.
inline constexpr int kHardVertexCap = 9;

template <typename Scalar>
class AdmissiblePolytope {
 public:
  explicit AdmissiblePolytope(DistanceMatrix<Scalar> base)
      : base_(std::move(base)) {}

  const DistanceMatrix<Scalar>& base() const { return base_; }
  Eigen::Index dimension() const { return base_.order(); }

  /// 3 * n(n-1)/2 metric halfspaces plus n nonnegativity halfspaces.
  Eigen::Index constraint_count() const {
    const Eigen::Index n = base_.order();
    return 3 * n * (n - 1) / 2 + n;
  }

  /// Deterministic constraint order: for each pair (i<j) in row-major order
  /// the families a_i - a_j <= r_ij, a_j - a_i <= r_ij, a_i + a_j >= r_ij,
  /// followed by a_i >= 0.
  Halfspace<Scalar> halfspace(Eigen::Index t) const {
    const Eigen::Index n = base_.order();
    const Eigen::Index metric = 3 * n * (n - 1) / 2;
    if (t < 0 || t >= constraint_count())
      throw std::out_of_range("constraint index");
    DenseVector<Scalar> c = DenseVector<Scalar>::Zero(n);
    if (t >= metric) {
      c(t - metric) = Scalar(1);
      return {std::move(c), Scalar(0), Sense::GreaterEq};
    }
    const Eigen::Index pair = t / 3;
    const int family = static_cast<int>(t % 3);
    Eigen::Index i = 0, j = 0, p = pair;
    for (i = 0; i < n; ++i) {
      const Eigen::Index row = n - 1 - i;
      if (p < row) {
        j = i + 1 + p;
        break;
      }
      p -= row;
    }
    const Scalar& rij = base_(i, j);
    switch (family) {
      case 0:
        c(i) = Scalar(1);
        c(j) = Scalar(-1);
        return {std::move(c), rij, Sense::LessEq};
      case 1:
        c(i) = Scalar(-1);
        c(j) = Scalar(1);
        return {std::move(c), rij, Sense::LessEq};
      default:
        c(i) = Scalar(1);
        c(j) = Scalar(1);
        return {std::move(c), rij, Sense::GreaterEq};
    }
  }

  bool contains(const DenseVector<Scalar>& a, double tolerance = 1e-12) const {
    if (a.size() != base_.order())
      throw std::invalid_argument("vector length does not match base order");
    using std::abs;
    const Scalar tol = is_exact_v<Scalar> ? Scalar(0) : Scalar(tolerance);
    const Eigen::Index n = base_.order();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i) < -tol) return false;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Scalar& rij = base_(i, j);
        if (abs(a(i) - a(j)) > rij + tol) return false;
        if (a(i) + a(j) < rij - tol) return false;
      }
    }
    return true;
  }

 private:
  DistanceMatrix<Scalar> base_;
};

template <typename Scalar>
AdmissiblePolytope<Scalar> build(const DistanceMatrix<Scalar>& r) {
  return AdmissiblePolytope<Scalar>(r);
}

template <typename Scalar>
bool contains(const AdmissiblePolytope<Scalar>& P, const DenseVector<Scalar>& a,
              double tolerance = 1e-12) {
  return P.contains(a, tolerance);
}

/// The farthest-point vector a_i = max_j r_ij, always admissible; used as a
/// feasible interior-ish start for chord walks.
template <typename Scalar>
DenseVector<Scalar> max_row_point(const DistanceMatrix<Scalar>& r) {
  const Eigen::Index n = r.order();
  DenseVector<Scalar> a = DenseVector<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(i, j) > a(i)) a(i) = r(i, j);
  return a;
}

/// Largest lambda with a - lambda*(1,...,1) still admissible. Subtracting it
/// lands on the lower boundary of A(r), a subset of M_r.
template <typename Scalar>
Scalar minimal_shift(const DistanceMatrix<Scalar>& r,
                     const DenseVector<Scalar>& a) {
  const Eigen::Index n = r.order();
  Scalar lam = a.minCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar room = (a(i) + a(j) - r(i, j)) / Scalar(2);
      if (room < lam) lam = room;
    }
  if (lam < Scalar(0)) lam = Scalar(0);
  return lam;
}

namespace detail {

struct ZeroSet {
  std::array<std::uint64_t, 2> w{0, 0};
  void set(int bit) { w[bit >> 6] |= (std::uint64_t{1} << (bit & 63)); }
  friend ZeroSet operator&(const ZeroSet& a, const ZeroSet& b) {
    return {{a.w[0] & b.w[0], a.w[1] & b.w[1]}};
  }
  bool subset_of(const ZeroSet& other) const {
    return (w[0] & ~other.w[0]) == 0 && (w[1] & ~other.w[1]) == 0;
  }
  int count() const {
    return __builtin_popcountll(w[0]) + __builtin_popcountll(w[1]);
  }
};

struct DdRay {
  VectorXq v;  // homogeneous: index 0 scales the affine part
  ZeroSet zero;
};

// Sparse homogeneous row c0*x0 + ci*a_i + cj*a_j >= 0.
struct DdRow {
  Rational c0;
  int i;
  int j;  // -1 for single-variable rows
  Rational ci;
  Rational cj;

  Rational eval(const VectorXq& v) const {
    Rational s = c0 * v(0) + ci * v(i + 1);
    if (j >= 0) s += cj * v(j + 1);
    return s;
  }
};

/// Extreme rays of {y >= 0 componentwise} cut by `rows`, seeded with the
/// standard basis of R^{dim}. Classic double description with the
/// combinatorial adjacency test; exact arithmetic throughout. Zero sets of
/// fresh rays are recomputed against every processed row: the structured
/// constraint systems here are heavily degenerate, and inherited zero sets
/// would undercount accidental tightness and corrupt the adjacency oracle.
inline std::vector<DdRay> double_description(int dim,
                                             const std::vector<DdRow>& rows) {
  std::vector<DdRay> rays;
  rays.reserve(static_cast<std::size_t>(dim) * 4);
  for (int k = 0; k < dim; ++k) {
    DdRay ray;
    ray.v = VectorXq::Zero(dim);
    ray.v(k) = 1;
    for (int t = 0; t < dim; ++t)
      if (t != k) ray.zero.set(t);
    rays.push_back(std::move(ray));
  }

  auto exact_zero_set = [&](const VectorXq& v, std::size_t processed) {
    ZeroSet z;
    for (int t = 0; t < dim; ++t)
      if (v(t) == 0) z.set(t);
    for (std::size_t s = 0; s < processed; ++s)
      if (rows[s].eval(v) == 0) z.set(dim + static_cast<int>(s));
    return z;
  };

  std::vector<Rational> val;
  for (std::size_t row_idx = 0; row_idx < rows.size(); ++row_idx) {
    const DdRow& row = rows[row_idx];
    const int bit = dim + static_cast<int>(row_idx);
    val.resize(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t t = 0; t < rays.size(); ++t) {
      val[t] = row.eval(rays[t].v);
      const int s = val[t].sign();
      if (s > 0)
        pos.push_back(t);
      else if (s < 0)
        neg.push_back(t);
      else
        rays[t].zero.set(bit);
    }
    if (neg.empty()) continue;

    std::vector<DdRay> next;
    next.reserve(rays.size());
    for (std::size_t t = 0; t < rays.size(); ++t)
      if (val[t].sign() >= 0) next.push_back(rays[t]);

    for (std::size_t p : pos) {
      for (std::size_t q : neg) {
        const ZeroSet common = rays[p].zero & rays[q].zero;
        if (common.count() < dim - 2) continue;
        bool adjacent = true;
        for (std::size_t t = 0; t < rays.size(); ++t) {
          if (t == p || t == q) continue;
          if (common.subset_of(rays[t].zero)) {
            adjacent = false;
            break;
          }
        }
        if (!adjacent) continue;
        DdRay fresh;
        fresh.v = val[p] * rays[q].v - val[q] * rays[p].v;
        fresh.v /= fresh.v.sum();  // nonneg combo of nonneg rays; sum > 0
        fresh.zero = exact_zero_set(fresh.v, row_idx + 1);
        next.push_back(std::move(fresh));
      }
    }
    if (next.empty())
      throw std::logic_error("admissible polytope became empty");
    rays.swap(next);
  }
  return rays;
}

inline int rational_rank(std::vector<VectorXq> rows) {
  int rank = 0;
  const Eigen::Index cols = rows.empty() ? 0 : rows[0].size();
  Eigen::Index lead = 0;
  for (std::size_t r = 0; r < rows.size() && lead < cols; ++lead) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot](lead) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (t == r || rows[t](lead) == 0) continue;
      // Materialize the factor: the scalar type uses expression templates,
      // and a lazy quotient would alias the entry being eliminated.
      const Rational f = rows[t](lead) / rows[r](lead);
      rows[t] -= f * rows[r];
    }
    ++rank;
    ++r;
  }
  return rank;
}

}  // namespace detail

/// All extremal points of A(r), exactly, in lexicographic order. Refuses
/// orders above the cap: the enumeration is combinatorial in nature and the
/// output size itself grows steeply with the order.
inline std::vector<VectorXq> extremal_points(
    const AdmissiblePolytope<Rational>& P, int max_order = kDefaultVertexCap) {
  const int n = static_cast<int>(P.dimension());
  if (n > std::min(max_order, kHardVertexCap))
    throw PolytopeCapExceeded(
        "extremal point enumeration refused at order " + std::to_string(n) +
        " (cap " + std::to_string(std::min(max_order, kHardVertexCap)) +
        "): combinatorial blowup");

  // Homogenize: y = (x0, a), x0 >= 0 and a_i >= 0 seed the orthant; each
  // metric constraint becomes a sparse homogeneous row.
  std::vector<detail::DdRow> rows;
  rows.reserve(static_cast<std::size_t>(3 * n * (n - 1) / 2));
  const auto& r = P.base();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Rational& rij = r(i, j);
      rows.push_back({-rij, i, j, Rational(1), Rational(1)});   // sum
      rows.push_back({rij, i, j, Rational(-1), Rational(1)});   // a_i - a_j
      rows.push_back({rij, i, j, Rational(1), Rational(-1)});   // a_j - a_i
    }
  }
  const auto rays = detail::double_description(n + 1, rows);

  std::vector<VectorXq> vertices;
  for (const auto& ray : rays) {
    if (ray.v(0) > 0) {
      vertices.push_back(ray.v.tail(n) / ray.v(0));
    } else {
      // The recession cone of A(r) is exactly the diagonal ray.
      const VectorXq dir = ray.v.tail(n);
      for (Eigen::Index t = 1; t < dir.size(); ++t)
        if (dir(t) != dir(0))
          throw std::logic_error("non-diagonal recession direction");
    }
  }
  auto lex_less = [](const VectorXq& a, const VectorXq& b) {
    for (Eigen::Index t = 0; t < a.size(); ++t) {
      if (a(t) < b(t)) return true;
      if (a(t) > b(t)) return false;
    }
    return false;
  };
  std::sort(vertices.begin(), vertices.end(), lex_less);
  vertices.erase(std::unique(vertices.begin(), vertices.end()),
                 vertices.end());
  return vertices;
}

/// Exact vertices of the float polytope: the base entries (dyadic rationals)
/// are converted losslessly, enumerated exactly, and rounded once at the end.
inline std::vector<VectorXd> extremal_points_double(
    const DistanceMatrix<double>& base, int max_order = kDefaultVertexCap) {
  const auto exact = DistanceMatrix<Rational>::unchecked(
      to_rational(base.square()));
  const auto verts = extremal_points(build(exact), max_order);
  std::vector<VectorXd> out;
  out.reserve(verts.size());
  for (const auto& v : verts) out.push_back(to_double(v));
  return out;
}

struct MinkowskiDecomposition {
  std::vector<VectorXq> vertices;  // extremal points of A(r) = vertices of M_r
  VectorXq ray;                    // (1, ..., 1)
  int dim_polytope = 0;            // affine dimension of A(r)
  int dim_hull = 0;                // affine dimension of conv(vertices)
};

inline MinkowskiDecomposition minkowski_decompose(
    const AdmissiblePolytope<Rational>& P,
    int max_order = kDefaultVertexCap) {
  MinkowskiDecomposition out;
  out.vertices = extremal_points(P, max_order);
  out.ray = VectorXq::Constant(P.dimension(), Rational(1));
  std::vector<VectorXq> diffs;
  for (std::size_t t = 1; t < out.vertices.size(); ++t)
    diffs.push_back(out.vertices[t] - out.vertices[0]);
  out.dim_hull = detail::rational_rank(diffs);
  diffs.push_back(out.ray);
  out.dim_polytope = detail::rational_rank(std::move(diffs));
  return out;
}

/// A vector validated against its base matrix on construction.
template <typename Scalar>
class AdmissibleVector {
 public:
  static AdmissibleVector checked(const DistanceMatrix<Scalar>& base,
                                  DenseVector<Scalar> coords,
                                  double tolerance = 1e-12) {
    if (!build(base).contains(coords, tolerance))
      throw std::invalid_argument("vector is not admissible for the base");
    return AdmissibleVector(base.order(), std::move(coords));
  }

  Eigen::Index base_order() const { return base_order_; }
  const DenseVector<Scalar>& coords() const { return coords_; }

 private:
  AdmissibleVector(Eigen::Index n, DenseVector<Scalar> coords)
      : base_order_(n), coords_(std::move(coords)) {}
  Eigen::Index base_order_;
  DenseVector<Scalar> coords_;
};

/// Extends r by one point whose distances to the existing points are a.
template <typename Scalar>
DistanceMatrix<Scalar> attach(const DistanceMatrix<Scalar>& r,
                              const DenseVector<Scalar>& a,
                              double tolerance = 1e-12) {
  if (!build(r).contains(a, tolerance))
    throw std::invalid_argument("attach: vector is not admissible");
  const Eigen::Index n = r.order();
  DenseMatrix<Scalar> m = DenseMatrix<Scalar>::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = r.square();
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, n) = a(i);
    m(n, i) = a(i);
  }
  return DistanceMatrix<Scalar>::unchecked(std::move(m));
}

template <typename Scalar>
DistanceMatrix<Scalar> attach(const DistanceMatrix<Scalar>& r,
                              const AdmissibleVector<Scalar>& a) {
  if (a.base_order() != r.order())
    throw std::invalid_argument("attach: base order mismatch");
  const Eigen::Index n = r.order();
  DenseMatrix<Scalar> m = DenseMatrix<Scalar>::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = r.square();
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, n) = a.coords()(i);
    m(n, i) = a.coords()(i);
  }
  return DistanceMatrix<Scalar>::unchecked(std::move(m));
}

/// Feasible range [lower, upper] for the distance between two new points
/// attached to r with distance columns a and b: lower = max_i |a_i - b_i|,
/// upper = min_i (a_i + b_i).
template <typename Scalar>
struct ExtensionInterval {
  Scalar lower;
  Scalar upper;
  bool clamped = false;  // float-mode rounding collapsed onto the midpoint
};

namespace detail {

template <typename Scalar>
ExtensionInterval<Scalar> raw_extension_interval(const DenseVector<Scalar>& a,
                                                 const DenseVector<Scalar>& b) {
  using std::abs;
  ExtensionInterval<Scalar> out{Scalar(0), a(0) + b(0), false};
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Scalar gap = abs(a(i) - b(i));
    if (gap > out.lower) out.lower = gap;
    const Scalar sum = a(i) + b(i);
    if (sum < out.upper) out.upper = sum;
  }
  if (out.lower > out.upper) {
    if constexpr (is_exact_v<Scalar>) {
      throw std::logic_error("empty extension interval in exact arithmetic");
    } else {
      if (out.lower - out.upper > 1e-9)
        throw std::logic_error("extension interval empty beyond tolerance");
      const Scalar mid = (out.lower + out.upper) / Scalar(2);
      out.lower = mid;
      out.upper = mid;
      out.clamped = true;
    }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
ExtensionInterval<Scalar> extension_interval(const DistanceMatrix<Scalar>& r,
                                             const DenseVector<Scalar>& a,
                                             const DenseVector<Scalar>& b,
                                             double tolerance = 1e-12) {
  const auto P = build(r);
  if (!P.contains(a, tolerance) || !P.contains(b, tolerance))
    throw std::invalid_argument(
        "extension_interval: vectors must be admissible for the base");
  return detail::raw_extension_interval(a, b);
}

enum class IntervalRule { Midpoint, Lower, Upper };

template <typename Scalar>
Scalar pick_in_interval(const ExtensionInterval<Scalar>& iv,
                        IntervalRule rule) {
  switch (rule) {
    case IntervalRule::Lower:
      return iv.lower;
    case IntervalRule::Upper:
      return iv.upper;
    default:
      return (iv.lower + iv.upper) / Scalar(2);
  }
}

/// Lifts a vector admissible for the order-n corner of r_big to a vector
/// admissible for all of r_big, keeping the first n coordinates unchanged.
/// Each new coordinate is chosen inside the feasible interval against the
/// corresponding column of r_big; the midpoint rule maximizes later slack.
template <typename Scalar>
DenseVector<Scalar> extend_prefix(const DistanceMatrix<Scalar>& r_big,
                                  const DenseVector<Scalar>& a,
                                  IntervalRule rule = IntervalRule::Midpoint,
                                  double tolerance = 1e-12) {
  const Eigen::Index N = r_big.order();
  const Eigen::Index n = a.size();
  if (n < 1 || n > N)
    throw std::invalid_argument("extend_prefix: prefix length out of range");
  if (!build(nw_corner(r_big, n)).contains(a, tolerance))
    throw std::invalid_argument(
        "extend_prefix: vector is not admissible for the corner");
  DenseVector<Scalar> out(N);
  out.head(n) = a;
  for (Eigen::Index t = n; t < N; ++t) {
    // Column of point t against points 0..t-1, admissible for the corner.
    ExtensionInterval<Scalar> iv{Scalar(0), out(0) + r_big(0, t), false};
    using std::abs;
    for (Eigen::Index i = 0; i < t; ++i) {
      const Scalar gap = abs(out(i) - r_big(i, t));
      if (gap > iv.lower) iv.lower = gap;
      const Scalar sum = out(i) + r_big(i, t);
      if (sum < iv.upper) iv.upper = sum;
    }
    if (iv.lower > iv.upper) {
      if constexpr (is_exact_v<Scalar>) {
        throw std::logic_error("extend_prefix: empty interval (exact)");
      } else {
        if (iv.lower - iv.upper > 1e-9)
          throw std::logic_error("extend_prefix: empty interval");
        iv.lower = iv.upper = (iv.lower + iv.upper) / Scalar(2);
      }
    }
    out(t) = pick_in_interval(iv, rule);
  }
  return out;
}

}  // namespace distcone

#endif  // DISTCONE_ADMISSIBLE_HPP
