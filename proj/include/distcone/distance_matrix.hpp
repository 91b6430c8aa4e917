/**
 * Finite distance matrices: symmetric, zero diagonal, nonnegative entries,
 * every triangle inequality satisfied. Off-diagonal zeros are allowed (the
 * matrix then describes a semi-metric); `proper()` reports their absence.
 *
 * Values are immutable after construction and cheap to copy around; all
 * operations are pure functions. Indices are 0-based in this API and 1-based
 * in every file format and diagnostic.
 */

#ifndef DISTCONE_DISTANCE_MATRIX_HPP
#define DISTCONE_DISTANCE_MATRIX_HPP

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "distcone/scalar.hpp"

namespace distcone {

/// Shape/symmetry/diagonal problems; raised before any metric checks run.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationOptions {
  /// Absolute slack tolerance for float entries; exact mode ignores it.
  double tolerance = 1e-12;
};

enum class ViolationKind { NegativeEntry, Triangle };

/// One failed inequality. Indices are 1-based; for a triangle violation the
/// witness (i, j, k) means r(i,k) + r(k,j) < r(i,j) with the given slack.
struct Violation {
  ViolationKind kind;
  int i = 0;
  int j = 0;
  int k = 0;
  double slack = 0.0;
};

struct ValidationReport {
  bool valid = false;
  std::vector<Violation> violations;
  /// Count of inequalities that passed only inside the tolerance band.
  int warnings = 0;
};

struct InvalidDistanceMatrix : std::invalid_argument {
  InvalidDistanceMatrix(const std::string& msg, ValidationReport r)
      : std::invalid_argument(msg), report(std::move(r)) {}
  ValidationReport report;
};

namespace detail {

template <typename Scalar>
void check_square_form(const DenseMatrix<Scalar>& m, double tol) {
  if (m.rows() != m.cols())
    throw StructuralError("matrix is not square: " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()));
  if (m.rows() == 0) throw StructuralError("matrix has order zero");
  using std::abs;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if constexpr (is_exact_v<Scalar>) {
      if (m(i, i) != 0)
        throw StructuralError("nonzero diagonal at index " +
                              std::to_string(i + 1));
    } else {
      if (!(abs(m(i, i)) <= tol))
        throw StructuralError("nonzero diagonal at index " +
                              std::to_string(i + 1));
    }
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if constexpr (is_exact_v<Scalar>) {
        if (m(i, j) != m(j, i))
          throw StructuralError("asymmetric at (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ")");
      } else {
        if (!(abs(m(i, j) - m(j, i)) <= tol))
          throw StructuralError("asymmetric at (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

}  // namespace detail

/// Checks every entry sign and every triangle inequality of a raw square
/// array. Structural defects (shape, symmetry, diagonal) throw instead of
/// being reported. Exact scalars are checked with zero tolerance.
template <typename Scalar>
ValidationReport validate(const DenseMatrix<Scalar>& m,
                          ValidationOptions opts = {});

template <typename Derived>
ValidationReport validate(const Eigen::MatrixBase<Derived>& expr,
                          ValidationOptions opts = {}) {
  const DenseMatrix<typename Derived::Scalar> m = expr;
  return validate(m, opts);
}

template <typename Scalar>
ValidationReport validate(const DenseMatrix<Scalar>& m,
                          ValidationOptions opts) {
  detail::check_square_form(m, opts.tolerance);
  const Eigen::Index n = m.rows();
  const Scalar tol = is_exact_v<Scalar> ? Scalar(0) : Scalar(opts.tolerance);
  ValidationReport report;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar& v = m(i, j);
      if (v < -tol) {
        report.violations.push_back({ViolationKind::NegativeEntry,
                                     static_cast<int>(i + 1),
                                     static_cast<int>(j + 1), 0, to_double(v)});
      } else if (v < 0) {
        ++report.warnings;
      }
    }
  }
  // r(i,k) + r(k,j) >= r(i,j); by symmetry it suffices to scan i < j, k != i,j.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const Scalar slack = m(i, k) + m(k, j) - m(i, j);
        if (slack < -tol) {
          report.violations.push_back(
              {ViolationKind::Triangle, static_cast<int>(i + 1),
               static_cast<int>(j + 1), static_cast<int>(k + 1),
               to_double(slack)});
        } else if (slack < 0) {
          ++report.warnings;
        }
      }
    }
  }
  report.valid = report.violations.empty();
  return report;
}

template <typename Scalar>
class DistanceMatrix {
 public:
  /// Validates and adopts a raw square array.
  static DistanceMatrix from_square(DenseMatrix<Scalar> m,
                                    ValidationOptions opts = {}) {
    ValidationReport report = validate(m, opts);
    if (!report.valid) {
      std::ostringstream os;
      os << "not a distance matrix (" << report.violations.size()
         << " violated inequalities)";
      throw InvalidDistanceMatrix(os.str(), std::move(report));
    }
    symmetrize(m);
    return DistanceMatrix(std::move(m));
  }

  /// Builds from the packed strict upper triangle in column-block order
  /// (r_12, r_13, r_23, r_14, r_24, r_34, ...).
  static DistanceMatrix from_upper(Eigen::Index order,
                                   const std::vector<Scalar>& upper,
                                   ValidationOptions opts = {}) {
    if (order < 1) throw StructuralError("order must be positive");
    const std::size_t expected =
        static_cast<std::size_t>(order) * (order - 1) / 2;
    if (upper.size() != expected)
      throw StructuralError("upper triangle has " +
                            std::to_string(upper.size()) + " entries, need " +
                            std::to_string(expected));
    DenseMatrix<Scalar> m = DenseMatrix<Scalar>::Zero(order, order);
    std::size_t t = 0;
    for (Eigen::Index j = 1; j < order; ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        m(i, j) = upper[t];
        m(j, i) = upper[t];
        ++t;
      }
    return from_square(std::move(m), opts);
  }

  static DistanceMatrix zero(Eigen::Index order) {
    return DistanceMatrix(DenseMatrix<Scalar>::Zero(order, order));
  }

  /// Adopts entries whose validity is guaranteed by construction
  /// (projections of valid matrices, admissible extensions, sampled
  /// distances of an actual metric space). No checks run.
  static DistanceMatrix unchecked(DenseMatrix<Scalar> m) {
    symmetrize(m);
    return DistanceMatrix(std::move(m));
  }

  Eigen::Index order() const { return m_.rows(); }

  const Scalar& operator()(Eigen::Index i, Eigen::Index j) const {
    return m_(i, j);
  }

  const DenseMatrix<Scalar>& square() const { return m_; }

  /// True iff no off-diagonal zeros: the matrix is a genuine metric.
  bool proper() const {
    for (Eigen::Index i = 0; i < order(); ++i)
      for (Eigen::Index j = i + 1; j < order(); ++j)
        if (!(m_(i, j) > 0)) return false;
    return true;
  }

  Scalar diameter() const {
    Scalar d(0);
    for (Eigen::Index i = 0; i < order(); ++i)
      for (Eigen::Index j = i + 1; j < order(); ++j)
        if (m_(i, j) > d) d = m_(i, j);
    return d;
  }

  /// Packed strict upper triangle in column-block order; the serialization
  /// order of the JSON "upper" field.
  std::vector<Scalar> upper() const {
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(order()) * (order() - 1) / 2);
    for (Eigen::Index j = 1; j < order(); ++j)
      for (Eigen::Index i = 0; i < j; ++i) out.push_back(m_(i, j));
    return out;
  }

  /// Distances from point j (0-based) to points 0..j-1: the admissible
  /// vector that attached point j to the leading corner.
  DenseVector<Scalar> column_prefix(Eigen::Index j) const {
    DenseVector<Scalar> v(j);
    for (Eigen::Index i = 0; i < j; ++i) v(i) = m_(i, j);
    return v;
  }

  bool operator==(const DistanceMatrix& other) const {
    return m_.rows() == other.m_.rows() && m_ == other.m_;
  }

 private:
  explicit DistanceMatrix(DenseMatrix<Scalar> m) : m_(std::move(m)) {}

  // The strict upper triangle is authoritative; mirror it below.
  static void symmetrize(DenseMatrix<Scalar>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, i) = Scalar(0);
      for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
    }
  }

  DenseMatrix<Scalar> m_;
};

using DistanceMatrixD = DistanceMatrix<double>;
using DistanceMatrixQ = DistanceMatrix<Rational>;

/// Leading principal n-by-n submatrix (the NW-corner projection).
template <typename Scalar>
DistanceMatrix<Scalar> nw_corner(const DistanceMatrix<Scalar>& r,
                                 Eigen::Index n) {
  if (n < 1 || n > r.order())
    throw std::out_of_range("nw_corner size " + std::to_string(n) +
                            " out of range for order " +
                            std::to_string(r.order()));
  return DistanceMatrix<Scalar>::unchecked(r.square().topLeftCorner(n, n));
}

/// Drops the first row and column.
template <typename Scalar>
DistanceMatrix<Scalar> nw_shift(const DistanceMatrix<Scalar>& r) {
  if (r.order() < 2) throw std::out_of_range("nw_shift requires order >= 2");
  const Eigen::Index n = r.order() - 1;
  return DistanceMatrix<Scalar>::unchecked(r.square().bottomRightCorner(n, n));
}

/// A permutation of {0..n-1} as its image table: g[i] is where i maps from,
/// i.e. permute(r, g)(i, j) = r(g(i), g(j)).
using Permutation = std::vector<Eigen::Index>;

inline void check_permutation(const Permutation& g, Eigen::Index n) {
  if (static_cast<Eigen::Index>(g.size()) != n)
    throw std::invalid_argument("permutation length mismatch");
  std::vector<bool> seen(g.size(), false);
  for (Eigen::Index v : g) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("not a bijection on {1..n}");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

inline Permutation identity_permutation(Eigen::Index n) {
  Permutation g(static_cast<std::size_t>(n));
  std::iota(g.begin(), g.end(), Eigen::Index{0});
  return g;
}

inline Permutation inverse(const Permutation& g) {
  Permutation inv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    inv[static_cast<std::size_t>(g[i])] = static_cast<Eigen::Index>(i);
  return inv;
}

/// Composition in action order: permute(r, compose(g, h)) equals
/// permute(permute(r, h), g).
inline Permutation compose(const Permutation& g, const Permutation& h) {
  if (g.size() != h.size())
    throw std::invalid_argument("permutation size mismatch");
  Permutation out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = h[static_cast<std::size_t>(g[i])];
  return out;
}

/// Simultaneous row/column relabeling: result(i, j) = r(g(i), g(j)).
template <typename Scalar>
DistanceMatrix<Scalar> permute(const DistanceMatrix<Scalar>& r,
                               const Permutation& g) {
  check_permutation(g, r.order());
  DenseMatrix<Scalar> out(r.order(), r.order());
  for (Eigen::Index i = 0; i < r.order(); ++i)
    for (Eigen::Index j = 0; j < r.order(); ++j) out(i, j) = r(g[i], g[j]);
  return DistanceMatrix<Scalar>::unchecked(std::move(out));
}

/// Coordinate action matching `permute`: if a is admissible for r then
/// permute_vector(a, g) is admissible for permute(r, g).
template <typename Scalar>
DenseVector<Scalar> permute_vector(const DenseVector<Scalar>& a,
                                   const Permutation& g) {
  check_permutation(g, a.size());
  DenseVector<Scalar> out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out(i) = a(g[i]);
  return out;
}

}  // namespace distcone

#endif  // DISTCONE_DISTANCE_MATRIX_HPP
