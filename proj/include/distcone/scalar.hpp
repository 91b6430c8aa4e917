/**
 * Scalar domains for the library: IEEE doubles for sampling paths and
 * exact GMP rationals for polytope geometry. Matrices and vectors are
 * Eigen dense types templated on the scalar.
 */

#ifndef DISTCONE_SCALAR_HPP
#define DISTCONE_SCALAR_HPP

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <type_traits>

namespace distcone {

using Rational = boost::multiprecision::mpq_rational;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = DenseMatrix<double>;
using VectorXd = DenseVector<double>;
using MatrixXq = DenseMatrix<Rational>;
using VectorXq = DenseVector<Rational>;

template <typename Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

/// Exact conversion; every finite double is a dyadic rational.
inline Rational to_rational(double x) { return Rational(x); }

inline VectorXq to_rational(const VectorXd& v) {
  VectorXq out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = Rational(v(i));
  return out;
}

inline MatrixXq to_rational(const MatrixXd& m) {
  MatrixXq out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline VectorXd to_double(const VectorXq& v) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = to_double(v(i));
  return out;
}

/// Parses "p/q", "p", or a plain integer string into an exact rational.
inline Rational rational_from_string(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational literal: '" + s + "'");
  }
}

inline std::string rational_to_string(const Rational& q) { return q.str(); }

}  // namespace distcone

#endif  // DISTCONE_SCALAR_HPP
