#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <span>
#include <string>
#include <string_view>

namespace noma {

/// Exact rational number. Always kept in reduced form with a positive denominator.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer =
    boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorQ = Vec<Rational>;
using MatrixQ = Mat<Rational>;

/// Parses "p/q", an integer, or a decimal literal ("0.125", "-3e-2") exactly.
Rational parse_rational(std::string_view text);

/// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Exact value of the shortest decimal that round-trips to `value`, so 0.1 maps to 1/10.
Rational to_rational(double value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

VectorQ to_rational(const Eigen::VectorXd& values);
Eigen::VectorXd to_double(const VectorQ& values);

/// Least common multiple of the denominators.
Integer denominator_lcm(std::span<const Rational> values);

template <typename Scalar>
Scalar scalar_cast(const Rational& value) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return value;
  } else {
    return static_cast<Scalar>(to_double(value));
  }
}

template <typename Scalar>
double as_double(const Scalar& value) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return to_double(value);
  } else {
    return static_cast<double>(value);
  }
}

}  // namespace noma
