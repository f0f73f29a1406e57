#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace cellforest {

// Plain-value (et_off) arbitrary-precision scalars: expression-template
// number types capture operands by reference, which is unsafe inside Eigen
// expressions.
using Integer =
    boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                  boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using Index = Eigen::Index;

using IntMatrix = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<Integer, Eigen::Dynamic, 1>;
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// Sparse storage for boundary matrices; incidence numbers fit in 64 bits.
using IncidenceMatrix = Eigen::SparseMatrix<std::int64_t>;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline Integer numerator(const Rational& x) { return boost::multiprecision::numerator(x); }
inline Integer denominator(const Rational& x) { return boost::multiprecision::denominator(x); }

/// Render as "p" or "p/q" with q > 0 and gcd(p, q) = 1.
inline std::string rational_to_string(const Rational& x) {
    Integer num = numerator(x);
    Integer den = denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Parse "p" or "p/q"; rejects q = 0 and trailing garbage.
inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational literal: '" + s + "'");
    }
}

inline IntMatrix int_matrix_from_sparse(const IncidenceMatrix& m) {
    IntMatrix out = IntMatrix::Zero(m.rows(), m.cols());
    for (Index c = 0; c < m.outerSize(); ++c)
        for (IncidenceMatrix::InnerIterator it(m, c); it; ++it)
            out(it.row(), it.col()) = Integer(it.value());
    return out;
}

inline RatMatrix rat_matrix_from_int(const IntMatrix& m) {
    return m.cast<Rational>();
}

}  // namespace cellforest
