#pragma once

#include <utility>
#include <vector>

#include "cellforest/numeric.hpp"

namespace cellforest {

/// Invariant factors d_1 | d_2 | ... | d_r of an integer matrix together with
/// the rational rank and the torsion order prod d_i.
struct TorsionReport {
    std::vector<Integer> invariant_factors;
    Index rank = 0;
    Integer torsion_order = 1;
};

/// Full Smith decomposition u * m * v = diag(factors, 0...) with u, v unimodular.
struct SmithDecomposition {
    TorsionReport report;
    IntMatrix u;
    IntMatrix v;
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
select_rows(const Eigen::MatrixBase<Derived>& m, const std::vector<Index>& rows) {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
        static_cast<Index>(rows.size()), m.cols());
    for (Index i = 0; i < out.rows(); ++i) out.row(i) = m.row(rows[i]);
    return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
select_columns(const Eigen::MatrixBase<Derived>& m, const std::vector<Index>& cols) {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
        m.rows(), static_cast<Index>(cols.size()));
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = m.col(cols[j]);
    return out;
}

/// Rank by exact fraction-free elimination.
Index rational_rank(const RatMatrix& m);
Index rational_rank(const IntMatrix& m);

/// Indices of the lexicographically first maximal independent row subset,
/// found by forward elimination with first-nonzero pivots.
std::vector<Index> independent_rows(const RatMatrix& m);
std::vector<Index> independent_rows(const IntMatrix& m);

/// Columns span ker m exactly; column count = cols - rank.
RatMatrix nullspace_basis(const RatMatrix& m);

/// Orthogonal projection Q onto the row space of m, computed as
/// A^T (A A^T)^{-1} A over a maximal independent row subset A.
/// Q = Q^T, Q Q = Q and trace Q = rank m hold exactly.
RatMatrix row_space_projection(const RatMatrix& m);
RatMatrix row_space_projection(const IntMatrix& m);

TorsionReport smith_normal_form(const IntMatrix& m);
SmithDecomposition smith_normal_form_with_transforms(const IntMatrix& m);

/// Basis of the (saturated) integer kernel lattice {x in Z^cols : m x = 0},
/// one column per basis vector.
IntMatrix integer_kernel_basis(const IntMatrix& m);

/// Basis of the saturation of the column lattice of m inside Z^rows,
/// i.e. of span_Q(columns) intersected with Z^rows.
IntMatrix saturation_basis(const IntMatrix& m);

Integer det(const IntMatrix& m);
Rational det(const RatMatrix& m);

/// det [q]_{d,d}; the empty minor is 1.
Rational principal_minor_det(const RatMatrix& q, const std::vector<Index>& d);

/// det(m m^T), exact.
Rational gram_det(const RatMatrix& m);
Integer gram_det(const IntMatrix& m);

/// Product of the nonzero eigenvalues of a symmetric integer matrix, read off
/// the characteristic polynomial's lowest nonzero coefficient.
Integer integer_pseudo_determinant(const IntMatrix& m);

/// Adjugate and determinant of a positive definite integer matrix via
/// fraction-free Gauss-Jordan; m^{-1} = adjugate / det.
std::pair<IntMatrix, Integer> adjugate_and_det_positive_definite(const IntMatrix& m);

/// Solve k x = g for x where the columns of k are independent; throws if g is
/// not in the column span or (when require_integral) x is not integral.
IntVector lattice_coordinates(const IntMatrix& k, const IntVector& g);

}  // namespace cellforest
