#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cellforest/chain_complex.hpp"
#include "cellforest/exact_linalg.hpp"

namespace cellforest {

/// Symmetric idempotent rational matrix over an ordered ground set.
struct ProjectionKernel {
    RatMatrix q;
    Index rank = 0;
    Index ground_size() const { return q.rows(); }
};

/// Validates symmetry, integer trace and (spot-checked) idempotency.
ProjectionKernel make_projection_kernel(RatMatrix q);

enum class Side { lower, upper };

/// A determinantal measure on subsets of the k-cells of a complex, given by
/// its projection kernel. The kernel is computed once at construction and
/// never recomputed. ground_cells maps kernel indices to k-cell indices of
/// the complex (the identity for full-region measures).
struct MatroidalMeasure {
    ProjectionKernel kernel;
    std::shared_ptr<const ChainComplex> complex;
    int degree = 0;
    Side side = Side::lower;
    bool complemented = false;
    std::optional<RegionSelection> region;
    std::vector<Index> ground_cells;
    Eigen::MatrixXd kernel_fp;  // double cast of the kernel, cached for sampling
    std::string id;

    Index ground_size() const { return kernel.ground_size(); }
    /// Kernel index of an X-cell, or -1 when outside the ground set.
    Index kernel_index(Index cell) const;
};

/// Lower measure: projection onto the row space of d_k (the coboundary space).
/// Upper measure: identity minus the projection onto the column space of
/// d_{k+1} (the cocycle space). Degenerate degrees follow the zero-map
/// conventions: k = 0 lower is the zero kernel, k = top upper the identity.
MatroidalMeasure matroidal_kernel(const ChainComplex& x, int k, Side side);

/// Interior-region variants over the ground set of all k-cells of A:
/// lower projects onto the image of the coboundary restricted to cochains
/// supported on interior (k-1)-cells; upper onto the kernel of the coboundary
/// on cochains supported on interior k-cells.
MatroidalMeasure matroidal_kernel(const ChainComplex& x, int k, Side side,
                                  const RegionSelection& region);

/// Wraps an externally built kernel (tests and tools).
MatroidalMeasure measure_from_kernel(const ChainComplex& x, int k, ProjectionKernel kernel,
                                     std::string id);

/// P[d subset of sample] = det [Q]_{d,d}; cells given as k-cell indices of x.
Rational inclusion_probability(const MatroidalMeasure& m, const std::vector<Index>& d);

/// det [Q]_{t,t} when |t| equals the kernel rank, otherwise exactly 0.
Rational subset_probability(const MatroidalMeasure& m, const std::vector<Index>& t);

/// dim H_k(X; Q) = rank(upper kernel) - rank(lower kernel).
Index betti_gap(const ChainComplex& x, int k);

/// Measure of complements: kernel I - Q on the same ground set.
MatroidalMeasure dual_complement_kernel(const MatroidalMeasure& m);

/// Re-index an interior-region measure on the full set of k-cells of x
/// (zero rows/columns off the region); full-region measures pass through.
MatroidalMeasure embed_in_ambient(const MatroidalMeasure& m);

}  // namespace cellforest
