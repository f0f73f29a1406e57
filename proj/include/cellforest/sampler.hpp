#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cellforest/measures.hpp"
#include "cellforest/rng.hpp"

namespace cellforest {

struct SampleOptions {
    double pivot_tol = 1e-9;
    std::uint64_t stream = 0;
};

struct SampleDraw {
    std::vector<Index> cells;  // k-cell indices of the complex, sorted
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string measure_id;
};

/// One exact-size draw by sequential conditioning: pick a cell proportional
/// to the residual kernel diagonal, then condition by the Schur-complement
/// update, rank times. Runs in double precision; a pivot below the tolerance
/// replays the conditioning exactly for that step and continues.
SampleDraw sample_once(const MatroidalMeasure& m, std::uint64_t seed,
                       const SampleOptions& opts = {});

/// Double-precision projection kernel for measures too large for exact
/// arithmetic (no exact fallback available).
struct FpProjection {
    Eigen::MatrixXd q;
    Index rank = 0;
};

/// Lower k=1 kernel of a complex whose d_1 is a graph incidence matrix,
/// computed in floating point (Cholesky of the reduced Laplacian).
FpProjection lower_kernel_fp_graph(const ChainComplex& x);

/// Low-level sampler over a double kernel; throws on pivot failure.
std::vector<Index> sample_projection_fp(const Eigen::MatrixXd& q, Index rank, CounterRng& rng,
                                        double pivot_tol);

struct EmpiricalReport {
    Index n_samples = 0;
    std::uint64_t seed = 0;
    std::string measure_id;
    std::vector<Index> ground_cells;
    std::vector<Index> cell_counts;
    std::vector<double> cell_frequency;
    std::vector<double> cell_stderr;
    bool subsets_tracked = false;
    std::map<std::vector<Index>, Index> subset_counts;

    std::string to_json() const;
    std::string to_csv() const;
};

/// n independent draws on counter-based substreams 0..n-1.
EmpiricalReport empirical_frequencies(const MatroidalMeasure& m, Index n_samples,
                                      std::uint64_t seed);

struct ForestStats {
    Index betti_km1 = 0;      // b_{k-1}(X_T intersected with A)
    Index boundary_size = 0;  // |bnd_{k-1}(A)|
    bool bound_holds = false;
    Index components = -1;     // connected components of the trace (k = 1)
    Index marked_degree = -1;  // draw cells incident to the marked vertex (k = 1)
};

ForestStats forest_statistics(const SampleDraw& draw, const ChainComplex& x,
                              const RegionSelection& a, int k, Index marked_vertex = 0);

}  // namespace cellforest
