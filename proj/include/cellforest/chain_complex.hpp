#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cellforest/numeric.hpp"

namespace cellforest {

/// A single oriented cell, addressed by dimension and position.
struct CellRef {
    int dim = 0;
    Index index = 0;
};

struct ComplexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A finite CW-complex given by integer boundary matrices. Immutable after
/// construction; boundary(k) has shape f_{k-1} x f_k and d d = 0 holds
/// exactly (checked on construction).
class ChainComplex {
  public:
    ChainComplex(std::vector<Index> cell_counts,
                 std::vector<IncidenceMatrix> boundaries,
                 std::vector<std::vector<std::string>> labels = {});

    int top_dim() const { return static_cast<int>(cell_counts_.size()) - 1; }

    /// Number of k-cells; zero outside [0, top_dim].
    Index cell_count(int k) const {
        if (k < 0 || k > top_dim()) return 0;
        return cell_counts_[static_cast<size_t>(k)];
    }

    /// Boundary map d_k for 1 <= k <= top_dim.
    const IncidenceMatrix& boundary(int k) const;

    /// Dense integer d_k; degenerate degrees give correctly shaped zero
    /// matrices (0 x f_0 for k = 0, f_top x 0 above the top).
    IntMatrix boundary_dense(int k) const;

    bool has_labels(int dim) const;
    const std::string& label(int dim, Index i) const;
    const std::vector<std::vector<std::string>>& labels() const { return labels_; }

    bool operator==(const ChainComplex& other) const;

  private:
    std::vector<Index> cell_counts_;
    std::vector<IncidenceMatrix> boundaries_;  // boundaries_[k-1] = d_k
    std::vector<std::vector<std::string>> labels_;
};

/// Skeleton of the (n-1)-simplex up to dimension k_max; j-cells are the
/// lexicographically ordered (j+1)-subsets of {0..n-1} with alternating-sum
/// boundary signs on sorted tuples.
ChainComplex build_simplex_skeleton(int n, int k_max);

/// n-periodic quotient of the unit-cube tiling of R^d. A k-cell is a pair
/// (base point in Z_n^d, set of k directions); cells are ordered base-major,
/// then by direction set.
ChainComplex build_cubical_torus(int d, int n);

/// Cubical torus cell bookkeeping shared by the builder and the dual map.
struct TorusCellIndexer {
    int d;
    int n;

    TorusCellIndexer(int d, int n);
    Index base_rank(const std::vector<int>& coords) const;
    std::vector<int> base_unrank(Index r) const;
    Index dir_count(int k) const;
    Index dir_rank(int k, const std::vector<int>& dirs) const;
    Index cell_index(int k, const std::vector<int>& coords, const std::vector<int>& dirs) const;
};

/// X_T: the chosen k-cells on top of the full (k-1)-skeleton of x.
ChainComplex restrict_to_cells(const ChainComplex& x, int k, const std::vector<Index>& t);

/// A subcomplex selection: per-dimension sorted cell index sets, closed under
/// taking faces.
class RegionSelection {
  public:
    static RegionSelection full(const ChainComplex& x);
    static RegionSelection from_cells(const ChainComplex& x,
                                      std::vector<std::vector<Index>> cells);

    const std::vector<Index>& cells(int dim) const;
    bool contains(int dim, Index i) const;
    bool is_full(const ChainComplex& x) const;

  private:
    RegionSelection() = default;
    std::vector<std::vector<Index>> cells_;
    static const std::vector<Index> empty_;
};

/// Sub-box of a cubical torus: all cells whose closed spans stay inside the
/// coordinate window corner + [0, size_i).
RegionSelection torus_box_region(const ChainComplex& x, int d, int n,
                                 const std::vector<int>& corner,
                                 const std::vector<int>& size);

/// Partition of the k-cells of A into (interior, boundary): a k-cell is
/// interior iff every (k+1)-cell of x incident to it lies in A.
std::pair<std::vector<Index>, std::vector<Index>>
interior_and_boundary(const ChainComplex& x, const RegionSelection& a, int k);

/// Dual cell structure of a 2-torus produced by build_cubical_torus(2, n):
/// the dual complex (an n x n torus with direction-0 edges oppositely
/// oriented) and bijections phi[k] from k-cells of x to (2-k)-cells of the
/// dual under which the coboundary matrices match the boundary matrices of x
/// up to one global sign per degree.
struct DualTorusMap {
    ChainComplex dual;
    std::array<std::vector<Index>, 3> phi;
};

DualTorusMap dual_torus_map(const ChainComplex& x);

}  // namespace cellforest
