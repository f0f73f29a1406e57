#include "cellforest/chain_complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace cellforest {

namespace {

void check_boundary_square_zero(const std::vector<Index>& counts,
                                const std::vector<IncidenceMatrix>& boundaries) {
    const int top = static_cast<int>(counts.size()) - 1;
    for (int k = 1; k + 1 <= top; ++k) {
        const IncidenceMatrix& dk = boundaries[static_cast<size_t>(k - 1)];
        const IncidenceMatrix& dk1 = boundaries[static_cast<size_t>(k)];
        for (Index col = 0; col < dk1.outerSize(); ++col) {
            std::map<Index, Integer> acc;
            for (IncidenceMatrix::InnerIterator it(dk1, col); it; ++it)
                for (IncidenceMatrix::InnerIterator jt(dk, it.row()); jt; ++jt)
                    acc[jt.row()] += Integer(jt.value()) * Integer(it.value());
            for (const auto& [row, val] : acc)
                if (val != 0) {
                    std::ostringstream msg;
                    msg << "boundary of boundary is nonzero: d_" << k << " d_" << (k + 1)
                        << " at column " << col << " (k=" << (k + 1) << ")";
                    throw ComplexError(msg.str());
                }
        }
    }
}

}  // namespace

ChainComplex::ChainComplex(std::vector<Index> cell_counts,
                           std::vector<IncidenceMatrix> boundaries,
                           std::vector<std::vector<std::string>> labels)
    : cell_counts_(std::move(cell_counts)),
      boundaries_(std::move(boundaries)),
      labels_(std::move(labels)) {
    if (cell_counts_.empty()) throw ComplexError("complex has no dimensions");
    if (cell_counts_[0] <= 0) throw ComplexError("complex is empty (no 0-cells)");
    for (Index c : cell_counts_)
        if (c < 0) throw ComplexError("negative cell count");
    if (boundaries_.size() + 1 != cell_counts_.size())
        throw ComplexError("boundary count does not match top dimension");
    for (size_t k = 0; k < boundaries_.size(); ++k) {
        const IncidenceMatrix& b = boundaries_[k];
        if (b.rows() != cell_counts_[k] || b.cols() != cell_counts_[k + 1]) {
            std::ostringstream msg;
            msg << "boundary d_" << (k + 1) << " has shape " << b.rows() << "x" << b.cols()
                << ", expected " << cell_counts_[k] << "x" << cell_counts_[k + 1];
            throw ComplexError(msg.str());
        }
    }
    if (!labels_.empty() && labels_.size() != cell_counts_.size())
        throw ComplexError("label table does not match dimensions");
    for (size_t d = 0; d < labels_.size(); ++d)
        if (!labels_[d].empty() &&
            static_cast<Index>(labels_[d].size()) != cell_counts_[d])
            throw ComplexError("label count does not match cell count");
    check_boundary_square_zero(cell_counts_, boundaries_);
}

const IncidenceMatrix& ChainComplex::boundary(int k) const {
    if (k < 1 || k > top_dim())
        throw std::invalid_argument("boundary: degree out of range");
    return boundaries_[static_cast<size_t>(k - 1)];
}

IntMatrix ChainComplex::boundary_dense(int k) const {
    if (k < 1 || k > top_dim())
        return IntMatrix::Zero(cell_count(k - 1), cell_count(k));
    return int_matrix_from_sparse(boundaries_[static_cast<size_t>(k - 1)]);
}

bool ChainComplex::has_labels(int dim) const {
    return dim >= 0 && static_cast<size_t>(dim) < labels_.size() &&
           !labels_[static_cast<size_t>(dim)].empty();
}

const std::string& ChainComplex::label(int dim, Index i) const {
    static const std::string none;
    if (!has_labels(dim)) return none;
    return labels_[static_cast<size_t>(dim)][static_cast<size_t>(i)];
}

bool ChainComplex::operator==(const ChainComplex& other) const {
    if (cell_counts_ != other.cell_counts_) return false;
    for (size_t k = 0; k < boundaries_.size(); ++k) {
        IncidenceMatrix diff = boundaries_[k] - other.boundaries_[k];
        diff.prune(static_cast<std::int64_t>(0));
        if (diff.nonZeros() != 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Simplex skeleton

namespace {

std::vector<std::vector<int>> sorted_subsets(int n, int size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(size));
    std::iota(cur.begin(), cur.end(), 0);
    if (size > n) return out;
    while (true) {
        out.push_back(cur);
        int i = size - 1;
        while (i >= 0 && cur[static_cast<size_t>(i)] == n - size + i) --i;
        if (i < 0) break;
        ++cur[static_cast<size_t>(i)];
        for (int j = i + 1; j < size; ++j)
            cur[static_cast<size_t>(j)] = cur[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
}

std::string tuple_label(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

ChainComplex build_simplex_skeleton(int n, int k_max) {
    if (n < 1) throw std::invalid_argument("build_simplex_skeleton: need n >= 1");
    if (k_max < 0) throw std::invalid_argument("build_simplex_skeleton: need k_max >= 0");
    if (k_max >= n)
        throw std::invalid_argument("build_simplex_skeleton: k_max must be at most n-1");

    std::vector<std::vector<std::vector<int>>> cells;  // per dim: sorted tuples
    for (int j = 0; j <= k_max; ++j) cells.push_back(sorted_subsets(n, j + 1));

    std::vector<Index> counts;
    std::vector<std::vector<std::string>> labels;
    for (const auto& dim_cells : cells) {
        counts.push_back(static_cast<Index>(dim_cells.size()));
        std::vector<std::string> l;
        l.reserve(dim_cells.size());
        for (const auto& t : dim_cells) l.push_back(tuple_label(t));
        labels.push_back(std::move(l));
    }

    std::vector<IncidenceMatrix> boundaries;
    for (int k = 1; k <= k_max; ++k) {
        const auto& faces = cells[static_cast<size_t>(k - 1)];
        const auto& tops = cells[static_cast<size_t>(k)];
        std::map<std::vector<int>, Index> face_index;
        for (size_t i = 0; i < faces.size(); ++i)
            face_index[faces[i]] = static_cast<Index>(i);
        std::vector<Eigen::Triplet<std::int64_t>> trips;
        for (size_t c = 0; c < tops.size(); ++c) {
            const auto& t = tops[c];
            std::vector<int> face(t.size() - 1);
            for (size_t drop = 0; drop < t.size(); ++drop) {
                size_t w = 0;
                for (size_t i = 0; i < t.size(); ++i)
                    if (i != drop) face[w++] = t[i];
                std::int64_t sign = (drop % 2 == 0) ? 1 : -1;
                trips.emplace_back(face_index.at(face), static_cast<Index>(c), sign);
            }
        }
        IncidenceMatrix b(counts[static_cast<size_t>(k - 1)], counts[static_cast<size_t>(k)]);
        b.setFromTriplets(trips.begin(), trips.end());
        boundaries.push_back(std::move(b));
    }
    return ChainComplex(std::move(counts), std::move(boundaries), std::move(labels));
}

// ---------------------------------------------------------------------------
// Cubical torus

TorusCellIndexer::TorusCellIndexer(int d_, int n_) : d(d_), n(n_) {}

Index TorusCellIndexer::base_rank(const std::vector<int>& coords) const {
    Index r = 0;
    for (int c : coords) r = r * n + ((c % n) + n) % n;
    return r;
}

std::vector<int> TorusCellIndexer::base_unrank(Index r) const {
    std::vector<int> coords(static_cast<size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
        coords[static_cast<size_t>(i)] = static_cast<int>(r % n);
        r /= n;
    }
    return coords;
}

namespace {

Index binom(int a, int b) {
    if (b < 0 || b > a) return 0;
    Index r = 1;
    for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
    return r;
}

}  // namespace

Index TorusCellIndexer::dir_count(int k) const { return binom(d, k); }

Index TorusCellIndexer::dir_rank(int k, const std::vector<int>& dirs) const {
    // rank of a sorted k-subset of {0..d-1} in lex order
    Index r = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < dirs[static_cast<size_t>(i)]; ++v)
            r += binom(d - 1 - v, k - 1 - i);
        prev = dirs[static_cast<size_t>(i)];
    }
    return r;
}

Index TorusCellIndexer::cell_index(int k, const std::vector<int>& coords,
                                   const std::vector<int>& dirs) const {
    return base_rank(coords) * dir_count(k) + dir_rank(k, dirs);
}

ChainComplex build_cubical_torus(int d, int n) {
    if (d < 1) throw std::invalid_argument("build_cubical_torus: need d >= 1");
    if (n < 2) throw std::invalid_argument("build_cubical_torus: need n >= 2");

    TorusCellIndexer ix(d, n);
    Index bases = 1;
    for (int i = 0; i < d; ++i) bases *= n;

    std::vector<std::vector<std::vector<int>>> dirsets(static_cast<size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) dirsets[static_cast<size_t>(k)] = sorted_subsets(d, k);

    std::vector<Index> counts;
    std::vector<std::vector<std::string>> labels;
    for (int k = 0; k <= d; ++k) {
        counts.push_back(bases * static_cast<Index>(dirsets[static_cast<size_t>(k)].size()));
        labels.emplace_back();
    }
    for (int k = 0; k <= d; ++k) {
        auto& l = labels[static_cast<size_t>(k)];
        l.reserve(static_cast<size_t>(counts[static_cast<size_t>(k)]));
        for (Index b = 0; b < bases; ++b) {
            auto coords = ix.base_unrank(b);
            for (const auto& dirs : dirsets[static_cast<size_t>(k)]) {
                std::string s = "c";
                for (size_t i = 0; i < coords.size(); ++i)
                    s += (i ? "," : "(") + std::to_string(coords[i]);
                s += ")";
                if (!dirs.empty()) {
                    s += "+";
                    for (size_t i = 0; i < dirs.size(); ++i)
                        s += (i ? "," : "") + std::to_string(dirs[i]);
                }
                l.push_back(std::move(s));
            }
        }
    }

    std::vector<IncidenceMatrix> boundaries;
    for (int k = 1; k <= d; ++k) {
        std::vector<Eigen::Triplet<std::int64_t>> trips;
        const auto& dsets = dirsets[static_cast<size_t>(k)];
        for (Index b = 0; b < bases; ++b) {
            auto coords = ix.base_unrank(b);
            for (const auto& dirs : dsets) {
                Index cell = ix.cell_index(k, coords, dirs);
                // face in slot j: drop direction dirs[j]; sign alternates,
                // top face (base shifted by e_dir) opposite to bottom face.
                for (size_t j = 0; j < dirs.size(); ++j) {
                    std::vector<int> fdirs;
                    fdirs.reserve(dirs.size() - 1);
                    for (size_t i = 0; i < dirs.size(); ++i)
                        if (i != j) fdirs.push_back(dirs[i]);
                    std::int64_t sign = (j % 2 == 0) ? 1 : -1;
                    std::vector<int> top = coords;
                    top[static_cast<size_t>(dirs[j])] =
                        (top[static_cast<size_t>(dirs[j])] + 1) % n;
                    trips.emplace_back(ix.cell_index(k - 1, top, fdirs), cell, sign);
                    trips.emplace_back(ix.cell_index(k - 1, coords, fdirs), cell, -sign);
                }
            }
        }
        IncidenceMatrix bnd(counts[static_cast<size_t>(k - 1)], counts[static_cast<size_t>(k)]);
        bnd.setFromTriplets(trips.begin(), trips.end());
        boundaries.push_back(std::move(bnd));
    }
    return ChainComplex(std::move(counts), std::move(boundaries), std::move(labels));
}

// ---------------------------------------------------------------------------
// Restriction and regions

ChainComplex restrict_to_cells(const ChainComplex& x, int k, const std::vector<Index>& t) {
    if (k < 1 || k > x.top_dim())
        throw std::invalid_argument("restrict_to_cells: degree out of range");
    std::vector<Index> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("restrict_to_cells: duplicate cell index");
    for (Index i : sorted)
        if (i < 0 || i >= x.cell_count(k))
            throw std::invalid_argument("restrict_to_cells: cell index out of range");

    std::vector<Index> counts;
    std::vector<IncidenceMatrix> boundaries;
    std::vector<std::vector<std::string>> labels;
    for (int j = 0; j < k; ++j) {
        counts.push_back(x.cell_count(j));
        if (j >= 1) boundaries.push_back(x.boundary(j));
        labels.push_back(x.has_labels(j)
                             ? x.labels()[static_cast<size_t>(j)]
                             : std::vector<std::string>{});
    }
    counts.push_back(static_cast<Index>(sorted.size()));
    const IncidenceMatrix& dk = x.boundary(k);
    IncidenceMatrix sub(dk.rows(), static_cast<Index>(sorted.size()));
    std::vector<Eigen::Triplet<std::int64_t>> trips;
    for (size_t c = 0; c < sorted.size(); ++c)
        for (IncidenceMatrix::InnerIterator it(dk, sorted[c]); it; ++it)
            trips.emplace_back(it.row(), static_cast<Index>(c), it.value());
    sub.setFromTriplets(trips.begin(), trips.end());
    boundaries.push_back(std::move(sub));
    std::vector<std::string> klabels;
    if (x.has_labels(k))
        for (Index i : sorted) klabels.push_back(x.label(k, i));
    labels.push_back(std::move(klabels));

    bool any_labels = false;
    for (const auto& l : labels) any_labels = any_labels || !l.empty();
    if (!any_labels) labels.clear();
    return ChainComplex(std::move(counts), std::move(boundaries), std::move(labels));
}

const std::vector<Index> RegionSelection::empty_{};

RegionSelection RegionSelection::full(const ChainComplex& x) {
    RegionSelection r;
    for (int j = 0; j <= x.top_dim(); ++j) {
        std::vector<Index> all(static_cast<size_t>(x.cell_count(j)));
        std::iota(all.begin(), all.end(), Index(0));
        r.cells_.push_back(std::move(all));
    }
    return r;
}

RegionSelection RegionSelection::from_cells(const ChainComplex& x,
                                            std::vector<std::vector<Index>> cells) {
    RegionSelection r;
    cells.resize(static_cast<size_t>(x.top_dim()) + 1);
    for (size_t j = 0; j < cells.size(); ++j) {
        std::sort(cells[j].begin(), cells[j].end());
        cells[j].erase(std::unique(cells[j].begin(), cells[j].end()), cells[j].end());
        for (Index i : cells[j])
            if (i < 0 || i >= x.cell_count(static_cast<int>(j)))
                throw std::invalid_argument("RegionSelection: cell index out of range");
    }
    r.cells_ = std::move(cells);
    // closure: every face of a selected cell must be selected
    for (int k = 1; k <= x.top_dim(); ++k) {
        const IncidenceMatrix& dk = x.boundary(k);
        for (Index c : r.cells_[static_cast<size_t>(k)])
            for (IncidenceMatrix::InnerIterator it(dk, c); it; ++it)
                if (it.value() != 0 && !r.contains(k - 1, it.row()))
                    throw std::invalid_argument(
                        "RegionSelection: not a subcomplex (missing face of a selected cell)");
    }
    return r;
}

const std::vector<Index>& RegionSelection::cells(int dim) const {
    if (dim < 0 || static_cast<size_t>(dim) >= cells_.size()) return empty_;
    return cells_[static_cast<size_t>(dim)];
}

bool RegionSelection::contains(int dim, Index i) const {
    const auto& c = cells(dim);
    return std::binary_search(c.begin(), c.end(), i);
}

bool RegionSelection::is_full(const ChainComplex& x) const {
    for (int j = 0; j <= x.top_dim(); ++j)
        if (static_cast<Index>(cells(j).size()) != x.cell_count(j)) return false;
    return true;
}

RegionSelection torus_box_region(const ChainComplex& x, int d, int n,
                                 const std::vector<int>& corner,
                                 const std::vector<int>& size) {
    if (static_cast<int>(corner.size()) != d || static_cast<int>(size.size()) != d)
        throw std::invalid_argument("torus_box_region: corner/size dimension mismatch");
    for (int s : size)
        if (s < 1 || s > n) throw std::invalid_argument("torus_box_region: bad box size");
    TorusCellIndexer ix(d, n);
    std::vector<std::vector<Index>> cells(static_cast<size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        auto dsets = sorted_subsets(d, k);
        Index bases = 1;
        for (int i = 0; i < d; ++i) bases *= n;
        for (Index b = 0; b < bases; ++b) {
            auto coords = ix.base_unrank(b);
            for (const auto& dirs : dsets) {
                bool inside = true;
                for (int i = 0; i < d && inside; ++i) {
                    int off = ((coords[static_cast<size_t>(i)] - corner[static_cast<size_t>(i)]) % n + n) % n;
                    int extent = std::count(dirs.begin(), dirs.end(), i) ? 1 : 0;
                    inside = off + extent <= size[static_cast<size_t>(i)] - 1;
                }
                if (inside)
                    cells[static_cast<size_t>(k)].push_back(ix.cell_index(k, coords, dirs));
            }
        }
    }
    return RegionSelection::from_cells(x, std::move(cells));
}

std::pair<std::vector<Index>, std::vector<Index>>
interior_and_boundary(const ChainComplex& x, const RegionSelection& a, int k) {
    std::vector<Index> interior, boundary;
    if (k < 0 || k > x.top_dim()) return {interior, boundary};
    if (k == x.top_dim()) return {a.cells(k), boundary};
    // incidence of k-cells with (k+1)-cells via rows of d_{k+1}
    const IncidenceMatrix& up = x.boundary(k + 1);
    IncidenceMatrix up_t = up.transpose();  // rows become columns
    for (Index c : a.cells(k)) {
        bool inside = true;
        for (IncidenceMatrix::InnerIterator it(up_t, c); it && inside; ++it)
            if (it.value() != 0 && !a.contains(k + 1, it.row())) inside = false;
        (inside ? interior : boundary).push_back(c);
    }
    return {interior, boundary};
}

// ---------------------------------------------------------------------------
// Dual torus

DualTorusMap dual_torus_map(const ChainComplex& x) {
    // recover n and verify x really is the canonical 2-torus
    Index f0 = x.cell_count(0);
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(f0))));
    if (x.top_dim() != 2 || static_cast<Index>(n) * n != f0 || n < 2 ||
        !(x == build_cubical_torus(2, n)))
        throw std::invalid_argument("dual_torus_map: input is not a cubical 2-torus");

    TorusCellIndexer ix(2, n);
    auto wrap = [n](int v) { return ((v % n) + n) % n; };
    auto vertex = [&](int a, int b) { return ix.cell_index(0, {wrap(a), wrap(b)}, {}); };
    auto edge = [&](int a, int b, int dir) {
        return ix.cell_index(1, {wrap(a), wrap(b)}, {dir});
    };
    auto square = [&](int a, int b) { return ix.cell_index(2, {wrap(a), wrap(b)}, {0, 1}); };

    // Dual complex: same cell sets, direction-0 edges flipped so that the
    // coboundary matrices match the primal boundary matrices under phi.
    Index f1 = x.cell_count(1), f2 = x.cell_count(2);
    std::vector<Eigen::Triplet<std::int64_t>> d1, d2;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            // flipped: runs from (a+1,b) to (a,b)
            d1.emplace_back(vertex(a, b), edge(a, b, 0), 1);
            d1.emplace_back(vertex(a + 1, b), edge(a, b, 0), -1);
            // standard: runs from (a,b) to (a,b+1)
            d1.emplace_back(vertex(a, b + 1), edge(a, b, 1), 1);
            d1.emplace_back(vertex(a, b), edge(a, b, 1), -1);
            // square boundary in terms of the flipped edge basis
            d2.emplace_back(edge(a, b, 0), square(a, b), -1);
            d2.emplace_back(edge(a, b + 1, 0), square(a, b), 1);
            d2.emplace_back(edge(a + 1, b, 1), square(a, b), 1);
            d2.emplace_back(edge(a, b, 1), square(a, b), -1);
        }
    IncidenceMatrix b1(f0, f1), b2(f1, f2);
    b1.setFromTriplets(d1.begin(), d1.end());
    b2.setFromTriplets(d2.begin(), d2.end());

    DualTorusMap out{ChainComplex({f0, f1, f2}, {std::move(b1), std::move(b2)}), {}};

    out.phi[0].resize(static_cast<size_t>(f0));
    out.phi[1].resize(static_cast<size_t>(f1));
    out.phi[2].resize(static_cast<size_t>(f2));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            // dual vertex of a square is indexed by the square's base point
            out.phi[2][static_cast<size_t>(square(a, b))] = vertex(a, b);
            out.phi[0][static_cast<size_t>(vertex(a, b))] = square(a - 1, b - 1);
            // an edge maps to the edge crossing it
            out.phi[1][static_cast<size_t>(edge(a, b, 0))] = edge(a, b - 1, 1);
            out.phi[1][static_cast<size_t>(edge(a, b, 1))] = edge(a - 1, b, 0);
        }
    return out;
}

}  // namespace cellforest
