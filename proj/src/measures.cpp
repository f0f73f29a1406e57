#include "cellforest/measures.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cellforest {

namespace {

// Deterministic small-integer test vectors for the idempotency spot check.
RatVector probe_vector(Index size, std::uint64_t salt) {
    RatVector v(size);
    std::uint64_t s = salt * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull;
    for (Index i = 0; i < size; ++i) {
        s ^= s >> 27;
        s *= 0x3C79AC492BA7B653ull;
        s ^= s >> 33;
        v[i] = Rational(static_cast<int>(s % 7) - 3);
        s += 0x9E3779B97F4A7C15ull;
    }
    return v;
}

Eigen::MatrixXd to_fp(const RatMatrix& q) {
    Eigen::MatrixXd out(q.rows(), q.cols());
    for (Index i = 0; i < q.rows(); ++i)
        for (Index j = 0; j < q.cols(); ++j) out(i, j) = to_double(q(i, j));
    return out;
}

std::vector<Index> identity_ground(Index n) {
    std::vector<Index> g(static_cast<size_t>(n));
    std::iota(g.begin(), g.end(), Index(0));
    return g;
}

MatroidalMeasure finish_measure(const ChainComplex& x, int k, Side side,
                                std::optional<RegionSelection> region,
                                std::vector<Index> ground, RatMatrix q, std::string id) {
    MatroidalMeasure m;
    m.kernel = make_projection_kernel(std::move(q));
    m.complex = std::make_shared<ChainComplex>(x);
    m.degree = k;
    m.side = side;
    m.region = std::move(region);
    m.ground_cells = std::move(ground);
    m.kernel_fp = to_fp(m.kernel.q);
    m.id = std::move(id);
    return m;
}

std::string measure_tag(int k, Side side, bool interior) {
    std::ostringstream s;
    s << (side == Side::lower ? "lower" : "upper") << " k=" << k
      << (interior ? " interior" : " full");
    return s.str();
}

}  // namespace

ProjectionKernel make_projection_kernel(RatMatrix q) {
    if (q.rows() != q.cols()) throw std::invalid_argument("projection kernel must be square");
    Rational trace(0);
    for (Index i = 0; i < q.rows(); ++i) {
        trace += q(i, i);
        for (Index j = i + 1; j < q.cols(); ++j)
            if (q(i, j) != q(j, i))
                throw std::invalid_argument("projection kernel must be symmetric");
    }
    if (denominator(trace) != 1 || trace < 0)
        throw std::invalid_argument("projection kernel trace is not a nonnegative integer");
    for (std::uint64_t salt : {1ull, 2ull}) {
        RatVector v = probe_vector(q.rows(), salt);
        RatVector qv = q * v;
        RatVector qqv = q * qv;
        for (Index i = 0; i < q.rows(); ++i)
            if (qv[i] != qqv[i])
                throw std::invalid_argument("projection kernel is not idempotent");
    }
    ProjectionKernel k;
    k.rank = static_cast<Index>(numerator(trace).convert_to<long long>());
    k.q = std::move(q);
    return k;
}

Index MatroidalMeasure::kernel_index(Index cell) const {
    auto it = std::lower_bound(ground_cells.begin(), ground_cells.end(), cell);
    if (it == ground_cells.end() || *it != cell) return -1;
    return static_cast<Index>(it - ground_cells.begin());
}

MatroidalMeasure matroidal_kernel(const ChainComplex& x, int k, Side side) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("matroidal_kernel: degree out of range");
    const Index e = x.cell_count(k);
    RatMatrix q;
    if (side == Side::lower) {
        q = row_space_projection(x.boundary_dense(k));
    } else {
        IntMatrix up_t = x.boundary_dense(k + 1).transpose();
        q = RatMatrix(RatMatrix::Identity(e, e) - row_space_projection(up_t));
    }
    return finish_measure(x, k, side, std::nullopt, identity_ground(e), std::move(q),
                          measure_tag(k, side, false));
}

MatroidalMeasure matroidal_kernel(const ChainComplex& x, int k, Side side,
                                  const RegionSelection& region) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("matroidal_kernel: degree out of range");
    if (region.is_full(x)) {
        MatroidalMeasure m = matroidal_kernel(x, k, side);
        m.region = region;
        return m;
    }
    std::vector<Index> ground = region.cells(k);
    const Index e = static_cast<Index>(ground.size());
    RatMatrix q;
    if (side == Side::lower) {
        auto [interior, bnd] = interior_and_boundary(x, region, k - 1);
        (void)bnd;
        IntMatrix dk = x.boundary_dense(k);
        IntMatrix sub(static_cast<Index>(interior.size()), e);
        for (Index i = 0; i < sub.rows(); ++i)
            for (Index j = 0; j < e; ++j) sub(i, j) = dk(interior[static_cast<size_t>(i)], ground[static_cast<size_t>(j)]);
        q = row_space_projection(sub);
    } else {
        auto [interior, bnd] = interior_and_boundary(x, region, k);
        (void)bnd;
        const std::vector<Index>& above = region.cells(k + 1);
        IntMatrix dk1 = x.boundary_dense(k + 1);
        // coboundary restricted to interior k-cells, landing in C^{k+1}(A)
        IntMatrix delta(static_cast<Index>(above.size()), static_cast<Index>(interior.size()));
        for (Index r = 0; r < delta.rows(); ++r)
            for (Index c = 0; c < delta.cols(); ++c)
                delta(r, c) = dk1(interior[static_cast<size_t>(c)], above[static_cast<size_t>(r)]);
        RatMatrix z = nullspace_basis(delta.cast<Rational>());
        RatMatrix embedded = RatMatrix::Zero(e, z.cols());
        for (Index c = 0; c < z.cols(); ++c)
            for (Index r = 0; r < z.rows(); ++r) {
                Index cell = interior[static_cast<size_t>(r)];
                Index pos = static_cast<Index>(
                    std::lower_bound(ground.begin(), ground.end(), cell) - ground.begin());
                embedded(pos, c) = z(r, c);
            }
        q = row_space_projection(RatMatrix(embedded.transpose()));
    }
    return finish_measure(x, k, side, region, std::move(ground), std::move(q),
                          measure_tag(k, side, true));
}

MatroidalMeasure measure_from_kernel(const ChainComplex& x, int k, ProjectionKernel kernel,
                                     std::string id) {
    if (kernel.ground_size() != x.cell_count(k))
        throw std::invalid_argument("measure_from_kernel: kernel size does not match cell count");
    MatroidalMeasure m;
    m.kernel = std::move(kernel);
    m.complex = std::make_shared<ChainComplex>(x);
    m.degree = k;
    m.ground_cells = identity_ground(m.kernel.ground_size());
    m.kernel_fp = to_fp(m.kernel.q);
    m.id = std::move(id);
    return m;
}

namespace {

std::vector<Index> to_kernel_indices(const MatroidalMeasure& m, const std::vector<Index>& cells) {
    std::vector<Index> out;
    out.reserve(cells.size());
    for (Index c : cells) {
        Index i = m.kernel_index(c);
        if (i < 0) throw std::invalid_argument("cell outside the measure's ground set");
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        throw std::invalid_argument("duplicate cell in subset");
    return out;
}

}  // namespace

Rational inclusion_probability(const MatroidalMeasure& m, const std::vector<Index>& d) {
    return principal_minor_det(m.kernel.q, to_kernel_indices(m, d));
}

Rational subset_probability(const MatroidalMeasure& m, const std::vector<Index>& t) {
    std::vector<Index> idx = to_kernel_indices(m, t);
    if (static_cast<Index>(idx.size()) != m.kernel.rank) return Rational(0);
    return principal_minor_det(m.kernel.q, idx);
}

Index betti_gap(const ChainComplex& x, int k) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("betti_gap: degree out of range");
    Index lower = rational_rank(x.boundary_dense(k));
    Index upper = x.cell_count(k) - rational_rank(x.boundary_dense(k + 1));
    return upper - lower;
}

MatroidalMeasure dual_complement_kernel(const MatroidalMeasure& m) {
    const Index e = m.ground_size();
    MatroidalMeasure out;
    out.kernel = make_projection_kernel(
        RatMatrix(RatMatrix::Identity(e, e) - m.kernel.q));
    out.complex = m.complex;
    out.degree = m.degree;
    out.side = m.side;
    out.complemented = !m.complemented;
    out.region = m.region;
    out.ground_cells = m.ground_cells;
    out.kernel_fp = to_fp(out.kernel.q);
    out.id = "complement(" + m.id + ")";
    return out;
}

MatroidalMeasure embed_in_ambient(const MatroidalMeasure& m) {
    const ChainComplex& x = *m.complex;
    const Index full = x.cell_count(m.degree);
    if (static_cast<Index>(m.ground_cells.size()) == full) return m;
    RatMatrix q = RatMatrix::Zero(full, full);
    for (size_t a = 0; a < m.ground_cells.size(); ++a)
        for (size_t b = 0; b < m.ground_cells.size(); ++b)
            q(m.ground_cells[a], m.ground_cells[b]) =
                m.kernel.q(static_cast<Index>(a), static_cast<Index>(b));
    MatroidalMeasure out;
    out.kernel = make_projection_kernel(std::move(q));
    out.complex = m.complex;
    out.degree = m.degree;
    out.side = m.side;
    out.complemented = m.complemented;
    out.region = m.region;
    out.ground_cells = identity_ground(full);
    out.kernel_fp = to_fp(out.kernel.q);
    out.id = "ambient(" + m.id + ")";
    return out;
}

}  // namespace cellforest
