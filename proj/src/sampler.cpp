#include "cellforest/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cellforest {

namespace {

// Active residual kernel kept compacted in the top-left block so the
// Schur-complement update is a vectorized rank-1 operation.
struct CompactKernel {
    Eigen::MatrixXd q;
    std::vector<Index> slot_ground;  // slot -> ground index
    std::vector<Index> ground_slot;  // ground index -> slot, -1 once removed
    Index active = 0;

    void init(const Eigen::MatrixXd& full) {
        q = full;
        active = full.rows();
        slot_ground.resize(static_cast<size_t>(active));
        ground_slot.resize(static_cast<size_t>(active));
        std::iota(slot_ground.begin(), slot_ground.end(), Index(0));
        std::iota(ground_slot.begin(), ground_slot.end(), Index(0));
    }

    // Inverse-CDF selection over the residual diagonal, scanning ground
    // indices in canonical order. Returns the ground index, or -1.
    Index select(double u) const {
        double total = 0;
        for (Index g = 0; g < static_cast<Index>(ground_slot.size()); ++g) {
            Index s = ground_slot[static_cast<size_t>(g)];
            if (s >= 0) total += std::max(q(s, s), 0.0);
        }
        const double target = u * total;
        double acc = 0;
        Index last_positive = -1;
        for (Index g = 0; g < static_cast<Index>(ground_slot.size()); ++g) {
            Index s = ground_slot[static_cast<size_t>(g)];
            if (s < 0) continue;
            double w = std::max(q(s, s), 0.0);
            if (w > 0) last_positive = g;
            acc += w;
            if (acc > target && w > 0) return g;
        }
        return last_positive;
    }

    double pivot(Index ground) const {
        return q(ground_slot[static_cast<size_t>(ground)], ground_slot[static_cast<size_t>(ground)]);
    }

    // Condition on inclusion of the cell and drop it from the active block.
    void condition(Index ground) {
        const Index e = ground_slot[static_cast<size_t>(ground)];
        const Index last = active - 1;
        if (e != last) {
            q.block(e, 0, 1, active).swap(q.block(last, 0, 1, active));
            q.block(0, e, active, 1).swap(q.block(0, last, active, 1));
            std::swap(ground_slot[static_cast<size_t>(slot_ground[static_cast<size_t>(last)])],
                      ground_slot[static_cast<size_t>(ground)]);
            std::swap(slot_ground[static_cast<size_t>(e)], slot_ground[static_cast<size_t>(last)]);
        }
        const double p = q(last, last);
        auto col = q.col(last).head(last);
        auto row = q.row(last).head(last);
        q.topLeftCorner(last, last).noalias() -= (col / p) * row;
        ground_slot[static_cast<size_t>(ground)] = -1;
        active = last;
    }

    // Rebuild the active block from an exact residual kernel.
    void reload_exact(const RatMatrix& exact) {
        for (Index i = 0; i < active; ++i)
            for (Index j = 0; j < active; ++j)
                q(i, j) = to_double(exact(slot_ground[static_cast<size_t>(i)],
                                          slot_ground[static_cast<size_t>(j)]));
    }
};

Index select_exact(const RatMatrix& q, const std::vector<Index>& ground_slot,
                   const Rational& target) {
    Rational acc(0);
    for (Index g = 0; g < static_cast<Index>(ground_slot.size()); ++g) {
        if (ground_slot[static_cast<size_t>(g)] < 0) continue;
        const Rational& w = q(g, g);
        if (w < 0) throw std::logic_error("negative exact kernel diagonal");
        acc += w;
        if (acc > target && w != 0) return g;
    }
    throw std::logic_error("exact selection ran past the diagonal mass");
}

void schur_update_exact(RatMatrix& q, Index e) {
    const Rational p = q(e, e);
    RatVector col = q.col(e);
    RatVector row = q.row(e).transpose();
    for (Index f = 0; f < q.rows(); ++f) {
        if (col[f] == 0) continue;
        Rational c = col[f] / p;
        for (Index g = 0; g < q.cols(); ++g)
            if (row[g] != 0) q(f, g) -= c * row[g];
    }
}

}  // namespace

std::vector<Index> sample_projection_fp(const Eigen::MatrixXd& q_in, Index rank,
                                        CounterRng& rng, double pivot_tol) {
    CompactKernel state;
    state.init(q_in);
    std::vector<Index> picked;
    picked.reserve(static_cast<size_t>(rank));
    for (Index step = 0; step < rank; ++step) {
        double u = CounterRng::unit_from_bits(rng.next_unit_bits());
        Index g = state.select(u);
        if (g < 0 || state.pivot(g) < pivot_tol)
            throw std::runtime_error("sample_projection_fp: pivot below tolerance at step " +
                                     std::to_string(step));
        state.condition(g);
        picked.push_back(g);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

SampleDraw sample_once(const MatroidalMeasure& m, std::uint64_t seed, const SampleOptions& opts) {
    const Index rank = m.kernel.rank;
    CounterRng rng(seed, opts.stream);

    CompactKernel state;
    state.init(m.kernel_fp);
    std::vector<Index> picked;
    picked.reserve(static_cast<size_t>(rank));

    for (Index step = 0; step < rank; ++step) {
        const std::uint64_t bits = rng.next_unit_bits();
        Index g = state.select(CounterRng::unit_from_bits(bits));
        if (g >= 0 && state.pivot(g) >= opts.pivot_tol) {
            state.condition(g);
        } else {
            // Exact-rational fallback for this step: replay the conditioning
            // done so far on the exact kernel, select and condition exactly,
            // then continue in double precision.
            RatMatrix q_exact = m.kernel.q;
            for (Index prev : picked) schur_update_exact(q_exact, prev);
            Rational target =
                Rational(Integer(bits), Integer(1) << 53) * Rational(Integer(rank - step));
            g = select_exact(q_exact, state.ground_slot, target);
            schur_update_exact(q_exact, g);
            // compact away the chosen cell, then overwrite with exact values
            state.condition(g);
            state.reload_exact(q_exact);
        }
        picked.push_back(g);
    }

    SampleDraw draw;
    draw.cells.reserve(picked.size());
    for (Index i : picked) draw.cells.push_back(m.ground_cells[static_cast<size_t>(i)]);
    std::sort(draw.cells.begin(), draw.cells.end());
    draw.seed = seed;
    draw.stream = opts.stream;
    draw.measure_id = m.id;
    return draw;
}

FpProjection lower_kernel_fp_graph(const ChainComplex& x) {
    const IncidenceMatrix& d1 = x.boundary(1);
    const Index nv = x.cell_count(0), ne = x.cell_count(1);
    // structural check + component labelling
    std::vector<Index> parent(static_cast<size_t>(nv));
    std::iota(parent.begin(), parent.end(), Index(0));
    std::function<Index(Index)> find = [&](Index v) {
        while (parent[static_cast<size_t>(v)] != v) {
            parent[static_cast<size_t>(v)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            v = parent[static_cast<size_t>(v)];
        }
        return v;
    };
    for (Index e = 0; e < ne; ++e) {
        Index ends[2];
        std::int64_t vals[2];
        int cnt = 0;
        for (IncidenceMatrix::InnerIterator it(d1, e); it; ++it) {
            if (cnt >= 2)
                throw std::invalid_argument("lower_kernel_fp_graph: not an incidence matrix");
            ends[cnt] = it.row();
            vals[cnt] = it.value();
            ++cnt;
        }
        if (cnt == 2 && vals[0] + vals[1] == 0 && std::abs(vals[0]) == 1)
            parent[static_cast<size_t>(find(ends[0]))] = find(ends[1]);
        else if (cnt != 0)
            throw std::invalid_argument("lower_kernel_fp_graph: not an incidence matrix");
    }
    // drop one vertex per component; the remaining rows are independent
    std::vector<bool> keep(static_cast<size_t>(nv), true);
    std::vector<bool> root_handled(static_cast<size_t>(nv), false);
    for (Index v = 0; v < nv; ++v) {
        Index r = find(v);
        if (!root_handled[static_cast<size_t>(r)]) {
            root_handled[static_cast<size_t>(r)] = true;
            keep[static_cast<size_t>(v)] = false;
        }
    }
    std::vector<Index> rows;
    for (Index v = 0; v < nv; ++v)
        if (keep[static_cast<size_t>(v)]) rows.push_back(v);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Index>(rows.size()), ne);
    std::vector<Index> row_pos(static_cast<size_t>(nv), -1);
    for (size_t i = 0; i < rows.size(); ++i)
        row_pos[static_cast<size_t>(rows[i])] = static_cast<Index>(i);
    for (Index e = 0; e < ne; ++e)
        for (IncidenceMatrix::InnerIterator it(d1, e); it; ++it)
            if (row_pos[static_cast<size_t>(it.row())] >= 0)
                a(row_pos[static_cast<size_t>(it.row())], e) = static_cast<double>(it.value());

    Eigen::MatrixXd gram = a * a.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("lower_kernel_fp_graph: Cholesky failed");
    Eigen::MatrixXd solved = llt.solve(a);
    FpProjection out;
    out.q = a.transpose() * solved;
    out.rank = static_cast<Index>(rows.size());
    return out;
}

EmpiricalReport empirical_frequencies(const MatroidalMeasure& m, Index n_samples,
                                      std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("empirical_frequencies: need n >= 1");
    EmpiricalReport rep;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.measure_id = m.id;
    rep.ground_cells = m.ground_cells;
    rep.cell_counts.assign(m.ground_cells.size(), 0);
    rep.subsets_tracked = m.ground_size() <= 16;
    for (Index i = 0; i < n_samples; ++i) {
        SampleOptions opts;
        opts.stream = static_cast<std::uint64_t>(i);
        SampleDraw draw = sample_once(m, seed, opts);
        for (Index cell : draw.cells) {
            Index k = m.kernel_index(cell);
            rep.cell_counts[static_cast<size_t>(k)] += 1;
        }
        if (rep.subsets_tracked) rep.subset_counts[draw.cells] += 1;
    }
    rep.cell_frequency.resize(rep.cell_counts.size());
    rep.cell_stderr.resize(rep.cell_counts.size());
    for (size_t i = 0; i < rep.cell_counts.size(); ++i) {
        double p = static_cast<double>(rep.cell_counts[i]) / static_cast<double>(n_samples);
        rep.cell_frequency[i] = p;
        rep.cell_stderr[i] = std::sqrt(p * (1 - p) / static_cast<double>(n_samples));
    }
    return rep;
}

std::string EmpiricalReport::to_json() const {
    nlohmann::json j;
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["measure"] = measure_id;
    j["cells"] = nlohmann::json::array();
    for (size_t i = 0; i < ground_cells.size(); ++i) {
        j["cells"].push_back({{"cell", ground_cells[i]},
                              {"count", cell_counts[i]},
                              {"frequency", cell_frequency[i]},
                              {"stderr", cell_stderr[i]}});
    }
    if (subsets_tracked) {
        j["subsets"] = nlohmann::json::array();
        for (const auto& [cells, count] : subset_counts)
            j["subsets"].push_back({{"cells", cells}, {"count", count}});
    }
    return j.dump(2);
}

std::string EmpiricalReport::to_csv() const {
    std::ostringstream out;
    out << "cell,count,frequency,stderr\n";
    for (size_t i = 0; i < ground_cells.size(); ++i)
        out << ground_cells[i] << "," << cell_counts[i] << "," << cell_frequency[i] << ","
            << cell_stderr[i] << "\n";
    return out.str();
}

ForestStats forest_statistics(const SampleDraw& draw, const ChainComplex& x,
                              const RegionSelection& a, int k, Index marked_vertex) {
    if (k < 1 || k > x.top_dim())
        throw std::invalid_argument("forest_statistics: degree out of range");
    ForestStats stats;

    const std::vector<Index>& a_km1 = a.cells(k - 1);
    std::vector<Index> trace_cells;
    for (Index c : draw.cells)
        if (a.contains(k, c)) trace_cells.push_back(c);

    // b_{k-1} of the trace complex: the full (k-1)-skeleton of A plus the
    // drawn k-cells lying in A. For k = 1 the union-find component count
    // below gives b_0 without any elimination.
    if (k > 1) {
        IntMatrix low = x.boundary_dense(k - 1);
        const std::vector<Index>& a_km2 = a.cells(k - 2);
        IntMatrix sub(static_cast<Index>(a_km2.size()), static_cast<Index>(a_km1.size()));
        for (Index i = 0; i < sub.rows(); ++i)
            for (Index j = 0; j < sub.cols(); ++j)
                sub(i, j) = low(a_km2[static_cast<size_t>(i)], a_km1[static_cast<size_t>(j)]);
        Index z_km1 = static_cast<Index>(a_km1.size()) - rational_rank(sub);
        IntMatrix dk = x.boundary_dense(k);
        IntMatrix traced(static_cast<Index>(a_km1.size()),
                         static_cast<Index>(trace_cells.size()));
        for (Index i = 0; i < traced.rows(); ++i)
            for (Index j = 0; j < traced.cols(); ++j)
                traced(i, j) =
                    dk(a_km1[static_cast<size_t>(i)], trace_cells[static_cast<size_t>(j)]);
        stats.betti_km1 = z_km1 - rational_rank(traced);
    }

    auto [interior, boundary] = interior_and_boundary(x, a, k - 1);
    (void)interior;
    stats.boundary_size = static_cast<Index>(boundary.size());

    if (k == 1) {
        // component count of the trace graph via union-find
        std::map<Index, Index> pos;
        for (size_t i = 0; i < a_km1.size(); ++i) pos[a_km1[i]] = static_cast<Index>(i);
        std::vector<Index> parent(a_km1.size());
        std::iota(parent.begin(), parent.end(), Index(0));
        std::function<Index(Index)> find = [&](Index v) {
            while (parent[static_cast<size_t>(v)] != v) {
                parent[static_cast<size_t>(v)] =
                    parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
                v = parent[static_cast<size_t>(v)];
            }
            return v;
        };
        const IncidenceMatrix& d1 = x.boundary(1);
        for (Index e : trace_cells) {
            std::vector<Index> ends;
            for (IncidenceMatrix::InnerIterator it(d1, e); it; ++it) ends.push_back(it.row());
            if (ends.size() == 2)
                parent[static_cast<size_t>(find(pos.at(ends[0])))] = find(pos.at(ends[1]));
        }
        std::vector<bool> root_seen(parent.size(), false);
        Index comps = 0;
        for (size_t i = 0; i < parent.size(); ++i) {
            Index r = find(static_cast<Index>(i));
            if (!root_seen[static_cast<size_t>(r)]) {
                root_seen[static_cast<size_t>(r)] = true;
                ++comps;
            }
        }
        stats.components = comps;
        stats.betti_km1 = comps;

        Index deg = 0;
        const IncidenceMatrix& d1x = x.boundary(1);
        for (Index e : draw.cells)
            for (IncidenceMatrix::InnerIterator it(d1x, e); it; ++it)
                if (it.row() == marked_vertex) ++deg;
        stats.marked_degree = deg;
    }
    stats.bound_holds = stats.betti_km1 <= stats.boundary_size;
    return stats;
}

}  // namespace cellforest
