#include "cellforest/coupling.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace cellforest {

namespace {

// Support of a projection-kernel measure: the size-rank subsets of positive
// probability, as kernel-index bitmasks with their exact masses.
void measure_support(const MatroidalMeasure& m, std::vector<std::uint32_t>& masks,
                     std::vector<Rational>& mass) {
    const Index e = m.ground_size();
    const Index r = m.kernel.rank;
    std::vector<Index> subset(static_cast<size_t>(r));
    std::function<void(Index, Index)> rec = [&](Index next, Index depth) {
        if (depth == r) {
            std::vector<Index> idx(subset.begin(), subset.end());
            Rational p = principal_minor_det(m.kernel.q, idx);
            if (p > 0) {
                std::uint32_t mask = 0;
                for (Index i : idx) mask |= (1u << i);
                masks.push_back(mask);
                mass.push_back(std::move(p));
            }
            return;
        }
        for (Index c = next; c <= e - (r - depth); ++c) {
            subset[static_cast<size_t>(depth)] = c;
            rec(c + 1, depth + 1);
        }
    };
    if (r == 0) {
        masks.push_back(0);
        mass.push_back(Rational(1));
        return;
    }
    rec(0, 0);
}

struct Arc {
    Index to;
    Index rev;
    Rational cap;
};

struct FlowNetwork {
    std::vector<std::vector<Arc>> adj;

    explicit FlowNetwork(Index n) : adj(static_cast<size_t>(n)) {}

    void add_arc(Index from, Index to, Rational cap) {
        adj[static_cast<size_t>(from)].push_back(
            {to, static_cast<Index>(adj[static_cast<size_t>(to)].size()), std::move(cap)});
        adj[static_cast<size_t>(to)].push_back(
            {from, static_cast<Index>(adj[static_cast<size_t>(from)].size()) - 1, Rational(0)});
    }

    // Edmonds-Karp; exact rational arithmetic terminates in O(V E) phases.
    Rational max_flow(Index s, Index t) {
        Rational total(0);
        while (true) {
            std::vector<std::pair<Index, Index>> pred(adj.size(), {-1, -1});
            std::deque<Index> queue{s};
            pred[static_cast<size_t>(s)] = {s, -1};
            while (!queue.empty() && pred[static_cast<size_t>(t)].first < 0) {
                Index v = queue.front();
                queue.pop_front();
                for (size_t i = 0; i < adj[static_cast<size_t>(v)].size(); ++i) {
                    const Arc& a = adj[static_cast<size_t>(v)][i];
                    if (a.cap > 0 && pred[static_cast<size_t>(a.to)].first < 0) {
                        pred[static_cast<size_t>(a.to)] = {v, static_cast<Index>(i)};
                        queue.push_back(a.to);
                    }
                }
            }
            if (pred[static_cast<size_t>(t)].first < 0) break;
            // bottleneck
            Rational aug(-1);
            for (Index v = t; v != s;) {
                auto [pv, pi] = pred[static_cast<size_t>(v)];
                const Arc& a = adj[static_cast<size_t>(pv)][static_cast<size_t>(pi)];
                if (aug < 0 || a.cap < aug) aug = a.cap;
                v = pv;
            }
            for (Index v = t; v != s;) {
                auto [pv, pi] = pred[static_cast<size_t>(v)];
                Arc& a = adj[static_cast<size_t>(pv)][static_cast<size_t>(pi)];
                a.cap -= aug;
                adj[static_cast<size_t>(a.to)][static_cast<size_t>(a.rev)].cap += aug;
                v = pv;
            }
            total += aug;
        }
        return total;
    }

    std::vector<bool> reachable(Index s) const {
        std::vector<bool> seen(adj.size(), false);
        std::deque<Index> queue{s};
        seen[static_cast<size_t>(s)] = true;
        while (!queue.empty()) {
            Index v = queue.front();
            queue.pop_front();
            for (const Arc& a : adj[static_cast<size_t>(v)])
                if (a.cap > 0 && !seen[static_cast<size_t>(a.to)]) {
                    seen[static_cast<size_t>(a.to)] = true;
                    queue.push_back(a.to);
                }
        }
        return seen;
    }
};

std::vector<Index> cells_from_mask(const MatroidalMeasure& m, std::uint32_t mask) {
    std::vector<Index> out;
    for (Index i = 0; i < m.ground_size(); ++i)
        if (mask & (1u << i)) out.push_back(m.ground_cells[static_cast<size_t>(i)]);
    return out;
}

}  // namespace

CouplingResult domination_witness(const MatroidalMeasure& m1, const MatroidalMeasure& m2) {
    if (m1.ground_cells != m2.ground_cells)
        throw std::invalid_argument("domination_witness: measures have different ground sets");
    if (m1.ground_size() > 16)
        throw std::invalid_argument("domination_witness: ground set larger than 16 cells");

    CouplingResult res;
    std::vector<std::uint32_t> src_masks, dst_masks;
    std::vector<Rational> src_mass, dst_mass;
    measure_support(m1, src_masks, src_mass);
    measure_support(m2, dst_masks, dst_mass);
    for (std::uint32_t mask : src_masks) res.sources.push_back(cells_from_mask(m1, mask));
    for (std::uint32_t mask : dst_masks) res.targets.push_back(cells_from_mask(m2, mask));
    res.source_mass = src_mass;
    res.target_mass = dst_mass;

    const Index a = static_cast<Index>(src_masks.size());
    const Index b = static_cast<Index>(dst_masks.size());
    const Index source = 0, sink = a + b + 1;
    FlowNetwork net(a + b + 2);
    for (Index i = 0; i < a; ++i) net.add_arc(source, 1 + i, src_mass[static_cast<size_t>(i)]);
    for (Index j = 0; j < b; ++j) net.add_arc(1 + a + j, sink, dst_mass[static_cast<size_t>(j)]);
    for (Index i = 0; i < a; ++i)
        for (Index j = 0; j < b; ++j)
            if ((src_masks[static_cast<size_t>(i)] & ~dst_masks[static_cast<size_t>(j)]) == 0)
                net.add_arc(1 + i, 1 + a + j, Rational(1));

    Rational flow = net.max_flow(source, sink);
    res.feasible = (flow == 1);

    if (res.feasible) {
        // read off the coupling from the sink-side residual arcs
        for (Index i = 0; i < a; ++i)
            for (const Arc& arc : net.adj[static_cast<size_t>(1 + i)]) {
                if (arc.to < 1 + a || arc.to >= 1 + a + b) continue;
                // forward arc had capacity 1; flow = 1 - residual
                Rational sent = Rational(1) - arc.cap;
                if (arc.cap < 1 && sent > 0)
                    res.joint.emplace_back(i, arc.to - 1 - a, sent);
            }
    } else {
        std::vector<bool> cut = net.reachable(source);
        Rational smass(0), tmass(0);
        for (Index i = 0; i < a; ++i)
            if (cut[static_cast<size_t>(1 + i)]) {
                res.violator_sources.push_back(i);
                smass += src_mass[static_cast<size_t>(i)];
            }
        for (Index j = 0; j < b; ++j)
            if (cut[static_cast<size_t>(1 + a + j)]) {
                res.violator_targets.push_back(j);
                tmass += dst_mass[static_cast<size_t>(j)];
            }
        res.violator_source_mass = smass;
        res.violator_target_mass = tmass;
    }
    return res;
}

}  // namespace cellforest
