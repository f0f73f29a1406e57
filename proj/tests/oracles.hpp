// Brute-force reference computations the tests check the library against.
// Everything here is deliberately independent of the implementation paths it
// verifies: subset enumeration plus Gaussian elimination only.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "cellforest/chain_complex.hpp"
#include "cellforest/exact_linalg.hpp"
#include "cellforest/rng.hpp"

namespace oracles {

using cellforest::ChainComplex;
using cellforest::Index;
using cellforest::IntMatrix;
using cellforest::Integer;
using cellforest::RatMatrix;
using cellforest::Rational;

inline void all_subsets(Index n, Index k, const std::function<void(const std::vector<Index>&)>& f) {
    std::vector<Index> cur;
    std::function<void(Index)> rec = [&](Index next) {
        if (static_cast<Index>(cur.size()) == k) {
            f(cur);
            return;
        }
        for (Index c = next; c <= n - (k - static_cast<Index>(cur.size())); ++c) {
            cur.push_back(c);
            rec(c + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

// Rank by plain rational Gaussian elimination (row echelon, no reuse of the
// library's pivot bookkeeping).
inline Index plain_rank(RatMatrix m) {
    Index rank = 0;
    for (Index c = 0; c < m.cols() && rank < m.rows(); ++c) {
        Index p = -1;
        for (Index r = rank; r < m.rows(); ++r)
            if (m(r, c) != 0) { p = r; break; }
        if (p < 0) continue;
        if (p != rank) m.row(p).swap(m.row(rank));
        for (Index r = 0; r < m.rows(); ++r) {
            if (r == rank || m(r, c) == 0) continue;
            Rational f = m(r, c) / m(rank, c);
            m.row(r) -= f * m.row(rank);
        }
        ++rank;
    }
    return rank;
}

// Determinant by cofactor expansion; fine for the tiny matrices used here.
inline Rational cofactor_det(const RatMatrix& m) {
    const Index n = m.rows();
    if (n == 0) return Rational(1);
    if (n == 1) return m(0, 0);
    Rational sum(0);
    for (Index j = 0; j < n; ++j) {
        if (m(0, j) == 0) continue;
        RatMatrix minor(n - 1, n - 1);
        for (Index r = 1; r < n; ++r) {
            Index w = 0;
            for (Index c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, w++) = m(r, c);
            }
        }
        Rational term = m(0, j) * cofactor_det(minor);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sum;
}

// All column subsets of size `rank` that are linearly independent.
inline std::vector<std::vector<Index>> independent_column_sets(const IntMatrix& m, Index rank) {
    std::vector<std::vector<Index>> out;
    RatMatrix q = m.cast<Rational>();
    all_subsets(m.cols(), rank, [&](const std::vector<Index>& cols) {
        RatMatrix sub(m.rows(), rank);
        for (Index j = 0; j < rank; ++j) sub.col(j) = q.col(cols[static_cast<size_t>(j)]);
        if (plain_rank(sub) == rank) out.push_back(cols);
    });
    return out;
}

// Spanning trees of the graph with boundary matrix d1 (edges as columns).
inline std::vector<std::vector<Index>> spanning_trees(const ChainComplex& x) {
    IntMatrix d1 = x.boundary_dense(1);
    Index rank = plain_rank(d1.cast<Rational>());
    return independent_column_sets(d1, rank);
}

// gcd of all k x k minors of an integer matrix.
inline Integer minor_gcd(const IntMatrix& m, Index k) {
    Integer g = 0;
    all_subsets(m.rows(), k, [&](const std::vector<Index>& rows) {
        all_subsets(m.cols(), k, [&](const std::vector<Index>& cols) {
            RatMatrix sub(k, k);
            for (Index i = 0; i < k; ++i)
                for (Index j = 0; j < k; ++j)
                    sub(i, j) = Rational(m(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]));
            Rational d = cofactor_det(sub);
            g = boost::multiprecision::gcd(g, cellforest::numerator(d));
        });
    });
    return g;
}

// Order of Z^z / <columns of g> by explicit coset counting: reduce modulo a
// known annihilator m (m Z^z lies in the lattice), enumerate the subgroup of
// (Z/m)^z generated by the columns, and divide.
inline Integer quotient_order_by_counting(const IntMatrix& g, Integer annihilator) {
    const Index z = g.rows();
    if (z == 0) return 1;
    long long m = annihilator.convert_to<long long>();
    std::set<std::vector<long long>> subgroup;
    std::vector<std::vector<long long>> frontier;
    std::vector<long long> zero(static_cast<size_t>(z), 0);
    subgroup.insert(zero);
    frontier.push_back(zero);
    while (!frontier.empty()) {
        std::vector<long long> v = frontier.back();
        frontier.pop_back();
        for (Index j = 0; j < g.cols(); ++j) {
            std::vector<long long> w = v;
            for (Index i = 0; i < z; ++i) {
                long long add = g(i, j).convert_to<long long>() % m;
                w[static_cast<size_t>(i)] = ((w[static_cast<size_t>(i)] + add) % m + m) % m;
            }
            if (subgroup.insert(w).second) frontier.push_back(w);
        }
    }
    Integer total = 1;
    for (Index i = 0; i < z; ++i) total *= annihilator;
    return total / Integer(subgroup.size());
}

// Triangle indices of the 6-vertex projective-plane triangulation inside the
// 2-skeleton of the 5-simplex, resolved through the builder's labels.
inline std::vector<Index> rp2_triangles(const ChainComplex& skel) {
    std::vector<std::vector<int>> tris = {{0, 1, 4}, {0, 1, 5}, {0, 2, 3}, {0, 2, 5}, {0, 3, 4},
                                          {1, 2, 3}, {1, 2, 4}, {1, 3, 5}, {2, 4, 5}, {3, 4, 5}};
    std::vector<Index> out;
    for (const auto& tri : tris) {
        std::string want = std::to_string(tri[0]) + "." + std::to_string(tri[1]) + "." +
                           std::to_string(tri[2]);
        for (Index i = 0; i < skel.cell_count(2); ++i)
            if (skel.label(2, i) == want) {
                out.push_back(i);
                break;
            }
    }
    return out;
}

// Deterministic random integer matrix for property tests.
inline IntMatrix random_int_matrix(cellforest::CounterRng& rng, Index rows, Index cols,
                                   int lo, int hi) {
    IntMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = static_cast<long long>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1)) + lo;
    return m;
}

}  // namespace oracles
