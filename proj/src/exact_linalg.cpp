#include "cellforest/exact_linalg.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cellforest {

namespace {

// Scale every row to integers by its denominator lcm. Returns the scaled
// matrix and the scale factors (row space is unchanged).
std::pair<IntMatrix, std::vector<Integer>> clear_row_denominators(const RatMatrix& m) {
    IntMatrix out(m.rows(), m.cols());
    std::vector<Integer> scales(static_cast<size_t>(m.rows()), Integer(1));
    for (Index i = 0; i < m.rows(); ++i) {
        Integer l = 1;
        for (Index j = 0; j < m.cols(); ++j)
            l = boost::multiprecision::lcm(l, denominator(m(i, j)));
        for (Index j = 0; j < m.cols(); ++j) {
            const Rational& x = m(i, j);
            out(i, j) = numerator(x) * (l / denominator(x));
        }
        scales[static_cast<size_t>(i)] = l;
    }
    return {std::move(out), std::move(scales)};
}

// Division rounded to nearest, used to keep Smith reduction entries small.
Integer rounded_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    Integer r = a - q * b;
    if (2 * boost::multiprecision::abs(r) > boost::multiprecision::abs(b))
        q += (r < 0) == (b < 0) ? 1 : -1;
    return q;
}

struct EliminationState {
    std::vector<RatVector> pivot_rows;  // reduced, pivot entry scaled to 1
    std::vector<Index> pivot_cols;

    // Reduce v against the accepted pivots; returns the leading column or -1.
    Index reduce(RatVector& v) const {
        for (size_t t = 0; t < pivot_rows.size(); ++t) {
            const Rational& c = v[pivot_cols[t]];
            if (c != 0) v -= c * pivot_rows[t];
        }
        for (Index j = 0; j < v.size(); ++j)
            if (v[j] != 0) return j;
        return -1;
    }

    void accept(RatVector v, Index lead) {
        v /= v[lead];
        pivot_rows.push_back(std::move(v));
        pivot_cols.push_back(lead);
    }
};

}  // namespace

std::vector<Index> independent_rows(const RatMatrix& m) {
    EliminationState state;
    std::vector<Index> picked;
    for (Index r = 0; r < m.rows(); ++r) {
        RatVector v = m.row(r).transpose();
        Index lead = state.reduce(v);
        if (lead < 0) continue;
        state.accept(std::move(v), lead);
        picked.push_back(r);
    }
    return picked;
}

std::vector<Index> independent_rows(const IntMatrix& m) {
    return independent_rows(RatMatrix(m.cast<Rational>()));
}

Index rational_rank(const RatMatrix& m) {
    return static_cast<Index>(independent_rows(m).size());
}

Index rational_rank(const IntMatrix& m) {
    return static_cast<Index>(independent_rows(m).size());
}

RatMatrix nullspace_basis(const RatMatrix& m) {
    const Index rows = m.rows(), cols = m.cols();
    RatMatrix r = m;
    std::vector<Index> pivot_col;
    Index pr = 0;
    for (Index c = 0; c < cols && pr < rows; ++c) {
        Index p = -1;
        for (Index i = pr; i < rows; ++i)
            if (r(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != pr) r.row(p).swap(r.row(pr));
        r.row(pr) /= r(pr, c);
        for (Index i = 0; i < rows; ++i)
            if (i != pr && r(i, c) != 0) r.row(i) -= r(i, c) * r.row(pr);
        pivot_col.push_back(c);
        ++pr;
    }
    std::vector<bool> is_pivot(static_cast<size_t>(cols), false);
    for (Index c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
    RatMatrix basis = RatMatrix::Zero(cols, cols - pr);
    Index out = 0;
    for (Index f = 0; f < cols; ++f) {
        if (is_pivot[static_cast<size_t>(f)]) continue;
        basis(f, out) = 1;
        for (Index t = 0; t < pr; ++t) basis(pivot_col[t], out) = -r(t, f);
        ++out;
    }
    return basis;
}

Integer det(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: matrix not square");
    const Index n = m.rows();
    if (n == 0) return 1;
    IntMatrix w = m;
    Integer prev = 1;
    int sign = 1;
    for (Index k = 0; k + 1 < n; ++k) {
        if (w(k, k) == 0) {
            Index p = -1;
            for (Index i = k + 1; i < n; ++i)
                if (w(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            w.row(k).swap(w.row(p));
            sign = -sign;
        }
        for (Index i = k + 1; i < n; ++i)
            for (Index j = k + 1; j < n; ++j)
                w(i, j) = (w(k, k) * w(i, j) - w(i, k) * w(k, j)) / prev;
        prev = w(k, k);
    }
    return sign < 0 ? Integer(-w(n - 1, n - 1)) : w(n - 1, n - 1);
}

Rational det(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: matrix not square");
    auto [w, scales] = clear_row_denominators(m);
    Integer d = det(w);
    Rational out(d);
    for (const Integer& s : scales) out /= s;
    return out;
}

Rational principal_minor_det(const RatMatrix& q, const std::vector<Index>& d) {
    if (d.empty()) return Rational(1);
    for (Index i : d)
        if (i < 0 || i >= q.rows()) throw std::invalid_argument("principal_minor_det: index out of range");
    RatMatrix sub(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (size_t a = 0; a < d.size(); ++a)
        for (size_t b = 0; b < d.size(); ++b)
            sub(static_cast<Index>(a), static_cast<Index>(b)) = q(d[a], d[b]);
    return det(sub);
}

Integer gram_det(const IntMatrix& m) {
    IntMatrix g = m * m.transpose();
    return det(g);
}

Rational gram_det(const RatMatrix& m) {
    auto [w, scales] = clear_row_denominators(m);
    Integer g = gram_det(w);
    Rational out(g);
    for (const Integer& s : scales) out /= s * s;
    return out;
}

std::pair<IntMatrix, Integer> adjugate_and_det_positive_definite(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("adjugate: matrix not square");
    const Index n = m.rows();
    if (n == 0) return {IntMatrix(0, 0), Integer(1)};
    // Fraction-free Gauss-Jordan on [m | I]. After eliminating pivot k the
    // left block's first k columns are diag(prev_pivot), so only columns >= k
    // need work; the final right block is the adjugate and the last pivot the
    // determinant.
    IntMatrix w(n, 2 * n);
    w.leftCols(n) = m;
    w.rightCols(n).setZero();
    for (Index i = 0; i < n; ++i) w(i, n + i) = 1;
    Integer prev = 1;
    for (Index k = 0; k < n; ++k) {
        const Integer p = w(k, k);
        if (p <= 0)
            throw std::invalid_argument("adjugate: matrix is not positive definite");
        for (Index i = 0; i < n; ++i) {
            if (i == k) continue;
            const Integer f = w(i, k);
            if (f == 0) {
                for (Index j = k + 1; j < 2 * n; ++j)
                    w(i, j) = p * w(i, j) / prev;
            } else {
                for (Index j = k + 1; j < 2 * n; ++j)
                    w(i, j) = (p * w(i, j) - f * w(k, j)) / prev;
                w(i, k) = 0;
            }
        }
        prev = p;
    }
    return {IntMatrix(w.rightCols(n)), prev};
}

namespace {

// Column supports of an integer matrix, for sparse-aware Gram assembly.
struct ColumnSupport {
    std::vector<std::vector<std::pair<Index, const Integer*>>> cols;

    explicit ColumnSupport(const IntMatrix& a) : cols(static_cast<size_t>(a.cols())) {
        for (Index j = 0; j < a.cols(); ++j)
            for (Index i = 0; i < a.rows(); ++i)
                if (a(i, j) != 0) cols[static_cast<size_t>(j)].emplace_back(i, &a(i, j));
    }
};

}  // namespace

RatMatrix row_space_projection(const IntMatrix& m) {
    const Index ground = m.cols();
    std::vector<Index> rows = independent_rows(m);
    if (rows.empty()) return RatMatrix::Zero(ground, ground);
    IntMatrix a = select_rows(m, rows);
    const Index r = a.rows();

    ColumnSupport supp(a);

    // Gram matrix A A^T through the column supports.
    IntMatrix gram = IntMatrix::Zero(r, r);
    for (const auto& col : supp.cols)
        for (const auto& [i, vi] : col)
            for (const auto& [j, vj] : col)
                if (j >= i) gram(i, j) += (*vi) * (*vj);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < i; ++j) gram(i, j) = gram(j, i);

    auto [adj, d] = adjugate_and_det_positive_definite(gram);

    // Q_ef = a_e^T adj a_f / det, using the supports of the ground columns.
    RatMatrix q(ground, ground);
    for (Index e = 0; e < ground; ++e) {
        for (Index f = e; f < ground; ++f) {
            Integer num = 0;
            for (const auto& [i, vi] : supp.cols[static_cast<size_t>(e)])
                for (const auto& [j, vj] : supp.cols[static_cast<size_t>(f)])
                    num += (*vi) * adj(i, j) * (*vj);
            Rational val(num, d);
            q(e, f) = val;
            if (f != e) q(f, e) = std::move(val);
        }
    }
    return q;
}

RatMatrix row_space_projection(const RatMatrix& m) {
    auto [w, scales] = clear_row_denominators(m);
    (void)scales;  // row scaling leaves the row space unchanged
    return row_space_projection(w);
}

namespace {

struct SmithWorker {
    IntMatrix w;
    bool track;
    IntMatrix u, v;

    explicit SmithWorker(const IntMatrix& m, bool with_transforms)
        : w(m), track(with_transforms) {
        if (track) {
            u = IntMatrix::Identity(m.rows(), m.rows());
            v = IntMatrix::Identity(m.cols(), m.cols());
        }
    }

    void swap_rows(Index a, Index b) {
        if (a == b) return;
        w.row(a).swap(w.row(b));
        if (track) u.row(a).swap(u.row(b));
    }
    void swap_cols(Index a, Index b) {
        if (a == b) return;
        w.col(a).swap(w.col(b));
        if (track) v.col(a).swap(v.col(b));
    }
    void add_row(Index dst, Index src, const Integer& c) {
        w.row(dst) += c * w.row(src);
        if (track) u.row(dst) += c * u.row(src);
    }
    void add_col(Index dst, Index src, const Integer& c) {
        w.col(dst) += c * w.col(src);
        if (track) v.col(dst) += c * v.col(src);
    }
    void negate_row(Index a) {
        w.row(a) = -w.row(a);
        if (track) u.row(a) = -u.row(a);
    }

    // Move the smallest nonzero |entry| of the trailing submatrix to (t, t);
    // returns false if the submatrix is zero.
    bool place_pivot(Index t) {
        Index bi = -1, bj = -1;
        Integer best = 0;
        for (Index i = t; i < w.rows(); ++i)
            for (Index j = t; j < w.cols(); ++j) {
                if (w(i, j) == 0) continue;
                Integer a = boost::multiprecision::abs(w(i, j));
                if (bi < 0 || a < best) {
                    best = a;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) return false;
        swap_rows(t, bi);
        swap_cols(t, bj);
        return true;
    }

    TorsionReport run() {
        const Index steps = std::min(w.rows(), w.cols());
        Index t = 0;
        while (t < steps && place_pivot(t)) {
            bool dirty = true;
            while (dirty) {
                dirty = false;
                for (Index i = t + 1; i < w.rows(); ++i) {
                    if (w(i, t) == 0) continue;
                    add_row(i, t, -rounded_div(w(i, t), w(t, t)));
                    if (w(i, t) != 0) {
                        swap_rows(t, i);
                        dirty = true;
                    }
                }
                for (Index j = t + 1; j < w.cols(); ++j) {
                    if (w(t, j) == 0) continue;
                    add_col(j, t, -rounded_div(w(t, j), w(t, t)));
                    if (w(t, j) != 0) {
                        swap_cols(t, j);
                        dirty = true;
                    }
                }
                if (dirty) continue;
                // Divisibility of the trailing block by the pivot.
                for (Index i = t + 1; i < w.rows() && !dirty; ++i)
                    for (Index j = t + 1; j < w.cols() && !dirty; ++j)
                        if (w(i, j) % w(t, t) != 0) {
                            add_row(t, i, 1);
                            dirty = true;
                        }
            }
            if (w(t, t) < 0) negate_row(t);
            ++t;
        }
        TorsionReport rep;
        rep.rank = t;
        rep.invariant_factors.reserve(static_cast<size_t>(t));
        for (Index i = 0; i < t; ++i) {
            rep.invariant_factors.push_back(w(i, i));
            rep.torsion_order *= w(i, i);
        }
        return rep;
    }
};

}  // namespace

TorsionReport smith_normal_form(const IntMatrix& m) {
    SmithWorker worker(m, false);
    return worker.run();
}

SmithDecomposition smith_normal_form_with_transforms(const IntMatrix& m) {
    SmithWorker worker(m, true);
    SmithDecomposition out;
    out.report = worker.run();
    out.u = std::move(worker.u);
    out.v = std::move(worker.v);
    return out;
}

IntMatrix integer_kernel_basis(const IntMatrix& m) {
    if (m.rows() == 0) return IntMatrix::Identity(m.cols(), m.cols());
    SmithDecomposition snf = smith_normal_form_with_transforms(m);
    const Index r = snf.report.rank;
    return IntMatrix(snf.v.rightCols(m.cols() - r));
}

IntMatrix saturation_basis(const IntMatrix& m) {
    IntMatrix perp = integer_kernel_basis(IntMatrix(m.transpose()));
    return integer_kernel_basis(IntMatrix(perp.transpose()));
}

Integer integer_pseudo_determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("pseudo-determinant: matrix not square");
    if (m != m.transpose()) throw std::invalid_argument("pseudo-determinant: matrix not symmetric");
    const Index n = m.rows();
    if (n == 0) return 1;
    // Faddeev-LeVerrier: char(lambda) = lambda^n + c_1 lambda^{n-1} + ... + c_n,
    // all divisions exact over Z.
    std::vector<Integer> c(static_cast<size_t>(n) + 1);
    c[0] = 1;
    IntMatrix mk = m;
    for (Index k = 1; k <= n; ++k) {
        Integer tr = 0;
        for (Index i = 0; i < n; ++i) tr += mk(i, i);
        assert(tr % k == 0);
        c[static_cast<size_t>(k)] = -tr / k;
        if (k == n) break;
        IntMatrix shifted = mk;
        for (Index i = 0; i < n; ++i) shifted(i, i) += c[static_cast<size_t>(k)];
        mk = m * shifted;
    }
    Index r = 0;
    for (Index k = n; k >= 1; --k)
        if (c[static_cast<size_t>(k)] != 0) { r = k; break; }
    if (r == 0) return 1;  // zero matrix: empty product
    // coefficient of lambda^{n-r} is (-1)^r e_r(eigenvalues)
    Integer e = c[static_cast<size_t>(r)];
    return r % 2 == 0 ? e : Integer(-e);
}

IntVector lattice_coordinates(const IntMatrix& k, const IntVector& g) {
    const Index dim = k.cols();
    if (dim == 0) {
        if (!g.isZero(0)) throw std::invalid_argument("lattice_coordinates: vector outside span");
        return IntVector(0);
    }
    // Solve on an independent row subset, then verify against the full system.
    std::vector<Index> rows = independent_rows(IntMatrix(k));
    if (static_cast<Index>(rows.size()) != dim)
        throw std::invalid_argument("lattice_coordinates: basis columns are dependent");
    RatMatrix sq = select_rows(k, rows).cast<Rational>();
    RatVector rhs(dim);
    for (Index i = 0; i < dim; ++i) rhs[i] = Rational(g[rows[static_cast<size_t>(i)]]);
    // Gaussian solve.
    RatMatrix aug(dim, dim + 1);
    aug.leftCols(dim) = sq;
    aug.col(dim) = rhs;
    for (Index c = 0; c < dim; ++c) {
        Index p = -1;
        for (Index i = c; i < dim; ++i)
            if (aug(i, c) != 0) { p = i; break; }
        assert(p >= 0);
        if (p != c) aug.row(p).swap(aug.row(c));
        aug.row(c) /= aug(c, c);
        for (Index i = 0; i < dim; ++i)
            if (i != c && aug(i, c) != 0) aug.row(i) -= aug(i, c) * aug.row(c);
    }
    IntVector x(dim);
    for (Index i = 0; i < dim; ++i) {
        const Rational& xi = aug(i, dim);
        if (denominator(xi) != 1)
            throw std::invalid_argument("lattice_coordinates: solution not integral");
        x[i] = numerator(xi);
    }
    if (k * x != g) throw std::invalid_argument("lattice_coordinates: vector outside span");
    return x;
}

}  // namespace cellforest
