#include "cellforest/enumeration.hpp"

#include <algorithm>
#include <sstream>

namespace cellforest {

namespace {

Integer binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    Integer r = 1;
    for (Index i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

// Stack of reduced columns for incremental independence tests.
class IncrementalBasis {
  public:
    bool push(RatVector v) {
        for (size_t t = 0; t < rows_.size(); ++t) {
            const Rational& c = v[leads_[t]];
            if (c != 0) v -= c * rows_[t];
        }
        Index lead = -1;
        for (Index j = 0; j < v.size(); ++j)
            if (v[j] != 0) { lead = j; break; }
        if (lead < 0) return false;
        v /= v[lead];
        rows_.push_back(std::move(v));
        leads_.push_back(lead);
        return true;
    }
    void pop() {
        rows_.pop_back();
        leads_.pop_back();
    }

  private:
    std::vector<RatVector> rows_;
    std::vector<Index> leads_;
};

// Ground matrix whose column matroid is enumerated: d_k for bases, the
// coboundary d_{k+1}^T for cobases.
IntMatrix ground_matrix(const ChainComplex& x, int k, BaseSide side) {
    if (side == BaseSide::base) return x.boundary_dense(k);
    return IntMatrix(x.boundary_dense(k + 1).transpose());
}

std::string cells_to_string(const std::vector<Index>& cells) {
    std::ostringstream s;
    s << "{";
    for (size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
    s << "}";
    return s.str();
}

}  // namespace

void for_each_base(const ChainComplex& x, int k, BaseSide side, const EnumerationOptions& opts,
                   const std::function<bool(const std::vector<Index>&)>& visit) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("for_each_base: degree out of range");
    IntMatrix m = ground_matrix(x, k, side);
    RatMatrix mq = m.cast<Rational>();
    const Index n = mq.cols();
    const Index r = rational_rank(m);
    if (binomial(n, r) > opts.subset_budget) {
        std::ostringstream msg;
        msg << "enumeration budget exceeded: C(" << n << "," << r << ") = "
            << binomial(n, r).str() << " > " << opts.subset_budget.str();
        throw BudgetExceeded(msg.str());
    }
    if (r == 0) {
        visit({});
        return;
    }
    IncrementalBasis basis;
    std::vector<Index> chosen;  // descending
    std::function<bool(Index, Index)> rec = [&](Index slots, Index max_excl) -> bool {
        if (slots == 0) {
            std::vector<Index> cells(chosen.rbegin(), chosen.rend());
            return visit(cells);
        }
        for (Index c = slots - 1; c < max_excl; ++c) {
            if (!basis.push(mq.col(c))) continue;
            chosen.push_back(c);
            bool keep_going = rec(slots - 1, c);
            chosen.pop_back();
            basis.pop();
            if (!keep_going) return false;
        }
        return true;
    };
    rec(r, n);
}

TorsionReport torsion_weight(const ChainComplex& x, int k, const std::vector<Index>& t,
                             Side side) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("torsion_weight: degree out of range");
    std::vector<Index> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("torsion_weight: duplicate cell");
    for (Index c : sorted)
        if (c < 0 || c >= x.cell_count(k))
            throw std::invalid_argument("torsion_weight: cell index out of range");
    if (side == Side::lower)
        return smith_normal_form(select_columns(x.boundary_dense(k), sorted));
    std::vector<Index> complement;
    for (Index c = 0; c < x.cell_count(k); ++c)
        if (!std::binary_search(sorted.begin(), sorted.end(), c)) complement.push_back(c);
    return smith_normal_form(select_rows(x.boundary_dense(k + 1), complement));
}

Integer upper_torsion_alt(const ChainComplex& x, int k, const std::vector<Index>& t) {
    std::vector<Index> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> complement;
    for (Index c = 0; c < x.cell_count(k); ++c)
        if (!std::binary_search(sorted.begin(), sorted.end(), c)) complement.push_back(c);
    // cocycle lattice in degree k+1 modulo coboundaries of cochains supported
    // off t
    IntMatrix delta_up = x.boundary_dense(k + 2).transpose();  // d_{k+2}^T
    IntMatrix cocycles = integer_kernel_basis(delta_up);       // f_{k+1} x z
    IntMatrix gens = select_rows(x.boundary_dense(k + 1), complement).transpose();
    IntMatrix coords(cocycles.cols(), gens.cols());
    for (Index j = 0; j < gens.cols(); ++j)
        coords.col(j) = lattice_coordinates(cocycles, IntVector(gens.col(j)));
    return smith_normal_form(coords).torsion_order;
}

std::vector<BaseRecord> enumerate_bases(const ChainComplex& x, int k, BaseSide side,
                                        const EnumerationOptions& opts) {
    std::vector<BaseRecord> out;
    IntMatrix weight_matrix = side == BaseSide::base
                                  ? x.boundary_dense(k)
                                  : x.boundary_dense(k + 1);
    for_each_base(x, k, side, opts, [&](const std::vector<Index>& cells) {
        BaseRecord rec;
        rec.cells = cells;
        TorsionReport rep = side == BaseSide::base
                                ? smith_normal_form(select_columns(weight_matrix, cells))
                                : smith_normal_form(select_rows(weight_matrix, cells));
        rec.torsion = rep.torsion_order;
        rec.weight = rec.torsion * rec.torsion;
        out.push_back(std::move(rec));
        return true;
    });
    return out;
}

EnumerationSummary weighted_sum_h(const ChainComplex& x, int k, const EnumerationOptions& opts) {
    EnumerationSummary summary;
    summary.degree = k;
    IntMatrix dk = x.boundary_dense(k);
    for_each_base(x, k, BaseSide::base, opts, [&](const std::vector<Index>& cells) {
        Integer t = smith_normal_form(select_columns(dk, cells)).torsion_order;
        summary.base_count += 1;
        summary.h += t * t;
        summary.torsion_histogram[t] += 1;
        return true;
    });
    return summary;
}

Integer lattice_quotient_order(const ChainComplex& x, int k, const std::vector<Index>& s) {
    if (k < 0 || k > x.top_dim())
        throw std::invalid_argument("lattice_quotient_order: degree out of range");
    std::vector<Index> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    for (Index c : sorted)
        if (c < 0 || c >= x.cell_count(k))
            throw std::invalid_argument("lattice_quotient_order: cell index out of range");
    std::vector<Index> complement;
    for (Index c = 0; c < x.cell_count(k); ++c)
        if (!std::binary_search(sorted.begin(), sorted.end(), c)) complement.push_back(c);

    IntMatrix cycles = integer_kernel_basis(x.boundary_dense(k));  // f_k x z
    const Index z = cycles.cols();
    if (z == 0) return 1;

    IntMatrix boundary_sat = saturation_basis(x.boundary_dense(k + 1));  // f_k x b
    IntMatrix off_cycles = integer_kernel_basis(select_columns(x.boundary_dense(k), complement));

    IntMatrix gens(z, boundary_sat.cols() + off_cycles.cols());
    for (Index j = 0; j < boundary_sat.cols(); ++j)
        gens.col(j) = lattice_coordinates(cycles, IntVector(boundary_sat.col(j)));
    for (Index j = 0; j < off_cycles.cols(); ++j) {
        IntVector embedded = IntVector::Zero(x.cell_count(k));
        for (Index r = 0; r < off_cycles.rows(); ++r)
            embedded[complement[static_cast<size_t>(r)]] = off_cycles(r, j);
        gens.col(boundary_sat.cols() + j) = lattice_coordinates(cycles, embedded);
    }
    TorsionReport rep = smith_normal_form(gens);
    if (rep.rank < z) {
        std::ostringstream msg;
        msg << "lattice quotient is infinite: rank deficit " << (z - rep.rank)
            << " (s is not a cobase)";
        throw InfiniteQuotient(msg.str(), z - rep.rank);
    }
    return rep.torsion_order;
}

IdentityReport verify_key_lemma(const ChainComplex& x, const EnumerationOptions& opts) {
    const int d = x.top_dim();
    if (d < 2) throw std::invalid_argument("verify_key_lemma: dimension must be at least 2");
    IdentityReport report;

    IntMatrix dd = x.boundary_dense(d);
    const Integer t_x = smith_normal_form(x.boundary_dense(d - 1)).torsion_order;
    report.values["t_{d-2}(X)"] = t_x.str();

    std::vector<std::vector<Index>> bases;
    std::vector<Integer> base_torsion;
    for_each_base(x, d, BaseSide::base, opts, [&](const std::vector<Index>& t) {
        bases.push_back(t);
        base_torsion.push_back(smith_normal_form(select_columns(dd, t)).torsion_order);
        return true;
    });

    IntMatrix dlow = x.boundary_dense(d - 1);
    for_each_base(x, d - 1, BaseSide::cobase, opts, [&](const std::vector<Index>& s) {
        std::vector<Index> comp;
        for (Index c = 0; c < x.cell_count(d - 1); ++c)
            if (!std::binary_search(s.begin(), s.end(), c)) comp.push_back(c);
        Integer t_comp = smith_normal_form(select_columns(dlow, comp)).torsion_order;
        Integer t_prime = lattice_quotient_order(x, d - 1, s);
        IntMatrix rows = select_rows(dd, s);
        for (size_t b = 0; b < bases.size(); ++b) {
            Integer lhs = boost::multiprecision::abs(det(select_columns(rows, bases[b])));
            report.instances += 1;
            if (lhs == 0 || lhs * t_x != base_torsion[b] * t_comp * t_prime) {
                report.ok = false;
                std::ostringstream msg;
                msg << "key lemma fails for T=" << cells_to_string(bases[b])
                    << " S=" << cells_to_string(s) << ": |det|=" << lhs.str()
                    << " t(T)=" << base_torsion[b].str() << " t(compS)=" << t_comp.str()
                    << " t'(S)=" << t_prime.str() << " t(X)=" << t_x.str();
                report.detail = msg.str();
                return false;
            }
        }
        return true;
    });
    if (report.ok) report.detail = "all pairs satisfy the determinant identity";
    return report;
}

IdentityReport verify_count_corollary(const ChainComplex& x, const EnumerationOptions& opts) {
    const int d = x.top_dim();
    if (d < 2)
        throw std::invalid_argument("verify_count_corollary: dimension must be at least 2");
    IdentityReport report;

    EnumerationSummary sum = weighted_sum_h(x, d);
    const Integer h = sum.h;
    report.values["h_{d-1}(X)"] = h.str();
    const Integer t_x = smith_normal_form(x.boundary_dense(d - 1)).torsion_order;
    report.values["t_{d-2}(X)"] = t_x.str();

    IntMatrix dd = x.boundary_dense(d);
    IntMatrix dlow = x.boundary_dense(d - 1);
    Integer h_prime = 0;
    bool all_ok = true;
    std::string first;
    for_each_base(x, d - 1, BaseSide::cobase, opts, [&](const std::vector<Index>& s) {
        std::vector<Index> comp;
        for (Index c = 0; c < x.cell_count(d - 1); ++c)
            if (!std::binary_search(s.begin(), s.end(), c)) comp.push_back(c);
        Integer t_comp = smith_normal_form(select_columns(dlow, comp)).torsion_order;
        Integer t_prime = lattice_quotient_order(x, d - 1, s);
        Integer gram = gram_det(IntMatrix(select_rows(dd, s)));
        h_prime += t_comp * t_comp * t_prime * t_prime;
        report.instances += 1;
        // cobase route to h: h * (t_comp t')^2 = t_X^2 * det(d_S d_S^T)
        if (h * t_comp * t_comp * t_prime * t_prime != t_x * t_x * gram) {
            all_ok = false;
            if (first.empty()) {
                std::ostringstream msg;
                msg << "cobase formula for h fails at S=" << cells_to_string(s)
                    << ": h=" << h.str() << " t(compS)=" << t_comp.str()
                    << " t'(S)=" << t_prime.str() << " det=" << gram.str();
                first = msg.str();
            }
        }
        return true;
    });
    report.values["h'_{d-2}(X)"] = h_prime.str();

    Integer pseudo = integer_pseudo_determinant(IntMatrix(dd * dd.transpose()));
    report.values["pseudodet"] = pseudo.str();
    if (pseudo * t_x * t_x != h * h_prime) {
        all_ok = false;
        if (first.empty()) {
            std::ostringstream msg;
            msg << "pseudo-determinant identity fails: pseudodet=" << pseudo.str()
                << " h=" << h.str() << " h'=" << h_prime.str() << " t(X)=" << t_x.str();
            first = msg.str();
        }
    }
    report.ok = all_ok;
    report.detail = all_ok ? "both enumeration identities hold exactly" : first;
    return report;
}

IdentityReport oracle_measure_check(const ChainComplex& x, int k, Side side,
                                    const EnumerationOptions& opts) {
    IdentityReport report;
    MatroidalMeasure m = matroidal_kernel(x, k, side);

    // Row-form reference data.
    IntMatrix coord = side == Side::lower ? x.boundary_dense(k)
                                          : IntMatrix(x.boundary_dense(k + 1).transpose());
    std::vector<Index> fixed_rows = independent_rows(coord);
    IntMatrix a = select_rows(coord, fixed_rows);
    Integer denom = gram_det(a);  // det(A A^T) over the fixed row basis

    // Torsion route normalizer.
    BaseSide enum_side = side == Side::lower ? BaseSide::base : BaseSide::cobase;
    std::vector<BaseRecord> records = enumerate_bases(x, k, enum_side, opts);
    Integer h = 0;
    for (const BaseRecord& r : records) h += r.weight;

    Rational total(0);
    for (const BaseRecord& r : records) {
        // The sampled set: bases themselves (lower) or cobase complements (upper).
        std::vector<Index> sample_set;
        if (side == Side::lower) {
            sample_set = r.cells;
        } else {
            for (Index c = 0; c < x.cell_count(k); ++c)
                if (!std::binary_search(r.cells.begin(), r.cells.end(), c))
                    sample_set.push_back(c);
        }
        // Route 1: squared subdeterminant over the fixed row basis. For the
        // upper side this is the complement measure evaluated at the cobase.
        const std::vector<Index>& det_cols = side == Side::lower ? sample_set : r.cells;
        Integer sub = det(select_columns(a, det_cols));
        Rational p_row(sub * sub, denom);
        // Route 2: kernel principal minor.
        Rational p_kernel = subset_probability(m, sample_set);
        // Route 3: squared torsion over h.
        Rational p_torsion(r.weight, h);
        report.instances += 1;
        if (p_row != p_kernel || p_kernel != p_torsion) {
            report.ok = false;
            std::ostringstream msg;
            msg << "probability routes disagree on " << cells_to_string(sample_set)
                << ": rowform=" << rational_to_string(p_row)
                << " kernel=" << rational_to_string(p_kernel)
                << " torsion=" << rational_to_string(p_torsion);
            report.detail = msg.str();
            return report;
        }
        total += p_kernel;
    }
    if (total != 1) {
        report.ok = false;
        report.detail = "probabilities sum to " + rational_to_string(total) + ", not 1";
        return report;
    }
    report.values["h"] = h.str();
    report.values["support"] = std::to_string(records.size());
    report.detail = "all three probability routes agree and sum to 1";
    return report;
}

}  // namespace cellforest
