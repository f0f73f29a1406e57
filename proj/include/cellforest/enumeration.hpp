#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cellforest/chain_complex.hpp"
#include "cellforest/exact_linalg.hpp"
#include "cellforest/measures.hpp"

namespace cellforest {

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfiniteQuotient : std::runtime_error {
    Index rank_deficit;
    InfiniteQuotient(const std::string& msg, Index deficit)
        : std::runtime_error(msg), rank_deficit(deficit) {}
};

struct EnumerationOptions {
    Integer subset_budget = 10000000;
};

enum class BaseSide { base, cobase };

/// One enumerated base (or cobase). For bases, torsion is the order of the
/// torsion subgroup of H_{k-1}(X_T; Z); for cobases it is the torsion of the
/// relative group H_k(X, X_{complement}; Z). weight = torsion^2.
struct BaseRecord {
    std::vector<Index> cells;
    Integer torsion = 1;
    Integer weight = 1;
};

struct EnumerationSummary {
    int degree = 0;
    Integer base_count = 0;
    Integer h = 0;  // sum of squared torsions
    std::map<Integer, Integer> torsion_histogram;
};

/// Visit every k-base (independent size-rank column set of d_k) or k-cobase
/// (independent size-rank row set of d_{k+1}) in colexicographic order,
/// pruning dependent prefixes. The callback may return false to stop early.
/// Throws BudgetExceeded when C(f_k, rank) exceeds the subset budget.
void for_each_base(const ChainComplex& x, int k, BaseSide side, const EnumerationOptions& opts,
                   const std::function<bool(const std::vector<Index>&)>& visit);

std::vector<BaseRecord> enumerate_bases(const ChainComplex& x, int k, BaseSide side,
                                        const EnumerationOptions& opts = {});

/// Torsion weight of a candidate set. Lower side: invariant factors of d_k
/// restricted to the columns t (torsion of H_{k-1}(X_t; Z)). Upper side:
/// invariant factors of d_{k+1} with rows restricted to the complement of t
/// (torsion of H_k(X, X_t; Z)). The torsion order equals the full group order
/// exactly when t satisfies the base / cobase-complement precondition.
TorsionReport torsion_weight(const ChainComplex& x, int k, const std::vector<Index>& t,
                             Side side);

/// Alternative presentation of the upper-side relative torsion through the
/// cocycle lattice in degree k+1; agrees with torsion_weight(upper).
Integer upper_torsion_alt(const ChainComplex& x, int k, const std::vector<Index>& t);

EnumerationSummary weighted_sum_h(const ChainComplex& x, int k,
                                  const EnumerationOptions& opts = {});

/// Order of the quotient of the integer cycle lattice Z_k(X) by the sum of
/// its rational-boundary part and the cycles supported off s. Throws
/// InfiniteQuotient with the rank deficit when the quotient is infinite.
Integer lattice_quotient_order(const ChainComplex& x, int k, const std::vector<Index>& s);

struct IdentityReport {
    bool ok = true;
    Integer instances = 0;
    std::string detail;
    std::map<std::string, std::string> values;
};

/// |det d_{S,T}| * t_{d-2}(X) = t_{d-1}(T) * t_{d-2}(comp S) * t'_{d-1}(S)
/// for every d-base T and (d-1)-cobase S.
IdentityReport verify_key_lemma(const ChainComplex& x, const EnumerationOptions& opts = {});

/// The two enumeration identities: the cobase formula for h_{d-1}(X) and the
/// pseudo-determinant factorization of d_d d_d^T.
IdentityReport verify_count_corollary(const ChainComplex& x,
                                      const EnumerationOptions& opts = {});

/// Recomputes every base probability three ways (fixed-cobase quotient of
/// squared subdeterminants, kernel principal minor, squared torsion over h)
/// and demands exact agreement plus total mass one.
IdentityReport oracle_measure_check(const ChainComplex& x, int k, Side side,
                                    const EnumerationOptions& opts = {});

}  // namespace cellforest
