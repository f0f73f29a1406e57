#pragma once

#include <tuple>
#include <vector>

#include "cellforest/measures.hpp"

namespace cellforest {

/// Outcome of the exact monotone-coupling feasibility check between two
/// measures on the same ground set. When feasible, `joint` is a distribution
/// on pairs (T1, T2) with T1 a subset of T2 and the two prescribed marginals.
/// When infeasible, the violator fields give a Hall certificate: a family of
/// m1-support sets whose total mass exceeds the total mass of every m2-support
/// set containing one of them.
struct CouplingResult {
    bool feasible = false;
    std::vector<std::vector<Index>> sources;  // support of m1 (cell index sets)
    std::vector<std::vector<Index>> targets;  // support of m2
    std::vector<Rational> source_mass;
    std::vector<Rational> target_mass;
    std::vector<std::tuple<Index, Index, Rational>> joint;  // (source, target, mass)
    std::vector<Index> violator_sources;
    std::vector<Index> violator_targets;
    Rational violator_source_mass = 0;
    Rational violator_target_mass = 0;
};

/// Transportation feasibility with arcs only for T1 subset of T2, solved by
/// exact rational max-flow. Requires a common ground set of at most 16 cells.
CouplingResult domination_witness(const MatroidalMeasure& m1, const MatroidalMeasure& m2);

}  // namespace cellforest
