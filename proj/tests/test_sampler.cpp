#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cellforest/coupling.hpp"
#include "cellforest/measures.hpp"
#include "cellforest/sampler.hpp"
#include "oracles.hpp"

using namespace cellforest;

TEST_CASE("degenerate kernels sample deterministically") {
    ChainComplex k3 = build_simplex_skeleton(3, 1);
    MatroidalMeasure zero = matroidal_kernel(k3, 0, Side::lower);
    for (std::uint64_t seed : {1ull, 2ull, 3ull})
        CHECK(sample_once(zero, seed).cells.empty());

    ChainComplex torus = build_cubical_torus(2, 2);
    MatroidalMeasure id_measure = matroidal_kernel(torus, 2, Side::upper);
    for (std::uint64_t seed : {1ull, 9ull}) {
        SampleDraw draw = sample_once(id_measure, seed);
        CHECK(draw.cells.size() == 4);  // the full ground set
    }
}

TEST_CASE("draw cardinality always equals the kernel rank") {
    ChainComplex torus = build_cubical_torus(2, 3);
    for (Side side : {Side::lower, Side::upper}) {
        for (int k = 0; k <= 2; ++k) {
            MatroidalMeasure m = matroidal_kernel(torus, k, side);
            for (std::uint64_t seed = 0; seed < 5; ++seed)
                CHECK(static_cast<Index>(sample_once(m, seed).cells.size()) == m.kernel.rank);
        }
    }
}

TEST_CASE("triangle tree frequencies are uniform") {
    ChainComplex k3 = build_simplex_skeleton(3, 1);
    MatroidalMeasure m = matroidal_kernel(k3, 1, Side::lower);
    const Index n = 30000;
    EmpiricalReport rep = empirical_frequencies(m, n, 11);
    REQUIRE(rep.subsets_tracked);
    Index total = 0;
    for (const auto& [cells, count] : rep.subset_counts) {
        CHECK(cells.size() == 2);
        double freq = static_cast<double>(count) / static_cast<double>(n);
        double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / static_cast<double>(n));
        CHECK(std::abs(freq - 1.0 / 3) <= 4 * sigma);
        total += count;
    }
    CHECK(total == n);
    CHECK(rep.subset_counts.size() == 3);
}

TEST_CASE("K4 edge frequencies match the exact inclusion probability") {
    ChainComplex k4 = build_simplex_skeleton(4, 1);
    MatroidalMeasure m = matroidal_kernel(k4, 1, Side::lower);
    const Index n = 20000;
    EmpiricalReport rep = empirical_frequencies(m, n, 5);
    double sigma = std::sqrt(0.25 / static_cast<double>(n));
    for (double f : rep.cell_frequency) CHECK(std::abs(f - 0.5) <= 4 * sigma);
}

TEST_CASE("10x10 torus mean edge frequency") {
    ChainComplex torus = build_cubical_torus(2, 10);
    MatroidalMeasure m = matroidal_kernel(torus, 1, Side::lower);
    const Index n = 5000;
    EmpiricalReport rep = empirical_frequencies(m, n, 3);
    double mean = 0;
    for (double f : rep.cell_frequency) mean += f;
    mean /= static_cast<double>(rep.cell_frequency.size());
    // the mean over edges has tiny variance; 4 sigma of a single cell is a
    // safely loose bound
    double sigma = std::sqrt(0.495 * 0.505 / static_cast<double>(n));
    CHECK(std::abs(mean - 0.495) <= 4 * sigma);
}

TEST_CASE("sampling is deterministic given the seed") {
    ChainComplex k4 = build_simplex_skeleton(4, 1);
    MatroidalMeasure m = matroidal_kernel(k4, 1, Side::lower);
    for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
        SampleDraw a = sample_once(m, seed);
        SampleDraw b = sample_once(m, seed);
        CHECK(a.cells == b.cells);
    }
    EmpiricalReport r1 = empirical_frequencies(m, 500, 42);
    EmpiricalReport r2 = empirical_frequencies(m, 500, 42);
    CHECK(r1.cell_counts == r2.cell_counts);
    CHECK(r1.subset_counts == r2.subset_counts);
    EmpiricalReport r3 = empirical_frequencies(m, 500, 43);
    CHECK(r1.subset_counts != r3.subset_counts);
}

TEST_CASE("exact fallback path produces valid draws") {
    ChainComplex k3 = build_simplex_skeleton(3, 1);
    MatroidalMeasure m = matroidal_kernel(k3, 1, Side::lower);
    SampleOptions force;
    force.pivot_tol = 0.9;  // every pivot (2/3 or smaller) takes the exact route
    std::map<std::vector<Index>, Index> counts;
    const Index n = 3000;
    for (Index i = 0; i < n; ++i) {
        force.stream = static_cast<std::uint64_t>(i);
        SampleDraw draw = sample_once(m, 77, force);
        REQUIRE(draw.cells.size() == 2);
        counts[draw.cells] += 1;
    }
    CHECK(counts.size() == 3);
    for (const auto& [cells, count] : counts) {
        double freq = static_cast<double>(count) / static_cast<double>(n);
        double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / static_cast<double>(n));
        CHECK(std::abs(freq - 1.0 / 3) <= 4 * sigma);
    }
    // deterministic too
    force.stream = 5;
    CHECK(sample_once(m, 77, force).cells == sample_once(m, 77, force).cells);
}

TEST_CASE("fp graph kernel matches the exact kernel") {
    ChainComplex torus = build_cubical_torus(2, 4);
    MatroidalMeasure exact = matroidal_kernel(torus, 1, Side::lower);
    FpProjection fp = lower_kernel_fp_graph(torus);
    REQUIRE(fp.rank == exact.kernel.rank);
    double max_err = 0;
    for (Index i = 0; i < fp.q.rows(); ++i)
        for (Index j = 0; j < fp.q.cols(); ++j)
            max_err = std::max(max_err, std::abs(fp.q(i, j) - to_double(exact.kernel.q(i, j))));
    CHECK(max_err < 1e-9);

    CounterRng rng(2, 0);
    std::vector<Index> draw = sample_projection_fp(fp.q, fp.rank, rng, 1e-9);
    CHECK(static_cast<Index>(draw.size()) == fp.rank);
}

TEST_CASE("forest statistics on spanning trees") {
    ChainComplex k4 = build_simplex_skeleton(4, 1);
    MatroidalMeasure m = matroidal_kernel(k4, 1, Side::lower);
    RegionSelection full = RegionSelection::full(k4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SampleDraw draw = sample_once(m, seed);
        ForestStats st = forest_statistics(draw, k4, full, 1, 0);
        CHECK(st.components == 1);  // a spanning tree is connected
        CHECK(st.betti_km1 == 1);
        CHECK(st.boundary_size == 0);
        CHECK(st.marked_degree >= 1);
    }
}

TEST_CASE("wired draws obey the boundary bound on a torus window") {
    ChainComplex torus = build_cubical_torus(2, 6);
    RegionSelection wired_region = torus_box_region(torus, 2, 6, {0, 0}, {5, 5});
    RegionSelection window = torus_box_region(torus, 2, 6, {1, 1}, {3, 3});
    MatroidalMeasure wired = matroidal_kernel(torus, 1, Side::lower, wired_region);
    for (Index i = 0; i < 50; ++i) {
        SampleOptions opts;
        opts.stream = static_cast<std::uint64_t>(i);
        SampleDraw draw = sample_once(wired, 9, opts);
        ForestStats st = forest_statistics(draw, torus, window, 1, 0);
        CHECK(st.boundary_size == 8);
        CHECK(st.bound_holds);
    }
}

TEST_CASE("domination witness feasibility") {
    ChainComplex torus = build_cubical_torus(2, 2);
    MatroidalMeasure lower = matroidal_kernel(torus, 1, Side::lower);
    MatroidalMeasure upper = matroidal_kernel(torus, 1, Side::upper);

    CouplingResult ok = domination_witness(lower, upper);
    CHECK(ok.feasible);
    // the joint distribution has the right marginals and support
    std::vector<Rational> src_mass(ok.sources.size(), Rational(0));
    std::vector<Rational> dst_mass(ok.targets.size(), Rational(0));
    for (const auto& [i, j, mass] : ok.joint) {
        const auto& t1 = ok.sources[static_cast<size_t>(i)];
        const auto& t2 = ok.targets[static_cast<size_t>(j)];
        CHECK(std::includes(t2.begin(), t2.end(), t1.begin(), t1.end()));
        src_mass[static_cast<size_t>(i)] += mass;
        dst_mass[static_cast<size_t>(j)] += mass;
    }
    for (size_t i = 0; i < ok.sources.size(); ++i) CHECK(src_mass[i] == ok.source_mass[i]);
    for (size_t j = 0; j < ok.targets.size(); ++j) CHECK(dst_mass[j] == ok.target_mass[j]);

    CouplingResult self = domination_witness(lower, lower);
    CHECK(self.feasible);

    CouplingResult reversed = domination_witness(upper, lower);
    CHECK(!reversed.feasible);
    CHECK(reversed.violator_source_mass > reversed.violator_target_mass);

    ChainComplex big = build_cubical_torus(2, 3);
    MatroidalMeasure big_lower = matroidal_kernel(big, 1, Side::lower);
    CHECK_THROWS_AS(domination_witness(big_lower, big_lower), std::invalid_argument);
}

TEST_CASE("interior measures are dominated by full measures") {
    ChainComplex torus = build_cubical_torus(2, 2);
    RegionSelection box = RegionSelection::full(torus);
    // a proper subregion of the 2x2 torus: drop one square
    std::vector<std::vector<Index>> cells = {box.cells(0), box.cells(1), {0, 1, 2}};
    RegionSelection sub = RegionSelection::from_cells(torus, cells);
    MatroidalMeasure wired = embed_in_ambient(matroidal_kernel(torus, 1, Side::lower, sub));
    MatroidalMeasure full_lower = matroidal_kernel(torus, 1, Side::lower);
    CouplingResult res = domination_witness(wired, full_lower);
    CHECK(res.feasible);

    MatroidalMeasure wired_up = embed_in_ambient(matroidal_kernel(torus, 1, Side::upper, sub));
    MatroidalMeasure full_upper = matroidal_kernel(torus, 1, Side::upper);
    CouplingResult res_up = domination_witness(wired_up, full_upper);
    CHECK(res_up.feasible);
}

TEST_CASE("single-draw frequencies are zero or one") {
    ChainComplex k4 = build_simplex_skeleton(4, 1);
    MatroidalMeasure m = matroidal_kernel(k4, 1, Side::lower);
    EmpiricalReport rep = empirical_frequencies(m, 1, 9);
    for (double f : rep.cell_frequency) CHECK((f == 0.0 || f == 1.0));
}

TEST_CASE("empirical report serializations") {
    ChainComplex k3 = build_simplex_skeleton(3, 1);
    MatroidalMeasure m = matroidal_kernel(k3, 1, Side::lower);
    EmpiricalReport rep = empirical_frequencies(m, 50, 4);
    std::string json = rep.to_json();
    CHECK(json.find("\"n_samples\": 50") != std::string::npos);
    std::string csv = rep.to_csv();
    CHECK(csv.rfind("cell,count,frequency,stderr\n", 0) == 0);
}
