// Command-line surface for building complexes, computing matroidal kernels,
// sampling, enumeration ground truth, identity verification, and the lattice
// experiments. Exit codes: 0 success, 1 identity violation, 2 usage error,
// 3 enumeration budget exceeded.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellforest/chain_complex.hpp"
#include "cellforest/complex_io.hpp"
#include "cellforest/coupling.hpp"
#include "cellforest/enumeration.hpp"
#include "cellforest/exact_linalg.hpp"
#include "cellforest/measures.hpp"
#include "cellforest/sampler.hpp"

using namespace cellforest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct ComplexSpec {
    std::string file;
    std::vector<int> simplex;  // n k_max
    std::vector<int> torus;    // d n

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--complex", file, "complex file to load");
        cmd->add_option("--simplex", simplex, "simplex skeleton: n k_max")->expected(2);
        cmd->add_option("--torus", torus, "cubical torus: d n")->expected(2);
    }

    ChainComplex build() const {
        int given = (!file.empty()) + (!simplex.empty()) + (!torus.empty());
        if (given != 1)
            throw CLI::ValidationError("give exactly one of --complex, --simplex, --torus");
        if (!file.empty()) return load_complex(file);
        if (!simplex.empty()) return build_simplex_skeleton(simplex[0], simplex[1]);
        return build_cubical_torus(torus[0], torus[1]);
    }
};

EnumerationOptions options_from_env(long long budget_flag) {
    EnumerationOptions opts;
    if (budget_flag > 0) {
        opts.subset_budget = budget_flag;
    } else if (const char* env = std::getenv("CELLFOREST_BUDGET")) {
        opts.subset_budget = Integer(std::string(env));
    }
    return opts;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
}

Integer integer_pow(Integer base, Integer exp) {
    Integer r = 1;
    while (exp > 0) {
        r *= base;
        --exp;
    }
    return r;
}

Integer binomial_int(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    Integer r = 1;
    for (long long i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

// ---------------------------------------------------------------------------
// graph helpers for the torus experiments

struct EdgeList {
    Index vertices = 0;
    std::vector<std::pair<Index, Index>> ends;
};

// Non-bridge edges (edges lying on a cycle) of a multigraph, by DFS lowlink.
std::vector<bool> cycle_edges(const EdgeList& g) {
    std::vector<std::vector<std::pair<Index, Index>>> adj(static_cast<size_t>(g.vertices));
    for (size_t e = 0; e < g.ends.size(); ++e) {
        adj[static_cast<size_t>(g.ends[e].first)].push_back({g.ends[e].second, static_cast<Index>(e)});
        adj[static_cast<size_t>(g.ends[e].second)].push_back({g.ends[e].first, static_cast<Index>(e)});
    }
    std::vector<bool> in_cycle(g.ends.size(), true);
    std::vector<Index> disc(static_cast<size_t>(g.vertices), -1), low(static_cast<size_t>(g.vertices), 0);
    Index timer = 0;
    struct Frame {
        Index v;
        Index parent_edge;
        size_t next;
    };
    for (Index root = 0; root < g.vertices; ++root) {
        if (disc[static_cast<size_t>(root)] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[static_cast<size_t>(f.v)].size()) {
                auto [to, eid] = adj[static_cast<size_t>(f.v)][f.next++];
                if (eid == f.parent_edge) continue;
                if (disc[static_cast<size_t>(to)] < 0) {
                    disc[static_cast<size_t>(to)] = low[static_cast<size_t>(to)] = timer++;
                    stack.push_back({to, eid, 0});
                } else {
                    low[static_cast<size_t>(f.v)] =
                        std::min(low[static_cast<size_t>(f.v)], disc[static_cast<size_t>(to)]);
                }
            } else {
                Index v = f.v, pe = f.parent_edge;
                stack.pop_back();
                if (!stack.empty()) {
                    Index parent = stack.back().v;
                    low[static_cast<size_t>(parent)] =
                        std::min(low[static_cast<size_t>(parent)], low[static_cast<size_t>(v)]);
                    if (low[static_cast<size_t>(v)] > disc[static_cast<size_t>(parent)])
                        in_cycle[static_cast<size_t>(pe)] = false;  // bridge
                }
            }
        }
    }
    return in_cycle;
}

// torus edge decoding for d = 2: index = (x n + y) * 2 + dir
struct TorusEdge {
    int x, y, dir;
};

TorusEdge decode_edge(Index e, int n) {
    int dir = static_cast<int>(e % 2);
    Index base = e / 2;
    return {static_cast<int>(base / n), static_cast<int>(base % n), dir};
}

EdgeList dual_subgraph(const std::vector<Index>& dual_edges, int n) {
    EdgeList g;
    g.vertices = static_cast<Index>(n) * n;
    for (Index de : dual_edges) {
        TorusEdge t = decode_edge(de, n);
        Index from = static_cast<Index>(t.x) * n + t.y;
        Index to = t.dir == 0 ? static_cast<Index>((t.x + 1) % n) * n + t.y
                              : static_cast<Index>(t.x) * n + (t.y + 1) % n;
        g.ends.push_back({from, to});
    }
    return g;
}

std::string render_torus_svg(int n, const std::vector<Index>& tree_edges,
                             const std::vector<Index>& dual_cycle_edges) {
    const int unit = 10, margin = 10;
    const int size = 2 * margin + unit * n;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    svg << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"#ffffff\"/>\n";
    auto emit_edge = [&](std::ostringstream& out, int x2, int y2, int dir, int halfoff) {
        // coordinates in tenths of a unit, offset by halfoff (0 primal, 5 dual)
        int px = margin * 10 + x2 * unit * 10 + halfoff * unit;
        int py = margin * 10 + y2 * unit * 10 + halfoff * unit;
        int dx = dir == 0 ? unit * 10 : 0;
        int dy = dir == 0 ? 0 : unit * 10;
        auto line = [&](int ax, int ay, int bx, int by) {
            out << "<line x1=\"" << ax / 10.0 << "\" y1=\"" << ay / 10.0 << "\" x2=\""
                << bx / 10.0 << "\" y2=\"" << by / 10.0 << "\"/>\n";
        };
        line(px, py, px + dx / 2, py + dy / 2);
        // second half from the wrapped far endpoint backwards
        int qx = margin * 10 + ((x2 + (dir == 0)) % n) * unit * 10 + halfoff * unit;
        int qy = margin * 10 + ((y2 + (dir == 1)) % n) * unit * 10 + halfoff * unit;
        line(qx, qy, qx - dx / 2, qy - dy / 2);
    };
    std::ostringstream gray, black;
    for (Index e : tree_edges) {
        TorusEdge t = decode_edge(e, n);
        emit_edge(gray, t.x, t.y, t.dir, 0);
    }
    for (Index e : dual_cycle_edges) {
        TorusEdge t = decode_edge(e, n);
        emit_edge(black, t.x, t.y, t.dir, 5);
    }
    svg << "<g stroke=\"#b3b3b3\" stroke-width=\"2\" stroke-linecap=\"round\">\n"
        << gray.str() << "</g>\n";
    svg << "<g stroke=\"#000000\" stroke-width=\"2\" stroke-linecap=\"round\">\n"
        << black.str() << "</g>\n";
    svg << "</svg>\n";
    return svg.str();
}

// ---------------------------------------------------------------------------
// subcommand bodies

int run_kernel(const ComplexSpec& spec, int k, const std::string& side_name,
               const std::vector<int>& box, const std::string& out_path) {
    ChainComplex x = spec.build();
    Side side = side_name == "upper" ? Side::upper : Side::lower;
    std::optional<MatroidalMeasure> m;
    if (!box.empty()) {
        if (spec.torus.empty() || spec.torus[0] != 2)
            throw CLI::ValidationError("--box requires --torus with d = 2");
        int n = spec.torus[1];
        RegionSelection region =
            torus_box_region(x, 2, n, {box[0], box[1]}, {box[2], box[3]});
        m = matroidal_kernel(x, k, side, region);
    } else {
        m = matroidal_kernel(x, k, side);
    }
    std::cout << m->id << ": ground " << m->ground_size() << " cells, rank " << m->kernel.rank
              << "\n";
    std::cout << std::left << std::setw(8) << "cell" << "diagonal\n";
    for (Index i = 0; i < m->ground_size(); ++i)
        std::cout << std::left << std::setw(8) << m->ground_cells[static_cast<size_t>(i)]
                  << rational_to_string(m->kernel.q(i, i)) << "\n";
    if (!out_path.empty()) {
        nlohmann::json j;
        j["measure"] = m->id;
        j["rank"] = m->kernel.rank;
        j["ground"] = m->ground_cells;
        j["diagonal"] = nlohmann::json::array();
        for (Index i = 0; i < m->ground_size(); ++i)
            j["diagonal"].push_back(rational_to_string(m->kernel.q(i, i)));
        write_text(out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

int run_sample(const ComplexSpec& spec, int k, const std::string& side_name,
               const std::vector<int>& box, std::uint64_t seed, std::uint64_t stream,
               const std::string& out_path) {
    ChainComplex x = spec.build();
    Side side = side_name == "upper" ? Side::upper : Side::lower;
    std::vector<Index> cells;
    std::string measure_id;
    if (box.empty() && side == Side::lower && k == 1 && x.cell_count(1) > 512) {
        // graphs too large for the exact kernel: double-precision path
        FpProjection proj = lower_kernel_fp_graph(x);
        CounterRng rng(seed, stream);
        cells = sample_projection_fp(proj.q, proj.rank, rng, 1e-9);
        measure_id = "lower k=1 full (double precision)";
    } else {
        std::optional<MatroidalMeasure> m;
        if (!box.empty()) {
            if (spec.torus.empty() || spec.torus[0] != 2)
                throw CLI::ValidationError("--box requires --torus with d = 2");
            RegionSelection region =
                torus_box_region(x, 2, spec.torus[1], {box[0], box[1]}, {box[2], box[3]});
            m = matroidal_kernel(x, k, side, region);
        } else {
            m = matroidal_kernel(x, k, side);
        }
        SampleOptions opts;
        opts.stream = stream;
        SampleDraw draw = sample_once(*m, seed, opts);
        cells = draw.cells;
        measure_id = m->id;
    }
    std::cout << measure_id << " seed=" << seed << " stream=" << stream << "\n";
    std::cout << "cells (" << cells.size() << "):";
    for (Index c : cells) std::cout << " " << c;
    std::cout << "\n";
    if (!out_path.empty()) {
        nlohmann::json j;
        j["measure"] = measure_id;
        j["seed"] = seed;
        j["stream"] = stream;
        j["cells"] = cells;
        write_text(out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

int run_enumerate(const ComplexSpec& spec, int k, const std::string& side_name,
                  long long budget, const std::string& out_path, const std::string& csv_path) {
    ChainComplex x = spec.build();
    BaseSide side = side_name == "cobase" ? BaseSide::cobase : BaseSide::base;
    EnumerationOptions opts = options_from_env(budget);
    std::vector<BaseRecord> records = enumerate_bases(x, k, side, opts);
    Integer h = 0;
    std::map<Integer, Integer> hist;
    for (const BaseRecord& r : records) {
        h += r.weight;
        hist[r.torsion] += 1;
    }
    std::cout << (side == BaseSide::base ? "bases" : "cobases") << " of degree " << k << ": "
              << records.size() << "\n";
    std::cout << "weighted sum h = " << h.str() << "\n";
    std::cout << "torsion histogram:\n";
    for (const auto& [t, c] : hist) std::cout << "  " << t.str() << " -> " << c.str() << "\n";
    if (!out_path.empty()) {
        nlohmann::json j;
        j["degree"] = k;
        j["side"] = side == BaseSide::base ? "base" : "cobase";
        j["count"] = records.size();
        j["h"] = h.str();
        j["torsion_histogram"] = nlohmann::json::array();
        for (const auto& [t, c] : hist)
            j["torsion_histogram"].push_back({{"torsion", t.str()}, {"count", c.str()}});
        write_text(out_path, j.dump(2) + "\n");
    }
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "torsion,count\n";
        for (const auto& [t, c] : hist) csv << t.str() << "," << c.str() << "\n";
        write_text(csv_path, csv.str());
    }
    return kExitOk;
}

int report_result(bool ok, const std::string& label, const std::string& detail,
                  const std::map<std::string, std::string>& values, const std::string& out_path) {
    std::cout << (ok ? "[pass] " : "[FAIL] ") << label << ": " << detail << "\n";
    for (const auto& [key, val] : values) std::cout << "  " << key << " = " << val << "\n";
    if (!out_path.empty()) {
        nlohmann::json j;
        j["suite"] = label;
        j["ok"] = ok;
        j["detail"] = detail;
        for (const auto& [key, val] : values) j["values"][key] = val;
        write_text(out_path, j.dump(2) + "\n");
    }
    return ok ? kExitOk : kExitViolation;
}

int run_verify_kalai(int n, int k, long long budget, const std::string& out_path) {
    auto t0 = std::chrono::steady_clock::now();
    ChainComplex x = build_simplex_skeleton(n, k);
    EnumerationSummary sum = weighted_sum_h(x, k, options_from_env(budget));
    Integer expected = integer_pow(n, binomial_int(n - 2, k));
    auto t1 = std::chrono::steady_clock::now();
    std::map<std::string, std::string> values;
    values["h"] = sum.h.str();
    values["expected n^C(n-2,k)"] = expected.str();
    values["bases"] = sum.base_count.str();
    values["seconds"] = std::to_string(std::chrono::duration<double>(t1 - t0).count());
    bool ok = sum.h == expected;
    return report_result(ok, "kalai",
                         ok ? "torsion-weighted enumeration matches the closed form"
                            : "enumeration disagrees with the closed form",
                         values, out_path);
}

int run_verify_duality(int n, const std::string& out_path) {
    ChainComplex x = build_cubical_torus(2, n);
    DualTorusMap dual = dual_torus_map(x);
    MatroidalMeasure lower = matroidal_kernel(x, 1, Side::lower);
    MatroidalMeasure upper_dual = matroidal_kernel(dual.dual, 1, Side::upper);
    const Index f1 = x.cell_count(1);
    bool ok = true;
    std::string detail = "dual upper kernel equals the conjugated complement, entrywise";
    for (Index e = 0; e < f1 && ok; ++e)
        for (Index f = 0; f < f1 && ok; ++f) {
            Rational lhs = upper_dual.kernel.q(dual.phi[1][static_cast<size_t>(e)],
                                               dual.phi[1][static_cast<size_t>(f)]);
            Rational rhs = (e == f ? Rational(1) : Rational(0)) - lower.kernel.q(e, f);
            if (lhs != rhs) {
                ok = false;
                detail = "kernel identity fails at edge pair (" + std::to_string(e) + "," +
                         std::to_string(f) + ")";
            }
        }
    std::map<std::string, std::string> values;
    values["edges"] = std::to_string(f1);
    values["lower rank"] = std::to_string(lower.kernel.rank);
    values["dual upper rank"] = std::to_string(upper_dual.kernel.rank);
    return report_result(ok, "duality", detail, values, out_path);
}

int run_verify_identity(const ComplexSpec& spec, const std::string& which, long long budget,
                        const std::string& out_path) {
    ChainComplex x = spec.build();
    EnumerationOptions opts = options_from_env(budget);
    auto t0 = std::chrono::steady_clock::now();
    IdentityReport rep =
        which == "key" ? verify_key_lemma(x, opts) : verify_count_corollary(x, opts);
    auto t1 = std::chrono::steady_clock::now();
    rep.values["instances"] = rep.instances.str();
    rep.values["seconds"] = std::to_string(std::chrono::duration<double>(t1 - t0).count());
    return report_result(rep.ok, which, rep.detail, rep.values, out_path);
}

int run_verify_oracle(const ComplexSpec& spec, int k, const std::string& side_name,
                      long long budget, const std::string& out_path) {
    ChainComplex x = spec.build();
    Side side = side_name == "upper" ? Side::upper : Side::lower;
    IdentityReport rep = oracle_measure_check(x, k, side, options_from_env(budget));
    rep.values["instances"] = rep.instances.str();
    return report_result(rep.ok, "oracle", rep.detail, rep.values, out_path);
}

int run_experiment_torus_duality(int n, std::uint64_t seed, const std::string& out_path,
                                 const std::string& csv_path) {
    ChainComplex x = build_cubical_torus(2, n);
    DualTorusMap dual = dual_torus_map(x);

    std::vector<Index> tree;
    if (x.cell_count(1) <= 512) {
        MatroidalMeasure lower = matroidal_kernel(x, 1, Side::lower);
        tree = sample_once(lower, seed).cells;
    } else {
        FpProjection proj = lower_kernel_fp_graph(x);
        CounterRng rng(seed, 0);
        tree = sample_projection_fp(proj.q, proj.rank, rng, 1e-9);
    }

    // dual sample: conjugated complement of the tree
    std::vector<Index> dual_sample;
    for (Index e = 0; e < x.cell_count(1); ++e)
        if (!std::binary_search(tree.begin(), tree.end(), e))
            dual_sample.push_back(dual.phi[1][static_cast<size_t>(e)]);
    std::sort(dual_sample.begin(), dual_sample.end());

    EdgeList sub = dual_subgraph(dual_sample, n);
    std::vector<bool> on_cycle = cycle_edges(sub);
    std::vector<Index> black;
    for (size_t i = 0; i < dual_sample.size(); ++i)
        if (on_cycle[i]) black.push_back(dual_sample[i]);

    std::cout << "torus-duality n=" << n << " seed=" << seed << ": tree edges " << tree.size()
              << ", dual cycle edges " << black.size() << "\n";
    if (!out_path.empty()) write_text(out_path, render_torus_svg(n, tree, black));
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "kind,edge\n";
        for (Index e : tree) csv << "tree," << e << "\n";
        for (Index e : black) csv << "dual_cycle," << e << "\n";
        write_text(csv_path, csv.str());
    }
    return kExitOk;
}

int run_experiment_cellprob(int d, int k, const std::string& n_list, const std::string& csv_path) {
    std::ostringstream csv;
    csv << "n,value,limit,abs_gap\n";
    std::cout << std::left << std::setw(6) << "n" << std::setw(16) << "value" << std::setw(10)
              << "limit" << "gap\n";
    for (int n : parse_int_list(n_list)) {
        ChainComplex x = build_cubical_torus(d, n);
        MatroidalMeasure m = matroidal_kernel(x, k, Side::lower);
        const Rational value = m.kernel.q(0, 0);
        for (Index i = 1; i < m.ground_size(); ++i)
            if (m.kernel.q(i, i) != value)
                throw std::runtime_error("cell probabilities are not constant across cells");
        Rational limit(k, d);
        Rational gap = value - limit;
        if (gap < 0) gap = -gap;
        std::cout << std::left << std::setw(6) << n << std::setw(16) << rational_to_string(value)
                  << std::setw(10) << rational_to_string(limit) << rational_to_string(gap)
                  << "\n";
        csv << n << "," << rational_to_string(value) << "," << rational_to_string(limit) << ","
            << rational_to_string(gap) << "\n";
    }
    if (!csv_path.empty()) write_text(csv_path, csv.str());
    return kExitOk;
}

int run_experiment_degree(int n, Index samples, std::uint64_t seed, const std::string& csv_path) {
    ChainComplex x = build_cubical_torus(2, n);
    MatroidalMeasure m = matroidal_kernel(x, 1, Side::lower);
    // exact expectation: sum of kernel diagonal over edges at the marked vertex
    Rational exact(0);
    IncidenceMatrix d1t = x.boundary(1).transpose();
    const Index marked = 0;
    for (IncidenceMatrix::InnerIterator it(d1t, marked); it; ++it)
        exact += m.kernel.q(it.row(), it.row());
    RegionSelection full = RegionSelection::full(x);
    double sum = 0, sumsq = 0;
    for (Index i = 0; i < samples; ++i) {
        SampleOptions opts;
        opts.stream = static_cast<std::uint64_t>(i);
        SampleDraw draw = sample_once(m, seed, opts);
        ForestStats st = forest_statistics(draw, x, full, 1, marked);
        sum += static_cast<double>(st.marked_degree);
        sumsq += static_cast<double>(st.marked_degree) * static_cast<double>(st.marked_degree);
    }
    double mean = sum / static_cast<double>(samples);
    double var = sumsq / static_cast<double>(samples) - mean * mean;
    double se = std::sqrt(var / static_cast<double>(samples));
    double z = se > 0 ? (mean - to_double(exact)) / se : 0;
    std::cout << "degree n=" << n << " samples=" << samples << " seed=" << seed << "\n";
    std::cout << "  exact expectation " << rational_to_string(exact) << " = "
              << to_double(exact) << "\n";
    std::cout << "  sample mean " << mean << " (se " << se << ", z " << z << ")\n";
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "n,samples,seed,exact,mean,se,z\n";
        csv << n << "," << samples << "," << seed << "," << rational_to_string(exact) << ","
            << mean << "," << se << "," << z << "\n";
        write_text(csv_path, csv.str());
    }
    return kExitOk;
}

int run_experiment_cycle_scaling(const std::string& n_list, Index samples, std::uint64_t seed,
                                 const std::string& csv_path) {
    std::ostringstream csv;
    csv << "n,samples,mean_cycle_edges,se,n_to_5_4,ratio\n";
    std::cout << std::left << std::setw(6) << "n" << std::setw(18) << "mean cycle edges"
              << std::setw(12) << "se" << std::setw(12) << "n^(5/4)" << "ratio\n";
    for (int n : parse_int_list(n_list)) {
        ChainComplex x = build_cubical_torus(2, n);
        DualTorusMap dual = dual_torus_map(x);
        FpProjection proj = lower_kernel_fp_graph(x);
        double sum = 0, sumsq = 0;
        for (Index i = 0; i < samples; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(i));
            std::vector<Index> tree = sample_projection_fp(proj.q, proj.rank, rng, 1e-9);
            std::vector<Index> dual_sample;
            for (Index e = 0; e < x.cell_count(1); ++e)
                if (!std::binary_search(tree.begin(), tree.end(), e))
                    dual_sample.push_back(dual.phi[1][static_cast<size_t>(e)]);
            std::sort(dual_sample.begin(), dual_sample.end());
            EdgeList sub = dual_subgraph(dual_sample, n);
            std::vector<bool> on_cycle = cycle_edges(sub);
            double count = static_cast<double>(std::count(on_cycle.begin(), on_cycle.end(), true));
            sum += count;
            sumsq += count * count;
        }
        double mean = sum / static_cast<double>(samples);
        double var = sumsq / static_cast<double>(samples) - mean * mean;
        double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
        double scale = std::pow(static_cast<double>(n), 1.25);
        std::cout << std::left << std::setw(6) << n << std::setw(18) << mean << std::setw(12)
                  << se << std::setw(12) << scale << mean / scale << "\n";
        csv << n << "," << samples << "," << mean << "," << se << "," << scale << ","
            << mean / scale << "\n";
    }
    if (!csv_path.empty()) write_text(csv_path, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact matroidal measures on finite CW-complexes"};
    app.require_subcommand(1);

    // kernel ---------------------------------------------------------------
    auto* kernel_cmd = app.add_subcommand("kernel", "compute a projection kernel");
    ComplexSpec kernel_spec;
    kernel_spec.add_flags(kernel_cmd);
    int kernel_k = 1;
    std::string kernel_side = "lower";
    std::vector<int> kernel_box;
    std::string kernel_out;
    kernel_cmd->add_option("--k", kernel_k, "degree")->required();
    kernel_cmd->add_option("--side", kernel_side, "lower|upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    kernel_cmd->add_option("--box", kernel_box, "interior region x0 y0 w h (torus d=2)")
        ->expected(4);
    kernel_cmd->add_option("--out", kernel_out, "JSON report path");

    // sample ---------------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "draw one subset from a measure");
    ComplexSpec sample_spec;
    sample_spec.add_flags(sample_cmd);
    int sample_k = 1;
    std::string sample_side = "lower";
    std::vector<int> sample_box;
    std::uint64_t sample_seed = 0, sample_stream = 0;
    std::string sample_out;
    sample_cmd->add_option("--k", sample_k, "degree")->required();
    sample_cmd->add_option("--side", sample_side, "lower|upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    sample_cmd->add_option("--box", sample_box, "interior region x0 y0 w h (torus d=2)")
        ->expected(4);
    sample_cmd->add_option("--seed", sample_seed, "RNG seed")->capture_default_str();
    sample_cmd->add_option("--stream", sample_stream, "RNG stream index")->capture_default_str();
    sample_cmd->add_option("--out", sample_out, "JSON report path");

    // enumerate ------------------------------------------------------------
    auto* enum_cmd = app.add_subcommand("enumerate", "enumerate bases or cobases with torsion");
    ComplexSpec enum_spec;
    enum_spec.add_flags(enum_cmd);
    int enum_k = 1;
    std::string enum_side = "base";
    long long enum_budget = 0;
    std::string enum_out, enum_csv;
    enum_cmd->add_option("--k", enum_k, "degree")->required();
    enum_cmd->add_option("--side", enum_side, "base|cobase")
        ->check(CLI::IsMember({"base", "cobase"}));
    enum_cmd->add_option("--budget", enum_budget, "subset budget (default 1e7, or CELLFOREST_BUDGET)");
    enum_cmd->add_option("--out", enum_out, "JSON report path");
    enum_cmd->add_option("--csv", enum_csv, "CSV histogram path");

    // verify ---------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "exact identity suites");
    verify_cmd->require_subcommand(1);

    auto* kalai_cmd = verify_cmd->add_subcommand("kalai", "torsion-weighted simplex enumeration");
    int kalai_n = 6, kalai_k = 2;
    long long kalai_budget = 0;
    std::string kalai_out;
    kalai_cmd->add_option("--n", kalai_n, "number of vertices")->required();
    kalai_cmd->add_option("--k", kalai_k, "degree")->required();
    kalai_cmd->add_option("--budget", kalai_budget, "subset budget");
    kalai_cmd->add_option("--out", kalai_out, "JSON report path");

    auto* duality_cmd = verify_cmd->add_subcommand("duality", "torus duality kernel identity");
    int duality_n = 3;
    std::string duality_out;
    duality_cmd->add_option("--n", duality_n, "torus side length")->required();
    duality_cmd->add_option("--out", duality_out, "JSON report path");

    auto* key_cmd = verify_cmd->add_subcommand("key", "base/cobase determinant identity");
    ComplexSpec key_spec;
    key_spec.add_flags(key_cmd);
    long long key_budget = 0;
    std::string key_out;
    key_cmd->add_option("--budget", key_budget, "subset budget");
    key_cmd->add_option("--out", key_out, "JSON report path");

    auto* count_cmd = verify_cmd->add_subcommand("count", "enumeration identities");
    ComplexSpec count_spec;
    count_spec.add_flags(count_cmd);
    long long count_budget = 0;
    std::string count_out;
    count_cmd->add_option("--budget", count_budget, "subset budget");
    count_cmd->add_option("--out", count_out, "JSON report path");

    auto* oracle_cmd = verify_cmd->add_subcommand("oracle", "three-route probability agreement");
    ComplexSpec oracle_spec;
    oracle_spec.add_flags(oracle_cmd);
    int oracle_k = 1;
    std::string oracle_side = "lower";
    long long oracle_budget = 0;
    std::string oracle_out;
    oracle_cmd->add_option("--k", oracle_k, "degree")->required();
    oracle_cmd->add_option("--side", oracle_side, "lower|upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    oracle_cmd->add_option("--budget", oracle_budget, "subset budget");
    oracle_cmd->add_option("--out", oracle_out, "JSON report path");

    // experiment -----------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("experiment", "lattice experiments");
    exp_cmd->require_subcommand(1);

    auto* td_cmd = exp_cmd->add_subcommand("torus-duality", "sampled tree and dual cycles figure");
    int td_n = 50;
    std::uint64_t td_seed = 0;
    std::string td_out, td_csv;
    td_cmd->add_option("--n", td_n, "torus side length")->required();
    td_cmd->add_option("--seed", td_seed, "RNG seed")->capture_default_str();
    td_cmd->add_option("--out", td_out, "SVG figure path");
    td_cmd->add_option("--csv", td_csv, "edge list CSV path (columns: kind,edge)");

    auto* cp_cmd = exp_cmd->add_subcommand("cellprob", "exact cell probabilities across n");
    int cp_d = 2, cp_k = 1;
    std::string cp_n = "4,8,16", cp_csv;
    cp_cmd->add_option("--d", cp_d, "torus dimension")->required();
    cp_cmd->add_option("--k", cp_k, "degree")->required();
    cp_cmd->add_option("--n", cp_n, "comma-separated side lengths")->required();
    cp_cmd->add_option("--csv", cp_csv,
                       "CSV output path (columns: n,value,limit,abs_gap; exact rationals as p/q)");

    auto* dg_cmd = exp_cmd->add_subcommand("degree", "marked-vertex degree statistics");
    int dg_n = 12;
    Index dg_samples = 5000;
    std::uint64_t dg_seed = 1;
    std::string dg_csv;
    dg_cmd->add_option("--n", dg_n, "torus side length")->required();
    dg_cmd->add_option("--samples", dg_samples, "number of draws")->capture_default_str();
    dg_cmd->add_option("--seed", dg_seed, "RNG seed")->capture_default_str();
    dg_cmd->add_option("--csv", dg_csv,
                       "CSV output path (columns: n,samples,seed,exact,mean,se,z)");

    auto* cs_cmd = exp_cmd->add_subcommand("cycle-scaling", "dual cycle-edge counts across n");
    std::string cs_n = "8,12,16";
    Index cs_samples = 30;
    std::uint64_t cs_seed = 1;
    std::string cs_csv;
    cs_cmd->add_option("--n", cs_n, "comma-separated side lengths")->required();
    cs_cmd->add_option("--samples", cs_samples, "draws per size")->capture_default_str();
    cs_cmd->add_option("--seed", cs_seed, "RNG seed")->capture_default_str();
    cs_cmd->add_option("--csv", cs_csv,
                       "CSV output path (columns: n,samples,mean_cycle_edges,se,n_to_5_4,ratio)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (kernel_cmd->parsed())
            return run_kernel(kernel_spec, kernel_k, kernel_side, kernel_box, kernel_out);
        if (sample_cmd->parsed())
            return run_sample(sample_spec, sample_k, sample_side, sample_box, sample_seed,
                              sample_stream, sample_out);
        if (enum_cmd->parsed())
            return run_enumerate(enum_spec, enum_k, enum_side, enum_budget, enum_out, enum_csv);
        if (verify_cmd->parsed()) {
            if (kalai_cmd->parsed())
                return run_verify_kalai(kalai_n, kalai_k, kalai_budget, kalai_out);
            if (duality_cmd->parsed()) return run_verify_duality(duality_n, duality_out);
            if (key_cmd->parsed())
                return run_verify_identity(key_spec, "key", key_budget, key_out);
            if (count_cmd->parsed())
                return run_verify_identity(count_spec, "count", count_budget, count_out);
            if (oracle_cmd->parsed())
                return run_verify_oracle(oracle_spec, oracle_k, oracle_side, oracle_budget,
                                         oracle_out);
        }
        if (exp_cmd->parsed()) {
            if (td_cmd->parsed())
                return run_experiment_torus_duality(td_n, td_seed, td_out, td_csv);
            if (cp_cmd->parsed()) return run_experiment_cellprob(cp_d, cp_k, cp_n, cp_csv);
            if (dg_cmd->parsed())
                return run_experiment_degree(dg_n, dg_samples, dg_seed, dg_csv);
            if (cs_cmd->parsed())
                return run_experiment_cycle_scaling(cs_n, cs_samples, cs_seed, cs_csv);
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
