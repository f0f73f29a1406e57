#include "cellforest/complex_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace cellforest {

namespace {

constexpr const char* kMagic = "cellforest-complex v1";

[[noreturn]] void fail(const std::string& source, size_t line, const std::string& msg) {
    std::ostringstream out;
    out << source << ":" << line << ": " << msg;
    throw ParseError(out.str());
}

std::int64_t parse_int64(const std::string& tok, const std::string& source, size_t line) {
    try {
        size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(source, line, "expected integer, got '" + tok + "'");
    }
}

}  // namespace

ChainComplex load_complex(std::istream& in, const std::string& source_name) {
    std::string line;
    size_t lineno = 0;

    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto end = line.find_last_not_of(" \t\r");
            if (end == std::string::npos) continue;
            out = line.substr(0, end + 1);
            return true;
        }
        return false;
    };

    std::string header;
    if (!next_line(header) || header != kMagic)
        fail(source_name, lineno, std::string("missing header '") + kMagic + "'");

    int top_dim = -1;
    std::vector<Index> counts;
    std::vector<std::vector<std::string>> labels;
    bool any_label = false;
    // boundary columns: pairs (face, coeff) per (k, cell)
    std::vector<std::vector<std::vector<std::pair<Index, std::int64_t>>>> cols;
    std::vector<std::vector<bool>> seen;

    std::string text;
    while (next_line(text)) {
        std::istringstream ss(text);
        std::string word;
        ss >> word;
        if (word == "top_dim") {
            std::string v;
            if (!(ss >> v)) fail(source_name, lineno, "top_dim needs a value");
            top_dim = static_cast<int>(parse_int64(v, source_name, lineno));
            if (top_dim < 0) fail(source_name, lineno, "top_dim must be nonnegative");
            counts.assign(static_cast<size_t>(top_dim) + 1, -1);
            labels.assign(static_cast<size_t>(top_dim) + 1, {});
            cols.assign(static_cast<size_t>(top_dim) + 1, {});
            seen.assign(static_cast<size_t>(top_dim) + 1, {});
        } else if (word == "cells") {
            if (top_dim < 0) fail(source_name, lineno, "cells before top_dim");
            std::string d, c;
            if (!(ss >> d >> c)) fail(source_name, lineno, "cells needs <dim> <count>");
            int dim = static_cast<int>(parse_int64(d, source_name, lineno));
            Index count = parse_int64(c, source_name, lineno);
            if (dim < 0 || dim > top_dim) fail(source_name, lineno, "cells dimension out of range");
            if (count < 0) fail(source_name, lineno, "negative cell count");
            counts[static_cast<size_t>(dim)] = count;
            labels[static_cast<size_t>(dim)].assign(static_cast<size_t>(count), "");
            if (dim >= 1) {
                cols[static_cast<size_t>(dim)].assign(static_cast<size_t>(count), {});
                seen[static_cast<size_t>(dim)].assign(static_cast<size_t>(count), false);
            }
        } else if (word == "label") {
            std::string d, i;
            if (!(ss >> d >> i)) fail(source_name, lineno, "label needs <dim> <index> <name>");
            int dim = static_cast<int>(parse_int64(d, source_name, lineno));
            Index idx = parse_int64(i, source_name, lineno);
            if (dim < 0 || dim > top_dim || counts[static_cast<size_t>(dim)] < 0)
                fail(source_name, lineno, "label before matching cells line");
            if (idx < 0 || idx >= counts[static_cast<size_t>(dim)])
                fail(source_name, lineno, "label index out of range");
            std::string name;
            std::getline(ss, name);
            auto start = name.find_first_not_of(" \t");
            name = start == std::string::npos ? "" : name.substr(start);
            if (name.empty()) fail(source_name, lineno, "empty label");
            labels[static_cast<size_t>(dim)][static_cast<size_t>(idx)] = name;
            any_label = true;
        } else if (word == "boundary") {
            std::string d, i;
            if (!(ss >> d >> i)) fail(source_name, lineno, "boundary needs <dim> <cell> pairs");
            int dim = static_cast<int>(parse_int64(d, source_name, lineno));
            Index idx = parse_int64(i, source_name, lineno);
            if (dim < 1 || dim > top_dim)
                fail(source_name, lineno, "boundary dimension out of range");
            if (counts[static_cast<size_t>(dim)] < 0 || counts[static_cast<size_t>(dim - 1)] < 0)
                fail(source_name, lineno, "boundary before matching cells lines");
            if (idx < 0 || idx >= counts[static_cast<size_t>(dim)])
                fail(source_name, lineno, "boundary cell index out of range");
            if (seen[static_cast<size_t>(dim)][static_cast<size_t>(idx)])
                fail(source_name, lineno, "duplicate boundary line");
            seen[static_cast<size_t>(dim)][static_cast<size_t>(idx)] = true;
            auto& col = cols[static_cast<size_t>(dim)][static_cast<size_t>(idx)];
            std::string pair;
            while (ss >> pair) {
                auto colon = pair.find(':');
                if (colon == std::string::npos)
                    fail(source_name, lineno, "boundary entries must be face:coeff");
                Index face = parse_int64(pair.substr(0, colon), source_name, lineno);
                std::int64_t coeff = parse_int64(pair.substr(colon + 1), source_name, lineno);
                if (face < 0 || face >= counts[static_cast<size_t>(dim - 1)])
                    fail(source_name, lineno, "face index out of range");
                col.emplace_back(face, coeff);
            }
        } else {
            fail(source_name, lineno, "unknown directive '" + word + "'");
        }
    }

    if (top_dim < 0) fail(source_name, lineno, "missing top_dim");
    for (int dim = 0; dim <= top_dim; ++dim)
        if (counts[static_cast<size_t>(dim)] < 0)
            fail(source_name, lineno, "missing cells line for dimension " + std::to_string(dim));
    for (int dim = 1; dim <= top_dim; ++dim)
        for (Index i = 0; i < counts[static_cast<size_t>(dim)]; ++i)
            if (!seen[static_cast<size_t>(dim)][static_cast<size_t>(i)])
                fail(source_name, lineno,
                     "missing boundary line for cell " + std::to_string(i) + " of dimension " +
                         std::to_string(dim));

    std::vector<IncidenceMatrix> boundaries;
    for (int dim = 1; dim <= top_dim; ++dim) {
        std::vector<Eigen::Triplet<std::int64_t>> trips;
        for (Index i = 0; i < counts[static_cast<size_t>(dim)]; ++i)
            for (const auto& [face, coeff] : cols[static_cast<size_t>(dim)][static_cast<size_t>(i)])
                if (coeff != 0) trips.emplace_back(face, i, coeff);
        IncidenceMatrix b(counts[static_cast<size_t>(dim - 1)], counts[static_cast<size_t>(dim)]);
        b.setFromTriplets(trips.begin(), trips.end());
        boundaries.push_back(std::move(b));
    }

    if (!any_label) labels.clear();
    for (auto& l : labels) {
        bool used = std::any_of(l.begin(), l.end(), [](const std::string& s) { return !s.empty(); });
        if (!used) l.clear();
    }
    return ChainComplex(std::move(counts), std::move(boundaries), std::move(labels));
}

ChainComplex load_complex(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return load_complex(in, path);
}

void save_complex(const ChainComplex& x, std::ostream& out) {
    out << kMagic << "\n";
    out << "top_dim " << x.top_dim() << "\n";
    for (int dim = 0; dim <= x.top_dim(); ++dim)
        out << "cells " << dim << " " << x.cell_count(dim) << "\n";
    for (int dim = 0; dim <= x.top_dim(); ++dim)
        if (x.has_labels(dim))
            for (Index i = 0; i < x.cell_count(dim); ++i)
                if (!x.label(dim, i).empty())
                    out << "label " << dim << " " << i << " " << x.label(dim, i) << "\n";
    for (int dim = 1; dim <= x.top_dim(); ++dim) {
        const IncidenceMatrix& b = x.boundary(dim);
        for (Index c = 0; c < x.cell_count(dim); ++c) {
            out << "boundary " << dim << " " << c;
            std::map<Index, std::int64_t> faces;
            for (IncidenceMatrix::InnerIterator it(b, c); it; ++it)
                if (it.value() != 0) faces[it.row()] = it.value();
            for (const auto& [face, coeff] : faces) out << " " << face << ":" << coeff;
            out << "\n";
        }
    }
}

void save_complex(const ChainComplex& x, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    save_complex(x, out);
}

}  // namespace cellforest
