#pragma once

#include <iosfwd>
#include <string>

#include "cellforest/chain_complex.hpp"

namespace cellforest {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads the `cellforest-complex v1` text format. Validation failures
/// (including d d != 0) surface as ComplexError, syntax issues as ParseError
/// with line numbers.
ChainComplex load_complex(std::istream& in, const std::string& source_name = "<stream>");
ChainComplex load_complex(const std::string& path);

/// Canonical text form: loading what was saved and saving again is
/// byte-identical.
void save_complex(const ChainComplex& x, std::ostream& out);
void save_complex(const ChainComplex& x, const std::string& path);

}  // namespace cellforest
