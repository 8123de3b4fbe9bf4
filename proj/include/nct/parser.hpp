#pragma once

#include <stdexcept>
#include <string>

#include "nct/trace_poly.hpp"

namespace nct {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text grammar for trace polynomials:
//   terms joined by '+'/'-'; words as X1*X2*X1 (X1^3 for runs); traces as
//   tr(X1*X2); complex coefficients as a+bi, parenthesized inside products;
//   whitespace insignificant.
// If dim == 0 the alphabet size is the largest letter used.
TracePoly parse_poly(const std::string& text, int dim = 0);

// Parse a single word such as "X1*X2*X1" or "X1^4".
Word parse_word(const std::string& text);

// Canonical printer; parse(print(p)) reproduces p exactly.
std::string print_poly(const TracePoly& p);

}  // namespace nct
