#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nct/trace_poly.hpp"

namespace nct {

// Exact expansion E[...] = sum_i coeffs[i] * N^(-2i).
struct NSeries {
    std::vector<std::int64_t> coeffs;

    bool operator==(const NSeries&) const = default;
    double eval(double N) const;
};

inline constexpr int kDefaultMaxWickLen = 14;

// E[tr_N w(X^N)] for independent GUE matrices: sum over label-matching pair
// partitions pi of N^(#cycles(gamma pi) - k - 1) with gamma the full cycle.
// Throws when the word is longer than max_len (pairing count explodes).
NSeries gue_expect_word(const Word& w, int max_len = kDefaultMaxWickLen);

// Multi-trace extension: gamma has one cycle per trace factor plus one for a
// nonempty outer word; weight N^(#cycles(gamma pi) - k - #cycles(gamma)).
// Keys are the power i of N^(-2i).
std::map<int, Complex> gue_expect_series(const TracePoly& p, int max_len = kDefaultMaxWickLen);

// Exact-rational evaluation of the series at a concrete dimension.
Complex gue_expect_trace_poly(const TracePoly& p, int N, int max_len = kDefaultMaxWickLen);

// Constant term of the oracle equals the free semicircular value.
bool limit_agrees_with_free(const TracePoly& p, int max_len = kDefaultMaxWickLen);

}  // namespace nct
