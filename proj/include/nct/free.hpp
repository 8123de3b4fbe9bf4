#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>

#include "nct/trace_poly.hpp"

namespace nct {

// A free semicircular family x1..xd with covariance c[i][j] = tau(xi xj).
struct SemicircleFamily {
    int d = 1;
    Eigen::MatrixXd cov;

    static SemicircleFamily standard(int d) {
        SemicircleFamily f;
        f.d = d;
        f.cov = Eigen::MatrixXd::Identity(d, d);
        return f;
    }
    // True when every covariance entry is an integer (enables the exact path).
    bool integral() const;
};

std::int64_t catalan(int n);

// Moment of a word in the family: sum over non-crossing pair partitions,
// each pair weighted by the covariance; odd length gives 0.
double tau_word(const Word& w, const SemicircleFamily& fam);
std::int64_t tau_word_exact(const Word& w, const SemicircleFamily& fam);

// Trace factors evaluate by tau_word, the outer word contributes its own
// tau_word, everything multiplies.
Complex tau_trace_poly(const TracePoly& p, const SemicircleFamily& fam);

// Schwinger-Dyson residual tau(x_e f) - tau (x) tau (d_e f); identically zero
// for a semicircular family. Exact integer brackets per term when the
// covariance is integral, so the result is an exact 0 on such inputs.
Complex sd_residual(const TracePoly& f, int e, const SemicircleFamily& fam);

// Conditional expectation onto the algebra generated by the x-letters, the
// y-letters being a semicircular family free from them. y_labels lists the
// 1-based letters treated as y; fam.cov supplies tau(y_h y_g). The result
// contains only x-letters.
TracePoly cond_exp(const TracePoly& p, const std::set<int>& y_labels,
                   const SemicircleFamily& fam);

}  // namespace nct
