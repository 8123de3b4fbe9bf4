#pragma once

#include <map>
#include <vector>

#include "nct/trace_poly.hpp"
#include "nct/word.hpp"

namespace nct {

// One term of a derivative output: a tuple of derivative-variable indices, a
// tuple of word slots (arity = degree + 1) and a multiset of trace factors.
struct TensorTermKey {
    std::vector<int> idx;
    std::vector<Word> words;
    std::vector<Word> traces;

    auto operator<=>(const TensorTermKey&) const = default;
};

// Indexed sums of (variable-index list, word tuple, trace factors): the home
// of the outputs of the free difference quotient and the trace derivative.
// All word tuples in one TensorPoly share the same arity.
class TensorPoly {
  public:
    TensorPoly() = default;
    TensorPoly(int dim, int arity) : dim_(dim), arity_(arity) {}

    int dim() const { return dim_; }
    int arity() const { return arity_; }
    int degree() const { return arity_ - 1; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<TensorTermKey, Complex>& terms() const { return terms_; }

    void add_term(std::vector<int> idx, std::vector<Word> words, const std::vector<Word>& traces,
                  Complex c);

    TensorPoly& operator+=(const TensorPoly& t);
    friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
    TensorPoly& operator*=(Complex c);

    bool equals(const TensorPoly& t, double tol = 1e-12) const;

    void prune(double tol = kCoeffPruneTol);

  private:
    int dim_ = 0;
    int arity_ = 1;
    std::map<TensorTermKey, Complex> terms_;
};

// Free difference quotient with respect to Xi on the outer word, Leibniz over
// letter occurrences; trace factors carried unchanged. Degree-1 output with
// index tuple (i).
TensorPoly diff_free(const TracePoly& p, int i);

// Cyclic derivative D_i = m o d_i with m : A (x) B -> BA; well defined on
// trace classes.
TracePoly cyclic_grad(const TracePoly& p, int i);

// Trace derivative: replaces one trace factor tr(R) by D_i R in a fresh slot
// tensored in front of the outer word. Terms without traces contribute 0.
TensorPoly tilde_diff(const TracePoly& p, int i);

// Combined gradient D_i + (id (x) tr) o tilde_diff_i; the matrix gradient of
// H -> N tr_N p(H).
TracePoly bold_grad(const TracePoly& p, int i);

// (p (x) 1) * T and T * (1 (x) q) for degree-1 tensors (slot-wise word
// concatenation, traces merged); used by the derivation-property checks.
TensorPoly tensor_mul_left(const TracePoly& p, const TensorPoly& t);
TensorPoly tensor_mul_right(const TensorPoly& t, const TracePoly& q);

double seminorm_bound(const TensorPoly& t, double R);

struct RegularityReport {
    double kappa = 0.0;
    double threshold = 0.0;  // 1/(4k+5)
    bool passes = false;
};

// Ball-restricted surrogate of the k-regularity constant: kappa_R =
// max_p sum_i [ bound(d_i D_p W, R) + bound(tilde_d_i D_p W, R) ], compared
// against 1/(4k+5). Throws if W is not self-adjoint.
RegularityReport regularity_check(const TracePoly& W, double R, int k);

}  // namespace nct
