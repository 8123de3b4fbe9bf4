#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nct/word.hpp"

namespace nct {

using Complex = std::complex<double>;

// Terms with |coeff| below this are dropped after every arithmetic pass.
inline constexpr double kCoeffPruneTol = 1e-14;

// Key of one trace-polynomial term: an outer word times a multiset of traced
// words. Trace factors are stored in canonical cyclic rotation and sorted;
// the traced unit word is the scalar 1 and is never stored.
struct TermKey {
    Word word;
    std::vector<Word> traces;

    auto operator<=>(const TermKey&) const = default;
};

// A trace polynomial: complex linear combination of (outer word) x (product
// of traced cyclic words) over the alphabet X1..Xd.
class TracePoly {
  public:
    TracePoly() = default;
    explicit TracePoly(int dim) : dim_(dim) {
        if (dim <= 0) throw std::invalid_argument("TracePoly: alphabet size must be positive");
    }

    static TracePoly zero(int dim) { return TracePoly(dim); }
    static TracePoly constant(int dim, Complex c);
    static TracePoly one(int dim) { return constant(dim, 1.0); }
    static TracePoly variable(int dim, int i);
    static TracePoly from_word(int dim, const Word& w, Complex c = 1.0);

    int dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<TermKey, Complex>& terms() const { return terms_; }

    // Total degree (letters in the outer word plus letters in all traces) of
    // the largest term; 0 for constants and the zero polynomial.
    int degree() const;

    void add_term(const Word& outer, const std::vector<Word>& traces, Complex c);
    void add_raw(TermKey key, Complex c);  // key already canonical

    TracePoly& operator+=(const TracePoly& q);
    TracePoly& operator-=(const TracePoly& q);
    TracePoly& operator*=(Complex c);

    friend TracePoly operator+(TracePoly p, const TracePoly& q) { return p += q; }
    friend TracePoly operator-(TracePoly p, const TracePoly& q) { return p -= q; }
    friend TracePoly operator*(TracePoly p, Complex c) { return p *= c; }
    friend TracePoly operator*(Complex c, TracePoly p) { return p *= c; }
    TracePoly operator-() const { return *this * Complex(-1.0); }

    friend TracePoly operator*(const TracePoly& p, const TracePoly& q);

    bool operator==(const TracePoly& q) const { return dim_ == q.dim_ && equals(q, 0.0); }
    // Coefficient-wise comparison with tolerance.
    bool equals(const TracePoly& q, double tol = 1e-12) const;

    void prune(double tol = kCoeffPruneTol);

  private:
    int dim_ = 0;
    std::map<TermKey, Complex> terms_;
};

// Involution: conjugates coefficients, reverses words, conjugates traces.
TracePoly adjoint(const TracePoly& p);
bool is_self_adjoint(const TracePoly& p, double tol = 1e-12);

// tr applied to a trace polynomial: the outer word of each term moves into
// the trace multiset (tr(1) = 1 drops out).
TracePoly trace_of(const TracePoly& p);

// Substitution homomorphism J(f1,...,fm); J over m variables, one f per
// variable, all over a common alphabet. Trace factors of J become traces of
// the substituted words.
TracePoly compose(const TracePoly& J, const std::vector<TracePoly>& f);

// 0.5 * sum_i Xi^2, the quadratic reference potential.
TracePoly quadratic_potential(int dim);

// Upper bound sum_terms |coeff| * R^(total term degree) on the projective
// seminorm at radius R.
double seminorm_bound(const TracePoly& p, double R);

std::string to_string(const TracePoly& p);

}  // namespace nct
