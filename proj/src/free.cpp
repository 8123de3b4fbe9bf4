#include "nct/free.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace nct {

bool SemicircleFamily::integral() const {
    for (int i = 0; i < cov.rows(); ++i)
        for (int j = 0; j < cov.cols(); ++j)
            if (cov(i, j) != std::floor(cov(i, j))) return false;
    return true;
}

std::int64_t catalan(int n) {
    std::int64_t c = 1;
    for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

namespace {

// Non-crossing recursion on half-open ranges: position i pairs with some m of
// odd offset, splitting the range into two independent even blocks.
template <typename T, typename CovFn>
T tau_range(const std::vector<int>& ls, int i, int j, const CovFn& cov,
            std::map<std::pair<int, int>, T>& memo) {
    if (i == j) return T(1);
    if ((j - i) % 2 != 0) return T(0);
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    T acc(0);
    for (int m = i + 1; m < j; m += 2) {
        T w = cov(ls[i], ls[m]);
        if (w == T(0)) continue;
        acc += w * tau_range(ls, i + 1, m, cov, memo) * tau_range(ls, m + 1, j, cov, memo);
    }
    memo.emplace(std::make_pair(i, j), acc);
    return acc;
}

template <typename T, typename CovFn>
T tau_word_impl(const Word& w, const CovFn& cov) {
    std::map<std::pair<int, int>, T> memo;
    return tau_range<T>(w.letters, 0, static_cast<int>(w.size()), cov, memo);
}

}  // namespace

double tau_word(const Word& w, const SemicircleFamily& fam) {
    if (w.max_letter() > fam.d) throw std::invalid_argument("tau_word: letter outside family");
    if (fam.integral()) return static_cast<double>(tau_word_exact(w, fam));
    auto cov = [&](int a, int b) { return fam.cov(a - 1, b - 1); };
    return tau_word_impl<double>(w, cov);
}

std::int64_t tau_word_exact(const Word& w, const SemicircleFamily& fam) {
    if (w.max_letter() > fam.d) throw std::invalid_argument("tau_word: letter outside family");
    if (!fam.integral()) throw std::invalid_argument("tau_word_exact: non-integral covariance");
    auto cov = [&](int a, int b) {
        return static_cast<std::int64_t>(std::llround(fam.cov(a - 1, b - 1)));
    };
    return tau_word_impl<std::int64_t>(w, cov);
}

Complex tau_trace_poly(const TracePoly& p, const SemicircleFamily& fam) {
    Complex acc = 0.0;
    for (const auto& [key, c] : p.terms()) {
        double v = tau_word(key.word, fam);
        for (const auto& t : key.traces) v *= tau_word(t, fam);
        acc += c * v;
    }
    return acc;
}

Complex sd_residual(const TracePoly& f, int e, const SemicircleFamily& fam) {
    if (e < 1 || e > fam.d) throw std::invalid_argument("sd_residual: index outside family");
    if (!fam.cov.isIdentity(0.0))
        throw std::invalid_argument("sd_residual: requires the standard family");
    const bool exact = fam.integral();
    Complex acc = 0.0;
    for (const auto& [key, c] : f.terms()) {
        // lhs: tau(x_e P), rhs: sum over P = A x_e B of tau(A) tau(B)
        Word xe_p({e});
        Word lhs_word = xe_p.concat(key.word);
        double lhs, rhs = 0.0, traces = 1.0;
        if (exact) {
            std::int64_t l = tau_word_exact(lhs_word, fam);
            std::int64_t r = 0;
            const auto& ls = key.word.letters;
            for (std::size_t t = 0; t < ls.size(); ++t) {
                if (ls[t] != e) continue;
                r += tau_word_exact(key.word.subword(0, t), fam) *
                     tau_word_exact(key.word.subword(t + 1, ls.size()), fam);
            }
            std::int64_t tr = 1;
            for (const auto& w : key.traces) tr *= tau_word_exact(w, fam);
            // exact integer bracket: zero cancels before any float arithmetic
            acc += c * static_cast<double>((l - r) * tr);
            continue;
        }
        lhs = tau_word(lhs_word, fam);
        const auto& ls = key.word.letters;
        for (std::size_t t = 0; t < ls.size(); ++t) {
            if (ls[t] != e) continue;
            rhs += tau_word(key.word.subword(0, t), fam) *
                   tau_word(key.word.subword(t + 1, ls.size()), fam);
        }
        for (const auto& w : key.traces) traces *= tau_word(w, fam);
        acc += c * (lhs - rhs) * traces;
    }
    return acc;
}

namespace {

class CondExp {
  public:
    CondExp(int dim, const std::set<int>& y, const SemicircleFamily& fam)
        : dim_(dim), y_(y), fam_(fam) {}

    // E[word | x-algebra], recursing on the last letter: a trailing y-letter
    // X_g resolves through every split M = A X_h B with h a y-letter.
    const TracePoly& word(const Word& w) {
        auto it = memo_.find(w);
        if (it != memo_.end()) return it->second;
        TracePoly r(dim_);
        if (w.empty()) {
            r = TracePoly::one(dim_);
        } else {
            int g = w.letters.back();
            Word m = w.subword(0, w.size() - 1);
            if (!y_.count(g)) {
                r = word(m) * TracePoly::variable(dim_, g);
            } else {
                const auto& ls = m.letters;
                for (std::size_t t = 0; t < ls.size(); ++t) {
                    int h = ls[t];
                    if (!y_.count(h)) continue;
                    double cv = fam_.cov(h - 1, g - 1);
                    if (cv == 0.0) continue;
                    TracePoly a = word(m.subword(0, t));
                    TracePoly b1 = trace_of(word(m.subword(t + 1, ls.size())));
                    r += (a * b1) * Complex(cv);
                }
            }
        }
        return memo_.emplace(w, std::move(r)).first->second;
    }

  private:
    int dim_;
    const std::set<int>& y_;
    const SemicircleFamily& fam_;
    std::map<Word, TracePoly> memo_;
};

}  // namespace

TracePoly cond_exp(const TracePoly& p, const std::set<int>& y_labels,
                   const SemicircleFamily& fam) {
    for (int y : y_labels)
        if (y < 1 || y > fam.d) throw std::invalid_argument("cond_exp: y label outside family");
    CondExp ce(p.dim(), y_labels, fam);
    TracePoly out(p.dim());
    for (const auto& [key, c] : p.terms()) {
        TracePoly term = ce.word(key.word) * c;
        for (const auto& t : key.traces) term = term * trace_of(ce.word(t));
        out += term;
    }
    return out;
}

}  // namespace nct
