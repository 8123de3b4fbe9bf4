#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nct/herm_tuple.hpp"
#include "nct/langevin.hpp"
#include "nct/rng.hpp"
#include "nct/trace_poly.hpp"

namespace nct::testing {

inline Word random_word(Rng& rng, int dim, int len) {
    Word w;
    for (int i = 0; i < len; ++i) w.letters.push_back(1 + static_cast<int>(rng.bits() % dim));
    return w;
}

struct PolyOpts {
    int max_degree = 4;
    int terms = 4;
    int max_traces = 1;
    bool integer_coeffs = false;
    bool real_coeffs = false;
};

inline TracePoly random_poly(Rng& rng, int dim, const PolyOpts& o = {}) {
    TracePoly p(dim);
    for (int t = 0; t < o.terms; ++t) {
        int deg = static_cast<int>(rng.bits() % (o.max_degree + 1));
        int n_tr = static_cast<int>(rng.bits() % (o.max_traces + 1));
        std::vector<int> cut_points;
        int outer_len = deg;
        std::vector<Word> traces;
        for (int q = 0; q < n_tr && outer_len > 0; ++q) {
            int take = 1 + static_cast<int>(rng.bits() % outer_len);
            traces.push_back(random_word(rng, dim, take));
            outer_len -= take;
        }
        Word outer = random_word(rng, dim, outer_len);
        Complex c;
        if (o.integer_coeffs) {
            c = Complex(static_cast<double>(static_cast<int>(rng.bits() % 7) - 3),
                        static_cast<double>(static_cast<int>(rng.bits() % 7) - 3));
            if (c == Complex(0.0)) c = 1.0;
        } else {
            c = Complex(2.0 * rng.uniform() - 1.0, o.real_coeffs ? 0.0 : 2.0 * rng.uniform() - 1.0);
        }
        p.add_term(outer, traces, c);
    }
    return p;
}

inline TracePoly random_self_adjoint(Rng& rng, int dim, const PolyOpts& o = {}) {
    TracePoly p = random_poly(rng, dim, o);
    return (p + adjoint(p)) * Complex(0.5);
}

inline HermTuple random_herm(Rng& rng, int N, int d) { return sample_gue(N, d, rng); }

// Independent brute-force evaluator: strict left-fold without caching, traces
// as explicit diagonal means of fully expanded products.
inline Matrix naive_eval(const TracePoly& p, const HermTuple& x) {
    const int N = x.N;
    auto word_val = [&](const Word& w) {
        Matrix m = Matrix::Identity(N, N);
        for (int l : w.letters) m = (m * x[static_cast<std::size_t>(l - 1)]).eval();
        return m;
    };
    Matrix out = Matrix::Zero(N, N);
    for (const auto& [key, c] : p.terms()) {
        Complex coeff = c;
        for (const auto& t : key.traces) {
            Matrix tm = word_val(t);
            Complex tr = 0.0;
            for (int i = 0; i < N; ++i) tr += tm(i, i);
            coeff *= tr / static_cast<double>(N);
        }
        out += coeff * word_val(key.word);
    }
    return out;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
    double scale = std::max(1.0, std::max(a.norm(), b.norm()));
    return (a - b).norm() / scale;
}

// Independent entrywise Gaussian Wick oracle: expectation of a product of
// normalized traces of words in GUE matrices by explicit index loops and
// Isserlis pairing of entries, cov E[(Xa)_{uv}(Xb)_{pq}] = d_ab d_uq d_vp / N.
// Exponential in everything; N and lengths must stay tiny.
inline double entrywise_expect(const std::vector<Word>& components, int N) {
    std::vector<int> labels;
    std::vector<std::pair<int, int>> comp_range;
    for (const auto& w : components) {
        int b = static_cast<int>(labels.size());
        for (int l : w.letters) labels.push_back(l);
        comp_range.push_back({b, static_cast<int>(labels.size())});
    }
    const int n = static_cast<int>(labels.size());
    if (n % 2 != 0) return 0.0;

    std::vector<int> succ(n);
    for (auto [b, e] : comp_range)
        for (int i = b; i < e; ++i) succ[i] = b + (i - b + 1) % (e - b);

    std::vector<int> partner(n, -1);
    double total = 0.0;
    std::function<void()> rec_pairs = [&]() {
        int first = -1;
        for (int i = 0; i < n; ++i)
            if (partner[i] < 0) { first = i; break; }
        if (first < 0) {
            std::vector<int> idx(n, 0);
            double sum = 0.0;
            for (;;) {
                double prod = 1.0;
                for (int a = 0; a < n && prod != 0.0; ++a) {
                    int b = partner[a];
                    if (b < a) continue;
                    bool ok = idx[a] == idx[succ[b]] && idx[succ[a]] == idx[b];
                    prod *= ok ? 1.0 / N : 0.0;
                }
                sum += prod;
                int p = n - 1;
                while (p >= 0 && idx[p] == N - 1) idx[p--] = 0;
                if (p < 0) break;
                ++idx[p];
            }
            total += sum;
            return;
        }
        for (int j = first + 1; j < n; ++j) {
            if (partner[j] >= 0 || labels[j] != labels[first]) continue;
            partner[first] = j;
            partner[j] = first;
            rec_pairs();
            partner[first] = -1;
            partner[j] = -1;
        }
    };
    rec_pairs();
    for (std::size_t c = 0; c < components.size(); ++c) total /= N;
    return total;
}

}  // namespace nct::testing
