#include "nct/tensor_poly.hpp"

#include <algorithm>
#include <cmath>

namespace nct {

void TensorPoly::add_term(std::vector<int> idx, std::vector<Word> words,
                          const std::vector<Word>& traces, Complex c) {
    if (static_cast<int>(words.size()) != arity_)
        throw std::invalid_argument("TensorPoly: word tuple arity mismatch");
    TensorTermKey key;
    key.idx = std::move(idx);
    key.words = std::move(words);
    for (const auto& t : traces) {
        if (t.empty()) continue;
        key.traces.push_back(cyclic_normalize(t));
    }
    std::sort(key.traces.begin(), key.traces.end());
    auto [it, inserted] = terms_.try_emplace(std::move(key), c);
    if (!inserted) {
        it->second += c;
        if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
    } else if (std::abs(c) <= kCoeffPruneTol) {
        terms_.erase(it);
    }
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& t) {
    if (dim_ != t.dim_ || arity_ != t.arity_)
        throw std::invalid_argument("TensorPoly: shape mismatch");
    for (const auto& [key, c] : t.terms_) {
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
        }
    }
    return *this;
}

TensorPoly& TensorPoly::operator*=(Complex c) {
    if (std::abs(c) <= kCoeffPruneTol) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, v] : terms_) v *= c;
    return *this;
}

bool TensorPoly::equals(const TensorPoly& t, double tol) const {
    if (dim_ != t.dim_ || arity_ != t.arity_) return false;
    TensorPoly diff = *this;
    for (const auto& [key, c] : t.terms_) {
        auto [it, inserted] = diff.terms_.try_emplace(key, -c);
        if (!inserted) it->second -= c;
    }
    for (const auto& [key, c] : diff.terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

void TensorPoly::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= tol)
            it = terms_.erase(it);
        else
            ++it;
    }
}

TensorPoly diff_free(const TracePoly& p, int i) {
    if (i < 1 || i > p.dim()) throw std::invalid_argument("diff_free: index out of range");
    TensorPoly out(p.dim(), 2);
    for (const auto& [key, c] : p.terms()) {
        const auto& ls = key.word.letters;
        for (std::size_t t = 0; t < ls.size(); ++t) {
            if (ls[t] != i) continue;
            out.add_term({i}, {key.word.subword(0, t), key.word.subword(t + 1, ls.size())},
                         key.traces, c);
        }
    }
    return out;
}

TracePoly cyclic_grad(const TracePoly& p, int i) {
    if (i < 1 || i > p.dim()) throw std::invalid_argument("cyclic_grad: index out of range");
    TracePoly out(p.dim());
    for (const auto& [key, c] : p.terms()) {
        const auto& ls = key.word.letters;
        for (std::size_t t = 0; t < ls.size(); ++t) {
            if (ls[t] != i) continue;
            // m(A (x) B) = BA for word = A Xi B
            Word ba = key.word.subword(t + 1, ls.size()).concat(key.word.subword(0, t));
            out.add_term(ba, key.traces, c);
        }
    }
    return out;
}

TensorPoly tilde_diff(const TracePoly& p, int i) {
    if (i < 1 || i > p.dim()) throw std::invalid_argument("tilde_diff: index out of range");
    TensorPoly out(p.dim(), 2);
    for (const auto& [key, c] : p.terms()) {
        for (std::size_t k = 0; k < key.traces.size(); ++k) {
            const Word& r = key.traces[k];
            std::vector<Word> rest;
            rest.reserve(key.traces.size() - 1);
            for (std::size_t j = 0; j < key.traces.size(); ++j)
                if (j != k) rest.push_back(key.traces[j]);
            // D_i R tensored in front of the outer word
            const auto& ls = r.letters;
            for (std::size_t t = 0; t < ls.size(); ++t) {
                if (ls[t] != i) continue;
                Word ba = r.subword(t + 1, ls.size()).concat(r.subword(0, t));
                out.add_term({i}, {ba, key.word}, rest, c);
            }
        }
    }
    return out;
}

TracePoly bold_grad(const TracePoly& p, int i) {
    TracePoly out = cyclic_grad(p, i);
    // (id (x) tr): second tensorand becomes a trace factor
    TensorPoly td = tilde_diff(p, i);
    for (const auto& [key, c] : td.terms()) {
        std::vector<Word> traces = key.traces;
        if (!key.words[1].empty()) traces.push_back(key.words[1]);
        out.add_term(key.words[0], traces, c);
    }
    return out;
}

TensorPoly tensor_mul_left(const TracePoly& p, const TensorPoly& t) {
    if (p.dim() != t.dim()) throw std::invalid_argument("tensor_mul_left: alphabet mismatch");
    TensorPoly out(t.dim(), t.arity());
    for (const auto& [kp, cp] : p.terms()) {
        for (const auto& [kt, ct] : t.terms()) {
            std::vector<Word> words = kt.words;
            words.front() = kp.word.concat(words.front());
            std::vector<Word> traces = kt.traces;
            traces.insert(traces.end(), kp.traces.begin(), kp.traces.end());
            out.add_term(kt.idx, std::move(words), traces, cp * ct);
        }
    }
    return out;
}

TensorPoly tensor_mul_right(const TensorPoly& t, const TracePoly& q) {
    if (q.dim() != t.dim()) throw std::invalid_argument("tensor_mul_right: alphabet mismatch");
    TensorPoly out(t.dim(), t.arity());
    for (const auto& [kt, ct] : t.terms()) {
        for (const auto& [kq, cq] : q.terms()) {
            std::vector<Word> words = kt.words;
            words.back() = words.back().concat(kq.word);
            std::vector<Word> traces = kt.traces;
            traces.insert(traces.end(), kq.traces.begin(), kq.traces.end());
            out.add_term(kt.idx, std::move(words), traces, ct * cq);
        }
    }
    return out;
}

double seminorm_bound(const TensorPoly& t, double R) {
    if (R <= 0.0) throw std::invalid_argument("seminorm_bound: R must be positive");
    double s = 0.0;
    for (const auto& [key, c] : t.terms()) {
        int deg = 0;
        for (const auto& w : key.words) deg += static_cast<int>(w.size());
        for (const auto& tr : key.traces) deg += static_cast<int>(tr.size());
        s += std::abs(c) * std::pow(R, deg);
    }
    return s;
}

RegularityReport regularity_check(const TracePoly& W, double R, int k) {
    if (R <= 0.0) throw std::invalid_argument("regularity_check: R must be positive");
    if (k < 0) throw std::invalid_argument("regularity_check: order must be nonnegative");
    if (!is_self_adjoint(W)) throw std::invalid_argument("regularity_check: W is not self-adjoint");
    RegularityReport rep;
    rep.threshold = 1.0 / (4.0 * k + 5.0);
    for (int p = 1; p <= W.dim(); ++p) {
        TracePoly dp = bold_grad(W, p);
        double s = 0.0;
        for (int i = 1; i <= W.dim(); ++i)
            s += seminorm_bound(diff_free(dp, i), R) + seminorm_bound(tilde_diff(dp, i), R);
        rep.kappa = std::max(rep.kappa, s);
    }
    rep.passes = rep.kappa < rep.threshold;
    return rep;
}

}  // namespace nct
