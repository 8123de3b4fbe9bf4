#include "nct/trace_poly.hpp"

#include <algorithm>
#include <cmath>

#include "nct/parser.hpp"

namespace nct {

Word cyclic_normalize(const Word& w) {
    const std::size_t n = w.size();
    if (n <= 1) return w;
    Word best = w;
    Word rot = w;
    for (std::size_t r = 1; r < n; ++r) {
        std::rotate(rot.letters.begin(), rot.letters.begin() + 1, rot.letters.end());
        if (rot < best) best = rot;
    }
    return best;
}

TracePoly TracePoly::constant(int dim, Complex c) {
    TracePoly p(dim);
    p.add_term(Word{}, {}, c);
    return p;
}

TracePoly TracePoly::variable(int dim, int i) {
    if (i < 1 || i > dim) throw std::invalid_argument("TracePoly::variable: index out of range");
    TracePoly p(dim);
    p.add_term(Word{i}, {}, 1.0);
    return p;
}

TracePoly TracePoly::from_word(int dim, const Word& w, Complex c) {
    TracePoly p(dim);
    p.add_term(w, {}, c);
    return p;
}

int TracePoly::degree() const {
    int deg = 0;
    for (const auto& [key, c] : terms_) {
        int td = static_cast<int>(key.word.size());
        for (const auto& t : key.traces) td += static_cast<int>(t.size());
        deg = std::max(deg, td);
    }
    return deg;
}

void TracePoly::add_term(const Word& outer, const std::vector<Word>& traces, Complex c) {
    if (outer.max_letter() > dim_) throw std::invalid_argument("add_term: letter exceeds alphabet");
    TermKey key;
    key.word = outer;
    for (const auto& t : traces) {
        if (t.max_letter() > dim_) throw std::invalid_argument("add_term: letter exceeds alphabet");
        if (t.empty()) continue;  // tr(1) = 1
        key.traces.push_back(cyclic_normalize(t));
    }
    std::sort(key.traces.begin(), key.traces.end());
    add_raw(std::move(key), c);
}

void TracePoly::add_raw(TermKey key, Complex c) {
    auto [it, inserted] = terms_.try_emplace(std::move(key), c);
    if (!inserted) {
        it->second += c;
        if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
    } else if (std::abs(c) <= kCoeffPruneTol) {
        terms_.erase(it);
    }
}

TracePoly& TracePoly::operator+=(const TracePoly& q) {
    if (dim_ != q.dim_) throw std::invalid_argument("TracePoly: alphabet mismatch");
    for (const auto& [key, c] : q.terms_) add_raw(key, c);
    return *this;
}

TracePoly& TracePoly::operator-=(const TracePoly& q) {
    if (dim_ != q.dim_) throw std::invalid_argument("TracePoly: alphabet mismatch");
    for (const auto& [key, c] : q.terms_) add_raw(key, -c);
    return *this;
}

TracePoly& TracePoly::operator*=(Complex c) {
    if (std::abs(c) <= kCoeffPruneTol) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, v] : terms_) v *= c;
    return *this;
}

TracePoly operator*(const TracePoly& p, const TracePoly& q) {
    if (p.dim_ != q.dim_) throw std::invalid_argument("TracePoly: alphabet mismatch");
    TracePoly out(p.dim_);
    for (const auto& [ka, ca] : p.terms_) {
        for (const auto& [kb, cb] : q.terms_) {
            TermKey key;
            key.word = ka.word.concat(kb.word);
            key.traces = ka.traces;
            key.traces.insert(key.traces.end(), kb.traces.begin(), kb.traces.end());
            std::sort(key.traces.begin(), key.traces.end());
            out.add_raw(std::move(key), ca * cb);
        }
    }
    return out;
}

bool TracePoly::equals(const TracePoly& q, double tol) const {
    if (dim_ != q.dim_) return false;
    auto diff = *this;
    diff -= q;
    for (const auto& [key, c] : diff.terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

void TracePoly::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= tol)
            it = terms_.erase(it);
        else
            ++it;
    }
}

TracePoly adjoint(const TracePoly& p) {
    TracePoly out(p.dim());
    for (const auto& [key, c] : p.terms()) {
        std::vector<Word> traces;
        traces.reserve(key.traces.size());
        for (const auto& t : key.traces) traces.push_back(t.reversed());
        out.add_term(key.word.reversed(), traces, std::conj(c));
    }
    return out;
}

bool is_self_adjoint(const TracePoly& p, double tol) { return p.equals(adjoint(p), tol); }

TracePoly trace_of(const TracePoly& p) {
    TracePoly out(p.dim());
    for (const auto& [key, c] : p.terms()) {
        std::vector<Word> traces = key.traces;
        if (!key.word.empty()) traces.push_back(key.word);
        out.add_term(Word{}, traces, c);
    }
    return out;
}

TracePoly compose(const TracePoly& J, const std::vector<TracePoly>& f) {
    if (f.empty()) throw std::invalid_argument("compose: empty substitution tuple");
    const int dim_in = J.dim();
    if (static_cast<int>(f.size()) != dim_in)
        throw std::invalid_argument("compose: arity mismatch");
    const int dim_out = f[0].dim();
    for (const auto& fi : f)
        if (fi.dim() != dim_out) throw std::invalid_argument("compose: alphabet mismatch");

    auto subst_word = [&](const Word& w) {
        TracePoly r = TracePoly::one(dim_out);
        for (int l : w.letters) r = r * f[static_cast<std::size_t>(l - 1)];
        return r;
    };

    TracePoly out(dim_out);
    for (const auto& [key, c] : J.terms()) {
        TracePoly term = subst_word(key.word) * c;
        for (const auto& t : key.traces) term = term * trace_of(subst_word(t));
        out += term;
    }
    return out;
}

TracePoly quadratic_potential(int dim) {
    TracePoly p(dim);
    for (int i = 1; i <= dim; ++i) p.add_term(Word{i, i}, {}, 0.5);
    return p;
}

double seminorm_bound(const TracePoly& p, double R) {
    if (R <= 0.0) throw std::invalid_argument("seminorm_bound: R must be positive");
    double s = 0.0;
    for (const auto& [key, c] : p.terms()) {
        int deg = static_cast<int>(key.word.size());
        for (const auto& t : key.traces) deg += static_cast<int>(t.size());
        s += std::abs(c) * std::pow(R, deg);
    }
    return s;
}

std::string to_string(const TracePoly& p) { return print_poly(p); }

}  // namespace nct
