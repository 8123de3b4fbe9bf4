#include "nct/wick.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>

#include "nct/free.hpp"

namespace nct {

double NSeries::eval(double N) const {
    double acc = 0.0, f = 1.0;
    for (std::int64_t c : coeffs) {
        acc += static_cast<double>(c) * f;
        f /= N * N;
    }
    return acc;
}

namespace {

// gamma-pi cycle structure over all positions, pi enumerated recursively by
// pairing the first free position with every later position of equal label.
struct PairingCounter {
    const std::vector<int>& labels;
    const std::vector<int>& succ;  // gamma as successor map
    std::vector<int> partner;
    std::vector<std::int64_t> genus_counts;
    int k;       // number of pairs
    int gamma_cycles;

    void run() {
        int first = -1;
        for (std::size_t i = 0; i < partner.size(); ++i)
            if (partner[i] < 0) { first = static_cast<int>(i); break; }
        if (first < 0) {
            record();
            return;
        }
        for (std::size_t j = first + 1; j < partner.size(); ++j) {
            if (partner[j] >= 0 || labels[j] != labels[first]) continue;
            partner[first] = static_cast<int>(j);
            partner[j] = first;
            run();
            partner[first] = -1;
            partner[j] = -1;
        }
    }

    void record() {
        const int n = static_cast<int>(partner.size());
        std::vector<char> seen(n, 0);
        int cycles = 0;
        for (int s = 0; s < n; ++s) {
            if (seen[s]) continue;
            ++cycles;
            int p = s;
            while (!seen[p]) {
                seen[p] = 1;
                p = succ[partner[p]];
            }
        }
        // exponent = cycles - k - gamma_cycles, always even and <= 0
        int g2 = k + gamma_cycles - cycles;
        if (g2 < 0 || g2 % 2 != 0) throw std::logic_error("wick: bad genus exponent");
        std::size_t g = static_cast<std::size_t>(g2 / 2);
        if (genus_counts.size() <= g) genus_counts.resize(g + 1, 0);
        ++genus_counts[g];
    }
};

bool labels_pairable(const std::vector<int>& labels) {
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    for (const auto& [l, c] : counts)
        if (c % 2 != 0) return false;
    return true;
}

std::vector<std::int64_t> count_pairings(const std::vector<int>& labels,
                                         const std::vector<int>& succ, int gamma_cycles,
                                         int max_len) {
    const int n = static_cast<int>(labels.size());
    if (n % 2 != 0 || !labels_pairable(labels)) return {};
    if (n > max_len)
        throw std::invalid_argument("wick: word length exceeds pairing cap (" +
                                    std::to_string(max_len) + ")");
    PairingCounter pc{labels, succ, std::vector<int>(n, -1), {}, n / 2, gamma_cycles};
    if (n > 0) pc.run();
    else pc.genus_counts = {1};
    return pc.genus_counts;
}

}  // namespace

NSeries gue_expect_word(const Word& w, int max_len) {
    if (w.empty()) return NSeries{{1}};
    const int n = static_cast<int>(w.size());
    std::vector<int> succ(n);
    for (int i = 0; i < n; ++i) succ[i] = (i + 1) % n;
    NSeries s;
    s.coeffs = count_pairings(w.letters, succ, 1, max_len);
    return s;
}

std::map<int, Complex> gue_expect_series(const TracePoly& p, int max_len) {
    std::map<int, Complex> out;
    for (const auto& [key, c] : p.terms()) {
        std::vector<int> labels;
        std::vector<int> succ;
        int gamma_cycles = 0;
        auto push_component = [&](const Word& w) {
            if (w.empty()) return;
            int base = static_cast<int>(labels.size());
            int len = static_cast<int>(w.size());
            for (int i = 0; i < len; ++i) {
                labels.push_back(w.letters[i]);
                succ.push_back(base + (i + 1) % len);
            }
            ++gamma_cycles;
        };
        push_component(key.word);
        for (const auto& t : key.traces) push_component(t);
        auto counts = count_pairings(labels, succ, gamma_cycles, max_len);
        for (std::size_t g = 0; g < counts.size(); ++g) {
            if (counts[g] == 0) continue;
            out[static_cast<int>(g)] += c * static_cast<double>(counts[g]);
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (std::abs(it->second) <= kCoeffPruneTol) it = out.erase(it);
        else ++it;
    }
    return out;
}

Complex gue_expect_trace_poly(const TracePoly& p, int N, int max_len) {
    if (N < 1) throw std::invalid_argument("gue_expect_trace_poly: N must be positive");
    using Rational = boost::multiprecision::cpp_rational;
    using Int = boost::multiprecision::cpp_int;
    auto series = gue_expect_series(p, max_len);
    Rational re = 0, im = 0;
    Int n2 = Int(N) * N;
    for (const auto& [g, c] : series) {
        Int denom = 1;
        for (int i = 0; i < g; ++i) denom *= n2;
        re += Rational(c.real()) / Rational(denom);
        im += Rational(c.imag()) / Rational(denom);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

bool limit_agrees_with_free(const TracePoly& p, int max_len) {
    auto series = gue_expect_series(p, max_len);
    Complex c0 = series.count(0) ? series.at(0) : Complex(0.0);
    Complex free_val = tau_trace_poly(p, SemicircleFamily::standard(p.dim()));
    double scale = 1.0;
    for (const auto& [key, c] : p.terms()) scale = std::max(scale, std::abs(c));
    return std::abs(c0 - free_val) <= 1e-12 * scale;
}

}  // namespace nct
