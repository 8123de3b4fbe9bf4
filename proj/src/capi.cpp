#include "nct/nct.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "nct/config.hpp"
#include "nct/fit.hpp"
#include "nct/free.hpp"
#include "nct/parser.hpp"
#include "nct/wick.hpp"

using namespace nct;

struct nct_poly {
    TracePoly p;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int set_error(int code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return NCT_OK;
    } catch (const GuardError& e) {
        return set_error(NCT_EGUARD, e.what());
    } catch (const ConfigError& e) {
        return set_error(NCT_EINVAL, e.what());
    } catch (const ParseError& e) {
        return set_error(NCT_EINVAL, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(NCT_EINVAL, e.what());
    } catch (const std::exception& e) {
        return set_error(NCT_EFAIL, e.what());
    }
}

// random trace polynomial with small Gaussian-integer coefficients, used by
// the SD regression sweep
TracePoly random_trace_poly(Rng& rng, int dim, int max_degree, int terms) {
    TracePoly p(dim);
    for (int t = 0; t < terms; ++t) {
        int deg = static_cast<int>(rng.bits() % (max_degree + 1));
        int split = static_cast<int>(rng.bits() % (deg + 1));
        Word outer, tr;
        for (int i = 0; i < split; ++i)
            outer.letters.push_back(1 + static_cast<int>(rng.bits() % dim));
        for (int i = split; i < deg; ++i)
            tr.letters.push_back(1 + static_cast<int>(rng.bits() % dim));
        std::vector<Word> traces;
        if (!tr.empty()) traces.push_back(tr);
        double re = static_cast<double>(static_cast<int>(rng.bits() % 7) - 3);
        double im = static_cast<double>(static_cast<int>(rng.bits() % 7) - 3);
        p.add_term(outer, traces, Complex(re, im));
    }
    return p;
}

}  // namespace

extern "C" {

const char* nct_version(void) { return "0.1.0"; }
const char* nct_last_error(void) { return g_last_error.c_str(); }

void nct_string_free(char* s) { std::free(s); }
void nct_i64_free(int64_t* p) { std::free(p); }
void nct_f64_free(double* p) { std::free(p); }

int nct_poly_parse(const char* text, int dim, nct_poly** out) {
    if (!text || !out) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] { *out = new nct_poly{parse_poly(text, dim)}; });
}

int nct_poly_print(const nct_poly* p, char** out) {
    if (!p || !out) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] { *out = dup_string(print_poly(p->p)); });
}

int nct_poly_dim(const nct_poly* p, int* dim) {
    if (!p || !dim) return set_error(NCT_EINVAL, "null argument");
    *dim = p->p.dim();
    return NCT_OK;
}

void nct_poly_free(nct_poly* p) { delete p; }

int nct_oracle_word_series(const char* word, int max_len, int64_t** coeffs, size_t* n) {
    if (!word || !coeffs || !n) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        Word w = parse_word(word);
        NSeries s = gue_expect_word(w, max_len > 0 ? max_len : kDefaultMaxWickLen);
        *n = s.coeffs.size();
        *coeffs = static_cast<int64_t*>(std::malloc(sizeof(int64_t) * std::max<size_t>(*n, 1)));
        for (size_t i = 0; i < *n; ++i) (*coeffs)[i] = s.coeffs[i];
    });
}

int nct_oracle_poly_series(const nct_poly* p, int max_len, double** re, double** im, size_t* n) {
    if (!p || !re || !im || !n) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        auto series = gue_expect_series(p->p, max_len > 0 ? max_len : kDefaultMaxWickLen);
        int top = series.empty() ? -1 : series.rbegin()->first;
        *n = static_cast<size_t>(top + 1);
        *re = static_cast<double*>(std::malloc(sizeof(double) * std::max<size_t>(*n, 1)));
        *im = static_cast<double*>(std::malloc(sizeof(double) * std::max<size_t>(*n, 1)));
        for (size_t i = 0; i < *n; ++i) {
            auto it = series.find(static_cast<int>(i));
            Complex c = it == series.end() ? Complex(0.0) : it->second;
            (*re)[i] = c.real();
            (*im)[i] = c.imag();
        }
    });
}

int nct_tau(const nct_poly* p, double* re, double* im) {
    if (!p || !re || !im) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        Complex v = tau_trace_poly(p->p, SemicircleFamily::standard(p->p.dim()));
        *re = v.real();
        *im = v.imag();
    });
}

int nct_sd_residual_max(uint64_t seed, int count, int max_degree, int dim, double* max_abs) {
    if (!max_abs || count < 1 || dim < 1 || max_degree < 0)
        return set_error(NCT_EINVAL, "bad arguments");
    return guarded([&] {
        Rng rng(seed);
        auto fam = SemicircleFamily::standard(dim);
        double worst = 0.0;
        for (int i = 0; i < count; ++i) {
            TracePoly f = random_trace_poly(rng, dim, max_degree, 4);
            for (int e = 1; e <= dim; ++e)
                worst = std::max(worst, std::abs(sd_residual(f, e, fam)));
        }
        *max_abs = worst;
    });
}

int nct_cond_exp(const nct_poly* p, const int* y_vars, size_t ny, nct_poly** out) {
    if (!p || !out || (ny > 0 && !y_vars)) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        std::set<int> y(y_vars, y_vars + ny);
        *out = new nct_poly{cond_exp(p->p, y, SemicircleFamily::standard(p->p.dim()))};
    });
}

int nct_regularity(const nct_poly* W, double R, int k, double* kappa, int* passes) {
    if (!W || !kappa || !passes) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        auto rep = regularity_check(W->p, R, k);
        *kappa = rep.kappa;
        *passes = rep.passes ? 1 : 0;
    });
}

int nct_fit_inverse_square(const double* Ns, const double* vals, const double* errs, size_t n,
                           double* a0, double* a1, double* residuals, int* o4_consistent) {
    if (!Ns || !vals || !a0 || !a1) return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        std::vector<FitPoint> pts;
        for (size_t i = 0; i < n; ++i)
            pts.push_back({Ns[i], vals[i], errs ? errs[i] : 0.0});
        FitResult r = fit_inverse_square(pts);
        *a0 = r.a0;
        *a1 = r.a1;
        if (residuals)
            for (size_t i = 0; i < n; ++i) residuals[i] = r.residuals[i];
        if (o4_consistent) *o4_consistent = r.o4_consistent ? 1 : 0;
    });
}

int nct_run(const char* config_json, const char* command, char** csv, char** manifest_json) {
    if (!config_json || !command || !csv || !manifest_json)
        return set_error(NCT_EINVAL, "null argument");
    return guarded([&] {
        RunConfig cfg = parse_config(config_json);
        RunOutput out = run_command(command, cfg);
        *csv = dup_string(rows_to_csv(out.rows));
        *manifest_json = dup_string(out.manifest_json);
    });
}

}  // extern "C"
