#include "nct/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nct/free.hpp"
#include "nct/threads.hpp"

namespace nct {

ModelSpec::ModelSpec(int d_, int N_, TracePoly V_) : d(d_), N(N_), V(std::move(V_)) {
    if (V.dim() != d) throw std::invalid_argument("ModelSpec: potential alphabet != d");
    if (N < 1) throw std::invalid_argument("ModelSpec: N must be positive");
    if (!is_self_adjoint(V)) throw std::invalid_argument("ModelSpec: potential not self-adjoint");
}

TracePoly ModelSpec::W() const { return V - quadratic_potential(d); }

RegularityReport ModelSpec::regularity(double R, int k) const {
    return regularity_check(W(), R, k);
}

HermTuple sample_gue(int N, int d, Rng& rng) {
    HermTuple x(N, d);
    const double diag_sd = 1.0 / std::sqrt(static_cast<double>(N));
    const double off_sd = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
    for (int m = 0; m < d; ++m) {
        Matrix& a = x[m];
        for (int i = 0; i < N; ++i) {
            a(i, i) = diag_sd * rng.normal();
            for (int j = i + 1; j < N; ++j) {
                Complex z(off_sd * rng.normal(), off_sd * rng.normal());
                a(i, j) = z;
                a(j, i) = std::conj(z);
            }
        }
    }
    return x;
}

HermTuple sample_gue(int N, int d, std::uint64_t seed) {
    Rng rng(seed);
    return sample_gue(N, d, rng);
}

DriftOp::DriftOp(const TracePoly& V) : V_(V) {
    for (int p = 1; p <= V.dim(); ++p) grads_.push_back(bold_grad(V, p));
}

void DriftOp::eval_into(EvalContext& ctx, HermTuple& out) const {
    for (std::size_t p = 0; p < grads_.size(); ++p) {
        out[p] = -0.5 * eval(grads_[p], ctx);
        out[p] = 0.5 * (out[p] + out[p].adjoint()).eval();
    }
}

HermTuple DriftOp::operator()(const HermTuple& Y) const {
    HermTuple out(Y.N, Y.d);
    EvalContext ctx(Y);
    eval_into(ctx, out);
    return out;
}

void DriftOp::dir_into(EvalContext& ctx, const HermTuple& U, HermTuple& out) const {
    for (std::size_t p = 0; p < grads_.size(); ++p) {
        out[p] = -0.5 * frechet_dir(grads_[p], ctx, U);
        out[p] = 0.5 * (out[p] + out[p].adjoint()).eval();
    }
}

HermTuple DriftOp::dir(const HermTuple& Y, const HermTuple& U) const {
    HermTuple out(Y.N, Y.d);
    EvalContext ctx(Y);
    dir_into(ctx, U, out);
    return out;
}

HermTuple drift(const TracePoly& V, const HermTuple& Y) { return DriftOp(V)(Y); }

namespace {

void check_guard(const HermTuple& Y, long step) {
    double nrm = Y.max_norm_estimate();
    // negated comparison so NaN/inf after overflow also trips
    if (!(nrm <= kGuardThreshold))
        throw GuardError("divergence guard tripped at step " + std::to_string(step) +
                         " (norm > " + std::to_string(kGuardThreshold) + ")");
}

}  // namespace

std::vector<HermTuple> integrate(const ModelSpec& spec, const HermTuple& Y0,
                                 const SdeParams& params, const std::vector<double>& record,
                                 const NoiseTweak& tweak) {
    if (Y0.N != spec.N || Y0.d != spec.d) throw std::invalid_argument("integrate: shape mismatch");
    if (params.h <= 0.0) throw std::invalid_argument("integrate: step must be positive");
    if (!params.override_guard) {
        auto rep = spec.regularity();
        if (!rep.passes)
            throw GuardError("regularity check failed (kappa_R=" + std::to_string(rep.kappa) +
                             " >= " + std::to_string(rep.threshold) +
                             "); set override to integrate anyway");
    }
    DriftOp b(spec.V);
    std::vector<long> steps;
    for (double t : record) steps.push_back(std::lround(t / params.h));
    long n_steps = steps.empty() ? 0 : *std::max_element(steps.begin(), steps.end());

    Rng rng(params.seed);
    const double sqh = std::sqrt(params.h);
    HermTuple Y = Y0;
    HermTuple bY(spec.N, spec.d);
    std::vector<HermTuple> out(record.size());
    auto emit = [&](long n) {
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i] == n) out[i] = Y;
    };
    emit(0);
    for (long n = 1; n <= n_steps; ++n) {
        EvalContext ctx(Y);
        b.eval_into(ctx, bY);
        HermTuple G = sample_gue(spec.N, spec.d, rng);
        if (tweak) tweak(G);
        for (int p = 0; p < spec.d; ++p) Y[p] += params.h * bY[p] + sqh * G[p];
        Y.symmetrize();
        if (n % 16 == 0) check_guard(Y, n);
        emit(n);
    }
    return out;
}

std::vector<HermTuple> sample_model(const ModelSpec& spec, const SdeParams& params,
                                    int samples_per_traj) {
    if (params.M < 1) throw std::invalid_argument("sample_model: M must be >= 1");
    std::vector<double> record;
    for (int s = 0; s < samples_per_traj; ++s) record.push_back(params.t_burn + s * params.thin);
    std::vector<std::vector<HermTuple>> slots(params.M);
    parallel_for(static_cast<std::size_t>(params.M), params.threads, [&](std::size_t i) {
        SdeParams p = params;
        p.seed = derive_seed(params.seed, i);
        HermTuple Y0(spec.N, spec.d);
        slots[i] = integrate(spec, Y0, p, record);
    });
    std::vector<HermTuple> out;
    out.reserve(static_cast<std::size_t>(params.M) * samples_per_traj);
    for (auto& s : slots)
        for (auto& y : s) out.push_back(std::move(y));
    return out;
}

std::vector<ObsEstimate> estimate_observables(const ModelSpec& spec, const SdeParams& params,
                                              const std::vector<TracePoly>& observables,
                                              const std::vector<std::string>& names,
                                              int samples_per_traj) {
    if (observables.size() != names.size())
        throw std::invalid_argument("estimate_observables: names/observables mismatch");
    std::vector<double> record;
    for (int s = 0; s < samples_per_traj; ++s) record.push_back(params.t_burn + s * params.thin);

    const std::size_t M = static_cast<std::size_t>(params.M);
    const std::size_t K = observables.size();
    std::vector<std::vector<double>> traj_means(M, std::vector<double>(K, 0.0));
    parallel_for(M, params.threads, [&](std::size_t i) {
        SdeParams p = params;
        p.seed = derive_seed(params.seed, i);
        HermTuple Y0(spec.N, spec.d);
        auto states = integrate(spec, Y0, p, record);
        for (const auto& y : states) {
            EvalContext ctx(y);
            for (std::size_t k = 0; k < K; ++k)
                traj_means[i][k] += tr_n(eval(observables[k], ctx));
        }
        for (std::size_t k = 0; k < K; ++k) traj_means[i][k] /= static_cast<double>(states.size());
    });

    std::vector<ObsEstimate> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < M; ++i) mean += traj_means[i][k];
        mean /= static_cast<double>(M);
        double var = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double dv = traj_means[i][k] - mean;
            var += dv * dv;
        }
        var = M > 1 ? var / static_cast<double>(M - 1) : 0.0;
        out[k] = {names[k], mean, std::sqrt(var / static_cast<double>(M)), static_cast<int>(M)};
    }
    return out;
}

std::vector<double> planar_moments(const std::vector<double>& vcoeffs, int depth) {
    if (depth < 0) throw std::invalid_argument("planar_moments: depth must be >= 0");
    const int deg = static_cast<int>(vcoeffs.size()) - 1;
    if (deg < 2 || vcoeffs[2] <= 0.0)
        throw std::invalid_argument("planar_moments: potential needs a positive quadratic term");
    // V'(x) = sum_k k vc[k] x^(k-1); the SD relation is solved for the moment
    // multiplying the quadratic term.
    const double c2 = 2.0 * vcoeffs[2];
    // Closure errors at the internal truncation propagate down by a factor of
    // roughly (deg V') g B^2 per level, close to 1 for the strongest desk-scale
    // couplings; a deep buffer keeps the low moments clean.
    const int K = depth + 240;
    std::vector<double> m(K + 1, 0.0), next(K + 1, 0.0);
    m[0] = 1.0;
    // semicircle start at low orders; zero tail above keeps the quadratic
    // terms of the first sweeps from blowing up at high index
    for (int n = 2; n <= std::min(K, depth + 2); n += 2)
        m[n] = static_cast<double>(catalan(n / 2));

    auto moment = [&](const std::vector<double>& v, int n) -> double {
        if (n <= K) return v[n];
        // geometric tail closure, ratio clamped against transient garbage
        if (n % 2 == 1) return 0.0;
        int base = K % 2 == 0 ? K : K - 1;
        double r = v[base - 2] != 0.0 ? v[base] / v[base - 2] : 0.0;
        r = std::clamp(r, 0.0, 16.0);
        double val = v[base];
        for (int q = base; q < n; q += 2) val *= r;
        return val;
    };

    const double omega = 0.5;
    double resid = 0.0;
    const int max_iters = 100000;
    int it = 0;
    for (; it < max_iters; ++it) {
        next = m;
        next[0] = 1.0;
        for (int n = 0; n + 1 <= K; ++n) {
            double conv = 0.0;
            for (int j = 0; j <= n - 1; ++j) conv += m[j] * m[n - 1 - j];
            double rest = 0.0;
            for (int k = 1; k <= deg; ++k) {
                if (k == 2 || vcoeffs[k] == 0.0) continue;
                rest += k * vcoeffs[k] * moment(m, k - 1 + n);
            }
            next[n + 1] = (conv - rest) / c2;
        }
        for (int n = 0; n <= K; ++n) m[n] = (1.0 - omega) * m[n] + omega * next[n];
        resid = 0.0;
        for (int n = 0; n + 1 <= depth + 2; ++n) {
            double conv = 0.0;
            for (int j = 0; j <= n - 1; ++j) conv += m[j] * m[n - 1 - j];
            double lhs = 0.0;
            for (int k = 1; k <= deg; ++k)
                if (vcoeffs[k] != 0.0) lhs += k * vcoeffs[k] * moment(m, k - 1 + n);
            resid = std::max(resid, std::abs(lhs - conv));
        }
        if (resid < 1e-12) break;
    }
    if (resid >= 1e-12)
        throw std::runtime_error("planar_moments: no convergence after 1e5 iterations");
    return std::vector<double>(m.begin(), m.begin() + depth + 1);
}

}  // namespace nct
