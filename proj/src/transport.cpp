#include "nct/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nct/threads.hpp"

namespace nct {

double TransportSpec::kappa() const {
    const TracePoly quad = quadratic_potential(dim());
    double k0 = regularity_check(V0 - quad, R, reg_k).kappa;
    double k1 = regularity_check(V1 - quad, R, reg_k).kappa;
    return std::max(k0, k1);
}

namespace {

TracePoly interpolate(const TransportSpec& spec, double s) {
    return spec.V0 * Complex(1.0 - s) + spec.V1 * Complex(s);
}

struct PsiAccum {
    HermTuple grad;       // -1/2 sum_n w_n J_n^T g_n for one trajectory
    double g_max = 0.0;   // largest |D Vdot(X_t)| seen, feeds the tail bound
};

// One pathwise-sensitivity trajectory: forward Euler storing the
// states, then reverse accumulation A <- w_n g_n + (I + h Db(X_n)) A, which
// is exact for the discrete scheme because Db is the (symmetric) Hessian of
// -1/2 N tr_N V_s.
PsiAccum psi_trajectory(const TransportSpec& spec, const DriftOp& bs, const DriftOp& bdot,
                        const HermTuple& H, std::uint64_t seed, double noise_sign,
                        const NoiseTweak& tweak) {
    const int n_steps = std::max(1, static_cast<int>(std::lround(spec.T_max / spec.dt)));
    const double sqh = noise_sign * std::sqrt(spec.dt);
    const int N = H.N, d = H.d;

    // forward pass stores the states and g_n = D Vdot(X_n); the drift
    // evaluation's word cache already holds the powers g_n needs
    std::vector<HermTuple> traj, gs;
    traj.reserve(n_steps + 1);
    gs.resize(static_cast<std::size_t>(n_steps) + 1, HermTuple(N, d));
    traj.push_back(H);
    Rng rng(seed);
    HermTuple Y = H, bY(N, d);
    for (int n = 1; n <= n_steps; ++n) {
        EvalContext ctx(Y);
        bs.eval_into(ctx, bY);
        bdot.eval_into(ctx, gs[static_cast<std::size_t>(n - 1)]);  // -1/2 D Vdot
        HermTuple G = sample_gue(N, d, rng);
        if (tweak) tweak(G);
        for (int p = 0; p < d; ++p) Y[p] += spec.dt * bY[p] + sqh * G[p];
        Y.symmetrize();
        if (n % 8 == 0 && !(Y.max_norm_estimate(6) <= kGuardThreshold))
            throw GuardError("transport trajectory diverged");
        traj.push_back(Y);
    }
    {
        EvalContext ctx(traj.back());
        bdot.eval_into(ctx, gs[static_cast<std::size_t>(n_steps)]);
    }

    auto weight = [&](int n) { return (n == 0 || n == n_steps) ? 0.5 * spec.dt : spec.dt; };

    PsiAccum acc;
    acc.grad = HermTuple(N, d);
    // reverse accumulation A <- (I + h Db(X_n)) A + w_n g_n, where the stored
    // slots hold -1/2 D Vdot so g_n = -2 * gs[n]
    for (int p = 0; p < d; ++p)
        acc.grad[p] = weight(n_steps) * (-2.0) * gs[static_cast<std::size_t>(n_steps)][p];
    acc.g_max = acc.grad.max_norm_estimate(8) / weight(n_steps);
    for (int n = n_steps - 1; n >= 0; --n) {
        EvalContext ctx(traj[static_cast<std::size_t>(n)]);
        HermTuple dba(N, d);
        bs.dir_into(ctx, acc.grad, dba);
        for (int p = 0; p < d; ++p)
            acc.grad[p] += spec.dt * dba[p] +
                           weight(n) * (-2.0) * gs[static_cast<std::size_t>(n)][p];
        if (n % 64 == 0) {
            double gn = gs[static_cast<std::size_t>(n)].max_norm_estimate(6) * 2.0;
            acc.g_max = std::max(acc.g_max, gn);
        }
    }
    for (int p = 0; p < d; ++p) acc.grad[p] *= -0.5;
    acc.grad.symmetrize();
    return acc;
}

}  // namespace

PsiEstimate psi_estimate(const TransportSpec& spec, double s, const HermTuple& H,
                         std::uint64_t seed, const NoiseTweak& tweak) {
    if (H.d != spec.dim()) throw std::invalid_argument("psi_estimate: shape mismatch");
    const double kap = spec.kappa();
    if (kap >= 1.0 && !spec.allow_unstable)
        throw GuardError("psi_estimate: kappa_R=" + std::to_string(kap) +
                         " >= 1, no decay guarantee (set allow_unstable to proceed)");

    DriftOp bs(interpolate(spec, s));
    DriftOp bdot(spec.V1 - spec.V0);

    // antithetic pairs: trajectories 2i and 2i+1 share a stream with the
    // noise negated, cancelling the leading-order estimator noise
    std::vector<PsiAccum> slots(static_cast<std::size_t>(spec.M_psi));
    parallel_for(slots.size(), spec.threads, [&](std::size_t i) {
        slots[i] = psi_trajectory(spec, bs, bdot, H, derive_seed(seed, i / 2),
                                  i % 2 == 0 ? 1.0 : -1.0, tweak);
    });

    PsiEstimate est;
    est.kappa = kap;
    est.value = HermTuple(H.N, H.d);
    double gmax = 0.0;
    for (const auto& t : slots) {
        est.value += t.grad;
        gmax = std::max(gmax, t.g_max);
    }
    est.value *= 1.0 / static_cast<double>(spec.M_psi);
    if (kap < 1.0) {
        // tail of -1/2 int_T^inf J^T g dt under the e^{-(1-kappa)t/2} decay
        est.tail_bound =
            0.5 * gmax * (2.0 / (1.0 - kap)) * std::exp(-0.5 * (1.0 - kap) * spec.T_max);
    } else {
        est.tail_bound = std::numeric_limits<double>::infinity();
    }
    return est;
}

HermTuple flow_transport(const TransportSpec& spec, const HermTuple& H, std::uint64_t seed,
                         const NoiseTweak& tweak) {
    if (spec.s_steps < 1) throw std::invalid_argument("flow_transport: s_steps must be >= 1");
    const double ds = 1.0 / spec.s_steps;
    HermTuple T = H;
    for (int m = 0; m < spec.s_steps; ++m) {
        const double s = m * ds;
        std::uint64_t stage_seed = derive_seed(seed, 1000 + m);
        // common random numbers across the two stages of one step
        HermTuple k1 = psi_estimate(spec, s, T, stage_seed, tweak).value;
        HermTuple pred = T;
        for (int p = 0; p < T.d; ++p) pred[p] += ds * k1[p];
        HermTuple k2 = psi_estimate(spec, s + ds, pred, stage_seed, tweak).value;
        for (int p = 0; p < T.d; ++p) T[p] += 0.5 * ds * (k1[p] + k2[p]);
        T.symmetrize();
    }
    return T;
}

PushforwardReport pushforward_check(const TransportSpec& spec, int N,
                                    const std::vector<TracePoly>& observables,
                                    const std::vector<std::string>& names, int samples,
                                    const SdeParams& direct_params, std::uint64_t seed) {
    const int d = spec.dim();
    const std::size_t K = observables.size();
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(samples),
                                          std::vector<double>(K, 0.0));
    double tail = 0.0, kap = spec.kappa();
    // transport pipeline: trajectories inside psi_estimate stay sequential
    // here so the sample loop can own the worker threads
    TransportSpec inner = spec;
    inner.threads = 1;
    parallel_for(static_cast<std::size_t>(samples), spec.threads, [&](std::size_t i) {
        HermTuple H = sample_gue(N, d, derive_seed(seed, 2 * i));
        HermTuple Y = flow_transport(inner, H, derive_seed(seed, 2 * i + 1));
        EvalContext ctx(Y);
        for (std::size_t k = 0; k < K; ++k) vals[i][k] = tr_n(eval(observables[k], ctx));
    });
    {
        TransportSpec probe = inner;
        probe.M_psi = 1;
        HermTuple H0 = sample_gue(N, d, derive_seed(seed, 999999));
        tail = psi_estimate(probe, 1.0, H0, derive_seed(seed, 999998)).tail_bound;
    }

    ModelSpec model(d, N, spec.V1);
    auto direct = estimate_observables(model, direct_params, observables, names);

    PushforwardReport rep;
    rep.samples = samples;
    rep.tail_bound = tail;
    rep.kappa = kap;
    for (std::size_t k = 0; k < K; ++k) {
        PushforwardRow row;
        row.name = names[k];
        double mean = 0.0;
        for (int i = 0; i < samples; ++i) mean += vals[static_cast<std::size_t>(i)][k];
        mean /= samples;
        double var = 0.0;
        for (int i = 0; i < samples; ++i) {
            double dv = vals[static_cast<std::size_t>(i)][k] - mean;
            var += dv * dv;
        }
        var = samples > 1 ? var / (samples - 1) : 0.0;
        row.push_mean = mean;
        row.push_stderr = std::sqrt(var / samples);
        row.direct_mean = direct[k].mean;
        row.direct_stderr = direct[k].stderr_;
        double denom = std::sqrt(row.push_stderr * row.push_stderr +
                                 row.direct_stderr * row.direct_stderr);
        row.z = denom > 0.0 ? (row.push_mean - row.direct_mean) / denom : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

std::vector<StrongConvRow> strong_conv_scan(const TracePoly& P, const TracePoly& V,
                                            const std::vector<int>& N_grid, int samples,
                                            const SdeParams& params) {
    const int d = V.dim();
    const bool gaussian = (V - quadratic_potential(d)).is_zero();
    std::vector<StrongConvRow> rows;
    for (int N : N_grid) {
        std::vector<double> norms(static_cast<std::size_t>(samples), 0.0);
        if (gaussian) {
            parallel_for(norms.size(), params.threads, [&](std::size_t i) {
                HermTuple y = sample_gue(N, d, derive_seed(params.seed ^ (0xABCDu + N), i));
                Matrix m = eval(P, y);
                m = 0.5 * (m + m.adjoint()).eval();
                Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
                norms[i] = es.eigenvalues().cwiseAbs().maxCoeff();
            });
        } else {
            ModelSpec model(d, N, V);
            SdeParams p = params;
            p.M = samples;
            p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(N));
            auto states = sample_model(model, p, 1);
            for (std::size_t i = 0; i < states.size(); ++i) {
                Matrix m = eval(P, states[i]);
                m = 0.5 * (m + m.adjoint()).eval();
                Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
                norms[i] = es.eigenvalues().cwiseAbs().maxCoeff();
            }
        }
        StrongConvRow row;
        row.N = N;
        row.samples = samples;
        std::vector<double> sorted = norms;
        std::sort(sorted.begin(), sorted.end());
        row.norm_median = sorted[sorted.size() / 2];
        row.norm_max = sorted.back();
        for (double v : norms) row.norm_mean += v;
        row.norm_mean /= static_cast<double>(norms.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nct
