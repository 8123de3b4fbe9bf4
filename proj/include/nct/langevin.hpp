#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nct/herm_tuple.hpp"
#include "nct/rng.hpp"
#include "nct/tensor_poly.hpp"
#include "nct/trace_poly.hpp"

namespace nct {

// Almost-sure GUE norm bound constant; the divergence guard trips at
// 10 * (L + 1).
inline constexpr double kGueNormConst = 2.0;
inline constexpr double kGuardThreshold = 10.0 * (kGueNormConst + 1.0);

struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multimatrix model with potential V = 1/2 sum Xi^2 + W.
struct ModelSpec {
    int d = 1;
    int N = 8;
    TracePoly V;

    ModelSpec() : V(quadratic_potential(1)) {}
    ModelSpec(int d_, int N_, TracePoly V_);

    TracePoly W() const;  // V minus the quadratic part
    RegularityReport regularity(double R = 4.0, int k = 0) const;
};

struct SdeParams {
    double h = 0.01;
    double t_burn = 20.0;
    double thin = 2.0;
    int M = 1;  // trajectory count
    std::uint64_t seed = 1;
    int threads = 0;
    bool override_guard = false;  // run even when the regularity check fails
};

HermTuple sample_gue(int N, int d, Rng& rng);
HermTuple sample_gue(int N, int d, std::uint64_t seed);

// Drift of the Langevin SDE, b(Y) = -1/2 D V(Y), with the bold gradients
// precomputed; dir() is its directional derivative (the Hessian action of
// -1/2 N tr_N V, a symmetric operator).
class DriftOp {
  public:
    explicit DriftOp(const TracePoly& V);
    const TracePoly& potential() const { return V_; }
    int dim() const { return V_.dim(); }

    HermTuple operator()(const HermTuple& Y) const;
    HermTuple dir(const HermTuple& Y, const HermTuple& U) const;
    void eval_into(EvalContext& ctx, HermTuple& out) const;
    void dir_into(EvalContext& ctx, const HermTuple& U, HermTuple& out) const;

  private:
    TracePoly V_;
    std::vector<TracePoly> grads_;
};

HermTuple drift(const TracePoly& V, const HermTuple& Y);

using NoiseTweak = std::function<void(HermTuple&)>;

// Euler-Maruyama integration of dY = dS - 1/2 D V(Y) dt from Y0; returns the
// states at the requested times (rounded to step boundaries). Deterministic
// per seed; noise increments are sqrt(h) times a GUE sample, optionally
// post-processed by `tweak` (replay/conjugation checks).
std::vector<HermTuple> integrate(const ModelSpec& spec, const HermTuple& Y0,
                                 const SdeParams& params, const std::vector<double>& record,
                                 const NoiseTweak& tweak = {});

struct ObsEstimate {
    std::string name;
    double mean = 0.0;
    double stderr_ = 0.0;
    int n = 0;
};

// Stationary estimates of tr_N f over M independent trajectories (burn-in
// plus `samples_per_traj` thinned samples per trajectory). Mean and standard
// error are taken across trajectories; the reduction order is fixed by the
// trajectory index.
std::vector<ObsEstimate> estimate_observables(const ModelSpec& spec, const SdeParams& params,
                                              const std::vector<TracePoly>& observables,
                                              const std::vector<std::string>& names,
                                              int samples_per_traj = 1);

// Stationary samples of the model (one or more per trajectory).
std::vector<HermTuple> sample_model(const ModelSpec& spec, const SdeParams& params,
                                    int samples_per_traj = 1);

// Moments m_0..m_depth of the limiting single-variable law: damped
// fixed-point iteration on the truncated planar Schwinger-Dyson system
// tau(V'(x) x^n) = sum_{j<n} m_j m_{n-1-j}, started from semicircle moments.
// vcoeffs[k] is the coefficient of x^k in V.
std::vector<double> planar_moments(const std::vector<double>& vcoeffs, int depth);

}  // namespace nct
