#pragma once

#include <string>
#include <vector>

#include "nct/langevin.hpp"

namespace nct {

// Construction of the transport map from the quadratic (GUE) model to the
// model with potential V1 along the interpolation V_s = (1-s) V0 + s V1.
struct TransportSpec {
    TracePoly V0, V1;
    int s_steps = 8;        // flow grid on [0,1]
    int M_psi = 8;          // trajectories per Psi estimate
    double T_max = 10.0;    // time horizon of the Psi integral
    double dt = 0.02;       // Euler step of the trajectory SDE
    double R = 4.0;         // ball radius for the kappa diagnostic
    int reg_k = 0;
    bool allow_unstable = false;  // proceed when kappa_R >= 1
    int threads = 0;

    TransportSpec() : V0(quadratic_potential(1)), V1(quadratic_potential(1)) {}
    TransportSpec(TracePoly v0, TracePoly v1) : V0(std::move(v0)), V1(std::move(v1)) {
        if (V0.dim() != V1.dim()) throw std::invalid_argument("TransportSpec: alphabet mismatch");
    }
    int dim() const { return V0.dim(); }
    // max over the endpoints of the ball-restricted second-derivative bound
    double kappa() const;
};

struct PsiEstimate {
    HermTuple value;
    double tail_bound = 0.0;  // reported truncation tail, infinite if kappa >= 1
    double kappa = 0.0;
};

// Psi_s(H) = -1/2 int_0^inf E[ D_p(Vdot o X_t^s)(H) ] dt, estimated over
// M_psi trajectories of the interpolated Langevin SDE started at H. The
// integrand is the pathwise gradient: the trajectory Jacobian (propagated
// through each Euler step via the drift's directional derivative) applied to
// D Vdot(X_t), accumulated in reverse; trapezoid rule on [0, T_max].
PsiEstimate psi_estimate(const TransportSpec& spec, double s, const HermTuple& H,
                         std::uint64_t seed, const NoiseTweak& tweak = {});

// Heun integration of dT/ds = Psi_s(T), T_0 = id, over the s-grid; the two
// stages of one step share their noise seed, distinct steps use fresh seeds.
HermTuple flow_transport(const TransportSpec& spec, const HermTuple& H, std::uint64_t seed,
                         const NoiseTweak& tweak = {});

struct PushforwardRow {
    std::string name;
    double push_mean = 0.0, push_stderr = 0.0;
    double direct_mean = 0.0, direct_stderr = 0.0;
    double z = 0.0;
};

struct PushforwardReport {
    std::vector<PushforwardRow> rows;
    double tail_bound = 0.0;
    double kappa = 0.0;
    int samples = 0;
};

// Pushes GUE samples through the transport flow and compares observable
// estimates against direct Langevin sampling of the V1 model.
PushforwardReport pushforward_check(const TransportSpec& spec, int N,
                                    const std::vector<TracePoly>& observables,
                                    const std::vector<std::string>& names, int samples,
                                    const SdeParams& direct_params, std::uint64_t seed);

struct StrongConvRow {
    int N = 0;
    double norm_mean = 0.0;
    double norm_median = 0.0;
    double norm_max = 0.0;
    int samples = 0;
};

// Spectral norms of P(Y^N) across an N-grid; for W = 0 the samples are
// direct GUE draws, otherwise stationary Langevin samples of the model.
std::vector<StrongConvRow> strong_conv_scan(const TracePoly& P, const TracePoly& V,
                                            const std::vector<int>& N_grid, int samples,
                                            const SdeParams& params);

}  // namespace nct
