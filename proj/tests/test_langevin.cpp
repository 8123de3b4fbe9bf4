#include <doctest.h>

#include <Eigen/QR>

#include "helpers.hpp"
#include "nct/free.hpp"
#include "nct/langevin.hpp"
#include "nct/parser.hpp"
#include "nct/wick.hpp"

using namespace nct;
using namespace nct::testing;

namespace {

Matrix random_unitary(Rng& rng, int N) {
    Matrix g(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    return q;
}

// one-cut quartic law for V = x^2/2 + g x^4: density
// (1/2pi)(1 + 2gB^2 + 4gx^2) sqrt(B^2 - x^2) with B^2 + 3gB^4 = 4;
// independent quadrature oracle for the planar moments
double quartic_moment_quadrature(double g, int order) {
    double B2 = g == 0.0 ? 4.0 : (-1.0 + std::sqrt(1.0 + 48.0 * g)) / (6.0 * g);
    double B = std::sqrt(B2);
    // x = B sin(theta) removes the sqrt edge singularity; trapezoid on the
    // smooth integrand converges fast
    const int n = 20000;
    double h = M_PI / n, acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double th = -M_PI / 2 + i * h;
        double x = B * std::sin(th);
        double c = B * std::cos(th);
        double dens = (1.0 + 2.0 * g * B2 + 4.0 * g * x * x) * c / (2.0 * M_PI);
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::pow(x, order) * dens * c * h;
    }
    return acc;
}

}  // namespace

TEST_CASE("sample_gue: Hermitian by construction, moments match the oracle") {
    Rng rng(71);
    HermTuple x = sample_gue(16, 2, rng);
    CHECK(x.herm_defect() == 0.0);

    const int N = 32, M = 10000;
    double m2 = 0, m4 = 0, v2 = 0, v4 = 0;
    std::vector<double> s2, s4;
    for (int i = 0; i < M; ++i) {
        HermTuple y = sample_gue(N, 1, rng);
        Matrix sq = y[0] * y[0];
        double t2 = tr_n(sq);
        double t4 = sq.squaredNorm() / N;
        s2.push_back(t2);
        s4.push_back(t4);
        m2 += t2;
        m4 += t4;
    }
    m2 /= M;
    m4 /= M;
    for (int i = 0; i < M; ++i) {
        v2 += (s2[i] - m2) * (s2[i] - m2);
        v4 += (s4[i] - m4) * (s4[i] - m4);
    }
    double se2 = std::sqrt(v2 / (M - 1) / M), se4 = std::sqrt(v4 / (M - 1) / M);
    double oracle2 = gue_expect_word(word_power(1, 2)).eval(N);
    double oracle4 = gue_expect_word(word_power(1, 4)).eval(N);
    CHECK(std::abs(m2 - oracle2) < 3 * se2);
    CHECK(std::abs(m4 - oracle4) < 3 * se4);
}

TEST_CASE("drift: quadratic and quartic potentials") {
    Rng rng(73);
    HermTuple y = sample_gue(8, 2, rng);
    auto b = drift(quadratic_potential(2), y);
    for (int p = 0; p < 2; ++p) CHECK(rel_err(b[p], Matrix(-0.5 * y[p])) < 1e-14);

    double g = 0.3;
    auto V = parse_poly("0.5*X1^2+0.3*X1^4");
    HermTuple y1 = sample_gue(8, 1, rng);
    auto b1 = drift(V, y1);
    Matrix expect = -0.5 * y1[0] - 2.0 * g * (y1[0] * y1[0] * y1[0]);
    CHECK(rel_err(b1[0], expect) < 1e-13);
}

TEST_CASE("drift equals the finite-difference gradient of N tr_N V") {
    Rng rng(79);
    auto V = parse_poly("0.5*X1^2+0.5*X2^2+0.1*X1^4+0.2*tr(X1*X2)*X2") ;
    auto Vsa = (V + adjoint(V)) * Complex(0.5);
    const int N = 6, d = 2;
    HermTuple y = sample_gue(N, d, rng);
    HermTuple k = sample_gue(N, d, rng);
    auto b = drift(Vsa, y);
    // directional derivative of phi = N tr_N V along k vs -2 <b, k>
    double lhs = 0.0;
    {
        const double eps = 1e-6;
        HermTuple yp = y, ym = y;
        for (int p = 0; p < d; ++p) {
            yp[p] += eps * k[p];
            ym[p] -= eps * k[p];
        }
        double fp = N * tr_n(eval(Vsa, yp));
        double fm = N * tr_n(eval(Vsa, ym));
        lhs = (fp - fm) / (2 * eps);
    }
    double rhs = 0.0;
    for (int p = 0; p < d; ++p) rhs += -2.0 * (b[p] * k[p]).trace().real();
    CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)) < 1e-6);
}

TEST_CASE("integrate: zero-noise quadratic flow matches the linear ODE") {
    const int N = 8;
    Rng rng(83);
    HermTuple y0 = sample_gue(N, 1, rng);
    ModelSpec spec(1, N, quadratic_potential(1));

    SdeParams p;
    p.h = 5e-6;
    double T = 0.01;
    auto kill_noise = [](HermTuple& g) {
        for (auto& m : g.mats) m.setZero();
    };
    auto states = integrate(spec, y0, p, {T}, kill_noise);
    Matrix expect = std::exp(-T / 2.0) * y0[0];
    CHECK(rel_err(states[0][0], expect) < 1e-8);

    // exact agreement with the discrete closed form (1 - h/2)^n y0
    SdeParams p2;
    p2.h = 0.01;
    auto states2 = integrate(spec, y0, p2, {1.0}, kill_noise);
    Matrix expect2 = std::pow(1.0 - p2.h / 2.0, 100) * y0[0];
    CHECK(rel_err(states2[0][0], expect2) < 1e-13);
}

TEST_CASE("integrate: Hermiticity along the trajectory") {
    ModelSpec spec(1, 12, parse_poly("0.5*X1^2+0.05*X1^4"));
    SdeParams p;
    p.h = 0.02;
    p.seed = 5;
    p.override_guard = true;
    HermTuple y0(12, 1);
    auto states = integrate(spec, y0, p, {1.0, 2.0, 5.0});
    for (const auto& s : states) CHECK(s.herm_defect() < 1e-12);
}

TEST_CASE("integrate: unitary replay equivariance is exact") {
    const int N = 8;
    Rng rng(89);
    Matrix u = random_unitary(rng, N);
    HermTuple y0 = sample_gue(N, 1, rng);
    HermTuple y0c(N, 1);
    y0c[0] = u * y0[0] * u.adjoint();

    ModelSpec spec(1, N, parse_poly("0.5*X1^2+0.1*X1^4"));
    SdeParams p;
    p.h = 0.02;
    p.seed = 17;
    p.override_guard = true;

    auto base = integrate(spec, y0, p, {0.5, 1.0});
    auto conj = integrate(spec, y0c, p, {0.5, 1.0}, [&](HermTuple& g) {
        g[0] = (u * g[0] * u.adjoint()).eval();
    });
    for (std::size_t i = 0; i < base.size(); ++i) {
        Matrix expect = u * base[i][0] * u.adjoint();
        CHECK(rel_err(conj[i][0], expect) < 1e-12);
    }
}

TEST_CASE("integrate: guard trips on divergence, regularity gate guards entry") {
    // non-convex potential fails the kappa gate outright
    ModelSpec bad(1, 8, parse_poly("0.5*X1^2-1*X1^4"));
    SdeParams p;
    p.h = 0.05;
    HermTuple y0(8, 1);
    y0[0] = 3.0 * Matrix::Identity(8, 8);
    CHECK_THROWS_AS(integrate(bad, y0, p, {1.0}), GuardError);

    // with the override it runs into the norm guard instead
    p.override_guard = true;
    CHECK_THROWS_AS(integrate(bad, y0, p, {5.0}), GuardError);
}

TEST_CASE("quadratic stationary law matches GUE moments (smoke)") {
    ModelSpec spec(1, 16, quadratic_potential(1));
    SdeParams p;
    p.h = 0.02;
    p.t_burn = 15.0;
    p.M = 200;
    p.seed = 23;
    auto est = estimate_observables(spec, p, {parse_poly("X1^2")}, {"X1^2"}, 2);
    double oracle = gue_expect_word(word_power(1, 2)).eval(16);
    CHECK(std::abs(est[0].mean - oracle) < 3.5 * est[0].stderr_);
}

TEST_CASE("estimator stderr shrinks like 1/sqrt(M)") {
    ModelSpec spec(1, 8, quadratic_potential(1));
    std::vector<double> ses;
    for (int M : {100, 400, 1600}) {
        SdeParams p;
        p.h = 0.02;
        p.t_burn = 5.0;
        p.M = M;
        p.seed = 31;
        auto est = estimate_observables(spec, p, {parse_poly("X1^2")}, {"X1^2"}, 1);
        ses.push_back(est[0].stderr_);
    }
    CHECK(ses[0] / ses[1] == doctest::Approx(2.0).epsilon(0.45));
    CHECK(ses[1] / ses[2] == doctest::Approx(2.0).epsilon(0.45));
}

TEST_CASE("estimate_observables is bit-stable across worker counts") {
    ModelSpec spec(1, 8, quadratic_potential(1));
    SdeParams p;
    p.h = 0.05;
    p.t_burn = 2.0;
    p.M = 16;
    p.seed = 37;
    p.threads = 1;
    auto a = estimate_observables(spec, p, {parse_poly("X1^2")}, {"X1^2"});
    p.threads = 2;
    auto b = estimate_observables(spec, p, {parse_poly("X1^2")}, {"X1^2"});
    CHECK(a[0].mean == b[0].mean);
    CHECK(a[0].stderr_ == b[0].stderr_);
}

TEST_CASE("weak order 1: coupled step-size bias halves") {
    // three chains driven by one Brownian path at resolutions h, h/2, h/4;
    // long time averages of tr X^2 under the quadratic model
    const int N = 8, M = 60;
    const double h = 0.08, T = 44.0, burn = 4.0;
    double est[3] = {0, 0, 0};
    for (int traj = 0; traj < M; ++traj) {
        Rng rng(derive_seed(4242, traj));
        HermTuple y[3] = {HermTuple(N, 1), HermTuple(N, 1), HermTuple(N, 1)};
        double acc[3] = {0, 0, 0};
        long cnt = 0;
        long fine_steps = std::lround(T / (h / 4));
        HermTuple inc2(N, 1), inc4(N, 1);
        int mod2 = 0, mod4 = 0;
        for (long s = 1; s <= fine_steps; ++s) {
            HermTuple g = sample_gue(N, 1, rng);
            double sq = std::sqrt(h / 4);
            // finest chain
            y[2][0] += (h / 4) * (-0.5 * y[2][0]) + sq * g[0];
            inc2[0] += sq * g[0];
            inc4[0] += sq * g[0];
            if (++mod2 == 2) {
                y[1][0] += (h / 2) * (-0.5 * y[1][0]) + inc2[0];
                inc2[0].setZero();
                mod2 = 0;
            }
            if (++mod4 == 4) {
                y[0][0] += h * (-0.5 * y[0][0]) + inc4[0];
                inc4[0].setZero();
                mod4 = 0;
                double t = s * (h / 4);
                if (t > burn) {
                    for (int c = 0; c < 3; ++c) acc[c] += tr_n(y[c][0] * y[c][0]);
                    ++cnt;
                }
            }
        }
        for (int c = 0; c < 3; ++c) est[c] += acc[c] / cnt;
    }
    for (double& e : est) e /= M;
    double d1 = est[0] - est[1];
    double d2 = est[1] - est[2];
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.5));
}

TEST_CASE("planar_moments: semicircle, symmetry, quartic vs quadrature") {
    auto cat = planar_moments({0.0, 0.0, 0.5}, 8);
    for (int n = 0; n <= 8; ++n) {
        if (n % 2 == 0) CHECK(cat[n] == doctest::Approx(catalan(n / 2)).epsilon(1e-10));
        else CHECK(cat[n] == doctest::Approx(0.0));
    }

    for (double g : {0.05, 0.1}) {
        auto m = planar_moments({0.0, 0.0, 0.5, 0.0, g}, 6);
        for (int n : {2, 4, 6})
            CHECK(m[n] == doctest::Approx(quartic_moment_quadrature(g, n)).epsilon(1e-6));
        CHECK(m[1] == doctest::Approx(0.0));
    }

    CHECK_THROWS_AS(planar_moments({0.0, 0.0, -0.5}, 4), std::invalid_argument);
}

TEST_CASE("quartic model second moment approaches the planar value") {
    // N = 32, g = 0.1: MC mean within max(3 sigma, 2/N^2) of the planar oracle
    double g = 0.1;
    ModelSpec spec(1, 32, parse_poly("0.5*X1^2+0.1*X1^4"));
    SdeParams p;
    p.h = 0.02;
    p.t_burn = 12.0;
    p.M = 120;
    p.seed = 41;
    p.override_guard = true;  // kappa_R at R=4 exceeds the gate
    auto est = estimate_observables(spec, p, {parse_poly("X1^2")}, {"X1^2"}, 2);
    double planar = planar_moments({0.0, 0.0, 0.5, 0.0, g}, 2)[2];
    double allowance = std::max(3 * est[0].stderr_, 2.0 / (32.0 * 32.0)) + 0.01;  // + O(h)
    CHECK(std::abs(est[0].mean - planar) < allowance);
}
