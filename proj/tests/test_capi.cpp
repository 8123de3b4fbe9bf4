// Exercises the shared-library surface the way an external consumer would:
// opaque handles, status codes, thread-local error strings.
#include <doctest.h>

#include <cstring>
#include <string>

#include "nct/nct.h"

TEST_CASE("poly handles: parse, print, round trip, errors") {
    nct_poly* p = nullptr;
    REQUIRE(nct_poly_parse("0.5*X1^2 + tr(X1*X2)*X2", 0, &p) == NCT_OK);
    int dim = 0;
    CHECK(nct_poly_dim(p, &dim) == NCT_OK);
    CHECK(dim == 2);
    char* text = nullptr;
    REQUIRE(nct_poly_print(p, &text) == NCT_OK);
    nct_poly* q = nullptr;
    REQUIRE(nct_poly_parse(text, dim, &q) == NCT_OK);
    char* text2 = nullptr;
    REQUIRE(nct_poly_print(q, &text2) == NCT_OK);
    CHECK(std::string(text) == text2);
    nct_string_free(text);
    nct_string_free(text2);
    nct_poly_free(p);
    nct_poly_free(q);

    nct_poly* bad = nullptr;
    CHECK(nct_poly_parse("X1*", 0, &bad) == NCT_EINVAL);
    CHECK(std::strlen(nct_last_error()) > 0);
}

TEST_CASE("oracle series through the C surface") {
    int64_t* coeffs = nullptr;
    size_t n = 0;
    REQUIRE(nct_oracle_word_series("X1*X1*X1*X1", 0, &coeffs, &n) == NCT_OK);
    REQUIRE(n == 2);
    CHECK(coeffs[0] == 2);
    CHECK(coeffs[1] == 1);
    nct_i64_free(coeffs);

    REQUIRE(nct_oracle_word_series("X1*X2*X1*X2", 0, &coeffs, &n) == NCT_OK);
    REQUIRE(n == 2);
    CHECK(coeffs[0] == 0);
    CHECK(coeffs[1] == 1);
    nct_i64_free(coeffs);

    CHECK(nct_oracle_word_series("X1+X2", 0, &coeffs, &n) == NCT_EINVAL);
}

TEST_CASE("tau, cond-exp, regularity, sd sweep") {
    nct_poly* p = nullptr;
    REQUIRE(nct_poly_parse("tr(X1*X1)", 0, &p) == NCT_OK);
    double re = 0, im = 0;
    REQUIRE(nct_tau(p, &re, &im) == NCT_OK);
    CHECK(re == 1.0);
    CHECK(im == 0.0);
    nct_poly_free(p);

    nct_poly* yxy = nullptr;
    REQUIRE(nct_poly_parse("X2*X1*X2", 0, &yxy) == NCT_OK);
    int ys[] = {2};
    nct_poly* ce = nullptr;
    REQUIRE(nct_cond_exp(yxy, ys, 1, &ce) == NCT_OK);
    char* text = nullptr;
    nct_poly_print(ce, &text);
    CHECK(std::string(text) == "tr(X1)");
    nct_string_free(text);
    nct_poly_free(ce);
    nct_poly_free(yxy);

    nct_poly* W = nullptr;
    REQUIRE(nct_poly_parse("0.001*X1^4", 0, &W) == NCT_OK);
    double kappa = 0;
    int passes = 0;
    REQUIRE(nct_regularity(W, 4.0, 0, &kappa, &passes) == NCT_OK);
    CHECK(kappa == doctest::Approx(0.192));
    CHECK(passes == 1);
    nct_poly_free(W);

    double worst = 1.0;
    REQUIRE(nct_sd_residual_max(7, 25, 6, 2, &worst) == NCT_OK);
    CHECK(worst == 0.0);
}

TEST_CASE("fit through the C surface") {
    double Ns[] = {8, 16, 32, 64};
    double vals[4], errs[] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) vals[i] = 2.0 + 1.0 / (Ns[i] * Ns[i]);
    double a0 = 0, a1 = 0, resid[4];
    int o4 = 0;
    REQUIRE(nct_fit_inverse_square(Ns, vals, errs, 4, &a0, &a1, resid, &o4) == NCT_OK);
    CHECK(a0 == doctest::Approx(2.0));
    CHECK(a1 == doctest::Approx(1.0));
    CHECK(o4 == 1);

    CHECK(nct_fit_inverse_square(Ns, vals, errs, 2, &a0, &a1, nullptr, nullptr) == NCT_EINVAL);
}

TEST_CASE("nct_run: estimate, config errors, guard code") {
    const char* cfg = R"({"d":1,"N":6,"potential":"0.5*X1^2","M":4,"seed":2,
                          "h":0.05,"t_burn":1.0,"observables":["X1^2"]})";
    char* csv = nullptr;
    char* manifest = nullptr;
    REQUIRE(nct_run(cfg, "estimate", &csv, &manifest) == NCT_OK);
    CHECK(std::string(csv).rfind("observable,N,mean,stderr,M\n", 0) == 0);
    CHECK(std::string(manifest).find("config_hash") != std::string::npos);
    nct_string_free(csv);
    nct_string_free(manifest);

    CHECK(nct_run("{bad json", "estimate", &csv, &manifest) == NCT_EINVAL);
    CHECK(nct_run(cfg, "no-such-command", &csv, &manifest) == NCT_EINVAL);

    // regularity gate failure surfaces as the guard status
    const char* hot = R"({"d":1,"N":6,"potential":"0.5*X1^2+0.5*X1^4","M":2,"seed":2,
                          "h":0.05,"t_burn":0.5,"observables":["X1^2"]})";
    CHECK(nct_run(hot, "estimate", &csv, &manifest) == NCT_EGUARD);
}
