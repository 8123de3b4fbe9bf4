#include <doctest.h>

#include <json.hpp>

#include "nct/config.hpp"
#include "nct/fit.hpp"
#include "nct/parser.hpp"
#include "nct/sha1.hpp"
#include "nct/wick.hpp"
#include "nct/word.hpp"

using namespace nct;

TEST_CASE("fit_inverse_square: exact data recovered with zero residuals") {
    std::vector<FitPoint> pts;
    for (double N : {8.0, 16.0, 32.0, 64.0}) pts.push_back({N, 2.0 + 1.0 / (N * N), 0.0});
    auto r = fit_inverse_square(pts);
    CHECK(r.a0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.a1 == doctest::Approx(1.0).epsilon(1e-10));
    for (double res : r.residuals) CHECK(std::abs(res) < 1e-12);
    CHECK(r.o4_consistent);
}

TEST_CASE("fit_inverse_square: constant data gives a1 = 0") {
    std::vector<FitPoint> pts;
    for (double N : {10.0, 20.0, 40.0}) pts.push_back({N, 5.0, 0.1});
    auto r = fit_inverse_square(pts);
    CHECK(r.a0 == doctest::Approx(5.0));
    CHECK(std::abs(r.a1) < 1e-9);
}

TEST_CASE("fit_inverse_square: error paths and O(N^-4) flag") {
    std::vector<FitPoint> two = {{8, 1, 0}, {16, 1.1, 0}, {8, 1, 0}};
    CHECK_THROWS_AS(fit_inverse_square(two), std::invalid_argument);

    // signal with a genuine 1/N^4 term keeps the flag on
    std::vector<FitPoint> pts;
    for (double N : {8.0, 12.0, 16.0, 24.0, 32.0})
        pts.push_back({N, 2.0 + 1.0 / (N * N) + 50.0 / (N * N * N * N), 0.0});
    auto r = fit_inverse_square(pts);
    CHECK(r.o4_consistent);

    // a corrupted largest-N point breaks the residual pattern
    std::vector<FitPoint> broken;
    for (double N : {8.0, 12.0, 16.0, 24.0, 32.0})
        broken.push_back({N, 2.0 + 1.0 / (N * N) + 50.0 / std::pow(N, 4), 1e-6});
    broken.back().value += 0.1;
    auto rb = fit_inverse_square(broken);
    CHECK_FALSE(rb.o4_consistent);
}

TEST_CASE("fit on oracle-exact words") {
    // length <= 6: the N^-2 series is exact at two terms, residuals vanish
    for (int k : {1, 2, 3}) {
        auto s = gue_expect_word(word_power(1, 2 * k));
        std::vector<FitPoint> pts;
        for (double N : {8.0, 16.0, 32.0, 64.0}) pts.push_back({N, s.eval(N), 0.0});
        auto r = fit_inverse_square(pts);
        for (double res : r.residuals) CHECK(std::abs(res) < 1e-12);
        CHECK(r.o4_consistent);
    }
    // length 8 carries an exact 21/N^4 term: residuals are small but nonzero
    // and flagged consistent with O(N^-4)
    auto s8 = gue_expect_word(word_power(1, 8));
    CHECK(s8.coeffs == std::vector<std::int64_t>{14, 70, 21});
    std::vector<FitPoint> pts;
    for (double N : {8.0, 16.0, 32.0, 64.0}) pts.push_back({N, s8.eval(N), 0.0});
    auto r8 = fit_inverse_square(pts);
    CHECK(r8.o4_consistent);
    double worst = 0.0;
    for (double res : r8.residuals) worst = std::max(worst, std::abs(res));
    CHECK(worst > 0.0);
    CHECK(worst < 21.0 / (8.0 * 8.0 * 8.0 * 8.0));
}

TEST_CASE("config: parse, canonical echo, content hash") {
    std::string text = R"({"d":1,"N":8,"potential":"0.5*X1^2","M":4,"seed":9,
                           "observables":["X1^2"],"h":0.05,"t_burn":1.0})";
    auto cfg = parse_config(text);
    CHECK(cfg.d == 1);
    CHECK(cfg.N_grid == std::vector<int>{8});
    CHECK(cfg.sde.seed == 9);
    CHECK(cfg.hash.size() == 40);

    // hash changes iff a semantic field changes
    auto cfg2 = parse_config(R"({"d":1,"N":8,"potential":"0.5*X1^2","M":4,"seed":10,
                                 "observables":["X1^2"],"h":0.05,"t_burn":1.0})");
    CHECK(cfg.hash != cfg2.hash);
    // whitespace-only difference hashes identically (canonical form)
    auto cfg3 = parse_config(
        R"({ "d":1, "N":8,"potential":"0.5*X1^2","M":4,"seed":9,"observables":["X1^2"],"h":0.05,"t_burn":1.0 })");
    CHECK(cfg.hash == cfg3.hash);

    CHECK_THROWS_AS(parse_config("{oops"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"d":0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"d":1,"h":-0.5})"), ConfigError);
}

TEST_CASE("sha1 reference vectors") {
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST_CASE("run_command: estimate on a small quadratic model, deterministic") {
    std::string text = R"({"d":1,"N":8,"potential":"0.5*X1^2","M":8,"seed":3,
                           "h":0.05,"t_burn":2.0,"observables":["X1^2"]})";
    auto cfg = parse_config(text);
    auto out = run_command("estimate", cfg);
    REQUIRE(out.rows.size() == 1);
    CHECK(out.rows[0].observable == "X1^2");
    CHECK(out.rows[0].N == 8);
    CHECK(out.rows[0].M == 8);
    CHECK(out.rows[0].mean > 0.2);
    CHECK(out.rows[0].mean < 2.5);

    auto out2 = run_command("estimate", cfg);
    CHECK(out.rows[0].mean == out2.rows[0].mean);  // bit-identical rerun

    auto csv = rows_to_csv(out.rows);
    CHECK(csv.rfind("observable,N,mean,stderr,M\n", 0) == 0);
    CHECK(csv.find("X1^2,8,") != std::string::npos);

    auto manifest = nlohmann::json::parse(out.manifest_json);
    CHECK(manifest["config_hash"] == cfg.hash);
    CHECK(manifest["command"] == "estimate");
    CHECK(manifest["rows"].size() == 1);

    CHECK_THROWS_AS(run_command("bogus", cfg), ConfigError);
}

TEST_CASE("run_command: gue_direct sweep over an N grid") {
    std::string text = R"({"d":1,"N_grid":[4,8],"gue_direct":true,"M":64,"seed":5,
                           "observables":["X1^2","X1^4"]})";
    auto cfg = parse_config(text);
    auto out = run_command("estimate", cfg);
    CHECK(out.rows.size() == 4);
    // direct draws demand the quadratic potential
    auto bad = parse_config(R"({"d":1,"N":4,"gue_direct":true,"M":4,
                                "potential":"0.5*X1^2+0.1*X1^4",
                                "observables":["X1^2"],"override_regularity":true})");
    CHECK_THROWS_AS(run_command("estimate", bad), ConfigError);
}

TEST_CASE("run_command: transport and strong-conv drivers") {
    // identity transport (V1 = V0): transported observables are plain GUE
    std::string text = R"({"d":1,"N":6,"potential":"0.5*X1^2","M":16,"seed":4,
                           "h":0.05,"t_burn":2.0,"observables":["X1^2"],
                           "transport":{"s_steps":2,"M_psi":2,"T_max":2.0,"dt":0.05,
                                        "samples":24}})";
    auto cfg = parse_config(text);
    auto out = run_command("transport", cfg);
    REQUIRE(out.rows.size() == 1);
    CHECK(out.rows[0].M == 24);
    CHECK(out.rows[0].mean > 0.3);
    CHECK(out.rows[0].mean < 2.0);
    auto manifest = nlohmann::json::parse(out.manifest_json);
    CHECK(manifest["report"].contains("tail_bound"));

    auto push = run_command("pushforward-check", cfg);
    CHECK(push.rows.size() == 2);  // :push and :direct rows
    auto pm = nlohmann::json::parse(push.manifest_json);
    CHECK(std::abs(pm["report"]["z_scores"][0]["z"].get<double>()) < 4.0);

    std::string sc = R"({"d":1,"N":6,"potential":"0.5*X1^2","M":4,"seed":4,
                         "strong_conv":{"poly":"X1","N_grid":[8,16],"samples":8}})";
    auto scfg = parse_config(sc);
    auto sout = run_command("strong-conv", scfg);
    CHECK(sout.rows.size() == 4);  // median + mean per N

    CHECK_THROWS_AS(run_command("transport", scfg), ConfigError);   // no transport block
    CHECK_THROWS_AS(run_command("strong-conv", cfg), ConfigError);  // no strong_conv block
}
