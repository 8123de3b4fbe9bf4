// Command-line harness; talks to the toolkit exclusively through the C API.
#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "nct/nct.h"

namespace {

using nlohmann::json;

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int threads = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int fail(int code, const std::string& context) {
    std::cerr << "error: " << context;
    const char* detail = nct_last_error();
    if (detail && *detail) std::cerr << ": " << detail;
    std::cerr << "\n";
    return code == NCT_EGUARD ? 3 : 2;
}

std::string load_config(const Common& c) {
    json j = c.config_path.empty() ? json::object() : json::parse(slurp(c.config_path));
    if (c.seed_set) j["seed"] = c.seed;
    if (c.threads > 0) j["threads"] = c.threads;
    return j.dump();
}

int run_driver(const Common& c, const std::string& command) {
    std::string cfg;
    try {
        cfg = load_config(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    char* csv = nullptr;
    char* manifest = nullptr;
    int rc = nct_run(cfg.c_str(), command.c_str(), &csv, &manifest);
    if (rc != NCT_OK) return fail(rc, command);
    if (!c.out_dir.empty()) {
        std::filesystem::create_directories(c.out_dir);
        std::ofstream(c.out_dir + "/result.csv") << csv;
        std::ofstream(c.out_dir + "/manifest.json") << manifest;
        std::cout << "wrote " << c.out_dir << "/result.csv and manifest.json\n";
    } else {
        std::cout << csv;
        std::cout << manifest << "\n";
    }
    nct_string_free(csv);
    nct_string_free(manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noncommutative trace-polynomial toolkit"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "JSON config file");
    auto* seed_opt = app.add_option("--seed", common.seed, "master seed override");
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--threads", common.threads, "worker thread cap");

    std::string word_text, poly_text, y_list, in_csv, observable;
    double R = 4.0;
    int k = 0, count = 100, degree = 6, dim = 2;
    std::uint64_t local_seed = 1;

    int max_len = 0;
    auto* c_oracle = app.add_subcommand("oracle", "exact GUE expectation series");
    c_oracle->add_option("--word", word_text, "word, e.g. X1*X1*X1*X1");
    c_oracle->add_option("--poly", poly_text, "trace polynomial");
    c_oracle->add_option("--max-len", max_len, "pairing-enumeration length cap (default 14)");

    auto* c_tau = app.add_subcommand("tau", "free semicircular moment");
    c_tau->add_option("--poly", poly_text, "trace polynomial")->required();

    auto* c_sd = app.add_subcommand("sd-check", "Schwinger-Dyson residual sweep");
    c_sd->add_option("--count", count);
    c_sd->add_option("--degree", degree);
    c_sd->add_option("--dim", dim);
    c_sd->add_option("--sweep-seed", local_seed);

    auto* c_ce = app.add_subcommand("cond-exp", "conditional expectation onto x-letters");
    c_ce->add_option("--poly", poly_text)->required();
    c_ce->add_option("--y", y_list, "comma-separated y letters, e.g. 2,3")->required();

    auto* c_reg = app.add_subcommand("regularity", "ball-restricted k-regularity surrogate");
    c_reg->add_option("--W", poly_text)->required();
    c_reg->add_option("--R", R);
    c_reg->add_option("--k", k);

    auto* c_fit = app.add_subcommand("fit-expansion", "fit a0 + a1/N^2 to CSV rows");
    c_fit->add_option("--in", in_csv, "CSV from estimate/sample")->required();
    c_fit->add_option("--observable", observable, "restrict to one observable");

    for (const char* name : {"sample", "estimate", "transport", "pushforward-check",
                             "strong-conv"})
        app.add_subcommand(name, "experiment driver (uses --config)");

    // global options (--config, --seed, --out, --threads) may follow the
    // subcommand name
    for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2
    }
    common.seed_set = seed_opt->count() > 0;

    if (c_oracle->parsed()) {
        if (!word_text.empty()) {
            int64_t* coeffs = nullptr;
            size_t n = 0;
            int rc = nct_oracle_word_series(word_text.c_str(), max_len, &coeffs, &n);
            if (rc != NCT_OK) return fail(rc, "oracle");
            json out;
            out["coeffs"] = std::vector<int64_t>(coeffs, coeffs + n);
            nct_i64_free(coeffs);
            std::cout << out.dump() << "\n";
            return 0;
        }
        if (poly_text.empty()) {
            std::cerr << "error: oracle needs --word or --poly\n";
            return 2;
        }
        nct_poly* p = nullptr;
        if (int rc = nct_poly_parse(poly_text.c_str(), 0, &p); rc != NCT_OK)
            return fail(rc, "oracle");
        double *re = nullptr, *im = nullptr;
        size_t n = 0;
        int rc = nct_oracle_poly_series(p, max_len, &re, &im, &n);
        nct_poly_free(p);
        if (rc != NCT_OK) return fail(rc, "oracle");
        json out;
        out["coeffs_re"] = std::vector<double>(re, re + n);
        out["coeffs_im"] = std::vector<double>(im, im + n);
        nct_f64_free(re);
        nct_f64_free(im);
        std::cout << out.dump() << "\n";
        return 0;
    }

    if (c_tau->parsed()) {
        nct_poly* p = nullptr;
        if (int rc = nct_poly_parse(poly_text.c_str(), 0, &p); rc != NCT_OK)
            return fail(rc, "tau");
        double re = 0, im = 0;
        int rc = nct_tau(p, &re, &im);
        nct_poly_free(p);
        if (rc != NCT_OK) return fail(rc, "tau");
        if (im == 0.0) std::cout << re << "\n";
        else std::cout << re << (im < 0 ? "" : "+") << im << "i\n";
        return 0;
    }

    if (c_sd->parsed()) {
        double worst = 0;
        int rc = nct_sd_residual_max(local_seed, count, degree, dim, &worst);
        if (rc != NCT_OK) return fail(rc, "sd-check");
        std::cout << json{{"count", count}, {"max_residual", worst}}.dump() << "\n";
        return worst <= 1e-12 ? 0 : 1;
    }

    if (c_ce->parsed()) {
        nct_poly* p = nullptr;
        if (int rc = nct_poly_parse(poly_text.c_str(), 0, &p); rc != NCT_OK)
            return fail(rc, "cond-exp");
        std::vector<int> ys;
        std::stringstream ss(y_list);
        for (std::string item; std::getline(ss, item, ',');) ys.push_back(std::stoi(item));
        nct_poly* out = nullptr;
        int rc = nct_cond_exp(p, ys.data(), ys.size(), &out);
        nct_poly_free(p);
        if (rc != NCT_OK) return fail(rc, "cond-exp");
        char* text = nullptr;
        nct_poly_print(out, &text);
        nct_poly_free(out);
        std::cout << text << "\n";
        nct_string_free(text);
        return 0;
    }

    if (c_reg->parsed()) {
        nct_poly* p = nullptr;
        if (int rc = nct_poly_parse(poly_text.c_str(), 0, &p); rc != NCT_OK)
            return fail(rc, "regularity");
        double kappa = 0;
        int passes = 0;
        int rc = nct_regularity(p, R, k, &kappa, &passes);
        nct_poly_free(p);
        if (rc != NCT_OK) return fail(rc, "regularity");
        std::cout << json{{"kappa_R", kappa}, {"R", R}, {"k", k}, {"passes", passes != 0},
                          {"note", "ball-restricted surrogate of the R=infinity bound"}}
                         .dump()
                  << "\n";
        return 0;
    }

    if (c_fit->parsed()) {
        std::ifstream in(in_csv);
        if (!in) {
            std::cerr << "error: cannot read " << in_csv << "\n";
            return 2;
        }
        std::map<std::string, std::vector<std::array<double, 3>>> series;
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string name, nstr, mstr, estr, Mstr;
            std::getline(ls, name, ',');
            std::getline(ls, nstr, ',');
            std::getline(ls, mstr, ',');
            std::getline(ls, estr, ',');
            std::getline(ls, Mstr, ',');
            if (!observable.empty() && name != observable) continue;
            series[name].push_back({std::stod(nstr), std::stod(mstr), std::stod(estr)});
        }
        json out = json::array();
        for (const auto& [name, pts] : series) {
            std::vector<double> Ns, vals, errs;
            for (const auto& p : pts) {
                Ns.push_back(p[0]);
                vals.push_back(p[1]);
                errs.push_back(p[2]);
            }
            double a0 = 0, a1 = 0;
            std::vector<double> resid(Ns.size(), 0.0);
            int o4 = 0;
            int rc = nct_fit_inverse_square(Ns.data(), vals.data(), errs.data(), Ns.size(), &a0,
                                            &a1, resid.data(), &o4);
            if (rc != NCT_OK) return fail(rc, "fit-expansion");
            out.push_back({{"observable", name},
                           {"a0", a0},
                           {"a1", a1},
                           {"residuals", resid},
                           {"o4_consistent", o4 != 0}});
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    for (const char* name : {"sample", "estimate", "transport", "pushforward-check",
                             "strong-conv"})
        if (app.get_subcommand(name)->parsed()) return run_driver(common, name);

    std::cerr << app.help();
    return 2;
}
