#include "nct/config.hpp"

#include <chrono>
#include <json.hpp>
#include <sstream>

#include "nct/parser.hpp"
#include "nct/sha1.hpp"
#include "nct/threads.hpp"

namespace nct {

using nlohmann::json;

namespace {

json canonical_echo(const json& j) { return j; }  // json objects dump key-sorted

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg.d = j.value("d", 1);
        if (cfg.d < 1) throw ConfigError("config: d must be >= 1");
        if (j.contains("N_grid")) {
            cfg.N_grid = j.at("N_grid").get<std::vector<int>>();
        } else {
            cfg.N_grid = {j.value("N", 8)};
        }
        for (int n : cfg.N_grid)
            if (n < 1) throw ConfigError("config: N must be >= 1");

        std::string pot = j.value("potential", std::string{});
        cfg.potential = pot.empty() ? quadratic_potential(cfg.d) : parse_poly(pot, cfg.d);

        cfg.sde.h = j.value("h", 0.01);
        cfg.sde.t_burn = j.value("t_burn", 20.0);
        cfg.sde.thin = j.value("thin", 2.0);
        cfg.sde.M = j.value("M", 100);
        cfg.sde.seed = j.value("seed", 1ULL);
        cfg.sde.threads = j.value("threads", 0);
        cfg.sde.override_guard = j.value("override_regularity", false);
        cfg.samples_per_traj = j.value("samples_per_traj", 1);
        cfg.gue_direct = j.value("gue_direct", false);
        if (cfg.sde.h <= 0 || cfg.sde.t_burn < 0 || cfg.sde.M < 1 || cfg.samples_per_traj < 1)
            throw ConfigError("config: invalid SDE parameters");

        if (j.contains("observables")) {
            for (const auto& o : j.at("observables")) {
                std::string s = o.get<std::string>();
                cfg.observable_names.push_back(s);
                cfg.observables.push_back(parse_poly(s, cfg.d));
            }
        }

        if (j.contains("transport")) {
            const auto& t = j.at("transport");
            cfg.has_transport = true;
            TracePoly v0 = t.contains("V0") ? parse_poly(t.at("V0").get<std::string>(), cfg.d)
                                            : quadratic_potential(cfg.d);
            cfg.transport = TransportSpec(v0, cfg.potential);
            cfg.transport.s_steps = t.value("s_steps", 8);
            cfg.transport.M_psi = t.value("M_psi", 8);
            cfg.transport.T_max = t.value("T_max", 10.0);
            cfg.transport.dt = t.value("dt", 0.02);
            cfg.transport.R = t.value("R", 4.0);
            cfg.transport.reg_k = t.value("k", 0);
            cfg.transport.allow_unstable = t.value("allow_unstable", false);
            cfg.transport.threads = cfg.sde.threads;
            cfg.transport_samples = t.value("samples", 100);
            if (cfg.transport.s_steps < 1 || cfg.transport.M_psi < 1 || cfg.transport.dt <= 0)
                throw ConfigError("config: invalid transport block");
        }

        if (j.contains("strong_conv")) {
            const auto& s = j.at("strong_conv");
            cfg.has_strong_conv = true;
            cfg.strong_poly = parse_poly(s.value("poly", "X1"), cfg.d);
            cfg.strong_N_grid = s.value("N_grid", std::vector<int>{32, 64, 128});
            cfg.strong_samples = s.value("samples", 50);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    cfg.canonical_json = canonical_echo(j).dump();
    cfg.hash = sha1_hex(cfg.canonical_json);
    return cfg;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "observable,N,mean,stderr,M\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.observable << ',' << r.N << ',' << r.mean << ',' << r.stderr_ << ',' << r.M
           << '\n';
    return os.str();
}

namespace {

std::vector<ResultRow> direct_gue_rows(const RunConfig& cfg, int N) {
    const std::size_t M = static_cast<std::size_t>(cfg.sde.M);
    const std::size_t K = cfg.observables.size();
    std::vector<std::vector<double>> vals(M, std::vector<double>(K, 0.0));
    parallel_for(M, cfg.sde.threads, [&](std::size_t i) {
        HermTuple x = sample_gue(N, cfg.d, derive_seed(cfg.sde.seed, i));
        EvalContext ctx(x);
        for (std::size_t k = 0; k < K; ++k) vals[i][k] = tr_n(eval(cfg.observables[k], ctx));
    });
    std::vector<ResultRow> rows;
    for (std::size_t k = 0; k < K; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < M; ++i) mean += vals[i][k];
        mean /= static_cast<double>(M);
        double var = 0.0;
        for (std::size_t i = 0; i < M; ++i) var += (vals[i][k] - mean) * (vals[i][k] - mean);
        var = M > 1 ? var / static_cast<double>(M - 1) : 0.0;
        rows.push_back({cfg.observable_names[k], N, mean,
                        std::sqrt(var / static_cast<double>(M)), static_cast<int>(M)});
    }
    return rows;
}

}  // namespace

RunOutput run_command(const std::string& command, const RunConfig& cfg) {
    RunOutput out;
    json extra;
    auto t0 = std::chrono::steady_clock::now();

    if (command == "sample" || command == "estimate") {
        if (cfg.observables.empty()) throw ConfigError("config: no observables given");
        for (int N : cfg.N_grid) {
            if (cfg.gue_direct && command == "estimate") {
                ModelSpec model(cfg.d, N, cfg.potential);
                if (!model.W().is_zero())
                    throw ConfigError("config: gue_direct requires the quadratic potential");
                auto rows = direct_gue_rows(cfg, N);
                out.rows.insert(out.rows.end(), rows.begin(), rows.end());
            } else {
                ModelSpec model(cfg.d, N, cfg.potential);
                auto est = estimate_observables(model, cfg.sde, cfg.observables,
                                                cfg.observable_names, cfg.samples_per_traj);
                for (const auto& e : est) out.rows.push_back({e.name, N, e.mean, e.stderr_, e.n});
            }
        }
    } else if (command == "transport") {
        if (!cfg.has_transport) throw ConfigError("config: missing transport block");
        if (cfg.observables.empty()) throw ConfigError("config: no observables given");
        const int N = cfg.N_grid.front();
        const std::size_t S = static_cast<std::size_t>(cfg.transport_samples);
        const std::size_t K = cfg.observables.size();
        std::vector<std::vector<double>> vals(S, std::vector<double>(K, 0.0));
        TransportSpec inner = cfg.transport;
        inner.threads = 1;
        parallel_for(S, cfg.sde.threads, [&](std::size_t i) {
            HermTuple H = sample_gue(N, cfg.d, derive_seed(cfg.sde.seed, 2 * i));
            HermTuple Y = flow_transport(inner, H, derive_seed(cfg.sde.seed, 2 * i + 1));
            EvalContext ctx(Y);
            for (std::size_t k = 0; k < K; ++k) vals[i][k] = tr_n(eval(cfg.observables[k], ctx));
        });
        for (std::size_t k = 0; k < K; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < S; ++i) mean += vals[i][k];
            mean /= static_cast<double>(S);
            double var = 0.0;
            for (std::size_t i = 0; i < S; ++i) var += (vals[i][k] - mean) * (vals[i][k] - mean);
            var = S > 1 ? var / static_cast<double>(S - 1) : 0.0;
            out.rows.push_back({cfg.observable_names[k], N, mean,
                                std::sqrt(var / static_cast<double>(S)), static_cast<int>(S)});
        }
        TransportSpec probe = inner;
        probe.M_psi = 1;
        PsiEstimate pe = psi_estimate(probe, 1.0, sample_gue(N, cfg.d, 7),
                                      derive_seed(cfg.sde.seed, 424242));
        extra["tail_bound"] = pe.tail_bound;
        extra["kappa_R"] = pe.kappa;
    } else if (command == "pushforward-check") {
        if (!cfg.has_transport) throw ConfigError("config: missing transport block");
        if (cfg.observables.empty()) throw ConfigError("config: no observables given");
        const int N = cfg.N_grid.front();
        auto rep = pushforward_check(cfg.transport, N, cfg.observables, cfg.observable_names,
                                     cfg.transport_samples, cfg.sde, cfg.sde.seed);
        json zrows = json::array();
        for (const auto& r : rep.rows) {
            out.rows.push_back({r.name + ":push", N, r.push_mean, r.push_stderr, rep.samples});
            out.rows.push_back({r.name + ":direct", N, r.direct_mean, r.direct_stderr,
                                cfg.sde.M});
            zrows.push_back({{"observable", r.name}, {"z", r.z}});
        }
        extra["z_scores"] = zrows;
        extra["tail_bound"] = rep.tail_bound;
        extra["kappa_R"] = rep.kappa;
    } else if (command == "strong-conv") {
        if (!cfg.has_strong_conv) throw ConfigError("config: missing strong_conv block");
        auto rows = strong_conv_scan(cfg.strong_poly, cfg.potential, cfg.strong_N_grid,
                                     cfg.strong_samples, cfg.sde);
        json diag = json::array();
        for (const auto& r : rows) {
            out.rows.push_back({"norm:median", r.N, r.norm_median, 0.0, r.samples});
            out.rows.push_back({"norm:mean", r.N, r.norm_mean, 0.0, r.samples});
            diag.push_back({{"N", r.N}, {"median", r.norm_median}, {"max", r.norm_max}});
        }
        extra["norms"] = diag;
    } else {
        throw ConfigError("unknown command: " + command);
    }

    auto t1 = std::chrono::steady_clock::now();
    json manifest;
    manifest["command"] = command;
    manifest["config"] = json::parse(cfg.canonical_json);
    manifest["config_hash"] = cfg.hash;
    manifest["seed"] = cfg.sde.seed;
    manifest["timestamp"] = iso_timestamp();
    manifest["runtime_s"] = std::chrono::duration<double>(t1 - t0).count();
    json jrows = json::array();
    for (const auto& r : out.rows)
        jrows.push_back({{"observable", r.observable},
                         {"N", r.N},
                         {"mean", r.mean},
                         {"stderr", r.stderr_},
                         {"M", r.M}});
    manifest["rows"] = jrows;
    if (!extra.is_null()) manifest["report"] = extra;
    out.manifest_json = manifest.dump(2);
    return out;
}

}  // namespace nct
