#pragma once

// JSON run configuration and report for the CLI.  Reports embed the full
// effective configuration (every default made explicit) and are byte-stable
// across runs with the same config and seed; wall time is never serialized.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ces/common.hpp"
#include "ces/states.hpp"

namespace ces {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double x_min = -3, x_max = 3;
    int nx = 41;
    double p_min = -3, p_max = 3;
    int np = 41;
};

struct RunConfig {
    int schema_version = 1;
    std::array<double, 3> weights{1.0, 1.0, 1.0};
    cplx beta{0, 0}, gamma{0, 0};
    double x = 0;
    cplx sigma{0, 0}, kappa{0, 0};
    double p = 0;
    double s = 0.9;
    int cutoff = 12;
    std::uint64_t seed = 1;
    long n_samples = 1000000;
    int n_draws = 100;
    double zeta = 0.3;
    std::string kind = "position";
    GridSpec grid;
    Tolerances tol;

    ModeWeights mode_weights() const { return ModeWeights(weights[0], weights[1], weights[2]); }
    CESParams ces_params(double s_override = -1) const {
        return CESParams(mode_weights(), beta, gamma, x, s_override > 0 ? s_override : s);
    }
    ConjugateParams conjugate_params() const {
        return ConjugateParams(mode_weights(), sigma, kappa, p, s);
    }
};

namespace detail {

inline cplx parse_complex(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(key + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
    RunConfig c;
    static const char* known[] = {"schema_version", "weights", "beta", "gamma", "x",     "sigma",
                                  "kappa",          "p",       "s",    "cutoff", "seed",  "n_samples",
                                  "n_draws",        "zeta",    "kind", "grid",   "tolerances"};
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
    }
    if (j.contains("schema_version")) {
        c.schema_version = j["schema_version"].get<int>();
        if (c.schema_version != 1) throw ConfigError("config: unsupported schema_version");
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (!w.is_array() || w.size() != 3) throw ConfigError("weights: expected [mu, nu, tau]");
        for (int i = 0; i < 3; ++i) {
            if (!w[i].is_number()) throw ConfigError("weights: expected numbers");
            c.weights[i] = w[i].get<double>();
            if (c.weights[i] == 0) throw ConfigError("weights: components must be nonzero");
        }
    }
    if (j.contains("beta")) c.beta = detail::parse_complex(j["beta"], "beta");
    if (j.contains("gamma")) c.gamma = detail::parse_complex(j["gamma"], "gamma");
    if (j.contains("sigma")) c.sigma = detail::parse_complex(j["sigma"], "sigma");
    if (j.contains("kappa")) c.kappa = detail::parse_complex(j["kappa"], "kappa");
    if (j.contains("x")) c.x = j["x"].get<double>();
    if (j.contains("p")) c.p = j["p"].get<double>();
    if (j.contains("s")) {
        c.s = j["s"].get<double>();
        if (!(c.s > 0 && c.s <= 1)) throw ConfigError("s: must lie in (0, 1]");
    }
    if (j.contains("cutoff")) {
        c.cutoff = j["cutoff"].get<int>();
        if (c.cutoff < 1 || c.cutoff > 40) throw ConfigError("cutoff: must lie in [1, 40]");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_samples")) {
        c.n_samples = j["n_samples"].get<long>();
        if (c.n_samples < 1000) throw ConfigError("n_samples: need at least 1000");
    }
    if (j.contains("n_draws")) {
        c.n_draws = j["n_draws"].get<int>();
        if (c.n_draws < 1) throw ConfigError("n_draws: must be positive");
    }
    if (j.contains("zeta")) c.zeta = j["zeta"].get<double>();
    if (j.contains("kind")) {
        c.kind = j["kind"].get<std::string>();
        if (c.kind != "position" && c.kind != "momentum")
            throw ConfigError("kind: expected 'position' or 'momentum'");
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) throw ConfigError("grid: expected object");
        for (auto it = g.begin(); it != g.end(); ++it)
            if (it.key() != "x_min" && it.key() != "x_max" && it.key() != "nx" && it.key() != "p_min" &&
                it.key() != "p_max" && it.key() != "np")
                throw ConfigError("grid: unknown key '" + it.key() + "'");
        if (g.contains("x_min")) c.grid.x_min = g["x_min"].get<double>();
        if (g.contains("x_max")) c.grid.x_max = g["x_max"].get<double>();
        if (g.contains("nx")) c.grid.nx = g["nx"].get<int>();
        if (g.contains("p_min")) c.grid.p_min = g["p_min"].get<double>();
        if (g.contains("p_max")) c.grid.p_max = g["p_max"].get<double>();
        if (g.contains("np")) c.grid.np = g["np"].get<int>();
        if (c.grid.nx < 1 || c.grid.np < 1) throw ConfigError("grid: nx/np must be positive");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances: expected object");
        for (auto it = t.begin(); it != t.end(); ++it)
            if (it.key() != "matrix_exp_rel" && it.key() != "unitary_check" && it.key() != "headroom")
                throw ConfigError("tolerances: unknown key '" + it.key() + "'");
        if (t.contains("matrix_exp_rel")) c.tol.matrix_exp_rel = t["matrix_exp_rel"].get<double>();
        if (t.contains("unitary_check")) c.tol.unitary_check = t["unitary_check"].get<double>();
        if (t.contains("headroom")) c.tol.headroom = t["headroom"].get<int>();
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

inline json effective_config(const RunConfig& c) {
    json g{{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"nx", c.grid.nx},
           {"p_min", c.grid.p_min}, {"p_max", c.grid.p_max}, {"np", c.grid.np}};
    return json{{"schema_version", c.schema_version},
                {"weights", {c.weights[0], c.weights[1], c.weights[2]}},
                {"beta", {c.beta.real(), c.beta.imag()}},
                {"gamma", {c.gamma.real(), c.gamma.imag()}},
                {"x", c.x},
                {"sigma", {c.sigma.real(), c.sigma.imag()}},
                {"kappa", {c.kappa.real(), c.kappa.imag()}},
                {"p", c.p},
                {"s", c.s},
                {"cutoff", c.cutoff},
                {"seed", c.seed},
                {"n_samples", c.n_samples},
                {"n_draws", c.n_draws},
                {"zeta", c.zeta},
                {"kind", c.kind},
                {"grid", g},
                {"tolerances",
                 {{"matrix_exp_rel", c.tol.matrix_exp_rel},
                  {"unitary_check", c.tol.unitary_check},
                  {"headroom", c.tol.headroom}}}};
}

struct RunReport {
    std::string subcommand;
    json config;
    json metrics;
    std::vector<std::string> typo_flags;
    bool pass = true;

    json to_json() const {
        return json{{"schema_version", 1},
                    {"subcommand", subcommand},
                    {"config", config},
                    {"metrics", metrics},
                    {"typo_flags", typo_flags},
                    {"pass", pass}};
    }
};

}  // namespace ces
