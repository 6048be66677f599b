#pragma once

// Command line: `run --case {a|b|c} [options]`. A flat `key = value` config
// file (keys are the long flag names without dashes) may be supplied with
// --config; flags given on the command line take precedence.

#include "ctbks/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ctbks {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{"case", "n",      "dt",  "t-end", "theta",     "alpha",
                                            "snapshots", "init", "pivot", "closure", "out", "precision",
                                            "sweep"};
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Config file lines as flag tokens; '#' starts a comment.
inline std::vector<std::string> config_file_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot open '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!config_keys().contains(key)) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": unknown config key '" + key + "'");
        }
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

inline std::vector<double> parse_real_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + item + "' is not a number");
        }
    }
    return out;
}

}  // namespace detail

/// Parse arguments (program name excluded).
inline RunConfig parse_config(const std::vector<std::string>& args) {
    // Splice config-file tokens in front of the command-line flags so the
    // latter win under take-last.
    std::vector<std::string> tokens;
    std::vector<std::string> file_tokens;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config: missing file name");
            file_tokens = detail::config_file_tokens(args[++i]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            file_tokens = detail::config_file_tokens(args[i].substr(9));
        } else {
            tokens.push_back(args[i]);
        }
    }
    if (tokens.empty() || tokens.front() != "run") {
        throw UsageError("expected subcommand 'run'");
    }
    tokens.insert(tokens.begin() + 1, file_tokens.begin(), file_tokens.end());

    CLI::App app{"Trigonometric cubic B-spline collocation solver for the Kuramoto-Sivashinsky equation"};
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "run a built-in case");
    run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    RunConfig cfg;
    std::string case_id = "a";
    int n = 0;
    double dt = 0, t_end = 0, theta = 0, alpha = 0;
    std::string snapshots, init = "function-fit", pivot = "partial", closure = "dirichlet", sweep;
    std::string out = cfg.out_dir.string();

    run->add_option("--case", case_id, "case a, b or c")->check(CLI::IsMember({"a", "b", "c"}));
    auto* n_opt = run->add_option("--n", n, "number of intervals N");
    auto* dt_opt = run->add_option("--dt", dt, "time step");
    auto* t_end_opt = run->add_option("--t-end", t_end, "final time");
    auto* theta_opt = run->add_option("--theta", theta, "coefficient of u_xxxx");
    auto* alpha_opt = run->add_option("--alpha", alpha, "coefficient of u_xx");
    auto* snap_opt = run->add_option("--snapshots", snapshots, "comma-separated output times");
    run->add_option("--init", init, "initial fit")->check(CLI::IsMember({"function-fit", "uxx-fit"}));
    run->add_option("--pivot", pivot, "banded LU pivoting")->check(CLI::IsMember({"partial", "none"}));
    run->add_option("--closure", closure, "endpoint closure")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    run->add_option("--out", out, "output directory");
    run->add_option("--precision", cfg.precision, "significant digits in text output");
    auto* sweep_opt = run->add_option("--sweep", sweep, "theta=v1,v2,... independent runs");

    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    cfg.case_id = case_id.front();
    if (*n_opt) cfg.n = n;
    if (*dt_opt) cfg.dt = dt;
    if (*t_end_opt) cfg.t_end = t_end;
    if (*theta_opt) cfg.theta = theta;
    if (*alpha_opt) cfg.alpha = alpha;
    if (*snap_opt) cfg.snapshots = detail::parse_real_list("--snapshots", snapshots);
    cfg.init = init == "uxx-fit" ? InitMode::uxx_fit : InitMode::function_fit;
    cfg.pivoting = pivot == "none" ? Pivoting::none : Pivoting::partial;
    cfg.closure = closure == "neumann" ? BoundaryClosure::neumann : BoundaryClosure::dirichlet;
    cfg.out_dir = out;
    if (*sweep_opt) {
        if (sweep.rfind("theta=", 0) != 0) throw UsageError("--sweep: only 'theta=v1,v2,...' is supported");
        cfg.sweep_theta = detail::parse_real_list("--sweep", sweep.substr(6));
        if (cfg.sweep_theta.empty()) throw UsageError("--sweep: no values given");
    }

    try {
        (void)resolve(cfg);
        if (!cfg.sweep_theta.empty()) {
            for (double th : cfg.sweep_theta) {
                RunConfig probe = cfg;
                probe.theta = th;
                (void)resolve(probe);
            }
        }
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

}  // namespace ctbks
