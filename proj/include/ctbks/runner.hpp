#pragma once

// Run configuration, execution and text/JSON outputs for the CLI.
//
// Output directory layout:
//   snapshot_NNNN.csv  x,u,v at the knots for each recorded time
//   field.csv          t,u_0,...,u_N  (one row per recorded time)
//   summary.json       config echo, GRE table, status
//   timings.json       wall-clock phases (the only non-reproducible file)

#include "ctbks/scenarios.hpp"
#include "ctbks/stepper.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbks {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    char case_id = 'a';
    std::optional<int> n;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<double> theta;
    std::optional<double> alpha;
    std::optional<std::vector<double>> snapshots;
    InitMode init = InitMode::function_fit;
    Pivoting pivoting = Pivoting::partial;
    BoundaryClosure closure = BoundaryClosure::dirichlet;
    std::filesystem::path out_dir = "ks_out";
    int precision = 9;
    std::vector<double> sweep_theta;
};

inline const char* to_string(InitMode m) {
    return m == InitMode::function_fit ? "function-fit" : "uxx-fit";
}
inline const char* to_string(Pivoting p) { return p == Pivoting::partial ? "partial" : "none"; }
inline const char* to_string(BoundaryClosure c) {
    return c == BoundaryClosure::dirichlet ? "dirichlet" : "neumann";
}

struct ResolvedRun {
    CaseDefinition definition;
    double t_end;
    std::vector<double> snapshots;
};

inline ResolvedRun resolve(const RunConfig& cfg) {
    if (cfg.n && *cfg.n < 2) throw ConfigError("--n must be at least 2, got " + std::to_string(*cfg.n));
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("--dt must be positive");
    if (cfg.t_end && !(*cfg.t_end >= 0.0)) throw ConfigError("--t-end must be nonnegative");
    if (cfg.precision < 1 || cfg.precision > 17) throw ConfigError("--precision must be in 1..17");
    if (cfg.theta && !(*cfg.theta > 0.0)) throw ConfigError("--theta must be positive");

    auto build = [&]() -> CaseDefinition {
        switch (cfg.case_id) {
            case 'a':
                return case_a(cfg.n.value_or(150), cfg.dt.value_or(0.01));
            case 'b':
                return case_b(cfg.theta.value_or(0.05), cfg.n.value_or(512), cfg.dt.value_or(0.001));
            case 'c':
                return case_c(cfg.n.value_or(120), cfg.dt.value_or(0.001));
            default:
                throw ConfigError(std::string("--case must be a, b or c, got '") + cfg.case_id + "'");
        }
    };

    ResolvedRun r{[&] {
                      try {
                          return build();
                      } catch (const ConfigError&) {
                          throw;
                      } catch (const std::exception& e) {
                          throw ConfigError(e.what());
                      }
                  }(),
                  0.0,
                  {}};
    KsProblem& p = r.definition.problem;
    if (cfg.theta) p.theta = *cfg.theta;
    if (cfg.alpha) p.alpha = *cfg.alpha;
    p.boundary.closure = cfg.closure;
    if (r.definition.exact && (p.alpha != 1.0 || p.theta != 1.0)) {
        // the shock profile only solves the alpha = theta = 1 equation
        r.definition.exact.reset();
        r.definition.reference_gre.clear();
    }

    r.t_end = cfg.t_end.value_or(r.definition.default_t_end);
    if (cfg.snapshots) {
        r.snapshots = *cfg.snapshots;
    } else if (cfg.t_end) {
        for (double t : r.definition.default_snapshots) {
            if (t <= r.t_end) r.snapshots.push_back(t);
        }
    } else {
        r.snapshots = r.definition.default_snapshots;
    }
    for (double t : r.snapshots) {
        if (t < 0.0 || t > r.t_end) {
            throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, t-end]");
        }
    }
    return r;
}

struct GreRow {
    double time;
    double computed;
    std::optional<ReferenceGre> reference;
};

struct Timings {
    double fit_seconds = 0.0;
    double step_mean_seconds = 0.0;
    double total_seconds = 0.0;
};

struct RunSummary {
    RunConfig config;
    char case_id = 'a';
    int n_intervals = 0;
    double dt = 0.0;
    double alpha = 0.0;
    double theta = 0.0;
    double t_end = 0.0;
    std::int64_t steps_taken = 0;
    double max_abs_u = 0.0;
    std::vector<GreRow> gre;
    Timings timings;
    bool completed = false;
    std::string message;
};

inline std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

namespace detail {

inline void write_outputs(const RunSummary& s, const Trajectory& traj, const UniformGrid& grid) {
    namespace fs = std::filesystem;
    const fs::path& dir = s.config.out_dir;
    fs::create_directories(dir);
    const int prec = s.config.precision;

    for (std::size_t idx = 0; idx < traj.snapshots.size(); ++idx) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04zu.csv", idx);
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        const Snapshot& snap = traj.snapshots[idx];
        os << "x,u,v\n";
        for (std::size_t i = 0; i < snap.field.u.size(); ++i) {
            os << format_number(grid.knot(static_cast<int>(i)), prec) << ','
               << format_number(snap.field.u[i], prec) << ',' << format_number(snap.field.v[i], prec)
               << '\n';
        }
    }

    {
        std::ofstream os(dir / "field.csv");
        if (!os) throw std::runtime_error("cannot write " + (dir / "field.csv").string());
        os << 't';
        for (int i = 0; i <= grid.intervals(); ++i) os << ",u_" << i;
        os << '\n';
        for (const Snapshot& snap : traj.snapshots) {
            os << format_number(snap.time, prec);
            for (double u : snap.field.u) os << ',' << format_number(u, prec);
            os << '\n';
        }
    }

    nlohmann::ordered_json j;
    j["config"] = {
        {"case", std::string(1, s.case_id)},
        {"n", s.n_intervals},
        {"dt", s.dt},
        {"alpha", s.alpha},
        {"theta", s.theta},
        {"t_end", s.t_end},
        {"init", to_string(s.config.init)},
        {"pivot", to_string(s.config.pivoting)},
        {"closure", to_string(s.config.closure)},
        {"precision", s.config.precision},
    };
    j["status"] = s.completed ? "completed" : "failed";
    if (!s.message.empty()) j["message"] = s.message;
    j["steps_taken"] = s.steps_taken;
    j["max_abs_u"] = s.max_abs_u;
    j["snapshot_times"] = nlohmann::json::array();
    for (const Snapshot& snap : traj.snapshots) j["snapshot_times"].push_back(snap.time);
    if (!s.gre.empty()) {
        auto& rows = j["gre"] = nlohmann::json::array();
        for (const GreRow& g : s.gre) {
            nlohmann::ordered_json row{{"t", g.time}, {"computed", g.computed}};
            if (g.reference) {
                row["reference_present"] = g.reference->present;
                row["reference_quintic"] = g.reference->quintic;
                row["reference_lattice_boltzmann"] = g.reference->lattice_boltzmann;
                row["ratio_to_reference"] = g.computed / g.reference->present;
            }
            rows.push_back(std::move(row));
        }
    }
    std::ofstream(dir / "summary.json") << j.dump(2) << '\n';

    nlohmann::ordered_json t{{"fit_seconds", s.timings.fit_seconds},
                             {"step_mean_seconds", s.timings.step_mean_seconds},
                             {"total_seconds", s.timings.total_seconds}};
    std::ofstream(dir / "timings.json") << t.dump(2) << '\n';
}

}  // namespace detail

/// Run one configuration and write its outputs. Solver failures are
/// recorded in the summary (completed = false) with whatever snapshots were
/// reached; configuration and I/O errors throw.
inline RunSummary execute(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const ResolvedRun run = resolve(cfg);
    const KsProblem& p = run.definition.problem;

    RunSummary s;
    s.config = cfg;
    s.case_id = run.definition.id;
    s.n_intervals = p.grid.intervals();
    s.dt = p.dt;
    s.alpha = p.alpha;
    s.theta = p.theta;
    s.t_end = run.t_end;

    Trajectory traj;
    const auto start = clock::now();
    auto fitted = start;
    try {
        const Stepper stepper(p, cfg.pivoting);
        bool first = true;
        run_into(traj, stepper, run.t_end, run.snapshots, cfg.init, [&](const SolverState&) {
            if (first) {
                fitted = clock::now();
                first = false;
            }
        });
        s.completed = true;
    } catch (const SolverError& e) {
        s.message = e.what();
    }
    const auto end = clock::now();
    s.steps_taken = traj.steps_taken;
    s.max_abs_u = traj.max_abs_u;
    s.timings.total_seconds = std::chrono::duration<double>(end - start).count();
    s.timings.fit_seconds = std::chrono::duration<double>(fitted - start).count();
    if (traj.steps_taken > 0) {
        s.timings.step_mean_seconds =
            std::chrono::duration<double>(end - fitted).count() / static_cast<double>(traj.steps_taken);
    }

    if (run.definition.exact) {
        for (const Snapshot& snap : traj.snapshots) {
            if (snap.level == 0) continue;
            const auto exact = exact_knot_values(*run.definition.exact, p.grid, snap.time);
            GreRow row{snap.time, knot_gre(snap.field.u, exact), std::nullopt};
            for (const ReferenceGre& ref : run.definition.reference_gre) {
                if (std::abs(ref.time - snap.time) <= 0.5 * p.dt) row.reference = ref;
            }
            s.gre.push_back(row);
        }
    }

    detail::write_outputs(s, traj, p.grid);
    return s;
}

/// Independent runs over theta, each writing to out_dir/theta_<value>.
inline std::vector<RunSummary> execute_sweep(const RunConfig& cfg) {
    std::vector<std::future<RunSummary>> jobs;
    for (double theta : cfg.sweep_theta) {
        RunConfig one = cfg;
        one.sweep_theta.clear();
        one.theta = theta;
        one.out_dir = cfg.out_dir / ("theta_" + format_number(theta, 6));
        jobs.push_back(std::async(std::launch::async, [one] { return execute(one); }));
    }
    std::vector<RunSummary> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace ctbks
