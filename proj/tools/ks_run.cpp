#include "ctbks/cli.hpp"
#include "ctbks/runner.hpp"

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

void report(const ctbks::RunSummary& s) {
    std::cout << "case " << s.case_id << ": N = " << s.n_intervals << ", dt = " << s.dt
              << ", theta = " << s.theta << ", t_end = " << s.t_end << " -> "
              << (s.completed ? "completed" : "FAILED") << " after " << s.steps_taken << " steps ("
              << s.timings.total_seconds << " s)\n";
    if (!s.message.empty()) std::cout << "  " << s.message << '\n';
    for (const auto& g : s.gre) {
        std::printf("  t = %-6g GRE = %.6e", g.time, g.computed);
        if (g.reference) {
            std::printf("   reference %.6e (quintic %.6e)", g.reference->present, g.reference->quintic);
        }
        std::printf("\n");
    }
    std::cout << "  outputs in " << s.config.out_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args.front() == "--help" || args.front() == "-h") {
        std::cout << "usage: ks_run run --case {a|b|c} [--n INT] [--dt REAL] [--t-end REAL]\n"
                     "                  [--theta REAL] [--alpha REAL] [--snapshots t1,t2,...]\n"
                     "                  [--init {function-fit|uxx-fit}] [--pivot {partial|none}]\n"
                     "                  [--closure {dirichlet|neumann}] [--out DIR] [--precision INT]\n"
                     "                  [--sweep theta=v1,v2,...] [--config FILE]\n";
        return args.empty() ? 2 : 0;
    }
    try {
        const ctbks::RunConfig cfg = ctbks::parse_config(args);
        bool ok = true;
        if (cfg.sweep_theta.empty()) {
            const auto s = ctbks::execute(cfg);
            report(s);
            ok = s.completed;
        } else {
            for (const auto& s : ctbks::execute_sweep(cfg)) {
                report(s);
                ok = ok && s.completed;
            }
        }
        return ok ? 0 : 1;
    } catch (const ctbks::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
