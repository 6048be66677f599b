#pragma once

#include "ctbks/scheme.hpp"
#include "ctbks/trig_basis.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbks {

/// Travelling shock u = b + (15/19) d [e tanh(z) + f tanh^3(z)],
/// z = k (x - b t - x0). Exact for alpha = theta = 1.
struct ShockParams {
    double b;
    double k;
    double x0;
    double d;
    double e;
    double f;
};

inline double exact_shock(const ShockParams& p, double x, double t) {
    const double th = std::tanh(p.k * (x - p.b * t - p.x0));
    return p.b + 15.0 / 19.0 * p.d * (p.e * th + p.f * th * th * th);
}

inline ShockParams shock_case_a() {
    const double r = std::sqrt(11.0 / 19.0);
    return {5.0, 0.5 * r, -12.0, r, -9.0, 11.0};
}

/// sum |U_j - u_j| / sum |u_j| over the vectors as given.
inline double gre(std::span<const double> numeric, std::span<const double> exact) {
    if (numeric.size() != exact.size()) {
        throw std::invalid_argument("gre: length mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < exact.size(); ++j) {
        num += std::abs(numeric[j] - exact[j]);
        den += std::abs(exact[j]);
    }
    if (den == 0.0) throw std::domain_error("gre: exact solution sums to zero");
    return num / den;
}

/// GRE over knots j = 1..N, dropping the left endpoint.
inline double knot_gre(std::span<const double> numeric, std::span<const double> exact) {
    if (numeric.empty() || numeric.size() != exact.size()) {
        throw std::invalid_argument("knot_gre: length mismatch");
    }
    return gre(numeric.subspan(1), exact.subspan(1));
}

struct ReferenceGre {
    double time;
    double present;  ///< trigonometric cubic B-spline collocation
    double quintic;  ///< quintic B-spline collocation
    double lattice_boltzmann;
};

/// Reference global relative errors for case (a), N = 150, dt = 0.01.
inline const std::vector<ReferenceGre>& case_a_reference() {
    static const std::vector<ReferenceGre> table{
        {1.0, 2.98416e-5, 3.81725e-4, 6.7923e-4},
        {2.0, 7.00758e-5, 5.51142e-4, 1.1503e-3},
        {3.0, 9.51142e-5, 7.03980e-4, 1.5941e-3},
        {4.0, 1.79237e-4, 8.63662e-4, 2.0075e-3},
    };
    return table;
}

struct CaseDefinition {
    char id;
    KsProblem problem;
    std::optional<ShockParams> exact;
    std::vector<ReferenceGre> reference_gre;
    double default_t_end;
    std::vector<double> default_snapshots;
};

inline std::vector<double> evenly_spaced(double step, double t_end) {
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor(t_end / step + 1e-9));
    for (long i = 1; i <= count; ++i) out.push_back(static_cast<double>(i) * step);
    return out;
}

/// Shock wave on [-30, 30]; initial and endpoint data from the exact solution.
inline CaseDefinition case_a(int n = 150, double dt = 0.01) {
    const ShockParams p = shock_case_a();
    UniformGrid grid(-30.0, 30.0, n);
    KsProblem problem{
        .alpha = 1.0,
        .theta = 1.0,
        .grid = grid,
        .dt = dt,
        .initial_u = [p](double x) { return exact_shock(p, x, 0.0); },
        .initial_v = std::nullopt,
        .boundary = {exact_shock(p, grid.a(), 0.0), exact_shock(p, grid.b(), 0.0),
                     BoundaryClosure::dirichlet},
    };
    return {'a', std::move(problem), p, case_a_reference(), 4.0, {1.0, 2.0, 3.0, 4.0}};
}

/// u0 = cos(x/2) sin(x/2) on [0, 4 pi]; the reference runs use
/// theta in {0.05, 0.02, 0.01, 0.002}.
inline CaseDefinition case_b(double theta, int n = 512, double dt = 0.001) {
    if (!(theta > 0.0)) {
        throw std::invalid_argument("case_b: theta must be positive, got " + std::to_string(theta));
    }
    KsProblem problem{
        .alpha = 1.0,
        .theta = theta,
        .grid = UniformGrid(0.0, 4.0 * std::numbers::pi, n),
        .dt = dt,
        .initial_u = [](double x) { return std::cos(x / 2.0) * std::sin(x / 2.0); },
        .initial_v = std::nullopt,
        .boundary = {0.0, 0.0, BoundaryClosure::dirichlet},
    };
    return {'b', std::move(problem), std::nullopt, {}, 10.0, evenly_spaced(0.1, 10.0)};
}

/// Gaussian u0 = -exp(-x^2) on [-30, 30] with u = 0 at both ends.
inline CaseDefinition case_c(int n = 120, double dt = 0.001) {
    KsProblem problem{
        .alpha = 1.0,
        .theta = 1.0,
        .grid = UniformGrid(-30.0, 30.0, n),
        .dt = dt,
        .initial_u = [](double x) { return -std::exp(-x * x); },
        .initial_v = std::nullopt,
        .boundary = {0.0, 0.0, BoundaryClosure::dirichlet},
    };
    return {'c', std::move(problem), std::nullopt, {}, 20.0, evenly_spaced(0.25, 20.0)};
}

/// Exact knot values of case (a) at time t.
inline std::vector<double> exact_knot_values(const ShockParams& p, const UniformGrid& g, double t) {
    std::vector<double> u(static_cast<std::size_t>(g.intervals()) + 1);
    for (int i = 0; i <= g.intervals(); ++i) u[static_cast<std::size_t>(i)] = exact_shock(p, g.knot(i), t);
    return u;
}

}  // namespace ctbks
