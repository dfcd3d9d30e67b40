#pragma once

#include "ucplab/geometry.hpp"
#include "ucplab/operator.hpp"
#include "ucplab/spectral.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace ucplab {

enum class SearchTarget { Centers, Potential, Both };

const char* to_string(SearchTarget target);
SearchTarget search_target_from_string(const std::string& name);

struct SearchConfig {
    SearchTarget target = SearchTarget::Centers;
    int restarts = 5;
    int iterations = 200;
    double initial_step = 0.1;
    double decay = 0.97;
    std::uint64_t seed = 1;
    /// ||V||_inf bound for the potential target.
    double K = 0.0;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;
};

/// Builds the operator for a candidate potential.
using OperatorBuilder = std::function<DiscreteOperator(const ScalarField& potential)>;

struct SearchProblem {
    Grid grid;
    double delta;
    EnergyWindow window;
    OperatorBuilder build;
    /// Potential used when the potential is not searched.
    ScalarField base_potential;
    int subsamples = 8;
    SpectralOptions spectral = {};
};

struct TracePoint {
    int iteration;
    double value;
    double step;
};

struct SearchResult {
    double best_value;
    std::size_t best_restart;
    /// x_j - j per site, in unit_cell_sites order.
    std::vector<double> best_offsets;
    std::vector<Point> best_centers;
    /// Per-unit-cell constants (empty unless the potential was searched).
    std::vector<double> best_cell_values;
    ScalarField best_potential;
    /// Best value per iteration for the winning restart; non-increasing.
    std::vector<TracePoint> trace;
    std::vector<double> restart_values;
    /// Value at the periodic arrangement with the base (or zero cell) potential.
    double initial_value;
};

/// Projected random-direction descent on the uncertainty constant over feasible ball
/// offsets |x_j - j|_inf <= 1/2 - delta and/or cell potentials in [-K, K].
/// Restart 0 starts at the periodic arrangement with V = base (or 0); the others start at
/// seeded random feasible points. Restarts run concurrently and are merged by minimum.
SearchResult minimize_ratio(const SearchProblem& problem, const SearchConfig& config);

/// Rows `iteration,value,step`.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

}  // namespace ucplab
