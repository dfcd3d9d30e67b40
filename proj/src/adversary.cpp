#include "ucplab/adversary.hpp"

#include "ucplab/error.hpp"
#include "ucplab/fields.hpp"
#include "ucplab/observability.hpp"
#include "ucplab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

namespace ucplab {

const char* to_string(SearchTarget target) {
    switch (target) {
        case SearchTarget::Centers: return "centers";
        case SearchTarget::Potential: return "potential";
        case SearchTarget::Both: return "both";
    }
    return "?";
}

SearchTarget search_target_from_string(const std::string& name) {
    if (name == "centers") return SearchTarget::Centers;
    if (name == "potential") return SearchTarget::Potential;
    if (name == "both") return SearchTarget::Both;
    throw InvalidArgument("search target must be one of centers, potential, both (got '" + name + "')");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Objective {
public:
    Objective(const SearchProblem& p, const SearchConfig& c)
        : problem_(p), sites_(unit_cell_sites(p.grid.domain()).size()), dim_(p.grid.dim()) {
        search_centers_ = c.target != SearchTarget::Potential;
        search_potential_ = c.target != SearchTarget::Centers;
        n_centers_ = search_centers_ ? sites_ * static_cast<std::size_t>(dim_) : 0;
        n_cells_ = search_potential_ ? sites_ : 0;
        margin_ = 0.5 - p.delta;
        bound_ = c.K;
        if (!search_potential_) {
            fixed_.emplace(spectrum_below(p.build(p.base_potential), p.window, p.spectral));
            if (fixed_->empty()) throw InvalidArgument("energy window holds no spectrum; nothing to minimise");
        }
    }

    std::size_t size() const { return n_centers_ + n_cells_; }
    double upper(std::size_t k) const { return k < n_centers_ ? margin_ : bound_; }

    std::vector<double> offsets(const std::vector<double>& x) const {
        if (!search_centers_) return std::vector<double>(sites_ * static_cast<std::size_t>(dim_), 0.0);
        return {x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_centers_)};
    }

    std::vector<double> cells(const std::vector<double>& x) const {
        return {x.begin() + static_cast<std::ptrdiff_t>(n_centers_), x.end()};
    }

    ScalarField potential(const std::vector<double>& x) const {
        if (!search_potential_) return problem_.base_potential;
        const auto c = cells(x);
        return cell_potential(problem_.grid, c);
    }

    double operator()(const std::vector<double>& x) const {
        const auto offs = offsets(x);
        const BallArrangement arr = arrangement_from_offsets(problem_.grid.domain(), problem_.delta, offs);
        const IndicatorField w = indicator(arr, problem_.grid, problem_.subsamples);
        if (fixed_) return uncertainty_constant(*fixed_, w);
        const SpectralBasis basis = spectrum_below(problem_.build(potential(x)), problem_.window, problem_.spectral);
        if (basis.empty()) return kInf;
        return uncertainty_constant(basis, w);
    }

    void project(std::vector<double>& x) const {
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], -upper(k), upper(k));
    }

private:
    const SearchProblem& problem_;
    std::size_t sites_;
    int dim_;
    bool search_centers_ = false;
    bool search_potential_ = false;
    std::size_t n_centers_ = 0;
    std::size_t n_cells_ = 0;
    double margin_ = 0.0;
    double bound_ = 0.0;
    std::optional<SpectralBasis> fixed_;
};

struct RestartOutcome {
    double value = kInf;
    std::vector<double> x;
    std::vector<TracePoint> trace;
};

RestartOutcome run_restart(const Objective& f, const SearchConfig& c, std::size_t index) {
    std::mt19937_64 rng(derive_seed(c.seed, index));
    std::vector<double> x(f.size(), 0.0);
    if (index > 0) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            std::uniform_real_distribution<double> u(-f.upper(k), f.upper(k));
            x[k] = u(rng);
        }
    }
    RestartOutcome out;
    out.value = f(x);
    out.x = x;
    out.trace.push_back({0, out.value, c.initial_step});
    if (x.empty()) {
        for (int it = 1; it <= c.iterations; ++it) out.trace.push_back({it, out.value, 0.0});
        return out;
    }

    std::normal_distribution<double> n01;
    std::vector<double> dir(x.size());
    std::vector<double> trial(x.size());
    double step = c.initial_step;
    for (int it = 1; it <= c.iterations; ++it) {
        double len = 0.0;
        for (auto& v : dir) {
            v = n01(rng);
            len += v * v;
        }
        len = std::sqrt(len);
        for (const double sign : {1.0, -1.0}) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = out.x[k] + sign * step * dir[k] / len;
            f.project(trial);
            const double v = f(trial);
            if (v < out.value) {
                out.value = v;
                out.x = trial;
                break;
            }
        }
        out.trace.push_back({it, out.value, step});
        step *= c.decay;
    }
    return out;
}

}  // namespace

SearchResult minimize_ratio(const SearchProblem& problem, const SearchConfig& config) {
    if (!(problem.delta > 0.0 && problem.delta < 0.5)) throw InvalidArgument("delta must be in (0, 1/2)");
    if (config.restarts < 1) throw InvalidArgument("restarts must be >= 1");
    if (config.iterations < 0) throw InvalidArgument("iterations must be >= 0");
    if (!(config.initial_step > 0.0)) throw InvalidArgument("initial step must be > 0");
    if (!(config.decay > 0.0 && config.decay <= 1.0)) throw InvalidArgument("step decay must be in (0, 1]");
    if (!(config.K >= 0.0)) throw InvalidArgument("potential bound K must be >= 0");
    require_same_grid(problem.grid, problem.base_potential.grid(), "adversarial search");

    const Objective f(problem, config);
    const auto restarts = static_cast<std::size_t>(config.restarts);
    std::vector<RestartOutcome> outcomes(restarts);
    std::vector<std::exception_ptr> errors(restarts);

    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(restarts));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < restarts; i = next++) {
            try {
                outcomes[i] = run_restart(f, config, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    for (std::size_t i = 1; i < restarts; ++i)
        if (outcomes[i].value < outcomes[best].value) best = i;

    const RestartOutcome& win = outcomes[best];
    const auto offsets = f.offsets(win.x);
    const BallArrangement arr = arrangement_from_offsets(problem.grid.domain(), problem.delta, offsets);
    std::vector<double> restart_values;
    for (const auto& o : outcomes) restart_values.push_back(o.value);
    const bool potential_searched = config.target != SearchTarget::Centers;
    return SearchResult{
        .best_value = win.value,
        .best_restart = best,
        .best_offsets = offsets,
        .best_centers = arr.centers(),
        .best_cell_values = potential_searched ? f.cells(win.x) : std::vector<double>{},
        .best_potential = f.potential(win.x),
        .trace = win.trace,
        .restart_values = std::move(restart_values),
        .initial_value = outcomes[0].trace.front().value,
    };
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
    out << "iteration,value,step\n";
    out.precision(17);
    for (const auto& t : trace) out << t.iteration << ',' << t.value << ',' << t.step << '\n';
}

}  // namespace ucplab
