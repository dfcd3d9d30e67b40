#include "ucplab/harness.hpp"

#include "ucplab/adversary.hpp"
#include "ucplab/carleman.hpp"
#include "ucplab/error.hpp"
#include "ucplab/extension.hpp"
#include "ucplab/fields.hpp"
#include "ucplab/geometry.hpp"
#include "ucplab/observability.hpp"
#include "ucplab/rng.hpp"
#include "ucplab/shannon.hpp"
#include "ucplab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace ucplab {

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"spectrum", "observability", "sweep",  "adversarial", "shannon",
                                                   "carleman", "extend",        "quc-check", "summary"};
    return names;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw InvalidArgument("parameter '" + key + "' must be a finite number (got '" + text + "')");
    }
    return v;
}

/// Typed access to the parameter map; rejects keys the experiment does not know.
class Params {
public:
    Params(const ExperimentConfig& c, const std::set<std::string>& allowed) : map_(c.params) {
        for (const auto& [k, v] : map_) {
            if (!allowed.count(k)) throw InvalidArgument("unknown parameter '" + k + "' for experiment " + c.experiment);
        }
    }

    bool has(const std::string& k) const { return map_.count(k) > 0; }

    std::string str(const std::string& k, const std::string& def) const {
        const auto it = map_.find(k);
        return it == map_.end() ? def : trim(it->second);
    }

    double num(const std::string& k, double def) const {
        const auto it = map_.find(k);
        return it == map_.end() ? def : parse_number(k, it->second);
    }

    long integer(const std::string& k, long def) const {
        const double v = num(k, static_cast<double>(def));
        if (v != std::floor(v) || std::abs(v) > 1e15) throw InvalidArgument("parameter '" + k + "' must be an integer");
        return static_cast<long>(v);
    }

    std::uint64_t seed(const std::string& k, std::uint64_t def) const {
        const long v = integer(k, static_cast<long>(def));
        if (v < 0) throw InvalidArgument("parameter '" + k + "' must be a nonnegative integer seed");
        return static_cast<std::uint64_t>(v);
    }

    /// Comma list, or `a:b` / `a:b:step` inclusive ranges.
    std::vector<double> list(const std::string& k, const std::string& def) const {
        const std::string text = str(k, def);
        std::vector<double> out;
        for (const auto& part : split(text, ',')) {
            if (part.empty()) throw InvalidArgument("parameter '" + k + "' has an empty list entry");
            const auto r = split(part, ':');
            if (r.size() == 1) {
                out.push_back(parse_number(k, part));
                continue;
            }
            if (r.size() > 3) throw InvalidArgument("parameter '" + k + "' range must be a:b or a:b:step");
            const double a = parse_number(k, r[0]);
            const double b = parse_number(k, r[1]);
            const double step = r.size() == 3 ? parse_number(k, r[2]) : 1.0;
            if (!(step > 0.0) || b < a) throw InvalidArgument("parameter '" + k + "' range needs a <= b and step > 0");
            const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
            if (count > 100000) throw InvalidArgument("parameter '" + k + "' range is too long");
            for (long i = 0; i <= count; ++i) out.push_back(a + i * step);
        }
        if (out.empty()) throw InvalidArgument("parameter '" + k + "' must not be empty");
        return out;
    }

private:
    std::map<std::string, std::string> map_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidArgument(message);
}

// ---------------------------------------------------------------- shared setup

struct MeshSpec {
    int dim;
    Boundary bc;
    double h;
    long n;  // 0 = derive from h
};

const std::set<std::string> kMeshKeys = {"dim", "bc", "h", "n"};

MeshSpec read_mesh(const Params& p, int default_dim, const std::string& default_bc, double default_h, long default_n) {
    MeshSpec m{static_cast<int>(p.integer("dim", default_dim)), boundary_from_string(p.str("bc", default_bc)),
               p.num("h", default_h), p.integer("n", default_n)};
    require(m.dim >= 1 && m.dim <= kMaxDim, "dim must be 1, 2 or 3");
    require(m.h > 0.0, "mesh spacing h must be > 0");
    require(m.n == 0 || m.n >= 2, "grid needs n >= 2 points per axis");
    return m;
}

long points_for(const MeshSpec& m, double L) {
    if (m.n) return m.n;
    const long cells = std::lround(L / m.h);
    return m.bc == Boundary::Dirichlet ? cells - 1 : cells;
}

Grid make_grid(const MeshSpec& m, double L) {
    const long n = points_for(m, L);
    require(n >= 2, "grid needs n >= 2 points per axis (L/h too small)");
    double total = 1.0;
    for (int a = 0; a < m.dim; ++a) total *= static_cast<double>(n);
    require(total <= 5e6, "grid exceeds 5e6 nodes");
    return Grid(Domain(m.dim, L, m.bc), static_cast<int>(n));
}

struct PotentialSpec {
    std::string kind;  // zero, random, cell, sinusoidal, file
    std::string path;
    double K;
    double wavenumber;
};

const std::set<std::string> kPotentialKeys = {"potential", "K", "wavenumber"};

PotentialSpec read_potential(const Params& p) {
    PotentialSpec s{p.str("potential", "zero"), "", p.num("K", 0.0), p.num("wavenumber", 2.0 * std::numbers::pi)};
    if (s.kind.rfind("file:", 0) == 0) {
        s.path = s.kind.substr(5);
        s.kind = "file";
        require(!s.path.empty(), "potential=file: needs a path");
    }
    require(s.kind == "zero" || s.kind == "random" || s.kind == "cell" || s.kind == "sinusoidal" || s.kind == "file",
            "potential must be zero, random, cell, sinusoidal or file:<path>");
    require(s.K >= 0.0, "potential bound K must be >= 0");
    return s;
}

ScalarField make_potential(const PotentialSpec& s, const Grid& grid, std::uint64_t seed) {
    if (s.kind == "random") return random_potential(grid, s.K, seed);
    if (s.kind == "cell") return random_cell_potential(grid, s.K, seed);
    if (s.kind == "sinusoidal") return sinusoidal_field(grid, s.K, s.wavenumber);
    if (s.kind == "file") {
        ScalarField v = load_field_csv(s.path, grid);
        require(v.sup_norm() <= s.K + 1e-12 || s.K == 0.0, "file potential exceeds the declared bound K");
        return v;
    }
    return ScalarField::zeros(grid);
}

/// ||V||_inf actually used, for the bound formulas.
double potential_bound(const PotentialSpec& s, const ScalarField& v) { return s.kind == "file" ? v.sup_norm() : s.K; }

struct WindowSpec {
    bool interval;
    double a;
    double E;
};

WindowSpec read_window(const Params& p) {
    WindowSpec w{p.has("a"), p.num("a", 0.0), p.num("E", 10.0)};
    require(!w.interval || w.a <= w.E, "interval window needs a <= E");
    return w;
}

EnergyWindow make_window(const WindowSpec& w) {
    return w.interval ? EnergyWindow::interval(w.a, w.E) : EnergyWindow::below(w.E);
}

void require_delta(double d) { require(d > 0.0 && d < 0.5, "delta must be in (0, 1/2)"); }

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<std::uint64_t> read_seeds(const Params& p) {
    std::vector<std::uint64_t> out;
    for (double s : sorted_unique(p.list("seeds", "0"))) {
        require(s >= 0.0 && s == std::floor(s), "seeds must be nonnegative integers");
        out.push_back(static_cast<std::uint64_t>(s));
    }
    return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- CSV output

struct Output {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> sidecars;  // (suffix, csv text)
};

void header(Output& o, const ExperimentConfig& c, std::uint64_t root_seed) {
    o.comments.push_back("# ucplab experiment=" + c.experiment + " schema=" + c.experiment + "/v" +
                         std::to_string(kSchemaVersion));
    o.comments.push_back("# root_seed=" + std::to_string(root_seed) + " seed_scheme=" + kSeedScheme);
    std::string params = "# params:";
    for (const auto& [k, v] : c.params) params += " " + k + "=" + trim(v);
    o.comments.push_back(params);
}

void emit(std::ostream& out, const Output& o) {
    for (const auto& c : o.comments) out << c << '\n';
    for (std::size_t i = 0; i < o.columns.size(); ++i) out << (i ? "," : "") << o.columns[i];
    out << '\n';
    for (const auto& r : o.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

// ---------------------------------------------------------------- experiments

using Runner = std::function<Output(const ExperimentConfig&, unsigned workers)>;

struct Experiment {
    std::set<std::string> keys;
    /// Parses and validates; returns the runner bound to the parsed plan.
    std::function<Runner(const ExperimentConfig&)> plan;
};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<std::set<std::string>> more) {
    for (const auto& m : more) base.insert(m.begin(), m.end());
    return base;
}

// spectrum -------------------------------------------------------------------

Runner plan_spectrum(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const MeshSpec mesh = read_mesh(p, 1, "dirichlet", 0.01, 0);
    const double L = p.num("L", 1.0);
    require(L > 0.0, "cube side L must be > 0");
    const PotentialSpec pot = read_potential(p);
    const WindowSpec win = read_window(p);
    const std::uint64_t seed = p.seed("seed", 0);
    make_grid(mesh, L);
    return [=](const ExperimentConfig& cfg, unsigned) {
        const Grid g = make_grid(mesh, L);
        const ScalarField v = make_potential(pot, g, derive_seed(seed, 0));
        const DiscreteOperator op = build_schrodinger(g.domain(), g.points_per_axis(), v);
        const SpectralBasis basis = spectrum_below(op, make_window(win));
        Output o;
        header(o, cfg, seed);
        o.comments.push_back("# n=" + std::to_string(g.points_per_axis()) + " h=" + fmt(g.spacing()) +
                             " count=" + std::to_string(basis.size()));
        o.columns = {"k", "energy"};
        for (std::size_t k = 0; k < basis.size(); ++k) o.rows.push_back({std::to_string(k + 1), fmt(basis.energy(k))});
        return o;
    };
}

// sweep / observability --------------------------------------------------------

struct SweepTask {
    double L;
    double delta;
    std::uint64_t seed;
};

std::vector<std::string> sweep_columns() {
    return {"L", "delta", "E", "K", "seed", "ratio", "lambda_min", "bound_sfuc", "bound_klein", "error"};
}

std::pair<double, double> bounds_for(double delta, double K, double E, double N, double M) {
    double sfuc = kNaN, klein = kNaN;
    const BoundParams bp{K, E, N, M};
    if (delta > 0.0 && delta < 0.5 && E >= 0.0) sfuc = sfuc_bound(delta, bp);
    if (delta > 0.0 && delta <= 0.5) klein = klein_gamma(delta, bp).bound;
    return {sfuc, klein};
}

Runner plan_sweep(const ExperimentConfig& c, const std::set<std::string>& keys, bool single) {
    Params p(c, keys);
    const std::string fixture = p.str("fixture", "spectral");
    require(fixture == "spectral" || fixture == "monomial", "fixture must be spectral or monomial");
    const double N = p.num("N", 1.0), M = p.num("M_d", 1.0);
    require(N > 0.0, "exponent constant N must be > 0");
    require(M > 0.0, "constant M_d must be > 0");
    const std::uint64_t root = p.seed("seed", 0);

    if (fixture == "monomial") {
        const long power = p.integer("monomial_n", 1);
        require(power >= 0 && power <= 50, "monomial_n must be in [0, 50]");
        const long n = p.integer("n", 20000);
        require(n >= 2 && n <= 5000000, "monomial grid needs 2 <= n <= 5e6");
        std::vector<double> deltas = sorted_unique(p.list("delta", single ? "0.25" : "0.1,0.2,0.25,0.4,0.5"));
        for (double d : deltas) require(d > 0.0 && d <= 1.0, "monomial delta must be in (0, 1]");
        require(!single || deltas.size() == 1, "observability takes a single delta");
        const double E = p.num("E", 0.0), K = p.num("K", 0.0);
        require(K >= 0.0, "potential bound K must be >= 0");
        return [=](const ExperimentConfig& cfg, unsigned workers) {
            const Grid g(Domain(1, 1.0, Boundary::Periodic), static_cast<int>(n));
            const ScalarField psi = ScalarField::sample(g, [&](const Point& x) {
                return std::pow(x[0] + 0.5, static_cast<double>(power));
            });
            Output o;
            header(o, cfg, root);
            o.comments.push_back("# fixture=monomial psi=x^" + std::to_string(power) + " on (0,1), S=(0,delta), n=" +
                                 std::to_string(n) + "; lambda_min=ratio");
            o.columns = sweep_columns();
            o.rows.resize(deltas.size());
            parallel_for(deltas.size(), workers, [&](std::size_t i) {
                const double d = deltas[i];
                const IndicatorField w = indicator(Box{{-0.5, 0, 0}, {-0.5 + d, 0, 0}}, g, 8);
                const double r = ratio(psi, w);
                const auto [sf, kl] = bounds_for(d, K, E, N, M);
                o.rows[i] = {fmt(1.0), fmt(d), fmt(E), fmt(K), std::to_string(root), fmt(r), fmt(r), fmt(sf), fmt(kl), ""};
            });
            return o;
        };
    }

    const MeshSpec mesh = read_mesh(p, 1, "dirichlet", 0.01, 0);
    std::vector<double> Ls = sorted_unique(p.list("L", single ? "3" : "1,3,5"));
    std::vector<double> deltas = sorted_unique(p.list("delta", "0.2"));
    for (double L : Ls) require(L >= 1.0, "cube side L must be >= 1 for an equidistributed arrangement");
    for (double d : deltas) require_delta(d);
    const WindowSpec win = read_window(p);
    const PotentialSpec pot = read_potential(p);
    const std::vector<std::uint64_t> seeds = read_seeds(p);
    require(!single || (Ls.size() == 1 && deltas.size() == 1 && seeds.size() == 1),
            "observability takes a single L, delta and seed (use sweep for lists)");
    const std::string arr_mode = p.str("arrangement", "periodic");
    require(arr_mode == "periodic" || arr_mode == "jitter", "arrangement must be periodic or jitter");
    const double amp = p.num("jitter", 0.0);
    const bool fixed_jitter_seed = p.has("jitter_seed");
    const std::uint64_t jitter_seed = p.seed("jitter_seed", 0);
    for (double d : deltas) require(amp >= 0.0 && amp <= 0.5 - d + 1e-12, "jitter amplitude must be in [0, 1/2 - delta]");
    const long sub = p.integer("subsamples", 8);
    require(sub >= 1 && sub <= 64, "subsamples must be in [1, 64]");
    for (double L : Ls) make_grid(mesh, L);

    std::vector<SweepTask> tasks;
    for (double L : Ls)
        for (double d : deltas)
            for (auto s : seeds) tasks.push_back({L, d, s});

    return [=](const ExperimentConfig& cfg, unsigned workers) {
        Output o;
        header(o, cfg, root);
        o.comments.push_back("# ratio uses a seeded random unit element of the spectral subspace; lambda_min is its "
                             "best constant; N and M_d are user inputs");
        o.columns = sweep_columns();
        o.rows.resize(tasks.size());
        parallel_for(tasks.size(), workers, [&](std::size_t i) {
            const SweepTask& t = tasks[i];
            std::vector<std::string> row = {fmt(t.L), fmt(t.delta), fmt(win.E), fmt(pot.K), std::to_string(t.seed)};
            try {
                const Grid g = make_grid(mesh, t.L);
                const ScalarField v = make_potential(pot, g, derive_seed(t.seed, 0));
                const DiscreteOperator op = build_schrodinger(g.domain(), g.points_per_axis(), v);
                const SpectralBasis basis = spectrum_below(op, make_window(win));
                if (basis.empty()) throw InvalidArgument("energy window holds no spectrum");
                const arrangement::Mode mode = arr_mode == "jitter"
                                                   ? arrangement::Mode{arrangement::Jitter{
                                                         fixed_jitter_seed ? jitter_seed : derive_seed(t.seed, 1), amp}}
                                                   : arrangement::Mode{arrangement::Periodic{}};
                const BallArrangement arr = make_arrangement(g.domain(), t.delta, mode);
                const IndicatorField w = indicator(arr, g, static_cast<int>(sub));
                const double lmin = uncertainty_constant(basis, w);
                const double r = ratio(random_in_range(basis, derive_seed(t.seed, 2)), w);
                const auto [sf, kl] = bounds_for(t.delta, potential_bound(pot, v), win.E, N, M);
                for (const double x : {r, lmin, sf, kl}) row.push_back(fmt(x));
                row.push_back("");
            } catch (const std::exception& e) {
                while (row.size() < 9) row.push_back("nan");
                row.push_back(csv_field(e.what()));
            }
            o.rows[i] = std::move(row);
        });
        return o;
    };
}

// adversarial ------------------------------------------------------------------

Runner plan_adversarial(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const MeshSpec mesh = read_mesh(p, 1, "dirichlet", 0.01, 0);
    const double L = p.num("L", 5.0);
    require(L >= 1.0, "cube side L must be >= 1 for an equidistributed arrangement");
    const double delta = p.num("delta", 0.1);
    require_delta(delta);
    const WindowSpec win = read_window(p);
    const PotentialSpec pot = read_potential(p);
    SearchConfig sc;
    sc.target = search_target_from_string(p.str("target", "centers"));
    sc.restarts = static_cast<int>(p.integer("restarts", 10));
    sc.iterations = static_cast<int>(p.integer("iterations", 200));
    sc.initial_step = p.num("step", 0.1);
    sc.decay = p.num("decay", 0.97);
    sc.seed = p.seed("seed", 1);
    sc.K = pot.K;
    require(sc.restarts >= 1, "restarts must be >= 1");
    require(sc.iterations >= 0, "iterations must be >= 0");
    require(sc.initial_step > 0.0, "initial step must be > 0");
    require(sc.decay > 0.0 && sc.decay <= 1.0, "step decay must be in (0, 1]");
    const long sub = p.integer("subsamples", 8);
    require(sub >= 1 && sub <= 64, "subsamples must be in [1, 64]");
    make_grid(mesh, L);

    return [=](const ExperimentConfig& cfg, unsigned workers) {
        const Grid g = make_grid(mesh, L);
        const Domain dom = g.domain();
        const int n = g.points_per_axis();
        SearchConfig run_cfg = sc;
        run_cfg.workers = workers;
        const SearchProblem prob{g,
                                 delta,
                                 make_window(win),
                                 [dom, n](const ScalarField& v) { return build_schrodinger(dom, n, v); },
                                 make_potential(pot, g, derive_seed(sc.seed, 0)),
                                 static_cast<int>(sub)};
        const SearchResult res = minimize_ratio(prob, run_cfg);
        Output o;
        header(o, cfg, sc.seed);
        o.comments.push_back("# target=" + std::string(to_string(sc.target)) + " best_value=" + fmt(res.best_value) +
                             " periodic_value=" + fmt(res.initial_value) +
                             " best_restart=" + std::to_string(res.best_restart));
        std::string per = "# restart_values=";
        for (std::size_t i = 0; i < res.restart_values.size(); ++i) per += (i ? ";" : "") + fmt(res.restart_values[i]);
        o.comments.push_back(per);
        o.columns = {"iteration", "value", "step"};
        for (const auto& t : res.trace) o.rows.push_back({std::to_string(t.iteration), fmt(t.value), fmt(t.step)});

        std::ostringstream arr;
        write_arrangement_csv(arr, arrangement_from_offsets(dom, delta, res.best_offsets));
        o.sidecars.push_back({".arrangement.csv", arr.str()});
        if (sc.target != SearchTarget::Centers) {
            std::ostringstream vcsv;
            write_field_csv(vcsv, res.best_potential);
            o.sidecars.push_back({".potential.csv", vcsv.str()});
        }
        return o;
    };
}

// shannon ----------------------------------------------------------------------

Runner plan_shannon(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const double K = p.num("bandwidth", 1.0);
    require(K > 0.0, "bandwidth K must be > 0");
    const long J = p.integer("truncation", 200);
    require(J >= 1, "truncation J must be >= 1");
    const long ceiling = p.integer("J_ceiling", 100000);
    require(ceiling >= J && ceiling <= 10000000, "J ceiling must be in [truncation, 1e7]");
    const double amp = p.num("jitter", 0.0);
    require(amp >= 0.0 && amp < 0.5, "jitter amplitude must be in [0, 1/2)");
    const std::uint64_t seed = p.seed("seed", 0);
    const std::string fixture = p.str("fixture", "gaussian");
    require(fixture == "gaussian" || fixture == "sinc", "fixture must be gaussian or sinc");
    std::vector<double> shifts = p.list("shifts", "-2,0,3");
    for (double s : shifts) require(s == std::floor(s), "sinc shifts must be integers");
    std::vector<double> coeffs = p.list("coefficients", "1");
    if (coeffs.size() == 1) coeffs.assign(shifts.size(), coeffs[0]);
    require(coeffs.size() == shifts.size(), "coefficients must match shifts");
    const double xmin = p.num("xmin", -2.0), xmax = p.num("xmax", 2.0);
    require(xmin < xmax, "evaluation interval needs xmin < xmax");
    const long points = p.integer("points", 401);
    require(points >= 2 && points <= 10000000, "points must be in [2, 1e7]");

    return [=](const ExperimentConfig& cfg, unsigned) {
        RealFunction f, fhat;
        if (fixture == "gaussian") {
            f = [](double x) { return std::exp(-0.5 * x * x); };
            fhat = [](double q) { return std::exp(-0.5 * q * q); };
        } else {
            f = sinc_span(K, shifts, coeffs);
            fhat = [](double) { return 0.0; };
        }
        std::vector<double> xs(static_cast<std::size_t>(points));
        for (long i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = xmin + (xmax - xmin) * i / (points - 1);
        AliasingOptions opt;
        opt.J_ceiling = static_cast<int>(ceiling);
        opt.jitter_amplitude = amp;
        opt.jitter_seed = seed;
        const AliasingReport rep = verify_aliasing(f, fhat, K, xs, static_cast<int>(J), opt);
        const SamplingProblem prob = make_sampling_problem(
            f, K, rep.J_used, amp > 0.0 ? random_jitter(rep.J_used, amp, seed) : std::vector<double>{});
        Output o;
        header(o, cfg, seed);
        o.comments.push_back("# verdict=" + std::string(to_string(rep.verdict)) + " sup_error=" + fmt(rep.sup_error) +
                             " bound=" + fmt(rep.bound) + " truncation_allowance=" + fmt(rep.truncation_allowance) +
                             " J_used=" + std::to_string(rep.J_used));
        if (!rep.notice.empty()) o.comments.push_back("# notice=" + rep.notice);
        o.columns = {"x", "f", "S_K f", "error"};
        for (double x : xs) {
            const double fx = f(x), sx = reconstruct(prob, x);
            o.rows.push_back({fmt(x), fmt(fx), fmt(sx), fmt(fx - sx)});
        }
        return o;
    };
}

// carleman ---------------------------------------------------------------------

Runner plan_carleman(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const int dim = static_cast<int>(p.integer("dim", 2));
    require(dim >= 1 && dim <= kMaxDim, "dim must be 1, 2 or 3");
    const long n = p.integer("n", 128);
    require(n >= 2, "grid needs n >= 2 points per axis");
    require(std::pow(static_cast<double>(n), dim) <= 5e6, "grid exceeds 5e6 nodes");
    const double L = p.num("L", 2.0);
    require(L >= 2.0, "the grid must cover B(0,1): L >= 2");
    const double mu = p.num("mu", 1.0);
    require(mu > 0.0, "weight parameter mu must be > 0");
    const double theta1 = p.num("theta1", 1.0);
    require(theta1 > 0.0, "theta1 must be > 0");
    const std::vector<double> alphas = p.list("alphas", "3:20");
    for (double a : alphas) require(a > 0.0, "alpha must be > 0");
    const std::vector<double> radii = p.list("radii", "0.3,0.4,0.5");
    const double hw = p.num("half_width", 0.2);
    const double power = p.num("power", 4.0);
    require(hw > 0.0, "bump half width must be > 0");
    require(power >= 0.0, "bump power must be >= 0");
    SupportOptions sup{p.num("rho_in", 0.05), p.num("rho_out", 0.05)};
    require(sup.rho_in >= 0.0 && sup.rho_out >= 0.0 && sup.rho_out < 1.0,
            "support cutoffs must satisfy rho_in >= 0 and 0 <= rho_out < 1");
    for (double r : radii)
        require(r - hw >= sup.rho_in && r + hw <= 1.0 - sup.rho_out,
                "bump supports must lie in rho_in <= |x| <= 1 - rho_out");
    const long npts = p.integer("points", 10000);
    require(npts >= 0 && npts <= 10000000, "points must be in [0, 1e7]");
    const std::uint64_t seed = p.seed("seed", 0);
    const std::string bc = p.str("bc", "periodic");
    const Boundary boundary = boundary_from_string(bc);

    return [=](const ExperimentConfig& cfg, unsigned workers) {
        const Domain dom(dim, L, boundary);
        const Grid g(dom, static_cast<int>(n));
        const DiscreteOperator op = build_schrodinger(dom, static_cast<int>(n), ScalarField::zeros(g));
        const CarlemanWeight w = CarlemanWeight::identity(dim, mu);
        std::vector<ScalarField> family;
        for (double r : radii) family.push_back(annulus_bump(g, r, hw, power));
        const C2Estimate est = estimate_C2(w, op, family, alphas, sup, workers);

        std::mt19937_64 rng(derive_seed(seed, 0));
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud;
        std::vector<Point> pts(static_cast<std::size_t>(npts));
        for (auto& x : pts) {
            double len = 0.0;
            for (int a = 0; a < dim; ++a) {
                x[a] = nd(rng);
                len += x[a] * x[a];
            }
            const double r = std::pow(ud(rng), 1.0 / dim) / std::sqrt(len);
            for (int a = 0; a < dim; ++a) x[a] *= r;
        }
        const WeightBoundsReport wb = check_weight_bounds(w, theta1, pts);

        Output o;
        header(o, cfg, seed);
        o.comments.push_back("# sup_ratio=" + fmt(est.sup_ratio) + " C3=" + fmt(w.c3()) +
                             " weight_bound_points=" + std::to_string(wb.points) +
                             " weight_bound_violations=" + std::to_string(wb.violations) + " margin=" + fmt(wb.margin));
        o.columns = {"field", "radius", "alpha", "lhs_grad", "lhs_cube", "rhs", "ratio"};
        for (const auto& r : est.per_alpha) {
            o.rows.push_back({std::to_string(r.field), fmt(radii[r.field]), fmt(r.values.alpha), fmt(r.values.lhs_grad),
                              fmt(r.values.lhs_cube), fmt(r.values.rhs), fmt(r.values.ratio)});
        }
        return o;
    };
}

// extend -----------------------------------------------------------------------

Runner plan_extend(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const MeshSpec mesh = read_mesh(p, 1, "dirichlet", 0.01, 0);
    const double L = p.num("L", 1.0);
    require(L > 0.0, "cube side L must be > 0");
    const WindowSpec win = read_window(p);
    const PotentialSpec pot = read_potential(p);
    const double Y = p.num("Y", 1.0);
    require(Y > 0.0, "extension half-height Y must be > 0");
    const long ny = p.integer("ny", 0);
    require(ny >= 0 && ny <= 100000, "ny must be in [0, 1e5]");
    const std::uint64_t seed = p.seed("seed", 0);
    const std::string slices = p.str("slices", "all");
    make_grid(mesh, L);

    return [=](const ExperimentConfig& cfg, unsigned) {
        const Grid g = make_grid(mesh, L);
        const ScalarField v = make_potential(pot, g, derive_seed(seed, 0));
        const DiscreteOperator op = build_schrodinger(g.domain(), g.points_per_axis(), v);
        const SpectralBasis basis = spectrum_below(op, make_window(win));
        if (basis.empty()) throw InvalidArgument("energy window holds no spectrum");
        const ScalarField psi = random_in_range(basis, derive_seed(seed, 2));
        const ExtensionField ext = build_extension(basis, psi, Y, static_cast<int>(ny));
        const ExtensionResidual res = residual(ext, v);
        Output o;
        header(o, cfg, seed);
        o.comments.push_back("# modes=" + std::to_string(basis.size()) + " hy=" + fmt(ext.hy) +
                             " l2_residual=" + fmt(res.l2_residual) + " boundary_error=" + fmt(res.boundary_error));
        for (const auto& w : ext.warnings) o.comments.push_back("# warning=" + w);
        std::vector<std::size_t> chosen;
        if (slices == "all") {
            for (std::size_t m = 0; m < ext.y.size(); ++m) chosen.push_back(m);
        } else if (slices == "zero") {
            chosen.push_back(ext.zero_slice());
        } else {
            for (double m : p.list("slices", "0")) {
                require(m >= 0 && m == std::floor(m) && m < static_cast<double>(ext.y.size()),
                        "slices must be indices into the y grid");
                chosen.push_back(static_cast<std::size_t>(m));
            }
        }
        std::ostringstream body;
        write_extension_csv(body, ext, chosen);
        std::istringstream in(body.str());
        const CsvTable t = read_csv(in);
        o.columns = t.columns;
        o.rows = t.rows;
        return o;
    };
}

// quc-check --------------------------------------------------------------------

Point parse_point(const std::string& key, const std::string& text, int dim) {
    const auto parts = split(text, ',');
    require(static_cast<int>(parts.size()) == dim, "parameter '" + key + "' needs " + std::to_string(dim) + " coordinates");
    Point x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = parse_number(key, parts[static_cast<std::size_t>(a)]);
    return x;
}

/// `ball:c0,c1:r` or `box:lo0,lo1:hi0,hi1`.
Region parse_region(const std::string& key, const std::string& text, int dim) {
    const auto parts = split(text, ':');
    require(parts.size() == 3 && (parts[0] == "ball" || parts[0] == "box"),
            "parameter '" + key + "' must be ball:<center>:<radius> or box:<lo>:<hi>");
    if (parts[0] == "ball") {
        const double r = parse_number(key, parts[2]);
        require(r > 0.0, "parameter '" + key + "' ball radius must be > 0");
        return Ball{parse_point(key, parts[1], dim), r};
    }
    const Box b{parse_point(key, parts[1], dim), parse_point(key, parts[2], dim)};
    for (int a = 0; a < dim; ++a) require(b.lo[a] <= b.hi[a], "parameter '" + key + "' box needs lo <= hi");
    return b;
}

Runner plan_quc(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    const int dim = static_cast<int>(p.integer("dim", 2));
    require(dim >= 1 && dim <= kMaxDim, "dim must be 1, 2 or 3");
    require(p.has("theta") && p.has("G"), "quc-check needs theta and G region descriptors");
    QUCGeometry geo{parse_point("x", p.str("x", dim == 1 ? "0" : dim == 2 ? "0,0" : "0,0,0"), dim),
                    p.num("R", 1.0),
                    p.num("D0", 0.0),
                    p.num("delta", 0.5),
                    parse_region("theta", p.str("theta", ""), dim),
                    parse_region("G", p.str("G", ""), dim)};
    require(geo.delta > 0.0, "small radius delta must be > 0");
    require(geo.D0 >= 0.0, "offset D0 must be >= 0");
    const std::string variant = p.str("variant", "schrodinger");
    require(variant == "schrodinger" || variant == "elliptic", "variant must be schrodinger or elliptic");
    const double mu = p.num("mu", 1.0), t1 = p.num("theta1", 1.0), t2 = p.num("theta2", 0.0);
    require(mu > 0.0, "weight parameter mu must be > 0");
    require(t1 > 0.0, "theta1 must be > 0");
    require(t2 >= 0.0, "theta2 must be >= 0");

    return [=](const ExperimentConfig& cfg, unsigned) {
        const quc::Variant v = variant == "elliptic"
                                   ? quc::Variant{quc::Elliptic{{12.0 * geo.R + 2.0 * geo.D0, t1, t2}, mu, nullptr}}
                                   : quc::Variant{quc::Schrodinger{}};
        const HypothesisReport rep = check_quc_hypotheses(geo, v, dim);
        Output o;
        header(o, cfg, 0);
        std::string failed;
        for (const auto& f : rep.failed_clauses) failed += (failed.empty() ? "" : ";") + f;
        o.comments.push_back("# holds=" + std::string(rep.holds ? "true" : "false") + " C3=" + fmt(rep.c3) +
                             " failed=" + failed);
        o.columns = {"clause", "ok", "lhs", "rhs"};
        for (const auto& cl : rep.clauses)
            o.rows.push_back({csv_field(cl.name), cl.ok ? "true" : "false", fmt(cl.lhs), fmt(cl.rhs)});
        return o;
    };
}

// summary ----------------------------------------------------------------------

Runner plan_summary(const ExperimentConfig& c, const std::set<std::string>& keys) {
    Params p(c, keys);
    require(p.has("inputs"), "summary needs inputs=<csv>[,<csv>...]");
    std::vector<std::string> paths = split(p.str("inputs", ""), ',');
    for (const auto& s : paths) require(!s.empty(), "summary input paths must not be empty");
    return [=](const ExperimentConfig& cfg, unsigned) {
        std::vector<CsvTable> tables;
        for (const auto& path : paths) {
            std::ifstream in(path);
            if (!in) throw InvalidArgument("cannot open summary input '" + path + "'");
            tables.push_back(read_csv(in));
        }
        const CsvTable t = report_summary(tables);
        Output o;
        header(o, cfg, 0);
        o.columns = t.columns;
        o.rows = t.rows;
        return o;
    };
}

const std::map<std::string, Experiment>& registry() {
    static const std::map<std::string, Experiment> reg = [] {
        std::map<std::string, Experiment> r;
        const std::set<std::string> obs_keys =
            with({"L", "delta", "E", "a", "N", "M_d", "seed", "seeds", "arrangement", "jitter", "jitter_seed", "subsamples", "fixture",
                  "monomial_n", "workers"},
                 {kMeshKeys, kPotentialKeys});
        r["spectrum"] = {with({"L", "E", "a", "seed", "workers"}, {kMeshKeys, kPotentialKeys}), nullptr};
        r["sweep"] = {obs_keys, nullptr};
        r["observability"] = {obs_keys, nullptr};
        r["adversarial"] = {with({"L", "delta", "E", "a", "target", "restarts", "iterations", "step", "decay", "seed",
                                  "subsamples", "workers"},
                                 {kMeshKeys, kPotentialKeys}),
                            nullptr};
        r["shannon"] = {{"bandwidth", "truncation", "J_ceiling", "jitter", "seed", "fixture", "shifts", "coefficients",
                         "xmin", "xmax", "points", "workers"},
                        nullptr};
        r["carleman"] = {{"dim", "n", "L", "bc", "mu", "theta1", "alphas", "radii", "half_width", "power", "rho_in",
                          "rho_out", "points", "seed", "workers"},
                         nullptr};
        r["extend"] = {with({"L", "E", "a", "Y", "ny", "seed", "slices", "workers"}, {kMeshKeys, kPotentialKeys}),
                       nullptr};
        r["quc-check"] = {{"dim", "x", "R", "D0", "delta", "theta", "G", "variant", "mu", "theta1", "theta2", "workers"},
                          nullptr};
        r["summary"] = {{"inputs", "workers"}, nullptr};

        r["spectrum"].plan = [k = r["spectrum"].keys](const ExperimentConfig& c) { return plan_spectrum(c, k); };
        r["sweep"].plan = [k = obs_keys](const ExperimentConfig& c) { return plan_sweep(c, k, false); };
        r["observability"].plan = [k = obs_keys](const ExperimentConfig& c) { return plan_sweep(c, k, true); };
        r["adversarial"].plan = [k = r["adversarial"].keys](const ExperimentConfig& c) { return plan_adversarial(c, k); };
        r["shannon"].plan = [k = r["shannon"].keys](const ExperimentConfig& c) { return plan_shannon(c, k); };
        r["carleman"].plan = [k = r["carleman"].keys](const ExperimentConfig& c) { return plan_carleman(c, k); };
        r["extend"].plan = [k = r["extend"].keys](const ExperimentConfig& c) { return plan_extend(c, k); };
        r["quc-check"].plan = [k = r["quc-check"].keys](const ExperimentConfig& c) { return plan_quc(c, k); };
        r["summary"].plan = [k = r["summary"].keys](const ExperimentConfig& c) { return plan_summary(c, k); };
        return r;
    }();
    return reg;
}

const Experiment& lookup(const std::string& name) {
    const auto& reg = registry();
    const auto it = reg.find(name);
    if (it == reg.end()) {
        std::string known;
        for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown experiment '" + name + "' (expected one of " + known + ")");
    }
    return it->second;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        if (key == "experiment") c.experiment = value;
        else if (key == "output") c.output = value;
        else c.params[key] = value;
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("override must be key=value (got '" + assignment + "')");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key == "experiment") config.experiment = value;
    else if (key == "output") config.output = value;
    else config.params[key] = value;
}

unsigned resolve_workers(const ExperimentConfig& config) {
    auto parse = [](const std::string& what, const std::string& text) {
        const double v = parse_number(what, text);
        if (v < 1 || v != std::floor(v) || v > 4096) throw InvalidArgument(what + " must be an integer in [1, 4096]");
        return static_cast<unsigned>(v);
    };
    if (const auto it = config.params.find("workers"); it != config.params.end()) return parse("workers", it->second);
    if (const char* env = std::getenv("UCPLAB_WORKERS"); env && *env) return parse("UCPLAB_WORKERS", env);
    return std::max(1u, std::thread::hardware_concurrency());
}

void validate(const ExperimentConfig& config) {
    const Experiment& e = lookup(config.experiment);
    resolve_workers(config);
    e.plan(config);
}

void run(const ExperimentConfig& config, std::ostream& out) {
    const Experiment& e = lookup(config.experiment);
    const unsigned workers = resolve_workers(config);
    const Runner runner = e.plan(config);
    const Output o = runner(config, workers);
    if (config.output.empty() || config.output == "-") {
        emit(out, o);
        return;
    }
    std::ofstream file(config.output);
    if (!file) throw InvalidArgument("cannot open output file '" + config.output + "'");
    emit(file, o);
    for (const auto& [suffix, text] : o.sidecars) {
        std::ofstream side(config.output + suffix);
        if (!side) throw InvalidArgument("cannot open output file '" + config.output + suffix + "'");
        side << text;
    }
}

std::string run_to_string(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.output.clear();
    std::ostringstream out;
    run(c, out);
    return out.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidArgument("CSV is missing column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    auto parse_line = [](const std::string& l) {
        std::vector<std::string> cells;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < l.size(); ++i) {
            const char ch = l[i];
            if (quoted) {
                if (ch == '"' && i + 1 < l.size() && l[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cur += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        cells.push_back(cur);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line);
            continue;
        }
        if (!have_header) {
            t.columns = parse_line(line);
            have_header = true;
            continue;
        }
        auto cells = parse_line(line);
        if (cells.size() != t.columns.size()) throw InvalidArgument("CSV row has " + std::to_string(cells.size()) +
                                                                    " cells, header has " +
                                                                    std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (const auto& c : table.comments) out << c << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_field(table.columns[i]);
    out << '\n';
    for (const auto& r : table.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
        out << '\n';
    }
}

CsvTable report_summary(const std::vector<CsvTable>& inputs) {
    static const std::vector<std::string> needed = {"L", "delta", "E", "K", "ratio", "lambda_min"};
    if (inputs.empty()) throw InvalidArgument("summary needs at least one input table");
    struct Sample {
        double L, delta, E, K, ratio, lmin;
    };
    std::vector<Sample> samples;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const CsvTable& in = inputs[t];
        std::vector<std::string> missing;
        for (const auto& n : needed)
            if (std::find(in.columns.begin(), in.columns.end(), n) == in.columns.end()) missing.push_back(n);
        if (!missing.empty()) {
            std::string m;
            for (const auto& s : missing) m += (m.empty() ? "" : ", ") + s;
            throw InvalidArgument("summary input " + std::to_string(t + 1) + " is missing columns: " + m);
        }
        const bool has_error = std::find(in.columns.begin(), in.columns.end(), "error") != in.columns.end();
        for (const auto& r : in.rows) {
            if (has_error && !r[in.column("error")].empty()) continue;
            auto num = [&](const std::string& c) { return std::strtod(r[in.column(c)].c_str(), nullptr); };
            samples.push_back({num("L"), num("delta"), num("E"), num("K"), num("ratio"), num("lambda_min")});
        }
    }

    CsvTable out;
    out.columns = {"group", "L", "E", "K", "rows", "ratio_min", "ratio_max", "lambda_min_min", "lambda_min_max",
                   "slope", "r2"};
    auto summarise = [&](const std::string& name, const std::vector<Sample>& g, bool keyed) {
        double rmin = INFINITY, rmax = -INFINITY, lmin = INFINITY, lmax = -INFINITY;
        for (const auto& s : g) {
            rmin = std::min(rmin, s.ratio);
            rmax = std::max(rmax, s.ratio);
            lmin = std::min(lmin, s.lmin);
            lmax = std::max(lmax, s.lmin);
        }
        std::string slope, r2;
        std::vector<ScaleSample> fit;
        std::set<double> deltas;
        for (const auto& s : g) {
            fit.push_back({s.delta, s.lmin});
            deltas.insert(s.delta);
        }
        if (keyed && deltas.size() >= 4) {
            try {
                const ExponentFit e = fit_exponent(fit);
                slope = fmt(e.slope);
                r2 = fmt(e.r2);
            } catch (const InvalidArgument&) {
            }
        }
        const Sample& f = g.front();
        out.rows.push_back({name, keyed ? fmt(f.L) : "", keyed ? fmt(f.E) : "", keyed ? fmt(f.K) : "",
                            std::to_string(g.size()), fmt(rmin), fmt(rmax), fmt(lmin), fmt(lmax), slope, r2});
    };

    std::map<std::tuple<double, double, double>, std::vector<Sample>> groups;
    for (const auto& s : samples) groups[{s.L, s.E, s.K}].push_back(s);
    for (const auto& [key, g] : groups) summarise("L_E_K", g, true);
    if (!samples.empty()) summarise("ALL", samples, false);
    return out;
}

}  // namespace ucplab
