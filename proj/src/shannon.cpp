#include "ucplab/shannon.hpp"

#include "ucplab/error.hpp"
#include "ucplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace ucplab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Reduced to the nearest integer k so that t - k is exact near the zeros.
double sin_pi(double t) {
    const double k = std::round(t);
    const double s = std::sin(std::numbers::pi * (t - k));
    return std::fmod(k, 2.0) == 0.0 ? s : -s;
}

void require_bandwidth(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("bandwidth K must be > 0");
}

double side_tail(const std::vector<double>& s, int J, int direction) {
    const int w = std::max(1, J / 10);
    auto at = [&](int j) { return std::abs(s[static_cast<std::size_t>(direction * j + J)]); };
    const double last = at(J);
    if (last == 0.0) return 0.0;
    if (J - w < 0) return kInf;
    const double prev = at(J - w);
    if (!(prev > last)) return kInf;
    const double q = std::pow(last / prev, 1.0 / w);
    return last * q / (1.0 - q);
}

double roundoff_floor(const SamplingProblem& p) {
    double sum = 0.0;
    for (double v : p.samples) sum += std::abs(v);
    return 16.0 * kEps * sum;
}

double tail_only(const SamplingProblem& p) { return side_tail(p.samples, p.J, 1) + side_tail(p.samples, p.J, -1); }

}  // namespace

double sinc(double t) {
    if (t == 0.0) return 1.0;
    return sin_pi(t) / (std::numbers::pi * t);
}

SamplingProblem make_sampling_problem(const RealFunction& f, double bandwidth, int J, std::vector<double> jitter) {
    require_bandwidth(bandwidth);
    if (J < 1) throw InvalidArgument("truncation J must be >= 1");
    const auto count = static_cast<std::size_t>(2 * J + 1);
    if (!jitter.empty() && jitter.size() != count) throw DimensionError("jitter needs one offset per |j| <= J");
    SamplingProblem p{bandwidth, J, std::vector<double>(count), std::move(jitter)};
    for (int j = -J; j <= J; ++j) {
        const auto k = static_cast<std::size_t>(j + J);
        const double node = (j + (p.jitter.empty() ? 0.0 : p.jitter[k])) / bandwidth;
        const double v = f(node);
        if (!std::isfinite(v)) throw InvalidArgument("samples must be finite");
        p.samples[k] = v;
    }
    return p;
}

std::vector<double> random_jitter(int J, double amplitude, std::uint64_t seed) {
    if (J < 1) throw InvalidArgument("truncation J must be >= 1");
    if (!(amplitude >= 0.0 && amplitude < 0.5)) throw InvalidArgument("jitter amplitude must be in [0, 1/2)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::vector<double> out(static_cast<std::size_t>(2 * J + 1));
    for (auto& v : out) v = amplitude > 0.0 ? u(rng) : 0.0;
    return out;
}

double reconstruct(const SamplingProblem& problem, double x) {
    const double t = problem.bandwidth * x;
    if (t == std::round(t)) {
        const double j = std::round(t);
        return std::abs(j) <= problem.J ? problem.sample(static_cast<int>(j)) : 0.0;
    }
    // sin(pi (t - j)) = (-1)^j sin(pi t)
    double sum = 0.0;
    for (int j = -problem.J; j <= problem.J; ++j) {
        const double term = problem.sample(j) / (t - j);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sin_pi(t) / std::numbers::pi * sum;
}

std::vector<double> reconstruct(const SamplingProblem& problem, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return reconstruct(problem, x); });
    return out;
}

TailIntegral aliasing_bound(const RealFunction& fhat_abs, double bandwidth, double rel_tol) {
    require_bandwidth(bandwidth);
    const double a = std::numbers::pi * bandwidth;
    auto right = [&](double p) { return std::abs(fhat_abs(p)); };
    auto left = [&](double p) { return std::abs(fhat_abs(-p)); };
    const QuadratureResult r = gauss_kronrod_tail(right, a, 0.0, rel_tol);
    const QuadratureResult l = gauss_kronrod_tail(left, a, 0.0, rel_tol);
    if (!r.converged || !l.converged) {
        throw ConvergenceError("aliasing tail quadrature did not converge (divergent tail?)",
                               std::max(r.error_estimate, l.error_estimate));
    }
    const double c = std::sqrt(2.0 / std::numbers::pi);
    return {c * (r.value + l.value), c * (r.error_estimate + l.error_estimate)};
}

double aliasing_bound(std::span<const double> p, std::span<const double> fhat_abs, double bandwidth) {
    require_bandwidth(bandwidth);
    if (p.size() != fhat_abs.size() || p.size() < 2) throw DimensionError("tail table needs matching p and |fhat| columns");
    if (!std::is_sorted(p.begin(), p.end())) throw InvalidArgument("tail table p must be ascending");
    const double a = std::numbers::pi * bandwidth;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        const double p0 = p[k], p1 = p[k + 1];
        if (p1 <= p0) continue;
        const double v0 = std::abs(fhat_abs[k]), v1 = std::abs(fhat_abs[k + 1]);
        auto lerp = [&](double q) { return v0 + (v1 - v0) * (q - p0) / (p1 - p0); };
        // pieces of [p0, p1] with |q| > a
        for (const auto& [lo, hi] : {std::pair{std::max(p0, a), p1}, std::pair{p0, std::min(p1, -a)}}) {
            if (hi > lo) total += 0.5 * (hi - lo) * (lerp(lo) + lerp(hi));
        }
    }
    return std::sqrt(2.0 / std::numbers::pi) * total;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

double truncation_allowance(const SamplingProblem& problem) { return tail_only(problem) + roundoff_floor(problem); }

AliasingReport verify_aliasing(const RealFunction& f, const RealFunction& fhat_abs, double bandwidth,
                               std::span<const double> xs, int J0, const AliasingOptions& options) {
    require_bandwidth(bandwidth);
    if (J0 < 1) throw InvalidArgument("truncation J must be >= 1");
    if (options.J_ceiling < J0) throw InvalidArgument("J ceiling must be >= the starting truncation");
    if (xs.empty()) throw InvalidArgument("evaluation grid is empty");

    AliasingReport rep;
    rep.bound = aliasing_bound(fhat_abs, bandwidth).value;
    int J = J0;
    auto build = [&](int j) {
        std::vector<double> jit;
        if (options.jitter_amplitude > 0.0) jit = random_jitter(j, options.jitter_amplitude, options.jitter_seed);
        return make_sampling_problem(f, bandwidth, j, std::move(jit));
    };
    SamplingProblem prob = build(J);
    bool budget_met = false;
    for (;;) {
        const double tail = tail_only(prob);
        if (tail <= 0.1 * rep.bound || tail <= roundoff_floor(prob)) {
            budget_met = true;
            break;
        }
        if (J >= options.J_ceiling) break;
        J = static_cast<int>(std::min<long>(2L * J, options.J_ceiling));
        prob = build(J);
    }
    rep.J_used = J;
    rep.truncation_allowance = truncation_allowance(prob);
    for (double x : xs) rep.sup_error = std::max(rep.sup_error, std::abs(f(x) - reconstruct(prob, x)));

    if (!budget_met) {
        rep.verdict = Verdict::Inconclusive;
        rep.notice = "J ceiling reached before the truncation estimate fell below 10% of the bound";
    } else if (rep.sup_error <= rep.bound + rep.truncation_allowance) {
        rep.verdict = Verdict::Holds;
    } else {
        rep.verdict = Verdict::Violated;
    }
    return rep;
}

RealFunction sinc_span(double bandwidth, std::vector<double> shifts, std::vector<double> coefficients) {
    require_bandwidth(bandwidth);
    if (shifts.size() != coefficients.size()) throw DimensionError("sinc span needs one coefficient per shift");
    return [bandwidth, shifts = std::move(shifts), c = std::move(coefficients)](double x) {
        double s = 0.0;
        for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * sinc(bandwidth * x - shifts[m]);
        return s;
    };
}

void write_reconstruction_csv(std::ostream& out, std::span<const double> xs, const RealFunction& f,
                              const SamplingProblem& problem) {
    out << "x,f,S_K f,error\n";
    out.precision(17);
    for (double x : xs) {
        const double fx = f(x);
        const double sx = reconstruct(problem, x);
        out << x << ',' << fx << ',' << sx << ',' << fx - sx << '\n';
    }
}

}  // namespace ucplab
