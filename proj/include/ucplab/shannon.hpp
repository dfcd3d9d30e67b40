#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ucplab {

using RealFunction = std::function<double(double)>;

/// sin(pi t) / (pi t), 1 at t = 0.
double sinc(double t);

/// Samples f((j + eps_j)/K), |j| <= J, reconstructed as if taken at j/K.
struct SamplingProblem {
    double bandwidth;
    int J;
    std::vector<double> samples;  ///< index j + J
    std::vector<double> jitter;   ///< eps_j (index j + J); empty for exact nodes

    double sample(int j) const { return samples.at(static_cast<std::size_t>(j + J)); }
};

SamplingProblem make_sampling_problem(const RealFunction& f, double bandwidth, int J,
                                      std::vector<double> jitter = {});

/// Offsets uniform in [-amplitude, amplitude] for |j| <= J.
std::vector<double> random_jitter(int J, double amplitude, std::uint64_t seed);

/// (S_K f)(x) = sum_{|j| <= J} f_j sinc(K x - j); exact sample at K x = j.
double reconstruct(const SamplingProblem& problem, double x);
std::vector<double> reconstruct(const SamplingProblem& problem, std::span<const double> xs);

struct TailIntegral {
    double value;
    double error_estimate;
};

/// sqrt(2/pi) * int_{|p| > pi K} |fhat(p)| dp, to 1e-10 relative. Throws ConvergenceError
/// when the tail quadrature does not converge (divergent tail).
TailIntegral aliasing_bound(const RealFunction& fhat_abs, double bandwidth, double rel_tol = 1e-10);

/// Tabulated |fhat| (ascending p, both signs allowed), zero outside the table; trapezoid
/// rule over the part with |p| > pi K.
double aliasing_bound(std::span<const double> p, std::span<const double> fhat_abs, double bandwidth);

enum class Verdict { Holds, Violated, Inconclusive };
const char* to_string(Verdict v);

struct AliasingOptions {
    int J_ceiling = 100000;
    /// Jitter amplitude (in units of 1/K) and seed; 0 samples the exact nodes.
    double jitter_amplitude = 0.0;
    std::uint64_t jitter_seed = 0;
};

struct AliasingReport {
    double sup_error = 0.0;
    double bound = 0.0;
    double truncation_allowance = 0.0;
    int J_used = 0;
    Verdict verdict = Verdict::Inconclusive;
    std::string notice;
};

/// Conservative estimate of the dropped terms sum_{|j| > J} |f_j|, geometric majorisation
/// from the last decade of samples on each side, plus a round-off floor.
double truncation_allowance(const SamplingProblem& problem);

/// Holds iff sup over xs of |f - S_K f| <= bound + allowance, with J doubled from J0 until the
/// allowance is at most 10% of the bound. Reaching the ceiling gives Inconclusive.
AliasingReport verify_aliasing(const RealFunction& f, const RealFunction& fhat_abs, double bandwidth,
                               std::span<const double> xs, int J0, const AliasingOptions& options = {});

/// f(x) = sum_m c_m sinc(K x - shift_m): band-limited to [-pi K, pi K].
RealFunction sinc_span(double bandwidth, std::vector<double> shifts, std::vector<double> coefficients);

/// Rows `x,f,S_K f,error`.
void write_reconstruction_csv(std::ostream& out, std::span<const double> xs, const RealFunction& f,
                              const SamplingProblem& problem);

}  // namespace ucplab
