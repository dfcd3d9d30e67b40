#include "ucplab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace ucplab {

namespace {

struct SimpsonState {
    const Integrand& f;
    long evaluations = 0;
    bool converged = true;
};

double simpson(double a, double fa, double b, double fb, double fm) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_recurse(SimpsonState& st, double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    st.evaluations += 2;
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0) {
        st.converged = false;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// Kronrod 15-point nodes/weights with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const Integrand& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kWgk[7];
    double g = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double x = h * kXgk[i];
        const double fsum = f(c - x) + f(c + x);
        k += kWgk[i] * fsum;
        if (i % 2 == 1) g += kWg[i / 2] * fsum;
    }
    evals += 15;
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, double tol, int max_depth) {
    QuadratureResult r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    SimpsonState st{f};
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    st.evaluations = 3;
    const double whole = simpson(a, fa, b, fb, fm);
    r.value = simpson_recurse(st, a, fa, b, fb, m, fm, whole, tol, max_depth);
    r.evaluations = st.evaluations;
    r.converged = st.converged;
    r.error_estimate = tol;
    return r;
}

QuadratureResult gauss_kronrod(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                               int max_intervals) {
    QuadratureResult r;
    std::priority_queue<Segment> heap;
    heap.push(kronrod(f, a, b, r.evaluations));
    double value = heap.top().value;
    double error = heap.top().error;
    int intervals = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
        const Segment s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        const Segment l = kronrod(f, s.a, m, r.evaluations);
        const Segment rr = kronrod(f, m, s.b, r.evaluations);
        value += l.value + rr.value - s.value;
        error += l.error + rr.error - s.error;
        heap.push(l);
        heap.push(rr);
        ++intervals;
    }
    // Re-sum to shed the drift of the running totals.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    r.value = value;
    r.error_estimate = error;
    r.converged = std::isfinite(value) && error <= std::max(abs_tol, rel_tol * std::abs(value));
    return r;
}

QuadratureResult gauss_kronrod_tail(const Integrand& f, double a, double abs_tol, double rel_tol, int max_intervals) {
    auto mapped = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double s = 1.0 - t;
        const double v = f(a + t / s);
        return v == 0.0 ? 0.0 : v / (s * s);
    };
    return gauss_kronrod(mapped, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

}  // namespace ucplab
