#include "optrace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "optrace/error.hpp"

namespace optrace::quad {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double l1;

    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment evaluate(const Integrand& f, double a, double b, std::size_t& evals) {
    // One Gauss-Kronrod pair on [-1, 1]; value, error and L1 are scaled here
    // because the library leaves the leaf error unscaled.
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const auto g = [&](double x) { return f(mid + half * x); };
    double err = 0.0;
    double l1 = 0.0;
    const double v = half * Rule::integrate(g, -1.0, 1.0, 0, 0.0, &err, &l1);
    evals += 21;
    if (!std::isfinite(v) || !std::isfinite(err)) {
        std::ostringstream d;
        d << "interval=[" << a << ", " << b << "]";
        throw NumericalError("non-finite integrand value", d.str());
    }
    return {a, b, v, half * err, half * l1};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 const Options& opt) {
    if (!(a < b)) {
        if (a == b) return Result{0.0, 0.0, 0.0, 0, 0, true};
        Result r = integrate(f, b, a, breakpoints, opt);
        r.value = -r.value;
        return r;
    }

    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment> heap;
    Result res;
    double total = 0.0;
    double total_err = 0.0;
    double total_l1 = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        Segment s = evaluate(f, cuts[i - 1], cuts[i], res.evaluations);
        total += s.value;
        total_err += s.error;
        total_l1 += s.l1;
        heap.push(s);
    }

    auto tolerance = [&] {
        return std::max({opt.abs_tol, opt.rel_tol * std::abs(total), opt.l1_rel_tol * total_l1});
    };

    while (total_err > tolerance() && heap.size() < opt.max_intervals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
        heap.pop();
        Segment left = evaluate(f, worst.a, mid, res.evaluations);
        Segment right = evaluate(f, mid, worst.b, res.evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed accumulated cancellation in the running totals.
    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    total = 0.0;
    total_err = 0.0;
    total_l1 = 0.0;
    for (const auto& s : segs) {
        total += s.value;
        total_err += s.error;
        total_l1 += s.l1;
    }

    res.value = total;
    res.error = total_err;
    res.l1 = total_l1;
    res.intervals = segs.size();
    res.converged = total_err <= tolerance();

    if (!res.converged && opt.throw_on_failure) {
        const auto worst = std::max_element(
            segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.error < y.error; });
        std::ostringstream d;
        d << "range=[" << a << ", " << b << "] value=" << total << " error=" << total_err
          << " tolerance=" << tolerance() << " intervals=" << segs.size() << " worst=[" << worst->a
          << ", " << worst->b << "] worst_error=" << worst->error;
        throw NumericalError("adaptive quadrature did not converge", d.str());
    }
    return res;
}

Result integrate(const Integrand& f, double a, double b, const Options& opt) {
    return integrate(f, a, b, std::span<const double>{}, opt);
}

}  // namespace optrace::quad
