#include "optrace/modality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "optrace/analytic.hpp"
#include "optrace/error.hpp"
#include "optrace/rng.hpp"

namespace optrace::modality {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kFitBootstrapStream = 3;

double legendre(int k, double t) {
    if (k == 0) return 1.0;
    double p0 = 1.0, p1 = t;
    for (int n = 1; n < k; ++n) {
        const double p2 = ((2.0 * n + 1.0) * t * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// Antiderivative of P_k vanishing at t = -1 up to a constant.
double legendre_integral(int k, double t) {
    if (k == 0) return t;
    return (legendre(k + 1, t) - legendre(k - 1, t)) / (2.0 * k + 1.0);
}

double legendre_d2_at_zero(int k) {
    // P_k''(0) for even k: from P_k(t) = sum c_j t^j, the t^2 coefficient times 2.
    switch (k) {
        case 0: return 0.0;
        case 2: return 3.0;
        case 4: return -7.5;
        case 6: return 13.125;
        case 8: return -19.6875;
    }
    throw ValidationError("projection order must be an even number <= 8");
}

// Per-bin weights L_i of the linear curvature and center-density statistics.
struct Projection {
    std::size_t first = 0;
    std::vector<double> curv;
    std::vector<double> dens;
    double window = 0.0;
};

Projection make_projection(std::size_t bins, double window, int order) {
    if (!(window > 0.0 && window <= 0.5)) throw ValidationError("window must lie in (0, 0.5]");
    if (order < 2 || order % 2 != 0) throw ValidationError("projection order must be even and >= 2");
    legendre_d2_at_zero(order);
    const double width = 1.0 / static_cast<double>(bins);
    // Bins whose centers fall within the window; symmetric about 1/2.
    std::size_t first = bins;
    for (std::size_t i = 0; i < bins; ++i) {
        const double c = (static_cast<double>(i) + 0.5) * width;
        if (std::abs(c - 0.5) <= window + 1e-12) {
            first = i;
            break;
        }
    }
    const std::size_t last = bins - 1 - first;
    if (first >= bins || last < first + 2) throw ValidationError("window spans fewer than three bins");
    Projection p;
    p.first = first;
    p.window = 0.5 - static_cast<double>(first) * width;
    const double h = p.window;
    const std::size_t n = last - first + 1;
    p.curv.assign(n, 0.0);
    p.dens.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = (static_cast<double>(first + j) * width - 0.5) / h;
        const double b = (static_cast<double>(first + j + 1) * width - 0.5) / h;
        for (int k = 0; k <= order; k += 2) {
            const double avg = (legendre_integral(k, b) - legendre_integral(k, a)) / (b - a);
            const double c = 0.5 * (2.0 * k + 1.0) * avg;
            p.curv[j] += c * legendre_d2_at_zero(k) / (h * h * h);
            p.dens[j] += c * legendre(k, 0.0) / h;
        }
    }
    return p;
}

std::vector<double> symmetrized_density(const Histogram& hist) {
    if (hist.n_paths() == 0) throw ValidationError("empty histogram");
    const auto& c = hist.counts();
    const std::size_t b = c.size();
    const double scale = 1.0 / (static_cast<double>(hist.n_paths()) * hist.bin_width());
    std::vector<double> d(b);
    for (std::size_t i = 0; i < b; ++i) {
        d[i] = 0.5 * (static_cast<double>(c[i]) + static_cast<double>(c[b - 1 - i])) * scale;
    }
    return d;
}

DensityCurve coarse_curve(const Histogram& hist, std::size_t coarse_bins) {
    const auto fine = symmetrized_density(hist);
    const std::size_t b = fine.size();
    if (coarse_bins < 2 || coarse_bins > b) coarse_bins = b;
    std::vector<double> mass(coarse_bins, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t k = std::min(coarse_bins - 1, i * coarse_bins / b);
        mass[k] += fine[i] * hist.bin_width();
    }
    std::vector<double> grid(coarse_bins), v(coarse_bins);
    const double w = 1.0 / static_cast<double>(coarse_bins);
    for (std::size_t k = 0; k < coarse_bins; ++k) {
        grid[k] = (static_cast<double>(k) + 0.5) * w;
        v[k] = mass[k] / w;
    }
    for (std::size_t k = 0; k < coarse_bins / 2; ++k) {
        const double m = 0.5 * (v[k] + v[coarse_bins - 1 - k]);
        v[k] = v[coarse_bins - 1 - k] = m;
    }
    CurveMeta meta;
    meta.provenance = Provenance::mc;
    meta.set("paths", static_cast<double>(hist.n_paths()));
    meta.set("seed", std::to_string(hist.seed));
    return DensityCurve(std::move(grid), std::move(v), std::move(meta), NormRule::midpoint(w));
}

double interior_sup_change(const DensityCurve& a, const DensityCurve& b) {
    if (a.size() != b.size()) return kNaN;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = a.grid()[i];
        if (w < 0.1 || w > 0.9) continue;
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    }
    return worst;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct LineFit {
    double b0 = 0.0;
    double b1 = 0.0;
};

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& s,
                      double x0) {
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (s[i] * s[i]);
        const double xi = x[i] - x0;
        sw += w;
        sx += w * xi;
        sy += w * y[i];
        sxx += w * xi * xi;
        sxy += w * xi * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) return {kNaN, kNaN};
    return {(sxx * sy - sx * sxy) / det, (sw * sxy - sx * sy) / det};
}

}  // namespace

// ---------------------------------------------------------------------------

ModalityReport classify(const DensityCurve& curve, const ClassifyOptions& opt) {
    const auto& g = curve.grid();
    const auto& v = curve.values();
    if (g.size() < 3) throw ValidationError("curve needs at least three points");
    const double peak = *std::max_element(v.begin(), v.end());
    if (!(peak > 0.0)) throw ValidationError("curve has no positive values");
    if (curve.max_asymmetry() > opt.symmetry_tol * peak) {
        throw ContractError("classification requires a curve symmetric under w -> 1 - w");
    }
    if (g.front() > 0.5 || g.back() < 0.5) throw DomainError("curve does not cover w = 1/2");

    ModalityReport r;
    double lo = kInf, hi = -kInf, sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0.2 || g[i] > 0.8) continue;
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
        sum += v[i];
        ++cnt;
    }
    r.plateau_spread = cnt ? (hi - lo) / (sum / static_cast<double>(cnt)) : kNaN;

    double spacing = kInf;
    for (std::size_t i = 1; i < g.size(); ++i) spacing = std::min(spacing, g[i] - g[i - 1]);
    const double d = std::max(opt.delta, spacing);
    const double center = curve.at(0.5);
    if (0.5 + d <= g.back()) r.center_curvature = curve.at(0.5 + d) + curve.at(0.5 - d) - 2.0 * center;

    if (cnt && r.plateau_spread <= opt.plateau_eps) {
        r.cls = ModalityClass::uniform_plateau;
        return r;
    }

    std::size_t arg = g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0.5) continue;
        if (arg == g.size() || v[i] > v[arg]) arg = i;
    }
    const double prominence = (v[arg] - center) / peak;
    if (prominence <= opt.prominence_eps) {
        r.cls = ModalityClass::unimodal;
        r.mode_locations = {0.5};
        r.prominences = {1.0 - (peak - center) / peak};
        return r;
    }
    const double w_star = g[arg];
    const double edge_drop = (v[arg] - v.back()) / peak;
    r.cls = edge_drop <= opt.prominence_eps ? ModalityClass::bimodal_U : ModalityClass::bimodal_M;
    r.mode_locations = {1.0 - w_star, w_star};
    r.prominences = {prominence, prominence};
    return r;
}

Family european_family(CorrelationScale chi) {
    return [chi](double alpha, double w) {
        return analytic::correlated_european_weight_density(w, EffectiveMaturity(alpha), chi);
    };
}

Family asian_mu0_family() {
    return [](double alpha, double w) { return analytic::asian_mu0_weight_density(w, EffectiveMaturity(alpha)); };
}

double center_curvature(const Family& family, double alpha, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("delta must lie in (0, 1/2)");
    const double c = family(alpha, 0.5);
    const auto second = [&](double h) { return family(alpha, 0.5 + h) + family(alpha, 0.5 - h) - 2.0 * c; };
    return (16.0 * second(0.5 * delta) - second(delta)) / (3.0 * delta * delta);
}

CriticalResult critical_maturity(const Family& family, double lo, double hi, double tol, double delta) {
    if (!(lo > 0.0 && hi > lo)) throw ValidationError("bracket must satisfy 0 < lo < hi");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    CriticalResult r;
    r.delta = delta;
    double s_lo = sign_of(center_curvature(family, lo, delta));
    const double s_hi = sign_of(center_curvature(family, hi, delta));
    r.lo = lo;
    r.hi = hi;
    if (s_lo == 0.0) {
        r.alpha_c = lo;
        return r;
    }
    if (s_hi == 0.0) {
        r.alpha_c = hi;
        return r;
    }
    if (s_lo == s_hi) return r;
    while (r.hi - r.lo > tol && r.iterations < 200) {
        const double mid = 0.5 * (r.lo + r.hi);
        const double s = sign_of(center_curvature(family, mid, delta));
        ++r.iterations;
        if (s == 0.0) {
            r.lo = r.hi = mid;
            break;
        }
        if (s == s_lo) {
            r.lo = mid;
        } else {
            r.hi = mid;
        }
    }
    r.alpha_c = 0.5 * (r.lo + r.hi);
    return r;
}

// ---------------------------------------------------------------------------

DensityCurve smoothed_curve(const Histogram& hist, double bandwidth) {
    if (!(bandwidth >= 0.0)) throw ValidationError("bandwidth must be >= 0");
    const auto d = symmetrized_density(hist);
    const auto x = hist.centers();
    const std::size_t b = d.size();
    std::vector<double> v(b);
    if (bandwidth == 0.0) {
        v = d;
    } else {
        const double width = hist.bin_width();
        const double norm = width / (bandwidth * std::sqrt(2.0 * M_PI));
        const auto k = [&](double z) { return std::exp(-0.5 * z * z / (bandwidth * bandwidth)); };
        for (std::size_t i = 0; i < b; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < b; ++j) {
                if (d[j] == 0.0) continue;
                s += d[j] * (k(x[i] - x[j]) + k(x[i] + x[j]) + k(x[i] - 2.0 + x[j]));
            }
            v[i] = s * norm;
        }
        for (std::size_t i = 0; i < b / 2; ++i) v[i] = v[b - 1 - i] = 0.5 * (v[i] + v[b - 1 - i]);
    }
    CurveMeta meta;
    meta.provenance = Provenance::mc;
    meta.set("paths", static_cast<double>(hist.n_paths()));
    meta.set("seed", std::to_string(hist.seed));
    meta.set("bandwidth", bandwidth);
    return DensityCurve(x, std::move(v), std::move(meta), NormRule::midpoint(hist.bin_width()));
}

CurvatureEstimate histogram_curvature(const Histogram& hist, double window, int order) {
    if (hist.n_paths() == 0) throw ValidationError("empty histogram");
    const auto p = make_projection(hist.bins(), window, order);
    const double n = static_cast<double>(hist.n_paths());
    double m1 = 0.0, m2 = 0.0, dens = 0.0;
    for (std::size_t j = 0; j < p.curv.size(); ++j) {
        const double q = static_cast<double>(hist.counts()[p.first + j]) / n;
        m1 += p.curv[j] * q;
        m2 += p.curv[j] * p.curv[j] * q;
        dens += p.dens[j] * q;
    }
    CurvatureEstimate e;
    e.value = m1;
    e.std_error = std::sqrt(std::max(0.0, m2 - m1 * m1) / n);
    e.center_density = dens;
    e.window = p.window;
    e.order = order;
    return e;
}

double projected_curvature(const std::vector<double>& bin_probabilities, double window, int order) {
    const auto p = make_projection(bin_probabilities.size(), window, order);
    double m = 0.0;
    for (std::size_t j = 0; j < p.curv.size(); ++j) m += p.curv[j] * bin_probabilities[p.first + j];
    return m;
}

std::string to_string(McCriticalResult::Status s) {
    switch (s) {
        case McCriticalResult::Status::found: return "found";
        case McCriticalResult::Status::no_transition: return "no_transition";
        case McCriticalResult::Status::inconclusive: return "inconclusive";
    }
    return "unknown";
}

McProbe mc_probe(double mu, const CorrelationScale& chi, double alpha, const McBudget& budget) {
    auto cfg = mc::config_for_alpha(alpha, mu, chi, budget.paths, budget.seed, budget.dt, budget.max_steps);
    cfg.bins = budget.bins;
    cfg.threads = budget.threads;
    const Histogram h = mc::run_race(cfg, mc::Style::asian);
    return {alpha, cfg.n_steps, histogram_curvature(h, budget.window, budget.order)};
}

McCriticalResult critical_maturity_mc(double mu, const CorrelationScale& chi, const McBudget& budget) {
    if (!(budget.alpha_lo > 0.0 && budget.alpha_hi > budget.alpha_lo)) {
        throw ValidationError("alpha bracket must satisfy 0 < lo < hi");
    }
    if (!(budget.tol > 0.0)) throw ValidationError("tolerance must be positive");
    McCriticalResult r;
    const auto z = [&](const McProbe& p) { return p.curvature.value / p.curvature.std_error; };
    const auto probe = [&](double a) {
        r.probes.push_back(mc_probe(mu, chi, a, budget));
        return r.probes.back();
    };
    const McProbe p_lo = probe(budget.alpha_lo);
    const McProbe p_hi = probe(budget.alpha_hi);
    r.window = p_lo.curvature.window;
    if (!(z(p_lo) < -budget.z_sign)) return r;
    if (z(p_hi) < -budget.z_sign) {
        r.status = McCriticalResult::Status::no_transition;
        return r;
    }
    if (!(z(p_hi) > budget.z_sign)) return r;

    double lo = budget.alpha_lo, hi = budget.alpha_hi;
    std::optional<double> unresolved;
    const int fit_probes = 4;
    while (hi - lo > budget.tol && static_cast<int>(r.probes.size()) < budget.max_probes - fit_probes) {
        const double mid = 0.5 * (lo + hi);
        const McProbe p = probe(mid);
        if (z(p) < -budget.z_sign) {
            lo = mid;
        } else if (z(p) > budget.z_sign) {
            hi = mid;
        } else {
            unresolved = mid;
            break;
        }
    }
    // Local linear fit of the curvature around the sign change.
    const double c = unresolved.value_or(0.5 * (lo + hi));
    const double step = budget.tol;
    for (double off : {-2.0, -1.0, 1.0, 2.0}) {
        if (static_cast<int>(r.probes.size()) >= budget.max_probes) break;
        const double a = c + off * step;
        if (a > 0.0) probe(a);
    }
    std::vector<double> x, y, s;
    for (const auto& p : r.probes) {
        if (std::abs(p.alpha - c) > 2.5 * step) continue;
        x.push_back(p.alpha);
        y.push_back(p.curvature.value);
        s.push_back(std::max(p.curvature.std_error, 1e-300));
    }
    if (x.size() < 3) return r;
    const LineFit f = weighted_line(x, y, s, c);
    if (!(f.b1 > 0.0)) return r;
    r.alpha_c = c - f.b0 / f.b1;

    std::vector<double> roots;
    std::vector<double> yb(y.size());
    for (std::size_t rep = 0; rep < budget.bootstrap_reps; ++rep) {
        rng::PathStream st(budget.seed, kFitBootstrapStream, rep);
        for (std::size_t i = 0; i < y.size(); i += 2) {
            const auto g = st.normal_pair();
            yb[i] = y[i] + s[i] * g[0];
            if (i + 1 < y.size()) yb[i + 1] = y[i + 1] + s[i + 1] * g[1];
        }
        const LineFit fb = weighted_line(x, yb, s, c);
        if (fb.b1 > 0.0) roots.push_back(c - fb.b0 / fb.b1);
    }
    if (roots.size() < budget.bootstrap_reps * 9 / 10) return r;
    std::sort(roots.begin(), roots.end());
    const auto q = [&](double p) {
        return roots[static_cast<std::size_t>(std::clamp(p * static_cast<double>(roots.size() - 1), 0.0,
                                                         static_cast<double>(roots.size() - 1)))];
    };
    r.ci_lo = q(0.025);
    r.ci_hi = q(0.975);
    const bool tight = r.ci_hi - r.ci_lo <= 2.0 * budget.tol;
    const bool inside = r.alpha_c >= budget.alpha_lo && r.alpha_c <= budget.alpha_hi;
    r.status = tight && inside ? McCriticalResult::Status::found : McCriticalResult::Status::inconclusive;
    return r;
}

// ---------------------------------------------------------------------------

ShapeAtProbe classify_histogram(const Histogram& hist, const SweepBudget& budget) {
    ShapeAtProbe s;
    s.curvature = histogram_curvature(hist, budget.window, budget.order);
    const DensityCurve coarse = coarse_curve(hist, budget.coarse_bins);
    const double zc = s.curvature.value / s.curvature.std_error;
    s.resolved = std::abs(zc) > budget.z_sign;

    ClassifyOptions opt;
    opt.symmetry_tol = 1e-12;
    const ModalityReport rep = classify(coarse, opt);
    if (zc < -budget.z_sign) {
        s.cls = ModalityClass::unimodal;
    } else if (zc > budget.z_sign) {
        s.cls = rep.cls == ModalityClass::bimodal_U ? ModalityClass::bimodal_U : ModalityClass::bimodal_M;
    } else {
        s.cls = rep.cls;
    }
    s.curve = coarse;
    return s;
}

ShapeAtProbe probe_shape(double mu, const CorrelationScale& chi, std::size_t n_steps, double dt,
                         const SweepBudget& budget, const std::optional<DensityCurve>& previous) {
    mc::WalkConfig cfg;
    cfg.n_steps = n_steps;
    cfg.dt = dt;
    cfg.mu = mu;
    cfg.chi = chi;
    cfg.n_paths = budget.paths;
    cfg.seed = rng::mix64(budget.seed ^ (static_cast<std::uint64_t>(n_steps) << 20));
    cfg.bins = budget.bins;
    cfg.threads = budget.threads;
    ShapeAtProbe s = classify_histogram(mc::run_race(cfg, mc::Style::asian), budget);
    s.alpha = cfg.alpha();
    s.n_steps = n_steps;
    s.change = previous ? interior_sup_change(*s.curve, *previous) : kNaN;
    return s;
}

ChiCriticalResult chi_critical(double mu, const std::vector<double>& chi_grid,
                               const std::vector<std::size_t>& n_schedule, double dt, const SweepBudget& budget) {
    if (n_schedule.empty()) throw ValidationError("empty step schedule");
    ChiCriticalResult out;
    for (double chi_value : chi_grid) {
        const auto chi = CorrelationScale::finite(chi_value);
        ChiVerdict v;
        v.chi = chi_value;
        std::optional<DensityCurve> prev;
        bool seen_unimodal = false;
        for (std::size_t n : n_schedule) {
            const ShapeAtProbe s = probe_shape(mu, chi, n, dt, budget, prev);
            v.trajectory.push_back(s);
            prev = s.curve;
            const bool bimodal = s.cls == ModalityClass::bimodal_M || s.cls == ModalityClass::bimodal_U;
            if (s.resolved && bimodal) {
                v.verdict = CellVerdict::transition;
                v.n_c = n;
                break;
            }
            const bool unimodal = s.resolved && s.cls == ModalityClass::unimodal;
            if (unimodal && seen_unimodal && s.change < budget.conv_eps) {
                v.verdict = CellVerdict::no_transition;
                break;
            }
            seen_unimodal = unimodal;
        }
        out.per_chi.push_back(std::move(v));
    }
    for (const auto& v : out.per_chi) {
        if (v.verdict == CellVerdict::no_transition && (!out.chi_c || v.chi > *out.chi_c)) out.chi_c = v.chi;
    }
    return out;
}

PhaseCell phase_cell(double mu, double inv_chi, const SweepBudget& budget) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto chi = CorrelationScale::from_inverse(inv_chi);
    PhaseCell cell;
    cell.mu = mu;
    cell.inv_chi = inv_chi;

    auto alphas = budget.alphas;
    std::sort(alphas.begin(), alphas.end());
    const auto steps_for = [&](double a) {
        return mc::config_for_alpha(a, mu, chi, 1, 0, budget.dt, budget.max_steps);
    };
    std::optional<DensityCurve> prev;
    std::vector<ShapeAtProbe> shapes;
    bool timed_out = false;
    for (double a : alphas) {
        if (std::chrono::duration<double>(clock::now() - start).count() > budget.cell_seconds) {
            timed_out = true;
            break;
        }
        const auto cfg = steps_for(a);
        shapes.push_back(probe_shape(mu, chi, cfg.n_steps, cfg.dt, budget, prev));
        prev = shapes.back().curve;
        cell.trajectory.emplace_back(shapes.back().alpha, shapes.back().cls);
        if (shapes.back().resolved && shapes.back().curvature.value > 0.0) break;
    }

    const auto neg = [&](const ShapeAtProbe& s) { return s.resolved && s.curvature.value < 0.0; };
    const auto pos = [&](const ShapeAtProbe& s) { return s.resolved && s.curvature.value > 0.0; };
    if (!shapes.empty() && pos(shapes.back())) {
        cell.verdict = CellVerdict::transition;
        cell.bimodal_kind = shapes.back().cls;
        const std::size_t k = shapes.size() - 1;
        std::optional<std::size_t> j;
        for (std::size_t i = 0; i < k; ++i) {
            if (neg(shapes[i])) j = i;
        }
        if (j) {
            std::size_t i0 = *j;
            for (std::size_t i = *j; i < k; ++i) {
                if (shapes[i].curvature.value < 0.0) i0 = i;
            }
            double a0 = shapes[i0].alpha, a1 = shapes[i0 + 1].alpha;
            double c0 = shapes[i0].curvature.value, c1 = shapes[i0 + 1].curvature.value;
            for (int it = 0; it < budget.refine_probes; ++it) {
                if (std::chrono::duration<double>(clock::now() - start).count() > budget.cell_seconds) break;
                const auto cfg = steps_for(std::sqrt(a0 * a1));
                const ShapeAtProbe s = probe_shape(mu, chi, cfg.n_steps, cfg.dt, budget, std::nullopt);
                if (s.alpha <= a0 || s.alpha >= a1) break;
                if (s.curvature.value < 0.0) {
                    a0 = s.alpha;
                    c0 = s.curvature.value;
                } else {
                    a1 = s.alpha;
                    c1 = s.curvature.value;
                    if (pos(s)) cell.bimodal_kind = s.cls;
                }
            }
            const double t = -c0 / (c1 - c0);
            cell.alpha_c = std::exp(std::log(a0) + t * (std::log(a1) - std::log(a0)));
        } else {
            cell.alpha_c = shapes[k].alpha;
        }
        cell.n_c = steps_for(*cell.alpha_c).n_steps;
        cell.converged = true;
        return cell;
    }
    const bool all_neg = !shapes.empty() && std::all_of(shapes.begin(), shapes.end(), neg);
    cell.converged = shapes.size() >= 2 && shapes.back().change < budget.conv_eps;
    if (all_neg && cell.converged && !timed_out) cell.verdict = CellVerdict::no_transition;
    return cell;
}

PhaseDiagram phase_diagram(const std::vector<double>& mu_grid, const std::vector<double>& inv_chi_grid,
                           const SweepBudget& budget) {
    PhaseDiagram d;
    d.mu_grid = mu_grid;
    d.inv_chi_grid = inv_chi_grid;
    for (double mu : mu_grid) {
        for (double ic : inv_chi_grid) d.cells.push_back(phase_cell(mu, ic, budget));
    }
    return d;
}

}  // namespace optrace::modality
