#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "optrace/analytic.hpp"
#include "optrace/convolve.hpp"
#include "optrace/core.hpp"
#include "optrace/modality.hpp"
#include "optrace/montecarlo.hpp"
#include "optrace/psi.hpp"

using namespace optrace;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Criteria expected to print FAIL; see README.
const std::set<int> kKnownFailures = {6};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

class Runner {
public:
    explicit Runner(const char* report_path) {
        if (report_path) report_.open(report_path);
    }

    void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < limit_s;
        const bool pass = o.pass && in_time;
        char head[64];
        std::snprintf(head, sizeof head, "%s [%d] ", pass ? "PASS" : "FAIL", id);
        emit(head + std::string(name) + ": " + o.detail + fmt("; %.1fs", secs) + fmt(" (limit %.0fs)", limit_s) +
             (in_time ? "" : " TIMEOUT"));
        if (!pass) {
            failed_.push_back(id);
            if (!kKnownFailures.count(id)) unexpected_ = true;
        }
    }

    int finish() {
        std::string line = "summary: " + std::to_string(failed_.size()) + " of 9 failed";
        for (int id : failed_) {
            line += " [" + std::to_string(id) + "]" + (kKnownFailures.count(id) ? " (known)" : "");
        }
        emit(line);
        return unexpected_ ? 1 : 0;
    }

private:
    void emit(const std::string& line) {
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        if (report_) report_ << line << std::endl;
    }

    std::ofstream report_;
    std::vector<int> failed_;
    bool unexpected_ = false;
};

std::vector<double> interior_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

// Largest pairwise |n_i - n_j| / sqrt(n_i + n_j) over mirrored bins of a rebinned histogram.
double mirror_z(const Histogram& h, std::size_t coarse) {
    std::vector<double> c(coarse, 0.0);
    for (std::size_t i = 0; i < h.bins(); ++i) c[i * coarse / h.bins()] += static_cast<double>(h.counts()[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < coarse / 2; ++i) {
        const double a = c[i], b = c[coarse - 1 - i];
        if (a + b > 0.0) z = std::max(z, std::abs(a - b) / std::sqrt(a + b));
    }
    return z;
}

}  // namespace

int main(int argc, char** argv) {
    Runner r(argc > 1 ? argv[1] : nullptr);
    const auto indep = CorrelationScale::independent();

    r.run(1, "European critical maturity", 1.0, [] {
        const auto c = modality::critical_maturity(modality::european_family(), 0.05, 20.0, 1e-9);
        const double err = c.alpha_c ? std::abs(*c.alpha_c - 0.5) : kInf;
        return Outcome{err <= 1e-6, "alpha_c=" + fmt("%.9f", c.alpha_c.value_or(kNaN)) + " |err|=" +
                                        fmt("%.2e", err) + " tol=1e-6"};
    });

    r.run(2, "Correlated European critical maturity", 10.0, [] {
        Outcome o{true, ""};
        for (double chi2 : {0.5, 2.0, 8.0}) {
            const auto chi = CorrelationScale::finite(std::sqrt(chi2));
            const auto c = modality::critical_maturity(modality::european_family(chi), 0.05, 20.0, 1e-9);
            const double expect = (2.0 + chi2) / (2.0 * chi2);
            const double err = c.alpha_c ? std::abs(*c.alpha_c - expect) : kInf;
            o.pass = o.pass && err <= 1e-6;
            o.detail += fmt("chi^2=%g ", chi2) + fmt("alpha_c=%.9f ", c.alpha_c.value_or(kNaN)) +
                        fmt("|err|=%.2e; ", err);
        }
        o.detail += "tol=1e-6";
        return o;
    });

    r.run(3, "Asian mu=0 critical maturity", 120.0, [] {
        const auto c = modality::critical_maturity(modality::asian_mu0_family(), 0.5, 4.0, 1e-5, 1e-2);
        const double v = c.alpha_c.value_or(kNaN);
        return Outcome{std::abs(v - 1.63) <= 0.05, "alpha_c=" + fmt("%.5f", v) + " target 1.63+-0.05"};
    });

    std::optional<Histogram> fig3_wide;
    r.run(4, "Monte Carlo mu=-1.7 shapes and critical maturity", 600.0, [&] {
        Outcome o{true, ""};
        const std::pair<double, ModalityClass> want[] = {{0.25, ModalityClass::unimodal},
                                                         {1.5, ModalityClass::bimodal_M}};
        for (const auto& [alpha, cls] : want) {
            auto cfg = mc::config_for_alpha(alpha, -1.7, indep, 1'000'000, 7, 0.01, 400);
            cfg.bins = 200;
            const Histogram h = mc::run_race(cfg, mc::Style::asian);
            const auto s = modality::classify_histogram(h);
            o.pass = o.pass && s.cls == cls && h.rejected == 0;
            o.detail += fmt("alpha=%g ", alpha) + to_string(s.cls) + "; ";
            if (alpha == 1.5) {
                const auto f = mc::fit_effective_maturity(h);
                o.pass = o.pass && f.residual <= 0.05;
                o.detail += fmt("fit alpha~=%.3f ", f.alpha_tilde) + fmt("residual=%.4f (tol 0.05); ", f.residual);
                fig3_wide = h;
            }
        }
        const auto c = modality::critical_maturity_mc(-1.7, indep);
        const bool ok = c.status == modality::McCriticalResult::Status::found && std::abs(c.alpha_c - 1.12) <= 0.1;
        o.pass = o.pass && ok;
        o.detail += "critical " + to_string(c.status) + fmt(" alpha_c=%.4f", c.alpha_c) +
                    fmt(" ci=[%.4f,", c.ci_lo) + fmt("%.4f] target 1.12+-0.1", c.ci_hi);
        return o;
    });

    r.run(5, "Limiting tau law convolves to Beta(mu, mu)", 60.0, [] {
        Outcome o{true, ""};
        const auto grid = interior_grid(0.05, 0.95, 181);
        for (double mu : {0.5, 1.0, 2.0}) {
            const auto psi = convolve::tau_density_infinity(make_params(1.0, DriftIndex{mu}));
            double sup = 0.0;
            for (double w : grid) {
                sup = std::max(sup, std::abs(convolve::weight_density_from_psi(psi, w) -
                                             analytic::limiting_beta_density(w, mu)));
            }
            o.pass = o.pass && sup <= 1e-4;
            o.detail += fmt("mu=%g ", mu) + fmt("sup=%.2e; ", sup);
        }
        o.detail += "tol=1e-4";
        return o;
    });

    r.run(6, "Large-alpha approximation vs exact tau law, mu=-1", 300.0, [] {
        Outcome o{true, ""};
        const auto p = make_params(1.0, DriftIndex{-1.0});
        for (double alpha : {20.0, 30.0, 50.0}) {
            const EffectiveMaturity a(alpha);
            double worst = 0.0, at = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double tr = std::pow(10.0, -1.0 + 0.1 * i);
                const double tau = psi::tau_from_reduced(tr, p);
                const double rel = std::abs(psi::psi_approx_negative_mu(tau, p, a).value /
                                                psi::psi_exact_negative_mu(tau, p, a).value -
                                            1.0);
                if (rel > worst) {
                    worst = rel;
                    at = tr;
                }
            }
            o.pass = o.pass && worst <= 0.1;
            o.detail += fmt("alpha=%g ", alpha) + fmt("max rel=%.4f ", worst) + fmt("at tau'=%g; ", at);
        }
        o.detail += "tol=0.10";
        return o;
    });

    r.run(7, "European Monte Carlo goodness of fit", 180.0, [] {
        Outcome o{true, ""};
        const std::pair<double, CorrelationScale> cases[] = {
            {0.25, CorrelationScale::independent()},
            {0.7, CorrelationScale::independent()},
            {1.0, CorrelationScale::finite(1.0)}};
        std::uint64_t seed = 21;
        for (const auto& [alpha, chi] : cases) {
            auto cfg = mc::config_for_alpha(alpha, 0.0, chi, 1'000'000, seed++, 2.0 * alpha, 1);
            cfg.bins = 100;
            const Histogram h = mc::run_race(cfg, mc::Style::european);
            const EffectiveMaturity m(alpha);
            const auto g = mc::chi_square_gof(h, [&](double w) { return analytic::european_weight_cdf(w, m, chi); });
            o.pass = o.pass && g.p_value > 0.01;
            o.detail += fmt("(%g,", alpha) + (chi.is_independent() ? std::string("inf") : fmt("%g", chi.chi())) +
                        fmt(") p=%.3f; ", g.p_value);
        }
        o.detail += "need p>0.01";
        return o;
    });

    r.run(8, "Phase diagram sketch", 1800.0, [] {
        modality::SweepBudget b;
        b.seed = 5;
        const std::vector<double> mus{-1.0, 0.5, 2.0}, ics{0.0, 0.5, 1.0};
        const auto d = modality::phase_diagram(mus, ics, b);
        const auto cell = [&](std::size_t i, std::size_t j) -> const PhaseCell& { return d.cells[i * ics.size() + j]; };
        Outcome o{true, ""};
        for (std::size_t i = 0; i < mus.size(); ++i) {
            o.detail += fmt("mu=%g:", mus[i]);
            for (std::size_t j = 0; j < ics.size(); ++j) {
                const auto& c = cell(i, j);
                o.detail += " " + to_string(c.verdict);
                if (c.alpha_c) o.detail += fmt("(%.2f)", *c.alpha_c);
            }
            o.detail += "; ";
        }
        bool ok = true;
        for (std::size_t j = 0; j < ics.size(); ++j) ok = ok && cell(2, j).verdict == CellVerdict::no_transition;
        for (std::size_t i = 0; i < 2; ++i) {
            ok = ok && cell(i, 0).verdict == CellVerdict::transition;
            double last = 0.0;
            bool closed = false;
            for (std::size_t j = 0; j < ics.size(); ++j) {
                const auto& c = cell(i, j);
                if (c.verdict == CellVerdict::transition) {
                    // Once a row stops transitioning it must not resume at stronger correlation.
                    ok = ok && !closed && c.alpha_c && *c.alpha_c > last;
                    last = c.alpha_c.value_or(kInf);
                } else {
                    closed = true;
                }
            }
        }
        o.pass = ok;
        o.detail += "mu=2 row no_transition, 1/chi=0 transitions below mu=1, alpha_c increasing in 1/chi";
        return o;
    });

    r.run(9, "Property suite", 600.0, [&] {
        Outcome o{true, ""};
        // Symmetry on dyadic points, where 1 - w is exact.
        std::size_t asym = 0;
        const auto psi_beta = convolve::tau_density_infinity(make_params(1.0, DriftIndex{0.7}));
        for (int k = 1; k < 32; ++k) {
            const double w = k / 64.0;
            const EffectiveMaturity a(0.8);
            const auto chi = CorrelationScale::finite(1.3);
            asym += analytic::european_weight_density(w, a) != analytic::european_weight_density(1.0 - w, a);
            asym += analytic::correlated_european_weight_density(w, a, chi) !=
                    analytic::correlated_european_weight_density(1.0 - w, a, chi);
            asym += analytic::asian_mu0_weight_density(w, a) != analytic::asian_mu0_weight_density(1.0 - w, a);
            asym += convolve::weight_density_from_psi(psi_beta, w) !=
                    convolve::weight_density_from_psi(psi_beta, 1.0 - w);
        }
        o.pass = o.pass && asym == 0;
        o.detail += "closed-form/quadrature asymmetric points=" + std::to_string(asym) + "; ";

        // Monte Carlo symmetry within 3 s.e. on 20 bins.
        if (!fig3_wide) {
            auto cfg = mc::config_for_alpha(1.5, -1.7, indep, 1'000'000, 7, 0.01, 400);
            fig3_wide = mc::run_race(cfg, mc::Style::asian);
        }
        const double z = mirror_z(*fig3_wide, 20);
        o.pass = o.pass && z <= 3.0;
        o.detail += fmt("MC mirror max z=%.2f (tol 3); ", z);

        // Normalization.
        double worst_curve = 0.0;
        for (double alpha : {0.25, 0.7, 2.0}) {
            worst_curve = std::max(
                worst_curve,
                std::abs(analytic::european_curve(EffectiveMaturity(alpha), indep, open_grid()).norm_estimate() - 1.0));
        }
        worst_curve = std::max(
            worst_curve, std::abs(analytic::asian_mu0_curve(EffectiveMaturity(1.0), open_grid()).norm_estimate() - 1.0));
        for (double mu : {0.5, 1.0, 2.0}) {
            const auto psi = convolve::tau_density_infinity(make_params(1.0, DriftIndex{mu}));
            const auto curve = convolve::weight_curve_from_psi(psi, open_grid(401), CurveMeta{});
            worst_curve = std::max(worst_curve, std::abs(curve.norm_estimate() - 1.0));
        }
        double worst_tau = 0.0;
        for (double mu : {0.5, 1.0, 2.0}) {
            worst_tau = std::max(worst_tau, std::abs(convolve::tau_density_mass(convolve::tau_density_infinity(
                                                         make_params(1.0, DriftIndex{mu}))) - 1.0));
        }
        double worst_neg = 0.0;
        for (double alpha : {20.0, 50.0}) {
            const convolve::PsiCache cache(make_params(1.0, DriftIndex{-1.0}), EffectiveMaturity(alpha),
                                           convolve::NegMuMethod::exact);
            worst_neg = std::max(worst_neg, std::abs(convolve::tau_density_mass(cache.as_tau_density()) - 1.0));
        }
        o.pass = o.pass && worst_curve <= 1e-4 && worst_tau <= 1e-8 && worst_neg <= 0.05;
        o.detail += fmt("curve mass err=%.1e (tol 1e-4) ", worst_curve) + fmt("tau mass err=%.1e (tol 1e-8) ", worst_tau) +
                    fmt("mu=-1 tau mass err=%.1e (tol 5e-2); ", worst_neg);

        // s0 enters nowhere.
        const auto grid = open_grid(101);
        const auto c1 = convolve::weight_curve_from_psi(
            convolve::tau_density_infinity(make_params(0.6, DriftIndex{1.4}, 1.0)), grid, CurveMeta{});
        const auto c2 = convolve::weight_curve_from_psi(
            convolve::tau_density_infinity(make_params(0.6, DriftIndex{1.4}, 100.0)), grid, CurveMeta{});
        const convolve::NegativeMuWeightDensity n1(make_params(1.0, DriftIndex{-1.0}, 1.0), EffectiveMaturity(6.0),
                                                   convolve::NegMuMethod::approx);
        const convolve::NegativeMuWeightDensity n2(make_params(1.0, DriftIndex{-1.0}, 100.0), EffectiveMaturity(6.0),
                                                   convolve::NegMuMethod::approx);
        const bool s0_ok = c1.values() == c2.values() && n1.curve(grid).values() == n2.curve(grid).values();
        o.pass = o.pass && s0_ok;
        o.detail += std::string("s0 1 vs 100 identical=") + (s0_ok ? "yes" : "no") + "; ";

        // Worker count.
        bool threads_ok = true;
        for (auto style : {mc::Style::european, mc::Style::asian}) {
            auto cfg = mc::config_for_alpha(1.0, -0.5, CorrelationScale::finite(2.0), 100'000, 3, 0.02, 400);
            cfg.threads = 1;
            const auto a = mc::run_race(cfg, style);
            cfg.threads = 4;
            const auto b = mc::run_race(cfg, style);
            threads_ok = threads_ok && a.counts() == b.counts();
        }
        o.pass = o.pass && threads_ok;
        o.detail += std::string("threads 1 vs 4 identical=") + (threads_ok ? "yes" : "no");
        return o;
    });

    return r.finish();
}
