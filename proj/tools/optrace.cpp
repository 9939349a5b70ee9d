// optrace: weight densities of two racing options, their simulation and shape transitions.

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "optrace/analytic.hpp"
#include "optrace/convolve.hpp"
#include "optrace/core.hpp"
#include "optrace/error.hpp"
#include "optrace/io.hpp"
#include "optrace/modality.hpp"
#include "optrace/montecarlo.hpp"

using namespace optrace;

namespace {

struct Common {
    std::string out;
    std::string svg;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& s) {
    if (s) return *s;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

CorrelationScale parse_chi(const std::string& s) {
    if (s == "inf" || s == "infinity") return CorrelationScale::independent();
    return CorrelationScale::finite(parse_double(s));
}

void emit_csv(const CsvTable& t, const std::string& path) {
    if (path.empty() || path == "-") {
        write_csv(std::cout, t);
    } else {
        write_csv_file(path, t);
    }
}

std::string label_for(const DensityCurve& c) {
    std::string l = c.meta().get("model").value_or("curve");
    if (auto a = c.meta().get("alpha")) l += " alpha=" + *a;
    return l;
}

void emit_svg(const std::vector<DensityCurve>& curves, const std::string& title, const std::string& path,
              bool markers_for_mc = true) {
    if (path.empty()) return;
    PlotSpec plot;
    plot.title = title;
    for (const auto& c : curves) {
        PlotSeries s;
        s.label = label_for(c);
        s.x = c.grid();
        s.y = c.values();
        s.markers = markers_for_mc && c.meta().provenance == Provenance::mc;
        plot.series.push_back(std::move(s));
    }
    write_svg_file(path, plot);
}

void add_common(CLI::App* sub, Common& c, bool random) {
    sub->add_option("-o,--out", c.out, "CSV output path (stdout when omitted)");
    sub->add_option("--svg", c.svg, "SVG plot path");
    if (random) {
        sub->add_option("--seed", c.seed, "random seed (drawn and recorded when omitted)");
        sub->add_option("--threads", c.threads, "worker threads, 0 for all cores")->envname("OPTRACE_THREADS");
    }
}

// --- density -------------------------------------------------------------

struct DensityArgs {
    std::string model;
    std::vector<double> alphas;
    std::string chi = "inf";
    double mu = 0.0;
    std::size_t points = 999;
    bool asymptotic = false;
    std::string method = "exact";
    Common common;
};

int run_density(const DensityArgs& a) {
    const auto grid = open_grid(a.points);
    std::vector<DensityCurve> curves;
    const auto chi = parse_chi(a.chi);
    if (a.model == "beta-limit") {
        curves.push_back(analytic::beta_limit_curve(a.mu, grid));
    } else {
        if (a.alphas.empty()) throw ValidationError("--alpha is required for model " + a.model);
        if (a.model == "european-correlated" && chi.is_independent()) {
            throw ValidationError("european-correlated needs a finite --chi");
        }
        for (double alpha : a.alphas) {
            const EffectiveMaturity m(alpha);
            if (a.model == "european" || a.model == "european-correlated") {
                curves.push_back(analytic::european_curve(m, chi, grid));
            } else if (a.model == "asian-mu0") {
                curves.push_back(analytic::asian_mu0_curve(m, grid));
                if (a.asymptotic) curves.push_back(analytic::asian_asymptotic_curve(m, grid));
            } else {
                if (!(a.mu < 0.0)) throw ValidationError("asian-neg-mu needs --mu < 0");
                const auto method = a.method == "approx" ? convolve::NegMuMethod::approx : convolve::NegMuMethod::exact;
                const convolve::NegativeMuWeightDensity d(make_params(1.0, DriftIndex{a.mu}), m, method);
                curves.push_back(d.curve(grid));
                if (auto w = curves.back().meta().get("warning")) std::cerr << "warning: " << *w << '\n';
            }
        }
    }
    emit_csv(curves_to_csv(curves, {{"version", OPTRACE_VERSION}, {"command", "density " + a.model}}), a.common.out);
    emit_svg(curves, "weight density: " + a.model, a.common.svg);
    return 0;
}

// --- simulate ------------------------------------------------------------

struct SimulateArgs {
    std::string style = "asian";
    double mu = 0.0;
    std::string chi = "inf";
    std::vector<double> alphas;
    std::size_t steps = 0;
    double dt = 0.01;
    std::size_t max_steps = 400;
    std::uint64_t paths = 1'000'000;
    std::size_t bins = 200;
    bool fit = false;
    bool overlay = false;
    Common common;
};

int run_simulate(const SimulateArgs& a) {
    const auto style = a.style == "european" ? mc::Style::european : mc::Style::asian;
    const auto chi = parse_chi(a.chi);
    const std::uint64_t seed = resolve_seed(a.common.seed);
    std::vector<mc::WalkConfig> configs;
    if (a.steps > 0) {
        if (!a.alphas.empty()) throw ValidationError("give either --alpha or --steps, not both");
        mc::WalkConfig c;
        c.n_steps = a.steps;
        c.dt = a.dt;
        c.mu = a.mu;
        c.chi = chi;
        c.n_paths = a.paths;
        c.seed = seed;
        configs.push_back(c);
    } else {
        if (a.alphas.empty()) throw ValidationError("--alpha or --steps is required");
        for (double alpha : a.alphas) {
            // The European terminal value is exact in a single step.
            const double dt_hint = style == mc::Style::european ? 2.0 * alpha : a.dt;
            configs.push_back(mc::config_for_alpha(alpha, a.mu, chi, a.paths, seed, dt_hint, a.max_steps));
        }
    }

    std::vector<DensityCurve> curves;
    std::vector<std::pair<std::string, std::string>> header{{"version", OPTRACE_VERSION},
                                                            {"command", "simulate"},
                                                            {"seed", std::to_string(seed)}};
    std::vector<DensityCurve> overlays;
    for (auto cfg : configs) {
        cfg.bins = a.bins;
        cfg.threads = a.common.threads;
        const Histogram h = mc::run_race(cfg, style);
        CurveMeta meta;
        meta.set("model", "mc-" + mc::to_string(style))
            .set("style", mc::to_string(style))
            .set("alpha", cfg.alpha())
            .set("mu", cfg.mu)
            .set("chi", chi.is_independent() ? std::string("inf") : format_double(chi.chi()))
            .set("steps", static_cast<double>(cfg.n_steps))
            .set("dt", cfg.dt);
        if (h.rejected) meta.set("rejected", static_cast<double>(h.rejected));
        const auto shape = modality::classify_histogram(h);
        meta.set("class", to_string(shape.cls))
            .set("center_curvature", shape.curvature.value)
            .set("center_curvature_se", shape.curvature.std_error);
        std::cerr << "alpha=" << format_double(cfg.alpha()) << " class=" << to_string(shape.cls)
                  << " curvature=" << format_double(shape.curvature.value) << " se="
                  << format_double(shape.curvature.std_error) << '\n';
        if (a.fit) {
            const auto f = mc::fit_effective_maturity(h);
            meta.set("fit_alpha_tilde", f.alpha_tilde)
                .set("fit_residual", f.residual)
                .set("fit_max_relative", f.max_relative)
                .set("fit_bins", static_cast<double>(f.bins_used));
            std::cerr << "alpha=" << format_double(cfg.alpha()) << " alpha_tilde=" << format_double(f.alpha_tilde)
                      << " residual=" << format_double(f.residual) << '\n';
        }
        curves.push_back(h.to_density_curve(std::move(meta)));
        if (a.overlay) {
            const auto centers = h.centers();
            const EffectiveMaturity m(cfg.alpha());
            if (style == mc::Style::european) {
                overlays.push_back(analytic::european_curve(m, chi, centers));
            } else if (cfg.mu == 0.0 && chi.is_independent()) {
                overlays.push_back(analytic::asian_mu0_curve(m, centers));
            } else {
                std::cerr << "warning: no closed-form overlay for this configuration\n";
            }
        }
    }
    std::vector<DensityCurve> all = curves;
    all.insert(all.end(), overlays.begin(), overlays.end());
    emit_csv(curves_to_csv(all, header), a.common.out);
    emit_svg(all, "simulated weight density", a.common.svg);
    return 0;
}

// --- critical ------------------------------------------------------------

struct CriticalArgs {
    std::string family;
    std::string chi = "inf";
    double mu = 0.0;
    double tol = 0.0;
    double delta = 0.0;
    modality::McBudget budget;
    Common common;
};

int run_critical(const CriticalArgs& a) {
    const auto chi = parse_chi(a.chi);
    std::cout << "family=" << a.family << '\n';
    if (a.family == "asian-mc") {
        modality::McBudget b = a.budget;
        b.seed = resolve_seed(a.common.seed);
        b.threads = a.common.threads;
        if (a.tol > 0.0) b.tol = a.tol;
        const auto r = modality::critical_maturity_mc(a.mu, chi, b);
        std::cout << "seed=" << b.seed << '\n' << "status=" << modality::to_string(r.status) << '\n';
        if (r.status == modality::McCriticalResult::Status::found) {
            std::cout << "alpha_c=" << format_double(r.alpha_c) << '\n'
                      << "ci=" << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << '\n';
        } else if (r.status == modality::McCriticalResult::Status::no_transition) {
            std::cout << "alpha_c=none\n";
        } else {
            std::cout << "alpha_c=inconclusive\n";
        }
        if (!a.common.out.empty()) {
            CsvTable t;
            t.columns = {"alpha", "steps", "curvature", "std_error"};
            t.add_header("mu", format_double(a.mu));
            t.add_header("seed", std::to_string(b.seed));
            t.add_header("window", format_double(r.window));
            for (const auto& p : r.probes) {
                t.add_row({p.alpha, static_cast<double>(p.n_steps), p.curvature.value, p.curvature.std_error});
            }
            write_csv_file(a.common.out, t);
        }
        return 0;
    }

    modality::Family fam;
    double lo = 0.05, hi = 20.0, tol = 1e-9, delta = 1e-3;
    if (a.family == "european" || a.family == "european-correlated") {
        if (a.family == "european-correlated" && chi.is_independent()) {
            throw ValidationError("european-correlated needs a finite --chi");
        }
        fam = modality::european_family(chi);
    } else {
        fam = modality::asian_mu0_family();
        lo = 0.5;
        hi = 4.0;
        tol = 1e-5;
        delta = 1e-2;
    }
    if (a.tol > 0.0) tol = a.tol;
    if (a.delta > 0.0) delta = a.delta;
    const auto r = modality::critical_maturity(fam, lo, hi, tol, delta);
    if (r.alpha_c) {
        std::cout << "alpha_c=" << format_double(*r.alpha_c) << '\n'
                  << "bracket=" << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
    } else {
        std::cout << "alpha_c=none\n";
    }
    return 0;
}

// --- phase-diagram -------------------------------------------------------

struct PhaseArgs {
    std::vector<double> mus{-1.0, 0.5, 2.0};
    std::vector<double> inv_chis{0.0, 0.5, 1.0};
    modality::SweepBudget budget;
    Common common;
};

int run_phase(const PhaseArgs& a) {
    modality::SweepBudget b = a.budget;
    b.seed = resolve_seed(a.common.seed);
    b.threads = a.common.threads;
    const auto d = modality::phase_diagram(a.mus, a.inv_chis, b);

    CsvTable t;
    t.columns = {"mu", "inv_chi", "class", "alpha_c", "n_c", "bimodal_kind"};
    t.add_header("version", OPTRACE_VERSION);
    t.add_header("seed", std::to_string(b.seed));
    t.add_header("paths", std::to_string(b.paths));
    t.add_header("dt", format_double(b.dt));
    GridPlotSpec g;
    g.title = "shape transition over (mu, 1/chi)";
    g.row_label = "mu";
    g.col_label = "1/chi";
    for (double ic : a.inv_chis) g.col_ticks.push_back(format_double(ic));
    for (std::size_t i = 0; i < a.mus.size(); ++i) {
        g.row_ticks.push_back(format_double(a.mus[i]));
        g.cell_text.emplace_back();
        g.cell_class.emplace_back();
        for (std::size_t j = 0; j < a.inv_chis.size(); ++j) {
            const auto& c = d.cell(i, j);
            const std::string ac = c.alpha_c ? format_double(*c.alpha_c) : "none";
            t.rows.push_back({format_double(c.mu), format_double(c.inv_chi), to_string(c.verdict), ac,
                              c.n_c ? std::to_string(*c.n_c) : "none",
                              c.bimodal_kind ? to_string(*c.bimodal_kind) : "none"});
            std::string txt = to_string(c.verdict);
            if (c.alpha_c) txt += " a=" + format_double(std::round(*c.alpha_c * 100.0) / 100.0);
            g.cell_text.back().push_back(txt);
            g.cell_class.back().push_back(static_cast<int>(c.verdict));
        }
    }
    emit_csv(t, a.common.out);
    if (!a.common.svg.empty()) write_grid_svg_file(a.common.svg, g);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weight densities of two racing options and their shape transitions"};
    app.set_version_flag("--version", std::string(OPTRACE_VERSION));
    app.set_config("--config", "", "key=value file mirroring the flags; flags win");
    app.require_subcommand(1);

    DensityArgs da;
    auto* density = app.add_subcommand("density", "Tabulate a weight density on an open grid");
    density->add_option("model", da.model)
        ->required()
        ->check(CLI::IsMember({"european", "european-correlated", "asian-mu0", "asian-neg-mu", "beta-limit"}));
    density->add_option("--alpha", da.alphas, "effective maturity (repeatable)");
    density->add_option("--chi", da.chi, "correlation scale, 'inf' for independence");
    density->add_option("--mu", da.mu, "drift index");
    density->add_option("--points", da.points, "grid points")->check(CLI::Range(3, 100000));
    density->add_flag("--with-asymptotic", da.asymptotic, "add the w -> 1 asymptotic form (asian-mu0)");
    density->add_option("--method", da.method, "tau law for asian-neg-mu")->check(CLI::IsMember({"exact", "approx"}));
    add_common(density, da.common, false);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo histogram of the weight");
    simulate->add_option("--style", sa.style)->check(CLI::IsMember({"european", "asian"}));
    simulate->add_option("--mu", sa.mu, "drift index");
    simulate->add_option("--chi", sa.chi, "correlation scale, 'inf' for independence");
    simulate->add_option("--alpha", sa.alphas, "effective maturity (repeatable)");
    simulate->add_option("--steps", sa.steps, "walk length N instead of --alpha");
    simulate->add_option("--dt", sa.dt, "step size (target when --alpha is used)");
    simulate->add_option("--max-steps", sa.max_steps, "cap on N for --alpha");
    simulate->add_option("--paths", sa.paths);
    simulate->add_option("--bins", sa.bins)->check(CLI::Range(2, 1000000));
    simulate->add_flag("--fit", sa.fit, "fit the logit-normal law with a free maturity");
    simulate->add_flag("--overlay", sa.overlay, "add the closed-form density on the bin centers");
    add_common(simulate, sa.common, true);

    CriticalArgs ca;
    auto* critical = app.add_subcommand("critical", "Critical maturity of the bell to bimodal transition");
    critical->add_option("family", ca.family)
        ->required()
        ->check(CLI::IsMember({"european", "european-correlated", "asian-mu0", "asian-mc"}));
    critical->add_option("--chi", ca.chi, "correlation scale, 'inf' for independence");
    critical->add_option("--mu", ca.mu, "drift index (asian-mc)");
    critical->add_option("--tol", ca.tol, "bracket width, or CI half-width for asian-mc");
    critical->add_option("--delta", ca.delta, "half-width of the second difference");
    critical->add_option("--paths", ca.budget.paths, "paths per probe (asian-mc)");
    critical->add_option("--dt", ca.budget.dt, "walk step (asian-mc)");
    critical->add_option("--alpha-lo", ca.budget.alpha_lo);
    critical->add_option("--alpha-hi", ca.budget.alpha_hi);
    critical->add_option("--window", ca.budget.window, "half-width of the curvature window around 1/2");
    add_common(critical, ca.common, true);

    PhaseArgs pa;
    auto* phase = app.add_subcommand("phase-diagram", "Sweep (mu, 1/chi) and classify each cell");
    phase->add_option("--mu", pa.mus, "drift indices")->delimiter(',');
    phase->add_option("--inv-chi", pa.inv_chis, "values of 1/chi")->delimiter(',');
    phase->add_option("--alphas", pa.budget.alphas, "maturity schedule")->delimiter(',');
    phase->add_option("--paths", pa.budget.paths, "paths per probe");
    phase->add_option("--dt", pa.budget.dt);
    phase->add_option("--max-steps", pa.budget.max_steps);
    phase->add_option("--cell-seconds", pa.budget.cell_seconds, "time limit per cell");
    add_common(phase, pa.common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*density) return run_density(da);
        if (*simulate) return run_simulate(sa);
        if (*critical) return run_critical(ca);
        if (*phase) return run_phase(pa);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const DegenerateDistributionError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
