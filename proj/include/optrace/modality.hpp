#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optrace/core.hpp"
#include "optrace/montecarlo.hpp"

/// Shape classification, critical maturities and the (mu, 1/chi) sweep.
namespace optrace::modality {

struct ClassifyOptions {
    /// A second maximum counts when it exceeds the center by this fraction of
    /// the peak; a bimodal curve is U-shaped when its edge value lies within
    /// the same fraction of the outer maximum.
    double prominence_eps = 0.02;
    /// (max - min) / mean on [0.2, 0.8] at or below which the curve is a plateau.
    double plateau_eps = 0.05;
    /// Allowed max |p(w) - p(1 - w)| relative to the peak value.
    double symmetry_tol = 1e-6;
    /// Half-width of the second difference at 1/2.
    double delta = 1e-3;
};

/// Classifies a symmetric curve; throws ContractError when asymmetric.
ModalityReport classify(const DensityCurve& curve, const ClassifyOptions& opt = {});

/// Pointwise density family p(alpha, w).
using Family = std::function<double(double alpha, double w)>;

Family european_family(CorrelationScale chi = CorrelationScale::independent());
Family asian_mu0_family();

/// Richardson-extrapolated second derivative at w = 1/2 from central
/// differences of half-widths delta and delta/2 (error O(delta^4)).
double center_curvature(const Family& family, double alpha, double delta);

struct CriticalResult {
    /// Empty when the bracket holds no sign change.
    std::optional<double> alpha_c;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    double delta = 0.0;
};

/// Bisection on the sign of the center curvature until hi - lo <= tol.
CriticalResult critical_maturity(const Family& family, double lo, double hi, double tol = 1e-7,
                                 double delta = 1e-3);

// --- Monte Carlo ---------------------------------------------------------

/// Symmetrized histogram smoothed with a Gaussian kernel (bandwidth in w
/// units, reflected at 0 and 1); bandwidth 0 only symmetrizes.
DensityCurve smoothed_curve(const Histogram& hist, double bandwidth);

/// Curvature of the weight density at 1/2 estimated from a histogram by a
/// Legendre projection of the symmetrized counts on |w - 1/2| <= window.
struct CurvatureEstimate {
    /// Estimate of p''(1/2).
    double value = 0.0;
    /// Exact standard error of the linear statistic under multinomial sampling.
    double std_error = 0.0;
    /// Density at 1/2 from the same projection.
    double center_density = 0.0;
    double window = 0.0;
    int order = 0;
};

CurvatureEstimate histogram_curvature(const Histogram& hist, double window = 0.3, int order = 4);

/// Same projection applied to bin probabilities of a known density
/// (exact expectation of the estimator).
double projected_curvature(const std::vector<double>& bin_probabilities, double window = 0.3, int order = 4);

struct McBudget {
    std::uint64_t paths = 1'000'000;
    std::size_t bins = 1000;
    double dt = 0.02;
    std::size_t max_steps = 400;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double alpha_lo = 0.2;
    double alpha_hi = 3.0;
    /// Requested half-width of the confidence interval.
    double tol = 0.1;
    double window = 0.3;
    int order = 4;
    /// |curvature| / s.e. needed to trust a sign.
    double z_sign = 2.5;
    int max_probes = 14;
    std::size_t bootstrap_reps = 400;
};

struct McProbe {
    double alpha = 0.0;
    std::size_t n_steps = 0;
    CurvatureEstimate curvature;
};

struct McCriticalResult {
    enum class Status { found, no_transition, inconclusive };
    Status status = Status::inconclusive;
    double alpha_c = 0.0;
    /// 95% bootstrap interval.
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double window = 0.0;
    std::vector<McProbe> probes;
};

std::string to_string(McCriticalResult::Status s);

McProbe mc_probe(double mu, const CorrelationScale& chi, double alpha, const McBudget& budget);

/// Bisection on the sign of the Monte Carlo curvature at 1/2, then a
/// weighted linear fit of the curvature near the bracket with a parametric
/// bootstrap for the interval. Status inconclusive when the interval is
/// wider than 2 tol.
McCriticalResult critical_maturity_mc(double mu, const CorrelationScale& chi, const McBudget& budget = {});

// --- Convergence in N and the phase diagram ------------------------------

struct SweepBudget {
    std::uint64_t paths = 500'000;
    std::size_t bins = 1000;
    /// Bins of the smoothed curve used for convergence checks.
    std::size_t coarse_bins = 40;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double window = 0.3;
    int order = 4;
    double z_sign = 3.0;
    /// Sup-norm between successive smoothed curves below which a shape has converged.
    double conv_eps = 0.1;
    /// Phase diagram: alpha schedule and walk resolution.
    std::vector<double> alphas{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    double dt = 0.05;
    std::size_t max_steps = 400;
    /// Wall-clock limit per cell in seconds; exceeded cells become inconclusive.
    double cell_seconds = 300.0;
    /// Bisection probes between the last unimodal and first bimodal maturity.
    int refine_probes = 3;
};

struct ShapeAtProbe {
    double alpha = 0.0;
    std::size_t n_steps = 0;
    ModalityClass cls = ModalityClass::unimodal;
    CurvatureEstimate curvature;
    /// Sup-norm to the previous probe's smoothed curve (NaN for the first).
    double change = 0.0;
    /// Sign of the curvature is resolved at z_sign.
    bool resolved = false;
    /// Symmetrized curve on budget.coarse_bins bins.
    std::optional<DensityCurve> curve;
};

/// Shape of a histogram: unimodal or bimodal from the sign of the projected
/// curvature when resolved at budget.z_sign, M or U from the coarse curve.
/// Leaves alpha, n_steps and change unset.
ShapeAtProbe classify_histogram(const Histogram& hist, const SweepBudget& budget = {});

/// Shape of the Monte Carlo weight density at one (mu, chi, alpha).
ShapeAtProbe probe_shape(double mu, const CorrelationScale& chi, std::size_t n_steps, double dt,
                         const SweepBudget& budget, const std::optional<DensityCurve>& previous);

struct ChiVerdict {
    double chi = 0.0;
    CellVerdict verdict = CellVerdict::inconclusive;
    std::optional<std::size_t> n_c;
    std::vector<ShapeAtProbe> trajectory;
};

struct ChiCriticalResult {
    /// Largest chi on the grid judged converged-unimodal.
    std::optional<double> chi_c;
    std::vector<ChiVerdict> per_chi;
};

/// For every chi, walks of n_schedule[k] steps of size dt: "transition" at
/// the first N with a resolved bimodal shape (N_c), "no_transition" once the
/// shape is unimodal and the smoothed curve has converged.
ChiCriticalResult chi_critical(double mu, const std::vector<double>& chi_grid,
                               const std::vector<std::size_t>& n_schedule, double dt = 1.0,
                               const SweepBudget& budget = {});

/// One cell: shapes along budget.alphas, verdict, and alpha_c. The bracket
/// between the last unimodal and first bimodal probe is bisected in log alpha
/// on the sign of the estimated curvature, then interpolated linearly.
PhaseCell phase_cell(double mu, double inv_chi, const SweepBudget& budget);

PhaseDiagram phase_diagram(const std::vector<double>& mu_grid, const std::vector<double>& inv_chi_grid,
                           const SweepBudget& budget = {});

}  // namespace optrace::modality
