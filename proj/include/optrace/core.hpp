#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace optrace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

/// Dimensionless drift index mu = 1 - 2 omega / sigma^2.
struct DriftIndex {
    double value;
};

/// Drift rate omega of the price SDE (per unit time), e.g. r - delta.
struct DriftRate {
    double value;
};

using Drift = std::variant<DriftIndex, DriftRate>;

/// Volatility, drift and initial price of one geometric Brownian motion.
///
/// Both drift representations are stored and kept consistent. The initial
/// price is informational: every weight density is scale-free.
class ModelParams {
public:
    ModelParams(double sigma, Drift drift, double s0 = 1.0);

    double sigma() const noexcept { return sigma_; }
    double sigma_sq() const noexcept { return sigma_ * sigma_; }
    double mu() const noexcept { return mu_; }
    double omega() const noexcept { return omega_; }
    double s0() const noexcept { return s0_; }

private:
    double sigma_;
    double mu_;
    double omega_;
    double s0_;
};

ModelParams make_params(double sigma, Drift drift, double s0 = 1.0);

// ---------------------------------------------------------------------------
// Effective maturity alpha = sigma^2 T / 2
// ---------------------------------------------------------------------------

class EffectiveMaturity {
public:
    explicit EffectiveMaturity(double alpha);

    static EffectiveMaturity from_time(double sigma, double maturity);

    double alpha() const noexcept { return alpha_; }
    /// Maturity T, available when constructed from (sigma, T).
    std::optional<double> maturity() const noexcept { return maturity_; }
    std::optional<double> sigma() const noexcept { return sigma_; }
    /// T = 2 alpha / sigma^2 for an arbitrary volatility.
    double maturity_for(double sigma) const;

private:
    double alpha_;
    std::optional<double> maturity_;
    std::optional<double> sigma_;
};

EffectiveMaturity alpha_from_time(double sigma, double maturity);

// ---------------------------------------------------------------------------
// Correlation scale of the coupled increments
// ---------------------------------------------------------------------------

/// Spring-coupled increments (dB1, dB2). Independence (chi = +inf) is a
/// distinct state rather than a large number.
class CorrelationScale {
public:
    static CorrelationScale independent() noexcept { return CorrelationScale(); }
    /// chi in (0, +inf]; +inf yields the independent state.
    static CorrelationScale finite(double chi);
    /// From 1/chi >= 0; zero yields the independent state.
    static CorrelationScale from_inverse(double inv_chi);

    bool is_independent() const noexcept { return independent_; }
    double chi() const noexcept { return independent_ ? kInf : chi_; }
    double inverse_chi() const noexcept { return independent_ ? 0.0 : 1.0 / chi_; }

    /// g^2 = 2 chi^2 / (2 + chi^2): variance of dB2 - dB1 per unit dt.
    double g_sq() const noexcept;
    /// (1 + chi^2) / (2 + chi^2): marginal variance of each increment per unit dt.
    double step_var() const noexcept;
    double u_var() const noexcept { return g_sq(); }
    double v_var() const noexcept { return 2.0; }

private:
    CorrelationScale() = default;
    bool independent_ = true;
    double chi_ = kInf;
};

// ---------------------------------------------------------------------------
// Density curves and histograms on (0, 1)
// ---------------------------------------------------------------------------

enum class Provenance { analytic, quadrature, mc, limiting };

std::string to_string(Provenance p);

struct CurveMeta {
    Provenance provenance = Provenance::analytic;
    /// Generating parameters as ordered key/value pairs (model, alpha, mu, ...).
    std::vector<std::pair<std::string, std::string>> params;

    CurveMeta& set(std::string key, std::string value);
    CurveMeta& set(std::string key, double value);
    std::optional<std::string> get(const std::string& key) const;
};

/// How the normalization estimate is formed.
struct NormRule {
    enum class Kind { trapezoid, midpoint, given };
    Kind kind = Kind::trapezoid;
    /// Mass on [0, grid.front()] and [grid.back(), 1]; NaN means "estimate
    /// with a triangle to zero".
    double left_tail = std::numeric_limits<double>::quiet_NaN();
    double right_tail = std::numeric_limits<double>::quiet_NaN();
    /// Uniform bin width for the midpoint rule.
    double bin_width = 0.0;
    /// Mass computed elsewhere (e.g. by quadrature of the density itself).
    double mass = 0.0;

    static NormRule trapezoid(double left_tail, double right_tail);
    static NormRule midpoint(double bin_width);
    static NormRule given(double mass);
};

/// Density values on a strictly increasing grid inside (0, 1).
class DensityCurve {
public:
    DensityCurve(std::vector<double> grid, std::vector<double> values, CurveMeta meta,
                 NormRule rule = {});

    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const CurveMeta& meta() const noexcept { return meta_; }
    double norm_estimate() const noexcept { return norm_; }
    std::size_t size() const noexcept { return grid_.size(); }

    /// Linear interpolation; throws DomainError outside [grid.front(), grid.back()].
    double at(double w) const;
    /// max |p(w) - p(1 - w)| over the grid.
    double max_asymmetry() const;
    /// Same curve with every value multiplied by factor > 0.
    DensityCurve scaled(double factor) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    CurveMeta meta_;
    double norm_ = 0.0;
};

/// Uniform interior grid w_i = i / (n + 1), i = 1..n, excluding 0 and 1.
std::vector<double> open_grid(std::size_t n = 2001);

/// Equal-width histogram of weights over [0, 1].
class Histogram {
public:
    explicit Histogram(std::size_t bins = 200);

    std::size_t bins() const noexcept { return counts_.size(); }
    double bin_width() const noexcept { return 1.0 / static_cast<double>(counts_.size()); }
    std::vector<double> edges() const;
    std::vector<double> centers() const;
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t n_paths() const noexcept { return n_paths_; }

    std::size_t bin_of(double w) const;
    void add(double w) { add_to_bin(bin_of(w)); }
    void add_to_bin(std::size_t bin);
    void merge(const Histogram& other);

    /// Density estimate count / (n * width) at bin centers; integrates to one
    /// exactly under the midpoint rule.
    DensityCurve to_density_curve(CurveMeta meta) const;
    /// Standard error of the density estimate in every bin.
    std::vector<double> standard_errors() const;

    std::uint64_t seed = 0;
    std::uint64_t rejected = 0;
    /// Kernel bandwidth used by downstream smoothing; 0 when unsmoothed.
    double bandwidth = 0.0;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t n_paths_ = 0;
};

// ---------------------------------------------------------------------------
// Shape classification results
// ---------------------------------------------------------------------------

enum class ModalityClass { unimodal, uniform_plateau, bimodal_M, bimodal_U };

std::string to_string(ModalityClass c);

struct ModalityReport {
    ModalityClass cls = ModalityClass::unimodal;
    std::vector<double> mode_locations;
    /// Discrete second difference of the density at w = 1/2.
    double center_curvature = 0.0;
    /// Prominence of each reported mode, relative to the curve maximum.
    std::vector<double> prominences;
    /// (max - min) / mean of the density on [0.2, 0.8].
    double plateau_spread = 0.0;
};

enum class CellVerdict { no_transition, transition, inconclusive };

std::string to_string(CellVerdict v);

struct PhaseCell {
    double mu = 0.0;
    double inv_chi = 0.0;
    /// Shape at each probed maturity, in increasing order of alpha.
    std::vector<std::pair<double, ModalityClass>> trajectory;
    CellVerdict verdict = CellVerdict::inconclusive;
    /// Critical maturity when verdict == transition.
    std::optional<double> alpha_c;
    /// Step count of the walk at alpha_c.
    std::optional<std::size_t> n_c;
    /// Shape past the transition (bimodal_M or bimodal_U).
    std::optional<ModalityClass> bimodal_kind;
    bool converged = false;
};

struct PhaseDiagram {
    std::vector<double> mu_grid;
    std::vector<double> inv_chi_grid;
    /// Row-major: cells[i * inv_chi_grid.size() + j] for mu_grid[i], inv_chi_grid[j].
    std::vector<PhaseCell> cells;

    const PhaseCell& cell(std::size_t mu_index, std::size_t inv_chi_index) const;
};

}  // namespace optrace
