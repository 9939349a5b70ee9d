#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "optrace/core.hpp"
#include "optrace/psi.hpp"

/// Asian weight density from a density of tau:
///   P(w) = int_0^inf u Psi(w u) Psi((1 - w) u) du.
namespace optrace::convolve {

/// A density of tau > 0 together with the ln(tau) range carrying its mass.
struct TauDensity {
    std::function<double(double)> density;
    double log_tau_lo = -30.0;
    double log_tau_hi = 30.0;
    /// ln(tau) locations where the density turns over (quadrature hints).
    std::vector<double> log_breakpoints;
    std::string label;
};

struct QuadConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-10;
    std::size_t max_intervals = 4000;
};

/// The alpha -> infinity density Psi_inf for mu > 0.
TauDensity tau_density_infinity(const ModelParams& params);

/// Mass of a tau density over its declared support.
double tau_density_mass(const TauDensity& psi);

/// Weight density at w by quadrature over v = ln u. The two factors are
/// evaluated at min(w, 1 - w) and its complement, so p(w) and p(1 - w) share
/// one computation.
double weight_density_from_psi(const TauDensity& psi, double w, const QuadConfig& cfg = {});

/// Mass of the weight density on (0, w_edge], w_edge < 1/2, by quadrature in
/// the log-odds variable.
double weight_edge_mass(const TauDensity& psi, double w_edge, const QuadConfig& cfg = {});

/// Total mass of the weight density, by quadrature in the log-odds variable.
double weight_density_mass(const TauDensity& psi, const QuadConfig& cfg = {});

/// Tabulated weight density; its normalization estimate is the quadrature
/// mass of the density (weight_density_mass). The measured tau mass is recorded as `psi_mass`; a deviation above 1e-3
/// adds a `warning` entry to the metadata.
DensityCurve weight_curve_from_psi(const TauDensity& psi, std::span<const double> grid,
                                   CurveMeta meta, const QuadConfig& cfg = {});

enum class NegMuMethod { exact, approx };

std::string to_string(NegMuMethod m);

/// Memoized Psi(tau) for mu < 0: the slowly varying factor of the density is
/// tabulated as a logarithm on a uniform ln(tau') grid and interpolated with a
/// cubic B-spline; the closed-form prefactor is applied exactly. Immutable
/// after construction.
class PsiCache {
public:
    PsiCache(const ModelParams& params, const EffectiveMaturity& alpha, NegMuMethod method,
             double nodes_per_decade = 40.0);
    /// Interpolated density per unit tau; 0 outside the tabulated range.
    double operator()(double tau) const;
    TauDensity as_tau_density() const;

    std::size_t nodes() const noexcept;
    double log_reduced_lo() const noexcept;
    double log_reduced_hi() const noexcept;
    NegMuMethod method() const noexcept { return method_; }
    /// False when the nodes were evaluated outside the validated regime.
    bool validated() const noexcept { return validated_; }

private:
    struct Table;
    ModelParams params_;
    double alpha_;
    NegMuMethod method_;
    bool validated_ = true;
    std::shared_ptr<const Table> table_;
};

/// Asian weight density for mu < 0 through a PsiCache built once. The
/// approximate tau law is rescaled to unit mass before the convolution.
class NegativeMuWeightDensity {
public:
    NegativeMuWeightDensity(const ModelParams& params, const EffectiveMaturity& alpha,
                            NegMuMethod method, double nodes_per_decade = 40.0);

    double operator()(double w) const;
    DensityCurve curve(std::span<const double> grid) const;
    double mass() const;
    /// Mass of the tau density before any rescaling.
    double raw_psi_mass() const noexcept { return raw_mass_; }
    const PsiCache& cache() const noexcept { return cache_; }
    const TauDensity& tau_density() const noexcept { return tau_; }

private:
    ModelParams params_;
    double alpha_;
    PsiCache cache_;
    TauDensity tau_;
    double raw_mass_ = 1.0;
};

/// One-shot evaluation (builds a cache each call).
double asian_weight_density_negative_mu(double w, const ModelParams& params,
                                        const EffectiveMaturity& alpha, NegMuMethod method);

}  // namespace optrace::convolve
