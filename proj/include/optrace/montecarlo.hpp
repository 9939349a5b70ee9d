#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "optrace/core.hpp"
#include "optrace/rng.hpp"

/// Paired discrete random walks and the weights of their two options.
///
/// Each walk has unit volatility: per step the log-price moves by
/// -(mu/2) s^2 dt + eta with Var(eta) = s^2 dt, s^2 = step_var(chi), and the
/// effective maturity is alpha = N dt / 2.
namespace optrace::mc {

enum class Style { european, asian };

std::string to_string(Style s);

struct WalkConfig {
    std::size_t n_steps = 100;
    double dt = 0.01;
    double mu = 0.0;
    CorrelationScale chi = CorrelationScale::independent();
    std::uint64_t n_paths = 1'000'000;
    std::uint64_t seed = 0;
    /// When set, n_steps is derived from it (see resolved()).
    std::optional<double> alpha_target;
    std::size_t bins = 200;
    /// Worker threads; 0 means hardware concurrency.
    unsigned threads = 0;
    /// Exchange the roles of the two walks.
    bool swap_walks = false;

    /// alpha = n_steps * dt / 2.
    double alpha() const noexcept { return 0.5 * static_cast<double>(n_steps) * dt; }
    /// Per-step standard deviation of each increment, sqrt(step_var * dt).
    double sigma_step() const noexcept;
    /// Copy with n_steps = max(1, round(2 alpha_target / dt)) when a target is set.
    WalkConfig resolved() const;
    /// Validates and throws ValidationError.
    void validate() const;
};

/// Step count and size for a target alpha: dt close to dt_hint with
/// n_steps <= max_steps, and n_steps * dt / 2 == alpha exactly.
WalkConfig config_for_alpha(double alpha, double mu, CorrelationScale chi, std::uint64_t n_paths,
                            std::uint64_t seed, double dt_hint = 0.01, std::size_t max_steps = 400);

struct IncrementPair {
    double db1;
    double db2;
};

/// (dB1, dB2) = ((v - u)/2, (v + u)/2) with u ~ N(0, g^2 dt), v ~ N(0, 2 dt).
IncrementPair sample_increment_pair(rng::PathStream& stream, const CorrelationScale& chi, double dt);

/// Simulates n_paths pairs and bins the weight of walk 1. Walk pairs are
/// generated from counter-based per-path streams and reduced with integer
/// counts, so the histogram does not depend on the number of threads.
/// The Asian functional uses the trapezoid sum of exp(x_n), n = 0..N.
Histogram run_race(const WalkConfig& config, Style style);

/// As run_race with a per-path callback receiving ln(tau_1 / tau_2) (or
/// x_N^1 - x_N^2 for the European style). Callbacks run on worker threads
/// and must be thread safe.
Histogram run_race(const WalkConfig& config, Style style, const std::function<void(double)>& on_log_ratio);

struct EffectiveMaturityFit {
    double alpha_tilde = 0.0;
    /// Relative L2 misfit of the interior bins.
    double residual = 0.0;
    double max_relative = 0.0;
    std::size_t bins_used = 0;
};

/// Least-squares logit-normal fit over bins with centers in [w_lo, w_hi],
/// weighted by the Poisson standard errors.
EffectiveMaturityFit fit_effective_maturity(const Histogram& hist, double w_lo = 0.05, double w_hi = 0.95);

struct MomentEstimate {
    int order = 0;
    double value = 0.0;
    double std_error = 0.0;
};

/// E(1/tau^n) for one walk, tau = dt * trapezoid sum (unit volatility, so
/// T = 2 alpha). Standard errors by a bootstrap over path batches.
std::vector<MomentEstimate> sample_tau_moments(const WalkConfig& config, std::span<const int> orders,
                                               std::size_t bootstrap_reps = 200);

struct GoodnessOfFit {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 0.0;
};

/// Pearson chi-square of the histogram against a CDF on [0, 1]. Adjacent
/// bins are pooled until each expected count is at least min_expected.
GoodnessOfFit chi_square_gof(const Histogram& hist, const std::function<double(double)>& cdf,
                             double min_expected = 5.0);

}  // namespace optrace::mc
