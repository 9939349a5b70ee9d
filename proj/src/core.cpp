#include "optrace/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "optrace/error.hpp"
#include "optrace/io.hpp"

namespace optrace {

ModelParams::ModelParams(double sigma, Drift drift, double s0) : sigma_(sigma), s0_(s0) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("volatility sigma must be positive and finite");
    }
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw ValidationError("initial price s0 must be positive and finite");
    }
    const double sig2 = sigma * sigma;
    if (const auto* idx = std::get_if<DriftIndex>(&drift)) {
        if (!std::isfinite(idx->value)) throw ValidationError("drift index mu must be finite");
        mu_ = idx->value;
        omega_ = 0.5 * sig2 * (1.0 - mu_);
    } else {
        const double omega = std::get<DriftRate>(drift).value;
        if (!std::isfinite(omega)) throw ValidationError("drift rate omega must be finite");
        omega_ = omega;
        mu_ = 1.0 - 2.0 * omega / sig2;
    }
}

ModelParams make_params(double sigma, Drift drift, double s0) {
    return ModelParams(sigma, drift, s0);
}

EffectiveMaturity::EffectiveMaturity(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("effective maturity alpha must be finite and >= 0");
    }
}

EffectiveMaturity EffectiveMaturity::from_time(double sigma, double maturity) {
    if (!(sigma > 0.0)) throw ValidationError("volatility sigma must be positive");
    if (!(maturity >= 0.0) || !std::isfinite(maturity)) {
        throw ValidationError("maturity T must be finite and >= 0");
    }
    EffectiveMaturity m(0.5 * sigma * sigma * maturity);
    m.maturity_ = maturity;
    m.sigma_ = sigma;
    return m;
}

double EffectiveMaturity::maturity_for(double sigma) const {
    if (!(sigma > 0.0)) throw ValidationError("volatility sigma must be positive");
    return 2.0 * alpha_ / (sigma * sigma);
}

EffectiveMaturity alpha_from_time(double sigma, double maturity) {
    return EffectiveMaturity::from_time(sigma, maturity);
}

CorrelationScale CorrelationScale::finite(double chi) {
    if (std::isnan(chi) || !(chi > 0.0)) {
        throw ValidationError("correlation scale chi must lie in (0, +inf]");
    }
    CorrelationScale c;
    if (std::isinf(chi)) return c;
    c.independent_ = false;
    c.chi_ = chi;
    return c;
}

CorrelationScale CorrelationScale::from_inverse(double inv_chi) {
    if (std::isnan(inv_chi) || inv_chi < 0.0 || std::isinf(inv_chi)) {
        throw ValidationError("1/chi must be finite and >= 0");
    }
    if (inv_chi == 0.0) return independent();
    return finite(1.0 / inv_chi);
}

double CorrelationScale::g_sq() const noexcept {
    if (independent_) return 2.0;
    // 2 chi^2 / (2 + chi^2), written to stay accurate for both chi -> 0 and chi -> inf.
    const double c2 = chi_ * chi_;
    return c2 < 1.0 ? 2.0 * c2 / (2.0 + c2) : 2.0 / (1.0 + 2.0 / c2);
}

double CorrelationScale::step_var() const noexcept {
    if (independent_) return 1.0;
    return 1.0 - 1.0 / (2.0 + chi_ * chi_);
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::analytic: return "analytic";
        case Provenance::quadrature: return "quadrature";
        case Provenance::mc: return "mc";
        case Provenance::limiting: return "limiting";
    }
    return "unknown";
}

CurveMeta& CurveMeta::set(std::string key, std::string value) {
    for (auto& [k, v] : params) {
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    }
    params.emplace_back(std::move(key), std::move(value));
    return *this;
}

CurveMeta& CurveMeta::set(std::string key, double value) {
    return set(std::move(key), format_double(value));
}

std::optional<std::string> CurveMeta::get(const std::string& key) const {
    for (const auto& [k, v] : params) {
        if (k == key) return v;
    }
    return std::nullopt;
}

NormRule NormRule::trapezoid(double left_tail, double right_tail) {
    NormRule r;
    r.kind = Kind::trapezoid;
    r.left_tail = left_tail;
    r.right_tail = right_tail;
    return r;
}

NormRule NormRule::midpoint(double bin_width) {
    NormRule r;
    r.kind = Kind::midpoint;
    r.bin_width = bin_width;
    return r;
}

NormRule NormRule::given(double mass) {
    NormRule r;
    r.kind = Kind::given;
    r.mass = mass;
    return r;
}

DensityCurve::DensityCurve(std::vector<double> grid, std::vector<double> values, CurveMeta meta,
                           NormRule rule)
    : grid_(std::move(grid)), values_(std::move(values)), meta_(std::move(meta)) {
    if (grid_.empty() || grid_.size() != values_.size()) {
        throw ValidationError("density curve needs a non-empty grid matching its values");
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!(grid_[i] > 0.0 && grid_[i] < 1.0)) {
            throw ValidationError("density curve grid must lie inside (0, 1)");
        }
        if (i > 0 && !(grid_[i] > grid_[i - 1])) {
            throw ValidationError("density curve grid must be strictly increasing");
        }
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw ValidationError("density values must be finite and >= 0");
        }
    }

    if (rule.kind == NormRule::Kind::given) {
        norm_ = rule.mass;
        return;
    }
    if (rule.kind == NormRule::Kind::midpoint) {
        double s = 0.0;
        for (double v : values_) s += v;
        norm_ = s * rule.bin_width;
        return;
    }
    double s = 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        s += 0.5 * (values_[i] + values_[i - 1]) * (grid_[i] - grid_[i - 1]);
    }
    const double left =
        std::isnan(rule.left_tail) ? 0.5 * values_.front() * grid_.front() : rule.left_tail;
    const double right =
        std::isnan(rule.right_tail) ? 0.5 * values_.back() * (1.0 - grid_.back()) : rule.right_tail;
    norm_ = s + left + right;
}

double DensityCurve::at(double w) const {
    if (w < grid_.front() || w > grid_.back()) {
        throw DomainError("density curve evaluated outside its grid");
    }
    auto it = std::lower_bound(grid_.begin(), grid_.end(), w);
    const auto i = static_cast<std::size_t>(it - grid_.begin());
    if (grid_[i] == w || i == 0) return values_[i];
    const double t = (w - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

double DensityCurve::max_asymmetry() const {
    const std::size_t n = grid_.size();
    bool mirrored = true;
    for (std::size_t i = 0; i < n && mirrored; ++i) {
        mirrored = std::abs(grid_[i] + grid_[n - 1 - i] - 1.0) <= 1e-12;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double other;
        if (mirrored) {
            other = values_[n - 1 - i];
        } else {
            const double m = 1.0 - grid_[i];
            if (m < grid_.front() || m > grid_.back()) continue;
            other = at(m);
        }
        worst = std::max(worst, std::abs(values_[i] - other));
    }
    return worst;
}

DensityCurve DensityCurve::scaled(double factor) const {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    DensityCurve out(grid_, std::move(v), meta_, NormRule::midpoint(0.0));
    out.norm_ = norm_ * factor;
    return out;
}

std::vector<double> open_grid(std::size_t n) {
    if (n == 0) throw ValidationError("grid needs at least one point");
    std::vector<double> g(n);
    const double denom = static_cast<double>(n + 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i + 1) / denom;
    return g;
}

Histogram::Histogram(std::size_t bins) : counts_(bins, 0) {
    if (bins < 2) throw ValidationError("histogram needs at least two bins");
}

std::vector<double> Histogram::edges() const {
    std::vector<double> e(bins() + 1);
    for (std::size_t i = 0; i <= bins(); ++i) {
        e[i] = static_cast<double>(i) / static_cast<double>(bins());
    }
    return e;
}

std::vector<double> Histogram::centers() const {
    std::vector<double> c(bins());
    for (std::size_t i = 0; i < bins(); ++i) {
        c[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(bins());
    }
    return c;
}

std::size_t Histogram::bin_of(double w) const {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("weight outside [0, 1]");
    const auto b = static_cast<std::size_t>(w * static_cast<double>(bins()));
    return std::min(b, bins() - 1);
}

void Histogram::add_to_bin(std::size_t bin) {
    if (bin >= bins()) throw DomainError("histogram bin index out of range");
    ++counts_[bin];
    ++n_paths_;
}

void Histogram::merge(const Histogram& other) {
    if (other.bins() != bins()) throw ValidationError("cannot merge histograms of different sizes");
    for (std::size_t i = 0; i < bins(); ++i) counts_[i] += other.counts_[i];
    n_paths_ += other.n_paths_;
    rejected += other.rejected;
}

DensityCurve Histogram::to_density_curve(CurveMeta meta) const {
    if (n_paths_ == 0) throw ValidationError("empty histogram");
    const double scale = 1.0 / (static_cast<double>(n_paths_) * bin_width());
    std::vector<double> v(bins());
    for (std::size_t i = 0; i < bins(); ++i) v[i] = static_cast<double>(counts_[i]) * scale;
    meta.provenance = Provenance::mc;
    meta.set("paths", static_cast<double>(n_paths_));
    meta.set("seed", std::to_string(seed));
    return DensityCurve(centers(), std::move(v), std::move(meta), NormRule::midpoint(bin_width()));
}

std::vector<double> Histogram::standard_errors() const {
    std::vector<double> se(bins());
    const double n = static_cast<double>(n_paths_);
    for (std::size_t i = 0; i < bins(); ++i) {
        const double p = static_cast<double>(counts_[i]) / n;
        se[i] = std::sqrt(p * (1.0 - p) / n) / bin_width();
    }
    return se;
}

std::string to_string(ModalityClass c) {
    switch (c) {
        case ModalityClass::unimodal: return "unimodal";
        case ModalityClass::uniform_plateau: return "uniform_plateau";
        case ModalityClass::bimodal_M: return "bimodal_M";
        case ModalityClass::bimodal_U: return "bimodal_U";
    }
    return "unknown";
}

std::string to_string(CellVerdict v) {
    switch (v) {
        case CellVerdict::no_transition: return "no_transition";
        case CellVerdict::transition: return "transition";
        case CellVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

const PhaseCell& PhaseDiagram::cell(std::size_t mu_index, std::size_t inv_chi_index) const {
    if (mu_index >= mu_grid.size() || inv_chi_index >= inv_chi_grid.size()) {
        throw std::out_of_range("phase diagram cell index");
    }
    return cells.at(mu_index * inv_chi_grid.size() + inv_chi_index);
}

}  // namespace optrace
