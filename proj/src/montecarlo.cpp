#include "optrace/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "optrace/analytic.hpp"
#include "optrace/error.hpp"

namespace optrace::mc {
namespace {

constexpr std::uint64_t kChunk = 1u << 14;
constexpr std::uint64_t kRaceStream = 0;
constexpr std::uint64_t kTauStream = 1;
constexpr std::uint64_t kBootstrapStream = 2;

unsigned worker_count(unsigned requested, std::uint64_t chunks) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(chunks, 1)));
}

// Runs body(chunk_index) for every chunk on a pool of workers.
template <class Body>
void for_each_chunk(std::uint64_t chunks, unsigned threads, Body&& body) {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&](unsigned id) {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) body(id, c);
    };
    const unsigned n = worker_count(threads, chunks);
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker, i);
    worker(0);
    for (auto& t : pool) t.join();
}

// Running sum of exp(x) kept as s * exp(m).
struct LogSum {
    double s = 0.0;
    double m = 0.0;

    void add(double x, double weight) {
        if (x - m > 600.0) {
            s *= std::exp(m - x);
            m = x;
        }
        s += weight * std::exp(x - m);
    }
    double log() const { return std::log(s) + m; }
};

std::size_t mirrored_bin(const Histogram& h, double d) {
    if (d <= 0.0) return h.bin_of(1.0 / (1.0 + std::exp(-d)));
    return h.bins() - 1 - h.bin_of(1.0 / (1.0 + std::exp(d)));
}

}  // namespace

std::string to_string(Style s) { return s == Style::european ? "european" : "asian"; }

double WalkConfig::sigma_step() const noexcept { return std::sqrt(chi.step_var() * dt); }

WalkConfig WalkConfig::resolved() const {
    WalkConfig c = *this;
    if (alpha_target) {
        const double n = std::round(2.0 * *alpha_target / dt);
        c.n_steps = static_cast<std::size_t>(std::max(1.0, n));
    }
    return c;
}

void WalkConfig::validate() const {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
    if (n_paths < 1) throw ValidationError("n_paths must be >= 1");
    if (bins < 2) throw ValidationError("bins must be >= 2");
    if (alpha_target && !(*alpha_target > 0.0)) throw ValidationError("alpha target must be positive");
}

WalkConfig config_for_alpha(double alpha, double mu, CorrelationScale chi, std::uint64_t n_paths,
                            std::uint64_t seed, double dt_hint, std::size_t max_steps) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(dt_hint > 0.0) || max_steps < 1) throw ValidationError("invalid step settings");
    WalkConfig c;
    const double n = std::clamp(std::round(2.0 * alpha / dt_hint), 1.0, static_cast<double>(max_steps));
    c.n_steps = static_cast<std::size_t>(n);
    c.dt = 2.0 * alpha / n;
    c.mu = mu;
    c.chi = chi;
    c.n_paths = n_paths;
    c.seed = seed;
    return c;
}

IncrementPair sample_increment_pair(rng::PathStream& stream, const CorrelationScale& chi, double dt) {
    const auto z = stream.normal_pair();
    const double u = std::sqrt(chi.g_sq() * dt) * z[0];
    const double v = std::sqrt(2.0 * dt) * z[1];
    return {0.5 * (v - u), 0.5 * (v + u)};
}

Histogram run_race(const WalkConfig& config, Style style) { return run_race(config, style, nullptr); }

Histogram run_race(const WalkConfig& cfg_in, Style style, const std::function<void(double)>& on_log_ratio) {
    const WalkConfig cfg = cfg_in.resolved();
    cfg.validate();
    const std::uint64_t chunks = (cfg.n_paths + kChunk - 1) / kChunk;
    const unsigned workers = worker_count(cfg.threads, chunks);
    std::vector<Histogram> local(workers, Histogram(cfg.bins));

    const double drift = -0.5 * cfg.mu * cfg.chi.step_var() * cfg.dt;
    const double su = std::sqrt(cfg.chi.g_sq() * cfg.dt);
    const double sv = std::sqrt(2.0 * cfg.dt);
    const std::size_t n_steps = cfg.n_steps;

    for_each_chunk(chunks, workers, [&](unsigned id, std::uint64_t c) {
        Histogram& h = local[id];
        const std::uint64_t end = std::min(cfg.n_paths, (c + 1) * kChunk);
        for (std::uint64_t p = c * kChunk; p < end; ++p) {
            rng::PathStream st(cfg.seed, kRaceStream, p);
            double x1 = 0.0, x2 = 0.0;
            LogSum s1, s2;
            s1.add(0.0, 0.5);
            s2.add(0.0, 0.5);
            for (std::size_t n = 1; n <= n_steps; ++n) {
                const auto z = st.normal_pair();
                const double u = su * z[0];
                const double v = sv * z[1];
                x1 += drift + 0.5 * (v - u);
                x2 += drift + 0.5 * (v + u);
                if (style == Style::asian) {
                    const double wgt = n == n_steps ? 0.5 : 1.0;
                    s1.add(x1, wgt);
                    s2.add(x2, wgt);
                }
            }
            double d = style == Style::asian ? s1.log() - s2.log() : x1 - x2;
            if (cfg.swap_walks) d = -d;
            if (!std::isfinite(d)) {
                ++h.rejected;
                continue;
            }
            if (on_log_ratio) on_log_ratio(d);
            h.add_to_bin(mirrored_bin(h, d));
        }
    });

    Histogram out(cfg.bins);
    for (const auto& h : local) out.merge(h);
    out.seed = cfg.seed;
    return out;
}

EffectiveMaturityFit fit_effective_maturity(const Histogram& hist, double w_lo, double w_hi) {
    if (hist.n_paths() < 10000) throw ValidationError("fit needs at least 1e4 samples");
    const auto& counts = hist.counts();
    const auto occupied = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    if (occupied <= 2) throw DegenerateDistributionError("histogram mass sits in at most two bins");

    const auto centers = hist.centers();
    const double norm = static_cast<double>(hist.n_paths()) * hist.bin_width();
    std::vector<double> p(counts.size()), s(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = static_cast<double>(counts[i]) / norm;
        s[i] = std::sqrt(std::max<double>(static_cast<double>(counts[i]), 1.0)) / norm;
    }
    const auto f = analytic::fit_logit_normal(centers, p, s, w_lo, w_hi);
    return {f.alpha_tilde, f.residual, f.max_relative, f.points};
}

std::vector<MomentEstimate> sample_tau_moments(const WalkConfig& cfg_in, std::span<const int> orders,
                                               std::size_t bootstrap_reps) {
    const WalkConfig cfg = cfg_in.resolved();
    cfg.validate();
    const std::uint64_t chunks = (cfg.n_paths + kChunk - 1) / kChunk;
    const std::size_t k = orders.size();
    // sums[c * k + j]: sum over the chunk of tau^-orders[j].
    std::vector<double> sums(chunks * k, 0.0);
    std::vector<double> sizes(chunks, 0.0);

    const double s2dt = cfg.chi.step_var() * cfg.dt;
    const double drift = -0.5 * cfg.mu * s2dt;
    const double sd = std::sqrt(s2dt);
    const std::size_t n_steps = cfg.n_steps;

    for_each_chunk(chunks, cfg.threads, [&](unsigned, std::uint64_t c) {
        const std::uint64_t end = std::min(cfg.n_paths, (c + 1) * kChunk);
        for (std::uint64_t p = c * kChunk; p < end; ++p) {
            rng::PathStream st(cfg.seed, kTauStream, p);
            double x = 0.0;
            LogSum s;
            s.add(0.0, 0.5);
            for (std::size_t n = 1; n <= n_steps; n += 2) {
                const auto z = st.normal_pair();
                x += drift + sd * z[0];
                s.add(x, n == n_steps ? 0.5 : 1.0);
                if (n + 1 <= n_steps) {
                    x += drift + sd * z[1];
                    s.add(x, n + 1 == n_steps ? 0.5 : 1.0);
                }
            }
            const double log_tau = s.log() + std::log(cfg.dt);
            for (std::size_t j = 0; j < k; ++j) sums[c * k + j] += std::exp(-orders[j] * log_tau);
        }
        sizes[c] = static_cast<double>(end - c * kChunk);
    });

    std::vector<MomentEstimate> out(k);
    const double total = static_cast<double>(cfg.n_paths);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::uint64_t c = 0; c < chunks; ++c) s += sums[c * k + j];
        out[j].order = orders[j];
        out[j].value = orders[j] == 0 ? 1.0 : s / total;
    }
    if (chunks >= 2 && bootstrap_reps >= 2) {
        std::vector<std::vector<double>> reps(k);
        for (std::size_t r = 0; r < bootstrap_reps; ++r) {
            rng::PathStream st(cfg.seed, kBootstrapStream, r);
            std::vector<double> acc(k, 0.0);
            double n = 0.0;
            for (std::uint64_t i = 0; i < chunks; ++i) {
                const std::uint64_t c = st.next_u64() % chunks;
                n += sizes[c];
                for (std::size_t j = 0; j < k; ++j) acc[j] += sums[c * k + j];
            }
            for (std::size_t j = 0; j < k; ++j) reps[j].push_back(acc[j] / n);
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (orders[j] == 0) continue;
            double m = 0.0, v = 0.0;
            for (double x : reps[j]) m += x;
            m /= static_cast<double>(reps[j].size());
            for (double x : reps[j]) v += (x - m) * (x - m);
            out[j].std_error = std::sqrt(v / static_cast<double>(reps[j].size() - 1));
        }
    }
    return out;
}

GoodnessOfFit chi_square_gof(const Histogram& hist, const std::function<double(double)>& cdf,
                             double min_expected) {
    const auto edges = hist.edges();
    const auto& counts = hist.counts();
    const double n = static_cast<double>(hist.n_paths());
    std::vector<std::pair<double, double>> groups;  // (observed, expected)
    double obs = 0.0, exp = 0.0;
    double prev_cdf = cdf(0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double c = cdf(edges[i + 1]);
        obs += static_cast<double>(counts[i]);
        exp += n * (c - prev_cdf);
        prev_cdf = c;
        if (exp >= min_expected) {
            groups.emplace_back(obs, exp);
            obs = exp = 0.0;
        }
    }
    if (exp > 0.0 || obs > 0.0) {
        if (groups.empty()) {
            groups.emplace_back(obs, exp);
        } else {
            groups.back().first += obs;
            groups.back().second += exp;
        }
    }
    GoodnessOfFit g;
    for (const auto& [o, e] : groups) g.statistic += (o - e) * (o - e) / e;
    g.dof = groups.size() > 1 ? groups.size() - 1 : 1;
    g.p_value = boost::math::gamma_q(0.5 * static_cast<double>(g.dof), 0.5 * g.statistic);
    return g;
}

}  // namespace optrace::mc
