#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "aeroflow/error.hpp"
#include "aeroflow/measure.hpp"

// Fundamental-diagram calibration: per-density-bin percentile filtering of
// the flow-density cloud, least-squares fit of q(k) = k * v_f * exp(-alpha*k),
// summary metrics, scaling to other vehicle sizes and speeds, and the
// upper-envelope slope diagnostic.

namespace aeroflow {

struct FilterConfig {
    int n_bins = 20;        // B equal-width density bins
    double percentile = 75; // keep flows at or above this percentile per bin
};

inline void validate(const FilterConfig& cfg) {
    if (cfg.n_bins < 1) throw ConfigError("filter: n_bins must be >= 1");
    if (cfg.percentile < 0.0 || cfg.percentile > 100.0) {
        throw ConfigError("filter: percentile must lie in [0, 100]");
    }
}

// p-th percentile with linear interpolation between closest ranks.
inline double percentile_of(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("percentile_of: empty sample");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace detail {

inline int density_bin(double k, double k_min, double width, int n_bins) {
    if (width <= 0.0) return 0;
    const int b = static_cast<int>(std::floor((k - k_min) / width));
    return std::clamp(b, 0, n_bins - 1);
}

} // namespace detail

// Keep, within each density bin, the samples whose flow reaches the bin's
// p-th flow percentile. Input order is preserved.
inline std::vector<FlowDensitySample> percentile_filter(
    std::span<const FlowDensitySample> samples, const FilterConfig& cfg) {
    validate(cfg);
    if (samples.empty()) throw ConfigError("percentile_filter: no samples");

    double k_min = samples.front().k;
    double k_max = samples.front().k;
    for (const auto& s : samples) {
        k_min = std::min(k_min, s.k);
        k_max = std::max(k_max, s.k);
    }
    const double width = (k_max - k_min) / cfg.n_bins;

    std::vector<std::vector<double>> bin_flows(static_cast<std::size_t>(cfg.n_bins));
    for (const auto& s : samples) {
        bin_flows[static_cast<std::size_t>(detail::density_bin(s.k, k_min, width, cfg.n_bins))]
            .push_back(s.q);
    }
    std::vector<double> thresholds(static_cast<std::size_t>(cfg.n_bins), 0.0);
    for (std::size_t b = 0; b < bin_flows.size(); ++b) {
        if (!bin_flows[b].empty()) {
            thresholds[b] = percentile_of(bin_flows[b], cfg.percentile);
        }
    }

    std::vector<FlowDensitySample> kept;
    kept.reserve(samples.size());
    for (const auto& s : samples) {
        const auto b =
            static_cast<std::size_t>(detail::density_bin(s.k, k_min, width, cfg.n_bins));
        if (s.q >= thresholds[b]) kept.push_back(s);
    }
    return kept;
}

// Drake's flow-density relation.
inline double drake_eval(double k, double v_f, double alpha) {
    return k * v_f * std::exp(-alpha * k);
}

struct FdFit {
    double v_f = 0.0;   // free-flow speed, m/s
    double alpha = 0.0; // decay parameter, m^2
    double k_c_analytic = 0.0;      // 1/alpha
    double q_max_analytic = 0.0;    // v_f/(alpha*e)
    double q_max_empirical = 0.0;   // max flow in the fitted cloud
    double k_at_qmax_empirical = 0.0;
    double r2 = 0.0;
    double rmse = 0.0;
    int n_samples_used = 0;
    int iterations = 0;
};

// Slope of the upper envelope in the low-density regime: bin the samples with
// k at or below the given density quantile, take each bin's maximum-flow
// point, and fit a line through the origin to those points.
inline double envelope_slope(std::span<const FlowDensitySample> samples,
                             double low_density_quantile, int n_bins = 20) {
    if (samples.empty()) throw FitError("envelope_slope: no samples");
    if (!(low_density_quantile > 0.0 && low_density_quantile <= 1.0)) {
        throw ConfigError("envelope_slope: quantile must lie in (0, 1]");
    }
    std::vector<double> ks;
    ks.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.k > 0.0) ks.push_back(s.k);
    }
    if (ks.empty()) throw FitError("envelope_slope: no positive-density samples");
    const double k_cut = percentile_of(ks, low_density_quantile * 100.0);

    double k_min = k_cut;
    for (double k : ks) {
        if (k <= k_cut) k_min = std::min(k_min, k);
    }
    const double width = (k_cut - k_min) / n_bins;

    std::vector<const FlowDensitySample*> bin_best(static_cast<std::size_t>(n_bins), nullptr);
    for (const auto& s : samples) {
        if (!(s.k > 0.0) || s.k > k_cut) continue;
        const auto b =
            static_cast<std::size_t>(detail::density_bin(s.k, k_min, width, n_bins));
        if (bin_best[b] == nullptr || s.q > bin_best[b]->q) bin_best[b] = &s;
    }

    double skq = 0.0;
    double skk = 0.0;
    int used = 0;
    for (const FlowDensitySample* s : bin_best) {
        if (s == nullptr) continue;
        skq += s->k * s->q;
        skk += s->k * s->k;
        ++used;
    }
    if (used < 2) throw FitError("envelope_slope: fewer than 2 usable bins");
    return skq / skk;
}

// Least-squares calibration of Drake's model by damped Gauss-Newton on
// (v_f, alpha). Initialized from the envelope slope (falling back to the
// 90th percentile of q/k) and 1/mean(k).
inline FdFit fit_drake(std::span<const FlowDensitySample> samples) {
    std::vector<double> ks, qs;
    ks.reserve(samples.size());
    qs.reserve(samples.size());
    for (const auto& s : samples) {
        ks.push_back(s.k);
        qs.push_back(s.q);
    }
    const std::size_t n = ks.size();
    {
        std::vector<double> distinct = ks;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3 || (distinct.size() && distinct.front() <= 0.0)) {
            throw FitError("fit_drake: need >= 3 samples with distinct positive density");
        }
    }

    double v = 0.0;
    try {
        v = envelope_slope(samples, 0.5);
    } catch (const Error&) {
        v = 0.0;
    }
    if (!(v > 0.0)) {
        std::vector<double> ratios;
        ratios.reserve(n);
        for (std::size_t i = 0; i < n; ++i) ratios.push_back(qs[i] / ks[i]);
        v = percentile_of(ratios, 90.0);
    }
    if (!(v > 0.0)) throw FitError("fit_drake: data admit no positive free-flow speed");

    double k_mean = 0.0;
    for (double k : ks) k_mean += k;
    k_mean /= static_cast<double>(n);
    double alpha = 1.0 / k_mean;

    auto sse_at = [&](double vf, double a) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = qs[i] - drake_eval(ks[i], vf, a);
            sse += r * r;
        }
        return sse;
    };

    double sse = sse_at(v, alpha);
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    constexpr int kMaxIterations = 200;
    for (; iter < kMaxIterations && !converged; ++iter) {
        // Normal equations for residuals r_i = q_i - k_i v e^{-a k_i}.
        double jvv = 0.0, jva = 0.0, jaa = 0.0, gv = 0.0, ga = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-alpha * ks[i]);
            const double r = qs[i] - ks[i] * v * e;
            const double dv = -ks[i] * e;            // d r / d v_f
            const double da = v * ks[i] * ks[i] * e; // d r / d alpha
            jvv += dv * dv;
            jva += dv * da;
            jaa += da * da;
            gv += dv * r;
            ga += da * r;
        }

        bool stepped = false;
        for (int tries = 0; tries < 60; ++tries) {
            const double avv = jvv * (1.0 + lambda);
            const double aaa = jaa * (1.0 + lambda);
            const double det = avv * aaa - jva * jva;
            if (det == 0.0 || !std::isfinite(det)) {
                lambda *= 10.0;
                continue;
            }
            const double dv = (-gv * aaa + ga * jva) / det;
            const double da = (-ga * avv + gv * jva) / det;
            const double v_new = v + dv;
            const double a_new = alpha + da;
            if (!(a_new > 0.0) || !std::isfinite(v_new) || !std::isfinite(a_new)) {
                lambda *= 10.0;
                continue;
            }
            const double sse_new = sse_at(v_new, a_new);
            if (sse_new <= sse) {
                const double decrease = sse - sse_new;
                v = v_new;
                alpha = a_new;
                sse = sse_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (decrease <= 1e-10 * std::max(sse, 1e-300)) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No admissible decrease: either we are at the alpha > 0 boundary
            // with the objective still pushing through it (model invalid for
            // this data), or we have stalled at numerical precision.
            if (alpha <= 1e-9 && ga > 0.0) {
                throw FitError("fit_drake: alpha driven to a nonpositive value; "
                               "Drake's model is invalid for this data");
            }
            converged = true;
        }
    }
    if (!converged) {
        throw FitError("fit_drake: no convergence after " + std::to_string(kMaxIterations) +
                       " iterations (v_f = " + std::to_string(v) + ", alpha = " +
                       std::to_string(alpha) + ", sse = " + std::to_string(sse) + ")");
    }
    // An alpha with no effect over the observed density range means the data
    // carry no decay and Drake's model is the wrong shape for them.
    const double k_max = *std::max_element(ks.begin(), ks.end());
    if (!(alpha * k_max > 1e-6)) {
        throw FitError("fit_drake: alpha driven to zero; Drake's model is invalid "
                       "for this data");
    }

    FdFit fit;
    fit.v_f = v;
    fit.alpha = alpha;
    fit.k_c_analytic = 1.0 / alpha;
    fit.q_max_analytic = drake_eval(fit.k_c_analytic, v, alpha);
    fit.r2 = 0.0;
    fit.iterations = iter;
    fit.n_samples_used = static_cast<int>(n);

    double q_mean = 0.0;
    for (double q : qs) q_mean += q;
    q_mean /= static_cast<double>(n);
    double ss_tot = 0.0;
    for (double q : qs) ss_tot += (q - q_mean) * (q - q_mean);
    fit.rmse = std::sqrt(sse / static_cast<double>(n));
    fit.r2 = ss_tot > 0.0 ? 1.0 - sse / ss_tot : (sse == 0.0 ? 1.0 : 0.0);

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (qs[i] > qs[best]) best = i;
    }
    fit.q_max_empirical = qs[best];
    fit.k_at_qmax_empirical = ks[best];
    return fit;
}

// Size/speed ratios from the reduced-scale platform to the target operation.
struct ScaleFactors {
    double delta_eta = 1.0; // size ratio
    double delta_v = 1.0;   // speed ratio
};

inline void validate(const ScaleFactors& f) {
    if (!(f.delta_eta > 0.0) || !(f.delta_v > 0.0)) {
        throw ConfigError("scale: factors must be > 0");
    }
}

struct FdParams {
    double v_f = 0.0;   // m/s
    double k_c = 0.0;   // drones/m^2
    double q_max = 0.0; // drones/(m s)
};

// v_f scales with speed, density with inverse occupied area, flow with both.
inline FdParams scale_params(const FdParams& p, const ScaleFactors& f) {
    validate(f);
    return {p.v_f * f.delta_v, p.k_c / (f.delta_eta * f.delta_eta),
            p.q_max * f.delta_v / (f.delta_eta * f.delta_eta)};
}

struct ScaledFit {
    FdParams scaled_ms;            // scaled values in the m-s unit system
    double v_f_scaled = 0.0;       // m/s
    double k_c_scaled_per_km2 = 0.0;
    double q_max_scaled_per_km_h = 0.0;
};

inline constexpr double kFlowPerMsToPerKmH = 3.6e6; // drones/(m s) -> drones/(km h)
inline constexpr double kDensityPerM2ToPerKm2 = 1e6;

inline ScaledFit scale_fit(const FdFit& fit, const ScaleFactors& f, bool use_empirical = true) {
    const FdParams base{fit.v_f, use_empirical ? fit.k_at_qmax_empirical : fit.k_c_analytic,
                        use_empirical ? fit.q_max_empirical : fit.q_max_analytic};
    ScaledFit out;
    out.scaled_ms = scale_params(base, f);
    out.v_f_scaled = out.scaled_ms.v_f;
    out.k_c_scaled_per_km2 = out.scaled_ms.k_c * kDensityPerM2ToPerKm2;
    out.q_max_scaled_per_km_h = out.scaled_ms.q_max * kFlowPerMsToPerKmH;
    return out;
}

} // namespace aeroflow
