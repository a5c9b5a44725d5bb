// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

#include "skychan/constants.hpp"

namespace skychan {

namespace {
constexpr double kPi = std::numbers::pi;

double percentile(std::vector<double> sorted, double p) {
    double idx = p * (static_cast<double>(sorted.size()) - 1.0);
    auto lo = static_cast<std::size_t>(std::floor(idx));
    auto hi = static_cast<std::size_t>(std::ceil(idx));
    double w = idx - std::floor(idx);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}
} // namespace

// ---------- power and amplitude ----------

double received_power(const ChannelTensor& tensor, std::size_t t) {
    if (t >= tensor.n_snapshots)
        throw std::invalid_argument("snapshot index out of range");
    double p = 0.0;
    for (std::size_t l = 0; l < tensor.n_paths; ++l)
        p += std::norm(tensor.at(l, t));
    return p;
}

std::vector<double> received_power_series(const ChannelTensor& tensor) {
    std::vector<double> out(tensor.n_snapshots);
    for (std::size_t t = 0; t < tensor.n_snapshots; ++t)
        out[t] = received_power(tensor, t);
    return out;
}

double received_amplitude(const ChannelTensor& tensor, std::size_t t) {
    if (t >= tensor.n_snapshots)
        throw std::invalid_argument("snapshot index out of range");
    double a = 0.0;
    for (std::size_t l = 0; l < tensor.n_paths; ++l)
        a += std::abs(tensor.at(l, t));
    return a;
}

std::vector<double> received_amplitude_series(const ChannelTensor& tensor) {
    std::vector<double> out(tensor.n_snapshots);
    for (std::size_t t = 0; t < tensor.n_snapshots; ++t)
        out[t] = received_amplitude(tensor, t);
    return out;
}

// ---------- densities ----------

double bessel_i0_scaled(double x) {
    if (x < 0.0)
        throw std::invalid_argument("bessel_i0_scaled requires x >= 0");
    if (x < 600.0)
        return std::exp(-x) * std::cyl_bessel_i(0.0, x);
    // Asymptotic series; at x >= 600 four terms reach ~1e-15 relative error.
    double r = 1.0 / (8.0 * x);
    double series = 1.0 + r * (1.0 + r * (4.5 + r * (37.5 + r * 459.375)));
    return series / std::sqrt(2.0 * kPi * x);
}

double rayleigh_pdf(double a, double sigma2) {
    if (a < 0.0)
        throw std::invalid_argument("rayleigh density requires a >= 0");
    if (sigma2 <= 0.0)
        throw std::invalid_argument("rayleigh density requires sigma2 > 0");
    return (a / sigma2) * std::exp(-a * a / (2.0 * sigma2));
}

double rician_pdf(double a, double sigma2, double z) {
    if (a < 0.0 || z < 0.0)
        throw std::invalid_argument("rice density requires a >= 0 and z >= 0");
    if (sigma2 <= 0.0)
        throw std::invalid_argument("rice density requires sigma2 > 0");
    // (a/s2) exp(-(a^2+z^2)/(2 s2)) I0(a z / s2)
    //   = (a/s2) exp(-(a-z)^2/(2 s2)) [exp(-az/s2) I0(a z/s2)]
    double d = a - z;
    return (a / sigma2) * std::exp(-d * d / (2.0 * sigma2)) * bessel_i0_scaled(a * z / sigma2);
}

namespace {

double exponential_pdf(double x, double lambda) {
    return x < 0.0 ? 0.0 : lambda * std::exp(-lambda * x);
}

double gamma_pdf(double x, double shape, double scale) {
    if (x < 0.0)
        return 0.0;
    if (x == 0.0)
        return shape < 1.0 ? std::numeric_limits<double>::infinity()
                           : (shape == 1.0 ? 1.0 / scale : 0.0);
    double lp = (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                shape * std::log(scale);
    return std::exp(lp);
}

std::size_t family_param_count(FitFamily f) {
    switch (f) {
    case FitFamily::Rayleigh:
    case FitFamily::Exponential:
        return 1;
    case FitFamily::Rician:
    case FitFamily::Gamma:
        return 2;
    }
    return 1;
}

double family_pdf(FitFamily f, const std::vector<double>& params, double x) {
    switch (f) {
    case FitFamily::Rayleigh:
        return x < 0.0 ? 0.0 : rayleigh_pdf(x, params[0]);
    case FitFamily::Rician:
        return x < 0.0 ? 0.0 : rician_pdf(x, params[0], params[1]);
    case FitFamily::Exponential:
        return exponential_pdf(x, params[0]);
    case FitFamily::Gamma:
        return gamma_pdf(x, params[0], params[1]);
    }
    return 0.0;
}

// Nelder-Mead in log-parameter space (all family parameters are positive;
// a Rice z "at zero" just drives toward -inf and lands at a negligible value).
struct NelderMead {
    static constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;

    template <typename F>
    static bool minimize(F&& f, std::vector<double>& x, int max_iter) {
        std::size_t n = x.size();
        std::vector<std::vector<double>> simplex(n + 1, x);
        for (std::size_t i = 0; i < n; ++i)
            simplex[i + 1][i] += 0.25;
        std::vector<double> fv(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            fv[i] = f(simplex[i]);

        for (int it = 0; it < max_iter; ++it) {
            std::vector<std::size_t> order(n + 1);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            std::size_t best = order[0], worst = order[n], second = order[n - 1];

            if (std::abs(fv[worst] - fv[best]) <= 1e-12 * (1.0 + std::abs(fv[best]))) {
                x = simplex[best];
                return true;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i)
                if (i != worst)
                    for (std::size_t d = 0; d < n; ++d)
                        centroid[d] += simplex[i][d] / static_cast<double>(n);

            auto blend = [&](double coef) {
                std::vector<double> p(n);
                for (std::size_t d = 0; d < n; ++d)
                    p[d] = centroid[d] + coef * (centroid[d] - simplex[worst][d]);
                return p;
            };

            std::vector<double> refl = blend(kAlpha);
            double f_refl = f(refl);
            if (f_refl < fv[best]) {
                std::vector<double> exp_pt = blend(kGamma);
                double f_exp = f(exp_pt);
                if (f_exp < f_refl) {
                    simplex[worst] = exp_pt;
                    fv[worst] = f_exp;
                } else {
                    simplex[worst] = refl;
                    fv[worst] = f_refl;
                }
            } else if (f_refl < fv[second]) {
                simplex[worst] = refl;
                fv[worst] = f_refl;
            } else {
                std::vector<double> con = blend(-kRho);
                double f_con = f(con);
                if (f_con < fv[worst]) {
                    simplex[worst] = con;
                    fv[worst] = f_con;
                } else {
                    for (std::size_t i = 0; i <= n; ++i) {
                        if (i == best)
                            continue;
                        for (std::size_t d = 0; d < n; ++d)
                            simplex[i][d] =
                                simplex[best][d] + kSigma * (simplex[i][d] - simplex[best][d]);
                        fv[i] = f(simplex[i]);
                    }
                }
            }
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i <= n; ++i)
            if (fv[i] < fv[best])
                best = i;
        x = simplex[best];
        return false;
    }
};

} // namespace

HistogramFit fit_histogram(const std::vector<double>& samples, FitFamily family, int bins) {
    if (samples.size() < 100)
        throw std::invalid_argument("histogram fit needs at least 100 samples");
    for (double s : samples)
        if (s < 0.0 || !std::isfinite(s))
            throw std::invalid_argument("histogram fit samples must be finite and non-negative");

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double lo = sorted.front(), hi = sorted.back();
    if (hi <= lo)
        throw std::invalid_argument("histogram fit samples are degenerate (constant)");

    std::size_t nbins;
    if (bins > 0) {
        nbins = static_cast<std::size_t>(bins);
    } else {
        double iqr = percentile(sorted, 0.75) - percentile(sorted, 0.25);
        if (iqr <= 0.0)
            throw std::invalid_argument("histogram fit samples are degenerate (zero IQR)");
        double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
        nbins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        nbins = std::clamp<std::size_t>(nbins, 4, 1024);
    }

    HistogramFit fit;
    fit.family = family;
    fit.bin_centers.resize(nbins);
    fit.bin_density.assign(nbins, 0.0);
    double width = (hi - lo) / static_cast<double>(nbins);
    for (std::size_t i = 0; i < nbins; ++i)
        fit.bin_centers[i] = lo + (static_cast<double>(i) + 0.5) * width;
    for (double s : samples) {
        auto i = static_cast<std::size_t>((s - lo) / width);
        if (i >= nbins)
            i = nbins - 1;
        fit.bin_density[i] += 1.0;
    }
    for (auto& d : fit.bin_density)
        d /= static_cast<double>(samples.size()) * width;

    // Moments for the start grid.
    double m1 = 0.0, m2 = 0.0;
    for (double s : samples) {
        m1 += s;
        m2 += s * s;
    }
    m1 /= static_cast<double>(samples.size());
    m2 /= static_cast<double>(samples.size());
    double var = std::max(m2 - m1 * m1, 1e-300);
    double rms = std::sqrt(m2);

    std::vector<std::vector<double>> starts; // natural (not log) parameters
    switch (family) {
    case FitFamily::Rayleigh:
        for (double f : {0.25, 0.5, 1.0, 2.0, 4.0})
            starts.push_back({f * m2 / 2.0});
        break;
    case FitFamily::Rician:
        for (double fs : {0.5, 1.0, 2.0})
            for (double fz : {1e-3, 0.3, 0.7, 0.95}) {
                double z = fz * rms;
                double s2 = fs * std::max((m2 - z * z) / 2.0, 0.05 * var);
                starts.push_back({s2, std::max(z, 1e-6 * rms)});
            }
        break;
    case FitFamily::Exponential:
        for (double f : {0.25, 0.5, 1.0, 2.0, 4.0})
            starts.push_back({f / m1});
        break;
    case FitFamily::Gamma:
        for (double fk : {0.25, 1.0, 4.0})
            for (double ft : {0.25, 1.0, 4.0})
                starts.push_back({fk * m1 * m1 / var, ft * var / m1});
        break;
    }

    auto objective = [&](const std::vector<double>& log_params) {
        std::vector<double> p(log_params.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = std::exp(log_params[i]);
        double acc = 0.0;
        for (std::size_t i = 0; i < nbins; ++i) {
            double pdf = family_pdf(family, p, fit.bin_centers[i]);
            if (!std::isfinite(pdf))
                return 1e300;
            double e = fit.bin_density[i] - pdf;
            acc += e * e;
        }
        return std::sqrt(acc / static_cast<double>(nbins));
    };

    double best_rmse = std::numeric_limits<double>::infinity();
    std::vector<double> best_log;
    bool best_converged = false;
    for (const auto& start : starts) {
        std::vector<double> lp(start.size());
        for (std::size_t i = 0; i < lp.size(); ++i)
            lp[i] = std::log(std::max(start[i], 1e-300));
        double f0 = objective(lp);
        if (best_log.empty() || f0 < best_rmse) {
            // keep the raw grid point as a floor before refinement
            if (f0 < best_rmse) {
                best_rmse = f0;
                best_log = lp;
                best_converged = false;
            }
        }
        bool conv = NelderMead::minimize(objective, lp, 400);
        double fr = objective(lp);
        if (fr < best_rmse) {
            best_rmse = fr;
            best_log = lp;
            best_converged = conv;
        }
    }

    fit.params.resize(best_log.size());
    for (std::size_t i = 0; i < best_log.size(); ++i)
        fit.params[i] = std::exp(best_log[i]);
    fit.rmse = best_rmse;
    fit.converged = best_converged;
    return fit;
}

double fit_pdf(const HistogramFit& fit, double x) {
    return family_pdf(fit.family, fit.params, x);
}

std::vector<std::size_t> rank_fits(const std::vector<HistogramFit>& fits) {
    // Parsimony-weighted score: an extra parameter must buy more than 1%
    // relative RMSE, otherwise the simpler family ranks first.
    std::vector<std::size_t> order(fits.size());
    std::iota(order.begin(), order.end(), 0);
    auto score = [&](std::size_t i) {
        double penalty = std::pow(1.01, static_cast<double>(family_param_count(fits[i].family)));
        return fits[i].rmse * penalty;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score(a) < score(b); });
    return order;
}

// ---------- delay statistics ----------

double rms_delay_spread(const std::vector<double>& powers, const std::vector<double>& delays_s) {
    if (powers.size() != delays_s.size() || powers.empty())
        throw std::invalid_argument("power/delay profiles must be non-empty and equal length");
    double total = 0.0;
    for (double p : powers) {
        if (p < 0.0)
            throw std::invalid_argument("path powers must be non-negative");
        total += p;
    }
    if (total <= 0.0)
        throw std::invalid_argument("total path power must be positive");
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        m1 += powers[i] * delays_s[i];
        m2 += powers[i] * delays_s[i] * delays_s[i];
    }
    m1 /= total;
    m2 /= total;
    return std::sqrt(std::max(m2 - m1 * m1, 0.0));
}

std::vector<double> delay_spread_series(const ChannelTensor& tensor) {
    std::vector<double> out(tensor.n_snapshots, 0.0);
    std::vector<double> p(tensor.n_paths), d(tensor.n_paths);
    for (std::size_t t = 0; t < tensor.n_snapshots; ++t) {
        double total = 0.0;
        for (std::size_t l = 0; l < tensor.n_paths; ++l) {
            p[l] = std::norm(tensor.at(l, t));
            d[l] = tensor.tau_at(l, t);
            total += p[l];
        }
        out[t] = total > 0.0 ? rms_delay_spread(p, d) : 0.0;
    }
    return out;
}

DelayStats multipath_delay_stats(const ChannelTensor& tensor, double threshold_db) {
    if (threshold_db <= 0.0)
        throw std::invalid_argument("delay-stat threshold must be positive dB");

    DelayStats stats;
    double rel = std::pow(10.0, -threshold_db / 10.0);
    for (std::size_t t = 0; t < tensor.n_snapshots; ++t) {
        double pmax = 0.0;
        for (std::size_t l = 0; l < tensor.n_paths; ++l)
            pmax = std::max(pmax, std::norm(tensor.at(l, t)));
        if (pmax <= 0.0)
            continue;
        double floor = pmax * rel;
        double first = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < tensor.n_paths; ++l)
            if (std::norm(tensor.at(l, t)) >= floor)
                first = std::min(first, tensor.tau_at(l, t));
        for (std::size_t l = 0; l < tensor.n_paths; ++l) {
            if (std::norm(tensor.at(l, t)) < floor)
                continue;
            double excess = tensor.tau_at(l, t) - first;
            if (excess > 0.0)
                stats.pooled_delays_s.push_back(excess);
        }
    }

    if (stats.pooled_delays_s.empty()) {
        stats.degenerate = true;
        return stats;
    }

    std::vector<double> sorted = stats.pooled_delays_s;
    std::sort(sorted.begin(), sorted.end());
    stats.tau_avg_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                      static_cast<double>(sorted.size());
    stats.tau_med_s = percentile(sorted, 0.5);

    if (sorted.size() >= 100 && sorted.back() > sorted.front()) {
        for (FitFamily f : {FitFamily::Exponential, FitFamily::Gamma, FitFamily::Rayleigh})
            stats.fits.push_back(fit_histogram(stats.pooled_delays_s, f));
        stats.ranking = rank_fits(stats.fits);
    }
    return stats;
}

// ---------- Doppler ----------

double doppler_shift(double fc_hz, double radial_velocity_mps) {
    if (fc_hz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    return fc_hz / constants::c * radial_velocity_mps;
}

namespace {
std::mutex fftw_planner_mutex;
} // namespace

DopplerSpectrum doppler_spectrum(const ChannelTensor& tensor, double bandwidth_hz,
                                 int nfft, double window_s) {
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("bandwidth must be positive");
    if (nfft < 2 || (nfft & (nfft - 1)) != 0)
        throw std::invalid_argument("nfft must be a power of two");
    if (window_s <= 0.0)
        throw std::invalid_argument("window must be positive");

    auto nw = static_cast<std::size_t>(std::llround(window_s * tensor.rate_hz));
    if (nw > tensor.n_snapshots)
        throw std::invalid_argument("analysis window exceeds the tensor duration");
    if (nw < 8)
        throw std::invalid_argument("analysis window holds too few snapshots");

    auto kf = static_cast<std::size_t>(nfft);
    std::size_t nl = tensor.n_paths;

    // Channel transfer function on the nfft frequency grid, leading window
    // only. Per (path, snapshot) the bin phasor advances geometrically.
    std::vector<std::complex<double>> ctf(kf * nw, {0.0, 0.0});
    double f0 = -bandwidth_hz / 2.0;
    double df = bandwidth_hz / static_cast<double>(nfft);
    for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t t = 0; t < nw; ++t) {
            std::complex<double> h = tensor.at(l, t);
            if (h == std::complex<double>{0.0, 0.0})
                continue;
            double tau = tensor.tau_at(l, t);
            std::complex<double> cur = h * std::polar(1.0, -2.0 * kPi * f0 * tau);
            std::complex<double> ratio = std::polar(1.0, -2.0 * kPi * df * tau);
            for (std::size_t k = 0; k < kf; ++k) {
                ctf[k * nw + t] += cur;
                cur *= ratio;
            }
        }
    }

    // Periodic Hann taper (an on-grid tone then occupies exactly three bins).
    std::vector<double> hann(nw);
    double wsum = 0.0;
    for (std::size_t t = 0; t < nw; ++t) {
        hann[t] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(t) /
                                        static_cast<double>(nw)));
        wsum += hann[t];
    }

    std::vector<double> acc(nw, 0.0);
    {
        std::vector<std::complex<double>> buf(nw);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex);
            plan = fftw_plan_dft_1d(static_cast<int>(nw),
                                    reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
        }
        for (std::size_t k = 0; k < kf; ++k) {
            for (std::size_t t = 0; t < nw; ++t)
                buf[t] = ctf[k * nw + t] * hann[t];
            fftw_execute(plan);
            for (std::size_t t = 0; t < nw; ++t)
                acc[t] += std::norm(buf[t]);
        }
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex);
            fftw_destroy_plan(plan);
        }
    }

    // Average over frequency bins, normalize so an on-grid unit tone peaks at
    // its own power, and center the Doppler axis.
    double scale = 1.0 / (static_cast<double>(kf) * wsum * wsum);
    DopplerSpectrum sp;
    sp.window_s = window_s;
    sp.nfft = nfft;
    sp.freq_hz.resize(nw);
    sp.psd_db.resize(nw);

    std::vector<double> power(nw);
    std::size_t half = nw / 2;
    double bin_hz = tensor.rate_hz / static_cast<double>(nw);
    double peak = 0.0;
    std::size_t peak_idx = 0;
    for (std::size_t i = 0; i < nw; ++i) {
        // shifted index: i runs over [-floor(N/2), ...) in frequency
        std::size_t src = (i + nw - half) % nw;
        sp.freq_hz[i] = (static_cast<double>(i) - static_cast<double>(half)) * bin_hz;
        power[i] = acc[src] * scale;
        if (power[i] > peak) {
            peak = power[i];
            peak_idx = i;
        }
    }
    if (peak <= 0.0)
        throw std::invalid_argument("tensor carries no energy in the analysis window");
    for (std::size_t i = 0; i < nw; ++i) {
        double rel = power[i] / peak;
        sp.psd_db[i] = rel > 0.0 ? std::max(10.0 * std::log10(rel), -400.0) : -400.0;
    }
    sp.peak_hz = sp.freq_hz[peak_idx];
    sp.peak_power_db = 10.0 * std::log10(peak);
    return sp;
}

} // namespace skychan
