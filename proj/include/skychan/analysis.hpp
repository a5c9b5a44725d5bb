// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <cstddef>
#include <vector>

#include "skychan/channel_tensor.hpp"

namespace skychan {

/// Instantaneous received power sum_l |h[l,t]|^2 (linear, relative to tx power).
double received_power(const ChannelTensor& tensor, std::size_t t);
std::vector<double> received_power_series(const ChannelTensor& tensor);

/// Instantaneous amplitude sum_l |h[l,t]|.
double received_amplitude(const ChannelTensor& tensor, std::size_t t);
std::vector<double> received_amplitude_series(const ChannelTensor& tensor);

/// Rayleigh density (a / sigma2) exp(-a^2 / (2 sigma2)); a >= 0, sigma2 > 0.
double rayleigh_pdf(double a, double sigma2);

/// Rice density (a / sigma2) exp(-(a^2 + z^2) / (2 sigma2)) I0(a z / sigma2),
/// evaluated in scaled form so large a z / sigma2 cannot overflow. z = 0
/// reduces exactly to the Rayleigh density.
double rician_pdf(double a, double sigma2, double z);

/// Exponentially scaled modified Bessel function exp(-x) I0(x), x >= 0.
double bessel_i0_scaled(double x);

enum class FitFamily { Rayleigh, Rician, Exponential, Gamma };

/// Least-squares histogram fit: density-normalized histogram (Freedman-
/// Diaconis bins unless `bins` > 0), multi-start parameter grid refined with
/// Nelder-Mead. Needs >= 100 samples; constant samples are degenerate.
struct HistogramFit {
    FitFamily family = FitFamily::Rayleigh;
    std::vector<double> params; // Rayleigh {sigma2}; Rician {sigma2, z};
                                // Exponential {lambda}; Gamma {shape, scale}
    double rmse = 0.0;
    bool converged = false;
    std::vector<double> bin_centers;
    std::vector<double> bin_density;
};

HistogramFit fit_histogram(const std::vector<double>& samples, FitFamily family,
                           int bins = 0);

double fit_pdf(const HistogramFit& fit, double x);

/// Rank fits best-first by RMSE with a parsimony margin: a family with more
/// parameters outranks a simpler one only when its RMSE is lower by more than
/// 1% relative (a nested family can always match its parent numerically).
std::vector<std::size_t> rank_fits(const std::vector<HistogramFit>& fits);

/// Root-mean-square delay spread of one power/delay profile:
/// sqrt(sum p tau^2 / P - (sum p tau / P)^2); total power must be positive.
double rms_delay_spread(const std::vector<double>& powers,
                        const std::vector<double>& delays_s);

/// Per-snapshot rms delay spread of a tensor, from instantaneous |h|^2.
std::vector<double> delay_spread_series(const ChannelTensor& tensor);

/// Pooled multipath excess-delay statistics: per snapshot, paths within
/// `threshold_db` of the strongest are kept, the first arrival (the direct
/// path or its proxy) is excluded, and the remaining excess delays are pooled
/// across snapshots. Fits exponential, gamma and Rayleigh densities to the
/// pool and ranks them.
struct DelayStats {
    std::vector<double> pooled_delays_s;
    double tau_avg_s = 0.0;
    double tau_med_s = 0.0;
    std::vector<HistogramFit> fits;   // exponential, gamma, rayleigh
    std::vector<std::size_t> ranking; // indices into fits, best first
    bool degenerate = false;          // no multipath rows above threshold
};

DelayStats multipath_delay_stats(const ChannelTensor& tensor, double threshold_db = 40.0);

/// Doppler shift [Hz] for a relative radial velocity [m/s], positive while
/// approaching.
double doppler_shift(double fc_hz, double radial_velocity_mps);

/// Doppler power spectral density: channel transfer function over `nfft`
/// frequency bins spanning `bandwidth_hz`, Hann-tapered DFT across the
/// snapshots of the leading `window_s` seconds per bin, PSD averaged over
/// bins and normalized to a 0 dB peak. nfft must be a power of two and the
/// window must fit the tensor.
struct DopplerSpectrum {
    std::vector<double> freq_hz; // centered bins, spacing rate/N_window
    std::vector<double> psd_db;  // peak-normalized
    double peak_hz = 0.0;
    double peak_power_db = 0.0;  // absolute peak before normalization
    double window_s = 0.0;
    int nfft = 0;
};

DopplerSpectrum doppler_spectrum(const ChannelTensor& tensor, double bandwidth_hz,
                                 int nfft, double window_s);

} // namespace skychan
