// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <optional>
#include <vector>

#include "skychan/pathloss.hpp"
#include "skychan/rng.hpp"

namespace skychan {

/// Lognormal delay-spread model in the log10-seconds domain:
///   log10(DS) = mu + gamma log10(fc_GHz) + alpha log10(elevation_rad) + sigma X
/// (the frequency and elevation terms apply to the Los set only; the Nlos set
/// uses mu + sigma X). d_lambda is the spatial decorrelation distance [m].
struct DelaySpreadParams {
    double mu = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double d_lambda = 0.0;
    bool elevation_scaled = false;

    static DelaySpreadParams urban(Scenario s);
};

/// Ricean K-factor and shadow-fading draw parameters [dB].
struct FadingParams {
    double k_mu_db = 9.0;
    double k_sigma_db = 3.5;
    double sf_sigma_los_db = 4.0;
    double sf_sigma_nlos_db = 6.0;
};

/// Per-segment large-scale draw.
struct LspDraw {
    double delay_spread_s = 0.0;
    std::optional<double> k_factor_db; // present in Los segments only
    double shadow_fading_db = 0.0;
};

/// Spatial autocorrelation of a large-scale parameter at separation d [m]:
/// gaussian exp(-d^2/d_lambda^2) inside one decorrelation distance, then
/// exponential exp(-d/d_lambda). d and d_lambda must be non-negative/positive.
double spatial_correlation(double d_m, double d_lambda_m);

/// Standard-normal field sampled at ordered track positions with the above
/// correlation: Sigma_ij = rho(|d_i - d_j|), z = chol(Sigma) n. Retries the
/// factorization once with 1e-10 diagonal jitter before giving up.
std::vector<double> correlated_normal_field(const std::vector<double>& positions_m,
                                            double d_lambda_m, RandomStream& rng);

/// log10-seconds exponent of the delay spread for a given standard-normal x.
double delay_spread_exponent(const DelaySpreadParams& p, double fc_ghz,
                             double elevation_rad, double x);

/// Delay spread [s] = 10^exponent.
double draw_delay_spread(const DelaySpreadParams& p, double fc_ghz,
                         double elevation_rad, double x);

/// K-factor (Los only) and shadow fading for one segment.
LspDraw draw_k_factor_and_sf(Scenario s, const FadingParams& p, double delay_spread_s,
                             RandomStream& rng);

} // namespace skychan
