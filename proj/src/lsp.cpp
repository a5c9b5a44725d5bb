// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/lsp.hpp"

#include <cmath>
#include <stdexcept>

namespace skychan {

DelaySpreadParams DelaySpreadParams::urban(Scenario s) {
    if (s == Scenario::Los)
        return {-7.8, 0.3, 0.5, -0.4, 50.0, true};
    return {-6.85, 0.15, 0.0, 0.0, 40.0, false};
}

double spatial_correlation(double d_m, double d_lambda_m) {
    if (d_m < 0.0)
        throw std::invalid_argument("separation distance must be non-negative");
    if (d_lambda_m <= 0.0)
        throw std::invalid_argument("decorrelation distance must be positive");
    if (d_m < d_lambda_m)
        return std::exp(-(d_m * d_m) / (d_lambda_m * d_lambda_m));
    return std::exp(-d_m / d_lambda_m);
}

namespace {

// Plain in-place Cholesky; returns false if a pivot goes non-positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k)
            d -= a[j * n + k] * a[j * n + k];
        if (d <= 0.0)
            return false;
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / d;
        }
    }
    return true;
}

} // namespace

std::vector<double> correlated_normal_field(const std::vector<double>& positions_m,
                                            double d_lambda_m, RandomStream& rng) {
    std::size_t n = positions_m.size();
    if (n == 0)
        throw std::invalid_argument("correlated field needs at least one position");
    for (std::size_t i = 1; i < n; ++i)
        if (positions_m[i] < positions_m[i - 1])
            throw std::invalid_argument("field positions must be ordered");

    std::vector<double> cov(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double rho = spatial_correlation(positions_m[i] - positions_m[j], d_lambda_m);
            cov[i * n + j] = rho;
            cov[j * n + i] = rho;
        }

    std::vector<double> chol_mat = cov;
    if (!cholesky(chol_mat, n)) {
        chol_mat = cov;
        for (std::size_t i = 0; i < n; ++i)
            chol_mat[i * n + i] += 1e-10;
        if (!cholesky(chol_mat, n))
            throw std::runtime_error("correlation matrix is not positive definite");
    }

    std::vector<double> z(n, 0.0);
    std::vector<double> noise(n);
    for (std::size_t i = 0; i < n; ++i)
        noise[i] = rng.normal();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            z[i] += chol_mat[i * n + j] * noise[j];
    return z;
}

double delay_spread_exponent(const DelaySpreadParams& p, double fc_ghz,
                             double elevation_rad, double x) {
    if (fc_ghz <= 0.0)
        throw std::invalid_argument("delay spread requires a positive carrier frequency");
    double e = p.mu + p.sigma * x;
    if (p.elevation_scaled) {
        if (elevation_rad <= 0.0)
            throw std::invalid_argument("delay spread requires a positive elevation angle");
        e += p.gamma * std::log10(fc_ghz) + p.alpha * std::log10(elevation_rad);
    }
    return e;
}

double draw_delay_spread(const DelaySpreadParams& p, double fc_ghz,
                         double elevation_rad, double x) {
    return std::pow(10.0, delay_spread_exponent(p, fc_ghz, elevation_rad, x));
}

LspDraw draw_k_factor_and_sf(Scenario s, const FadingParams& p, double delay_spread_s,
                             RandomStream& rng) {
    if (delay_spread_s <= 0.0)
        throw std::invalid_argument("delay spread must be positive");
    LspDraw d;
    d.delay_spread_s = delay_spread_s;
    if (s == Scenario::Los) {
        d.k_factor_db = p.k_mu_db + p.k_sigma_db * rng.normal();
        d.shadow_fading_db = p.sf_sigma_los_db * rng.normal();
    } else {
        d.shadow_fading_db = p.sf_sigma_nlos_db * rng.normal();
    }
    return d;
}

} // namespace skychan
