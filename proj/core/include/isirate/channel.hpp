#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace isirate {

/// Real FIR intersymbol-interference channel h_0..h_{L-1}.
class ChannelResponse {
public:
    explicit ChannelResponse(std::vector<double> taps);

    const std::vector<double>& taps() const noexcept { return taps_; }
    std::size_t length() const noexcept { return taps_.size(); }
    double operator[](std::size_t k) const { return taps_[k]; }

    double energy() const noexcept;
    bool is_normalized(double tol = 1e-12) const noexcept;
    ChannelResponse normalized() const;

private:
    std::vector<double> taps_;
};

/// |H(theta)|^2 with H(theta) = sum_k h_k exp(-j k theta).
double transfer_power(const ChannelResponse& channel, double theta);

struct SpectralOptions {
    std::size_t min_points = 64;
    std::size_t max_points = std::size_t{1} << 22;
    double rel_tol = 1e-10;
};

struct SpectralSummary {
    double rho = 0.0;
    double snr_le = 1.0;
    double snr_dfe = 1.0;
    double snr_zf_dfe = 0.0;
    double g_zf_dfe = 0.0;
    double g_zf_le = 0.0;
    /// Half the mean of log(1 + rho |H|^2): the real-channel i.i.d. Gaussian rate.
    double gaussian_rate = 0.0;
    /// Mean of log(1 + rho |H|^2), i.e. log(snr_dfe).
    double log_snr_dfe = 0.0;
    /// snr_le - 1 and snr_dfe - 1 without cancellation.
    double snr_le_excess = 0.0;
    double snr_dfe_excess = 0.0;
    double mean_power = 0.0;
    bool spectral_null = false;
};

/// Mean over theta in [-pi, pi] of f(|H(theta)|^2), periodic trapezoid with
/// grid doubling until two successive estimates agree to rel_tol.
double spectral_mean(const ChannelResponse& channel, const std::function<double(double)>& f,
                     const SpectralOptions& options = {});

SpectralSummary spectral_summary(const ChannelResponse& channel, double rho,
                                 const SpectralOptions& options = {});

/// Roots of h_0 z^{L-1} + ... + h_{L-1} after stripping leading/trailing zero taps.
std::vector<std::complex<double>> channel_zeros(const ChannelResponse& channel);

/// exp(mean log |H|^2) from the polynomial roots.
double zf_dfe_gain(const ChannelResponse& channel);

/// Reflects zeros outside the unit circle; keeps |H|^2 and the tap count.
ChannelResponse to_minimum_phase(const ChannelResponse& channel);

} // namespace isirate
