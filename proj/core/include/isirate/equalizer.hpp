#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "isirate/channel.hpp"
#include "isirate/scalar.hpp"

namespace isirate {

struct DfeOptions {
    /// Feedforward half-length M (filter length 2M+1); 0 picks max(8L, 64).
    std::size_t half_len = 0;
    std::size_t max_half_len = std::size_t{1} << 13;
    /// Relative gap allowed between the unbiased SNR and snr_dfe - 1.
    double snr_tol = 1e-6;
    /// Residual taps beyond N carry less than this fraction of their energy.
    double truncation = 1e-10;
    SpectralOptions spectral{};
};

/// Unbiased MMSE-DFE with perfect feedback of past symbols.
struct DfeDesign {
    double rho = 0.0;
    double power = 1.0;
    double noise_psd = 1.0;
    std::size_t half_len = 0;
    /// Unnormalised feedforward taps a over observations y_0..y_{2M}.
    std::vector<double> feedforward;
    /// c = sum_l a_l h_l; the unbiased filter is a / c.
    double scale = 1.0;
    /// alpha_1..alpha_N after truncation; alpha_0 = 1 is implicit.
    std::vector<double> residual;
    /// sum of alpha_k^2 over the untruncated residual.
    double full_residual_energy = 0.0;
    /// Variance of the Gaussian noise term at the equalizer output.
    double noise_var = 0.0;
    double unbiased_snr = 0.0;
    double target_snr = 0.0;
    double snr_gap = 0.0;
};

struct DfeSummary {
    double beta0_sq = 1.0;
    double beta1_sq = 0.0;
    std::optional<double> gamma1_cu;
    std::optional<double> delta1_4;
    double eps0 = 0.0;
    double eps1 = 0.0;
    double S = 0.0;
};

DfeDesign design_mmse_dfe(const ChannelResponse& channel, const InputDistribution& x, double rho,
                          const DfeOptions& options = {});

/// Minimal N with sum_{k>N} alpha_k^2 < threshold * sum_{k>=1} alpha_k^2.
std::size_t truncation_length(const std::vector<double>& residual, double threshold);

DfeSummary summarize(const DfeDesign& design, const InputDistribution& x);

/// Second-order quantities from the spectral SNRs alone.
DfeSummary closed_form_summary(const ChannelResponse& channel, double rho,
                               const SpectralOptions& options = {});
DfeSummary closed_form_summary(const SpectralSummary& spectral);

} // namespace isirate
