#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isirate/channel.hpp"
#include "isirate/equalizer.hpp"
#include "isirate/rate_estimate.hpp"
#include "isirate/scalar.hpp"

namespace isirate {

/// I_x at the zero-forcing DFE output SNR rho * g_zf_dfe.
double i_sow(const ChannelResponse& channel, const InputDistribution& x, double rho,
             const SpectralOptions& options = {});

/// I_x at the unbiased MMSE-DFE SNR, snr_dfe - 1.
double i_sl(const ChannelResponse& channel, const InputDistribution& x, double rho,
            const SpectralOptions& options = {});

struct MixtureOptions {
    double prune_mass = 1e-12;
    std::size_t budget = std::size_t{1} << 24;
    double rel_tol = 1e-12;
};

struct MmseExact {
    double value = 0.0;
    double error_bound = 0.0;
    /// I(mu0; mu0 + m) and I(mu1; mu1 + m).
    double i_mu0 = 0.0;
    double i_mu1 = 0.0;
    double pruned_mass = 0.0;
    std::size_t components0 = 0;
    std::size_t components1 = 0;
};

/// I_MMSE by exact enumeration of the residual-interference mixtures.
MmseExact i_mmse_exact(const DfeDesign& design, const InputDistribution& x,
                       const MixtureOptions& options = {});

struct GapExact {
    double gap = 0.0;
    double i_mmse = 0.0;
    /// I_x at the design's own unbiased SNR S / (1 + eps1).
    double i_sl = 0.0;
    double error_bound = 0.0;
};

/// I_MMSE - I_SL with both terms taken from the same (truncated) design, in a
/// form that avoids cancelling the leading orders.
GapExact slc_gap_exact(const DfeDesign& design, const InputDistribution& x,
                       const MixtureOptions& options = {});

struct McOptions {
    std::size_t stream_size = std::size_t{1} << 14;
    double t_max = 12.0;
    std::size_t threads = 0;
};

/// Monte-Carlo I_MMSE; interference-plus-noise density evaluated by
/// inverting its characteristic function.
RateEstimate i_mmse_mc(const DfeDesign& design, const InputDistribution& x, std::size_t n_samples,
                       std::uint64_t seed, const McOptions& options = {});

/// Low-SNR prediction of I_MMSE - I_SL from tap moments.
double slc_gap_series(const DfeSummary& summary, const InputDistribution& x);

/// Coefficient of rho^3 in I_MMSE - I_SL for the two-tap channel.
double two_tap_gap_leading(double q, const InputDistribution& x);

/// Partition of tap indices plus per-block noise variances sigma_m^2.
struct GenieConfig {
    std::vector<std::vector<std::size_t>> partition;
    std::vector<double> sigmas_sq;
};

GenieConfig genie_equal_sigma(std::vector<std::vector<std::size_t>> partition);
GenieConfig genie_singleton(std::size_t taps);
/// Only block `chosen` is observed: sigma^2 = 1/b^2 there, 0 elsewhere.
GenieConfig genie_one_cluster(const std::vector<double>& coeffs,
                              std::vector<std::vector<std::size_t>> partition, std::size_t chosen);

/// Lower bound on mmse of sum_k coeffs[k] x_k (x unit-power normalised).
double genie_mmse_lower(const InputDistribution& x, const std::vector<double>& coeffs, double gamma,
                        const GenieConfig& config);

/// Law of sum_k coeffs[k] x_k for the unit-power input.
DiscreteLaw interference_law(const InputDistribution& x, const std::vector<double>& coeffs);

double ie_bound(const DfeSummary& summary, const InputDistribution& x, double gamma1, double gamma2);
double ie_simple(const DfeSummary& summary, const InputDistribution& x);
/// Conjectured (unproven) variant; report it as such.
double ie_conj(const DfeSummary& summary, const InputDistribution& x);

struct IeOpt {
    double value = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    bool grid_fallback = false;
    bool boundary = false;
};

IeOpt ie_opt(const DfeSummary& summary, const InputDistribution& x);

struct BoundOptions {
    DfeOptions dfe{};
    MixtureOptions mixture{};
    bool compute_mmse = true;
    bool force_mc = false;
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 1;
    McOptions mc{};
};

struct BoundReport {
    double rho = 0.0;
    double entropy = 0.0;
    double gaussian_rate = 0.0;
    double i_sow = 0.0;
    double i_sl = 0.0;
    double ie_simple = 0.0;
    IeOpt ie_opt{};
    double ie_conj = 0.0;
    std::optional<double> i_mmse;
    std::string i_mmse_method = "none";
    /// Standard error (mc) or numerical error bound (exact).
    double i_mmse_error = 0.0;
    double gap_series = 0.0;
    DfeSummary summary{};
    std::size_t residual_taps = 0;
};

BoundReport evaluate_bounds(const ChannelResponse& channel, const InputDistribution& x, double rho,
                            const BoundOptions& options = {});

} // namespace isirate
