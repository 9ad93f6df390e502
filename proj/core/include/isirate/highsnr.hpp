#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "isirate/channel.hpp"
#include "isirate/scalar.hpp"

namespace isirate {

struct SearchOptions {
    /// Longest error event explored by the branch-and-bound; 0 means 4L.
    std::size_t max_len = 0;
    /// Largest error-state graph used to certify the global minimum.
    std::size_t state_budget = std::size_t{1} << 22;
    bool throw_if_inconclusive = true;
};

struct ErrorEventSearch {
    /// Normalised differences (x - x')/d_min, plus 0, ascending.
    std::vector<double> error_alphabet;
    double delta_min_sq = 0.0;
    std::vector<double> witness;
    std::size_t explored = 0;
    std::size_t max_len = 0;
    /// Minimum over events of any length, when the state graph fits the budget.
    std::optional<double> global_minimum;
    bool certified_global = false;
};

/// Squared norm of the error sequence filtered by the channel.
double event_distance(const ChannelResponse& channel, const std::vector<double>& errors);

/// Minimum normalised distance over error events; unit-energy channels only.
ErrorEventSearch delta_min_sq(const ChannelResponse& channel, const InputDistribution& x,
                              const SearchOptions& options = {});

struct ExponentGap {
    double delta_min_sq = 0.0;
    double g_zf_dfe = 0.0;
    bool strict = false;
    ErrorEventSearch search;
};

ExponentGap exponent_gap(const ChannelResponse& channel, const InputDistribution& x,
                         const SearchOptions& options = {});

/// A possibly underflowing positive quantity together with its logarithm.
struct TailValue {
    double value = 0.0;
    double log_value = 0.0;
};

/// Upper bound on H(x) - achievable rate, given the error-event constant K'.
TailValue fano_forney_upper(const ErrorEventSearch& search, const InputDistribution& x, double rho,
                            double k_prime);
TailValue fano_forney_upper(const ChannelResponse& channel, const InputDistribution& x, double rho,
                            double k_prime, const SearchOptions& options = {});

struct SlGapLower {
    TailValue bound;
    double snr_upper = 0.0;
    bool null_branch = false;
    double c1 = 0.0;
    /// |Omega| / (2 pi).
    double omega_fraction = 0.0;
};

/// Lower bound on H(x) - I_SL.
SlGapLower sl_gap_lower(const ChannelResponse& channel, const InputDistribution& x, double rho);

/// Measure of {theta : |H(theta)|^2 < level} divided by 2 pi.
double low_power_fraction(const ChannelResponse& channel, double level);
/// sqrt of the mean of log^2 |H|^2.
double log_power_rms(const ChannelResponse& channel);

struct CrossoverRow {
    double rho = 0.0;
    std::optional<double> log_upper;
    std::optional<double> log_lower;
    bool certified = false;
};

struct CrossoverProbe {
    std::vector<CrossoverRow> rows;
    /// Smallest grid rho where the achievable-rate gap bound drops below the I_SL gap bound.
    std::optional<double> crossing_rho;
    double delta_min_sq = 0.0;
    double g_zf_dfe = 0.0;
};

CrossoverProbe crossover_probe(const ChannelResponse& channel, const InputDistribution& x,
                               const std::vector<double>& rho_grid, double k_prime,
                               const SearchOptions& options = {});

} // namespace isirate
