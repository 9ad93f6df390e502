#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isirate/channel.hpp"
#include "isirate/rate_estimate.hpp"
#include "isirate/scalar.hpp"

namespace isirate {

/// Finite-state machine of the ISI channel. State s encodes the previous
/// L-1 inputs: s = sum_{i=1}^{L-1} idx(x_{k-i}) |X|^{i-1}.
class Trellis {
public:
    Trellis(const ChannelResponse& channel, const InputDistribution& x,
            std::size_t state_budget = std::size_t{1} << 20);

    std::size_t states() const noexcept { return states_; }
    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t next_state(std::size_t s, std::size_t j) const noexcept { return next_[s * inputs_ + j]; }
    /// Noiseless output when input j follows state s.
    double output(std::size_t s, std::size_t j) const noexcept { return out_[s * inputs_ + j]; }
    double log_prob(std::size_t j) const noexcept { return log_probs_[j]; }
    /// Stationary (product) probability of state s.
    const std::vector<double>& initial() const noexcept { return initial_; }

private:
    std::size_t states_ = 1;
    std::size_t inputs_ = 0;
    std::vector<std::size_t> next_;
    std::vector<double> out_;
    std::vector<double> log_probs_;
    std::vector<double> initial_;
};

struct ForwardOptions {
    /// Normalise the forward vector every this many symbols.
    std::size_t renorm_interval = 1;
};

/// log p(y_1..y_n) under i.i.d. inputs, stationary initial state and
/// Gaussian noise of the given variance.
double sequence_log_likelihood(const Trellis& trellis, std::span<const double> y, double noise_var,
                               const ForwardOptions& options = {});

struct SimOptions {
    ForwardOptions forward{};
    std::size_t threads = 0;
    std::size_t state_budget = std::size_t{1} << 20;
    /// Add the sampled input's log-probability and its mean H(x); unbiased,
    /// and far less noisy once the input is nearly recoverable.
    bool entropy_control = true;
};

/// Monte-Carlo estimate of the achievable rate (nats/symbol); the error bar is
/// the across-seed standard error.
RateEstimate estimate_rate(const ChannelResponse& channel, const InputDistribution& x, double rho,
                           std::size_t n_symbols, std::size_t n_seeds, std::uint64_t seed,
                           const SimOptions& options = {});

} // namespace isirate
