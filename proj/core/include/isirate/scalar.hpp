#pragma once

#include <string>
#include <vector>

#include "isirate/mixture.hpp"

namespace isirate {

/// Zero-mean finite-alphabet law of an i.i.d. channel input.
class InputDistribution {
public:
    InputDistribution(std::vector<double> atoms, std::vector<double> probs, std::string label = {});

    const std::vector<double>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    const std::string& label() const noexcept { return label_; }

    double power() const noexcept { return power_; }
    double skewness() const noexcept { return skewness_; }
    double excess_kurtosis() const noexcept { return kurtosis_; }
    double entropy() const noexcept { return entropy_; }
    double d_min() const noexcept { return d_min_; }
    /// d_min of the unit-power normalised law.
    double normalized_d_min() const noexcept;
    /// Smaller probability of a closest pair, maximised over closest pairs.
    double rare_pair_prob() const noexcept { return rare_pair_prob_; }

    /// Atoms scaled to unit power.
    DiscreteLaw normalized_law() const;

private:
    std::vector<double> atoms_;
    std::vector<double> probs_;
    std::string label_;
    double power_ = 0.0;
    double skewness_ = 0.0;
    double kurtosis_ = 0.0;
    double entropy_ = 0.0;
    double d_min_ = 0.0;
    double rare_pair_prob_ = 0.0;
};

InputDistribution make_bpsk();
/// Two atoms with P(x > 0) = p_pos, zero mean, unit power.
InputDistribution make_skewed_binary(double p_pos);
/// {-a, 0, a} with P(+-a) = p_edge each, unit power.
InputDistribution make_trinary(double p_edge);

/// I_x(gamma) in nats, gamma = signal power / noise power.
double mutual_info(const InputDistribution& x, double gamma);
/// H(x) - I_x(gamma), computed directly (no cancellation at high SNR).
double equivocation(const InputDistribution& x, double gamma);
/// mmse of the unit-power normalised input.
double mmse(const InputDistribution& x, double gamma);

/// mmse of equiprobable +-1 from the tanh integral.
double mmse_binary(double gamma);

double q_tail(double x);
double log_q_tail(double x);
/// Integral of Q(sqrt(g)) over g in [s, inf).
double q_integral(double s);
double log_q_integral(double s);

/// Fourth-order low-SNR expansion of I(xi; xi + nu) at SNR rho.
double low_snr_series(double skew, double kurt, double rho);

double binary_entropy(double p);

} // namespace isirate
