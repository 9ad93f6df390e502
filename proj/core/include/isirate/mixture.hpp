#pragma once

#include <cstddef>
#include <vector>

namespace isirate {

/// Finite law: values[i] with probability probs[i]. Values may repeat.
struct DiscreteLaw {
    std::vector<double> values;
    std::vector<double> probs;

    std::size_t size() const noexcept { return values.size(); }
    double mean() const noexcept;
    double second_moment() const noexcept;
    /// Entropy of the labels (nats).
    double label_entropy() const noexcept;
};

/// Law of sum_k coeffs[k] * X_k for i.i.d. X_k ~ symbol. Branches whose
/// probability falls below an adaptively chosen threshold are dropped while
/// the dropped mass stays <= prune_mass; the kept law is renormalised.
struct CombinationLaw {
    DiscreteLaw law;
    double pruned_mass = 0.0;
};

CombinationLaw linear_combination_law(const std::vector<double>& coeffs, const DiscreteLaw& symbol,
                                      double prune_mass = 1e-12,
                                      std::size_t budget = std::size_t{1} << 24);

/// KL divergence between the law of Z + N and N(0,1), Z ~ law, N ~ N(0,1).
/// Equals E[Z^2]/2 - I(Z; Z + N); accurate in relative terms when Z is small.
double output_divergence(const DiscreteLaw& law, double rel_tol = 1e-12);

/// I(Z; sqrt(gamma) Z + N) in nats.
double discrete_mutual_info(const DiscreteLaw& law, double gamma);

/// H(label) - I(Z; sqrt(gamma) Z + N); accurate in relative terms at high SNR.
double discrete_equivocation(const DiscreteLaw& law, double gamma);

/// E(Z - E[Z | sqrt(gamma) Z + N])^2.
double discrete_mmse(const DiscreteLaw& law, double gamma);

} // namespace isirate
