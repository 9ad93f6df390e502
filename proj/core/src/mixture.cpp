#include "isirate/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isirate/error.hpp"
#include "quadrature.hpp"

namespace isirate {

namespace {

constexpr double kPiece = 1.0;
constexpr double kTail = 12.0;

// (1+u) log(1+u) - u, with a series near zero to keep relative accuracy.
double kl_kernel(double u)
{
    if (std::abs(u) < 0.05) {
        const double u2 = u * u;
        return u2 * (0.5 + u * (-1.0 / 6 + u * (1.0 / 12 + u * (-1.0 / 20 + u * (1.0 / 30 + u * (-1.0 / 42 + u / 56))))));
    }
    return (1.0 + u) * std::log1p(u) - u;
}

void validate(const DiscreteLaw& law)
{
    if (law.values.empty() || law.values.size() != law.probs.size())
        throw Error(ErrorCode::InvalidParams, "discrete law needs matching non-empty values/probs");
}

double span_of(const std::vector<double>& a)
{
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    return *hi - *lo;
}

} // namespace

double DiscreteLaw::mean() const noexcept
{
    long double s = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += static_cast<long double>(probs[i]) * values[i];
    return static_cast<double>(s);
}

double DiscreteLaw::second_moment() const noexcept
{
    long double s = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += static_cast<long double>(probs[i]) * values[i] * values[i];
    return static_cast<double>(s);
}

double DiscreteLaw::label_entropy() const noexcept
{
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0)
            h -= p * std::log(p);
    return h;
}

CombinationLaw linear_combination_law(const std::vector<double>& coeffs, const DiscreteLaw& symbol,
                                      double prune_mass, std::size_t budget)
{
    validate(symbol);
    std::vector<std::size_t> order(symbol.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return symbol.probs[x] > symbol.probs[y]; });
    std::vector<double> sv, sp, tail(symbol.size() + 1, 0.0);
    for (std::size_t k : order) {
        sv.push_back(symbol.values[k]);
        sp.push_back(symbol.probs[k]);
    }
    for (std::size_t k = sp.size(); k-- > 0;)
        tail[k] = tail[k + 1] + sp[k];

    const std::size_t depth = coeffs.size();
    const std::size_t m = sv.size();

    // Counts leaves kept and mass dropped at threshold tau, without storing.
    auto survey = [&](double tau, std::size_t cap) {
        std::size_t leaves = 0;
        long double dropped = 0.0L;
        std::vector<std::size_t> idx(depth + 1, 0);
        std::vector<double> prob(depth + 1, 1.0);
        std::size_t d = 0;
        if (depth == 0)
            return std::pair<std::size_t, double>{1, 0.0};
        while (true) {
            if (idx[d] >= m) {
                if (d == 0)
                    break;
                --d;
                ++idx[d];
                continue;
            }
            const double p = prob[d] * sp[idx[d]];
            if (p < tau) {
                dropped += prob[d] * tail[idx[d]];
                idx[d] = m;
                continue;
            }
            if (d + 1 == depth) {
                if (++leaves > cap)
                    return std::pair<std::size_t, double>{leaves, static_cast<double>(dropped)};
                ++idx[d];
                continue;
            }
            prob[d + 1] = p;
            idx[d + 1] = 0;
            ++d;
        }
        return std::pair<std::size_t, double>{leaves, static_cast<double>(dropped)};
    };

    double tau = 0.0;
    if (prune_mass > 0.0 && depth > 0) {
        double t = prune_mass;
        bool found = false;
        for (int step = 0; step < 40; ++step, t *= 0.1) {
            const auto [leaves, dropped] = survey(t, budget);
            if (dropped <= prune_mass) {
                if (leaves > budget)
                    break;
                tau = t;
                found = true;
                break;
            }
        }
        if (!found)
            throw Error(ErrorCode::BudgetExceeded,
                        "interference mixture exceeds " + std::to_string(budget) + " components");
    } else {
        const auto leaves = survey(0.0, budget).first;
        if (leaves > budget)
            throw Error(ErrorCode::BudgetExceeded,
                        "interference mixture exceeds " + std::to_string(budget) + " components");
    }

    CombinationLaw out;
    if (depth == 0) {
        out.law.values = {0.0};
        out.law.probs = {1.0};
        return out;
    }
    long double dropped = 0.0L;
    std::vector<std::size_t> idx(depth + 1, 0);
    std::vector<double> prob(depth + 1, 1.0);
    std::vector<double> val(depth + 1, 0.0);
    std::size_t d = 0;
    while (true) {
        if (idx[d] >= m) {
            if (d == 0)
                break;
            --d;
            ++idx[d];
            continue;
        }
        const double p = prob[d] * sp[idx[d]];
        if (p < tau) {
            dropped += prob[d] * tail[idx[d]];
            idx[d] = m;
            continue;
        }
        const double v = val[d] + coeffs[d] * sv[idx[d]];
        if (d + 1 == depth) {
            out.law.values.push_back(v);
            out.law.probs.push_back(p);
            ++idx[d];
            continue;
        }
        prob[d + 1] = p;
        val[d + 1] = v;
        idx[d + 1] = 0;
        ++d;
    }
    out.pruned_mass = static_cast<double>(dropped);
    if (out.pruned_mass > 0.0) {
        const double s = 1.0 / (1.0 - out.pruned_mass);
        for (double& p : out.law.probs)
            p *= s;
    }
    return out;
}

double output_divergence(const DiscreteLaw& law, double rel_tol)
{
    validate(law);
    const auto& mu = law.values;
    const auto& p = law.probs;
    const std::size_t k = mu.size();
    std::vector<double> logp(k), half_sq(k);
    for (std::size_t j = 0; j < k; ++j) {
        logp[j] = std::log(p[j]);
        half_sq[j] = 0.5 * mu[j] * mu[j];
    }
    auto integrand = [&](double y) {
        double emax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            emax = std::max(emax, mu[j] * y - half_sq[j]);
        const double lphi = -0.5 * y * y;
        if (std::abs(emax) <= 30.0) {
            double u = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                u += p[j] * std::expm1(mu[j] * y - half_sq[j]);
            return detail::kInvSqrt2Pi * std::exp(lphi) * kl_kernel(u);
        }
        // log(1+u) by log-sum-exp; integrand = f lr - f + phi with f = phi (1+u).
        double s = 0.0;
        double lmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            lmax = std::max(lmax, logp[j] + mu[j] * y - half_sq[j]);
        for (std::size_t j = 0; j < k; ++j)
            s += std::exp(logp[j] + mu[j] * y - half_sq[j] - lmax);
        const double lr = lmax + std::log(s);
        const double f = detail::kInvSqrt2Pi * std::exp(lphi + lr);
        return f * lr - f + detail::kInvSqrt2Pi * std::exp(lphi);
    };
    const auto [lo_it, hi_it] = std::minmax_element(mu.begin(), mu.end());
    const double lo = std::min(*lo_it, 0.0) - kTail;
    const double hi = std::max(*hi_it, 0.0) + kTail;
    const auto r = detail::integrate_pieces(integrand, lo, hi, kPiece, rel_tol);
    return std::max(0.0, r.value);
}

namespace {

double integration_half_width(const std::vector<double>& a) { return span_of(a) + kTail + 2.0; }

double log1p_sum_exp(const double* t, std::size_t k)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j)
        m = std::max(m, t[j]);
    if (m == -std::numeric_limits<double>::infinity())
        return 0.0;
    if (m > 30.0) {
        double s = std::exp(-m);
        for (std::size_t j = 0; j < k; ++j)
            s += std::exp(t[j] - m);
        return m + std::log(s);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        s += std::exp(t[j]);
    return std::log1p(s);
}

} // namespace

double discrete_equivocation(const DiscreteLaw& law, double gamma)
{
    validate(law);
    if (gamma < 0.0 || std::isnan(gamma))
        throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    const std::size_t k = law.size();
    if (k == 1)
        return 0.0;
    if (std::isinf(gamma)) {
        // Only coincident values remain confusable.
        return 0.0;
    }
    const double g = std::sqrt(gamma);
    std::vector<double> a(k), logp(k);
    for (std::size_t j = 0; j < k; ++j) {
        a[j] = g * law.values[j];
        logp[j] = std::log(law.probs[j]);
    }
    const double w = integration_half_width(a);
    double total = 0.0;
    std::vector<double> t(k);
    for (std::size_t i = 0; i < k; ++i) {
        auto integrand = [&](double n) {
            std::size_t c = 0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i)
                    continue;
                const double d = a[i] - a[j];
                t[c++] = logp[j] - logp[i] - d * n - 0.5 * d * d;
            }
            return detail::std_normal_pdf(n) * log1p_sum_exp(t.data(), c);
        };
        total += law.probs[i] * detail::integrate_pieces(integrand, -w, w, kPiece, 1e-12).value;
    }
    return std::max(0.0, total);
}

double discrete_mmse(const DiscreteLaw& law, double gamma)
{
    validate(law);
    if (gamma < 0.0 || std::isnan(gamma))
        throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    const std::size_t k = law.size();
    if (k == 1 || std::isinf(gamma))
        return 0.0;
    const double g = std::sqrt(gamma);
    std::vector<double> a(k), logp(k);
    for (std::size_t j = 0; j < k; ++j) {
        a[j] = g * law.values[j];
        logp[j] = std::log(law.probs[j]);
    }
    const double w = integration_half_width(a);
    double total = 0.0;
    std::vector<double> t(k);
    for (std::size_t i = 0; i < k; ++i) {
        auto integrand = [&](double n) {
            double m = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double d = a[i] - a[j];
                t[j] = (j == i) ? 0.0 : logp[j] - logp[i] - d * n - 0.5 * d * d;
                m = std::max(m, t[j]);
            }
            double z = 0.0;
            double err = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double e = std::exp(t[j] - m);
                z += e;
                err += e * (law.values[i] - law.values[j]);
            }
            err /= z;
            return detail::std_normal_pdf(n) * err * err;
        };
        total += law.probs[i] * detail::integrate_pieces(integrand, -w, w, kPiece, 1e-12).value;
    }
    return total;
}

double discrete_mutual_info(const DiscreteLaw& law, double gamma)
{
    validate(law);
    if (gamma < 0.0 || std::isnan(gamma))
        throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    if (gamma == 0.0 || law.size() == 1)
        return 0.0;
    const double h = law.label_entropy();
    if (std::isinf(gamma))
        return h;
    const double g = std::sqrt(gamma);
    DiscreteLaw scaled = law;
    for (double& v : scaled.values)
        v *= g;
    const double low = 0.5 * scaled.second_moment() - output_divergence(scaled);
    if (low <= 0.5 * h)
        return std::max(0.0, low);
    return std::max(0.0, h - discrete_equivocation(law, gamma));
}

} // namespace isirate
