#include "isirate/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "isirate/error.hpp"
#include "quadrature.hpp"

namespace isirate {

InputDistribution::InputDistribution(std::vector<double> atoms, std::vector<double> probs,
                                     std::string label)
    : atoms_(std::move(atoms)), probs_(std::move(probs)), label_(std::move(label))
{
    if (atoms_.size() != probs_.size())
        throw Error(ErrorCode::InvalidParams, "atoms and probs differ in length");
    if (atoms_.size() < 2)
        throw Error(ErrorCode::InvalidParams, "input law needs at least two atoms");
    double total = 0.0;
    double amax = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!std::isfinite(atoms_[i]) || !(probs_[i] > 0.0))
            throw Error(ErrorCode::InvalidParams, "atoms must be finite and probs positive");
        total += probs_[i];
        amax = std::max(amax, std::abs(atoms_[i]));
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidParams, "probabilities must sum to one");

    std::vector<std::size_t> order(atoms_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return atoms_[a] < atoms_[b]; });
    d_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < order.size(); ++i)
        d_min_ = std::min(d_min_, atoms_[order[i]] - atoms_[order[i - 1]]);
    if (!(d_min_ > 0.0))
        throw Error(ErrorCode::InvalidParams, "atoms must be distinct");
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double gap = atoms_[order[i]] - atoms_[order[i - 1]];
        if (gap <= d_min_ * (1.0 + 1e-12))
            rare_pair_prob_ = std::max(rare_pair_prob_, std::min(probs_[order[i]], probs_[order[i - 1]]));
    }

    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const double a = atoms_[i];
        const double p = probs_[i];
        m1 += p * a;
        m2 += p * a * a;
        m3 += p * a * a * a;
        m4 += p * a * a * a * a;
        entropy_ -= p * std::log(p);
    }
    if (std::abs(m1) > 1e-12 * std::max(1.0, amax))
        throw Error(ErrorCode::InvalidParams, "input law must have zero mean");
    power_ = m2;
    skewness_ = m3 / std::pow(m2, 1.5);
    kurtosis_ = m4 / (m2 * m2) - 3.0;
}

double InputDistribution::normalized_d_min() const noexcept { return d_min_ / std::sqrt(power_); }

DiscreteLaw InputDistribution::normalized_law() const
{
    DiscreteLaw law{atoms_, probs_};
    const double s = 1.0 / std::sqrt(power_);
    for (double& v : law.values)
        v *= s;
    return law;
}

InputDistribution make_bpsk() { return InputDistribution({-1.0, 1.0}, {0.5, 0.5}, "bpsk"); }

InputDistribution make_skewed_binary(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorCode::DomainError, "skewed binary needs 0 < p < 1");
    return InputDistribution({std::sqrt((1.0 - p) / p), -std::sqrt(p / (1.0 - p))}, {p, 1.0 - p},
                             "skewed_binary(" + std::to_string(p) + ")");
}

InputDistribution make_trinary(double p)
{
    if (!(p > 0.0 && p < 0.5))
        throw Error(ErrorCode::DomainError, "trinary needs 0 < p_edge < 0.5");
    const double a = 1.0 / std::sqrt(2.0 * p);
    return InputDistribution({-a, 0.0, a}, {p, 1.0 - 2.0 * p, p},
                             "trinary(" + std::to_string(p) + ")");
}

double mutual_info(const InputDistribution& x, double gamma)
{
    return discrete_mutual_info(x.normalized_law(), gamma);
}

double equivocation(const InputDistribution& x, double gamma)
{
    return discrete_equivocation(x.normalized_law(), gamma);
}

double mmse(const InputDistribution& x, double gamma)
{
    return discrete_mmse(x.normalized_law(), gamma);
}

double mmse_binary(double gamma)
{
    if (gamma < 0.0 || std::isnan(gamma))
        throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    if (gamma == 0.0)
        return 1.0;
    const double g = std::sqrt(gamma);
    auto integrand = [g](double y) {
        const double u = 2.0 * g * y;
        const double one_minus_tanh = (u > 0.0) ? 2.0 * std::exp(-u) / (1.0 + std::exp(-u))
                                                : 2.0 / (1.0 + std::exp(u));
        return detail::std_normal_pdf(y - g) * one_minus_tanh;
    };
    return detail::integrate_pieces(integrand, std::min(-14.0, g - 14.0), g + 14.0, 1.0, 1e-12).value;
}

double q_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_q_tail(double x)
{
    if (x < 30.0)
        return std::log(q_tail(x));
    const double r = 1.0 / (x * x);
    return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log1p(r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0))));
}

namespace {

// sum_n (c_n - c_{n+1}) a^{-2n-1}, c_n = (-1)^n (2n-1)!!.
double q_integral_series(double a)
{
    const double r = 1.0 / (a * a);
    double c = 1.0;
    double term_pow = 1.0 / a;
    double sum = 0.0;
    for (int n = 0; n < 12; ++n) {
        const double c_next = -c * (2.0 * n + 1.0);
        sum += (c - c_next) * term_pow;
        term_pow *= r;
        c = c_next;
    }
    return sum;
}

} // namespace

double q_integral(double s)
{
    if (s < 0.0 || std::isnan(s))
        throw Error(ErrorCode::DomainError, "q_integral needs s >= 0");
    const double a = std::sqrt(s);
    if (a < 30.0)
        return a * detail::std_normal_pdf(a) + (1.0 - s) * q_tail(a);
    return std::exp(log_q_integral(s));
}

double log_q_integral(double s)
{
    if (s < 0.0 || std::isnan(s))
        throw Error(ErrorCode::DomainError, "q_integral needs s >= 0");
    const double a = std::sqrt(s);
    if (a < 30.0)
        return std::log(q_integral(s));
    return -0.5 * s + std::log(detail::kInvSqrt2Pi) + std::log(q_integral_series(a));
}

double low_snr_series(double skew, double kurt, double rho)
{
    if (rho < 0.0)
        throw Error(ErrorCode::DomainError, "rho must be non-negative");
    const double s2 = skew * skew;
    const double r2 = rho * rho;
    return rho / 2.0 - r2 / 4.0 + (r2 * rho / 6.0) * (1.0 - s2 / 2.0) -
           (r2 * r2 / 48.0) * (kurt * kurt - 12.0 * s2 + 6.0);
}

double binary_entropy(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::DomainError, "binary entropy needs p in [0, 1]");
    double h = 0.0;
    if (p > 0.0)
        h -= p * std::log(p);
    if (p < 1.0)
        h -= (1.0 - p) * std::log1p(-p);
    return h;
}

} // namespace isirate
