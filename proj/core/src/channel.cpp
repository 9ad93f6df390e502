#include "isirate/channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "isirate/error.hpp"

namespace isirate {

namespace {

constexpr double kCircleTol = 1e-9;

std::pair<std::size_t, std::size_t> nonzero_span(const std::vector<double>& h)
{
    std::size_t first = 0;
    while (first < h.size() && h[first] == 0.0)
        ++first;
    std::size_t last = h.size();
    while (last > first && h[last - 1] == 0.0)
        --last;
    return {first, last};
}

std::complex<double> eval_poly(const std::vector<double>& c, std::complex<double> z)
{
    std::complex<double> acc = 0.0;
    for (double ck : c)
        acc = acc * z + ck;
    return acc;
}

std::complex<double> eval_dpoly(const std::vector<double>& c, std::complex<double> z)
{
    std::complex<double> acc = 0.0;
    const std::size_t n = c.size() - 1;
    for (std::size_t k = 0; k < n; ++k)
        acc = acc * z + c[k] * static_cast<double>(n - k);
    return acc;
}

// Periodic trapezoid on theta_k = -pi + 2 pi k / n, doubled until stable.
template <class F>
double doubling_mean(const ChannelResponse& channel, F&& f, const SpectralOptions& opt,
                     double blowup = std::numeric_limits<double>::infinity())
{
    std::size_t n = std::max<std::size_t>(opt.min_points, 4);
    const double two_pi = 2.0 * std::numbers::pi;
    long double sum = 0.0L;
    for (std::size_t k = 0; k < n; ++k)
        sum += f(transfer_power(channel, -std::numbers::pi + two_pi * k / n));
    double prev = static_cast<double>(sum / n);
    while (n < opt.max_points) {
        long double mid = 0.0L;
        for (std::size_t k = 0; k < n; ++k)
            mid += f(transfer_power(channel, -std::numbers::pi + two_pi * (k + 0.5) / n));
        sum += mid;
        n *= 2;
        const double cur = static_cast<double>(sum / n);
        if (std::abs(cur) > blowup)
            return cur;
        if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur))
            return cur;
        prev = cur;
    }
    throw Error(ErrorCode::NonConvergent,
                "spectral mean did not converge at " + std::to_string(opt.max_points) + " points");
}

} // namespace

ChannelResponse::ChannelResponse(std::vector<double> taps) : taps_(std::move(taps))
{
    if (taps_.empty())
        throw Error(ErrorCode::InvalidParams, "channel needs at least one tap");
    for (double h : taps_)
        if (!std::isfinite(h))
            throw Error(ErrorCode::InvalidParams, "channel taps must be finite");
    if (std::all_of(taps_.begin(), taps_.end(), [](double h) { return h == 0.0; }))
        throw Error(ErrorCode::InvalidParams, "channel taps are all zero");
}

double ChannelResponse::energy() const noexcept
{
    return std::inner_product(taps_.begin(), taps_.end(), taps_.begin(), 0.0);
}

bool ChannelResponse::is_normalized(double tol) const noexcept
{
    return std::abs(energy() - 1.0) <= tol;
}

ChannelResponse ChannelResponse::normalized() const
{
    const double s = 1.0 / std::sqrt(energy());
    std::vector<double> h = taps_;
    for (double& v : h)
        v *= s;
    return ChannelResponse(std::move(h));
}

double transfer_power(const ChannelResponse& channel, double theta)
{
    double re = 0.0;
    double im = 0.0;
    const auto& h = channel.taps();
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double a = static_cast<double>(k) * theta;
        re += h[k] * std::cos(a);
        im -= h[k] * std::sin(a);
    }
    return re * re + im * im;
}

double spectral_mean(const ChannelResponse& channel, const std::function<double(double)>& f,
                     const SpectralOptions& options)
{
    return doubling_mean(channel, f, options);
}

std::vector<std::complex<double>> channel_zeros(const ChannelResponse& channel)
{
    const auto [first, last] = nonzero_span(channel.taps());
    std::vector<double> c(channel.taps().begin() + first, channel.taps().begin() + last);
    const std::size_t deg = c.size() - 1;
    if (deg == 0)
        return {};

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (std::size_t j = 0; j < deg; ++j)
        comp(0, j) = -c[j + 1] / c[0];
    for (std::size_t i = 1; i < deg; ++i)
        comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::RootFindingFailure, "companion eigenvalue iteration failed");

    std::vector<std::complex<double>> roots(deg);
    for (std::size_t i = 0; i < deg; ++i) {
        std::complex<double> z = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        for (int it = 0; it < 8; ++it) {
            const auto d = eval_dpoly(c, z);
            if (std::abs(d) == 0.0)
                break;
            const auto step = eval_poly(c, z) / d;
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z)))
                break;
        }
        double scale = 0.0;
        for (double ck : c)
            scale = scale * std::abs(z) + std::abs(ck);
        if (std::abs(eval_poly(c, z)) > 1e-7 * scale)
            throw Error(ErrorCode::RootFindingFailure, "polynomial root did not converge");
        roots[i] = z;
    }
    return roots;
}

double zf_dfe_gain(const ChannelResponse& channel)
{
    const std::size_t first = nonzero_span(channel.taps()).first;
    double log_g = std::log(channel[first] * channel[first]);
    for (const auto& r : channel_zeros(channel)) {
        const double m = std::abs(r);
        if (m > 1.0)
            log_g += 2.0 * std::log(m);
    }
    return std::exp(log_g);
}

ChannelResponse to_minimum_phase(const ChannelResponse& channel)
{
    const auto& h = channel.taps();
    auto roots = channel_zeros(channel);
    for (auto& r : roots)
        if (std::abs(r) > 1.0 + kCircleTol)
            r = 1.0 / std::conj(r);

    // Monic product of (z - r); imaginary parts cancel for conjugate pairs.
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= r * poly[k];
        }
        poly = std::move(next);
    }
    std::vector<double> out(h.size(), 0.0);
    double e = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        out[k] = poly[k].real();
        e += out[k] * out[k];
    }
    const double s = std::sqrt(channel.energy() / e);
    for (double& v : out)
        v *= s;
    return ChannelResponse(std::move(out));
}

SpectralSummary spectral_summary(const ChannelResponse& channel, double rho,
                                 const SpectralOptions& options)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error(ErrorCode::DomainError, "rho must be positive");
    SpectralSummary s;
    s.rho = rho;
    s.mean_power = channel.energy();

    const double m = doubling_mean(channel, [rho](double p) { return rho * p / (1.0 + rho * p); },
                                   options);
    s.snr_le_excess = m / (1.0 - m);
    s.snr_le = 1.0 / (1.0 - m);
    s.log_snr_dfe = doubling_mean(channel, [rho](double p) { return std::log1p(rho * p); }, options);
    s.gaussian_rate = 0.5 * s.log_snr_dfe;
    s.snr_dfe = std::exp(s.log_snr_dfe);
    s.snr_dfe_excess = std::expm1(s.log_snr_dfe);

    s.g_zf_dfe = zf_dfe_gain(channel);
    s.snr_zf_dfe = rho * s.g_zf_dfe;

    const auto roots = channel_zeros(channel);
    s.spectral_null = std::any_of(roots.begin(), roots.end(), [](const auto& r) {
        return std::abs(std::abs(r) - 1.0) <= kCircleTol;
    });
    if (s.spectral_null) {
        s.g_zf_le = 0.0;
    } else {
        constexpr double kBlowup = 1e12;
        const double inv = doubling_mean(channel, [](double p) { return 1.0 / p; }, options, kBlowup);
        s.g_zf_le = (inv > kBlowup) ? 0.0 : 1.0 / inv;
    }
    return s;
}

} // namespace isirate
