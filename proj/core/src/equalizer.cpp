#include "isirate/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isirate/error.hpp"

namespace isirate {

namespace {

// Symmetric positive-definite band matrix, lower half stored row-wise:
// low[t][j] = A(t, t - j) for j = 0..bw.
class BandCholesky {
public:
    BandCholesky(std::size_t n, std::size_t bw) : n_(n), bw_(bw), low_(n * (bw + 1), 0.0) {}

    double& at(std::size_t t, std::size_t j) { return low_[t * (bw_ + 1) + j]; }

    void factor()
    {
        for (std::size_t t = 0; t < n_; ++t) {
            const std::size_t jmax = std::min(bw_, t);
            for (std::size_t j = jmax + 1; j-- > 1;) {
                // Entry L(t, s) with s = t - j.
                const std::size_t s = t - j;
                double v = at(t, j);
                for (std::size_t k = 1; k <= bw_ && k <= s && j + k <= bw_; ++k)
                    v -= at(t, j + k) * at(s, k);
                at(t, j) = v / at(s, 0);
            }
            double d = at(t, 0);
            for (std::size_t k = 1; k <= jmax; ++k)
                d -= at(t, k) * at(t, k);
            if (!(d > 0.0) || !std::isfinite(d))
                throw Error(ErrorCode::SingularSystem, "equalizer normal matrix is not positive definite");
            at(t, 0) = std::sqrt(d);
        }
    }

    std::vector<double> solve(std::vector<double> b)
    {
        for (std::size_t t = 0; t < n_; ++t) {
            double v = b[t];
            for (std::size_t k = 1; k <= std::min(bw_, t); ++k)
                v -= at(t, k) * b[t - k];
            b[t] = v / at(t, 0);
        }
        for (std::size_t t = n_; t-- > 0;) {
            double v = b[t];
            for (std::size_t k = 1; k <= bw_ && t + k < n_; ++k)
                v -= at(t + k, k) * b[t + k];
            b[t] = v / at(t, 0);
        }
        return b;
    }

private:
    std::size_t n_;
    std::size_t bw_;
    std::vector<double> low_;
};

struct RawDesign {
    std::vector<double> a;
    double c = 0.0;
    std::vector<double> alpha;
    double sum_w2 = 0.0;
};

RawDesign solve_design(const std::vector<double>& h, double power, double n0, std::size_t m)
{
    const std::size_t len = h.size();
    const std::size_t n = 2 * m + 1;
    const std::size_t bw = len - 1;
    BandCholesky chol(n, bw);
    for (std::size_t t = 0; t < n; ++t)
        chol.at(t, 0) = n0;
    // Interferer k >= 1 reaches y_t with weight h_{t-k}.
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = 0; i < len && k + i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                chol.at(k + i, i - j) += power * h[i] * h[j];
    chol.factor();

    std::vector<double> u(n, 0.0);
    for (std::size_t t = 0; t < len && t < n; ++t)
        u[t] = h[t];
    RawDesign out;
    out.a = chol.solve(u);
    for (std::size_t t = 0; t < n; ++t)
        out.c += u[t] * out.a[t];
    out.alpha.assign(n - 1, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < len && k + i < n; ++i)
            s += out.a[k + i] * h[i];
        out.alpha[k - 1] = s / out.c;
    }
    for (double v : out.a)
        out.sum_w2 += (v / out.c) * (v / out.c);
    return out;
}

} // namespace

std::size_t truncation_length(const std::vector<double>& residual, double threshold)
{
    double total = 0.0;
    for (double v : residual)
        total += v * v;
    if (total == 0.0)
        return 0;
    double tail = 0.0;
    std::size_t n = residual.size();
    // Walk back while the tail stays under the threshold.
    while (n > 0) {
        const double next = tail + residual[n - 1] * residual[n - 1];
        if (!(next < threshold * total))
            break;
        tail = next;
        --n;
    }
    return n;
}

DfeDesign design_mmse_dfe(const ChannelResponse& channel, const InputDistribution& x, double rho,
                          const DfeOptions& options)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error(ErrorCode::DomainError, "rho must be positive");
    const std::size_t len = channel.length();
    std::size_t m = options.half_len ? options.half_len : std::max<std::size_t>(8 * len, 64);
    if (m < len)
        throw Error(ErrorCode::InvalidParams, "feedforward half-length must be at least L");

    const auto spectral = spectral_summary(channel, rho, options.spectral);
    DfeDesign d;
    d.rho = rho;
    d.power = x.power();
    d.noise_psd = d.power / rho;
    d.target_snr = spectral.snr_dfe_excess;

    while (true) {
        const auto raw = solve_design(channel.taps(), d.power, d.noise_psd, m);
        d.half_len = m;
        d.unbiased_snr = d.power * raw.c;
        d.snr_gap = std::abs(d.unbiased_snr - d.target_snr) / d.target_snr;
        if (d.snr_gap <= options.snr_tol || 2 * m > options.max_half_len) {
            d.feedforward = raw.a;
            d.scale = raw.c;
            d.noise_var = d.noise_psd * raw.sum_w2;
            d.full_residual_energy = 0.0;
            for (double v : raw.alpha)
                d.full_residual_energy += v * v;
            const std::size_t n = truncation_length(raw.alpha, options.truncation);
            d.residual.assign(raw.alpha.begin(), raw.alpha.begin() + static_cast<std::ptrdiff_t>(n));
            break;
        }
        m *= 2;
    }
    if (d.snr_gap > options.snr_tol) {
        std::ostringstream msg;
        msg << "unbiased SNR gap " << d.snr_gap << " above tolerance at M=" << d.half_len;
        throw Error(ErrorCode::NotConverged, msg.str());
    }
    return d;
}

DfeSummary summarize(const DfeDesign& design, const InputDistribution& x)
{
    DfeSummary s;
    double b2 = 0.0, g3 = 0.0, d4 = 0.0;
    for (double a : design.residual) {
        const double a2 = a * a;
        b2 += a2;
        g3 += a2 * a;
        d4 += a2 * a2;
    }
    s.beta1_sq = b2;
    s.beta0_sq = 1.0 + b2;
    s.gamma1_cu = g3;
    s.delta1_4 = d4;
    s.S = x.power() / design.noise_var;
    s.eps0 = s.beta0_sq * s.S;
    s.eps1 = s.beta1_sq * s.S;
    return s;
}

DfeSummary closed_form_summary(const SpectralSummary& sp)
{
    const double el = sp.snr_le_excess;
    const double ed = sp.snr_dfe_excess;
    if (!(el > 0.0))
        throw Error(ErrorCode::DegenerateSnr, "linear-equalizer SNR equals one");
    const double diff = std::max(0.0, ed - el);
    DfeSummary s;
    s.S = ed * ed * (1.0 + el) / ((1.0 + ed) * el);
    s.beta1_sq = diff / ((1.0 + el) * ed * ed);
    s.beta0_sq = 1.0 + s.beta1_sq;
    s.eps0 = diff / el + ed;
    s.eps1 = diff / ((1.0 + ed) * el);
    return s;
}

DfeSummary closed_form_summary(const ChannelResponse& channel, double rho, const SpectralOptions& options)
{
    return closed_form_summary(spectral_summary(channel, rho, options));
}

} // namespace isirate
