#include "isirate/highsnr.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "isirate/error.hpp"

namespace isirate {

namespace {

constexpr double kTieTol = 1e-12;

std::vector<double> error_alphabet(const InputDistribution& x)
{
    std::vector<double> e{0.0};
    const auto& a = x.atoms();
    for (double u : a)
        for (double v : a)
            if (u != v)
                e.push_back((u - v) / x.d_min());
    std::sort(e.begin(), e.end());
    std::vector<double> out;
    for (double v : e)
        if (out.empty() || std::abs(v - out.back()) > 1e-12 * std::max(1.0, std::abs(v)))
            out.push_back(v);
    return out;
}

// Shortest return to the all-zero error state, which is the minimum over
// events of every length.
std::optional<double> global_minimum(const std::vector<double>& h, const std::vector<double>& e,
                                     std::size_t zero, std::size_t budget)
{
    const std::size_t mem = h.size() - 1;
    const std::size_t q = e.size();
    if (mem == 0) {
        double best = std::numeric_limits<double>::infinity();
        for (double v : e)
            if (v != 0.0)
                best = std::min(best, v * v * h[0] * h[0]);
        return best;
    }
    std::size_t states = 1;
    for (std::size_t i = 0; i < mem; ++i) {
        if (states > budget / q)
            return std::nullopt;
        states *= q;
    }
    const std::size_t keep = states / q;
    // State digit i-1 holds the error symbol i steps back.
    auto zero_state = [&] {
        std::size_t s = 0;
        for (std::size_t i = 0; i < mem; ++i)
            s = s * q + zero;
        return s;
    }();
    auto past_output = [&](std::size_t s) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= mem; ++i) {
            acc += h[i] * e[s % q];
            s /= q;
        }
        return acc;
    };

    std::vector<double> dist(states, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    double best = std::numeric_limits<double>::infinity();

    auto relax = [&](std::size_t s, double base) {
        const double past = past_output(s);
        for (std::size_t j = 0; j < q; ++j) {
            if (s == zero_state && j == zero)
                continue;
            const double y = e[j] * h[0] + past;
            const double d = base + y * y;
            const std::size_t nx = j + q * (s % keep);
            if (nx == zero_state) {
                best = std::min(best, d);
            } else if (d < dist[nx]) {
                dist[nx] = d;
                pq.emplace(d, nx);
            }
        }
    };
    relax(zero_state, 0.0);
    while (!pq.empty()) {
        const auto [d, s] = pq.top();
        pq.pop();
        if (d > dist[s])
            continue;
        if (d >= best)
            break;
        relax(s, d);
    }
    return best;
}

class BranchAndBound {
public:
    BranchAndBound(const std::vector<double>& h, const std::vector<double>& e, std::size_t zero,
                   std::size_t max_len, double incumbent)
        : h_(h), e_(e), zero_(zero), max_len_(max_len), best_(incumbent)
    {
        seq_.reserve(max_len);
        idx_.reserve(max_len);
    }

    void run()
    {
        for (std::size_t j = 0; j < e_.size(); ++j) {
            if (j == zero_)
                continue;
            push(j);
            visit(output_sq());
            pop();
        }
    }

    double best() const { return best_; }
    const std::vector<double>& witness() const { return witness_; }
    std::size_t explored() const { return explored_; }

private:
    double output_sq() const
    {
        const std::size_t k = seq_.size() - 1;
        double y = 0.0;
        for (std::size_t i = 0; i < h_.size() && i <= k; ++i)
            y += h_[i] * seq_[k - i];
        return y * y;
    }

    double tail_sq() const
    {
        const std::size_t n = seq_.size();
        double t = 0.0;
        for (std::size_t k = n; k + 1 < n + h_.size(); ++k) {
            double y = 0.0;
            for (std::size_t i = k - n + 1; i < h_.size() && i <= k; ++i)
                y += h_[i] * seq_[k - i];
            t += y * y;
        }
        return t;
    }

    std::uint64_t state_key() const
    {
        const std::size_t mem = h_.size() - 1;
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < mem; ++i) {
            const std::size_t pos = seq_.size() - 1 - i;
            s = s * e_.size() + (i < seq_.size() ? idx_[pos] : zero_);
        }
        return s * (max_len_ + 1) + seq_.size();
    }

    bool trailing_zero_run() const
    {
        const std::size_t mem = h_.size() - 1;
        if (seq_.size() < mem)
            return false;
        for (std::size_t i = 0; i < mem; ++i)
            if (idx_[seq_.size() - 1 - i] != zero_)
                return false;
        return true;
    }

    void visit(double partial)
    {
        ++explored_;
        if (partial >= best_ * (1.0 - kTieTol))
            return;
        if (idx_.back() != zero_) {
            const double total = partial + tail_sq();
            if (total < best_ * (1.0 - kTieTol)) {
                best_ = total;
                witness_ = seq_;
            }
        }
        if (seq_.size() >= max_len_ || trailing_zero_run())
            return;
        const auto key = state_key();
        auto it = memo_.find(key);
        if (it != memo_.end() && partial >= it->second)
            return;
        memo_[key] = partial;
        for (std::size_t j = 0; j < e_.size(); ++j) {
            push(j);
            visit(partial + output_sq());
            pop();
        }
    }

    void push(std::size_t j)
    {
        seq_.push_back(e_[j]);
        idx_.push_back(j);
    }
    void pop()
    {
        seq_.pop_back();
        idx_.pop_back();
    }

    const std::vector<double>& h_;
    const std::vector<double>& e_;
    std::size_t zero_;
    std::size_t max_len_;
    double best_;
    std::vector<double> witness_;
    std::vector<double> seq_;
    std::vector<std::size_t> idx_;
    std::unordered_map<std::uint64_t, double> memo_;
    std::size_t explored_ = 0;
};

double log_h2_plus(double log_p, double log_card)
{
    // h2(P) + P log|X| for P = exp(log_p) <= 1/2.
    if (log_p > -700.0) {
        const double p = std::exp(log_p);
        return std::log(binary_entropy(p) + p * log_card);
    }
    return log_p + std::log(1.0 - log_p + log_card);
}

} // namespace

double event_distance(const ChannelResponse& channel, const std::vector<double>& errors)
{
    const auto& h = channel.taps();
    double d = 0.0;
    for (std::size_t k = 0; k + 1 < errors.size() + h.size(); ++k) {
        double y = 0.0;
        for (std::size_t l = 0; l < errors.size(); ++l)
            if (k >= l && k - l < h.size())
                y += errors[l] * h[k - l];
        d += y * y;
    }
    return d;
}

ErrorEventSearch delta_min_sq(const ChannelResponse& channel, const InputDistribution& x,
                              const SearchOptions& options)
{
    if (!channel.is_normalized())
        throw Error(ErrorCode::NormalizationViolated, "error-event search needs a unit-energy channel");
    const auto& h = channel.taps();
    ErrorEventSearch out;
    out.error_alphabet = error_alphabet(x);
    out.max_len = options.max_len ? options.max_len : 4 * h.size();
    if (out.max_len < h.size())
        throw Error(ErrorCode::InvalidParams, "max_len must be at least L");
    const auto& e = out.error_alphabet;
    const std::size_t zero = static_cast<std::size_t>(std::find(e.begin(), e.end(), 0.0) - e.begin());

    out.global_minimum = global_minimum(h, e, zero, options.state_budget);
    const double start = out.global_minimum ? *out.global_minimum * (1.0 + 1e-9)
                                            : std::numeric_limits<double>::infinity();
    BranchAndBound bb(h, e, zero, out.max_len, start);
    bb.run();
    out.explored = bb.explored();
    if (bb.witness().empty()) {
        BranchAndBound full(h, e, zero, out.max_len, std::numeric_limits<double>::infinity());
        full.run();
        out.explored += full.explored();
        out.delta_min_sq = full.best();
        out.witness = full.witness();
    } else {
        out.delta_min_sq = bb.best();
        out.witness = bb.witness();
    }
    out.certified_global = out.global_minimum &&
                           std::abs(out.delta_min_sq - *out.global_minimum) <= 1e-10 * *out.global_minimum;
    if (!out.certified_global && options.throw_if_inconclusive) {
        std::ostringstream msg;
        msg << "minimum distance not certified at max_len=" << out.max_len
            << "; upper bound " << out.delta_min_sq;
        throw Error(ErrorCode::Inconclusive, msg.str());
    }
    return out;
}

ExponentGap exponent_gap(const ChannelResponse& channel, const InputDistribution& x,
                         const SearchOptions& options)
{
    const auto mp = to_minimum_phase(channel);
    ExponentGap g;
    g.search = delta_min_sq(mp, x, options);
    g.delta_min_sq = g.search.delta_min_sq;
    g.g_zf_dfe = zf_dfe_gain(channel);
    g.strict = g.search.certified_global && (g.delta_min_sq - g.g_zf_dfe > 1e-9);
    return g;
}

TailValue fano_forney_upper(const ErrorEventSearch& search, const InputDistribution& x, double rho,
                            double k_prime)
{
    if (!search.certified_global)
        throw Error(ErrorCode::Inconclusive, "Fano/Forney bound needs a certified minimum distance");
    if (!(k_prime > 0.0))
        throw Error(ErrorCode::InvalidParams, "K' must be positive");
    if (rho < 0.0)
        throw Error(ErrorCode::DomainError, "rho must be non-negative");
    const double half = 0.5 * x.normalized_d_min();
    const double arg = std::sqrt(rho * half * half * search.delta_min_sq);
    const double log_card = std::log(static_cast<double>(x.size()));
    double log_p = std::log(k_prime) + log_q_tail(arg);
    log_p = std::min(log_p, std::log(0.5));
    TailValue t;
    t.log_value = log_h2_plus(log_p, log_card);
    t.value = std::exp(t.log_value);
    return t;
}

TailValue fano_forney_upper(const ChannelResponse& channel, const InputDistribution& x, double rho,
                            double k_prime, const SearchOptions& options)
{
    return fano_forney_upper(delta_min_sq(channel, x, options), x, rho, k_prime);
}

double low_power_fraction(const ChannelResponse& channel, double level)
{
    const double pi = std::numbers::pi;
    std::vector<double> grid;
    constexpr std::size_t n = 4096;
    for (std::size_t k = 0; k <= n; ++k)
        grid.push_back(-pi + 2.0 * pi * static_cast<double>(k) / n);
    for (const auto& r : channel_zeros(channel))
        if (std::abs(std::abs(r) - 1.0) < 1e-3)
            grid.push_back(std::arg(r));
    std::sort(grid.begin(), grid.end());

    auto f = [&](double t) { return transfer_power(channel, t) - level; };
    double measure = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double a = grid[k], b = grid[k + 1];
        const double fa = f(a), fb = f(b);
        if (fa < 0.0 && fb < 0.0) {
            measure += b - a;
        } else if ((fa < 0.0) != (fb < 0.0)) {
            double lo = a, hi = b;
            const bool rising = fa < 0.0;
            for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((f(mid) < 0.0) == rising)
                    lo = mid;
                else
                    hi = mid;
            }
            const double x = 0.5 * (lo + hi);
            measure += rising ? x - a : b - x;
        }
    }
    return measure / (2.0 * pi);
}

double log_power_rms(const ChannelResponse& channel)
{
    const double pi = std::numbers::pi;
    std::vector<double> breaks{-pi, pi};
    for (const auto& r : channel_zeros(channel))
        if (std::abs(std::abs(r) - 1.0) < 1e-6)
            breaks.push_back(std::clamp(-std::arg(r), -pi, pi));
    std::sort(breaks.begin(), breaks.end());
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t) {
        const double p = transfer_power(channel, t);
        if (!(p > 0.0))
            return 0.0;
        const double l = std::log(p);
        return l * l;
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
        if (breaks[k + 1] > breaks[k])
            total += ts.integrate(f, breaks[k], breaks[k + 1], 1e-12);
    return std::sqrt(total / (2.0 * pi));
}

SlGapLower sl_gap_lower(const ChannelResponse& channel, const InputDistribution& x, double rho)
{
    if (!(rho > 0.0) || !(2.0 / std::sqrt(rho) < 1.0))
        throw Error(ErrorCode::SnrTooLow, "need 2 sqrt(N0/Px) < 1");
    const auto sp = spectral_summary(channel, rho);
    SlGapLower out;
    const double g = sp.g_zf_dfe;
    if (sp.g_zf_le > 0.0) {
        out.snr_upper = rho * g + g / sp.g_zf_le;
    } else {
        out.null_branch = true;
        out.c1 = log_power_rms(channel);
        out.omega_fraction = low_power_fraction(channel, 1.0 / std::sqrt(rho));
        out.snr_upper = rho * g * (1.0 + 1.0 / std::sqrt(rho)) * std::exp(out.c1 * std::sqrt(out.omega_fraction));
    }
    const double half = 0.5 * x.normalized_d_min();
    const double s = half * half * out.snr_upper;
    out.bound.log_value = std::log(2.0 * x.rare_pair_prob()) + log_q_integral(s);
    out.bound.value = std::exp(out.bound.log_value);
    return out;
}

CrossoverProbe crossover_probe(const ChannelResponse& channel, const InputDistribution& x,
                               const std::vector<double>& rho_grid, double k_prime,
                               const SearchOptions& options)
{
    CrossoverProbe probe;
    const auto gap = exponent_gap(channel, x, options);
    probe.delta_min_sq = gap.delta_min_sq;
    probe.g_zf_dfe = gap.g_zf_dfe;
    for (double rho : rho_grid) {
        CrossoverRow row;
        row.rho = rho;
        row.log_upper = fano_forney_upper(gap.search, x, rho, k_prime).log_value;
        try {
            row.log_lower = sl_gap_lower(channel, x, rho).bound.log_value;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::SnrTooLow)
                throw;
        }
        row.certified = row.log_lower && *row.log_upper < *row.log_lower;
        if (row.certified && !probe.crossing_rho)
            probe.crossing_rho = rho;
        probe.rows.push_back(row);
    }
    return probe;
}

} // namespace isirate
