#include "isirate/rate_sim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "isirate/error.hpp"
#include "isirate/parallel.hpp"
#include "isirate/rng.hpp"

namespace isirate {

Trellis::Trellis(const ChannelResponse& channel, const InputDistribution& x, std::size_t state_budget)
    : inputs_(x.size())
{
    const std::size_t mem = channel.length() - 1;
    const auto& h = channel.taps();
    const double log_budget = std::log(static_cast<double>(state_budget));
    if (static_cast<double>(mem) * std::log(static_cast<double>(inputs_)) > log_budget + 1e-9)
        throw Error(ErrorCode::StateBudgetExceeded, "trellis would exceed the state budget");
    for (std::size_t i = 0; i < mem; ++i)
        states_ *= inputs_;

    const std::size_t keep = states_ / (mem ? inputs_ : 1);
    next_.resize(states_ * inputs_);
    out_.resize(states_ * inputs_);
    initial_.assign(states_, 1.0);
    for (std::size_t j = 0; j < inputs_; ++j)
        log_probs_.push_back(std::log(x.probs()[j]));

    for (std::size_t s = 0; s < states_; ++s) {
        double past = 0.0;
        std::size_t rest = s;
        for (std::size_t i = 1; i <= mem; ++i) {
            const std::size_t d = rest % inputs_;
            rest /= inputs_;
            past += h[i] * x.atoms()[d];
            initial_[s] *= x.probs()[d];
        }
        for (std::size_t j = 0; j < inputs_; ++j) {
            next_[s * inputs_ + j] = mem ? j + inputs_ * (s % keep) : 0;
            out_[s * inputs_ + j] = h[0] * x.atoms()[j] + past;
        }
    }
}

namespace {

// Forward recursion over y; returns sum of log scaling factors so that
// log p(y) = result - n/2 log(2 pi var).
class Forward {
public:
    Forward(const Trellis& t, double noise_var, std::size_t renorm)
        : t_(t), inv2v_(0.5 / noise_var), renorm_(renorm ? renorm : 1), alpha_(t.initial()),
          next_(t.states()), logt_(t.states() * t.inputs())
    {
    }

    void step(double y)
    {
        const std::size_t ns = t_.states();
        const std::size_t ni = t_.inputs();
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < ns; ++s) {
            const double la = alpha_[s] > 0.0 ? std::log(alpha_[s]) : -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < ni; ++j) {
                const double d = y - t_.output(s, j);
                const double v = la + t_.log_prob(j) - d * d * inv2v_;
                logt_[s * ni + j] = v;
                m = std::max(m, v);
            }
        }
        std::fill(next_.begin(), next_.end(), 0.0);
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t j = 0; j < ni; ++j)
                next_[t_.next_state(s, j)] += std::exp(logt_[s * ni + j] - m);
        alpha_.swap(next_);
        log_scale_ += m;
        if (++count_ % renorm_ == 0)
            normalise();
    }

    double finish()
    {
        normalise();
        return log_scale_;
    }

private:
    void normalise()
    {
        double c = 0.0;
        for (double a : alpha_)
            c += a;
        for (double& a : alpha_)
            a /= c;
        log_scale_ += std::log(c);
    }

    const Trellis& t_;
    double inv2v_;
    std::size_t renorm_;
    std::vector<double> alpha_;
    std::vector<double> next_;
    std::vector<double> logt_;
    double log_scale_ = 0.0;
    std::size_t count_ = 0;
};

} // namespace

double sequence_log_likelihood(const Trellis& trellis, std::span<const double> y, double noise_var,
                               const ForwardOptions& options)
{
    if (!(noise_var > 0.0))
        throw Error(ErrorCode::InvalidParams, "noise variance must be positive");
    Forward fw(trellis, noise_var, options.renorm_interval);
    for (double v : y)
        fw.step(v);
    return fw.finish() - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi * noise_var);
}

RateEstimate estimate_rate(const ChannelResponse& channel, const InputDistribution& x, double rho,
                           std::size_t n_symbols, std::size_t n_seeds, std::uint64_t seed,
                           const SimOptions& options)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error(ErrorCode::InvalidParams, "rho must be positive");
    if (n_symbols < 10000)
        throw Error(ErrorCode::InvalidParams, "need at least 1e4 symbols per seed");
    if (n_seeds == 0)
        throw Error(ErrorCode::InvalidParams, "need at least one seed");
    const Trellis trellis(channel, x, options.state_budget);
    const double noise_var = x.power() / rho;
    const double sigma = std::sqrt(noise_var);
    const auto& h = channel.taps();
    const std::size_t mem = h.size() - 1;

    RateEstimate out;
    out.n_symbols = n_symbols;
    out.n_seeds = n_seeds;
    out.per_seed.assign(n_seeds, 0.0);
    for (std::size_t i = 0; i < n_seeds; ++i)
        out.seeds.push_back(seed + i);

    parallel_for(n_seeds, [&](std::size_t i) {
        auto gen = make_stream(seed + i, 0);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::discrete_distribution<std::size_t> pick(x.probs().begin(), x.probs().end());
        std::vector<double> hist(mem + 1, 0.0);
        for (std::size_t k = 1; k <= mem; ++k)
            hist[k] = x.atoms()[pick(gen)];
        Forward fw(trellis, noise_var, options.forward.renorm_interval);
        // The stationary start matches the law of the drawn history.
        long double noise_term = 0.0L;
        long double input_term = 0.0L;
        for (std::size_t k = 0; k < n_symbols; ++k) {
            for (std::size_t m = mem; m > 0; --m)
                hist[m] = hist[m - 1];
            const std::size_t j = pick(gen);
            hist[0] = x.atoms()[j];
            input_term += trellis.log_prob(j);
            double clean = 0.0;
            for (std::size_t m = 0; m <= mem; ++m)
                clean += h[m] * hist[m];
            const double n = sigma * normal(gen);
            noise_term += 0.5L * n * n / noise_var;
            fw.step(clean + n);
        }
        const double log_scale = fw.finish();
        const auto n = static_cast<double>(n_symbols);
        out.per_seed[i] = (-static_cast<double>(noise_term) - log_scale) / n;
        if (options.entropy_control)
            out.per_seed[i] += static_cast<double>(input_term) / n + x.entropy();
    }, options.threads);

    RunningStats st;
    for (double v : out.per_seed)
        st.push(v);
    out.value = st.mean;
    out.std_error = n_seeds > 1 ? std::sqrt(st.variance() / static_cast<double>(n_seeds)) : 0.0;
    return out;
}

} // namespace isirate
