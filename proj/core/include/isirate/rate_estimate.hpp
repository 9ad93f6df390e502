#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace isirate {

/// Monte-Carlo estimate of an information rate (nats).
struct RateEstimate {
    double value = 0.0;
    double std_error = 0.0;
    /// Symbols (or samples) per seed.
    std::size_t n_symbols = 0;
    std::size_t n_seeds = 0;
    std::vector<std::uint64_t> seeds;
    /// Per-seed estimates when the error bar comes from across-seed spread.
    std::vector<double> per_seed;
};

/// Streaming mean/variance; merge() is Chan's pooled update.
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v)
    {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    void merge(const RunningStats& o)
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

} // namespace isirate
