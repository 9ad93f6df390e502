#include "isirate/bounds.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "isirate/error.hpp"
#include "isirate/parallel.hpp"
#include "isirate/rng.hpp"

namespace isirate {

double i_sow(const ChannelResponse& channel, const InputDistribution& x, double rho,
             const SpectralOptions& options)
{
    return mutual_info(x, spectral_summary(channel, rho, options).snr_zf_dfe);
}

double i_sl(const ChannelResponse& channel, const InputDistribution& x, double rho,
            const SpectralOptions& options)
{
    return mutual_info(x, spectral_summary(channel, rho, options).snr_dfe_excess);
}

namespace {

struct Divergences {
    double e0 = 0.0, e1 = 0.0, j0 = 0.0, j1 = 0.0;
    double pruned = 0.0;
    double max_sq = 0.0;
    std::size_t n0 = 0, n1 = 0;
};

Divergences mixture_divergences(const DfeDesign& design, const InputDistribution& x,
                                const MixtureOptions& opt)
{
    const double sc = std::sqrt(x.power() / design.noise_var);
    const DiscreteLaw sym = x.normalized_law();
    std::vector<double> c1(design.residual.size());
    for (std::size_t k = 0; k < c1.size(); ++k)
        c1[k] = sc * design.residual[k];
    std::vector<double> c0{sc};
    c0.insert(c0.end(), c1.begin(), c1.end());

    const auto law0 = linear_combination_law(c0, sym, opt.prune_mass, opt.budget);
    const auto law1 = linear_combination_law(c1, sym, opt.prune_mass, opt.budget);
    Divergences d;
    d.e0 = law0.law.second_moment();
    d.e1 = law1.law.second_moment();
    d.j0 = output_divergence(law0.law, opt.rel_tol);
    d.j1 = output_divergence(law1.law, opt.rel_tol);
    d.pruned = law0.pruned_mass + law1.pruned_mass;
    for (double v : law0.law.values)
        d.max_sq = std::max(d.max_sq, v * v);
    d.n0 = law0.law.size();
    d.n1 = law1.law.size();
    return d;
}

double error_estimate(const Divergences& d, double rel_tol, double extra)
{
    return rel_tol * (d.j0 + d.j1 + extra) + d.pruned * (1.0 + d.max_sq);
}

} // namespace

MmseExact i_mmse_exact(const DfeDesign& design, const InputDistribution& x, const MixtureOptions& options)
{
    const auto d = mixture_divergences(design, x, options);
    MmseExact out;
    out.i_mu0 = 0.5 * d.e0 - d.j0;
    out.i_mu1 = 0.5 * d.e1 - d.j1;
    out.value = out.i_mu0 - out.i_mu1;
    out.pruned_mass = d.pruned;
    out.components0 = d.n0;
    out.components1 = d.n1;
    out.error_bound = error_estimate(d, options.rel_tol, 0.0) + 1e-16 * (d.e0 + d.e1);
    return out;
}

GapExact slc_gap_exact(const DfeDesign& design, const InputDistribution& x, const MixtureOptions& options)
{
    const auto d = mixture_divergences(design, x, options);
    double b1 = 0.0;
    for (double a : design.residual)
        b1 += a * a;
    const double s = x.power() / design.noise_var;
    const double snr_u = s / (1.0 + b1 * s);
    DiscreteLaw sl = x.normalized_law();
    const double g = std::sqrt(snr_u);
    for (double& v : sl.values)
        v *= g;
    const double jx = output_divergence(sl, options.rel_tol);

    GapExact out;
    out.gap = 0.5 * (d.e0 - d.e1 - snr_u) - d.j0 + d.j1 + jx;
    out.i_mmse = 0.5 * (d.e0 - d.e1) - d.j0 + d.j1;
    out.i_sl = 0.5 * snr_u - jx;
    out.error_bound = error_estimate(d, options.rel_tol, jx);
    return out;
}

namespace {

// Density of W = sum_k a_k v_k + N by trapezoidal inversion of its
// characteristic function; the t-step sets an alias period beyond W's reach.
class InterferenceDensity {
public:
    InterferenceDensity(const std::vector<double>& a, const DiscreteLaw& sym, double reach, double t_max)
    {
        double amp = 0.0;
        const double vmax = std::max(std::abs(*std::min_element(sym.values.begin(), sym.values.end())),
                                     std::abs(*std::max_element(sym.values.begin(), sym.values.end())));
        for (double c : a)
            amp += std::abs(c) * vmax;
        const double period = 2.0 * amp + reach + 28.0;
        dt_ = 2.0 * std::numbers::pi / period;
        const auto nodes = static_cast<std::size_t>(std::ceil(t_max / dt_)) + 1;
        phi_.resize(nodes);
        for (std::size_t j = 0; j < nodes; ++j) {
            const double t = dt_ * static_cast<double>(j);
            std::complex<double> prod = std::exp(-0.5 * t * t);
            for (double c : a) {
                std::complex<double> s = 0.0;
                for (std::size_t v = 0; v < sym.size(); ++v)
                    s += sym.probs[v] * std::polar(1.0, t * c * sym.values[v]);
                prod *= s;
            }
            phi_[j] = prod;
        }
        phi_[0] *= 0.5;
    }

    double operator()(double w) const
    {
        const std::complex<double> step = std::polar(1.0, -dt_ * w);
        std::complex<double> rot = 1.0;
        double acc = 0.0;
        for (const auto& p : phi_) {
            acc += (p * rot).real();
            rot *= step;
        }
        return std::max(acc * dt_ / std::numbers::pi, std::numeric_limits<double>::min());
    }

private:
    double dt_ = 0.0;
    std::vector<std::complex<double>> phi_;
};

} // namespace

RateEstimate i_mmse_mc(const DfeDesign& design, const InputDistribution& x, std::size_t n_samples,
                       std::uint64_t seed, const McOptions& options)
{
    if (n_samples < 10000)
        throw Error(ErrorCode::InvalidParams, "Monte-Carlo I_MMSE needs at least 1e4 samples");
    if (options.stream_size == 0)
        throw Error(ErrorCode::InvalidParams, "stream size must be positive");
    const DiscreteLaw sym = x.normalized_law();
    const double a0 = std::sqrt(x.power() / design.noise_var);
    std::vector<double> a(design.residual.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = a0 * design.residual[k];
    const auto [vlo, vhi] = std::minmax_element(sym.values.begin(), sym.values.end());
    const InterferenceDensity density(a, sym, a0 * (*vhi - *vlo), options.t_max);

    const std::size_t streams = (n_samples + options.stream_size - 1) / options.stream_size;
    std::vector<RunningStats> stats(streams);
    const std::size_t m = sym.size();

    parallel_for(streams, [&](std::size_t s) {
        auto gen = make_stream(seed, s);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::discrete_distribution<std::size_t> pick(sym.probs.begin(), sym.probs.end());
        const std::size_t begin = s * options.stream_size;
        const std::size_t count = std::min(options.stream_size, n_samples - begin);
        RunningStats st;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t i0 = pick(gen);
            double w = normal(gen);
            for (double c : a)
                w += c * sym.values[pick(gen)];
            const double z = a0 * sym.values[i0] + w;
            double own = 0.0;
            double mix = 0.0;
            for (std::size_t v = 0; v < m; ++v) {
                const double f = (v == i0) ? density(w) : density(z - a0 * sym.values[v]);
                if (v == i0)
                    own = f;
                mix += sym.probs[v] * f;
            }
            st.push(std::log(own) - std::log(mix));
        }
        stats[s] = st;
    }, options.threads);

    RunningStats total;
    for (const auto& st : stats)
        total.merge(st);
    RateEstimate out;
    out.value = total.mean;
    out.std_error = std::sqrt(total.variance() / static_cast<double>(total.n));
    out.n_symbols = total.n;
    out.n_seeds = 1;
    out.seeds = {seed};
    return out;
}

double slc_gap_series(const DfeSummary& s, const InputDistribution& x)
{
    if (!s.gamma1_cu || !s.delta1_4)
        throw Error(ErrorCode::MissingMoments, "series needs tap-domain third and fourth moments");
    const double g3 = *s.gamma1_cu;
    const double d4 = *s.delta1_4;
    const double sk2 = x.skewness() * x.skewness();
    const double k2 = x.excess_kurtosis() * x.excess_kurtosis();
    const double b0 = s.beta0_sq;
    const double e0 = s.eps0;
    const double b6 = b0 * b0 * b0;
    const double b8 = b6 * b0;
    return -(g3 * sk2 / (6.0 * b6)) * e0 * e0 * e0 -
           (d4 * k2 / (24.0 * b8) - (2.0 * b0 + g3) * g3 * sk2 / (4.0 * b8)) * e0 * e0 * e0 * e0;
}

double two_tap_gap_leading(double q, const InputDistribution& x)
{
    if (!(q > 0.0 && q < 1.0))
        throw Error(ErrorCode::DomainError, "two-tap parameter q must lie in (0, 1)");
    const double sk = x.skewness();
    return -(1.0 / 6.0) * q * q * q * std::pow(1.0 - q * q, 1.5) * sk * sk;
}

GenieConfig genie_equal_sigma(std::vector<std::vector<std::size_t>> partition)
{
    GenieConfig c;
    c.sigmas_sq.assign(partition.size(), 1.0);
    c.partition = std::move(partition);
    return c;
}

GenieConfig genie_singleton(std::size_t taps)
{
    std::vector<std::vector<std::size_t>> p(taps);
    for (std::size_t k = 0; k < taps; ++k)
        p[k] = {k};
    return genie_equal_sigma(std::move(p));
}

GenieConfig genie_one_cluster(const std::vector<double>& coeffs,
                              std::vector<std::vector<std::size_t>> partition, std::size_t chosen)
{
    if (chosen >= partition.size())
        throw Error(ErrorCode::PartitionInvalid, "chosen block out of range");
    double b2 = 0.0;
    for (std::size_t k : partition[chosen]) {
        if (k >= coeffs.size())
            throw Error(ErrorCode::PartitionInvalid, "partition index out of range");
        b2 += coeffs[k] * coeffs[k];
    }
    if (!(b2 > 0.0))
        throw Error(ErrorCode::PartitionInvalid, "chosen block has zero weight");
    GenieConfig c;
    c.sigmas_sq.assign(partition.size(), 0.0);
    c.sigmas_sq[chosen] = 1.0 / b2;
    c.partition = std::move(partition);
    return c;
}

DiscreteLaw interference_law(const InputDistribution& x, const std::vector<double>& coeffs)
{
    return linear_combination_law(coeffs, x.normalized_law(), 0.0).law;
}

double genie_mmse_lower(const InputDistribution& x, const std::vector<double>& coeffs, double gamma,
                        const GenieConfig& config)
{
    if (gamma < 0.0)
        throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    if (config.partition.size() != config.sigmas_sq.size())
        throw Error(ErrorCode::PartitionInvalid, "one noise variance per block is required");
    std::vector<int> seen(coeffs.size(), 0);
    for (const auto& block : config.partition)
        for (std::size_t k : block) {
            if (k >= coeffs.size() || seen[k]++)
                throw Error(ErrorCode::PartitionInvalid, "partition must cover each tap exactly once");
        }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw Error(ErrorCode::PartitionInvalid, "partition must cover each tap exactly once");

    double energy = 0.0;
    for (double c : coeffs)
        energy += c * c;
    if (std::abs(energy - 1.0) > 1e-10)
        throw Error(ErrorCode::NormalizationViolated, "coefficients must have unit energy");

    std::vector<double> b2(config.partition.size(), 0.0);
    double weighted = 0.0;
    for (std::size_t m = 0; m < config.partition.size(); ++m) {
        for (std::size_t k : config.partition[m])
            b2[m] += coeffs[k] * coeffs[k];
        if (config.sigmas_sq[m] < 0.0)
            throw Error(ErrorCode::NormalizationViolated, "noise variances must be non-negative");
        weighted += b2[m] * config.sigmas_sq[m];
    }
    if (std::abs(weighted - 1.0) > 1e-10)
        throw Error(ErrorCode::NormalizationViolated, "sum of b_m^2 sigma_m^2 must equal one");

    const DiscreteLaw sym = x.normalized_law();
    double bound = 0.0;
    for (std::size_t m = 0; m < config.partition.size(); ++m) {
        if (b2[m] == 0.0 || config.sigmas_sq[m] == 0.0)
            continue;
        const double b = std::sqrt(b2[m]);
        std::vector<double> c;
        for (std::size_t k : config.partition[m])
            c.push_back(coeffs[k] / b);
        const auto law = linear_combination_law(c, sym, 0.0).law;
        bound += b2[m] * discrete_mmse(law, gamma / config.sigmas_sq[m]);
    }
    return bound;
}

double ie_bound(const DfeSummary& s, const InputDistribution& x, double gamma1, double gamma2)
{
    const double slack = 1e-12 * s.S;
    if (gamma1 < 0.0 || gamma1 > gamma2 + slack || gamma2 > s.S + slack)
        throw Error(ErrorCode::DomainError, "need 0 <= gamma1 <= gamma2 <= S");
    return mutual_info(x, s.beta0_sq * gamma1) - mutual_info(x, gamma1) + mutual_info(x, gamma2) -
           0.5 * std::log1p(s.beta1_sq * gamma2);
}

double ie_simple(const DfeSummary& s, const InputDistribution& x)
{
    return mutual_info(x, s.beta0_sq * s.S) - 0.5 * std::log1p(s.beta1_sq * s.S);
}

double ie_conj(const DfeSummary& s, const InputDistribution& x)
{
    return mutual_info(x, s.beta0_sq * s.S) - mutual_info(x, s.beta1_sq * s.S);
}

namespace {

template <class F>
std::optional<double> bisect_root(F&& f, double lo, double hi)
{
    double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo > 0.0 && fhi < 0.0))
        return std::nullopt;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> log_grid(double top, std::size_t n)
{
    std::vector<double> g(n);
    const double lo = std::log(top * 1e-8);
    const double hi = std::log(top);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.back() = top;
    return g;
}

struct GridBest {
    double value = -std::numeric_limits<double>::infinity();
    double g1 = 0.0;
    double g2 = 0.0;
};

// max over g1 <= g2 of F1(g1) + F2(g2) on a log grid (plus g = 0).
GridBest separable_grid(const DfeSummary& s, const InputDistribution& x, std::size_t n)
{
    auto grid = log_grid(s.S, n);
    grid.insert(grid.begin(), 0.0);
    GridBest best;
    double run_f1 = -std::numeric_limits<double>::infinity();
    double run_g1 = 0.0;
    for (double g : grid) {
        const double ig = mutual_info(x, g);
        const double f1 = mutual_info(x, s.beta0_sq * g) - ig;
        if (f1 > run_f1) {
            run_f1 = f1;
            run_g1 = g;
        }
        const double f2 = ig - 0.5 * std::log1p(s.beta1_sq * g);
        if (run_f1 + f2 > best.value) {
            best.value = run_f1 + f2;
            best.g1 = run_g1;
            best.g2 = g;
        }
    }
    return best;
}

} // namespace

IeOpt ie_opt(const DfeSummary& s, const InputDistribution& x)
{
    IeOpt out;
    const double top = s.S;
    auto g1 = [&](double g) { return s.beta0_sq * mmse(x, s.beta0_sq * g) - mmse(x, g); };
    auto g2 = [&](double g) { return mmse(x, g) - s.beta1_sq / (1.0 + s.beta1_sq * g); };

    if (g1(top) >= 0.0) {
        out.gamma1 = out.gamma2 = top;
        out.value = ie_simple(s, x);
    } else {
        const double lo = top * 1e-12;
        auto r1 = bisect_root(g1, lo, top);
        double gamma2 = top;
        std::optional<double> r2 = top;
        if (g2(top) < 0.0)
            r2 = bisect_root(g2, lo, top);
        if (!r1 || !r2) {
            // Bracket failed: fall back to a 512-point separable grid.
            const auto gb = separable_grid(s, x, 512);
            out.grid_fallback = true;
            out.gamma1 = gb.g1;
            out.gamma2 = gb.g2;
            out.value = gb.value;
            return out;
        }
        gamma2 = *r2;
        double gamma1 = *r1;
        if (gamma1 > gamma2) {
            // Constrained optimum lies on gamma1 = gamma2.
            auto neg = [&](double g) {
                return -(mutual_info(x, s.beta0_sq * g) - 0.5 * std::log1p(s.beta1_sq * g));
            };
            const auto r = boost::math::tools::brent_find_minima(neg, 0.0, top, 40);
            gamma1 = gamma2 = r.first;
            out.boundary = true;
        }
        out.gamma1 = gamma1;
        out.gamma2 = gamma2;
        out.value = ie_bound(s, x, gamma1, gamma2);
    }
    // Guard against a non-global stationary point.
    const auto gb = separable_grid(s, x, 96);
    if (gb.value > out.value + 1e-12) {
        out.gamma1 = gb.g1;
        out.gamma2 = gb.g2;
        out.value = gb.value;
        out.grid_fallback = true;
    }
    return out;
}

BoundReport evaluate_bounds(const ChannelResponse& channel, const InputDistribution& x, double rho,
                            const BoundOptions& options)
{
    BoundReport r;
    r.rho = rho;
    r.entropy = x.entropy();
    const auto sp = spectral_summary(channel, rho, options.dfe.spectral);
    r.gaussian_rate = sp.gaussian_rate;
    r.i_sow = mutual_info(x, sp.snr_zf_dfe);
    r.i_sl = mutual_info(x, sp.snr_dfe_excess);
    const auto cf = closed_form_summary(sp);
    r.ie_simple = ie_simple(cf, x);
    r.ie_opt = ie_opt(cf, x);
    r.ie_conj = ie_conj(cf, x);

    if (options.compute_mmse) {
        const auto design = design_mmse_dfe(channel, x, rho, options.dfe);
        r.summary = summarize(design, x);
        r.residual_taps = design.residual.size();
        r.gap_series = slc_gap_series(r.summary, x);
        bool done = false;
        if (!options.force_mc) {
            try {
                const auto ex = i_mmse_exact(design, x, options.mixture);
                r.i_mmse = ex.value;
                r.i_mmse_error = ex.error_bound;
                r.i_mmse_method = "exact";
                done = true;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::BudgetExceeded)
                    throw;
            }
        }
        if (!done) {
            const auto mc = i_mmse_mc(design, x, options.mc_samples, options.seed, options.mc);
            r.i_mmse = mc.value;
            r.i_mmse_error = mc.std_error;
            r.i_mmse_method = "mc";
        }
    } else {
        r.summary = cf;
    }
    return r;
}

} // namespace isirate
