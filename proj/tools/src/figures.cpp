#include "isirate_cli/figures.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "isirate/bounds.hpp"
#include "isirate/error.hpp"
#include "isirate/parallel.hpp"
#include "isirate/rate_sim.hpp"
#include "isirate/units.hpp"
#include "isirate_cli/config.hpp"

namespace isirate::cli {

namespace {

using Row = std::vector<double>;

nlohmann::json describe_input(const InputDistribution& x)
{
    return {{"label", x.label()}, {"atoms", x.atoms()}, {"probs", x.probs()}};
}

// Evaluates every grid point, keeping grid order and naming the failing point.
template <class Fn>
std::vector<Row> sweep(const std::vector<double>& grid, Fn&& point)
{
    std::vector<Row> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        try {
            rows[k] = point(grid[k]);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << e.what() << " (at snr_db=" << grid[k] << ")";
            throw Error(e.code(), msg.str());
        }
    });
    return rows;
}

FigureResult low_snr_gap(const std::string& name, const InputDistribution& x, const FigureOptions& opt)
{
    const ChannelResponse channel(*channel_preset("channel_b"));
    const auto grid = opt.snr_db.value_or(parse_snr_grid("-26:-14:1"));
    const DfeOptions dfe{};
    const MixtureOptions mix{};
    FigureResult r;
    r.name = name;
    r.table.columns = {"snr_db", "gap_exact", "gap_series", "eps0", "gap_error_bound", "residual_taps"};
    r.table.rows = sweep(grid, [&](double db) {
        const auto design = design_mmse_dfe(channel, x, db_to_linear(db), dfe);
        const auto summary = summarize(design, x);
        const auto gap = slc_gap_exact(design, x, mix);
        return Row{db,
                   nats_to_bits(gap.gap),
                   nats_to_bits(slc_gap_series(summary, x)),
                   summary.eps0,
                   nats_to_bits(gap.error_bound),
                   static_cast<double>(design.residual.size())};
    });
    r.manifest = {{"channel", channel.taps()},
                  {"input", describe_input(x)},
                  {"tolerances",
                   {{"truncation", dfe.truncation},
                    {"snr_tol", dfe.snr_tol},
                    {"prune_mass", mix.prune_mass},
                    {"quadrature_rel_tol", mix.rel_tol}}}};
    return r;
}

FigureResult medium_snr(const std::string& name, const InputDistribution& x, const FigureOptions& opt)
{
    const ChannelResponse channel(*channel_preset("channel_b"));
    const auto grid = opt.snr_db.value_or(parse_snr_grid("-17:-7:2"));
    const std::size_t n = opt.n_symbols.value_or(opt.full ? 500'000'000 : 10'000'000);
    const std::size_t seeds = opt.n_seeds.value_or(opt.full ? 20 : 10);
    BoundOptions bo;
    bo.mc_samples = opt.mc_samples.value_or(opt.full ? 20'000'000 : 1'000'000);
    bo.mixture.budget = std::size_t{1} << 16;
    bo.seed = opt.seed;
    bo.mc.threads = 1;
    SimOptions so;
    so.threads = 1;
    FigureResult r;
    r.name = name;
    r.table.columns = {"snr_db", "i_mmse", "i_mmse_error", "i_mmse_exact", "i_sl", "rate", "rate_se",
                       "rate_min", "rate_max", "rate_minus_i_sl"};
    r.table.rows = sweep(grid, [&](double db) {
        const double rho = db_to_linear(db);
        const auto rep = evaluate_bounds(channel, x, rho, bo);
        const auto est = estimate_rate(channel, x, rho, n, seeds, opt.seed, so);
        double lo = est.per_seed.front(), hi = lo;
        for (double v : est.per_seed) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return Row{db,
                   nats_to_bits(*rep.i_mmse),
                   nats_to_bits(rep.i_mmse_error),
                   rep.i_mmse_method == "exact" ? 1.0 : 0.0,
                   nats_to_bits(rep.i_sl),
                   nats_to_bits(est.value),
                   nats_to_bits(est.std_error),
                   nats_to_bits(lo),
                   nats_to_bits(hi),
                   nats_to_bits(est.value - rep.i_sl)};
    });
    std::vector<std::uint64_t> seed_list;
    for (std::size_t i = 0; i < seeds; ++i)
        seed_list.push_back(opt.seed + i);
    r.manifest = {{"channel", channel.taps()},
                  {"input", describe_input(x)},
                  {"profile", opt.full ? "full" : "desk"},
                  {"n_symbols", n},
                  {"seeds", seed_list},
                  {"mc_samples", bo.mc_samples},
                  {"mc_seed", bo.seed},
                  {"tolerances",
                   {{"truncation", bo.dfe.truncation},
                    {"snr_tol", bo.dfe.snr_tol},
                    {"prune_mass", bo.mixture.prune_mass},
                    {"mixture_budget", bo.mixture.budget}}}};
    return r;
}

FigureResult bound_comparison(const std::string& name, const std::string& preset, const FigureOptions& opt)
{
    const ChannelResponse channel(*channel_preset(preset));
    const auto x = make_bpsk();
    const auto grid = opt.snr_db.value_or(parse_snr_grid("-10:12.5:2.5"));
    BoundOptions bo;
    bo.force_mc = true;
    bo.mc_samples = opt.mc_samples.value_or(opt.full ? 10'000'000 : 200'000);
    bo.seed = opt.seed;
    bo.mc.threads = 1;
    FigureResult r;
    r.name = name;
    r.table.columns = {"snr_db", "i_mmse_mc", "i_mmse_mc_se", "i_sl", "i_sow", "ie_opt", "ie_simple", "ie_conj",
                       "gaussian_rate"};
    r.table.rows = sweep(grid, [&](double db) {
        const auto rep = evaluate_bounds(channel, x, db_to_linear(db), bo);
        return Row{db,
                   nats_to_bits(*rep.i_mmse),
                   nats_to_bits(rep.i_mmse_error),
                   nats_to_bits(rep.i_sl),
                   nats_to_bits(rep.i_sow),
                   nats_to_bits(rep.ie_opt.value),
                   nats_to_bits(rep.ie_simple),
                   nats_to_bits(rep.ie_conj),
                   nats_to_bits(rep.gaussian_rate)};
    });
    r.manifest = {{"channel", channel.taps()},
                  {"input", describe_input(x)},
                  {"profile", opt.full ? "full" : "desk"},
                  {"mc_samples", bo.mc_samples},
                  {"mc_seed", bo.seed},
                  {"notes", "ie_conj is a conjectured bound"},
                  {"tolerances", {{"truncation", bo.dfe.truncation}, {"snr_tol", bo.dfe.snr_tol}}}};
    return r;
}

} // namespace

void write_csv(std::ostream& out, const Table& table)
{
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << '\n';
    out << std::setprecision(17);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << '\n';
    }
}

const std::vector<std::string>& figure_names()
{
    static const std::vector<std::string> names{"fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4"};
    return names;
}

FigureResult run_figure(const std::string& name, const FigureOptions& options)
{
    FigureResult r;
    if (name == "fig1a")
        r = low_snr_gap(name, make_trinary(0.01), options);
    else if (name == "fig1b")
        r = low_snr_gap(name, make_skewed_binary(0.002), options);
    else if (name == "fig2a")
        r = medium_snr(name, make_trinary(0.01), options);
    else if (name == "fig2b")
        r = medium_snr(name, make_skewed_binary(0.002), options);
    else if (name == "fig3")
        r = bound_comparison(name, "jeong", options);
    else if (name == "fig4")
        r = bound_comparison(name, "jeong_spaced", options);
    else
        throw ConfigError("unknown figure '" + name + "'");
    r.manifest["figure"] = name;
    r.manifest["columns"] = r.table.columns;
    r.manifest["units"] = "rates in bits per symbol";
    std::vector<double> grid;
    for (const auto& row : r.table.rows)
        grid.push_back(row.front());
    r.manifest["snr_db"] = grid;
    return r;
}

void write_figure(const FigureResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / (result.name + ".csv"));
    write_csv(csv, result.table);
    std::ofstream man(dir / (result.name + ".json"));
    man << result.manifest.dump(2) << '\n';
    if (!csv || !man)
        throw ConfigError("cannot write figure files under " + dir.string());
}

} // namespace isirate::cli
