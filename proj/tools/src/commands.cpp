#include "isirate_cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>

#include "isirate/bounds.hpp"
#include "isirate/error.hpp"
#include "isirate/highsnr.hpp"
#include "isirate/rate_sim.hpp"
#include "isirate/units.hpp"
#include "isirate_cli/config.hpp"
#include "isirate_cli/figures.hpp"

namespace isirate::cli {

namespace {

using nlohmann::json;

// Flags shared by the analysis subcommands. Values given on the command line
// override those read from --config.
struct Common {
    std::string config_path;
    ExperimentConfig flags;
    std::string snr_spec;
    std::vector<CLI::Option*> given;
    CLI::Option* channel = nullptr;
    CLI::Option* normalize = nullptr;
    CLI::Option* input = nullptr;
    CLI::Option* snr = nullptr;
    CLI::Option* half_len = nullptr;
    CLI::Option* n_symbols = nullptr;
    CLI::Option* n_seeds = nullptr;
    CLI::Option* mc_samples = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* k_prime = nullptr;
    CLI::Option* max_len = nullptr;
    CLI::Option* output = nullptr;

    void add_base(CLI::App* app)
    {
        app->add_option("--config", config_path, "JSON config file");
        channel = app->add_option("--channel", flags.channel, "preset, JSON tap array, or file");
        normalize = app->add_flag("--normalize", flags.normalize, "rescale the channel to unit energy");
        input = app->add_option("--input", flags.input, "bpsk, skewed_binary(p), trinary(p), JSON, or file");
    }
    void add_snr(CLI::App* app, const std::string& help)
    {
        snr = app->add_option("--snr-db", snr_spec, help);
    }

    ExperimentConfig resolve() const
    {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        auto set = [](CLI::Option* o) { return o && o->count() > 0; };
        if (set(channel))
            c.channel = flags.channel;
        if (set(normalize))
            c.normalize = flags.normalize;
        if (set(input))
            c.input = flags.input;
        if (set(snr))
            c.snr_db = parse_snr_grid(snr_spec);
        if (set(half_len))
            c.half_len = flags.half_len;
        if (set(n_symbols))
            c.n_symbols = flags.n_symbols;
        if (set(n_seeds))
            c.n_seeds = flags.n_seeds;
        if (set(mc_samples))
            c.mc_samples = flags.mc_samples;
        if (set(seed))
            c.seed = flags.seed;
        if (set(k_prime))
            c.k_prime = flags.k_prime;
        if (set(max_len))
            c.max_len = flags.max_len;
        if (set(output))
            c.output = flags.output;
        return c;
    }
};

double single_snr(const ExperimentConfig& c)
{
    if (c.snr_db.size() != 1)
        throw ConfigError("--snr-db must be a single value here");
    return c.snr_db.front();
}

void require_grid(const ExperimentConfig& c)
{
    if (c.snr_db.empty())
        throw ConfigError("--snr-db is required");
}

json spectral_json(const SpectralSummary& s)
{
    return {{"rho", s.rho},
            {"snr_le", s.snr_le},
            {"snr_dfe", s.snr_dfe},
            {"snr_zf_dfe", s.snr_zf_dfe},
            {"g_zf_dfe", s.g_zf_dfe},
            {"g_zf_le", s.g_zf_le},
            {"gaussian_rate_bits", nats_to_bits(s.gaussian_rate)},
            {"spectral_null", s.spectral_null}};
}

json summary_json(const DfeSummary& s)
{
    json j{{"beta0_sq", s.beta0_sq}, {"beta1_sq", s.beta1_sq}, {"eps0", s.eps0}, {"eps1", s.eps1}, {"S", s.S}};
    j["gamma1_cu"] = s.gamma1_cu ? json(*s.gamma1_cu) : json(nullptr);
    j["delta1_4"] = s.delta1_4 ? json(*s.delta1_4) : json(nullptr);
    return j;
}

json search_json(const ErrorEventSearch& s)
{
    json j{{"delta_min_sq", s.delta_min_sq},
           {"witness", s.witness},
           {"error_alphabet", s.error_alphabet},
           {"explored", s.explored},
           {"max_len", s.max_len},
           {"certified_global", s.certified_global}};
    j["global_minimum"] = s.global_minimum ? json(*s.global_minimum) : json(nullptr);
    return j;
}

int cmd_analyze(const ExperimentConfig& c, std::ostream& out)
{
    require_grid(c);
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    json j{{"channel", ch.taps()},
           {"energy", ch.energy()},
           {"g_zf_dfe", zf_dfe_gain(ch)},
           {"input",
            {{"label", x.label()},
             {"entropy_bits", nats_to_bits(x.entropy())},
             {"power", x.power()},
             {"skewness", x.skewness()},
             {"excess_kurtosis", x.excess_kurtosis()},
             {"d_min", x.d_min()},
             {"normalized_d_min", x.normalized_d_min()}}}};
    json rows = json::array();
    for (double db : c.snr_db) {
        auto row = spectral_json(spectral_summary(ch, db_to_linear(db)));
        row["snr_db"] = db;
        rows.push_back(row);
    }
    j["points"] = rows;
    out << j.dump(2) << '\n';
    return kOk;
}

int cmd_dfe(const ExperimentConfig& c, const std::string& taps_path, std::ostream& out)
{
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    const double db = single_snr(c);
    DfeOptions opt;
    opt.half_len = c.half_len;
    const auto d = design_mmse_dfe(ch, x, db_to_linear(db), opt);
    json j = summary_json(summarize(d, x));
    j["snr_db"] = db;
    j["half_len"] = d.half_len;
    j["residual_taps"] = d.residual.size();
    j["unbiased_snr"] = d.unbiased_snr;
    j["target_snr"] = d.target_snr;
    j["noise_var"] = d.noise_var;
    j["closed_form"] = summary_json(closed_form_summary(ch, db_to_linear(db)));
    out << j.dump(2) << '\n';
    if (!taps_path.empty()) {
        Table t{{"k", "alpha"}, {}};
        t.rows.push_back({0.0, 1.0});
        for (std::size_t k = 0; k < d.residual.size(); ++k)
            t.rows.push_back({static_cast<double>(k + 1), d.residual[k]});
        std::ofstream f(taps_path);
        write_csv(f, t);
        if (!f)
            throw ConfigError("cannot write " + taps_path);
    }
    return kOk;
}

int cmd_bounds(const ExperimentConfig& c, bool force_mc, bool no_mmse, std::ostream& out)
{
    require_grid(c);
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    BoundOptions bo;
    bo.dfe.half_len = c.half_len;
    bo.force_mc = force_mc;
    bo.compute_mmse = !no_mmse;
    bo.mc_samples = c.mc_samples;
    bo.seed = c.seed;
    std::ofstream file;
    if (!c.output.empty()) {
        file.open(c.output);
        if (!file)
            throw ConfigError("cannot write " + c.output);
    }
    std::ostream& o = c.output.empty() ? out : file;
    o << "snr_db,rho,entropy,gaussian_rate,i_sow,i_sl,ie_simple,ie_opt,ie_opt_gamma1,ie_opt_gamma2,"
         "ie_opt_grid_fallback,ie_conj,i_mmse,i_mmse_error,i_mmse_method,gap_series,beta0_sq,beta1_sq,"
         "eps0,eps1,S,residual_taps\n";
    o << std::setprecision(17);
    for (double db : c.snr_db) {
        BoundReport r;
        try {
            r = evaluate_bounds(ch, x, db_to_linear(db), bo);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (at snr_db=" + std::to_string(db) + ")");
        }
        auto b = [](double v) { return nats_to_bits(v); };
        o << db << ',' << r.rho << ',' << b(r.entropy) << ',' << b(r.gaussian_rate) << ',' << b(r.i_sow) << ','
          << b(r.i_sl) << ',' << b(r.ie_simple) << ',' << b(r.ie_opt.value) << ',' << r.ie_opt.gamma1 << ','
          << r.ie_opt.gamma2 << ',' << (r.ie_opt.grid_fallback ? 1 : 0) << ',' << b(r.ie_conj) << ',';
        if (r.i_mmse)
            o << b(*r.i_mmse);
        o << ',' << b(r.i_mmse_error) << ',' << r.i_mmse_method << ',' << b(r.gap_series) << ','
          << r.summary.beta0_sq << ',' << r.summary.beta1_sq << ',' << r.summary.eps0 << ',' << r.summary.eps1
          << ',' << r.summary.S << ',' << r.residual_taps << '\n';
    }
    return kOk;
}

int cmd_simulate(const ExperimentConfig& c, std::size_t renorm, bool plain, const std::string& per_seed,
                 std::ostream& out)
{
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    const double db = single_snr(c);
    SimOptions so;
    so.forward.renorm_interval = renorm;
    so.entropy_control = !plain;
    const auto est = estimate_rate(ch, x, db_to_linear(db), c.n_symbols, c.n_seeds, c.seed, so);
    json j{{"snr_db", db},
           {"value_bits", nats_to_bits(est.value)},
           {"stderr_bits", nats_to_bits(est.std_error)},
           {"seeds", est.seeds},
           {"n", est.n_symbols}};
    out << j.dump(2) << '\n';
    if (!per_seed.empty()) {
        Table t{{"seed", "rate"}, {}};
        for (std::size_t i = 0; i < est.per_seed.size(); ++i)
            t.rows.push_back({static_cast<double>(est.seeds[i]), nats_to_bits(est.per_seed[i])});
        std::ofstream f(per_seed);
        write_csv(f, t);
        if (!f)
            throw ConfigError("cannot write " + per_seed);
    }
    return kOk;
}

SearchOptions search_options(const ExperimentConfig& c)
{
    SearchOptions s;
    s.max_len = c.max_len;
    s.throw_if_inconclusive = false;
    return s;
}

int cmd_dmin(const ExperimentConfig& c, std::ostream& out)
{
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    const auto g = exponent_gap(ch, x, search_options(c));
    json j = search_json(g.search);
    j["g_zf_dfe"] = g.g_zf_dfe;
    j["strict"] = g.strict;
    out << j.dump(2) << '\n';
    return g.search.certified_global ? kOk : kNumericalError;
}

int cmd_probe(const ExperimentConfig& c, std::ostream& out, std::ostream& err)
{
    require_grid(c);
    const auto ch = parse_channel(c.channel, c.normalize);
    const auto x = parse_input(c.input);
    err << "note: K' = " << c.k_prime << " is an assumed constant; only the exponents are assumption-free\n";
    std::vector<double> rho;
    for (double db : c.snr_db)
        rho.push_back(db_to_linear(db));
    auto opts = search_options(c);
    opts.throw_if_inconclusive = true;
    const auto p = crossover_probe(ch, x, rho, c.k_prime, opts);
    json rows = json::array();
    for (std::size_t k = 0; k < p.rows.size(); ++k) {
        const auto& r = p.rows[k];
        rows.push_back({{"snr_db", c.snr_db[k]},
                        {"rho", r.rho},
                        {"log_upper", r.log_upper ? json(*r.log_upper) : json(nullptr)},
                        {"log_lower", r.log_lower ? json(*r.log_lower) : json(nullptr)},
                        {"certified", r.certified}});
    }
    json j{{"k_prime", c.k_prime}, {"delta_min_sq", p.delta_min_sq}, {"g_zf_dfe", p.g_zf_dfe}, {"rows", rows}};
    j["crossing_snr_db"] = p.crossing_rho ? json(linear_to_db(*p.crossing_rho)) : json(nullptr);
    if (!p.crossing_rho)
        err << "note: no crossing in grid\n";
    out << j.dump(2) << '\n';
    return kOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Achievable-rate bounds for ISI channels with finite-alphabet inputs", "isirate"};
    app.require_subcommand(1);

    Common an, df, bd, sm, dm, hp;
    auto* analyze = app.add_subcommand("analyze", "spectral SNRs and input statistics");
    an.add_base(analyze);
    an.add_snr(analyze, "SNR grid in dB");

    auto* dfe = app.add_subcommand("dfe", "unbiased MMSE-DFE design summary");
    df.add_base(dfe);
    df.add_snr(dfe, "SNR in dB");
    df.half_len = dfe->add_option("--half-len", df.flags.half_len, "feedforward half-length M (0 = auto)");
    std::string taps_path;
    dfe->add_option("--taps", taps_path, "write residual taps as CSV");

    auto* bounds = app.add_subcommand("bounds", "bound report over an SNR grid (CSV)");
    bd.add_base(bounds);
    bd.add_snr(bounds, "SNR grid a:b:step in dB");
    bd.half_len = bounds->add_option("--half-len", bd.flags.half_len, "feedforward half-length M (0 = auto)");
    bd.mc_samples = bounds->add_option("--mc-samples", bd.flags.mc_samples, "Monte-Carlo samples for I_MMSE");
    bd.seed = bounds->add_option("--seed", bd.flags.seed, "base seed");
    bd.output = bounds->add_option("--out", bd.flags.output, "CSV path (default stdout)");
    bool force_mc = false, no_mmse = false;
    bounds->add_flag("--force-mc", force_mc, "skip exact mixture enumeration");
    bounds->add_flag("--no-mmse", no_mmse, "skip I_MMSE");

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo achievable rate");
    sm.add_base(simulate);
    sm.add_snr(simulate, "SNR in dB");
    sm.n_symbols = simulate->add_option("-n,--n-symbols", sm.flags.n_symbols, "symbols per seed");
    sm.n_seeds = simulate->add_option("--seeds", sm.flags.n_seeds, "number of seeds");
    sm.seed = simulate->add_option("--seed", sm.flags.seed, "first seed");
    std::size_t renorm = 1;
    simulate->add_option("--renorm", renorm, "renormalisation interval")->check(CLI::PositiveNumber);
    bool plain = false;
    simulate->add_flag("--no-entropy-control", plain, "plain information-density estimator");
    std::string per_seed;
    simulate->add_option("--per-seed", per_seed, "write per-seed rates as CSV");

    auto* dmin = app.add_subcommand("dmin", "minimum error-event distance versus g_zf_dfe");
    dm.add_base(dmin);
    dm.max_len = dmin->add_option("--max-len", dm.flags.max_len, "longest event searched (0 = 4L)");

    auto* probe = app.add_subcommand("highsnr-probe", "compare the high-SNR gap bounds on a grid");
    hp.add_base(probe);
    hp.add_snr(probe, "SNR grid in dB");
    hp.k_prime = probe->add_option("--k-prime", hp.flags.k_prime, "error-event constant K' (default 1)");
    hp.max_len = probe->add_option("--max-len", hp.flags.max_len, "longest event searched (0 = 4L)");

    auto* figure = app.add_subcommand("figure", "regenerate figure data (CSV + JSON manifest)");
    std::string fig_name, fig_out = "figures", fig_snr;
    FigureOptions fo;
    std::size_t fig_n = 0, fig_seeds = 0, fig_mc = 0;
    figure->add_option("name", fig_name, "fig1a|fig1b|fig2a|fig2b|fig3|fig4")->required();
    figure->add_option("--out", fig_out, "output directory");
    figure->add_flag("--full", fo.full, "long Monte-Carlo profile");
    figure->add_option("--seed", fo.seed, "base seed");
    auto* fig_snr_opt = figure->add_option("--snr-db", fig_snr, "override the SNR grid");
    auto* fig_n_opt = figure->add_option("-n,--n-symbols", fig_n, "symbols per seed");
    auto* fig_seeds_opt = figure->add_option("--seeds", fig_seeds, "number of seeds");
    auto* fig_mc_opt = figure->add_option("--mc-samples", fig_mc, "Monte-Carlo samples for I_MMSE");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kConfigError;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(an.resolve(), out);
        if (dfe->parsed())
            return cmd_dfe(df.resolve(), taps_path, out);
        if (bounds->parsed())
            return cmd_bounds(bd.resolve(), force_mc, no_mmse, out);
        if (simulate->parsed())
            return cmd_simulate(sm.resolve(), renorm, plain, per_seed, out);
        if (dmin->parsed())
            return cmd_dmin(dm.resolve(), out);
        if (probe->parsed())
            return cmd_probe(hp.resolve(), out, err);
        if (figure->parsed()) {
            if (fig_snr_opt->count())
                fo.snr_db = parse_snr_grid(fig_snr);
            if (fig_n_opt->count())
                fo.n_symbols = fig_n;
            if (fig_seeds_opt->count())
                fo.n_seeds = fig_seeds;
            if (fig_mc_opt->count())
                fo.mc_samples = fig_mc;
            const auto start = std::chrono::steady_clock::now();
            const auto r = run_figure(fig_name, fo);
            write_figure(r, fig_out);
            const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
            err << fig_name << ": " << r.table.rows.size() << " points in " << took.count() << " s\n";
            out << (std::filesystem::path(fig_out) / (fig_name + ".csv")).string() << '\n';
            return kOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_numerical(e.code()) ? kNumericalError : kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    }
    return kConfigError;
}

} // namespace isirate::cli
