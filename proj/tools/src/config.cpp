#include "isirate_cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "isirate/error.hpp"

namespace isirate::cli {

namespace {

double parse_number(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
        ++used;
    if (used != s.size() || !std::isfinite(v))
        throw ConfigError("not a number: '" + s + "'");
    return v;
}

// name(p) -> p
std::optional<double> call_argument(const std::string& spec, const std::string& name)
{
    const std::regex re(name + R"(\(\s*([^)]+?)\s*\))");
    std::smatch m;
    if (!std::regex_match(spec, m, re))
        return std::nullopt;
    return parse_number(m[1].str());
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + what + ": " + e.what());
    }
}

} // namespace

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

std::optional<std::vector<double>> channel_preset(const std::string& name)
{
    if (name == "channel_b")
        return std::vector<double>{0.408, 0.817, 0.408};
    if (name == "jeong")
        return std::vector<double>{0.19, 0.35, 0.46, 0.5, 0.46, 0.35, 0.19};
    if (name == "jeong_spaced")
        return std::vector<double>{0.19, 0.35, 0.46, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.46, 0.35, 0.19};
    if (name == "flat")
        return std::vector<double>{1.0};
    if (auto q = call_argument(name, "two_tap")) {
        if (!(*q > 0.0 && *q < 1.0))
            throw ConfigError("two_tap(q) needs 0 < q < 1");
        return std::vector<double>{std::sqrt(1.0 - *q * *q), *q};
    }
    return std::nullopt;
}

ChannelResponse channel_from_json(const nlohmann::json& j, bool normalize)
{
    if (j.is_string())
        return parse_channel(j.get<std::string>(), normalize);
    if (!j.is_array())
        throw ConfigError("channel must be a preset name or an array of taps");
    std::vector<double> taps;
    for (const auto& v : j) {
        if (!v.is_number())
            throw ConfigError("channel taps must be numbers");
        taps.push_back(v.get<double>());
    }
    try {
        ChannelResponse c(std::move(taps));
        return normalize ? c.normalized() : c;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

ChannelResponse parse_channel(const std::string& spec, bool normalize)
{
    if (auto taps = channel_preset(spec))
        return channel_from_json(nlohmann::json(*taps), normalize);
    if (!spec.empty() && spec.front() == '[')
        return channel_from_json(parse_json_text(spec, "channel"), normalize);
    if (std::filesystem::exists(spec))
        return channel_from_json(read_json_file(spec), normalize);
    throw ConfigError("unknown channel '" + spec + "'");
}

InputDistribution input_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return parse_input(j.get<std::string>());
    if (!j.is_object() || !j.contains("atoms") || !j.contains("probs"))
        throw ConfigError("input must be a preset or an object {atoms, probs}");
    try {
        return InputDistribution(j.at("atoms").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>(),
                                 j.value("label", std::string{"custom"}));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad input distribution: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

InputDistribution parse_input(const std::string& spec)
{
    try {
        if (spec == "bpsk")
            return make_bpsk();
        if (auto p = call_argument(spec, "skewed_binary"))
            return make_skewed_binary(*p);
        if (auto p = call_argument(spec, "trinary"))
            return make_trinary(*p);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!spec.empty() && spec.front() == '{')
        return input_from_json(parse_json_text(spec, "input"));
    if (std::filesystem::exists(spec))
        return input_from_json(read_json_file(spec));
    throw ConfigError("unknown input '" + spec + "'");
}

std::vector<double> parse_snr_grid(const std::string& spec)
{
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(parse_number(item));
        if (parts.size() != 3 || !(parts[2] > 0.0))
            throw ConfigError("SNR range must be a:b:step with step > 0");
        const double span = (parts[1] - parts[0]) / parts[2];
        if (span < -1e-9)
            throw ConfigError("SNR range end lies below its start");
        const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        for (std::size_t k = 0; k < count; ++k)
            grid.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    } else {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ','))
            grid.push_back(parse_number(item));
    }
    if (grid.empty())
        throw ConfigError("empty SNR grid");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw ConfigError("SNR grid must be strictly increasing");
    return grid;
}

std::vector<double> snr_grid_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return parse_snr_grid(j.get<std::string>());
    if (j.is_number())
        return {j.get<double>()};
    if (!j.is_array())
        throw ConfigError("snr_db must be a string, a number or an array");
    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number())
            throw ConfigError("snr_db entries must be numbers");
        ss << (k ? "," : "") << j[k].get<double>();
    }
    return parse_snr_grid(ss.str());
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"channel", "normalize", "input", "snr_db", "half_len", "n_symbols",
                                             "n_seeds", "mc_samples", "seed", "k_prime", "max_len", "output"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError("unknown config key '" + key + "'");
    try {
        if (j.contains("channel")) {
            const auto& ch = j["channel"];
            c.channel = ch.is_string() ? ch.get<std::string>() : ch.dump();
        }
        if (j.contains("input")) {
            const auto& in = j["input"];
            c.input = in.is_string() ? in.get<std::string>() : in.dump();
        }
        if (j.contains("snr_db"))
            c.snr_db = snr_grid_from_json(j["snr_db"]);
        c.normalize = j.value("normalize", c.normalize);
        c.half_len = j.value("half_len", c.half_len);
        c.n_symbols = j.value("n_symbols", c.n_symbols);
        c.n_seeds = j.value("n_seeds", c.n_seeds);
        c.mc_samples = j.value("mc_samples", c.mc_samples);
        c.seed = j.value("seed", c.seed);
        c.k_prime = j.value("k_prime", c.k_prime);
        c.max_len = j.value("max_len", c.max_len);
        c.output = j.value("output", c.output);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    return config_from_json(read_json_file(path), std::move(base));
}

} // namespace isirate::cli
