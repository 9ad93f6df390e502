#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isirate/channel.hpp"
#include "isirate/scalar.hpp"

namespace isirate::cli {

/// Bad user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// channel_b, jeong, jeong_spaced, two_tap(q), flat.
std::optional<std::vector<double>> channel_preset(const std::string& name);

/// Preset name, JSON array literal, or path to a JSON file holding an array.
ChannelResponse parse_channel(const std::string& spec, bool normalize = false);
ChannelResponse channel_from_json(const nlohmann::json& j, bool normalize = false);

/// bpsk, skewed_binary(p), trinary(p), a JSON object {atoms, probs}, or a file.
InputDistribution parse_input(const std::string& spec);
InputDistribution input_from_json(const nlohmann::json& j);

/// "a:b:step" (inclusive of b), a comma list, or a single value. Strictly increasing.
std::vector<double> parse_snr_grid(const std::string& spec);
std::vector<double> snr_grid_from_json(const nlohmann::json& j);

struct ExperimentConfig {
    std::string channel = "channel_b";
    bool normalize = false;
    std::string input = "bpsk";
    std::vector<double> snr_db;
    std::size_t half_len = 0;
    std::size_t n_symbols = 10'000'000;
    std::size_t n_seeds = 10;
    std::size_t mc_samples = 200'000;
    std::uint64_t seed = 1;
    double k_prime = 1.0;
    std::size_t max_len = 0;
    std::string output;
};

/// Reads the keys of ExperimentConfig from a JSON object; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

nlohmann::json read_json_file(const std::string& path);

} // namespace isirate::cli
