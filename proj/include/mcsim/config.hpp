#pragma once

#include "mcsim/sim.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcsim::config {

/// Raised for unknown keys, bad values and unreadable files. The message
/// names the origin (file:line or --set) and the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw `key = value` pairs with the place each one came from. Later
/// assignments replace earlier ones.
class Settings {
public:
    struct Value {
        std::string text;
        std::string origin;
    };

    /// Throws ConfigError for a missing file, a malformed line or an unknown key.
    static Settings from_file(const std::filesystem::path& path);

    /// `KEY=VALUE` as given to --set.
    void apply_override(std::string_view assignment);
    void set(std::string key, std::string text, std::string origin);

    const std::map<std::string, Value>& values() const { return values_; }

private:
    std::map<std::string, Value> values_;
};

/// True for every key load_config understands (including ue<i>_pos).
bool is_known_key(std::string_view key);

/// Turns settings into a validated ScenarioConfig; absent keys keep defaults.
sim::ScenarioConfig build(const Settings& settings);

/// Reads `path`, applies `overrides` (KEY=VALUE) on top, then builds.
sim::ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Parses `x,y,h`.
channel::Position parse_position(std::string_view text);

}  // namespace mcsim::config
