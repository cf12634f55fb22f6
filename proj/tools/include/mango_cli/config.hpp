// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/errors.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mango::cli
{

enum class Layer
{
    Defaults,
    File,
    Flags,
    Environment,
};

std::string_view to_string(Layer layer);

/// A rejected configuration value, tagged with its key and the layer it came from.
class ConfigError: public Error
{
  public:
    ConfigError(std::string key, Layer layer, const std::string& problem);

    [[nodiscard]] const std::string& key() const noexcept { return _key; }
    [[nodiscard]] Layer layer() const noexcept { return _layer; }

  private:
    std::string _key;
    Layer _layer;
};

/// Effective settings of one invocation. JSON keys are the member names.
struct Settings
{
    std::string query;
    std::string root_url;
    std::size_t budget = 10;
    std::size_t iterations = 10;
    double kappa = 3.0;
    std::size_t crawl_limit = 1000;
    std::size_t top_k_crawl = 10;
    std::size_t top_k_search = 10;
    std::uint64_t seed = 0;
    std::string agent = "scripted";
    std::string reflector = "scripted";
    std::string search = "scripted";
    std::string output_dir = "mango-run";
    std::string site;
    std::string policy = "mango";
    std::size_t horizon = 0;
    std::string log_level = "info";
    std::string llm_base_url = "https://api.openai.com/v1";
    std::string llm_model = "gpt-4o";
    std::string llm_api_key_env = "OPENAI_API_KEY";
    std::string search_endpoint;

    /// Layer that supplied each key's current value.
    std::map<std::string, Layer> origin;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] bool set_explicitly(const std::string& key) const;
};

/// Built-in defaults with every key's origin set to Layer::Defaults.
Settings default_settings();

/// Applies one layer. Unknown keys and ill-typed values raise ConfigError.
void apply_layer(Settings& settings, const nlohmann::json& values, Layer layer);

/// Applies string-valued overrides (from flags or the environment), converting per key type.
void apply_strings(Settings& settings, const std::map<std::string, std::string>& values, Layer layer);

/// Reads a JSON config file; the top level must be an object.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Range and vocabulary checks; the error names the key and the layer that set it.
void validate(const Settings& settings);

/// Defaults, then file, then flags, then MANGO_NAV_OUTPUT.
Settings resolve_settings(const std::filesystem::path* configFile,
                          const std::map<std::string, std::string>& flags,
                          const char* outputEnv);

} // namespace mango::cli
