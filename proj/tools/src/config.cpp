// SPDX-License-Identifier: Apache-2.0
#include <mango_cli/config.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <variant>

namespace mango::cli
{

namespace
{

    static_assert(std::is_same_v<std::size_t, std::uint64_t>, "seed shares the unsigned integer field kind");
    using Member = std::variant<std::string Settings::*, std::size_t Settings::*, double Settings::*>;

    struct Field
    {
        std::string_view key;
        Member member;
    };

    const std::array<Field, 21> kFields { {
        { "query", &Settings::query },
        { "root_url", &Settings::root_url },
        { "budget", &Settings::budget },
        { "iterations", &Settings::iterations },
        { "kappa", &Settings::kappa },
        { "crawl_limit", &Settings::crawl_limit },
        { "top_k_crawl", &Settings::top_k_crawl },
        { "top_k_search", &Settings::top_k_search },
        { "seed", &Settings::seed },
        { "agent", &Settings::agent },
        { "reflector", &Settings::reflector },
        { "search", &Settings::search },
        { "output_dir", &Settings::output_dir },
        { "site", &Settings::site },
        { "policy", &Settings::policy },
        { "horizon", &Settings::horizon },
        { "log_level", &Settings::log_level },
        { "llm_base_url", &Settings::llm_base_url },
        { "llm_model", &Settings::llm_model },
        { "llm_api_key_env", &Settings::llm_api_key_env },
        { "search_endpoint", &Settings::search_endpoint },
    } };

    const Field& fieldFor(const std::string& key, Layer layer)
    {
        auto const it = std::ranges::find(kFields, std::string_view(key), &Field::key);
        if (it == kFields.end())
            throw ConfigError(key, layer, "unknown key");
        return *it;
    }

    template <typename Integer>
    Integer parseInteger(const std::string& key, Layer layer, std::string_view text)
    {
        Integer value {};
        auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc {} || end != text.data() + text.size())
            throw ConfigError(key, layer, "expected a non-negative integer, got '" + std::string(text) + "'");
        return value;
    }

    double parseReal(const std::string& key, Layer layer, const std::string& text)
    {
        std::size_t used = 0;
        double value = 0.0;
        try
        {
            value = std::stod(text, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used != text.size() || text.empty())
            throw ConfigError(key, layer, "expected a number, got '" + text + "'");
        return value;
    }

    void requireOneOf(const Settings& s, const std::string& key, const std::string& value, std::initializer_list<std::string_view> allowed)
    {
        if (std::ranges::find(allowed, std::string_view(value)) != allowed.end())
            return;
        std::string list;
        for (auto a: allowed)
            list += (list.empty() ? "" : ", ") + std::string(a);
        throw ConfigError(key, s.origin.at(key), "'" + value + "' is not one of " + list);
    }

} // namespace

std::string_view to_string(Layer layer)
{
    switch (layer)
    {
        case Layer::Defaults: return "defaults";
        case Layer::File: return "config file";
        case Layer::Flags: return "command line";
        case Layer::Environment: return "environment";
    }
    return "defaults";
}

ConfigError::ConfigError(std::string key, Layer layer, const std::string& problem)
    : Error("config error in " + std::string(to_string(layer)) + ": key '" + key + "': " + problem), _key(std::move(key)), _layer(layer)
{
}

nlohmann::json Settings::to_json() const
{
    auto out = nlohmann::json::object();
    for (auto const& [key, member]: kFields)
        std::visit([&](auto ptr) { out[std::string(key)] = this->*ptr; }, member);
    return out;
}

bool Settings::set_explicitly(const std::string& key) const
{
    auto const it = origin.find(key);
    return it != origin.end() && it->second != Layer::Defaults;
}

void apply_layer(Settings& settings, const nlohmann::json& values, Layer layer)
{
    if (!values.is_object())
        throw ConfigError("<root>", layer, "expected a JSON object");
    for (auto const& [key, value]: values.items())
    {
        auto const& field = fieldFor(key, layer);
        std::visit(
            [&](auto ptr) {
                using T = std::remove_reference_t<decltype(settings.*ptr)>;
                if constexpr (std::is_same_v<T, std::string>)
                {
                    if (!value.is_string())
                        throw ConfigError(key, layer, "expected a string");
                    settings.*ptr = value.get<std::string>();
                }
                else if constexpr (std::is_same_v<T, double>)
                {
                    if (!value.is_number())
                        throw ConfigError(key, layer, "expected a number");
                    settings.*ptr = value.get<double>();
                }
                else
                {
                    if (!value.is_number_unsigned())
                        throw ConfigError(key, layer, "expected a non-negative integer");
                    settings.*ptr = value.get<T>();
                }
            },
            field.member);
        settings.origin[key] = layer;
    }
}

void apply_strings(Settings& settings, const std::map<std::string, std::string>& values, Layer layer)
{
    for (auto const& [key, text]: values)
    {
        auto const& field = fieldFor(key, layer);
        std::visit(
            [&](auto ptr) {
                using T = std::remove_reference_t<decltype(settings.*ptr)>;
                if constexpr (std::is_same_v<T, std::string>)
                    settings.*ptr = text;
                else if constexpr (std::is_same_v<T, double>)
                    settings.*ptr = parseReal(key, layer, text);
                else
                    settings.*ptr = parseInteger<T>(key, layer, text);
            },
            field.member);
        settings.origin[key] = layer;
    }
}

nlohmann::json read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", Layer::Flags, "cannot open " + path.string());
    auto const j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config", Layer::File, path.string() + " is not valid JSON");
    if (!j.is_object())
        throw ConfigError("<root>", Layer::File, "expected a JSON object");
    return j;
}

void validate(const Settings& s)
{
    auto const positive = [&](const char* key, std::size_t value) {
        if (value < 1)
            throw ConfigError(key, s.origin.at(key), "must be at least 1");
    };
    positive("budget", s.budget);
    positive("iterations", s.iterations);
    positive("crawl_limit", s.crawl_limit);
    positive("top_k_crawl", s.top_k_crawl);
    positive("top_k_search", s.top_k_search);
    if (!(s.kappa >= 0.0))
        throw ConfigError("kappa", s.origin.at("kappa"), "must be non-negative");
    requireOneOf(s, "agent", s.agent, { "scripted", "live" });
    requireOneOf(s, "reflector", s.reflector, { "scripted", "live" });
    requireOneOf(s, "search", s.search, { "none", "scripted", "live" });
    requireOneOf(s, "policy", s.policy, { "mango", "random", "google_only", "greedy", "no_memory" });
    requireOneOf(s, "log_level", s.log_level, { "quiet", "info", "debug" });
    if (s.output_dir.empty())
        throw ConfigError("output_dir", s.origin.at("output_dir"), "must not be empty");
}

Settings default_settings()
{
    Settings settings;
    for (auto const& field: kFields)
        settings.origin[std::string(field.key)] = Layer::Defaults;
    return settings;
}

Settings resolve_settings(const std::filesystem::path* configFile, const std::map<std::string, std::string>& flags, const char* outputEnv)
{
    auto settings = default_settings();
    if (configFile != nullptr)
        apply_layer(settings, read_config_file(*configFile), Layer::File);
    apply_strings(settings, flags, Layer::Flags);
    if (outputEnv != nullptr && *outputEnv != '\0')
        apply_strings(settings, { { "output_dir", outputEnv } }, Layer::Environment);
    validate(settings);
    return settings;
}

} // namespace mango::cli
