// SPDX-License-Identifier: Apache-2.0
#include <mango_cli/commands.hpp>

#include <mango/agent_types.hpp>
#include <mango/memory.hpp>
#include <mango/search_augment.hpp>
#include <mango/simharness.hpp>

#if MANGO_CLI_WITH_LIVE
#include <mango/live_adapters.hpp>
#endif

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace mango::cli
{

namespace fs = std::filesystem;

#if !MANGO_CLI_WITH_LIVE
namespace live
{
    class ChatClient
    {
    };
} // namespace live
#endif

AdapterBundle::AdapterBundle() = default;
AdapterBundle::AdapterBundle(AdapterBundle&&) noexcept = default;
AdapterBundle& AdapterBundle::operator=(AdapterBundle&&) noexcept = default;
AdapterBundle::~AdapterBundle() = default;

RunAdapters AdapterBundle::bindings() const
{
    return RunAdapters { fetcher.get(), search.get(), keyworder.get(), agent.get(), reflector.get(), env.get() };
}

namespace
{

    std::string readFile(const fs::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw PersistenceFailure("cannot read " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    std::vector<std::string> readLines(const fs::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw PersistenceFailure("cannot read " + path.string());
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);)
            lines.push_back(line);
        return lines;
    }

    void writeFile(const fs::path& path, std::string_view text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out)
            throw PersistenceFailure("cannot write " + path.string());
    }

    std::size_t horizonFor(const Settings& s)
    {
        return s.horizon == 0 ? s.budget : s.horizon;
    }

    [[noreturn]] void needsSite(const Settings& s, const std::string& key)
    {
        throw ConfigError(key, s.origin.at(key), "the scripted " + key + " needs a site fixture (--site)");
    }

#if MANGO_CLI_WITH_LIVE
    live::ChatClient& chatFor(const Settings& s, AdapterBundle& bundle)
    {
        if (!bundle.chat)
        {
            auto const* key = std::getenv(s.llm_api_key_env.c_str());
            if (key == nullptr || *key == '\0')
                throw ConfigError("llm_api_key_env", s.origin.at("llm_api_key_env"), "environment variable " + s.llm_api_key_env + " is not set");
            bundle.chat = std::make_unique<live::ChatClient>(live::ChatOptions { .base_url = s.llm_base_url, .api_key = key, .model = s.llm_model });
        }
        return *bundle.chat;
    }
#else
    [[noreturn]] void noLive(const Settings& s, const std::string& key)
    {
        throw ConfigError(key, s.origin.at(key), "this build has no live adapters");
    }
#endif

    int reportFailure(std::ostream& err, const std::exception& e, int code)
    {
        err << "mango-nav: " << e.what() << '\n';
        return code;
    }

    struct RunFiles
    {
        std::ofstream events;
        std::unique_ptr<MemoryStore> memory;
    };

} // namespace

AdapterBundle make_adapters(const Settings& s)
{
    AdapterBundle bundle;
    if (!s.site.empty())
    {
        try
        {
            bundle.site = std::make_unique<SiteGraph>(SiteGraph::from_file(s.site));
        }
        catch (const FixtureError& e)
        {
            throw ConfigError("site", s.origin.at("site"), e.what());
        }
    }
    auto const* site = bundle.site.get();

    if (site != nullptr)
    {
        bundle.fetcher = std::make_unique<SiteFetcher>(*site);
        bundle.env = std::make_unique<SimulatedBrowserEnv>(*site);
    }
    else
    {
#if MANGO_CLI_WITH_LIVE
        bundle.fetcher = std::make_unique<live::LiveFetcher>();
        bundle.env = std::make_unique<live::HttpBrowserEnv>();
#else
        needsSite(s, "site");
#endif
    }

    if (s.search == "scripted")
    {
        if (site == nullptr)
            needsSite(s, "search");
        bundle.search = std::make_unique<ScriptedSearchClient>(site->search_results);
    }
    else if (s.search == "live")
    {
#if MANGO_CLI_WITH_LIVE
        if (s.search_endpoint.empty())
            throw ConfigError("search_endpoint", s.origin.at("search_endpoint"), "required when search is live");
        bundle.search = std::make_unique<live::LiveSearchClient>(s.search_endpoint);
#else
        noLive(s, "search");
#endif
    }

    if (s.agent == "scripted")
    {
        if (site == nullptr || !site->golden_answer)
            needsSite(s, "agent");
        bundle.agent = std::make_unique<ScriptedAgent>(*site);
        bundle.keyworder = std::make_unique<FallbackKeywordAdapter>();
    }
    else
    {
#if MANGO_CLI_WITH_LIVE
        bundle.agent = std::make_unique<live::LlmAgent>(chatFor(s, bundle));
        bundle.keyworder = std::make_unique<live::LlmKeywordAdapter>(chatFor(s, bundle));
#else
        noLive(s, "agent");
#endif
    }

    if (s.reflector == "scripted")
    {
        if (site == nullptr || site->target_urls.empty() || !site->golden_answer)
            needsSite(s, "reflector");
        bundle.reflector = std::make_unique<ScriptedReflector>(*site, horizonFor(s));
    }
    else
    {
#if MANGO_CLI_WITH_LIVE
        bundle.reflector = std::make_unique<live::LlmReflector>(chatFor(s, bundle));
#else
        noLive(s, "reflector");
#endif
    }
    return bundle;
}

RunConfig make_run_config(const Settings& s, const AdapterBundle& adapters)
{
    auto const* site = adapters.site.get();
    auto queryText = s.query;
    if (queryText.empty() && site != nullptr && site->query)
        queryText = *site->query;
    if (queryText.empty())
        throw ConfigError("query", s.origin.at("query"), "a query is required");

    CanonicalUrl root;
    if (!s.root_url.empty())
    {
        try
        {
            root = CanonicalUrl::parse(s.root_url);
        }
        catch (const InvalidUrl& e)
        {
            throw ConfigError("root_url", s.origin.at("root_url"), e.what());
        }
    }
    else if (site != nullptr && site->root_url)
        root = *site->root_url;
    else
        throw ConfigError("root_url", s.origin.at("root_url"), "a root URL is required");

    RunConfig config(Query(queryText), root);
    config.max_iterations = s.iterations;
    config.navigation.budget = s.budget;
    config.crawl.max_pages = s.crawl_limit;
    config.ranking.top_k = s.top_k_crawl;
    config.bandit.kappa = s.kappa;
    config.bandit.rng_seed = s.seed;
    config.search_k = s.top_k_search;
    config.policy = policy_spec(policy_from_string(s.policy));
    config.adapters = adapters.bindings();
    return config;
}

std::optional<Divergence> first_divergence(const std::vector<std::string>& expected, const std::vector<std::string>& actual)
{
    auto const n = std::max(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        std::optional<std::string> e = i < expected.size() ? std::optional(expected[i]) : std::nullopt;
        std::optional<std::string> a = i < actual.size() ? std::optional(actual[i]) : std::nullopt;
        if (e != a)
            return Divergence { .line = i + 1, .expected = std::move(e), .actual = std::move(a) };
    }
    return std::nullopt;
}

int cmd_run(const Settings& settings, std::ostream& out, std::ostream& err)
{
    AdapterBundle adapters;
    std::optional<RunConfig> config;
    try
    {
        adapters = make_adapters(settings);
        config.emplace(make_run_config(settings, adapters));
        config->validate();
    }
    catch (const ConfigError& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    catch (const std::invalid_argument& e)
    {
        return reportFailure(err, e, kExitConfig);
    }

    fs::path const dir = settings.output_dir;
    std::ofstream events;
    std::unique_ptr<MemoryStore> memory;
    try
    {
        fs::create_directories(dir);
        events.open(dir / "events.jsonl", std::ios::binary | std::ios::trunc);
        if (!events)
            throw PersistenceFailure("cannot write " + (dir / "events.jsonl").string());
        memory = std::make_unique<MemoryStore>(MemoryStore::create(dir / "memory.jsonl"));
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitFatal);
    }

    auto runJson = nlohmann::json { { "config", settings.to_json() }, { "fixture", nullptr } };
    if (adapters.site)
    {
        auto const fixture = readFile(settings.site);
        writeFile(dir / "site.json", fixture);
        runJson["fixture"] = { { "file", "site.json" }, { "digest", content_digest(fixture) } };
    }

    bool const debug = settings.log_level == "debug";
    auto const observer = [&](const RunEvent& event) {
        auto const line = event_line(event);
        events << line << '\n';
        events.flush();
        if (debug)
            err << line << '\n';
    };

    RunResult result;
    int code = kExitOk;
    try
    {
        result = run(*config, *memory, observer);
    }
    catch (const RunFailure& e)
    {
        result = e.partial();
        runJson["error"] = e.what();
        err << "mango-nav: run failed: " << e.what() << '\n';
        code = kExitFatal;
    }

    std::string snapshots;
    for (auto const& snapshot: result.arm_snapshots)
        snapshots += snapshot.dump() + '\n';
    runJson["result"] = to_json(result);
    try
    {
        writeFile(dir / "bandit_snapshots.jsonl", snapshots);
        writeFile(dir / "run.json", runJson.dump(2) + '\n');
    }
    catch (const PersistenceFailure& e)
    {
        return reportFailure(err, e, kExitFatal);
    }

    if (settings.log_level != "quiet")
    {
        out << "status: " << to_string(result.status) << '\n';
        if (result.answer)
            out << "answer: " << *result.answer << '\n' << "source: " << result.source->str() << '\n';
        else if (result.best_partial)
            out << "best partial: " << *result.best_partial << '\n';
        out << "iterations: " << result.iterations_used << "  actions: " << result.total_actions << '\n';
        out << "run directory: " << dir.string() << '\n';
    }
    return code;
}

int cmd_replay(const fs::path& runDir, std::ostream& out, std::ostream& err)
{
    auto settings = default_settings();
    std::vector<std::string> recorded;
    nlohmann::json runJson;
    try
    {
        runJson = nlohmann::json::parse(readFile(runDir / "run.json"));
        recorded = readLines(runDir / "events.jsonl");
        apply_layer(settings, runJson.at("config"), Layer::File);
        validate(settings);
        if (settings.agent != "scripted" || settings.reflector != "scripted" || settings.search == "live")
            throw ConfigError("agent", Layer::File, "only runs with scripted adapters can be replayed");

        auto const& fixture = runJson.at("fixture");
        if (fixture.is_null())
            throw ConfigError("site", Layer::File, "the run has no site fixture to replay against");
        auto const fixturePath = runDir / fixture.at("file").get<std::string>();
        auto const digest = content_digest(readFile(fixturePath));
        if (digest != fixture.at("digest").get<std::string>())
        {
            err << "replay mismatch: fixture " << fixturePath.string() << " digest " << digest << " differs from recorded "
                << fixture.at("digest").get<std::string>() << '\n';
            return kExitReplayMismatch;
        }
        settings.site = fixturePath.string();
    }
    catch (const ConfigError& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitConfig);
    }

    std::vector<std::string> replayed;
    try
    {
        auto adapters = make_adapters(settings);
        auto config = make_run_config(settings, adapters);
        MemoryStore memory;
        try
        {
            run(config, memory, [&](const RunEvent& event) { replayed.push_back(event_line(event)); });
        }
        catch (const RunFailure&)
        {
        }
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitConfig);
    }

    if (auto const d = first_divergence(recorded, replayed))
    {
        err << "replay mismatch: first divergence at " << (runDir / "events.jsonl").string() << ':' << d->line << '\n';
        err << "  recorded: " << d->expected.value_or("<end of trace>") << '\n';
        err << "  replayed: " << d->actual.value_or("<end of trace>") << '\n';
        return kExitReplayMismatch;
    }
    out << "replay ok: " << replayed.size() << " events identical\n";
    return kExitOk;
}

int cmd_crawl(const Settings& settings, std::ostream& out, std::ostream& err)
{
    std::optional<CandidateSet> candidates;
    try
    {
        auto adapters = make_adapters(settings);
        auto config = make_run_config(settings, adapters);
        config.validate();
        candidates.emplace(analyze_structure(config));
    }
    catch (const ConfigError& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    catch (const std::invalid_argument& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitFatal);
    }

    out << std::left << std::setw(4) << "#" << std::setw(14) << "lambda" << std::setw(12) << "rho" << std::setw(8) << "origin" << "url\n";
    std::size_t rank = 0;
    for (auto const& arm: candidates->arms)
    {
        std::ostringstream lambda, rho;
        lambda << std::fixed << std::setprecision(6) << arm.lambda;
        rho << std::fixed << std::setprecision(6) << arm.rho;
        out << std::left << std::setw(4) << ++rank << std::setw(14) << lambda.str() << std::setw(12) << rho.str() << std::setw(8)
            << (arm.provenance == Provenance::Crawl ? "crawl" : "search") << arm.url.str() << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const Settings& settings, const SimulateRequest& request, std::ostream& out, std::ostream& err)
{
    std::vector<PolicyName> policies;
    try
    {
        for (auto const& name: request.policies)
            policies.push_back(policy_from_string(name));
    }
    catch (const std::invalid_argument& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    auto const batch = standard_batch();
    if (request.tasks < 1 || request.tasks > batch.size())
    {
        err << "mango-nav: --tasks must be between 1 and " << batch.size() << '\n';
        return kExitConfig;
    }

    auto options = SimulationOptions::desk_scale();
    options.budget = settings.budget;
    options.max_iterations = settings.iterations;
    options.kappa = settings.kappa;
    if (settings.set_explicitly("crawl_limit"))
        options.crawl_limit = settings.crawl_limit;
    options.top_k_crawl = settings.top_k_crawl;
    options.top_k_search = settings.top_k_search;
    options.horizon = settings.horizon;

    std::vector<SyntheticSite> tasks;
    for (std::size_t i = 0; i < request.tasks; ++i)
        tasks.push_back(generate_site(batch[i]));

    ComparisonReport report;
    try
    {
        report = run_comparison(policies, tasks, { settings.seed }, options);
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitFatal);
    }

    auto reportJson = report.to_json();
    reportJson["options"] = {
        { "budget", options.budget },         { "max_iterations", options.max_iterations }, { "kappa", options.kappa },
        { "crawl_limit", options.crawl_limit }, { "top_k_crawl", options.top_k_crawl },     { "top_k_search", options.top_k_search },
        { "horizon", options.horizon == 0 ? options.budget : options.horizon },
    };
    std::ostringstream tests;
    if (std::ranges::find(policies, PolicyName::Mango) != policies.end())
    {
        auto paired = nlohmann::json::object();
        for (auto const other: policies)
        {
            if (other == PolicyName::Mango)
                continue;
            auto const t = paired_exact_test(report, PolicyName::Mango, other);
            paired[std::string(to_string(other))] = { { "mango_only", t.a_only }, { "other_only", t.b_only }, { "p_value", t.p_value } };
            tests << "mango vs " << std::left << std::setw(12) << to_string(other) << " discordant " << t.a_only << '/' << t.b_only
                  << "  one-sided p = " << std::setprecision(4) << t.p_value << '\n';
        }
        reportJson["paired_tests"] = paired;
    }

    try
    {
        fs::create_directories(settings.output_dir);
        writeFile(fs::path(settings.output_dir) / "report.json", reportJson.dump(2) + '\n');
        writeFile(fs::path(settings.output_dir) / "report.txt", report.to_table() + tests.str());
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitFatal);
    }
    if (settings.log_level != "quiet")
        out << report.to_table() << tests.str() << "report: " << (fs::path(settings.output_dir) / "report.json").string() << '\n';
    return kExitOk;
}

int cmd_gen_site(const GenSiteRequest& request, std::ostream& out, std::ostream& err)
{
    if (request.spec.branching < 1 || request.spec.depth < 1 || request.spec.targets < 1 || request.spec.distractor_density < 0.0 ||
        request.spec.distractor_density > 1.0)
    {
        err << "mango-nav: branching, depth and targets must be >= 1 and density within [0, 1]\n";
        return kExitConfig;
    }
    auto const site = generate_site(request.spec);
    auto const text = site.graph.to_json().dump(2) + '\n';
    if (request.out.empty() || request.out == "-")
    {
        out << text;
        return kExitOk;
    }
    try
    {
        writeFile(request.out, text);
    }
    catch (const PersistenceFailure& e)
    {
        return reportFailure(err, e, kExitFatal);
    }
    return kExitOk;
}

namespace
{

    struct FlagSpec
    {
        const char* flag;
        const char* key;
        const char* help;
    };

    constexpr FlagSpec kRunFlags[] = {
        { "--query", "query", "Natural-language question (defaults to the site fixture's query)" },
        { "--root-url", "root_url", "Website root URL (defaults to the site fixture's root)" },
        { "--budget", "budget", "Navigation budget b per attempt (default 10)" },
        { "--iterations", "iterations", "Thompson sampling iterations T (default 10)" },
        { "--kappa", "kappa", "Prior weight kappa (default 3)" },
        { "--crawl-limit", "crawl_limit", "Crawl page limit tau (default 1000)" },
        { "--top-k-crawl", "top_k_crawl", "BM25 candidates kept from the crawl (default 10)" },
        { "--top-k-search", "top_k_search", "Search results kept (default 10)" },
        { "--seed", "seed", "Bandit RNG seed (default 0)" },
        { "--agent", "agent", "scripted | live" },
        { "--reflector", "reflector", "scripted | live" },
        { "--search", "search", "none | scripted | live" },
        { "--output-dir", "output_dir", "Run directory (MANGO_NAV_OUTPUT overrides)" },
        { "--site", "site", "Site fixture JSON for scripted adapters" },
        { "--policy", "policy", "mango | random | google_only | greedy | no_memory" },
        { "--horizon", "horizon", "Scripted reflector horizon (0 = budget)" },
        { "--log-level", "log_level", "quiet | info | debug" },
        { "--llm-base-url", "llm_base_url", "OpenAI-compatible API base URL" },
        { "--llm-model", "llm_model", "Model name for live adapters" },
        { "--llm-api-key-env", "llm_api_key_env", "Environment variable holding the API key" },
        { "--search-endpoint", "search_endpoint", "Live search endpoint (GET, JSON array reply)" },
    };

    struct SettingsFlags
    {
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
        std::string configFile;
        CLI::Option* config = nullptr;

        void attach(CLI::App& app)
        {
            for (auto const& spec: kRunFlags)
                options[spec.key] = app.add_option(spec.flag, values[spec.key], spec.help);
            config = app.add_option("--config", configFile, "JSON config file (defaults < file < flags)");
        }

        Settings resolve(const char* outputEnv) const
        {
            std::map<std::string, std::string> given;
            for (auto const& [key, option]: options)
                if (option->count() > 0)
                    given[key] = values.at(key);
            fs::path const path = configFile;
            return resolve_settings(config->count() > 0 ? &path : nullptr, given, outputEnv);
        }
    };

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const char* outputEnv)
{
    CLI::App app { "Website navigation with a Thompson-sampling start-URL bandit, episodic memory and reflection", "mango-nav" };
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Answer one query and write a run directory");
    SettingsFlags runFlags;
    runFlags.attach(*run);

    auto* crawl = app.add_subcommand("crawl", "Crawl, rank and search only; print the candidate table");
    SettingsFlags crawlFlags;
    crawlFlags.attach(*crawl);

    auto* simulate = app.add_subcommand("simulate", "Compare policies on the synthetic task batch");
    SettingsFlags simulateFlags;
    simulateFlags.attach(*simulate);
    SimulateRequest simulateRequest;
    simulate->add_option("--tasks", simulateRequest.tasks, "Number of tasks from the standard batch (default 200)");
    simulate->add_option("--policies", simulateRequest.policies, "Policies to compare")->delimiter(',');

    auto* replay = app.add_subcommand("replay", "Re-execute a recorded run and diff its event trace");
    std::string runDir;
    replay->add_option("run_dir", runDir, "Run directory written by `run`")->required();

    auto* gen = app.add_subcommand("gen-site", "Write a synthetic site fixture");
    GenSiteRequest genRequest;
    gen->add_option("--seed", genRequest.spec.seed, "Generator seed");
    gen->add_option("--branching", genRequest.spec.branching, "Links per page (default 2)");
    gen->add_option("--depth", genRequest.spec.depth, "Tree depth (default 3)");
    gen->add_option("--targets", genRequest.spec.targets, "Number of answer pages (default 1)");
    gen->add_option("--density", genRequest.spec.distractor_density, "Decoy probability per wrong sibling (default 0.2)");
    gen->add_option("--out", genRequest.out, "Output file (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        auto const code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try
    {
        if (run->parsed())
            return cmd_run(runFlags.resolve(outputEnv), out, err);
        if (crawl->parsed())
            return cmd_crawl(crawlFlags.resolve(outputEnv), out, err);
        if (simulate->parsed())
            return cmd_simulate(simulateFlags.resolve(outputEnv), simulateRequest, out, err);
        if (replay->parsed())
            return cmd_replay(runDir, out, err);
        return cmd_gen_site(genRequest, out, err);
    }
    catch (const ConfigError& e)
    {
        return reportFailure(err, e, kExitConfig);
    }
    catch (const std::exception& e)
    {
        return reportFailure(err, e, kExitFatal);
    }
}

} // namespace mango::cli
