// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango_cli/config.hpp>

#include <mango/orchestrator.hpp>
#include <mango/simharness.hpp>
#include <mango/site_graph.hpp>

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mango::live
{
class ChatClient;
}

namespace mango::cli
{

enum ExitCode : int
{
    kExitOk = 0,
    kExitConfig = 1,
    kExitFatal = 2,
    kExitReplayMismatch = 3,
};

/// Owns every adapter a run needs; `bindings()` hands out the raw pointers.
struct AdapterBundle
{
    AdapterBundle();
    AdapterBundle(AdapterBundle&&) noexcept;
    AdapterBundle& operator=(AdapterBundle&&) noexcept;
    ~AdapterBundle();

    std::unique_ptr<SiteGraph> site;
    std::unique_ptr<live::ChatClient> chat;
    std::unique_ptr<PageFetcher> fetcher;
    std::unique_ptr<SearchClient> search;
    std::unique_ptr<KeywordAdapter> keyworder;
    std::unique_ptr<AgentAdapter> agent;
    std::unique_ptr<ReflectorAdapter> reflector;
    std::unique_ptr<BrowserEnv> env;

    [[nodiscard]] RunAdapters bindings() const;
};

/// Scripted adapters read `settings.site`; live ones talk to the network.
AdapterBundle make_adapters(const Settings& settings);

/// RunConfig for the settings; query and root URL fall back to the site fixture.
RunConfig make_run_config(const Settings& settings, const AdapterBundle& adapters);

struct Divergence
{
    /// 1-based line number in events.jsonl.
    std::size_t line = 0;
    std::optional<std::string> expected;
    std::optional<std::string> actual;
};

std::optional<Divergence> first_divergence(const std::vector<std::string>& expected, const std::vector<std::string>& actual);

struct SimulateRequest
{
    std::size_t tasks = 200;
    std::vector<std::string> policies { "mango", "random", "google_only", "greedy", "no_memory" };
};

struct GenSiteRequest
{
    SiteSpec spec;
    std::string out;
};

int cmd_run(const Settings& settings, std::ostream& out, std::ostream& err);
int cmd_replay(const std::filesystem::path& runDir, std::ostream& out, std::ostream& err);
int cmd_simulate(const Settings& settings, const SimulateRequest& request, std::ostream& out, std::ostream& err);
int cmd_crawl(const Settings& settings, std::ostream& out, std::ostream& err);
int cmd_gen_site(const GenSiteRequest& request, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. `outputEnv` is the value of MANGO_NAV_OUTPUT (may be null).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const char* outputEnv);

} // namespace mango::cli
