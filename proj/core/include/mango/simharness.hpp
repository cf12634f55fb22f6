// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/navigation.hpp>
#include <mango/orchestrator.hpp>
#include <mango/reflection.hpp>
#include <mango/site_graph.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mango
{

struct SiteSpec
{
    std::uint64_t seed = 0;
    std::size_t branching = 2;
    std::size_t depth = 3;
    std::size_t targets = 1;
    double distractor_density = 0.2;

    bool operator==(const SiteSpec&) const = default;
};

/// Generated task: a tree-shaped site whose graph carries the query, golden
/// answer, targets and a rank-ordered search fixture as metadata.
struct SyntheticSite
{
    SiteSpec spec;
    SiteGraph graph;

    [[nodiscard]] const CanonicalUrl& root_url() const { return *graph.root_url; }
    [[nodiscard]] const std::string& query() const { return *graph.query; }
    [[nodiscard]] const std::string& golden_answer() const { return *graph.golden_answer; }
    [[nodiscard]] const std::vector<CanonicalUrl>& target_urls() const { return graph.target_urls; }
};

/// Deterministic in `seed`. Pages on the way to a target carry more query terms the
/// closer they are; decoy branches (one per fork with probability
/// distractor_density) look slightly better than the true branch and end blind.
SyntheticSite generate_site(std::uint64_t seed, std::size_t branching, std::size_t depth, std::size_t targets, double distractorDensity);
SyntheticSite generate_site(const SiteSpec& spec);

/// Non-stopword query terms the scripted oracles match against.
std::set<std::string> query_terms(std::string_view query);

/// Lexical agent over a fixture site: finishes when the golden answer is on the
/// page, otherwise clicks the unvisited link sharing most query terms, backs out
/// of dead ends, and steers around branches that failed in earlier episodes.
class ScriptedAgent final: public AgentAdapter
{
  public:
    /// The site must carry a golden answer.
    explicit ScriptedAgent(const SiteGraph& site);

    Action decide(const Query& query,
                  const CanonicalUrl& startUrl,
                  std::span<const EpisodeRecord> memoryContext,
                  const Trajectory& trajectorySoFar,
                  const Observation& latest) override;

    using Edge = std::pair<CanonicalUrl, CanonicalUrl>;

    /// Edges (page -> link target) the agent avoids given earlier episodes.
    [[nodiscard]] std::set<Edge> avoided_edges(const Query& query, std::span<const EpisodeRecord> memoryContext) const;

  private:
    const SiteGraph& _site;
    std::string _golden;
};

/// Ground-truth reflector: adequate iff the output contains the golden answer;
/// feasible iff a target is at most `horizon` link hops from the final page.
class ScriptedReflector final: public ReflectorAdapter
{
  public:
    ScriptedReflector(const SiteGraph& site, std::size_t horizon);

    std::string judge_completed(const Query& query, const Trajectory& trajectory, std::string_view output, const CanonicalUrl& source) override;
    std::string judge_exhausted(const Query& query, const Trajectory& trajectory) override;

    /// Link hops from `url` to the nearest target; nullopt when none is reachable.
    [[nodiscard]] std::optional<std::size_t> distance_to_target(const CanonicalUrl& url) const;

  private:
    const SiteGraph& _site;
    std::size_t _horizon;
    std::map<CanonicalUrl, std::size_t> _distance;
};

/// Link hops from every page to its nearest target (reverse breadth-first search).
std::map<CanonicalUrl, std::size_t> target_distances(const SiteGraph& site);

enum class PolicyName
{
    Mango,
    Random,
    GoogleOnly,
    Greedy,
    NoMemory,
};

std::string_view to_string(PolicyName name);
PolicyName policy_from_string(std::string_view text);
RunPolicy policy_spec(PolicyName name);

/// Run parameters shared by every policy in a comparison.
struct SimulationOptions
{
    std::size_t budget = 10;
    std::size_t max_iterations = 10;
    double kappa = 3.0;
    std::size_t crawl_limit = 1000;
    std::size_t top_k_crawl = 10;
    std::size_t top_k_search = kDefaultSearchK;
    /// Reflector horizon; 0 means "use the navigation budget".
    std::size_t horizon = 0;

    /// Defaults with the crawl limit scaled down to synthetic-site size (40 pages),
    /// so the crawl sees the upper levels of a site rather than all of it.
    static SimulationOptions desk_scale();
};

struct TaskOutcome
{
    PolicyName policy = PolicyName::Mango;
    std::size_t task = 0;
    std::uint64_t site_seed = 0;
    std::uint64_t run_seed = 0;
    bool success = false;
    std::size_t actions = 0;
    std::size_t iterations = 0;
    std::optional<std::string> error;
};

struct PolicySummary
{
    std::size_t runs = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double mean_actions = 0.0;
};

struct ComparisonReport
{
    std::vector<PolicyName> policies;
    std::vector<std::uint64_t> seeds;
    std::map<PolicyName, PolicySummary> summary;
    std::vector<TaskOutcome> outcomes;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Plain-text table: one row per policy with SR and mean action count.
    [[nodiscard]] std::string to_table() const;
};

/// Seed of the bandit for (task site seed, run seed).
std::uint64_t run_seed_for(std::uint64_t siteSeed, std::uint64_t seed);

/// One full scripted orchestrator run of `policy` on `site`.
TaskOutcome run_task(PolicyName policy, const SyntheticSite& site, std::uint64_t seed, const SimulationOptions& options);

/// Every (policy, task, seed) triple; per-run fatal errors become failed outcomes.
ComparisonReport run_comparison(const std::vector<PolicyName>& policies,
                                const std::vector<SyntheticSite>& tasks,
                                const std::vector<std::uint64_t>& seeds,
                                const SimulationOptions& options = {});

/// The 200-task batch: branching 2..4, depth 3..6, density 0.2 / 0.5.
std::vector<SiteSpec> standard_batch();

struct PairedTest
{
    std::size_t a_only = 0;
    std::size_t b_only = 0;
    /// One-sided exact binomial p-value for "a succeeds more often than b".
    double p_value = 1.0;
};

/// Exact McNemar test on discordant (task, seed) pairs of two policies.
PairedTest paired_exact_test(const ComparisonReport& report, PolicyName a, PolicyName b);

/// P(X >= k) for X ~ Binomial(n, 1/2).
double binomial_upper_tail(std::size_t k, std::size_t n);

} // namespace mango
