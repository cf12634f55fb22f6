// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/rng.hpp>
#include <mango/simharness.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

namespace mango
{

namespace
{

    constexpr std::size_t kQueryWords = 3;
    constexpr std::size_t kVocabularySize = 240;
    // A decoy branch keeps looking relevant one more level down with this probability.
    constexpr double kLureContinue = 0.3;
    // Share of pages the simulated search engine has indexed.
    constexpr double kSearchCoverage = 0.15;

    std::string pseudoWord(Xoshiro256& rng)
    {
        static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
        static constexpr std::string_view kVowels = "aeiou";
        static constexpr std::string_view kCodas = "lnrsx";
        std::string word;
        auto const syllables = 2 + rng.below(2);
        for (std::uint64_t i = 0; i < syllables; ++i)
        {
            word += kOnsets[rng.below(kOnsets.size())];
            word += kVowels[rng.below(kVowels.size())];
        }
        if (rng.below(2) == 0)
            word += kCodas[rng.below(kCodas.size())];
        return word;
    }

    std::vector<std::string> vocabulary(Xoshiro256& rng)
    {
        std::set<std::string> reserved;
        for (auto sw: english_stopwords())
            reserved.emplace(sw);
        for (auto w: { "reference", "code", "codes", "back", "detail", "pages", "listed" })
            reserved.emplace(w);

        std::vector<std::string> words;
        std::set<std::string> seen;
        while (words.size() < kVocabularySize)
        {
            auto word = pseudoWord(rng);
            if (!reserved.contains(word) && seen.insert(word).second)
                words.push_back(std::move(word));
        }
        return words;
    }

    template <typename T>
    void shuffle(std::vector<T>& items, Xoshiro256& rng)
    {
        for (std::size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[rng.below(i)]);
    }

    struct Node
    {
        std::size_t depth = 0;
        std::size_t parent = 0;
        std::string path;
        std::vector<std::size_t> children;
        std::size_t overlap = 0;
        bool onPath = false;
        bool lure = false;
        bool target = false;
        std::string title;
    };

    std::size_t overlapOf(const std::set<std::string>& terms, std::string_view text)
    {
        std::set<std::string> seen;
        for (auto& token: tokenize(text))
            if (terms.contains(token))
                seen.insert(std::move(token));
        return seen.size();
    }

    std::string joinWords(const std::vector<std::string>& words)
    {
        std::string out;
        for (auto const& w: words)
        {
            if (!out.empty())
                out += ' ';
            out += w;
        }
        return out;
    }

    // Page stack replayed from a stored episode: pushes on successful moves, pops on back.
    struct Replay
    {
        std::vector<CanonicalUrl> stack;
        std::vector<ScriptedAgent::Edge> backedOut;
    };

    Replay replayEpisode(const EpisodeRecord& record)
    {
        Replay replay;
        for (std::size_t i = 0; i < record.trajectory.size(); ++i)
        {
            auto const& [action, obs] = record.trajectory[i];
            if (obs.error)
                continue;
            if (i == 0)
            {
                replay.stack.push_back(obs.url);
                continue;
            }
            if (replay.stack.empty())
                break;
            if (action.kind == ActionKind::Back && replay.stack.size() > 1)
            {
                auto const popped = replay.stack.back();
                replay.stack.pop_back();
                replay.backedOut.emplace_back(replay.stack.back(), popped);
            }
            else if ((action.kind == ActionKind::Click || action.kind == ActionKind::Visit) && obs.url != replay.stack.back())
                replay.stack.push_back(obs.url);
        }
        return replay;
    }

    std::size_t historyDepth(const Trajectory& trajectory)
    {
        std::size_t depth = 0;
        CanonicalUrl current = trajectory.start_url;
        for (std::size_t i = 1; i < trajectory.steps.size(); ++i)
        {
            auto const& [action, obs] = trajectory.steps[i];
            if (obs.error)
                continue;
            if (action.kind == ActionKind::Back)
                depth = depth > 0 ? depth - 1 : 0;
            else if ((action.kind == ActionKind::Click || action.kind == ActionKind::Visit) && obs.url != current)
                ++depth;
            current = obs.url;
        }
        return depth;
    }

} // namespace

std::set<std::string> query_terms(std::string_view query)
{
    std::set<std::string> stop;
    for (auto sw: english_stopwords())
        stop.emplace(sw);
    std::set<std::string> terms;
    for (auto& token: tokenize(query))
        if (!stop.contains(token))
            terms.insert(std::move(token));
    return terms;
}

SyntheticSite generate_site(const SiteSpec& spec)
{
    return generate_site(spec.seed, spec.branching, spec.depth, spec.targets, spec.distractor_density);
}

SyntheticSite generate_site(std::uint64_t seed, std::size_t branching, std::size_t depth, std::size_t targets, double distractorDensity)
{
    if (branching < 1 || depth < 1 || targets < 1)
        throw std::invalid_argument("generate_site needs branching, depth and targets >= 1");
    if (!(distractorDensity >= 0.0 && distractorDensity <= 1.0))
        throw std::invalid_argument("distractor_density must lie in [0, 1]");

    Xoshiro256 rng(seed);
    auto words = vocabulary(rng);
    std::vector<std::string> const queryWords(words.begin(), words.begin() + kQueryWords);
    std::vector<std::string> const filler(words.begin() + kQueryWords, words.end());
    auto const fillerWord = [&] { return filler[rng.below(filler.size())]; };

    // Tree in breadth-first order.
    std::vector<Node> nodes(1);
    nodes[0].path = "/";
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        if (nodes[i].depth == depth)
            continue;
        for (std::size_t c = 0; c < branching; ++c)
        {
            Node child;
            child.depth = nodes[i].depth + 1;
            child.parent = i;
            child.path = (i == 0 ? std::string("/n") : nodes[i].path) + "/" + std::to_string(c + 1);
            nodes[i].children.push_back(nodes.size());
            nodes.push_back(std::move(child));
        }
    }

    auto const pathOverlap = [&](std::size_t d) { return (kQueryWords * d + depth - 1) / depth; };

    // True path to the primary target, with decoy branches hanging off its forks.
    std::size_t current = 0;
    nodes[0].onPath = true;
    for (std::size_t d = 1; d <= depth; ++d)
    {
        auto const& siblings = nodes[current].children;
        auto const next = siblings[rng.below(siblings.size())];
        nodes[next].onPath = true;
        nodes[next].overlap = pathOverlap(d);
        for (auto decoy: siblings)
        {
            if (decoy == next || rng.uniform_open() >= distractorDensity)
                continue;
            auto const lureOverlap = std::min(kQueryWords, pathOverlap(d) + 1);
            for (auto n = decoy;;)
            {
                nodes[n].lure = true;
                nodes[n].overlap = lureOverlap;
                if (nodes[n].children.empty() || rng.uniform_open() >= kLureContinue)
                    break;
                n = nodes[n].children[rng.below(nodes[n].children.size())];
            }
        }
        current = next;
    }
    nodes[current].target = true;
    nodes[current].lure = false;

    std::vector<std::size_t> targetNodes { current };
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].depth == depth && i != current)
            leaves.push_back(i);
    // Extra targets: the primary target's siblings first, then other leaves.
    std::ranges::stable_sort(leaves, [&](std::size_t a, std::size_t b) {
        return (nodes[a].parent == nodes[current].parent) > (nodes[b].parent == nodes[current].parent);
    });
    for (std::size_t i = 0; i < leaves.size() && targetNodes.size() < targets; ++i)
    {
        nodes[leaves[i]].target = true;
        nodes[leaves[i]].lure = false;
        nodes[leaves[i]].overlap = kQueryWords;
        targetNodes.push_back(leaves[i]);
    }

    for (auto& node: nodes)
    {
        std::vector<std::string> title;
        auto picks = queryWords;
        shuffle(picks, rng);
        for (std::size_t k = 0; k < node.overlap; ++k)
            title.push_back(picks[k]);
        title.push_back(fillerWord());
        title.push_back(fillerWord());
        shuffle(title, rng);
        node.title = joinWords(title);
    }

    char codeBuf[16];
    std::snprintf(codeBuf, sizeof codeBuf, "KX-%05llu", static_cast<unsigned long long>(rng.below(100000)));
    std::string const golden = codeBuf;
    std::string const host = "https://site" + std::to_string(seed) + ".example";
    double const noise = 0.6 * distractorDensity;

    SyntheticSite site;
    site.spec = SiteSpec { seed, branching, depth, targets, distractorDensity };
    site.graph.query = "What is the reference code for " + joinWords(queryWords) + "?";
    site.graph.golden_answer = golden;
    for (auto const& node: nodes)
    {
        SitePage page;
        page.url = CanonicalUrl::parse(host + node.path);
        std::vector<std::string> body;
        for (int w = 0; w < 14; ++w)
            body.push_back(fillerWord());
        if (!node.onPath && !node.lure && rng.uniform_open() < noise)
            body[rng.below(body.size())] = queryWords[rng.below(queryWords.size())];
        page.content = node.title + ". " + joinWords(body) + ". Reference codes are listed on the detail pages.";
        if (node.target)
            page.content += " The reference code is " + golden + ".";
        for (auto c: node.children)
            page.links.push_back({ nodes[c].title, nodes[c].path });
        site.graph.pages.push_back(std::move(page));
    }
    site.graph.root_url = site.graph.pages.front().url;
    for (auto t: targetNodes)
        site.graph.target_urls.push_back(site.graph.pages[t].url);
    std::ranges::sort(site.graph.target_urls);

    // Search fixture: a partial index of the site ranked by title overlap plus noise.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (i == 0 || rng.uniform_open() < kSearchCoverage)
            ranked.emplace_back(static_cast<double>(nodes[i].overlap) + 2.0 * rng.uniform_open(), i);
    std::ranges::stable_sort(ranked, [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < ranked.size() && i < kDefaultSearchK; ++i)
        site.graph.search_results.push_back(site.graph.pages[ranked[i].second].url.str());

    site.graph.reindex();
    return site;
}

ScriptedAgent::ScriptedAgent(const SiteGraph& site): _site(site)
{
    if (!site.golden_answer)
        throw FixtureError("scripted agent needs a site with a golden answer");
    _golden = *site.golden_answer;
}

std::set<ScriptedAgent::Edge> ScriptedAgent::avoided_edges(const Query& query, std::span<const EpisodeRecord> memoryContext) const
{
    auto const terms = query_terms(query.text());
    std::set<Edge> avoided;
    for (auto const& record: memoryContext)
    {
        if (record.reflection.status == ReflectionStatus::Adequate)
            continue;
        auto const replay = replayEpisode(record);
        auto const before = avoided.size();
        for (auto const& edge: replay.backedOut)
            avoided.insert(edge);

        // Deepest fork on the final branch that still had an untried relevant alternative.
        auto const& stack = replay.stack;
        bool marked = false;
        for (std::size_t i = stack.size(); i-- > 1 && !marked;)
        {
            auto const& from = stack[i - 1];
            auto const& to = stack[i];
            if (avoided.contains({ from, to }))
                continue;
            auto const* page = _site.find(from);
            if (page == nullptr)
                continue;
            for (auto const& [link, text]: _site.resolved_links(*page))
            {
                bool const ancestor = i >= 2 && link == stack[i - 2];
                if (link != to && !ancestor && !avoided.contains({ from, link }) && overlapOf(terms, text) > 0)
                {
                    avoided.insert({ from, to });
                    marked = true;
                    break;
                }
            }
        }
        if (avoided.size() == before && stack.size() > 1)
            avoided.insert({ stack[0], stack[1] });
    }
    return avoided;
}

Action ScriptedAgent::decide(const Query& query,
                             const CanonicalUrl& /*startUrl*/,
                             std::span<const EpisodeRecord> memoryContext,
                             const Trajectory& trajectorySoFar,
                             const Observation& latest)
{
    if (!latest.error && latest.content.find(_golden) != std::string::npos)
        return Action::finish(_golden, latest.url);

    auto const terms = query_terms(query.text());
    auto const avoided = avoided_edges(query, memoryContext);
    std::set<std::string> visited;
    for (auto const& step: trajectorySoFar.steps)
        visited.insert(step.observation.url.str());

    std::string best;
    std::size_t bestScore = 0;
    std::string fallback;
    std::size_t fallbackScore = 0;
    for (auto const& item: latest.interactables)
    {
        if (visited.contains(item.ref))
            continue;
        auto const score = overlapOf(terms, item.text);
        if (score == 0)
            continue;
        CanonicalUrl target;
        try
        {
            target = canonicalize_url(item.ref, latest.url);
        }
        catch (const InvalidUrl&)
        {
            continue;
        }
        if (avoided.contains({ latest.url, target }))
        {
            if (score > fallbackScore)
            {
                fallback = item.ref;
                fallbackScore = score;
            }
        }
        else if (score > bestScore)
        {
            best = item.ref;
            bestScore = score;
        }
    }
    if (bestScore > 0)
        return Action::click(best);
    if (historyDepth(trajectorySoFar) > 0)
        return Action::back();
    if (fallbackScore > 0)
        return Action::click(fallback);
    return Action::scroll();
}

std::map<CanonicalUrl, std::size_t> target_distances(const SiteGraph& site)
{
    std::map<CanonicalUrl, std::vector<CanonicalUrl>> reverse;
    for (auto const& page: site.pages)
    {
        if (page.dead)
            continue;
        for (auto const& [target, _]: site.resolved_links(page))
            if (auto const* p = site.find(target); p != nullptr && !p->dead)
                reverse[target].push_back(page.url);
    }
    std::map<CanonicalUrl, std::size_t> distance;
    std::deque<CanonicalUrl> queue;
    for (auto const& t: site.target_urls)
        if (distance.emplace(t, 0).second)
            queue.push_back(t);
    while (!queue.empty())
    {
        auto const url = queue.front();
        queue.pop_front();
        auto const d = distance.at(url);
        for (auto const& from: reverse[url])
            if (distance.emplace(from, d + 1).second)
                queue.push_back(from);
    }
    return distance;
}

ScriptedReflector::ScriptedReflector(const SiteGraph& site, std::size_t horizon)
    : _site(site), _horizon(horizon), _distance(target_distances(site))
{
    if (horizon < 1)
        throw std::invalid_argument("reflector horizon must be >= 1");
    if (!site.golden_answer)
        throw FixtureError("scripted reflector needs a site with a golden answer");
}

std::optional<std::size_t> ScriptedReflector::distance_to_target(const CanonicalUrl& url) const
{
    auto const it = _distance.find(url);
    return it == _distance.end() ? std::nullopt : std::optional<std::size_t>(it->second);
}

std::string ScriptedReflector::judge_completed(const Query& /*query*/,
                                               const Trajectory& /*trajectory*/,
                                               std::string_view output,
                                               const CanonicalUrl& source)
{
    bool const match = output.find(*_site.golden_answer) != std::string_view::npos;
    return nlohmann::json {
        { "status", match ? "adequate" : "inadequate" },
        { "reason", match ? "output contains the expected answer" : "output does not contain the expected answer" },
        { "output", std::string(output) },
        { "source", source.str() },
    }
        .dump();
}

std::string ScriptedReflector::judge_exhausted(const Query& /*query*/, const Trajectory& trajectory)
{
    auto const* last = trajectory.last_observation();
    std::optional<std::size_t> distance;
    if (last != nullptr)
        if (auto const* page = _site.find(last->url); page != nullptr && !page->dead && !(last->error && trajectory.steps.size() == 1))
            distance = distance_to_target(last->url);

    bool const feasible = distance && *distance <= _horizon;
    std::string reason = distance ? "target is " + std::to_string(*distance) + " hops from the final page" : "no target reachable from the final page";
    return nlohmann::json { { "status", feasible ? "feasible" : "infeasible" }, { "reason", reason } }.dump();
}

std::string_view to_string(PolicyName name)
{
    switch (name)
    {
        case PolicyName::Mango: return "mango";
        case PolicyName::Random: return "random";
        case PolicyName::GoogleOnly: return "google_only";
        case PolicyName::Greedy: return "greedy";
        case PolicyName::NoMemory: return "no_memory";
    }
    return "mango";
}

PolicyName policy_from_string(std::string_view text)
{
    for (auto p: { PolicyName::Mango, PolicyName::Random, PolicyName::GoogleOnly, PolicyName::Greedy, PolicyName::NoMemory })
        if (to_string(p) == text)
            return p;
    throw std::invalid_argument("unknown policy: " + std::string(text));
}

RunPolicy policy_spec(PolicyName name)
{
    switch (name)
    {
        case PolicyName::Mango: return {};
        case PolicyName::Random: return { .candidates = CandidateStrategy::Random };
        case PolicyName::GoogleOnly: return { .candidates = CandidateStrategy::SearchOnly };
        case PolicyName::Greedy: return { .selection = SelectionStrategy::Greedy };
        case PolicyName::NoMemory: return { .use_memory = false };
    }
    return {};
}

std::uint64_t run_seed_for(std::uint64_t siteSeed, std::uint64_t seed)
{
    std::uint64_t state = siteSeed * 0x9E3779B97F4A7C15ULL ^ seed;
    return splitmix64(state);
}

TaskOutcome run_task(PolicyName policy, const SyntheticSite& site, std::uint64_t seed, const SimulationOptions& options)
{
    TaskOutcome outcome { .policy = policy, .site_seed = site.spec.seed, .run_seed = seed };

    SiteFetcher fetcher(site.graph);
    ScriptedSearchClient search(site.graph.search_results);
    FallbackKeywordAdapter keyworder;
    ScriptedAgent agent(site.graph);
    ScriptedReflector reflector(site.graph, options.horizon == 0 ? options.budget : options.horizon);
    SimulatedBrowserEnv env(site.graph);

    RunConfig config(Query(site.query()), site.root_url());
    config.max_iterations = options.max_iterations;
    config.navigation.budget = options.budget;
    config.crawl.max_pages = options.crawl_limit;
    config.ranking.top_k = options.top_k_crawl;
    config.bandit.kappa = options.kappa;
    config.bandit.rng_seed = run_seed_for(site.spec.seed, seed);
    config.search_k = options.top_k_search;
    config.policy = policy_spec(policy);
    config.adapters = RunAdapters { &fetcher, &search, &keyworder, &agent, &reflector, &env };

    MemoryStore memory;
    try
    {
        auto const result = run(config, memory);
        outcome.success = result.status == RunStatus::Answered;
        outcome.actions = result.total_actions;
        outcome.iterations = result.iterations_used;
    }
    catch (const RunFailure& e)
    {
        outcome.error = e.what();
        outcome.actions = e.partial().total_actions;
        outcome.iterations = e.partial().iterations_used;
    }
    return outcome;
}

ComparisonReport run_comparison(const std::vector<PolicyName>& policies,
                                const std::vector<SyntheticSite>& tasks,
                                const std::vector<std::uint64_t>& seeds,
                                const SimulationOptions& options)
{
    if (policies.empty() || tasks.empty() || seeds.empty())
        throw std::invalid_argument("run_comparison needs policies, tasks and seeds");

    ComparisonReport report { .policies = policies, .seeds = seeds, .summary = {}, .outcomes = {} };
    for (auto policy: policies)
    {
        auto& summary = report.summary[policy];
        std::size_t actions = 0;
        for (std::size_t t = 0; t < tasks.size(); ++t)
            for (auto seed: seeds)
            {
                auto outcome = run_task(policy, tasks[t], seed, options);
                outcome.task = t;
                ++summary.runs;
                summary.successes += outcome.success ? 1 : 0;
                actions += outcome.actions;
                report.outcomes.push_back(std::move(outcome));
            }
        summary.success_rate = static_cast<double>(summary.successes) / static_cast<double>(summary.runs);
        summary.mean_actions = static_cast<double>(actions) / static_cast<double>(summary.runs);
    }
    return report;
}

nlohmann::json ComparisonReport::to_json() const
{
    nlohmann::json j;
    auto names = nlohmann::json::array();
    for (auto p: policies)
        names.push_back(std::string(to_string(p)));
    j["policies"] = std::move(names);
    j["seeds"] = seeds;
    for (auto const& [policy, s]: summary)
        j["summary"][std::string(to_string(policy))] = {
            { "runs", s.runs },
            { "successes", s.successes },
            { "success_rate", s.success_rate },
            { "mean_actions", s.mean_actions },
        };
    auto rows = nlohmann::json::array();
    for (auto const& o: outcomes)
    {
        nlohmann::json row {
            { "policy", std::string(to_string(o.policy)) },
            { "task", o.task },
            { "site_seed", o.site_seed },
            { "run_seed", o.run_seed },
            { "success", o.success },
            { "actions", o.actions },
            { "iterations", o.iterations },
        };
        if (o.error)
            row["error"] = *o.error;
        rows.push_back(std::move(row));
    }
    j["outcomes"] = std::move(rows);
    return j;
}

std::string ComparisonReport::to_table() const
{
    std::string out = "policy        SR      AC      runs\n";
    char line[128];
    for (auto p: policies)
    {
        auto const& s = summary.at(p);
        std::snprintf(line, sizeof line, "%-12s  %5.1f%%  %6.2f  %zu\n", std::string(to_string(p)).c_str(), 100.0 * s.success_rate, s.mean_actions, s.runs);
        out += line;
    }
    return out;
}

SimulationOptions SimulationOptions::desk_scale()
{
    SimulationOptions options;
    options.crawl_limit = 40;
    return options;
}

std::vector<SiteSpec> standard_batch()
{
    std::vector<SiteSpec> specs;
    for (std::size_t i = 0; i < 200; ++i)
        specs.push_back(SiteSpec {
            .seed = 1000 + i,
            .branching = 2 + i % 3,
            .depth = 3 + (i / 3) % 4,
            .targets = 1,
            .distractor_density = (i / 12) % 2 == 0 ? 0.2 : 0.5,
        });
    return specs;
}

double binomial_upper_tail(std::size_t k, std::size_t n)
{
    if (k == 0)
        return 1.0;
    if (k > n)
        return 0.0;
    double total = 0.0;
    auto const ln2 = std::log(2.0);
    auto const nd = static_cast<double>(n);
    for (std::size_t i = k; i <= n; ++i)
    {
        auto const id = static_cast<double>(i);
        total += std::exp(std::lgamma(nd + 1) - std::lgamma(id + 1) - std::lgamma(nd - id + 1) - nd * ln2);
    }
    return std::min(1.0, total);
}

PairedTest paired_exact_test(const ComparisonReport& report, PolicyName a, PolicyName b)
{
    std::map<std::pair<std::size_t, std::uint64_t>, bool> successA;
    std::map<std::pair<std::size_t, std::uint64_t>, bool> successB;
    for (auto const& o: report.outcomes)
    {
        if (o.policy == a)
            successA[{ o.task, o.run_seed }] = o.success;
        else if (o.policy == b)
            successB[{ o.task, o.run_seed }] = o.success;
    }
    PairedTest test;
    for (auto const& [key, sa]: successA)
    {
        auto const it = successB.find(key);
        if (it == successB.end())
            continue;
        test.a_only += (sa && !it->second) ? 1 : 0;
        test.b_only += (!sa && it->second) ? 1 : 0;
    }
    test.p_value = binomial_upper_tail(test.a_only, test.a_only + test.b_only);
    return test;
}

} // namespace mango
