// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/orchestrator.hpp>
#include <mango/rng.hpp>

#include <algorithm>
#include <stdexcept>

namespace mango
{

namespace
{

    nlohmann::json armsJson(const CandidateSet& set)
    {
        nlohmann::json j;
        to_json(j, set);
        return j;
    }

    std::string_view strategyName(CandidateStrategy strategy)
    {
        switch (strategy)
        {
            case CandidateStrategy::Global: return "global";
            case CandidateStrategy::Random: return "random";
            case CandidateStrategy::SearchOnly: return "search-only";
        }
        return "global";
    }

    // Seed for the random-candidate draw, kept apart from the bandit's stream.
    std::uint64_t candidateSeed(std::uint64_t banditSeed)
    {
        std::uint64_t state = banditSeed ^ 0x6a09e667f3bcc909ULL;
        return splitmix64(state);
    }

} // namespace

RunConfig::RunConfig(Query q, CanonicalUrl root): query(std::move(q)), root_url(std::move(root))
{
    crawl.root_url = root_url;
}

void RunConfig::validate() const
{
    if (max_iterations < 1)
        throw std::invalid_argument("max_iterations must be >= 1");
    if (root_url.empty())
        throw std::invalid_argument("root_url is required");
    if (search_k < 1)
        throw std::invalid_argument("search_k must be >= 1");
    navigation.validate();
    crawl.validate();
    ranking.validate();
    bandit.validate();
    if (adapters.fetcher == nullptr || adapters.agent == nullptr || adapters.reflector == nullptr || adapters.env == nullptr)
        throw std::invalid_argument("fetcher, agent, reflector and env adapters are required");
}

std::string_view to_string(EventKind kind)
{
    switch (kind)
    {
        case EventKind::CrawlDone: return "crawl-done";
        case EventKind::CandidatesBuilt: return "candidates-built";
        case EventKind::ArmSelected: return "arm-selected";
        case EventKind::NavigationDone: return "navigation-done";
        case EventKind::ReflectionDone: return "reflection-done";
        case EventKind::BanditUpdated: return "bandit-updated";
        case EventKind::Terminated: return "terminated";
    }
    return "terminated";
}

std::string event_line(const RunEvent& event)
{
    return nlohmann::json { { "seq", event.seq }, { "kind", std::string(to_string(event.kind)) }, { "payload", event.payload } }.dump();
}

std::string_view to_string(RunStatus status)
{
    return status == RunStatus::Answered ? "answered" : "unanswered";
}

nlohmann::json to_json(const RunResult& result)
{
    nlohmann::json j {
        { "status", std::string(to_string(result.status)) },
        { "answer", result.answer ? nlohmann::json(*result.answer) : nlohmann::json(nullptr) },
        { "source", result.source ? nlohmann::json(result.source->str()) : nlohmann::json(nullptr) },
        { "iterations_used", result.iterations_used },
        { "total_actions", result.total_actions },
        { "candidate_count", result.candidate_count },
        { "event_count", result.event_trace.size() },
    };
    if (result.best_partial)
        j["best_partial"] = *result.best_partial;
    return j;
}

RunFailure::RunFailure(const std::string& message, RunResult partial, std::exception_ptr cause)
    : Error(message), _partial(std::move(partial)), _cause(std::move(cause))
{
}

CandidateSet random_candidate_set(const CrawlResult& crawl, const Query& query, std::size_t size, std::uint64_t seed, const RankingConfig& config)
{
    auto const ordered = crawl.in_fetch_order();
    if (ordered.empty())
        throw EmptyCorpus("no crawled pages to sample");
    size = std::min(size, ordered.size());

    // Partial Fisher-Yates over fetch order.
    std::vector<const CrawledPage*> pool(ordered.begin(), ordered.end());
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < size; ++i)
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(size);

    auto const stats = build_corpus_stats(crawl);
    std::vector<ScoredUrl> arms;
    std::vector<double> lambdas;
    for (auto const* page: pool)
    {
        auto const lambda = bm25_score(query, document_tokens(page->url, page->content), stats, config);
        arms.push_back(ScoredUrl { .url = page->url, .lambda = lambda, .provenance = Provenance::Crawl });
        lambdas.push_back(lambda);
    }
    auto const rho = normalize_scores(lambdas, config.epsilon);
    for (std::size_t i = 0; i < arms.size(); ++i)
        arms[i].rho = rho[i];
    std::ranges::stable_sort(arms, [](const ScoredUrl& a, const ScoredUrl& b) { return a.lambda > b.lambda; });
    return CandidateSet { .arms = std::move(arms), .query = query, .root_url = ordered.front()->url };
}

CandidateSet analyze_structure(const RunConfig& config, const std::function<void(EventKind, nlohmann::json)>& emit)
{
    auto const notify = [&](EventKind kind, nlohmann::json payload) {
        if (emit)
            emit(kind, std::move(payload));
    };

    auto const crawlResult = crawl(config.crawl, *config.adapters.fetcher);
    notify(EventKind::CrawlDone,
           { { "pages", crawlResult.pages.size() }, { "skipped", crawlResult.skipped.size() }, { "root_domain", crawlResult.root_domain } });

    auto const crawlTop = rank_candidates(crawlResult, config.query, config.ranking);

    std::string searchStatus = "disabled";
    std::string keywords;
    std::vector<CanonicalUrl> searchUrls;
    if (config.adapters.search != nullptr)
    {
        FallbackKeywordAdapter fallback;
        try
        {
            keywords = generate_search_keywords(config.query, config.adapters.keyworder != nullptr ? *config.adapters.keyworder : fallback);
        }
        catch (const AdapterFailure&)
        {
            keywords = generate_search_keywords(config.query, fallback);
        }
        if (keywords.find_first_not_of(' ') == std::string::npos)
            keywords = config.query.text();
        try
        {
            searchUrls = site_search(keywords, crawlResult.root_domain, *config.adapters.search, config.search_k);
            searchStatus = "ok";
        }
        catch (const SearchUnavailable&)
        {
            searchStatus = "unavailable";
        }
    }

    CandidateSet candidates { .arms = {}, .query = config.query, .root_url = config.root_url };
    switch (config.policy.candidates)
    {
        case CandidateStrategy::Global:
            candidates = build_candidate_set(crawlTop, searchUrls, crawlResult, config.query, *config.adapters.fetcher, config.ranking);
            break;
        case CandidateStrategy::SearchOnly:
            candidates = build_candidate_set({}, searchUrls, crawlResult, config.query, *config.adapters.fetcher, config.ranking);
            break;
        case CandidateStrategy::Random:
        {
            auto const global = build_candidate_set(crawlTop, searchUrls, crawlResult, config.query, *config.adapters.fetcher, config.ranking);
            candidates = random_candidate_set(crawlResult, config.query, global.arms.size(), candidateSeed(config.bandit.rng_seed), config.ranking);
            break;
        }
    }

    notify(EventKind::CandidatesBuilt,
           {
               { "strategy", std::string(strategyName(config.policy.candidates)) },
               { "search", searchStatus },
               { "keywords", keywords },
               { "count", candidates.arms.size() },
               { "arms", armsJson(candidates) },
           });
    return candidates;
}

RunResult run(const RunConfig& config, MemoryStore& memory, const EventObserver& observer)
{
    RunResult result;
    auto const emit = [&](EventKind kind, nlohmann::json payload) {
        RunEvent event { .seq = result.event_trace.size(), .kind = kind, .payload = std::move(payload) };
        if (observer)
            observer(event);
        result.event_trace.push_back(std::move(event));
    };

    try
    {
        config.validate();
        auto const candidates = analyze_structure(config, emit);
        result.candidate_count = candidates.arms.size();

        auto bandit = init_arms(candidates, config.bandit);
        result.arm_snapshots.push_back(snapshot_json(bandit));

        std::vector<CanonicalUrl> greedyOrder;
        if (config.policy.selection == SelectionStrategy::Greedy)
        {
            std::vector<const CandidateArm*> byLambda;
            for (auto const& arm: bandit.arms())
                byLambda.push_back(&arm);
            std::ranges::stable_sort(byLambda, [](const CandidateArm* a, const CandidateArm* b) { return a->lambda > b->lambda; });
            for (auto const* arm: byLambda)
                greedyOrder.push_back(arm->url);
        }

        std::string stopReason = "iteration-cap";
        for (std::size_t t = 1; t <= config.max_iterations; ++t)
        {
            CanonicalUrl url;
            nlohmann::json selected { { "iteration", t } };
            if (config.policy.selection == SelectionStrategy::Thompson)
            {
                SelectionDraw draw;
                try
                {
                    draw = bandit.select_arm();
                }
                catch (const AllArmsExhausted&)
                {
                    stopReason = "all-arms-exhausted";
                    break;
                }
                url = draw.url;
                auto thetas = nlohmann::json::array();
                for (auto const& [armUrl, theta]: draw.theta_samples)
                    thetas.push_back({ armUrl.str(), theta });
                selected["url"] = url.str();
                selected["theta"] = std::move(thetas);
            }
            else
            {
                if (t > greedyOrder.size())
                {
                    stopReason = "all-arms-visited";
                    break;
                }
                url = greedyOrder[t - 1];
                selected["url"] = url.str();
                selected["rank"] = t;
            }
            result.iterations_used = t;
            emit(EventKind::ArmSelected, std::move(selected));

            auto const context = config.policy.use_memory ? memory.retrieve(url) : std::vector<EpisodeRecord> {};
            auto const nav = navigate(config.query, url, context, *config.adapters.agent, *config.adapters.env, config.navigation);
            result.total_actions += nav.trajectory.steps.size();
            nlohmann::json outcomeJson;
            to_json(outcomeJson, nav.outcome);
            emit(EventKind::NavigationDone,
                 { { "iteration", t }, { "url", url.str() }, { "steps", nav.trajectory.steps.size() }, { "memory_episodes", context.size() }, { "outcome", std::move(outcomeJson) } });

            auto const verdict = reflect(config.query, nav.trajectory, nav.outcome, *config.adapters.reflector);
            emit(EventKind::ReflectionDone, { { "iteration", t }, { "url", url.str() }, { "status", std::string(to_string(verdict.status)) }, { "reason", verdict.reason } });

            std::optional<std::string> finalOutput;
            if (auto const* done = std::get_if<Completed>(&nav.outcome))
                finalOutput = done->result;
            memory.store(EpisodeRecord::from(t, nav.trajectory, finalOutput, verdict));

            auto const decision = decide_reward(verdict);
            if (auto const* stop = std::get_if<Terminate>(&decision))
            {
                result.status = RunStatus::Answered;
                result.answer = stop->answer;
                result.source = stop->source;
                stopReason = "adequate";
                break;
            }

            auto const& next = std::get<Continue>(decision);
            if (verdict.status == ReflectionStatus::Inadequate)
                result.best_partial = verdict.output;
            bool const applied = config.policy.selection == SelectionStrategy::Thompson;
            if (applied)
            {
                bandit.update(url, next.reward);
                if (next.exhaust)
                    bandit.exhaust_arm(url);
            }
            auto const& arm = bandit.arm(url);
            emit(EventKind::BanditUpdated,
                 {
                     { "iteration", t },
                     { "url", url.str() },
                     { "reward", static_cast<int>(next.reward) },
                     { "exhausted", next.exhaust },
                     { "applied", applied },
                     { "alpha", arm.alpha },
                     { "beta", arm.beta },
                 });
            result.arm_snapshots.push_back(snapshot_json(bandit));
        }

        nlohmann::json done {
            { "status", std::string(to_string(result.status)) },
            { "reason", stopReason },
            { "iterations_used", result.iterations_used },
            { "total_actions", result.total_actions },
        };
        if (result.answer)
        {
            done["answer"] = *result.answer;
            done["source"] = result.source->str();
        }
        emit(EventKind::Terminated, std::move(done));
        return result;
    }
    catch (const std::exception& e)
    {
        emit(EventKind::Terminated,
             { { "status", "failed" }, { "reason", e.what() }, { "iterations_used", result.iterations_used }, { "total_actions", result.total_actions } });
        throw RunFailure(e.what(), std::move(result), std::current_exception());
    }
}

} // namespace mango
