// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/html_text.hpp>
#include <mango/live_adapters.hpp>
#include <mango/prompts.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <set>

namespace mango::live
{

namespace
{

    struct Target
    {
        std::string origin;
        std::string path;
    };

    Target splitUrl(std::string_view url)
    {
        auto const schemeEnd = url.find("://");
        auto const pathStart = url.find_first_of("/?", schemeEnd == std::string_view::npos ? 0 : schemeEnd + 3);
        if (pathStart == std::string_view::npos)
            return { std::string(url), "/" };
        auto path = std::string(url.substr(pathStart));
        if (path.front() == '?')
            path.insert(path.begin(), '/');
        return { std::string(url.substr(0, pathStart)), path };
    }

    void configure(httplib::Client& client, const HttpOptions& options)
    {
        auto const secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
        auto const usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        client.set_follow_location(true);
        client.set_default_headers({ { "User-Agent", options.user_agent } });
    }

    std::string trajectorySummary(const Trajectory& trajectory)
    {
        std::string out;
        for (std::size_t i = 0; i < trajectory.steps.size(); ++i)
        {
            auto const& [action, obs] = trajectory.steps[i];
            nlohmann::json a = action;
            out += std::to_string(i + 1) + ". " + a.dump() + " -> " + obs.url.str();
            if (obs.error)
                out += " (error: " + *obs.error + ")";
            out += '\n';
        }
        return out;
    }

} // namespace

std::string extract_json_object(std::string_view reply)
{
    auto const open = reply.find('{');
    auto const close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        return std::string(reply);
    return std::string(reply.substr(open, close - open + 1));
}

std::string fill_prompt(std::string_view tmpl, std::string_view query, std::string_view rootUrl)
{
    std::string out(tmpl);
    for (auto const& [key, value]: { std::pair { std::string_view("{USER_QUERY}"), query }, std::pair { std::string_view("{ROOT_URL}"), rootUrl } })
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
            out.replace(pos, key.size(), value);
    return out;
}

LiveFetcher::LiveFetcher(HttpOptions options): _options(std::move(options))
{
}

FetchResponse LiveFetcher::fetch(const CanonicalUrl& url)
{
    auto const [origin, path] = splitUrl(url.str());
    httplib::Client client(origin);
    configure(client, _options);
    auto const res = client.Get(path);
    if (!res)
        throw FetchError(url.str() + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw FetchError(url.str() + ": HTTP " + std::to_string(res->status));

    FetchResponse response;
    response.content_type = res->get_header_value("Content-Type");
    response.body = res->body;
    if (is_html_content_type(response.content_type))
        for (auto const& anchor: extract_anchors(response.body))
            response.outlinks.push_back(anchor.href);
    return response;
}

LiveSearchClient::LiveSearchClient(std::string endpoint, HttpOptions options): _endpoint(std::move(endpoint)), _options(std::move(options))
{
}

std::vector<std::string> LiveSearchClient::search(std::string_view keywords, std::string_view siteDomain, std::size_t k)
{
    auto const [origin, path] = splitUrl(_endpoint);
    httplib::Client client(origin);
    configure(client, _options);
    httplib::Params params { { "q", std::string(keywords) }, { "site", std::string(siteDomain) }, { "k", std::to_string(k) } };
    auto const res = client.Get(path, params, httplib::Headers {});
    if (!res)
        throw SearchUnavailable("search request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw SearchUnavailable("search returned HTTP " + std::to_string(res->status));
    auto const body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_array())
        throw SearchUnavailable("search reply is not a JSON array");
    std::vector<std::string> urls;
    for (auto const& item: body)
        if (item.is_string())
            urls.push_back(item.get<std::string>());
    return urls;
}

ChatClient::ChatClient(ChatOptions options): _options(std::move(options))
{
}

std::string ChatClient::complete(std::string_view system, std::string_view user)
{
    auto base = _options.base_url;
    while (!base.empty() && base.back() == '/')
        base.pop_back();
    auto const [origin, prefix] = splitUrl(base);
    httplib::Client client(origin);
    configure(client, _options.http);
    httplib::Headers headers;
    if (!_options.api_key.empty())
        headers.emplace("Authorization", "Bearer " + _options.api_key);

    nlohmann::json request {
        { "model", _options.model },
        { "temperature", 0 },
        { "messages", { { { "role", "system" }, { "content", std::string(system) } }, { { "role", "user" }, { "content", std::string(user) } } } },
    };
    auto const path = (prefix == "/" ? std::string {} : prefix) + "/chat/completions";
    auto const res = client.Post(path, headers, request.dump(), "application/json");
    if (!res)
        throw AdapterFailure("chat request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw AdapterFailure("chat returned HTTP " + std::to_string(res->status));
    auto const body = nlohmann::json::parse(res->body, nullptr, false);
    try
    {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw AdapterFailure("unexpected chat reply shape");
    }
}

std::string LlmKeywordAdapter::generate(std::string_view systemPrompt, const Query& query)
{
    return _chat.complete(systemPrompt, query.text());
}

Action LlmAgent::decide(const Query& query,
                        const CanonicalUrl& startUrl,
                        std::span<const EpisodeRecord> memoryContext,
                        const Trajectory& trajectorySoFar,
                        const Observation& latest)
{
    std::string user;
    if (!memoryContext.empty())
    {
        user += "PREVIOUS VISITS\n";
        for (auto const& record: memoryContext)
        {
            nlohmann::json r = record.reflection;
            user += "Visit at iteration " + std::to_string(record.iteration) + ", output: " + record.final_output.value_or("(none)") +
                    ", reflection: " + r.dump() + "\n";
            for (auto const& step: record.trajectory)
            {
                nlohmann::json a = step.action;
                user += "  " + a.dump() + " -> " + step.observation.url.str() + "\n";
            }
        }
        user += "\n";
    }
    user += "CURRENT TRAJECTORY\n" + trajectorySummary(trajectorySoFar) + "\nCURRENT PAGE " + latest.url.str() + "\n";
    if (latest.error)
        user += "ERROR: " + *latest.error + "\n";
    user += latest.content + "\n\nLINKS\n";
    for (auto const& item: latest.interactables)
        user += "[" + item.ref + "] " + item.text + "\n";
    user += "\nReply with one JSON object: {\"kind\": \"visit|click|type|scroll|back|finish\", \"target\"?, \"argument\"?, "
            "\"result\"?, \"source\"?}. Use finish with result and source to hand off a found answer.";

    auto const reply = _chat.complete(fill_prompt(prompts::kNavigationAgent, query.text(), startUrl.str()), user);
    try
    {
        return nlohmann::json::parse(extract_json_object(reply)).get<Action>();
    }
    catch (const std::exception& e)
    {
        throw AgentFailure(std::string("unparseable agent action: ") + e.what());
    }
}

std::string LlmReflector::judge_completed(const Query& query, const Trajectory& trajectory, std::string_view output, const CanonicalUrl& source)
{
    auto const user = "User Query: " + query.text() + "\n\nTrajectory:\n" + trajectorySummary(trajectory) + "\nOutput: " + std::string(output) +
                      "\nSource: " + source.str() + "\n";
    return extract_json_object(_chat.complete(prompts::kReflectionCompleted, user));
}

std::string LlmReflector::judge_exhausted(const Query& query, const Trajectory& trajectory)
{
    auto const* last = trajectory.last_observation();
    auto user = "User Query: " + query.text() + "\n\nTrajectory:\n" + trajectorySummary(trajectory);
    if (last != nullptr)
        user += "\nFinal URL: " + last->url.str() + "\n" + truncate_utf8(last->content, 4000) + "\n";
    return extract_json_object(_chat.complete(prompts::kReflectionExhausted, user));
}

HttpBrowserEnv::HttpBrowserEnv(HttpOptions options): _fetcher(std::move(options))
{
}

Observation HttpBrowserEnv::load(const CanonicalUrl& url)
{
    auto const response = _fetcher.fetch(url);
    Observation obs;
    obs.url = url;
    obs.content = html_to_text(response.body);
    std::set<std::string> seen;
    for (auto const& anchor: extract_anchors(response.body))
    {
        try
        {
            auto const target = canonicalize_url(anchor.href, url);
            if (seen.insert(target.str()).second)
                obs.interactables.push_back({ target.str(), anchor.text });
        }
        catch (const InvalidUrl&)
        {
        }
    }
    return obs;
}

Observation HttpBrowserEnv::reset(const CanonicalUrl& url)
{
    try
    {
        _currentObservation = load(url);
    }
    catch (const FetchError& e)
    {
        throw EnvironmentFailure(e.what());
    }
    _current = url;
    _history.clear();
    return _currentObservation;
}

Observation HttpBrowserEnv::apply(const Action& action)
{
    auto const errorHere = [&](std::string message) {
        return Observation { .url = _current, .content = {}, .interactables = {}, .error = std::move(message) };
    };
    switch (action.kind)
    {
        case ActionKind::Visit:
        case ActionKind::Click:
        {
            CanonicalUrl target;
            try
            {
                target = canonicalize_url(action.target.value_or(""), _current);
                auto obs = load(target);
                _history.push_back(_current);
                _current = target;
                _currentObservation = obs;
                return obs;
            }
            catch (const Error& e)
            {
                return errorHere(e.what());
            }
        }
        case ActionKind::Back:
        {
            if (_history.empty())
                return errorHere("no history");
            auto const previous = _history.back();
            _history.pop_back();
            try
            {
                _currentObservation = load(previous);
                _current = previous;
                return _currentObservation;
            }
            catch (const FetchError& e)
            {
                return errorHere(e.what());
            }
        }
        case ActionKind::Type:
        case ActionKind::Scroll:
        case ActionKind::Finish: return _currentObservation;
    }
    return _currentObservation;
}

} // namespace mango::live
