// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/html_text.hpp>
#include <mango/site_graph.hpp>

#include <fstream>
#include <set>

namespace mango
{

namespace
{

    std::string escapeHtml(std::string_view text)
    {
        std::string out;
        out.reserve(text.size());
        for (char c: text)
        {
            switch (c)
            {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
            }
        }
        return out;
    }

    Observation errorAt(const CanonicalUrl& url, std::string message)
    {
        return Observation { .url = url, .content = {}, .interactables = {}, .error = std::move(message) };
    }

} // namespace

SiteGraph SiteGraph::from_json(const nlohmann::json& j)
{
    SiteGraph site;
    try
    {
        for (auto const& p: j.at("pages"))
        {
            SitePage page;
            page.url = CanonicalUrl::parse(p.at("url").get<std::string>());
            page.content = p.value("content", std::string {});
            if (p.contains("links"))
                for (auto const& link: p.at("links"))
                    page.links.push_back({ link.value("text", std::string {}), link.at("href").get<std::string>() });
            if (p.contains("forms"))
                page.forms = p.at("forms");
            page.content_type = p.value("content_type", std::string("text/html"));
            page.dead = p.value("dead", false);
            site.pages.push_back(std::move(page));
        }
        if (j.contains("root_url"))
            site.root_url = CanonicalUrl::parse(j.at("root_url").get<std::string>());
        if (j.contains("query"))
            site.query = j.at("query").get<std::string>();
        if (j.contains("golden_answer"))
            site.golden_answer = j.at("golden_answer").get<std::string>();
        if (j.contains("target_urls"))
            for (auto const& t: j.at("target_urls"))
                site.target_urls.push_back(CanonicalUrl::parse(t.get<std::string>()));
        if (j.contains("search_results"))
            site.search_results = j.at("search_results").get<std::vector<std::string>>();
    }
    catch (const nlohmann::json::exception& e)
    {
        throw FixtureError(std::string("malformed site fixture: ") + e.what());
    }
    catch (const InvalidUrl& e)
    {
        throw FixtureError(std::string("bad URL in site fixture: ") + e.what());
    }
    site.reindex();
    return site;
}

SiteGraph SiteGraph::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FixtureError("cannot read site fixture: " + path.string());
    try
    {
        return from_json(nlohmann::json::parse(in));
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw FixtureError(path.string() + ": " + e.what());
    }
}

void SiteGraph::reindex()
{
    _index.clear();
    for (std::size_t i = 0; i < pages.size(); ++i)
        if (!_index.emplace(pages[i].url, i).second)
            throw FixtureError("duplicate page in site fixture: " + pages[i].url.str());
}

nlohmann::json SiteGraph::to_json() const
{
    auto jsonPages = nlohmann::json::array();
    for (auto const& page: pages)
    {
        auto links = nlohmann::json::array();
        for (auto const& link: page.links)
            links.push_back({ { "text", link.text }, { "href", link.href } });
        nlohmann::json p { { "url", page.url.str() }, { "content", page.content }, { "links", std::move(links) }, { "forms", page.forms } };
        if (page.content_type != "text/html")
            p["content_type"] = page.content_type;
        if (page.dead)
            p["dead"] = true;
        jsonPages.push_back(std::move(p));
    }
    nlohmann::json j { { "pages", std::move(jsonPages) } };
    if (root_url)
        j["root_url"] = root_url->str();
    if (query)
        j["query"] = *query;
    if (golden_answer)
        j["golden_answer"] = *golden_answer;
    if (!target_urls.empty())
    {
        auto targets = nlohmann::json::array();
        for (auto const& t: target_urls)
            targets.push_back(t.str());
        j["target_urls"] = std::move(targets);
    }
    if (!search_results.empty())
        j["search_results"] = search_results;
    return j;
}

const SitePage* SiteGraph::find(const CanonicalUrl& url) const
{
    auto const it = _index.find(url);
    return it == _index.end() ? nullptr : &pages[it->second];
}

std::vector<std::pair<CanonicalUrl, std::string>> SiteGraph::resolved_links(const SitePage& page) const
{
    std::vector<std::pair<CanonicalUrl, std::string>> out;
    std::set<CanonicalUrl> seen;
    for (auto const& link: page.links)
    {
        try
        {
            auto target = canonicalize_url(link.href, page.url);
            if (seen.insert(target).second)
                out.emplace_back(std::move(target), link.text);
        }
        catch (const InvalidUrl&)
        {
        }
    }
    return out;
}

std::string render_html(const SitePage& page)
{
    std::string html = "<html><body><p>" + escapeHtml(page.content) + "</p><ul>";
    for (auto const& link: page.links)
        html += "<li><a href=\"" + escapeHtml(link.href) + "\">" + escapeHtml(link.text) + "</a></li>";
    html += "</ul></body></html>";
    return html;
}

FetchResponse SiteFetcher::fetch(const CanonicalUrl& url)
{
    ++_fetches;
    auto const* page = _site.find(url);
    if (page == nullptr)
        throw FetchError("404 " + url.str());
    if (page->dead)
        throw FetchError("unreachable " + url.str());
    FetchResponse response;
    response.content_type = page->content_type;
    response.body = render_html(*page);
    for (auto const& link: page->links)
        response.outlinks.push_back(link.href);
    return response;
}

Observation SimulatedBrowserEnv::observe(const SitePage& page) const
{
    Observation obs;
    obs.url = page.url;
    obs.content = html_to_text(render_html(page));
    for (auto const& [target, text]: _site.resolved_links(page))
        obs.interactables.push_back({ target.str(), text });
    return obs;
}

Observation SimulatedBrowserEnv::reset(const CanonicalUrl& url)
{
    auto const* page = _site.find(url);
    if (page == nullptr || page->dead)
        throw EnvironmentFailure("cannot load " + url.str());
    _history.clear();
    _current = url;
    return observe(*page);
}

Observation SimulatedBrowserEnv::moveTo(std::string_view target)
{
    CanonicalUrl url;
    try
    {
        url = canonicalize_url(target, _current);
    }
    catch (const InvalidUrl& e)
    {
        return errorAt(_current, e.what());
    }
    auto const* page = _site.find(url);
    if (page == nullptr || page->dead)
        return errorAt(_current, "cannot load " + url.str());
    _history.push_back(_current);
    _current = url;
    return observe(*page);
}

Observation SimulatedBrowserEnv::apply(const Action& action)
{
    if (_current.empty())
        throw EnvironmentFailure("apply before reset");
    auto const* here = _site.find(_current);
    switch (action.kind)
    {
        case ActionKind::Visit: return moveTo(action.target.value_or(""));
        case ActionKind::Click:
        {
            auto const obs = observe(*here);
            for (auto const& item: obs.interactables)
                if (item.ref == action.target)
                    return moveTo(item.ref);
            return errorAt(_current, "no such element: " + action.target.value_or(""));
        }
        case ActionKind::Back:
        {
            if (_history.empty())
                return errorAt(_current, "no history");
            _current = _history.back();
            _history.pop_back();
            return observe(*_site.find(_current));
        }
        case ActionKind::Type:
        case ActionKind::Scroll:
        case ActionKind::Finish: return observe(*here);
    }
    return observe(*here);
}

} // namespace mango
