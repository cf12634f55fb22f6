// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <mango/errors.hpp>
#include <mango/live_adapters.hpp>
#include <mango/prompts.hpp>

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

namespace mango::live
{
namespace
{

    // Loopback HTTP server on an ephemeral port, stopped on destruction.
    class LoopbackServer
    {
      public:
        httplib::Server server;

        void start()
        {
            _port = server.bind_to_any_port("127.0.0.1");
            ASSERT_GT(_port, 0);
            _thread = std::thread([this] { server.listen_after_bind(); });
            server.wait_until_ready();
        }

        ~LoopbackServer()
        {
            server.stop();
            if (_thread.joinable())
                _thread.join();
        }

        [[nodiscard]] std::string base() const { return "http://127.0.0.1:" + std::to_string(_port); }
        [[nodiscard]] CanonicalUrl url(const std::string& path) const { return CanonicalUrl::parse(base() + path); }

      private:
        int _port = 0;
        std::thread _thread;
    };

    void serveSite(httplib::Server& s)
    {
        s.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"(<html><body><h1>Home</h1><a href="/a">Alpha page</a> <a href="b">Beta</a> <a href="/a">dup</a></body></html>)",
                            "text/html; charset=utf-8");
        });
        s.Get("/a", [](const httplib::Request&, httplib::Response& res) { res.set_content("<p>alpha body</p><a href='/'>home</a>", "text/html"); });
        s.Get("/b", [](const httplib::Request&, httplib::Response& res) { res.set_content("<p>beta body</p>", "text/html"); });
        s.Get("/old", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/a"); });
        s.Get("/img.png", [](const httplib::Request&, httplib::Response& res) { res.set_content("PNG", "image/png"); });
    }

    TEST(LiveFetcher, FetchesFollowsRedirectsAndReportsErrors)
    {
        LoopbackServer srv;
        serveSite(srv.server);
        srv.start();
        LiveFetcher fetcher;
        auto const home = fetcher.fetch(srv.url("/"));
        EXPECT_TRUE(home.content_type.starts_with("text/html"));
        EXPECT_EQ(home.outlinks, (std::vector<std::string> { "/a", "b", "/a" }));
        auto const moved = fetcher.fetch(srv.url("/old"));
        EXPECT_NE(moved.body.find("alpha body"), std::string::npos);
        auto const png = fetcher.fetch(srv.url("/img.png"));
        EXPECT_EQ(png.content_type, "image/png");
        EXPECT_TRUE(png.outlinks.empty());
        EXPECT_THROW(fetcher.fetch(srv.url("/missing")), FetchError);
    }

    TEST(LiveFetcher, CrawlsALoopbackSite)
    {
        LoopbackServer srv;
        serveSite(srv.server);
        srv.start();
        LiveFetcher fetcher;
        auto const result = crawl(CrawlConfig { .root_url = srv.url("/") }, fetcher);
        EXPECT_EQ(result.pages.size(), 3u);
    }

    TEST(LiveFetcher, UnreachableHostIsFetchError)
    {
        LiveFetcher fetcher(HttpOptions { .timeout = std::chrono::milliseconds(500) });
        EXPECT_THROW(fetcher.fetch(CanonicalUrl::parse("http://127.0.0.1:1/")), FetchError);
    }

    TEST(LiveSearchClient, PassesParametersAndParsesArray)
    {
        LoopbackServer srv;
        std::string seenQuery;
        srv.server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
            seenQuery = req.get_param_value("q") + "|" + req.get_param_value("site") + "|" + req.get_param_value("k");
            res.set_content(R"(["https://d.example/x", "https://d.example/y"])", "application/json");
        });
        srv.server.Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
        srv.start();
        LiveSearchClient client(srv.base() + "/search");
        EXPECT_EQ(client.search("pool hours", "d.example", 5), (std::vector<std::string> { "https://d.example/x", "https://d.example/y" }));
        EXPECT_EQ(seenQuery, "pool hours|d.example|5");
        LiveSearchClient broken(srv.base() + "/broken");
        EXPECT_THROW(broken.search("x", "d.example", 5), SearchUnavailable);
        LiveSearchClient missing(srv.base() + "/nope");
        EXPECT_THROW(missing.search("x", "d.example", 5), SearchUnavailable);
    }

    // Chat endpoint replying with the next canned message; records requests.
    struct FakeModel
    {
        LoopbackServer srv;
        std::vector<std::string> replies;
        std::vector<nlohmann::json> requests;
        std::string authorization;

        FakeModel()
        {
            srv.server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
                requests.push_back(nlohmann::json::parse(req.body));
                authorization = req.get_header_value("Authorization");
                auto const i = std::min(requests.size() - 1, replies.size() - 1);
                nlohmann::json body { { "choices", { { { "message", { { "role", "assistant" }, { "content", replies[i] } } } } } } };
                res.set_content(body.dump(), "application/json");
            });
            srv.start();
        }

        ChatClient client() { return ChatClient(ChatOptions { .base_url = srv.base() + "/v1", .api_key = "sk-test", .model = "m1" }); }
    };

    TEST(ChatClient, SendsDeterministicRequest)
    {
        FakeModel model;
        model.replies = { "hello" };
        auto chat = model.client();
        EXPECT_EQ(chat.complete("sys", "usr"), "hello");
        ASSERT_EQ(model.requests.size(), 1u);
        auto const& req = model.requests[0];
        EXPECT_EQ(req.at("model"), "m1");
        EXPECT_EQ(req.at("temperature"), 0);
        EXPECT_EQ(req.at("messages")[0].at("content"), "sys");
        EXPECT_EQ(req.at("messages")[1].at("content"), "usr");
        EXPECT_EQ(model.authorization, "Bearer sk-test");
    }

    TEST(ChatClient, HttpErrorsAreAdapterFailures)
    {
        LoopbackServer srv;
        srv.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("oops", "text/plain");
        });
        srv.start();
        ChatClient chat(ChatOptions { .base_url = srv.base() + "/v1", .api_key = "", .model = "m" });
        EXPECT_THROW(chat.complete("s", "u"), AdapterFailure);
    }

    TEST(LlmAdapters, AgentAndReflectorParseModelReplies)
    {
        FakeModel model;
        model.replies = { "Sure:\n```json\n{\"kind\": \"click\", \"target\": \"https://d.example/a\"}\n```",
                          "{\"kind\": \"finish\"}",
                          "{\"status\": \"feasible\", \"reason\": \"close\"}",
                          "pool hours" };
        auto chat = model.client();
        LlmAgent agent(chat);
        auto const start = CanonicalUrl::parse("https://d.example/");
        Trajectory t { .start_url = start, .steps = { { Action::visit(start), Observation { .url = start, .content = "home" } } } };
        Query const q("When does the pool open?");
        EXPECT_EQ(agent.decide(q, start, {}, t, t.steps[0].observation), Action::click("https://d.example/a"));
        auto const system = model.requests[0].at("messages")[0].at("content").get<std::string>();
        EXPECT_NE(system.find("When does the pool open?"), std::string::npos);
        EXPECT_NE(system.find("Root URL: https://d.example\n"), std::string::npos);
        EXPECT_EQ(system.find("{USER_QUERY}"), std::string::npos);

        auto const invalid = agent.decide(q, start, {}, t, t.steps[0].observation);
        EXPECT_THROW(invalid.validate(), std::invalid_argument);

        LlmReflector reflector(chat);
        auto const verdict = parse_verdict(reflector.judge_exhausted(q, t), VerdictFamily::Exhausted);
        EXPECT_EQ(verdict.status, ReflectionStatus::Feasible);
        EXPECT_EQ(model.requests[2].at("messages")[0].at("content"), std::string(prompts::kReflectionExhausted));

        LlmKeywordAdapter keywords(chat);
        EXPECT_EQ(generate_search_keywords(q, keywords), "pool hours");
    }

    TEST(LlmAdapters, GarbageReplyIsAgentFailure)
    {
        FakeModel model;
        model.replies = { "I cannot decide." };
        auto chat = model.client();
        LlmAgent agent(chat);
        auto const start = CanonicalUrl::parse("https://d.example/");
        Trajectory t { .start_url = start, .steps = {} };
        EXPECT_THROW(agent.decide(Query("q"), start, {}, t, Observation { .url = start }), AgentFailure);
    }

    TEST(ExtractJsonObject, StripsFencesAndProse)
    {
        EXPECT_EQ(nlohmann::json::parse(extract_json_object("x {\"a\": {\"b\": \"}\"}} y")), nlohmann::json({ { "a", { { "b", "}" } } } }));
        EXPECT_EQ(extract_json_object("no object here"), "no object here");
    }

    TEST(HttpBrowserEnv, NavigatesWithHistory)
    {
        LoopbackServer srv;
        serveSite(srv.server);
        srv.start();
        HttpBrowserEnv env;
        auto const home = env.reset(srv.url("/"));
        ASSERT_EQ(home.interactables.size(), 2u);
        EXPECT_EQ(home.interactables[0].ref, srv.url("/a").str());
        EXPECT_EQ(home.interactables[0].text, "Alpha page");
        auto const a = env.apply(Action::click(home.interactables[0].ref));
        EXPECT_NE(a.content.find("alpha body"), std::string::npos);
        auto const missing = env.apply(Action::visit(srv.url("/missing")));
        EXPECT_TRUE(missing.error.has_value());
        EXPECT_EQ(missing.url, srv.url("/a"));
        auto const back = env.apply(Action::back());
        EXPECT_EQ(back.url, srv.url("/"));
        EXPECT_TRUE(env.apply(Action::back()).error.has_value());
        EXPECT_THROW(env.reset(srv.url("/missing")), EnvironmentFailure);
    }

} // namespace
} // namespace mango::live
