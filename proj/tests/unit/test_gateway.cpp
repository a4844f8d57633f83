#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "egoscript/gateway/gateway.h"
#include "egoscript/gateway/stub_backend.h"

using namespace egoscript;

namespace {

/// Fails the first `failures` sends, then answers "ok".
class FlakyTransport : public Transport {
public:
    explicit FlakyTransport(int failures, bool timeout = false) : failures_(failures), timeout_(timeout) {}
    std::string send(const BackendConfig&, const std::optional<std::string>&, std::string_view,
                     const Json&) override {
        ++calls;
        if (calls <= failures_) {
            if (timeout_) throw TimeoutError("slow");
            throw TransportError("down");
        }
        return "ok";
    }
    std::atomic<int> calls{0};

private:
    int failures_;
    bool timeout_;
};

BackendConfig text_cfg(std::string url = "stub://") {
    BackendConfig c;
    c.kind = BackendKind::Text;
    c.endpoint_url = std::move(url);
    return c;
}

/// Local JSON backend on an ephemeral port.
class FakeBackend {
public:
    FakeBackend() {
        server_.Post("/v1/complete", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = Json::parse(req.body);
            Json reply{{"output", Json{{"echo", body["input"]["schema_id"]},
                                       {"auth", req.get_header_value("Authorization")},
                                       {"model", body["model"]}}
                                      .dump()}};
            res.set_content(reply.dump(), "application/json");
        });
        server_.Post("/v1/image", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            res.set_content(R"({"output": "img-000000000000"})", "application/json");
        });
        server_.Post("/v1/video", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"output": "job-1"})", "application/json");
        });
        server_.Post("/v1/poll", [this](const httplib::Request&, httplib::Response& res) {
            const int n = ++polls;
            Json out = n < 3 ? Json{{"status", "pending"}} : Json{{"status", "done"}, {"video", "vid-1"}};
            res.set_content(Json{{"output", out.dump()}}.dump(), "application/json");
        });
        server_.Post("/v1/analyze", [](const httplib::Request&, httplib::Response& res) {
            res.status = 400;
            res.set_content("bad request", "text/plain");
        });
        server_.Post("/v1/alignment", [](const httplib::Request&, httplib::Response& res) {
            res.status = 503;
        });
        port = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeBackend() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }

    int port = 0;
    std::atomic<int> polls{0};

private:
    httplib::Server server_;
    std::thread thread_;
};

}  // namespace

// =============================================================================
// Configuration and retries
// =============================================================================

TEST_CASE("backend config ranges") {
    auto c = text_cfg();
    CHECK(validate_backend_config(c).empty());
    c.timeout_s = 0;
    c.max_retries = 11;
    c.max_concurrency = 0;
    CHECK(validate_backend_config(c).size() == 3);
    CHECK_THROWS_AS(BackendClient{c}, ConfigError);
}

TEST_CASE("unsupported endpoint scheme") {
    CHECK_THROWS_AS(BackendClient{text_cfg("ftp://x")}, ConfigError);
}

TEST_CASE("transient failures are retried up to max_retries") {
    auto t = std::make_shared<FlakyTransport>(2);
    BackendClient c(text_cfg(), t);
    CHECK(c.complete_structured({"p", schema_id::kStep1, Json::object(), std::nullopt}) == "ok");
    CHECK(t->calls == 3);
}

TEST_CASE("exhausted retries rethrow with the attempt count") {
    auto t = std::make_shared<FlakyTransport>(10, true);
    BackendClient c(text_cfg(), t);
    try {
        c.complete_structured({"p", schema_id::kStep1, Json::object(), std::nullopt});
        FAIL("expected a timeout");
    } catch (const TimeoutError& e) {
        CHECK(e.attempts() == 3);
    }
    CHECK(t->calls == 3);
}

TEST_CASE("missing credential fails before any call") {
    auto t = std::make_shared<FlakyTransport>(0);
    auto cfg = text_cfg();
    cfg.auth_env_var = "EGOSCRIPT_TEST_UNSET_TOKEN";
    ::unsetenv(cfg.auth_env_var.c_str());
    BackendClient c(cfg, t);
    CHECK_THROWS_AS(c.complete_structured({"p", schema_id::kStep1, Json::object(), std::nullopt}), ConfigError);
    CHECK(t->calls == 0);
}

TEST_CASE("operations are checked against the backend kind") {
    BackendClient text(text_cfg());
    CHECK_THROWS_AS(text.generate_image("a kitchen"), ConfigError);
    CHECK_THROWS_AS(text.complete_structured({"p", "no_such_schema", Json::object(), std::nullopt}), InputError);
}

// =============================================================================
// Stub backend
// =============================================================================

TEST_CASE("stub media calls are deterministic") {
    Gateway g;
    const auto img = g.image().generate_image("A kitchen with a pan.");
    CHECK(img == g.image().generate_image("A kitchen with a pan."));
    CHECK(img.rfind("img-", 0) == 0);
    CHECK_THROWS_AS(g.image().generate_image(""), InputError);

    const std::vector<std::string> prompts{"a", "b", "c", "d"};
    const auto job = g.video().generate_video(img, prompts);
    const auto st = g.video().poll_job(job);
    CHECK(st.state == JobStatus::State::Done);
    CHECK(st.video_handle.rfind("vid-", 0) == 0);
    CHECK_THROWS_AS(g.video().generate_video(img, std::vector<std::string>{"a", "b"}), InputError);
}

TEST_CASE("stub VLM rejects corrupt handles") {
    Gateway g;
    CHECK_THROWS_AS(g.vlm().analyze_video("vid-nothex", "prompt"), InputError);
}

TEST_CASE("judge requires vlm outputs") {
    Gateway g;
    CHECK_THROWS_AS(g.judge().judge(Json{{"script_context", Json::object()}}), InputError);
}

TEST_CASE("stub options parse from the URL") {
    const auto o = parse_stub_options("stub://?malformed=2&onset=9.5&alignment=0.3&over_alert=1");
    CHECK(o.malformed == 2);
    CHECK(o.onset == 9.5);
    CHECK(o.alignment == doctest::Approx(0.3));
    CHECK(o.over_alert == true);
    CHECK_FALSE(o.fail);
}

TEST_CASE("failing stub surfaces a transport error after retries") {
    BackendConfig c;
    c.kind = BackendKind::Image;
    c.endpoint_url = "stub://?fail=1";
    BackendClient client(c);
    try {
        client.generate_image("x");
        FAIL("expected failure");
    } catch (const TransportError& e) {
        CHECK(e.attempts() == 3);
    }
}

// =============================================================================
// HTTP transport
// =============================================================================

TEST_CASE("HTTP transport round trip with bearer credential") {
    FakeBackend backend;
    ::setenv("EGOSCRIPT_TEST_TOKEN", "s3cret", 1);
    auto cfg = text_cfg(backend.url());
    cfg.auth_env_var = "EGOSCRIPT_TEST_TOKEN";
    cfg.model_name = "text-model";
    BackendClient c(cfg);
    const auto out = Json::parse(c.complete_structured({"p", schema_id::kStep2, Json::object(), std::nullopt}));
    CHECK(out["echo"] == schema_id::kStep2);
    CHECK(out["auth"] == "Bearer s3cret");
    CHECK(out["model"] == "text-model");
}

TEST_CASE("HTTP read timeout becomes TimeoutError") {
    FakeBackend backend;
    BackendConfig cfg;
    cfg.kind = BackendKind::Image;
    cfg.endpoint_url = backend.url();
    cfg.timeout_s = 0.2;
    cfg.max_retries = 0;
    BackendClient c(cfg);
    CHECK_THROWS_AS(c.generate_image("a kitchen"), TimeoutError);
}

TEST_CASE("HTTP pending job is polled until done") {
    FakeBackend backend;
    BackendConfig cfg;
    cfg.kind = BackendKind::Video;
    cfg.endpoint_url = backend.url();
    BackendClient c(cfg);
    CHECK(c.poll_job("job-1").state == JobStatus::State::Pending);
    CHECK(c.poll_job("job-1").state == JobStatus::State::Pending);
    const auto done = c.poll_job("job-1");
    CHECK(done.state == JobStatus::State::Done);
    CHECK(done.video_handle == "vid-1");
}

TEST_CASE("HTTP 4xx is not retried, 5xx is") {
    FakeBackend backend;
    BackendConfig cfg;
    cfg.kind = BackendKind::Vlm;
    cfg.endpoint_url = backend.url();
    BackendClient c(cfg);
    CHECK_THROWS_AS(c.analyze_video("vid-1", "p"), InputError);
    try {
        c.rate_alignment("vid-1", std::vector<std::string>{"a", "b", "c", "d"});
        FAIL("expected failure");
    } catch (const TransportError& e) {
        CHECK(e.attempts() == 3);
    }
}

TEST_CASE("unreachable endpoint fails after three attempts") {
    auto cfg = text_cfg("http://127.0.0.1:1/v1");
    cfg.timeout_s = 0.5;
    BackendClient c(cfg);
    try {
        c.complete_structured({"p", schema_id::kStep1, Json::object(), std::nullopt});
        FAIL("expected failure");
    } catch (const TransportError& e) {
        CHECK(e.attempts() == 3);
    }
}
