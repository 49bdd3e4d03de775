#include "privstruct/backends.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

using namespace privstruct;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

Chunk chunk_of(std::string text, std::string policy = "p", std::size_t ordinal = 0) {
    Chunk c;
    c.chunk_id = {std::move(policy), ordinal};
    c.text = std::move(text);
    c.char_end = c.text.size();
    return c;
}

// In-process HTTP server for wire-contract round trips.
struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> h) {
        server.Post("/", std::move(h));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("privstruct_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("disk cache stores and retrieves by backend id and key") {
    TempDir dir;
    DiskCache cache(dir.path);
    CHECK_FALSE(cache.get("backend", "key").has_value());
    cache.put("backend", "key", "value");
    CHECK(cache.get("backend", "key") == std::string("value"));
    CHECK_FALSE(cache.get("other", "key").has_value());
    cache.put("http://host:1/x", "key", "v2");  // ids with separators are sanitized
    CHECK(cache.get("http://host:1/x", "key") == std::string("v2"));
}

TEST_CASE("heuristic heading backend emits tagged lines") {
    HeuristicHeadingBackend backend;
    auto tagged = backend.tag_chunk(chunk_of("WHAT WE COLLECT\nlowercase body text here.\n"));
    CHECK(tagged.find("<main>WHAT WE COLLECT</main>") != std::string::npos);
}

TEST_CASE("remote heading backend round-trips the wire contract") {
    std::atomic<int> hits{0};
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto body = json::parse(req.body);
        CHECK(body["policy_id"] == "p");
        CHECK(body["chunk_id"] == "p:0");
        CHECK(body["text"] == "Heading A\nbody text.");
        CHECK(body.contains("instructions"));
        res.set_content(json{{"tagged_text", "<main>Heading A</main>"}}.dump(),
                        "application/json");
    });
    RemoteConfig config;
    config.base_url = server.url();
    config.instructions = "tag the headings";
    RemoteHeadingBackend backend(config);
    CHECK(backend.tag_chunk(chunk_of("Heading A\nbody text.")) == "<main>Heading A</main>");
    CHECK(hits == 1);
}

TEST_CASE("remote heading backend retries then fails with the chunk id") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
    });
    RemoteConfig config;
    config.base_url = server.url();
    config.max_retries = 2;
    RemoteHeadingBackend backend(config);
    try {
        backend.tag_chunk(chunk_of("text", "pol", 3));
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.chunk_id() == "pol:3");
    }
}

TEST_CASE("remote heading backend succeeds within the retry budget") {
    std::atomic<int> hits{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++hits <= 2) {
            res.status = 503;
            return;
        }
        res.set_content(json{{"tagged_text", "ok"}}.dump(), "application/json");
    });
    RemoteConfig config;
    config.base_url = server.url();
    config.max_retries = 2;  // 3 attempts total
    RemoteHeadingBackend backend(config);
    CHECK(backend.tag_chunk(chunk_of("text")) == "ok");
    CHECK(hits == 3);
}

TEST_CASE("remote extraction backend round-trips tuples_text") {
    TestServer server([](const httplib::Request& req, httplib::Response& res) {
        auto body = json::parse(req.body);
        CHECK(body["chunk_id"] == "p:0");
        res.set_content(
            json{{"tuples_text", R"([{"data":"email","purpose":""}])"}}.dump(),
            "application/json");
    });
    RemoteConfig config;
    config.base_url = server.url();
    RemoteExtractionBackend backend(config);
    CHECK(backend.extract(chunk_of("email")) == R"([{"data":"email","purpose":""}])");
}

TEST_CASE("remote classifier round-trips and falls back to the lexicon") {
    TestServer server([](const httplib::Request& req, httplib::Response& res) {
        auto body = json::parse(req.body);
        CHECK(body["task"] == "purpose");
        CHECK(body["mode"] == "single");
        res.set_content(json{{"label", "p3"}, {"confidence", 0.93}}.dump(),
                        "application/json");
    });
    RemoteConfig config;
    config.base_url = server.url();
    RemoteClassifierBackend backend(config);
    auto r = backend.classify("purpose", "to serve ads", FeedMode::Single);
    CHECK(r.label_code == "p3");
    CHECK(r.confidence == doctest::Approx(0.93));
    CHECK_FALSE(r.fell_back_to_lexicon);

    RemoteConfig dead;
    dead.base_url = "http://127.0.0.1:1";  // nothing listens here
    dead.max_retries = 0;
    dead.timeout_seconds = 1;
    RemoteClassifierBackend fallback(dead);
    auto f = fallback.classify("purpose", "app analytics", FeedMode::Single);
    CHECK(f.fell_back_to_lexicon);
    CHECK(f.label_code == "p0");
}

TEST_CASE("cached backends consult the cache before the inner backend") {
    TempDir dir;
    auto cache = std::make_shared<DiskCache>(dir.path);
    auto mock = std::make_shared<MockHeadingBackend>();
    mock->script("p:0", "<main>Cached Heading</main>");
    CachedHeadingBackend cached(mock, cache);
    auto chunk0 = chunk_of("Cached Heading\nbody");
    CHECK(cached.tag_chunk(chunk0) == "<main>Cached Heading</main>");
    // inner backend now fails; the cache must still answer
    mock->fail_times(100);
    CHECK(cached.tag_chunk(chunk0) == "<main>Cached Heading</main>");
}
