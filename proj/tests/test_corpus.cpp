#include "privstruct/corpus.hpp"
#include "privstruct/text.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace privstruct;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PolicyDocument doc_of(std::string text, std::string id = "p") {
    PolicyDocument d;
    d.policy_id = std::move(id);
    d.size_bytes = text.size();
    d.text = std::move(text);
    return d;
}

std::string reassemble(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) out += c.text;
    return out;
}

}  // namespace

TEST_CASE("sanitize strips a single tag") {
    auto d = sanitize("<p>Hello</p>", true);
    CHECK(d.text == "Hello");
    CHECK(d.size_bytes == 5);
}

TEST_CASE("sanitize is identity on plain text") {
    auto d = sanitize("Hello", false);
    CHECK(d.text == "Hello");
}

TEST_CASE("sanitize collapses spaces but keeps line breaks") {
    auto d = sanitize("a   b\nc", false);
    CHECK(d.text == "a b\nc");
    CHECK(d.size_bytes == d.text.size());
}

TEST_CASE("sanitize rejects invalid utf-8 naming the offset") {
    std::string bad = "ok";
    bad += static_cast<char>(0xFF);
    try {
        sanitize(bad, false);
        FAIL("expected Utf8Error");
    } catch (const text::Utf8Error& e) {
        CHECK(e.offset() == 2);
    }
}

TEST_CASE("sanitize matches the hand-flattened html fixture") {
    auto d = sanitize(slurp(std::string(FIXTURES_DIR) + "/policy_nested.html"), true);
    CHECK(d.text == slurp(std::string(FIXTURES_DIR) + "/policy_nested.golden.txt"));
}

TEST_CASE("chunk keeps an under-budget doc whole") {
    auto chunks = chunk(doc_of("one two three four five six seven eight nine ten"), 512);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].token_end - chunks[0].token_begin == 10);
}

TEST_CASE("chunk on empty text is empty") {
    CHECK(chunk(doc_of("")).empty());
}

TEST_CASE("chunk prefers the blank line then re-splits the oversized tail") {
    std::string t;
    for (int i = 0; i < 1024; ++i) {
        t += "tok" + std::to_string(i);
        t += (i == 499) ? "\n\n" : " ";
    }
    t.pop_back();
    auto doc = doc_of(t);
    auto chunks = chunk(doc, 512);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].token_end - chunks[0].token_begin == 500);
    CHECK(chunks[1].token_end - chunks[1].token_begin == 512);
    CHECK(chunks[2].token_end - chunks[2].token_begin == 12);
    CHECK(reassemble(chunks) == doc.text);
}

TEST_CASE("chunk prefers sentence ends over plain token boundaries") {
    std::string t;
    for (int i = 0; i < 600; ++i) {
        t += "w";
        t += (i == 479) ? ". " : " ";
    }
    t.pop_back();
    auto doc = doc_of(t);
    auto chunks = chunk(doc, 512);
    REQUIRE(chunks.size() >= 2);
    CHECK(chunks[0].token_end - chunks[0].token_begin == 480);
    CHECK(reassemble(chunks) == doc.text);
}

TEST_CASE("chunk round-trip and budget over random documents") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> n_tokens(0, 1500);
    std::uniform_int_distribution<int> tok_len(1, 8);
    std::uniform_int_distribution<int> gap(0, 9);
    std::uniform_int_distribution<char> letter('a', 'z');
    for (int iter = 0; iter < 500; ++iter) {
        std::string t;
        const int n = n_tokens(rng);
        for (int i = 0; i < n; ++i) {
            const int len = tok_len(rng);
            for (int k = 0; k < len; ++k) t += letter(rng);
            switch (gap(rng)) {
                case 0: t += ".\n\n"; break;
                case 1: t += "\n"; break;
                case 2: t += ". "; break;
                case 3: t += "  "; break;
                default: t += " "; break;
            }
        }
        auto doc = doc_of(t, "r" + std::to_string(iter));
        auto chunks = chunk(doc, 512);
        CHECK(reassemble(chunks) == doc.text);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            CHECK(text::count_tokens(chunks[i].text) <= 512);
            CHECK(chunks[i].chunk_id.ordinal == i);
        }
    }
}

TEST_CASE("size_filter keeps strictly-under documents in order") {
    std::vector<PolicyDocument> corpus;
    corpus.push_back(doc_of(std::string(10 * 1024, 'a'), "a"));
    corpus.push_back(doc_of(std::string(51097, 'b'), "b"));  // 49.9KB
    corpus.push_back(doc_of(std::string(50 * 1024, 'c'), "c"));
    auto kept = size_filter(corpus, 50.0);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].policy_id == "a");
    CHECK(kept[1].policy_id == "b");
}

TEST_CASE("size_filter is identity when everything is small") {
    std::vector<PolicyDocument> corpus{doc_of("x", "a"), doc_of("y", "b")};
    CHECK(size_filter(corpus).size() == 2);
}

namespace {
std::vector<PolicyDocument> bucketed_corpus(std::size_t per_bucket_population) {
    std::vector<PolicyDocument> corpus;
    for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t i = 0; i < per_bucket_population; ++i) {
            const std::size_t size = k * 10240 + 100 + i;
            char id[32];
            std::snprintf(id, sizeof(id), "b%zu_%04zu", k, i);
            corpus.push_back(doc_of(std::string(size, 'x'), id));
        }
    }
    return corpus;
}
}  // namespace

TEST_CASE("stratified_sample draws 150 per bucket for 750 total") {
    auto corpus = bucketed_corpus(200);
    auto sample = stratified_sample(corpus, 10.0, 150, 7);
    CHECK(sample.size() == 750);
    for (std::size_t i = 1; i < sample.size(); ++i) {
        CHECK(sample[i - 1].policy_id < sample[i].policy_id);
    }
}

TEST_CASE("stratified_sample exhaustive draw returns every document") {
    auto corpus = bucketed_corpus(20);
    auto sample = stratified_sample(corpus, 10.0, 20, 3);
    CHECK(sample.size() == corpus.size());
}

TEST_CASE("stratified_sample is deterministic and seed-sensitive") {
    auto corpus = bucketed_corpus(60);
    auto a = stratified_sample(corpus, 10.0, 30, 11);
    auto b = stratified_sample(corpus, 10.0, 30, 11);
    auto c = stratified_sample(corpus, 10.0, 30, 12);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].policy_id == b[i].policy_id);
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) {
        differs = a[i].policy_id != c[i].policy_id;
    }
    CHECK(differs);
}

TEST_CASE("stratified_sample names the undersized bucket") {
    auto corpus = bucketed_corpus(10);
    try {
        stratified_sample(corpus, 10.0, 20, 1);
        FAIL("expected CorpusError");
    } catch (const CorpusError& e) {
        CHECK(std::string(e.what()).find("10") != std::string::npos);
    }
}

TEST_CASE("stratified_split preserves stratification") {
    auto corpus = bucketed_corpus(150);
    auto sample = stratified_sample(corpus, 10.0, 150, 5);
    auto split = stratified_split(sample, 10.0, 15, 5);
    CHECK(split.train.size() == 675);
    CHECK(split.test.size() == 75);
}

TEST_CASE("dedup_by_content keeps the first of identical texts") {
    std::vector<PolicyDocument> corpus{doc_of("same", "a"), doc_of("same", "b"),
                                       doc_of("other", "c")};
    auto out = dedup_by_content(corpus);
    REQUIRE(out.size() == 2);
    CHECK(out[0].policy_id == "a");
    CHECK(out[1].policy_id == "c");
}
