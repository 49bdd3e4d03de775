#include "privstruct/corpus.hpp"
#include "privstruct/extract.hpp"

#include <doctest.h>

using namespace privstruct;

namespace {

Chunk chunk_of(std::string text, std::string policy = "p", std::size_t ordinal = 0) {
    Chunk c;
    c.chunk_id = {std::move(policy), ordinal};
    c.char_begin = 0;
    c.char_end = text.size();
    c.text = std::move(text);
    return c;
}

class ScriptedExtraction : public ExtractionBackend {
public:
    explicit ScriptedExtraction(std::string out) : out_(std::move(out)) {}
    std::string extract(const Chunk&) override { return out_; }
    std::string id() const override { return "scripted"; }

private:
    std::string out_;
};

ExtractionTuple tuple_of(std::string data, std::string purpose) {
    ExtractionTuple t;
    t.data_excerpt = std::move(data);
    t.purpose_excerpt = std::move(purpose);
    return t;
}

}  // namespace

TEST_CASE("parse_tuple_output accepts a one-tuple array") {
    auto tuples = parse_tuple_output(R"([{"data":"email","purpose":"analytics"}])");
    REQUIRE(tuples.size() == 1);
    CHECK(tuples[0].data_excerpt == "email");
    CHECK(tuples[0].purpose_excerpt == "analytics");
}

TEST_CASE("parse_tuple_output drops both-empty tuples") {
    CHECK(parse_tuple_output(R"([{"data":"","purpose":""}])").empty());
}

TEST_CASE("parse_tuple_output keeps isolated tuples of either kind") {
    auto tuples = parse_tuple_output(
        R"([{"data":"device IDs","purpose":""},{"data":"","purpose":"app analytics"}])");
    REQUIRE(tuples.size() == 2);
    CHECK(tuples[0].purpose_excerpt.empty());
    CHECK(tuples[1].data_excerpt.empty());
}

TEST_CASE("parse_tuple_output ignores unknown keys") {
    auto tuples = parse_tuple_output(R"([{"data":"email","purpose":"","confidence":0.9}])");
    CHECK(tuples.size() == 1);
}

TEST_CASE("parse_tuple_output rejects malformed input with a byte offset") {
    CHECK_THROWS_AS(parse_tuple_output(R"({"data":"email"})"), TupleParseError);
    CHECK_THROWS_AS(parse_tuple_output(R"([{"data":42,"purpose":""}])"), TupleParseError);
    CHECK_THROWS_AS(parse_tuple_output("[{"), TupleParseError);
}

TEST_CASE("extract_tuples keeps grounded excerpts and drops hallucinations") {
    auto c = chunk_of("We collect your Email   Address for analytics purposes.");
    ScriptedExtraction backend(
        R"([{"data":"email address","purpose":"analytics"},)"
        R"({"data":"social security number","purpose":""}])");
    auto r = extract_tuples(c, backend);
    REQUIRE(r.tuples.size() == 1);
    CHECK(r.tuples[0].data_excerpt == "email address");
    REQUIRE(r.dropped_excerpts.size() == 1);
    CHECK(r.dropped_excerpts[0] == "social security number");
}

TEST_CASE("extract_tuples round-trips a scripted backend") {
    auto c = chunk_of("name and account management");
    ScriptedExtraction backend(R"([{"data":"name","purpose":"account management"}])");
    auto r = extract_tuples(c, backend);
    REQUIRE(r.tuples.size() == 1);
    CHECK(r.tuples[0].chunk_id.str() == "p:0");
}

TEST_CASE("count_unique_mentions dedupes by normalized string") {
    std::vector<ExtractionTuple> tuples{tuple_of("Email", ""), tuple_of("email ", ""),
                                        tuple_of("name", "")};
    auto counts = count_unique_mentions(tuples);
    CHECK(counts.n_item_mentions == 2);
    CHECK(counts.n_purpose_mentions == 0);
}

TEST_CASE("count_unique_mentions of an empty list is zero") {
    auto counts = count_unique_mentions({});
    CHECK(counts.n_item_mentions == 0);
    CHECK(counts.n_purpose_mentions == 0);
    CHECK(counts.n_purpose_categories == 0);
}

TEST_CASE("count_unique_mentions counts purpose categories from labels") {
    std::vector<ExtractionTuple> tuples;
    const char* items[] = {"name", "email",  "location", "contacts", "calendar",
                           "age",  "gender", "photos",   "videos"};
    for (const char* d : items) tuples.push_back(tuple_of(d, ""));
    const char* purposes[] = {"analytics", "ads", "marketing", "support"};
    const PurposeLabel labels[] = {PurposeLabel::AppAnalytics,
                                   PurposeLabel::AdvertisingMarketing,
                                   PurposeLabel::AdvertisingMarketing,
                                   PurposeLabel::DeveloperCommunication};
    for (std::size_t i = 0; i < 4; ++i) {
        auto t = tuple_of("", purposes[i]);
        t.purpose_label = labels[i];
        tuples.push_back(t);
    }
    auto counts = count_unique_mentions(tuples);
    CHECK(counts.n_item_mentions == 9);
    CHECK(counts.n_purpose_mentions == 4);
    CHECK(counts.n_purpose_categories == 3);
}

TEST_CASE("count_unique_mentions is idempotent under duplication") {
    std::vector<ExtractionTuple> tuples{tuple_of("email", "analytics"),
                                        tuple_of("location", "")};
    auto doubled = tuples;
    doubled.insert(doubled.end(), tuples.begin(), tuples.end());
    auto a = count_unique_mentions(tuples);
    auto b = count_unique_mentions(doubled);
    CHECK(a.n_item_mentions == b.n_item_mentions);
    CHECK(a.n_purpose_mentions == b.n_purpose_mentions);
    CHECK(a.n_purpose_categories == b.n_purpose_categories);
}

TEST_CASE("heuristic extraction finds the item and the purpose clause") {
    auto c = chunk_of("We collect your name to manage your account");
    HeuristicExtractionBackend backend;
    auto tuples = parse_tuple_output(backend.extract(c));
    REQUIRE(tuples.size() == 1);
    CHECK(tuples[0].data_excerpt == "your name");
    CHECK(tuples[0].purpose_excerpt == "manage your account");
}

TEST_CASE("heuristic extraction emits isolated purposes") {
    auto c = chunk_of("This helps with analytics and advertising.");
    HeuristicExtractionBackend backend;
    auto tuples = parse_tuple_output(backend.extract(c));
    REQUIRE(tuples.size() >= 1);
    CHECK(tuples[0].data_excerpt.empty());
    CHECK_FALSE(tuples[0].purpose_excerpt.empty());
}

TEST_CASE("heuristic extraction output is always grounded") {
    auto c = chunk_of(
        "We collect your email address and location data to provide the service. "
        "We never collect your contacts. Analytics partners receive usage data.");
    HeuristicExtractionBackend backend;
    auto r = extract_tuples(c, backend);
    CHECK(r.dropped_excerpts.empty());
    CHECK_FALSE(r.tuples.empty());
}
