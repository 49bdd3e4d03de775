#include "privstruct/dpo.hpp"

#include <doctest.h>

using namespace privstruct;

namespace {

HeadingNode node(std::string text, HeadingLevel level) {
    HeadingNode n;
    n.text = std::move(text);
    n.level = level;
    return n;
}

Chunk chunk_of(std::string text, std::size_t ordinal) {
    Chunk c;
    c.chunk_id = {"p", ordinal};
    c.text = std::move(text);
    c.char_end = c.text.size();
    return c;
}

}  // namespace

TEST_CASE("diff_extractions classifies mismatches in rule order") {
    auto a = node("Data We Collect", HeadingLevel::Main);
    auto b = node("Sharing", HeadingLevel::Sub);
    CHECK(diff_extractions({a, b}, {a, b}) == MismatchKind::Match);
    CHECK(diff_extractions({a}, {}) == MismatchKind::MissedHeading);
    // level flips alone are uniform-levels when the student flattens
    auto b_main = node("Sharing", HeadingLevel::Main);
    CHECK(diff_extractions({a, b}, {a, b_main}) == MismatchKind::UniformLevels);
    // a sentence-like student node
    auto sentence = node(
        "We respect your privacy and are committed to protecting it through our compliance.",
        HeadingLevel::Main);
    CHECK(diff_extractions({a, b}, {a, sentence, b}) == MismatchKind::SentenceAsHeading);
    // same texts, one level flip in a mixed student list
    auto c = node("Retention", HeadingLevel::Sub);
    auto c_main = node("Retention", HeadingLevel::Main);
    CHECK(diff_extractions({a, b, c}, {a, b, c_main}) == MismatchKind::Other);
    // normalization: case and spacing drift still match
    auto a_drift = node("data  we COLLECT", HeadingLevel::Main);
    CHECK(diff_extractions({a}, {a_drift}) == MismatchKind::Match);
}

TEST_CASE("first_non_heading_sentence skips heading text") {
    auto c = chunk_of("TITLE\nWe collect data. More text.", 0);
    CHECK(first_non_heading_sentence(c, {node("TITLE", HeadingLevel::Main)}) ==
          "We collect data.");
    auto only_heading = chunk_of("TITLE", 1);
    CHECK(first_non_heading_sentence(only_heading, {node("TITLE", HeadingLevel::Main)}) == "");
}

TEST_CASE("build_dataset pairs mismatched chunks and augments missed headings") {
    // 10 chunks: 3 match, 4 mismatch without missed headings, 3 MissedHeading.
    std::vector<Chunk> chunks;
    std::vector<std::string> teacher, student;
    for (int i = 0; i < 3; ++i) {
        chunks.push_back(chunk_of("Same Heading " + std::to_string(i) + "\nbody.", chunks.size()));
        teacher.push_back("<main>Same Heading " + std::to_string(i) + "</main>");
        student.push_back(teacher.back());
    }
    for (int i = 0; i < 4; ++i) {
        // teacher main+sub, student flattens to all-main: UniformLevels
        std::string a = "Alpha " + std::to_string(i), b = "Beta " + std::to_string(i);
        chunks.push_back(chunk_of(a + "\n" + b + "\nSome body sentence follows here.",
                                  chunks.size()));
        teacher.push_back("<main>" + a + "</main>\n<sub>" + b + "</sub>");
        student.push_back("<main>" + a + "</main>\n<main>" + b + "</main>");
    }
    for (int i = 0; i < 3; ++i) {
        std::string a = "Gamma " + std::to_string(i);
        chunks.push_back(chunk_of(a + "\nThe first body sentence. Another one.",
                                  chunks.size()));
        teacher.push_back("<main>" + a + "</main>");
        student.push_back("");
    }
    auto ds = build_dataset(chunks, teacher, student, 0.5, 99);
    CHECK(ds.chunk_count == 10);
    CHECK(ds.mismatch_count == 7);
    CHECK(ds.missed_heading_count == 3);
    CHECK(ds.augmented_count == 1);  // floor(0.5 * 3)
    CHECK(ds.pairs.size() == 8);
    int augmented = 0;
    for (const auto& p : ds.pairs) {
        CHECK(p.chosen != p.rejected);
        if (p.augmented) {
            ++augmented;
            CHECK(p.mismatch_kind == MismatchKind::MissedHeading);
            CHECK(p.rejected.find("<main>") == std::string::npos);
            CHECK(p.rejected.find("<sub>") == std::string::npos);
        }
    }
    CHECK(augmented == 1);
}

TEST_CASE("build_dataset yields nothing for all-match inputs") {
    std::vector<Chunk> chunks{chunk_of("Heading One\nbody.", 0)};
    std::vector<std::string> teacher{"<main>Heading One</main>"};
    auto ds = build_dataset(chunks, teacher, teacher, 0.5, 1);
    CHECK(ds.pairs.empty());
    CHECK(ds.mismatch_count == 0);
}

TEST_CASE("build_dataset is deterministic per seed") {
    std::vector<Chunk> chunks;
    std::vector<std::string> teacher, student;
    for (int i = 0; i < 8; ++i) {
        std::string h = "Heading " + std::to_string(i);
        chunks.push_back(chunk_of(h + "\nBody sentence " + std::to_string(i) + ". Tail.",
                                  chunks.size()));
        teacher.push_back("<main>" + h + "</main>");
        student.push_back("");
    }
    auto a = to_jsonl(build_dataset(chunks, teacher, student, 0.5, 7));
    auto b = to_jsonl(build_dataset(chunks, teacher, student, 0.5, 7));
    auto c = to_jsonl(build_dataset(chunks, teacher, student, 0.5, 8));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("build_dataset rejects misaligned inputs listing orphans") {
    std::vector<Chunk> chunks{chunk_of("Heading\nbody.", 0), chunk_of("More\nbody.", 1)};
    std::vector<std::string> teacher{"<main>Heading</main>"};
    std::vector<std::string> student{"", ""};
    CHECK_THROWS_AS(build_dataset(chunks, teacher, student, 0.5, 1), DpoError);
}

TEST_CASE("jsonl serialization carries the five keys per line") {
    std::vector<Chunk> chunks{chunk_of("Heading One\nA body sentence here.", 0)};
    std::vector<std::string> teacher{"<main>Heading One</main>"};
    std::vector<std::string> student{""};
    auto ds = build_dataset(chunks, teacher, student, 0.0, 1);
    auto jsonl = to_jsonl(ds);
    CHECK(jsonl.find("\"prompt\"") != std::string::npos);
    CHECK(jsonl.find("\"chosen\"") != std::string::npos);
    CHECK(jsonl.find("\"rejected\"") != std::string::npos);
    CHECK(jsonl.find("\"mismatch_kind\"") != std::string::npos);
    CHECK(jsonl.find("\"chunk_id\"") != std::string::npos);
    CHECK(jsonl.find("MissedHeading") != std::string::npos);
}
