#include "privstruct/compliance.hpp"
#include "privstruct/corpus.hpp"
#include "privstruct/taxonomy.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

std::string synthetic_policy(std::size_t paragraphs, std::uint64_t seed) {
    static const char* words[] = {"we",     "collect", "your",    "email",  "address",
                                  "and",    "location", "data",   "to",     "provide",
                                  "the",    "service",  "share",  "with",   "partners",
                                  "for",    "analytics", "please", "contact", "us"};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
    std::string text;
    for (std::size_t p = 0; p < paragraphs; ++p) {
        text += "Section " + std::to_string(p + 1) + "\n";
        for (std::size_t s = 0; s < 4; ++s) {
            for (std::size_t w = 0; w < 18; ++w) {
                text += words[pick(rng)];
                text += ' ';
            }
            text.back() = '.';
            text += ' ';
        }
        text += "\n\n";
    }
    return text;
}

void BM_Chunker(benchmark::State& state) {
    privstruct::PolicyDocument doc;
    doc.policy_id = "bench";
    doc.text = synthetic_policy(static_cast<std::size_t>(state.range(0)), 7);
    doc.size_bytes = doc.text.size();
    for (auto _ : state) {
        auto chunks = privstruct::chunk(doc, 512);
        benchmark::DoNotOptimize(chunks);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(doc.text.size()));
}
BENCHMARK(BM_Chunker)->Arg(16)->Arg(128)->Arg(1024);

void BM_LexiconClassifier(benchmark::State& state) {
    privstruct::LexiconClassifier classifier;
    const std::string feed =
        "[CLS] How we share your information with third parties [SEP] "
        "What information do we collect | Contact us [SEP]";
    for (auto _ : state) {
        auto r = classifier.classify("practice", feed, privstruct::FeedMode::Multiple);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_LexiconClassifier);

void BM_Aggregate(benchmark::State& state) {
    std::vector<privstruct::PairOutcome> outcomes;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> item(0, privstruct::kItemCount - 1);
    std::uniform_int_distribution<int> outcome(0, 3);
    const auto policies = static_cast<std::size_t>(state.range(0));
    for (std::size_t p = 0; p < policies; ++p) {
        const auto j = static_cast<privstruct::ItemLabel>(item(rng));
        for (std::size_t i = 0; i < privstruct::kPurposeCount; ++i) {
            outcomes.push_back({"policy" + std::to_string(p),
                                privstruct::PracticeLabel::FirstPartyCollection, j,
                                static_cast<privstruct::PurposeLabel>(i),
                                static_cast<privstruct::PurposeOutcome>(outcome(rng)),
                                privstruct::DisclosureScope::LocalOnly});
        }
    }
    for (auto _ : state) {
        auto m = privstruct::aggregate(outcomes,
                                       privstruct::PracticeLabel::FirstPartyCollection,
                                       privstruct::DisclosureScope::LocalOnly);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_Aggregate)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
