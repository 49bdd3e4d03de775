#pragma once

#include "privstruct/extract.hpp"
#include "privstruct/headings.hpp"
#include "privstruct/taxonomy.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace privstruct {

struct RemoteConfig {
    std::string base_url;       // e.g. http://127.0.0.1:8080
    std::string path = "/";
    std::string instructions;   // config-supplied prompt text
    int timeout_seconds = 30;
    int max_retries = 2;        // attempts = 1 + max_retries
};

/// Response cache keyed by (backend id, payload hash); safe for concurrent
/// readers, per-key writes go through a temp file + rename.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& backend_id,
                                   const std::string& key_material) const;
    void put(const std::string& backend_id, const std::string& key_material,
             const std::string& value) const;

private:
    std::filesystem::path dir_;
    std::filesystem::path path_for(const std::string& backend_id,
                                   const std::string& key_material) const;
};

/// Wraps heuristic_headings as a backend, emitting <main>/<sub> tagged lines.
class HeuristicHeadingBackend : public HeadingBackend {
public:
    std::string tag_chunk(const Chunk& chunk) override;
    std::string id() const override { return "heuristic"; }
};

/// Test double: scripted tagged output per chunk_id, optional failure budget.
class MockHeadingBackend : public HeadingBackend {
public:
    void script(const std::string& chunk_id, std::string tagged_text);
    void fail_times(int n) { failures_remaining_ = n; }
    std::string tag_chunk(const Chunk& chunk) override;
    std::string id() const override { return "mock"; }

private:
    std::map<std::string, std::string> scripted_;
    int failures_remaining_ = 0;
};

// POST {policy_id, chunk_id, text, instructions} -> {tagged_text}.
class RemoteHeadingBackend : public HeadingBackend {
public:
    explicit RemoteHeadingBackend(RemoteConfig config);
    std::string tag_chunk(const Chunk& chunk) override;
    std::string id() const override;

private:
    RemoteConfig config_;
};

// POST {chunk_id, text, instructions} -> {tuples_text}.
class RemoteExtractionBackend : public ExtractionBackend {
public:
    explicit RemoteExtractionBackend(RemoteConfig config);
    std::string extract(const Chunk& chunk) override;
    std::string id() const override;

private:
    RemoteConfig config_;
};

// POST {task, text, mode} -> {label, confidence}. Transport failure after the
// retry budget falls back to the lexicon baseline with the fallback flag set.
class RemoteClassifierBackend : public ClassifierBackend {
public:
    explicit RemoteClassifierBackend(RemoteConfig config);
    ClassifierResult classify(const std::string& task, const std::string& input,
                              FeedMode mode) override;
    std::string id() const override;

private:
    RemoteConfig config_;
    LexiconClassifier fallback_;
};

/// Adds disk caching around any heading backend.
class CachedHeadingBackend : public HeadingBackend {
public:
    CachedHeadingBackend(std::shared_ptr<HeadingBackend> inner, std::shared_ptr<DiskCache> cache);
    std::string tag_chunk(const Chunk& chunk) override;
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<HeadingBackend> inner_;
    std::shared_ptr<DiskCache> cache_;
};

class CachedExtractionBackend : public ExtractionBackend {
public:
    CachedExtractionBackend(std::shared_ptr<ExtractionBackend> inner,
                            std::shared_ptr<DiskCache> cache);
    std::string extract(const Chunk& chunk) override;
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<ExtractionBackend> inner_;
    std::shared_ptr<DiskCache> cache_;
};

}  // namespace privstruct
