#include "privstruct/backends.hpp"

#include "privstruct/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

namespace privstruct {

using json = nlohmann::json;

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskCache::path_for(const std::string& backend_id,
                                          const std::string& key_material) const {
    std::string safe = backend_id;
    for (char& c : safe) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '-' && c != '.') {
            c = '_';
        }
    }
    return dir_ / safe / (text::fnv1a_hex(key_material) + ".txt");
}

std::optional<std::string> DiskCache::get(const std::string& backend_id,
                                          const std::string& key_material) const {
    const auto path = path_for(backend_id, key_material);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void DiskCache::put(const std::string& backend_id, const std::string& key_material,
                    const std::string& value) const {
    const auto path = path_for(backend_id, key_material);
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp." +
                     std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary);
        out << value;
    }
    std::filesystem::rename(tmp, path);
}

std::string HeuristicHeadingBackend::tag_chunk(const Chunk& chunk) {
    PolicyDocument doc;
    doc.policy_id = chunk.chunk_id.policy_id;
    doc.text = chunk.text;
    doc.size_bytes = chunk.text.size();
    std::string out;
    for (const auto& node : heuristic_headings(doc)) {
        const char* tag = node.level == HeadingLevel::Main ? "main" : "sub";
        out += "<" + std::string(tag) + ">" + node.text + "</" + tag + ">\n";
    }
    return out;
}

void MockHeadingBackend::script(const std::string& chunk_id, std::string tagged_text) {
    scripted_[chunk_id] = std::move(tagged_text);
}

std::string MockHeadingBackend::tag_chunk(const Chunk& chunk) {
    if (failures_remaining_ > 0) {
        --failures_remaining_;
        throw BackendError(chunk.chunk_id.str(), "mock backend scripted failure");
    }
    auto it = scripted_.find(chunk.chunk_id.str());
    return it == scripted_.end() ? std::string() : it->second;
}

namespace {

// POSTs the payload with the configured retry budget; throws BackendError
// (retryable, carries the chunk id) once the budget is exhausted.
std::string post_json(const RemoteConfig& config, const std::string& chunk_id,
                      const json& payload) {
    std::string last_error;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        httplib::Client client(config.base_url);
        client.set_connection_timeout(config.timeout_seconds, 0);
        client.set_read_timeout(config.timeout_seconds, 0);
        auto res = client.Post(config.path, payload.dump(), "application/json");
        if (res && res->status == 200) return res->body;
        last_error = res ? "HTTP " + std::to_string(res->status)
                         : "transport error: " + httplib::to_string(res.error());
    }
    throw BackendError(chunk_id, "backend request failed after " +
                                     std::to_string(config.max_retries + 1) +
                                     " attempts: " + last_error);
}

}  // namespace

RemoteHeadingBackend::RemoteHeadingBackend(RemoteConfig config)
    : config_(std::move(config)) {}

std::string RemoteHeadingBackend::id() const { return "remote:" + config_.base_url; }

std::string RemoteHeadingBackend::tag_chunk(const Chunk& chunk) {
    const json payload = {{"policy_id", chunk.chunk_id.policy_id},
                          {"chunk_id", chunk.chunk_id.str()},
                          {"text", chunk.text},
                          {"instructions", config_.instructions}};
    const std::string body = post_json(config_, chunk.chunk_id.str(), payload);
    try {
        return json::parse(body).at("tagged_text").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(chunk.chunk_id.str(),
                           std::string("bad heading backend response: ") + e.what());
    }
}

RemoteExtractionBackend::RemoteExtractionBackend(RemoteConfig config)
    : config_(std::move(config)) {}

std::string RemoteExtractionBackend::id() const { return "remote:" + config_.base_url; }

std::string RemoteExtractionBackend::extract(const Chunk& chunk) {
    const json payload = {{"chunk_id", chunk.chunk_id.str()},
                          {"text", chunk.text},
                          {"instructions", config_.instructions}};
    const std::string body = post_json(config_, chunk.chunk_id.str(), payload);
    try {
        return json::parse(body).at("tuples_text").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(chunk.chunk_id.str(),
                           std::string("bad extraction backend response: ") + e.what());
    }
}

RemoteClassifierBackend::RemoteClassifierBackend(RemoteConfig config)
    : config_(std::move(config)) {}

std::string RemoteClassifierBackend::id() const { return "remote:" + config_.base_url; }

ClassifierResult RemoteClassifierBackend::classify(const std::string& task,
                                                   const std::string& input, FeedMode mode) {
    const json payload = {{"task", task},
                          {"text", input},
                          {"mode", mode == FeedMode::Single ? "single" : "multiple"}};
    try {
        const std::string body = post_json(config_, task, payload);
        const json parsed = json::parse(body);
        return {parsed.at("label").get<std::string>(),
                parsed.value("confidence", 1.0), false};
    } catch (const std::exception&) {
        auto result = fallback_.classify(task, input, mode);
        result.fell_back_to_lexicon = true;
        return result;
    }
}

CachedHeadingBackend::CachedHeadingBackend(std::shared_ptr<HeadingBackend> inner,
                                           std::shared_ptr<DiskCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachedHeadingBackend::tag_chunk(const Chunk& chunk) {
    if (auto hit = cache_->get(inner_->id(), chunk.text)) return *hit;
    std::string result = inner_->tag_chunk(chunk);
    cache_->put(inner_->id(), chunk.text, result);
    return result;
}

CachedExtractionBackend::CachedExtractionBackend(std::shared_ptr<ExtractionBackend> inner,
                                                 std::shared_ptr<DiskCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachedExtractionBackend::extract(const Chunk& chunk) {
    if (auto hit = cache_->get(inner_->id(), chunk.text)) return *hit;
    std::string result = inner_->extract(chunk);
    cache_->put(inner_->id(), chunk.text, result);
    return result;
}

}  // namespace privstruct
