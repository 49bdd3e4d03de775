#include "privstruct/pipeline.hpp"

#include "privstruct/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace privstruct {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError("cannot open file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write file: " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line, section;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = text::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw PipelineError("bad config line (expected key = value): " + line);
        }
        std::string key = text::trim(t.substr(0, eq));
        std::string value = text::trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        entries[section.empty() ? key : section + "." + key] = value;
    }
    return entries;
}

void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value) {
    auto scope_from = [](const std::string& s) {
        if (s == "local") return DisclosureScope::LocalOnly;
        if (s == "global") return DisclosureScope::PlusGlobal;
        if (s == "floating") return DisclosureScope::PlusFloating;
        throw PipelineError("bad scope value: " + s);
    };
    if (key == "heading.backend") config.heading_backend.kind = value;
    else if (key == "heading.url") config.heading_backend.remote.base_url = value;
    else if (key == "heading.path") config.heading_backend.remote.path = value;
    else if (key == "heading.instructions") config.heading_backend.remote.instructions = value;
    else if (key == "heading.timeout") config.heading_backend.remote.timeout_seconds = std::stoi(value);
    else if (key == "heading.retries") config.heading_backend.remote.max_retries = std::stoi(value);
    else if (key == "extraction.backend") config.extraction_backend.kind = value;
    else if (key == "extraction.url") config.extraction_backend.remote.base_url = value;
    else if (key == "extraction.path") config.extraction_backend.remote.path = value;
    else if (key == "extraction.instructions") config.extraction_backend.remote.instructions = value;
    else if (key == "extraction.timeout") config.extraction_backend.remote.timeout_seconds = std::stoi(value);
    else if (key == "extraction.retries") config.extraction_backend.remote.max_retries = std::stoi(value);
    else if (key == "classifier.backend") config.classifier_backend.kind = value;
    else if (key == "classifier.url") config.classifier_backend.remote.base_url = value;
    else if (key == "classifier.path") config.classifier_backend.remote.path = value;
    else if (key == "classifier.feed") {
        config.feed_mode = value == "single" ? FeedMode::Single : FeedMode::Multiple;
    }
    else if (key == "chunk_budget") config.chunk_budget = std::stoul(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "scope") config.dilution_scope = scope_from(value);
    else if (key == "bins") config.n_bins = std::stoul(value);
    else if (key == "aug_fraction") config.aug_fraction = std::stod(value);
    else if (key == "beta") config.dpo_beta = std::stod(value);
    else if (key == "workers") config.workers = std::stoul(value);
    else if (key == "paths.corpus_dir") config.corpus_dir = value;
    else if (key == "paths.ds_dir") config.ds_dir = value;
    else if (key == "paths.mapping_table") config.mapping_table = value;
    else if (key == "paths.out_dir") config.out_dir = value;
    else if (key == "paths.cache_dir") config.cache_dir = value;
    else if (key == "paths.bench_reference") config.bench_reference = value;
    else throw PipelineError("unknown config key: " + key);
}

PipelineConfig config_from_file(const std::string& path) {
    PipelineConfig config;
    config.config_path = path;
    for (const auto& [key, value] : load_config_file(path)) {
        apply_config_entry(config, key, value);
    }
    if (const char* env = std::getenv("PRIVSTRUCT_CACHE_DIR")) config.cache_dir = env;
    return config;
}

LoadedCorpus load_corpus(const std::string& corpus_dir, const std::string& manifest_csv) {
    LoadedCorpus corpus;
    if (!fs::is_directory(corpus_dir)) {
        throw PipelineError("corpus directory not readable: " + corpus_dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".txt" || ext == ".html") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        const bool is_html = path.extension() == ".html";
        auto doc = sanitize(read_file(path), is_html, path.stem().string());
        corpus.documents.push_back(std::move(doc));
    }
    corpus.documents = dedup_by_content(corpus.documents);

    if (!manifest_csv.empty()) {
        std::ifstream in(manifest_csv);
        if (!in) throw PipelineError("cannot open manifest: " + manifest_csv);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (first && line.rfind("policy_id,", 0) == 0) {
                first = false;
                continue;
            }
            first = false;
            const auto fields = split_csv_row(line);
            if (fields.size() < 2) throw PipelineError("bad manifest row: " + line);
            ManifestEntry entry;
            entry.policy_id = fields[0];
            entry.app_id = fields[1];
            if (fields.size() > 2 && !fields[2].empty()) entry.downloads = std::stoull(fields[2]);
            if (fields.size() > 3) entry.category = fields[3];
            auto it = corpus.manifest.find(entry.policy_id);
            // One policy maps to its most downloaded app.
            if (it == corpus.manifest.end() || entry.downloads > it->second.downloads) {
                corpus.manifest[entry.policy_id] = entry;
            }
        }
    }
    for (auto& doc : corpus.documents) {
        auto it = corpus.manifest.find(doc.policy_id);
        if (it != corpus.manifest.end()) doc.app_refs.push_back(it->second.app_id);
    }
    return corpus;
}

namespace {

struct BackendSet {
    std::shared_ptr<HeadingBackend> heading;
    std::shared_ptr<ExtractionBackend> extraction;
    std::shared_ptr<ClassifierBackend> classifier;
};

BackendSet make_backends(const PipelineConfig& config) {
    BackendSet set;
    if (config.heading_backend.kind == "remote") {
        set.heading = std::make_shared<RemoteHeadingBackend>(config.heading_backend.remote);
    } else {
        set.heading = std::make_shared<HeuristicHeadingBackend>();
    }
    if (config.extraction_backend.kind == "remote") {
        set.extraction =
            std::make_shared<RemoteExtractionBackend>(config.extraction_backend.remote);
    } else {
        set.extraction = std::make_shared<HeuristicExtractionBackend>();
    }
    if (config.classifier_backend.kind == "remote") {
        set.classifier =
            std::make_shared<RemoteClassifierBackend>(config.classifier_backend.remote);
    } else {
        set.classifier = std::make_shared<LexiconClassifier>();
    }
    if (!config.cache_dir.empty()) {
        auto cache = std::make_shared<DiskCache>(config.cache_dir);
        set.heading = std::make_shared<CachedHeadingBackend>(set.heading, cache);
        set.extraction = std::make_shared<CachedExtractionBackend>(set.extraction, cache);
    }
    return set;
}

std::string cache_override(const PipelineConfig& config) {
    if (const char* env = std::getenv("PRIVSTRUCT_CACHE_DIR")) return env;
    return config.cache_dir;
}

// Runs fn(i) for i in [0, n) with at most `workers` concurrent tasks,
// collecting results in index order.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t next = 0;
    while (next < n) {
        const std::size_t batch = std::min(workers, n - next);
        std::vector<std::future<void>> futures;
        futures.reserve(batch);
        for (std::size_t k = 0; k < batch; ++k) {
            futures.push_back(std::async(std::launch::async, fn, next + k));
        }
        for (auto& f : futures) f.get();
        next += batch;
    }
}

std::string flags_string(const std::vector<FailureMode>& flags) {
    std::string out;
    for (const auto& f : flags) {
        if (!out.empty()) out += "|";
        switch (f) {
            case FailureMode::UniformLevels: out += "UniformLevels"; break;
            case FailureMode::SentenceAsHeading: out += "SentenceAsHeading"; break;
            case FailureMode::SparseHeadings: out += "SparseHeadings"; break;
        }
    }
    return out;
}

std::string scope_string(DisclosureScope scope) {
    switch (scope) {
        case DisclosureScope::LocalOnly: return "local";
        case DisclosureScope::PlusGlobal: return "global";
        default: return "floating";
    }
}

std::string strength_string(LinkStrength s) {
    switch (s) {
        case LinkStrength::Local: return "Local";
        case LinkStrength::Global: return "Global";
        default: return "Floating";
    }
}

json run_manifest(const PipelineConfig& config, const BackendSet& backends) {
    json manifest;
    manifest["config_hash"] = config.config_path.empty()
                                  ? text::fnv1a_hex("<inline>")
                                  : text::fnv1a_hex(read_file(config.config_path));
    manifest["backends"] = {{"heading", backends.heading->id()},
                            {"extraction", backends.extraction->id()},
                            {"classifier", backends.classifier->id()}};
    manifest["seed"] = config.seed;
    manifest["chunk_budget"] = config.chunk_budget;
    manifest["dilution_scope"] = scope_string(config.dilution_scope);
    manifest["dedup_rules"] = {
        {"mention_uniqueness", "case-fold, collapse whitespace, strip terminal punctuation"},
        {"heading_merge", "(offset, text) after chunk-relative re-anchoring"},
        {"item_average_statistic", "unweighted purpose-marginal mean per item"}};
    return manifest;
}

}  // namespace

ParseRunResult cmd_parse(const PipelineConfig& config) {
    auto corpus = load_corpus(config.corpus_dir);
    PipelineConfig effective = config;
    effective.cache_dir = cache_override(config);
    auto backends = make_backends(effective);

    ParseRunResult result;
    std::vector<std::optional<ParseRow>> rows(corpus.documents.size());
    std::vector<std::optional<PolicyFailure>> failures(corpus.documents.size());
    parallel_for(corpus.documents.size(), std::max<std::size_t>(1, config.workers),
                 [&](std::size_t i) {
        const auto& doc = corpus.documents[i];
        try {
            auto extracted = extract_headings(doc, *backends.heading, config.chunk_budget);
            const auto fitment = fitment_stats(extracted.tree, doc);
            ParseRow row;
            row.policy_id = doc.policy_id;
            row.heading_count = fitment.heading_count;
            row.median = fitment.median;
            row.iqr = fitment.iqr;
            row.flags = detect_failure_modes(extracted.tree, doc);
            rows[i] = std::move(row);
        } catch (const std::exception& e) {
            failures[i] = PolicyFailure{doc.policy_id, e.what()};
        }
    });
    for (auto& r : rows) {
        if (r) result.rows.push_back(std::move(*r));
    }
    for (auto& f : failures) {
        if (f) result.failures.push_back(std::move(*f));
    }

    if (!config.out_dir.empty()) {
        std::string csv = "policy_id,heading_count,median,iqr,flags\n";
        for (const auto& row : result.rows) {
            csv += row.policy_id + "," + std::to_string(row.heading_count) + "," +
                   fmt(row.median) + "," + fmt(row.iqr) + "," + flags_string(row.flags) +
                   "\n";
        }
        write_file(fs::path(config.out_dir) / "fitment.csv", csv);
        std::string fail_csv = "policy_id,reason\n";
        for (const auto& f : result.failures) {
            fail_csv += f.policy_id + "," + f.reason + "\n";
        }
        write_file(fs::path(config.out_dir) / "parse_failures.csv", fail_csv);
    }
    result.exit_code = (!corpus.documents.empty() && result.rows.empty()) ? 1 : 0;
    return result;
}

namespace {

struct PolicyAudit {
    std::string policy_id;
    HeadingTree tree;
    std::vector<ExtractionTuple> tuples;
    ThreeScopeDisclosure scopes;
    std::vector<DisclosureLink> local, global, floating;
    ProfileInput profile;
    MentionCounts mentions;
};

PolicyAudit audit_policy(const PolicyDocument& doc, const PipelineConfig& config,
                         const BackendSet& backends) {
    PolicyAudit audit;
    audit.policy_id = doc.policy_id;

    auto extracted = extract_headings(doc, *backends.heading, config.chunk_budget);
    audit.tree = std::move(extracted.tree);
    for (auto& node : audit.tree.nodes) {
        const auto feed = build_context_feed(node, audit.tree, config.chunk_budget);
        node.practice =
            classify_practice(feed, config.feed_mode, *backends.classifier).label;
        node.intention =
            classify_intention(feed, config.feed_mode, *backends.classifier).label;
    }
    for (auto& section : audit.tree.sections) {
        const std::string content =
            doc.text.substr(section.content_begin,
                            section.content_end - section.content_begin);
        if (text::trim(content).empty()) continue;
        const auto r = backends.classifier->classify("practice", content, FeedMode::Single);
        section.text_practice = practice_from_code(r.label_code);
    }

    for (const auto& c : chunk(doc, config.chunk_budget)) {
        auto extraction = extract_tuples(c, *backends.extraction, &audit.tree);
        for (auto& tuple : extraction.tuples) {
            if (!text::trim(tuple.data_excerpt).empty()) {
                tuple.item_label = classify_item(tuple.data_excerpt, *backends.classifier);
            }
            if (!text::trim(tuple.purpose_excerpt).empty()) {
                tuple.purpose_label =
                    classify_purpose(tuple.purpose_excerpt, *backends.classifier);
            }
            audit.tuples.push_back(std::move(tuple));
        }
    }

    audit.local = link_local(audit.tuples, audit.tree);
    audit.global = link_global(audit.tuples, audit.tree);
    audit.floating = link_floating(audit.tuples, audit.tree);
    audit.scopes = disclosure_sets(doc.policy_id, audit.local, audit.global,
                                   audit.floating, audit.tuples, audit.tree);
    audit.mentions = count_unique_mentions(audit.tuples);

    audit.profile.doc_length = doc.text.size();
    for (const auto& section : audit.tree.sections) {
        if (!section.text_practice) continue;
        PracticeLabel heading_label = PracticeLabel::IntroductoryGeneric;  // preamble
        if (section.heading_index) {
            const auto& node = audit.tree.nodes[*section.heading_index];
            if (!node.practice) continue;
            heading_label = *node.practice;
        }
        audit.profile.spans.push_back({section.content_begin, section.content_end,
                                       heading_label, *section.text_practice});
    }
    return audit;
}

}  // namespace

AuditRunResult cmd_audit(const PipelineConfig& config) {
    auto corpus = load_corpus(config.corpus_dir,
                              config.corpus_dir.empty()
                                  ? std::string()
                                  : (fs::path(config.corpus_dir) / "manifest.csv").string());
    PipelineConfig effective = config;
    effective.cache_dir = cache_override(config);
    auto backends = make_backends(effective);
    const CategoryMap category_map = config.mapping_table.empty()
                                         ? CategoryMap()
                                         : CategoryMap::from_csv(config.mapping_table);

    AuditRunResult result;
    std::vector<std::optional<PolicyAudit>> audits(corpus.documents.size());
    std::vector<std::optional<DataSafetyDeclaration>> declarations(corpus.documents.size());
    std::vector<std::optional<PolicyFailure>> failures(corpus.documents.size());

    parallel_for(corpus.documents.size(), std::max<std::size_t>(1, config.workers),
                 [&](std::size_t i) {
        const auto& doc = corpus.documents[i];
        try {
            auto manifest_it = corpus.manifest.find(doc.policy_id);
            if (manifest_it == corpus.manifest.end()) {
                failures[i] = PolicyFailure{doc.policy_id, "no manifest entry"};
                return;
            }
            const fs::path ds_path =
                fs::path(config.ds_dir) / (manifest_it->second.app_id + ".json");
            if (!fs::exists(ds_path)) {
                failures[i] = PolicyFailure{doc.policy_id,
                                            "missing data-safety file: " + ds_path.string()};
                return;
            }
            declarations[i] = parse_declaration_file(ds_path.string(), category_map);
            audits[i] = audit_policy(doc, config, backends);
        } catch (const std::exception& e) {
            failures[i] = PolicyFailure{doc.policy_id, e.what()};
        }
    });

    std::vector<PairOutcome> outcomes;
    std::map<std::pair<ItemLabel, PracticeLabel>, std::vector<DilutionMatrix>> dilution_inputs;
    std::string links_csv =
        "policy_id,practice,item,purpose,strength,data_excerpt,purpose_excerpt\n";
    std::vector<const PolicyAudit*> completed;
    for (std::size_t i = 0; i < audits.size(); ++i) {
        if (!audits[i]) continue;
        ++result.policies_audited;
        completed.push_back(&*audits[i]);
        const auto& audit = *audits[i];
        const auto& ds = *declarations[i];
        for (PracticeLabel practice :
             {PracticeLabel::FirstPartyCollection, PracticeLabel::ThirdPartySharing}) {
            for (DisclosureScope scope : {DisclosureScope::LocalOnly,
                                          DisclosureScope::PlusGlobal,
                                          DisclosureScope::PlusFloating}) {
                auto batch = pair_outcomes(audit.scopes.at(scope), ds, practice);
                outcomes.insert(outcomes.end(), batch.begin(), batch.end());
            }
            // Dilution at the configured scope.
            const auto& pp = audit.scopes.at(config.dilution_scope);
            const DeclarationMode mode = practice == PracticeLabel::FirstPartyCollection
                                             ? DeclarationMode::Collected
                                             : DeclarationMode::Shared;
            auto presence = pp.item_presence.find(practice);
            if (presence == pp.item_presence.end()) continue;
            static const std::set<PurposeLabel> kEmpty;
            for (ItemLabel item : presence->second) {
                const auto* declared = ds.purposes(mode, item);
                if (declared == nullptr) continue;
                const auto* stated = pp.purposes(practice, item);
                auto m = pair_dilution(stated ? *stated : kEmpty, *declared, item, practice);
                if (m) dilution_inputs[{item, practice}].push_back(normalize(*m));
            }
        }
        auto write_links = [&](const std::vector<DisclosureLink>& links) {
            for (const auto& l : links) {
                links_csv += audit.policy_id + "," + code(l.practice) + "," + code(l.item) +
                             "," + code(l.purpose) + "," + strength_string(l.strength) +
                             ",\"" + audit.tuples[l.data_tuple_index].data_excerpt +
                             "\",\"" + audit.tuples[l.purpose_tuple_index].purpose_excerpt +
                             "\"\n";
            }
        };
        write_links(audit.local);
        write_links(audit.global);
        write_links(audit.floating);
    }
    for (auto& f : failures) {
        if (f) result.failures.push_back(std::move(*f));
    }

    for (PracticeLabel practice :
         {PracticeLabel::FirstPartyCollection, PracticeLabel::ThirdPartySharing}) {
        for (DisclosureScope scope : {DisclosureScope::LocalOnly,
                                      DisclosureScope::PlusGlobal,
                                      DisclosureScope::PlusFloating}) {
            result.matrices[{practice, scope}] = aggregate(outcomes, practice, scope);
        }
    }

    if (!config.out_dir.empty()) {
        const fs::path out(config.out_dir);

        std::string matrix_csv = "practice,scope,purpose,item,p_wd,p_os,p_us,p_ne,n\n";
        for (const auto& [key, matrix] : result.matrices) {
            for (std::size_t i = 0; i < kPurposeCount; ++i) {
                for (std::size_t j = 0; j < kItemCount; ++j) {
                    const auto& cell = matrix.cells[i][j];
                    matrix_csv += code(key.first) + "," + scope_string(key.second) + "," +
                                  code(static_cast<PurposeLabel>(i)) + "," +
                                  code(static_cast<ItemLabel>(j)) + "," + fmt(cell.p_wd) +
                                  "," + fmt(cell.p_os) + "," + fmt(cell.p_us) + "," +
                                  fmt(cell.p_ne) + "," + std::to_string(cell.n) + "\n";
                }
            }
        }
        write_file(out / "compliance_matrix.csv", matrix_csv);
        write_file(out / "links.csv", links_csv);

        std::string dilution_csv =
            "item,practice,pp_purpose,ds_purpose,value,contributing_pairs\n";
        for (const auto& [key, inputs] : dilution_inputs) {
            const auto aggregated = aggregate_dilution(inputs);
            for (std::size_t x = 0; x < kDilutionRows; ++x) {
                for (std::size_t y = 0; y < kDilutionCols; ++y) {
                    dilution_csv += code(key.first) + "," + code(key.second) + "," +
                                    code(static_cast<PurposeLabel>(x)) + "," +
                                    code(static_cast<PurposeLabel>(y)) + "," +
                                    fmt(aggregated.values[x][y]) + "," +
                                    std::to_string(aggregated.contributing_pairs) + "\n";
                }
            }
        }
        write_file(out / "dilution.csv", dilution_csv);

        std::vector<ProfileInput> profile_inputs;
        for (const auto* audit : completed) profile_inputs.push_back(audit->profile);
        const auto profile = positional_profile(profile_inputs, config.n_bins);
        std::string profile_csv = "bin,label,mass_heading,mass_text\n";
        for (std::size_t bin = 0; bin < profile.n_bins; ++bin) {
            for (std::size_t c = 0; c < kPracticeCount; ++c) {
                profile_csv += std::to_string(bin) + "," +
                               code(static_cast<PracticeLabel>(c)) + "," +
                               fmt(profile.mass_heading[bin][c]) + "," +
                               fmt(profile.mass_text[bin][c]) + "\n";
            }
        }
        write_file(out / "positional_profile.csv", profile_csv);

        json report;
        report["policies_audited"] = result.policies_audited;
        report["failures"] = json::array();
        for (const auto& f : result.failures) {
            report["failures"].push_back({{"policy_id", f.policy_id}, {"reason", f.reason}});
        }
        std::vector<ItemLabel> all_items;
        for (std::size_t j = 0; j < kItemCount; ++j) {
            all_items.push_back(static_cast<ItemLabel>(j));
        }
        for (PracticeLabel practice :
             {PracticeLabel::FirstPartyCollection, PracticeLabel::ThirdPartySharing}) {
            const auto& base = result.matrices[{practice, DisclosureScope::LocalOnly}];
            const auto& plus_g = result.matrices[{practice, DisclosureScope::PlusGlobal}];
            const auto& plus_f = result.matrices[{practice, DisclosureScope::PlusFloating}];
            json block;
            bool any = false;
            for (std::size_t j = 0; j < kItemCount && !any; ++j) {
                any = base.cells[0][j].n > 0;
            }
            if (any) {
                const auto deltas = scope_deltas(base, plus_g, plus_f);
                const auto base_avg = item_averages(base, all_items);
                const auto delta_avg = item_averages(deltas.delta, all_items);
                const auto delta_prime_avg = item_averages(deltas.delta_prime, all_items);
                block["avg"] = {{"p_wd", base_avg.avg_wd}, {"p_os", base_avg.avg_os},
                                {"p_us", base_avg.avg_us}, {"p_ne", base_avg.avg_ne}};
                block["delta"] = {{"p_wd", delta_avg.avg_wd}, {"p_os", delta_avg.avg_os},
                                  {"p_us", delta_avg.avg_us}};
                block["delta_prime"] = {
                    {"p_wd", delta_prime_avg.avg_wd}, {"p_os", delta_prime_avg.avg_os},
                    {"p_us", delta_prime_avg.avg_us},
                    {"p_wd_relative_pct",
                     relative_change_percent(delta_prime_avg.avg_wd, base_avg.avg_wd)},
                    {"p_os_relative_pct",
                     relative_change_percent(delta_prime_avg.avg_os, base_avg.avg_os)},
                    {"p_us_relative_pct",
                     relative_change_percent(delta_prime_avg.avg_us, base_avg.avg_us)}};
                json sparse = json::array();
                for (ItemLabel item : base_avg.sparse_items) sparse.push_back(code(item));
                block["sparse_items"] = sparse;
            }
            report[code(practice)] = block;
        }
        write_file(out / "report.json", report.dump(2) + "\n");
        write_file(out / "run_manifest.json",
                   run_manifest(config, backends).dump(2) + "\n");
    }
    result.exit_code = 0;
    return result;
}

DpoRunResult cmd_dpo_build(const PipelineConfig& config, const std::string& teacher_dir,
                           const std::string& student_dir) {
    auto corpus = load_corpus(config.corpus_dir);
    std::vector<Chunk> chunks;
    std::vector<std::string> teacher_out, student_out;
    std::vector<std::string> orphans;
    for (const auto& doc : corpus.documents) {
        for (const auto& c : chunk(doc, config.chunk_budget)) {
            const std::string stem =
                c.chunk_id.policy_id + "." + std::to_string(c.chunk_id.ordinal) + ".txt";
            const fs::path teacher_path = fs::path(teacher_dir) / stem;
            const fs::path student_path = fs::path(student_dir) / stem;
            if (!fs::exists(teacher_path) || !fs::exists(student_path)) {
                orphans.push_back(c.chunk_id.str());
                continue;
            }
            chunks.push_back(c);
            teacher_out.push_back(read_file(teacher_path));
            student_out.push_back(read_file(student_path));
        }
    }
    if (!orphans.empty()) {
        std::string msg = "dpo-build: misaligned teacher/student outputs; orphan chunks:";
        for (const auto& id : orphans) msg += " " + id;
        throw PipelineError(msg);
    }

    DpoRunResult result;
    result.dataset = build_dataset(chunks, teacher_out, student_out, config.aug_fraction,
                                   config.seed,
                                   config.heading_backend.remote.instructions);
    result.dataset.beta = config.dpo_beta;
    if (result.dataset.chunk_count > 0) {
        result.mismatch_rate = static_cast<double>(result.dataset.mismatch_count) /
                               static_cast<double>(result.dataset.chunk_count);
    }
    if (result.dataset.mismatch_count > 0) {
        result.missed_heading_rate =
            static_cast<double>(result.dataset.missed_heading_count) /
            static_cast<double>(result.dataset.mismatch_count);
    }

    if (!config.out_dir.empty()) {
        const fs::path out(config.out_dir);
        write_file(out / "dpo_dataset.jsonl", to_jsonl(result.dataset));
        json summary = {{"chunks", result.dataset.chunk_count},
                        {"mismatched", result.dataset.mismatch_count},
                        {"mismatch_rate", result.mismatch_rate},
                        {"missed_heading", result.dataset.missed_heading_count},
                        {"missed_heading_rate", result.missed_heading_rate},
                        {"augmented", result.dataset.augmented_count},
                        {"pairs", result.dataset.pairs.size()},
                        {"beta", result.dataset.beta},
                        {"seed", config.seed}};
        write_file(out / "dpo_summary.json", summary.dump(2) + "\n");
    }
    return result;
}

BenchRunResult cmd_bench(const PipelineConfig& config) {
    auto corpus = load_corpus(config.corpus_dir);
    PipelineConfig effective = config;
    effective.cache_dir = cache_override(config);
    auto backends = make_backends(effective);

    std::map<std::string, bool> reference;  // policy_id -> processed by the reference tool
    if (!config.bench_reference.empty()) {
        std::ifstream in(config.bench_reference);
        if (!in) throw PipelineError("cannot open bench reference: " + config.bench_reference);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (first && line.rfind("policy_id,", 0) == 0) {
                first = false;
                continue;
            }
            first = false;
            const auto fields = split_csv_row(line);
            if (fields.empty()) continue;
            const bool ok = fields.size() < 2 || fields.back() != "fail";
            reference[fields[0]] = ok;
        }
    }

    BenchRunResult result;
    std::vector<std::optional<BenchRow>> rows(corpus.documents.size());
    parallel_for(corpus.documents.size(), std::max<std::size_t>(1, config.workers),
                 [&](std::size_t i) {
        const auto& doc = corpus.documents[i];
        try {
            auto audit = audit_policy(doc, config, backends);
            BenchRow row;
            row.policy_id = doc.policy_id;
            row.counts = audit.mentions;
            rows[i] = std::move(row);
        } catch (const std::exception&) {
            // excluded from averages, mirrors tool parse failures
        }
    });

    double items = 0.0, purposes = 0.0, categories = 0.0;
    for (auto& r : rows) {
        if (!r) continue;
        if (!reference.empty()) {
            auto it = reference.find(r->policy_id);
            r->in_reference = it != reference.end() && it->second;
        }
        result.rows.push_back(*r);
        if (r->in_reference) {
            items += static_cast<double>(r->counts.n_item_mentions);
            purposes += static_cast<double>(r->counts.n_purpose_mentions);
            categories += static_cast<double>(r->counts.n_purpose_categories);
            ++result.policies_compared;
        }
    }
    if (result.policies_compared > 0) {
        const auto n = static_cast<double>(result.policies_compared);
        result.avg_item_mentions = items / n;
        result.avg_purpose_mentions = purposes / n;
        result.avg_purpose_categories = categories / n;
    }

    if (!config.out_dir.empty()) {
        std::string csv =
            "policy_id,n_item_mentions,n_purpose_mentions,n_purpose_categories,in_reference\n";
        for (const auto& row : result.rows) {
            csv += row.policy_id + "," + std::to_string(row.counts.n_item_mentions) + "," +
                   std::to_string(row.counts.n_purpose_mentions) + "," +
                   std::to_string(row.counts.n_purpose_categories) + "," +
                   (row.in_reference ? "1" : "0") + "\n";
        }
        write_file(fs::path(config.out_dir) / "bench.csv", csv);
        json summary = {{"policies_compared", result.policies_compared},
                        {"avg_item_mentions", result.avg_item_mentions},
                        {"avg_purpose_mentions", result.avg_purpose_mentions},
                        {"avg_purpose_categories", result.avg_purpose_categories},
                        {"mention_dedup_rule",
                         "case-fold, collapse whitespace, strip terminal punctuation"}};
        write_file(fs::path(config.out_dir) / "bench_summary.json", summary.dump(2) + "\n");
    }
    return result;
}

int cmd_report(const std::string& out_dir) {
    const fs::path report_path = fs::path(out_dir) / "report.json";
    if (!fs::exists(report_path)) {
        std::fprintf(stderr, "no report.json under %s (run audit first)\n", out_dir.c_str());
        return 1;
    }
    const json report = json::parse(read_file(report_path));
    std::printf("policies audited: %llu\n",
                static_cast<unsigned long long>(report.value("policies_audited", 0)));
    for (const char* practice : {"c0", "c1"}) {
        if (!report.contains(practice) || report[practice].empty()) continue;
        const auto& block = report[practice];
        std::printf("%s avg: P_WD=%.3f P_OS=%.3f P_US=%.3f\n", practice,
                    block["avg"]["p_wd"].get<double>(), block["avg"]["p_os"].get<double>(),
                    block["avg"]["p_us"].get<double>());
        std::printf("%s delta': P_WD=%+.3f (%+.1f%%) P_OS=%+.3f (%+.1f%%)\n", practice,
                    block["delta_prime"]["p_wd"].get<double>(),
                    block["delta_prime"]["p_wd_relative_pct"].get<double>(),
                    block["delta_prime"]["p_os"].get<double>(),
                    block["delta_prime"]["p_os_relative_pct"].get<double>());
    }
    return 0;
}

}  // namespace privstruct
