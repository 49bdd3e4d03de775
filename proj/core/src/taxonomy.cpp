#include "privstruct/taxonomy.hpp"

#include "privstruct/headings.hpp"
#include "privstruct/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace privstruct {

namespace {

constexpr std::array<std::string_view, kPracticeCount> kPracticeNames = {
    "First Party Collection/Use", "Third Party Sharing", "User Choice/Control",
    "User Access, Edit and Deletion", "Introductory/Generic", "Policy Change",
    "Data Security", "International and Specific Audience", "Practice Not Covered",
    "Data Retention", "Privacy Contact Information", "Do Not Track"};

constexpr std::array<std::string_view, kIntentionCount> kIntentionNames = {
    "What", "Why", "How-Collected", "How-Used", "When", "Other"};

constexpr std::array<std::string_view, kItemCount> kItemNames = {
    "Name", "Email", "User account", "Address", "Phone", "Race/Ethnicity",
    "Political/Religious", "Gender", "Financial", "Location",
    "Search and Browsing history", "SMS/Messages/Call log", "Photos/Videos",
    "Audio/Music", "Health/Fitness", "Contacts", "Calendar",
    "App performance/App Activity", "Device identifier", "Files/Documents",
    "Other Personal", "Generic information", "Negatives"};

constexpr std::array<std::string_view, kPurposeCount> kPurposeNames = {
    "App Analytics", "Developer communication",
    "Fraud prevention / security and compliance", "Advertising or marketing",
    "Personalisation", "Account management", "App functionality", "Other"};

template <typename Enum>
std::optional<Enum> from_code_impl(std::string_view s, char prefix, std::size_t count) {
    if (s.size() < 2 || s[0] != prefix) return std::nullopt;
    std::size_t value = 0;
    for (char c : s.substr(1)) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    if (value >= count) return std::nullopt;
    return static_cast<Enum>(value);
}

}  // namespace

std::string_view to_string(PracticeLabel l) { return kPracticeNames[static_cast<std::size_t>(l)]; }
std::string_view to_string(IntentionLabel l) { return kIntentionNames[static_cast<std::size_t>(l)]; }
std::string_view to_string(ItemLabel l) { return kItemNames[static_cast<std::size_t>(l)]; }
std::string_view to_string(PurposeLabel l) { return kPurposeNames[static_cast<std::size_t>(l)]; }

std::string code(PracticeLabel l) { return "c" + std::to_string(static_cast<int>(l)); }
std::string code(IntentionLabel l) { return "i" + std::to_string(static_cast<int>(l)); }
std::string code(ItemLabel l) { return "d" + std::to_string(static_cast<int>(l)); }
std::string code(PurposeLabel l) { return "p" + std::to_string(static_cast<int>(l)); }

std::optional<PracticeLabel> practice_from_code(std::string_view s) {
    return from_code_impl<PracticeLabel>(s, 'c', kPracticeCount);
}
std::optional<IntentionLabel> intention_from_code(std::string_view s) {
    return from_code_impl<IntentionLabel>(s, 'i', kIntentionCount);
}
std::optional<ItemLabel> item_from_code(std::string_view s) {
    return from_code_impl<ItemLabel>(s, 'd', kItemCount);
}
std::optional<PurposeLabel> purpose_from_code(std::string_view s) {
    return from_code_impl<PurposeLabel>(s, 'p', kPurposeCount);
}

std::string ContextFeed::target() const {
    const std::size_t cls = text.find("[CLS]");
    const std::size_t sep = text.find("[SEP]");
    if (cls == std::string::npos || sep == std::string::npos || sep < cls) return text;
    return text::trim(std::string_view(text).substr(cls + 5, sep - cls - 5));
}

std::string ContextFeed::context() const {
    const std::size_t sep1 = text.find("[SEP]");
    if (sep1 == std::string::npos) return {};
    const std::size_t sep2 = text.find("[SEP]", sep1 + 5);
    if (sep2 == std::string::npos) return {};
    return text::trim(std::string_view(text).substr(sep1 + 5, sep2 - sep1 - 5));
}

ContextFeed build_context_feed(const HeadingNode& target, const HeadingTree& tree,
                               std::size_t budget_tokens) {
    auto assemble = [](const std::string& tgt, const std::vector<std::string>& ctx) {
        std::string joined;
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            if (i > 0) joined += " | ";
            joined += ctx[i];
        }
        return "[CLS] " + tgt + " [SEP] " + joined + " [SEP]";
    };

    std::size_t target_index = tree.nodes.size();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].char_offset == target.char_offset &&
            tree.nodes[i].text == target.text) {
            target_index = i;
            break;
        }
    }
    if (target_index == tree.nodes.size()) {
        throw TaxonomyError("build_context_feed: target heading not in tree");
    }

    ContextFeed feed;
    std::string target_text = text::trim(target.text);
    feed.text = assemble(target_text, {});
    if (text::count_tokens(feed.text) > budget_tokens) {
        // Target alone busts the budget: keep as many target tokens as fit.
        const auto tokens = text::tokenize(target_text);
        std::string truncated;
        for (const auto& t : tokens) {
            std::string next = truncated.empty()
                                   ? std::string(target_text.substr(t.begin, t.end - t.begin))
                                   : truncated + " " +
                                         std::string(target_text.substr(t.begin, t.end - t.begin));
            if (text::count_tokens(assemble(next, {})) > budget_tokens) break;
            truncated = std::move(next);
        }
        feed.text = assemble(truncated, {});
        feed.truncated = true;
        feed.token_count = text::count_tokens(feed.text);
        return feed;
    }

    std::vector<std::string> context;
    for (std::size_t step = 1;; ++step) {
        bool advanced = false;
        // Alternate next-after then previous-before at each widening step.
        const std::size_t after = target_index + step;
        if (after < tree.nodes.size()) {
            auto candidate = context;
            candidate.push_back(text::trim(tree.nodes[after].text));
            if (text::count_tokens(assemble(target_text, candidate)) > budget_tokens) break;
            context = std::move(candidate);
            advanced = true;
        }
        if (target_index >= step) {
            auto candidate = context;
            candidate.push_back(text::trim(tree.nodes[target_index - step].text));
            if (text::count_tokens(assemble(target_text, candidate)) > budget_tokens) break;
            context = std::move(candidate);
            advanced = true;
        }
        if (!advanced) break;
    }
    feed.text = assemble(target_text, context);
    feed.token_count = text::count_tokens(feed.text);
    return feed;
}

namespace {

std::vector<LexiconRule> default_practice_table() {
    // Priority mirrors the label order: c0 beats c1 beats c2, ...
    return {
        {"collect", "c0", 0}, {"what information", "c0", 0}, {"information we", "c0", 0},
        {"gather", "c0", 0}, {"how we use", "c0", 0}, {"use of your", "c0", 0},
        {"share", "c1", 1}, {"third party", "c1", 1}, {"third-party", "c1", 1},
        {"disclose", "c1", 1}, {"sharing", "c1", 1},
        {"your choices", "c2", 2}, {"opt-out", "c2", 2}, {"opt out", "c2", 2},
        {"control", "c2", 2}, {"preferences", "c2", 2}, {"consent", "c2", 2},
        {"access", "c3", 3}, {"edit", "c3", 3}, {"delete", "c3", 3},
        {"deletion", "c3", 3}, {"correct", "c3", 3},
        {"introduction", "c4", 4}, {"overview", "c4", 4}, {"welcome", "c4", 4},
        {"about this policy", "c4", 4}, {"scope", "c4", 4},
        {"changes to", "c5", 5}, {"policy change", "c5", 5}, {"updates to", "c5", 5},
        {"amendments", "c5", 5},
        {"security", "c6", 6}, {"protect", "c6", 6}, {"safeguard", "c6", 6},
        {"international", "c7", 7}, {"children", "c7", 7}, {"gdpr", "c7", 7},
        {"california", "c7", 7}, {"european", "c7", 7}, {"transfers", "c7", 7},
        {"retention", "c9", 9}, {"retain", "c9", 9}, {"how long", "c9", 9},
        {"storage period", "c9", 9},
        {"contact us", "c10", 10}, {"contact information", "c10", 10},
        {"questions", "c10", 10}, {"reach us", "c10", 10},
        {"do not track", "c11", 11}, {"do-not-track", "c11", 11},
    };
}

std::vector<LexiconRule> default_intention_table() {
    // '^'-prefixed patterns anchor at the start of the normalized input.
    return {
        {"^what", "i0", 0}, {"information we collect", "i0", 0},
        {"^why", "i1", 1}, {"purpose", "i1", 1},
        {"how we collect", "i2", 2}, {"how do we collect", "i2", 2},
        {"how information is collected", "i2", 2},
        {"how we use", "i3", 3}, {"how do we use", "i3", 3},
        {"how we share", "i3", 3}, {"how your information is used", "i3", 3},
        {"^when", "i4", 4}, {"retention period", "i4", 4}, {"how long", "i4", 4},
    };
}

std::vector<LexiconRule> default_item_table() {
    // Negation phrasing outranks every item keyword.
    return {
        {"we do not collect", "d22", -1}, {"we never collect", "d22", -1},
        {"do not collect", "d22", -1}, {"never collect", "d22", -1},
        {"we do not share", "d22", -1},
        {"email", "d1", 1},
        {"phone", "d4", 4}, {"telephone", "d4", 4},
        {"gps", "d9", 9}, {"location", "d9", 9}, {"geolocation", "d9", 9},
        {"advertising id", "d18", 18}, {"imei", "d18", 18}, {"device id", "d18", 18},
        {"device identifier", "d18", 18}, {"android id", "d18", 18},
        {"username", "d2", 2}, {"user account", "d2", 2}, {"account", "d2", 2},
        {"user id", "d2", 2},
        {"ip address", "d18", 18},
        {"postal address", "d3", 3}, {"mailing address", "d3", 3},
        {"home address", "d3", 3}, {"street address", "d3", 3},
        {"name", "d0", 0},
        {"race", "d5", 5}, {"ethnicity", "d5", 5},
        {"political", "d6", 6}, {"religio", "d6", 6},
        {"gender", "d7", 7}, {"sexual orientation", "d7", 7},
        {"financial", "d8", 8}, {"payment", "d8", 8}, {"credit card", "d8", 8},
        {"purchase", "d8", 8}, {"billing", "d8", 8},
        {"browsing history", "d10", 10}, {"search history", "d10", 10},
        {"search queries", "d10", 10},
        {"sms", "d11", 11}, {"text messages", "d11", 11}, {"call log", "d11", 11},
        {"messages", "d11", 11},
        {"photo", "d12", 12}, {"video", "d12", 12}, {"camera", "d12", 12},
        {"audio", "d13", 13}, {"music", "d13", 13}, {"microphone", "d13", 13},
        {"voice recording", "d13", 13},
        {"health", "d14", 14}, {"fitness", "d14", 14},
        {"contacts", "d15", 15}, {"address book", "d15", 15},
        {"calendar", "d16", 16},
        {"app activity", "d17", 17}, {"app performance", "d17", 17},
        {"crash log", "d17", 17}, {"diagnostic", "d17", 17}, {"usage data", "d17", 17},
        {"app interactions", "d17", 17},
        {"files", "d19", 19}, {"documents", "d19", 19},
        {"personal information", "d20", 20}, {"personal data", "d20", 20},
        {"date of birth", "d20", 20}, {"age", "d20", 20},
    };
}

std::vector<LexiconRule> default_purpose_table() {
    return {
        {"analytics", "p0", 0}, {"usage statistics", "p0", 0}, {"measure", "p0", 0},
        {"contact you", "p1", 1}, {"support", "p1", 1}, {"communicate with you", "p1", 1},
        {"respond to", "p1", 1}, {"developer communication", "p1", 1},
        {"fraud", "p2", 2}, {"security", "p2", 2}, {"compliance", "p2", 2},
        {"legal obligation", "p2", 2}, {"abuse", "p2", 2},
        {"advertis", "p3", 3}, {"marketing", "p3", 3}, {"ads", "p3", 3},
        {"promotional", "p3", 3},
        {"personali", "p4", 4}, {"customise", "p4", 4}, {"customize", "p4", 4},
        {"tailor", "p4", 4}, {"recommendations", "p4", 4},
        {"account", "p5", 5}, {"registration", "p5", 5}, {"authentication", "p5", 5},
        {"provide the service", "p6", 6}, {"functionality", "p6", 6},
        {"operate the app", "p6", 6}, {"provide our services", "p6", 6},
        {"deliver the service", "p6", 6}, {"provide you", "p6", 6},
    };
}

std::string fallback_label(const std::string& task) {
    if (task == "practice") return "c8";
    if (task == "intention") return "i5";
    if (task == "item") return "d21";
    if (task == "purpose") return "p7";
    throw TaxonomyError("unknown classifier task: " + task);
}

}  // namespace

const std::vector<LexiconRule>& default_lexicon(const std::string& task) {
    static const std::vector<LexiconRule> practice = default_practice_table();
    static const std::vector<LexiconRule> intention = default_intention_table();
    static const std::vector<LexiconRule> item = default_item_table();
    static const std::vector<LexiconRule> purpose = default_purpose_table();
    if (task == "practice") return practice;
    if (task == "intention") return intention;
    if (task == "item") return item;
    if (task == "purpose") return purpose;
    throw TaxonomyError("unknown classifier task: " + task);
}

LexiconClassifier::LexiconClassifier()
    : practice_(default_practice_table()),
      intention_(default_intention_table()),
      item_(default_item_table()),
      purpose_(default_purpose_table()) {}

std::vector<LexiconRule>& LexiconClassifier::table_for(const std::string& task) {
    if (task == "practice") return practice_;
    if (task == "intention") return intention_;
    if (task == "item") return item_;
    if (task == "purpose") return purpose_;
    throw TaxonomyError("unknown classifier task: " + task);
}

void LexiconClassifier::set_table(const std::string& task, std::vector<LexiconRule> rules) {
    table_for(task) = std::move(rules);
}

void LexiconClassifier::load_table(const std::string& task, const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw TaxonomyError("cannot open lexicon table: " + csv_path);
    std::vector<LexiconRule> rules;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("pattern,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::stringstream ss(line);
        LexiconRule rule;
        std::string priority;
        if (!std::getline(ss, rule.pattern, ',') || !std::getline(ss, rule.label_code, ',') ||
            !std::getline(ss, priority)) {
            throw TaxonomyError("bad lexicon row in " + csv_path + ": " + line);
        }
        rule.priority = std::stoi(priority);
        rules.push_back(std::move(rule));
    }
    set_table(task, std::move(rules));
}

namespace {

// Patterns match at word starts only ("name" never fires inside "username");
// a leading '^' anchors at the start of the input.
bool pattern_matches(const std::string& norm, const std::string& pattern) {
    if (pattern.empty()) return false;
    if (pattern.front() == '^') return norm.rfind(pattern.substr(1), 0) == 0;
    std::size_t pos = norm.find(pattern);
    while (pos != std::string::npos) {
        if (pos == 0 || std::isalnum(static_cast<unsigned char>(norm[pos - 1])) == 0) {
            return true;
        }
        pos = norm.find(pattern, pos + 1);
    }
    return false;
}

const LexiconRule* best_rule(const std::vector<LexiconRule>& table, const std::string& norm) {
    const LexiconRule* best = nullptr;
    for (const auto& rule : table) {
        if (pattern_matches(norm, rule.pattern) &&
            (best == nullptr || rule.priority < best->priority)) {
            best = &rule;
        }
    }
    return best;
}

}  // namespace

ClassifierResult LexiconClassifier::classify(const std::string& task,
                                             const std::string& input, FeedMode mode) {
    const auto& table = table_for(task);
    if ((task == "practice" || task == "intention") &&
        input.find("[CLS]") != std::string::npos) {
        ContextFeed feed{input, 0, false};
        // The target decides on its own whenever it matches anything; the
        // context is only a fallback, so a neighbour heading's keyword never
        // overrides the target's.
        if (const auto* hit = best_rule(table, text::normalize(feed.target()))) {
            return {hit->label_code, 1.0, false};
        }
        if (mode == FeedMode::Multiple) {
            if (const auto* hit = best_rule(table, text::normalize(feed.context()))) {
                return {hit->label_code, 1.0, false};
            }
        }
        return {fallback_label(task), 0.0, false};
    }
    if (const auto* hit = best_rule(table, text::normalize(input))) {
        return {hit->label_code, 1.0, false};
    }
    return {fallback_label(task), 0.0, false};
}

PracticeResult classify_practice(const ContextFeed& feed, FeedMode mode,
                                 ClassifierBackend& backend) {
    const auto r = backend.classify("practice", feed.text, mode);
    const auto label = practice_from_code(r.label_code);
    if (!label) throw TaxonomyError("backend returned bad practice code: " + r.label_code);
    return {*label, r.confidence, r.fell_back_to_lexicon};
}

IntentionResult classify_intention(const ContextFeed& feed, FeedMode mode,
                                   ClassifierBackend& backend) {
    const auto r = backend.classify("intention", feed.text, mode);
    const auto label = intention_from_code(r.label_code);
    if (!label) throw TaxonomyError("backend returned bad intention code: " + r.label_code);
    return {*label, r.confidence, r.fell_back_to_lexicon};
}

ItemLabel classify_item(const std::string& excerpt, ClassifierBackend& backend) {
    if (text::trim(excerpt).empty()) throw TaxonomyError("classify_item: empty excerpt");
    const auto r = backend.classify("item", excerpt, FeedMode::Single);
    const auto label = item_from_code(r.label_code);
    if (!label) throw TaxonomyError("backend returned bad item code: " + r.label_code);
    return *label;
}

PurposeLabel classify_purpose(const std::string& excerpt, ClassifierBackend& backend) {
    if (text::trim(excerpt).empty()) throw TaxonomyError("classify_purpose: empty excerpt");
    const auto r = backend.classify("purpose", excerpt, FeedMode::Single);
    const auto label = purpose_from_code(r.label_code);
    if (!label) throw TaxonomyError("backend returned bad purpose code: " + r.label_code);
    return *label;
}

}  // namespace privstruct
