#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace privstruct {

// Closed label sets. Numeric values match the taxonomy indices used in all
// matrix outputs, so keep them contiguous from zero.

enum class PracticeLabel : std::uint8_t {
    FirstPartyCollection = 0,   // c0
    ThirdPartySharing = 1,      // c1
    UserChoiceControl = 2,      // c2
    UserAccessEditDeletion = 3, // c3
    IntroductoryGeneric = 4,    // c4
    PolicyChange = 5,           // c5
    DataSecurity = 6,           // c6
    InternationalSpecificAudience = 7,  // c7
    PracticeNotCovered = 8,     // c8
    DataRetention = 9,          // c9
    PrivacyContactInformation = 10,  // c10
    DoNotTrack = 11             // c11
};
inline constexpr std::size_t kPracticeCount = 12;

enum class IntentionLabel : std::uint8_t {
    What = 0,          // i0
    Why = 1,           // i1
    HowCollected = 2,  // i2
    HowUsed = 3,       // i3
    When = 4,          // i4
    Other = 5          // i5
};
inline constexpr std::size_t kIntentionCount = 6;

enum class ItemLabel : std::uint8_t {
    Name = 0, Email = 1, UserAccount = 2, Address = 3, Phone = 4,
    RaceEthnicity = 5, PoliticalReligious = 6, Gender = 7, Financial = 8,
    Location = 9, SearchBrowsingHistory = 10, SmsMessagesCallLog = 11,
    PhotosVideos = 12, AudioMusic = 13, HealthFitness = 14, Contacts = 15,
    Calendar = 16, AppPerformanceActivity = 17, DeviceIdentifier = 18,
    FilesDocuments = 19, OtherPersonal = 20, Generic = 21, Negatives = 22
};
inline constexpr std::size_t kItemCount = 23;

enum class PurposeLabel : std::uint8_t {
    AppAnalytics = 0,          // p0
    DeveloperCommunication = 1,// p1
    FraudPreventionSecurity = 2,  // p2
    AdvertisingMarketing = 3,  // p3
    Personalisation = 4,       // p4
    AccountManagement = 5,     // p5
    AppFunctionality = 6,      // p6
    Other = 7                  // p7 (never present in data-safety declarations)
};
inline constexpr std::size_t kPurposeCount = 8;

std::string_view to_string(PracticeLabel l);
std::string_view to_string(IntentionLabel l);
std::string_view to_string(ItemLabel l);
std::string_view to_string(PurposeLabel l);

// Short codes c0..c11 / i0..i5 / d0..d22 / p0..p7 used in CSV outputs.
std::string code(PracticeLabel l);
std::string code(IntentionLabel l);
std::string code(ItemLabel l);
std::string code(PurposeLabel l);

std::optional<PracticeLabel> practice_from_code(std::string_view s);
std::optional<IntentionLabel> intention_from_code(std::string_view s);
std::optional<ItemLabel> item_from_code(std::string_view s);
std::optional<PurposeLabel> purpose_from_code(std::string_view s);

class TaxonomyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "[CLS] target [SEP] context [SEP]" classifier input, capped at 512 tokens.
struct ContextFeed {
    std::string text;
    std::size_t token_count = 0;
    bool truncated = false;

    std::string target() const;   // text between [CLS] and the first [SEP]
    std::string context() const;  // text between the two [SEP] markers
};

enum class FeedMode { Single, Multiple };

struct ClassifierResult {
    std::string label_code;  // taxonomy short code
    double confidence = 0.0;
    bool fell_back_to_lexicon = false;
};

/// Backend contract shared by the lexicon baseline and remote classifiers.
/// task is one of "practice" | "intention" | "item" | "purpose".
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual ClassifierResult classify(const std::string& task, const std::string& input,
                                      FeedMode mode) = 0;
    virtual std::string id() const = 0;
};

// One lexicon row: lowest priority value wins; patterns are normalized
// substrings matched against the normalized input.
struct LexiconRule {
    std::string pattern;
    std::string label_code;
    int priority = 0;
};

/// Deterministic keyword-table classifier. Total: every input gets a label
/// (falls back to c8 / i5 / d21 / p7 with confidence 0).
class LexiconClassifier : public ClassifierBackend {
public:
    LexiconClassifier();  // built-in default tables

    // Replaces one task's table from CSV rows (pattern,label,priority).
    void load_table(const std::string& task, const std::string& csv_path);
    void set_table(const std::string& task, std::vector<LexiconRule> rules);

    ClassifierResult classify(const std::string& task, const std::string& input,
                              FeedMode mode) override;
    std::string id() const override { return "lexicon"; }

private:
    std::vector<LexiconRule> practice_, intention_, item_, purpose_;
    std::vector<LexiconRule>& table_for(const std::string& task);
};

// Built-in default table for one task; the heuristic extractor reuses the
// item/purpose keyword sets for excerpt spotting.
const std::vector<LexiconRule>& default_lexicon(const std::string& task);

struct HeadingNode;
struct HeadingTree;

// Builds the "[CLS] target [SEP] context [SEP]" feed, widening the heading
// neighbourhood alternately (next, previous, next+1, ...) until adding one
// more neighbour would exceed the token budget. Neighbours joined by " | ".
ContextFeed build_context_feed(const HeadingNode& target, const HeadingTree& tree,
                               std::size_t budget_tokens = 512);

struct PracticeResult {
    PracticeLabel label;
    double confidence;
    bool fell_back_to_lexicon = false;
};
struct IntentionResult {
    IntentionLabel label;
    double confidence;
    bool fell_back_to_lexicon = false;
};

PracticeResult classify_practice(const ContextFeed& feed, FeedMode mode,
                                 ClassifierBackend& backend);
IntentionResult classify_intention(const ContextFeed& feed, FeedMode mode,
                                   ClassifierBackend& backend);

// Excerpt classifiers; throw TaxonomyError on empty excerpts.
ItemLabel classify_item(const std::string& excerpt, ClassifierBackend& backend);
PurposeLabel classify_purpose(const std::string& excerpt, ClassifierBackend& backend);

}  // namespace privstruct
