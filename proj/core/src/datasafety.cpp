#include "privstruct/datasafety.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace privstruct {

using json = nlohmann::json;

const std::set<PurposeLabel>* DataSafetyDeclaration::purposes(DeclarationMode mode,
                                                              ItemLabel item) const {
    for (const auto& e : entries) {
        if (e.mode == mode && e.item == item) return &e.purposes;
    }
    return nullptr;
}

std::set<ItemLabel> DataSafetyDeclaration::items(DeclarationMode mode) const {
    std::set<ItemLabel> out;
    for (const auto& e : entries) {
        if (e.mode == mode) out.insert(e.item);
    }
    return out;
}

CategoryMap::CategoryMap() {
    // Google Play data-safety taxonomy, best-effort mapped onto d0..d22.
    items_ = {
        {"Approximate location", ItemLabel::Location},
        {"Precise location", ItemLabel::Location},
        {"Name", ItemLabel::Name},
        {"Email address", ItemLabel::Email},
        {"User IDs", ItemLabel::UserAccount},
        {"Address", ItemLabel::Address},
        {"Phone number", ItemLabel::Phone},
        {"Race and ethnicity", ItemLabel::RaceEthnicity},
        {"Political or religious beliefs", ItemLabel::PoliticalReligious},
        {"Sexual orientation", ItemLabel::Gender},
        {"Other info", ItemLabel::OtherPersonal},
        {"Financial info", ItemLabel::Financial},
        {"User payment info", ItemLabel::Financial},
        {"Purchase history", ItemLabel::Financial},
        {"Credit score", ItemLabel::Financial},
        {"Other financial info", ItemLabel::Financial},
        {"Health info", ItemLabel::HealthFitness},
        {"Fitness info", ItemLabel::HealthFitness},
        {"Emails", ItemLabel::SmsMessagesCallLog},
        {"SMS or MMS", ItemLabel::SmsMessagesCallLog},
        {"Other in-app messages", ItemLabel::SmsMessagesCallLog},
        {"Photos", ItemLabel::PhotosVideos},
        {"Videos", ItemLabel::PhotosVideos},
        {"Photos and videos", ItemLabel::PhotosVideos},
        {"Voice or sound recordings", ItemLabel::AudioMusic},
        {"Music files", ItemLabel::AudioMusic},
        {"Other audio files", ItemLabel::AudioMusic},
        {"Files and docs", ItemLabel::FilesDocuments},
        {"Calendar events", ItemLabel::Calendar},
        {"Contacts", ItemLabel::Contacts},
        {"App activity", ItemLabel::AppPerformanceActivity},
        {"App interactions", ItemLabel::AppPerformanceActivity},
        {"In-app search history", ItemLabel::SearchBrowsingHistory},
        {"Installed apps", ItemLabel::AppPerformanceActivity},
        {"Other user-generated content", ItemLabel::OtherPersonal},
        {"Other actions", ItemLabel::AppPerformanceActivity},
        {"Web browsing history", ItemLabel::SearchBrowsingHistory},
        {"App info and performance", ItemLabel::AppPerformanceActivity},
        {"Crash logs", ItemLabel::AppPerformanceActivity},
        {"Diagnostics", ItemLabel::AppPerformanceActivity},
        {"Other app performance data", ItemLabel::AppPerformanceActivity},
        {"Device or other IDs", ItemLabel::DeviceIdentifier},
    };
    purposes_ = {
        {"App functionality", PurposeLabel::AppFunctionality},
        {"Analytics", PurposeLabel::AppAnalytics},
        {"Developer communications", PurposeLabel::DeveloperCommunication},
        {"Advertising or marketing", PurposeLabel::AdvertisingMarketing},
        {"Fraud prevention, security, and compliance", PurposeLabel::FraudPreventionSecurity},
        {"Personalization", PurposeLabel::Personalisation},
        {"Personalisation", PurposeLabel::Personalisation},
        {"Account management", PurposeLabel::AccountManagement},
    };
}

CategoryMap CategoryMap::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataSafetyError("cannot open category map: " + path);
    CategoryMap map;
    map.items_.clear();
    map.purposes_.clear();
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("store_string,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        // Store strings may themselves contain commas ("Fraud prevention,
        // security, and compliance"), so split from the right.
        const std::size_t last = line.rfind(',');
        const std::size_t mid = last == std::string::npos ? std::string::npos
                                                          : line.rfind(',', last - 1);
        if (mid == std::string::npos || mid == 0) {
            throw DataSafetyError("bad category map row: " + line);
        }
        const std::string store_string = line.substr(0, mid);
        const std::string kind = line.substr(mid + 1, last - mid - 1);
        const std::string label = line.substr(last + 1);
        if (kind == "item") {
            const auto l = item_from_code(label);
            if (!l) throw DataSafetyError("bad item label in category map: " + label);
            map.items_[store_string] = *l;
        } else if (kind == "purpose") {
            const auto l = purpose_from_code(label);
            if (!l) throw DataSafetyError("bad purpose label in category map: " + label);
            if (*l == PurposeLabel::Other) {
                throw DataSafetyError("category map must not target p7 Other");
            }
            map.purposes_[store_string] = *l;
        } else {
            throw DataSafetyError("bad kind in category map row: " + line);
        }
    }
    return map;
}

std::variant<ItemLabel, PurposeLabel>
CategoryMap::map_category(const std::string& store_string) const {
    if (auto it = items_.find(store_string); it != items_.end()) return it->second;
    if (auto it = purposes_.find(store_string); it != purposes_.end()) return it->second;
    throw DataSafetyError("unknown store category: \"" + store_string + "\"");
}

ItemLabel CategoryMap::map_item(const std::string& store_string) const {
    if (auto it = items_.find(store_string); it != items_.end()) return it->second;
    throw DataSafetyError("unknown store data-item category: \"" + store_string + "\"");
}

PurposeLabel CategoryMap::map_purpose(const std::string& store_string) const {
    if (auto it = purposes_.find(store_string); it != purposes_.end()) return it->second;
    throw DataSafetyError("unknown store purpose category: \"" + store_string + "\"");
}

namespace {

void parse_entries(const json& list, DeclarationMode mode, const CategoryMap& map,
                   DataSafetyDeclaration& decl, std::vector<std::string>& unmapped) {
    if (!list.is_array()) throw DataSafetyError("declaration entry list must be an array");
    for (const auto& obj : list) {
        if (!obj.is_object() || !obj.contains("category")) {
            throw DataSafetyError("declaration entry missing 'category'");
        }
        DeclarationEntry entry;
        entry.mode = mode;
        try {
            entry.item = map.map_item(obj["category"].get<std::string>());
        } catch (const DataSafetyError&) {
            unmapped.push_back(obj["category"].get<std::string>());
            continue;
        }
        if (obj.contains("purposes")) {
            for (const auto& p : obj["purposes"]) {
                try {
                    entry.purposes.insert(map.map_purpose(p.get<std::string>()));
                } catch (const DataSafetyError&) {
                    unmapped.push_back(p.get<std::string>());
                }
            }
        }
        for (const auto& existing : decl.entries) {
            if (existing.mode == entry.mode && existing.item == entry.item) {
                throw DataSafetyError("duplicate (mode, item) entry: " +
                                      std::string(to_string(entry.item)));
            }
        }
        decl.entries.push_back(std::move(entry));
    }
}

}  // namespace

DataSafetyDeclaration parse_declaration(const std::string& json_text,
                                        const CategoryMap& map) {
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataSafetyError(std::string("declaration is not valid JSON: ") + e.what());
    }
    if (!parsed.is_object()) throw DataSafetyError("declaration top level must be an object");
    DataSafetyDeclaration decl;
    if (parsed.contains("app_id")) decl.app_id = parsed["app_id"].get<std::string>();
    std::vector<std::string> unmapped;
    if (parsed.contains("collected")) {
        parse_entries(parsed["collected"], DeclarationMode::Collected, map, decl, unmapped);
    }
    if (parsed.contains("shared")) {
        parse_entries(parsed["shared"], DeclarationMode::Shared, map, decl, unmapped);
    }
    if (!unmapped.empty()) {
        std::string msg = "unmapped store categories:";
        for (const auto& c : unmapped) msg += " \"" + c + "\"";
        throw DataSafetyError(msg);
    }
    // Canonical order: Collected before Shared, items ascending.
    std::sort(decl.entries.begin(), decl.entries.end(), [](const auto& a, const auto& b) {
        if (a.mode != b.mode) return a.mode == DeclarationMode::Collected;
        return a.item < b.item;
    });
    return decl;
}

DataSafetyDeclaration parse_declaration_file(const std::string& path,
                                             const CategoryMap& map) {
    std::ifstream in(path);
    if (!in) throw DataSafetyError("cannot open declaration file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_declaration(ss.str(), map);
}

std::string emit_declaration(const DataSafetyDeclaration& decl) {
    json out;
    out["app_id"] = decl.app_id;
    out["collected"] = json::array();
    out["shared"] = json::array();
    for (const auto& e : decl.entries) {
        json entry;
        entry["item"] = code(e.item);
        json purposes = json::array();
        for (const auto& p : e.purposes) purposes.push_back(code(p));
        entry["purposes"] = purposes;
        out[e.mode == DeclarationMode::Collected ? "collected" : "shared"].push_back(entry);
    }
    return out.dump(2);
}

}  // namespace privstruct
