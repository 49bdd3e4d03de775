#pragma once

#include "privstruct/taxonomy.hpp"

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace privstruct {

enum class DeclarationMode { Collected, Shared };  // c0 / c1 comparisons

struct DeclarationEntry {
    DeclarationMode mode;
    ItemLabel item;
    std::set<PurposeLabel> purposes;  // never contains p7 Other
};

struct DataSafetyDeclaration {
    std::string app_id;
    std::vector<DeclarationEntry> entries;  // unique (mode, item) keys

    const std::set<PurposeLabel>* purposes(DeclarationMode mode, ItemLabel item) const;
    std::set<ItemLabel> items(DeclarationMode mode) const;
};

class DataSafetyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Versioned store-category mapping (CSV: store_string,kind,label). Ships with
/// a built-in Play taxonomy table; file rows replace it wholesale.
class CategoryMap {
public:
    CategoryMap();  // built-in defaults
    static CategoryMap from_csv(const std::string& path);

    // Exact-match lookup; throws DataSafetyError on unknown strings.
    std::variant<ItemLabel, PurposeLabel> map_category(const std::string& store_string) const;
    ItemLabel map_item(const std::string& store_string) const;
    PurposeLabel map_purpose(const std::string& store_string) const;

private:
    std::map<std::string, ItemLabel> items_;
    std::map<std::string, PurposeLabel> purposes_;
};

// Parses {app_id, collected:[{category,purposes[]}], shared:[...]} JSON.
// Unmapped categories and duplicate (mode, item) keys are errors, never
// silently dropped.
DataSafetyDeclaration parse_declaration(const std::string& json_text,
                                        const CategoryMap& map = CategoryMap());
DataSafetyDeclaration parse_declaration_file(const std::string& path,
                                             const CategoryMap& map = CategoryMap());

// Canonically ordered re-emission (round-trip check surface).
std::string emit_declaration(const DataSafetyDeclaration& decl);

}  // namespace privstruct
