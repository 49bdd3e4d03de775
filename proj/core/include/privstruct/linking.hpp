#pragma once

#include "privstruct/extract.hpp"
#include "privstruct/headings.hpp"
#include "privstruct/taxonomy.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace privstruct {

enum class LinkStrength { Local, Global, Floating };

/// (practice, item, purpose) disclosure evidence. Local links carry one tuple
/// as both sides; Global/Floating pair an isolated item with an isolated
/// purpose from another tuple in the same practice.
struct DisclosureLink {
    PracticeLabel practice;  // c0 or c1 only
    ItemLabel item;
    PurposeLabel purpose;
    LinkStrength strength;
    std::size_t data_tuple_index = 0;     // into the tuple list passed to link_*
    std::size_t purpose_tuple_index = 0;  // equal to data_tuple_index when Local
};

enum class DisclosureScope { LocalOnly, PlusGlobal, PlusFloating };

struct PolicyDisclosure {
    std::string policy_id;
    DisclosureScope scope = DisclosureScope::LocalOnly;
    std::map<std::pair<PracticeLabel, ItemLabel>, std::set<PurposeLabel>> table;
    // Scope-independent: membership depends only on item mentions, not links.
    std::map<PracticeLabel, std::set<ItemLabel>> item_presence;

    const std::set<PurposeLabel>* purposes(PracticeLabel practice, ItemLabel item) const {
        auto it = table.find({practice, item});
        return it == table.end() ? nullptr : &it->second;
    }
};

struct ThreeScopeDisclosure {
    PolicyDisclosure local_only;
    PolicyDisclosure plus_global;
    PolicyDisclosure plus_floating;

    const PolicyDisclosure& at(DisclosureScope scope) const {
        switch (scope) {
            case DisclosureScope::LocalOnly: return local_only;
            case DisclosureScope::PlusGlobal: return plus_global;
            default: return plus_floating;
        }
    }
};

// Per-tuple section labels resolved through the heading tree.
struct SectionLabels {
    std::optional<PracticeLabel> practice;
    std::optional<IntentionLabel> intention;
};
SectionLabels labels_for_tuple(const ExtractionTuple& tuple, const HeadingTree& tree);

// Tuples with both excerpts present in a c0/c1 section link their own item to
// their own purpose.
std::vector<DisclosureLink> link_local(const std::vector<ExtractionTuple>& tuples,
                                       const HeadingTree& tree);

// Full bipartite product per practice c0/c1: isolated items under intention
// What x isolated purposes under intention Why / How-Used.
std::vector<DisclosureLink> link_global(const std::vector<ExtractionTuple>& tuples,
                                        const HeadingTree& tree);

// Same product restricted to pairs where the Global intention condition fails
// on at least one side.
std::vector<DisclosureLink> link_floating(const std::vector<ExtractionTuple>& tuples,
                                          const HeadingTree& tree);

// Builds the three monotone scopes; item presence comes from every classified
// item mention under the practice regardless of link status.
ThreeScopeDisclosure disclosure_sets(const std::string& policy_id,
                                     const std::vector<DisclosureLink>& local,
                                     const std::vector<DisclosureLink>& global,
                                     const std::vector<DisclosureLink>& floating,
                                     const std::vector<ExtractionTuple>& tuples,
                                     const HeadingTree& tree);

}  // namespace privstruct
