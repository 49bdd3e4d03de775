#include "privstruct/linking.hpp"

#include "privstruct/text.hpp"

#include <algorithm>
#include <set>

namespace privstruct {

SectionLabels labels_for_tuple(const ExtractionTuple& tuple, const HeadingTree& tree) {
    SectionLabels labels;
    if (!tuple.section_index || *tuple.section_index >= tree.sections.size()) return labels;
    const auto& section = tree.sections[*tuple.section_index];
    if (!section.heading_index) return labels;
    const auto& heading = tree.nodes[*section.heading_index];
    labels.practice = heading.practice;
    labels.intention = heading.intention;
    return labels;
}

namespace {

bool auditable_practice(const std::optional<PracticeLabel>& p) {
    return p && (*p == PracticeLabel::FirstPartyCollection ||
                 *p == PracticeLabel::ThirdPartySharing);
}

bool has_data(const ExtractionTuple& t) { return !text::trim(t.data_excerpt).empty(); }
bool has_purpose(const ExtractionTuple& t) { return !text::trim(t.purpose_excerpt).empty(); }

struct IsolatedSide {
    std::size_t tuple_index;
    SectionLabels labels;
};

// Bipartite product of isolated items x isolated purposes within one practice.
// `global_condition` selects Global pairs (item What, purpose Why/How-Used);
// Floating takes the complement. Duplicate triples collapse to the first
// evidence in document order.
std::vector<DisclosureLink> bipartite_links(const std::vector<ExtractionTuple>& tuples,
                                            const HeadingTree& tree, bool want_global) {
    std::vector<DisclosureLink> out;
    for (PracticeLabel practice :
         {PracticeLabel::FirstPartyCollection, PracticeLabel::ThirdPartySharing}) {
        std::vector<IsolatedSide> items, purposes;
        for (std::size_t i = 0; i < tuples.size(); ++i) {
            const auto& t = tuples[i];
            const auto labels = labels_for_tuple(t, tree);
            if (!labels.practice || *labels.practice != practice) continue;
            if (has_data(t) && !has_purpose(t) && t.item_label) {
                items.push_back({i, labels});
            } else if (has_purpose(t) && !has_data(t) && t.purpose_label) {
                purposes.push_back({i, labels});
            }
        }
        std::set<std::tuple<PracticeLabel, ItemLabel, PurposeLabel>> seen;
        for (const auto& item_side : items) {
            for (const auto& purpose_side : purposes) {
                const bool item_what =
                    item_side.labels.intention == IntentionLabel::What;
                const bool purpose_why =
                    purpose_side.labels.intention == IntentionLabel::Why ||
                    purpose_side.labels.intention == IntentionLabel::HowUsed;
                const bool global_pair = item_what && purpose_why;
                if (global_pair != want_global) continue;
                const auto item = *tuples[item_side.tuple_index].item_label;
                const auto purpose = *tuples[purpose_side.tuple_index].purpose_label;
                if (!seen.insert({practice, item, purpose}).second) continue;
                out.push_back({practice, item, purpose,
                               want_global ? LinkStrength::Global : LinkStrength::Floating,
                               item_side.tuple_index, purpose_side.tuple_index});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<DisclosureLink> link_local(const std::vector<ExtractionTuple>& tuples,
                                       const HeadingTree& tree) {
    std::vector<DisclosureLink> out;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        if (!has_data(t) || !has_purpose(t)) continue;
        if (!t.item_label || !t.purpose_label) continue;
        const auto labels = labels_for_tuple(t, tree);
        if (!auditable_practice(labels.practice)) continue;
        out.push_back({*labels.practice, *t.item_label, *t.purpose_label,
                       LinkStrength::Local, i, i});
    }
    return out;
}

std::vector<DisclosureLink> link_global(const std::vector<ExtractionTuple>& tuples,
                                        const HeadingTree& tree) {
    return bipartite_links(tuples, tree, /*want_global=*/true);
}

std::vector<DisclosureLink> link_floating(const std::vector<ExtractionTuple>& tuples,
                                          const HeadingTree& tree) {
    return bipartite_links(tuples, tree, /*want_global=*/false);
}

ThreeScopeDisclosure disclosure_sets(const std::string& policy_id,
                                     const std::vector<DisclosureLink>& local,
                                     const std::vector<DisclosureLink>& global,
                                     const std::vector<DisclosureLink>& floating,
                                     const std::vector<ExtractionTuple>& tuples,
                                     const HeadingTree& tree) {
    std::map<PracticeLabel, std::set<ItemLabel>> presence;
    for (const auto& t : tuples) {
        if (!has_data(t) || !t.item_label) continue;
        const auto labels = labels_for_tuple(t, tree);
        if (!auditable_practice(labels.practice)) continue;
        presence[*labels.practice].insert(*t.item_label);
    }

    auto apply = [](PolicyDisclosure& d, const std::vector<DisclosureLink>& links) {
        for (const auto& l : links) d.table[{l.practice, l.item}].insert(l.purpose);
    };

    ThreeScopeDisclosure scopes;
    scopes.local_only.policy_id = policy_id;
    scopes.local_only.scope = DisclosureScope::LocalOnly;
    scopes.local_only.item_presence = presence;
    apply(scopes.local_only, local);

    scopes.plus_global = scopes.local_only;
    scopes.plus_global.scope = DisclosureScope::PlusGlobal;
    apply(scopes.plus_global, global);

    scopes.plus_floating = scopes.plus_global;
    scopes.plus_floating.scope = DisclosureScope::PlusFloating;
    apply(scopes.plus_floating, floating);
    return scopes;
}

}  // namespace privstruct
