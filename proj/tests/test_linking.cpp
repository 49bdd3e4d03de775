#include "privstruct/linking.hpp"

#include <doctest.h>

#include <algorithm>

using namespace privstruct;

namespace {

// Builds a document whose i-th section is one heading plus one body line, with
// freely assignable practice/intention labels, and tuples attached by section.
struct Scenario {
    PolicyDocument doc;
    HeadingTree tree;
    std::vector<ExtractionTuple> tuples;
    std::vector<HeadingNode> pending_;
    std::string text_;

    std::size_t add_section(std::optional<PracticeLabel> practice,
                            std::optional<IntentionLabel> intention) {
        HeadingNode n;
        n.text = "Heading " + std::to_string(pending_.size());
        n.level = HeadingLevel::Main;
        n.char_offset = text_.size();
        n.practice = practice;
        n.intention = intention;
        text_ += n.text + "\nbody line for the section.\n";
        pending_.push_back(n);
        return pending_.size() - 1;
    }

    void finish() {
        doc.policy_id = "p";
        doc.text = text_;
        doc.size_bytes = text_.size();
        auto labels = pending_;
        tree = build_tree(pending_, doc);
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            tree.nodes[i].practice = labels[i].practice;
            tree.nodes[i].intention = labels[i].intention;
        }
    }

    void add_tuple(std::size_t section, std::string data, std::optional<ItemLabel> item,
                   std::string purpose, std::optional<PurposeLabel> purpose_label) {
        ExtractionTuple t;
        t.data_excerpt = std::move(data);
        t.purpose_excerpt = std::move(purpose);
        t.chunk_id = {"p", tuples.size()};
        t.section_index = section;
        t.item_label = item;
        t.purpose_label = purpose_label;
        tuples.push_back(std::move(t));
    }
};

}  // namespace

TEST_CASE("link_local pairs both-sided tuples in c0/c1 sections") {
    Scenario s;
    auto sec = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    s.finish();
    s.add_tuple(sec, "name", ItemLabel::Name, "account management",
                PurposeLabel::AccountManagement);
    auto links = link_local(s.tuples, s.tree);
    REQUIRE(links.size() == 1);
    CHECK(links[0].practice == PracticeLabel::FirstPartyCollection);
    CHECK(links[0].item == ItemLabel::Name);
    CHECK(links[0].purpose == PurposeLabel::AccountManagement);
    CHECK(links[0].strength == LinkStrength::Local);
    CHECK(links[0].data_tuple_index == links[0].purpose_tuple_index);
}

TEST_CASE("link_local skips non-collection/sharing practices") {
    Scenario s;
    auto sec = s.add_section(PracticeLabel::DataSecurity, IntentionLabel::Other);
    s.finish();
    s.add_tuple(sec, "personal information", ItemLabel::OtherPersonal,
                "developer communication", PurposeLabel::DeveloperCommunication);
    CHECK(link_local(s.tuples, s.tree).empty());
}

TEST_CASE("link_local ignores one-sided tuples") {
    Scenario s;
    auto sec = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    s.finish();
    s.add_tuple(sec, "email", ItemLabel::Email, "", std::nullopt);
    CHECK(link_local(s.tuples, s.tree).empty());
}

TEST_CASE("link_global takes the full bipartite product within a practice") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Why);
    s.finish();
    s.add_tuple(what, "device IDs", ItemLabel::DeviceIdentifier, "", std::nullopt);
    s.add_tuple(what, "location", ItemLabel::Location, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "app analytics", PurposeLabel::AppAnalytics);
    s.add_tuple(why, "", std::nullopt, "functionality", PurposeLabel::AppFunctionality);
    s.add_tuple(why, "", std::nullopt, "personalisation", PurposeLabel::Personalisation);
    auto links = link_global(s.tuples, s.tree);
    CHECK(links.size() == 6);
    for (const auto& l : links) CHECK(l.strength == LinkStrength::Global);
}

TEST_CASE("link_global respects the practice precondition") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::ThirdPartySharing, IntentionLabel::Why);
    s.finish();
    s.add_tuple(what, "email", ItemLabel::Email, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    CHECK(link_global(s.tuples, s.tree).empty());
}

TEST_CASE("link_global accepts how-used but not how-collected purpose sections") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto how_used = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::HowUsed);
    auto how_coll =
        s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::HowCollected);
    s.finish();
    s.add_tuple(what, "email", ItemLabel::Email, "", std::nullopt);
    s.add_tuple(how_used, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    s.add_tuple(how_coll, "", std::nullopt, "marketing", PurposeLabel::AdvertisingMarketing);
    auto links = link_global(s.tuples, s.tree);
    REQUIRE(links.size() == 1);
    CHECK(links[0].purpose == PurposeLabel::AppAnalytics);
}

TEST_CASE("link_global collapses duplicate triples keeping first evidence") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Why);
    s.finish();
    s.add_tuple(what, "email", ItemLabel::Email, "", std::nullopt);
    s.add_tuple(what, "e-mail", ItemLabel::Email, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    auto links = link_global(s.tuples, s.tree);
    REQUIRE(links.size() == 1);
    CHECK(links[0].data_tuple_index == 0);
}

TEST_CASE("link_floating pairs intention-violating sides and excludes global pairs") {
    Scenario s;
    auto other = s.add_section(PracticeLabel::ThirdPartySharing, IntentionLabel::Other);
    s.finish();
    s.add_tuple(other, "location", ItemLabel::Location, "", std::nullopt);
    s.add_tuple(other, "", std::nullopt, "advertising", PurposeLabel::AdvertisingMarketing);
    s.add_tuple(other, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    auto floating = link_floating(s.tuples, s.tree);
    CHECK(floating.size() == 2);
    for (const auto& l : floating) CHECK(l.strength == LinkStrength::Floating);
    CHECK(link_global(s.tuples, s.tree).empty());
}

TEST_CASE("global pairs never reappear as floating") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Why);
    auto misc = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Other);
    s.finish();
    s.add_tuple(what, "email", ItemLabel::Email, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    s.add_tuple(misc, "", std::nullopt, "marketing", PurposeLabel::AdvertisingMarketing);
    auto global = link_global(s.tuples, s.tree);
    auto floating = link_floating(s.tuples, s.tree);
    REQUIRE(global.size() == 1);
    REQUIRE(floating.size() == 1);
    CHECK(floating[0].purpose == PurposeLabel::AdvertisingMarketing);
}

TEST_CASE("disclosure_sets builds monotone scopes with stable item presence") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Why);
    auto misc = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Other);
    s.finish();
    s.add_tuple(what, "name", ItemLabel::Name, "account management",
                PurposeLabel::AccountManagement);
    s.add_tuple(what, "device IDs", ItemLabel::DeviceIdentifier, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "analytics", PurposeLabel::AppAnalytics);
    s.add_tuple(misc, "", std::nullopt, "marketing", PurposeLabel::AdvertisingMarketing);
    auto local = link_local(s.tuples, s.tree);
    auto global = link_global(s.tuples, s.tree);
    auto floating = link_floating(s.tuples, s.tree);
    auto scopes = disclosure_sets("p", local, global, floating, s.tuples, s.tree);

    const auto key =
        std::make_pair(PracticeLabel::FirstPartyCollection, ItemLabel::DeviceIdentifier);
    CHECK_FALSE(scopes.local_only.table.count(key));
    REQUIRE(scopes.plus_global.table.count(key));
    CHECK(scopes.plus_global.table.at(key).count(PurposeLabel::AppAnalytics));
    CHECK(scopes.plus_floating.table.at(key).count(PurposeLabel::AdvertisingMarketing));

    // monotone: every scope's sets are contained in the next
    for (const auto& [k, purposes] : scopes.local_only.table) {
        for (auto p : purposes) CHECK(scopes.plus_global.table.at(k).count(p));
    }
    for (const auto& [k, purposes] : scopes.plus_global.table) {
        for (auto p : purposes) CHECK(scopes.plus_floating.table.at(k).count(p));
    }

    // presence is scope-independent and includes link-less mentions
    const auto& presence =
        scopes.local_only.item_presence.at(PracticeLabel::FirstPartyCollection);
    CHECK(presence.count(ItemLabel::Name));
    CHECK(presence.count(ItemLabel::DeviceIdentifier));
    CHECK(scopes.plus_global.item_presence == scopes.local_only.item_presence);
    CHECK(scopes.plus_floating.item_presence == scopes.local_only.item_presence);
}

TEST_CASE("only local links make all three scopes equal") {
    Scenario s;
    auto sec = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    s.finish();
    s.add_tuple(sec, "email", ItemLabel::Email, "analytics", PurposeLabel::AppAnalytics);
    auto local = link_local(s.tuples, s.tree);
    auto scopes = disclosure_sets("p", local, {}, {}, s.tuples, s.tree);
    CHECK(scopes.local_only.table == scopes.plus_global.table);
    CHECK(scopes.plus_global.table == scopes.plus_floating.table);
}

TEST_CASE("link sets are pairwise disjoint as evidence records") {
    Scenario s;
    auto what = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::What);
    auto why = s.add_section(PracticeLabel::FirstPartyCollection, IntentionLabel::Why);
    s.finish();
    s.add_tuple(what, "email", ItemLabel::Email, "analytics", PurposeLabel::AppAnalytics);
    s.add_tuple(what, "location", ItemLabel::Location, "", std::nullopt);
    s.add_tuple(why, "", std::nullopt, "marketing", PurposeLabel::AdvertisingMarketing);
    auto local = link_local(s.tuples, s.tree);
    auto global = link_global(s.tuples, s.tree);
    auto floating = link_floating(s.tuples, s.tree);
    auto record = [](const DisclosureLink& l) {
        return std::tuple(l.practice, l.item, l.purpose, l.data_tuple_index,
                          l.purpose_tuple_index);
    };
    for (const auto& g : global) {
        for (const auto& f : floating) CHECK(record(g) != record(f));
        for (const auto& l : local) CHECK(record(g) != record(l));
    }
}
