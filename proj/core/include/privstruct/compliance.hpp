#pragma once

#include "privstruct/datasafety.hpp"
#include "privstruct/linking.hpp"
#include "privstruct/taxonomy.hpp"

#include <array>
#include <string>
#include <vector>

namespace privstruct {

enum class PurposeOutcome { WellDisclosed, OverStated, UnderStated, NonExistent };

/// One (policy, practice, purpose, item) outcome at one scope. Defined only
/// when the item appears in both the policy and the declaration for the
/// matching mode.
struct PairOutcome {
    std::string policy_id;
    PracticeLabel practice;
    ItemLabel item;
    PurposeLabel purpose;
    PurposeOutcome outcome;
    DisclosureScope scope;
};

struct ComplianceCell {
    double p_wd = 0.0;
    double p_os = 0.0;
    double p_us = 0.0;
    double p_ne = 0.0;
    std::size_t n = 0;  // qualifying (policy, item) pairs; constant per column

    double stat(PurposeOutcome o) const {
        switch (o) {
            case PurposeOutcome::WellDisclosed: return p_wd;
            case PurposeOutcome::OverStated: return p_os;
            case PurposeOutcome::UnderStated: return p_us;
            default: return p_ne;
        }
    }
};

/// 8 purposes x 23 items of outcome probabilities for one (practice, scope).
struct ComplianceMatrix {
    PracticeLabel practice = PracticeLabel::FirstPartyCollection;
    DisclosureScope scope = DisclosureScope::LocalOnly;
    std::array<std::array<ComplianceCell, kItemCount>, kPurposeCount> cells{};

    ComplianceCell& cell(PurposeLabel i, ItemLabel j) {
        return cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const ComplianceCell& cell(PurposeLabel i, ItemLabel j) const {
        return cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

class ComplianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Outcomes for every qualifying item of one policy under one practice:
// WD if i in PP(j) n DS(j), OS if only PP, US if only DS, NE otherwise.
std::vector<PairOutcome> pair_outcomes(const PolicyDisclosure& pp,
                                       const DataSafetyDeclaration& ds,
                                       PracticeLabel practice);

// Count-merge across a corpus; probabilities are counts / n with n = number of
// qualifying policies for the item (identical for all purposes of a column).
ComplianceMatrix aggregate(const std::vector<PairOutcome>& outcomes,
                           PracticeLabel practice, DisclosureScope scope);

// Delta = plus_global - base, DeltaPrime = plus_floating - plus_global, per
// cell and statistic. Throws on per-cell n mismatches (item presence must be
// scope-independent).
struct ScopeDeltas {
    ComplianceMatrix delta;        // signed cell-wise differences
    ComplianceMatrix delta_prime;
};
ScopeDeltas scope_deltas(const ComplianceMatrix& base, const ComplianceMatrix& plus_global,
                         const ComplianceMatrix& plus_floating);

/// Purpose-marginal means over a list of items; sparse (n = 0) items are
/// excluded from the averages and listed separately.
struct ItemAverages {
    double avg_wd = 0.0;
    double avg_os = 0.0;
    double avg_us = 0.0;
    double avg_ne = 0.0;
    std::vector<ItemLabel> sparse_items;

    double avg(PurposeOutcome o) const {
        switch (o) {
            case PurposeOutcome::WellDisclosed: return avg_wd;
            case PurposeOutcome::OverStated: return avg_os;
            case PurposeOutcome::UnderStated: return avg_us;
            default: return avg_ne;
        }
    }
};

ItemAverages item_averages(const ComplianceMatrix& matrix,
                           const std::vector<ItemLabel>& items);

// Delta average relative to the base average, as a percentage.
double relative_change_percent(double delta_avg, double base_avg);

/// Binned positional distribution of practice labels plus heading-vs-text
/// agreement rates.
struct LabeledSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    PracticeLabel heading_label;
    PracticeLabel text_label;
};

struct PositionalProfile {
    std::size_t n_bins = 0;
    // [bin][practice] char mass, normalized so each bin sums to 1 across labels.
    std::vector<std::array<double, kPracticeCount>> mass_heading;
    std::vector<std::array<double, kPracticeCount>> mass_text;
    // agreement[c] = chars where both routes assign c / chars where either does;
    // -1 when the label never occurs.
    std::array<double, kPracticeCount> agreement{};
};

// Spans may come from many policies; each span's char mass is spread over the
// bins it covers after normalizing positions by its document length.
struct ProfileInput {
    std::vector<LabeledSpan> spans;
    std::size_t doc_length = 0;
};
PositionalProfile positional_profile(const std::vector<ProfileInput>& corpus,
                                     std::size_t n_bins);

}  // namespace privstruct
