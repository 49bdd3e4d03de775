#include "privstruct/compliance.hpp"

#include <algorithm>
#include <cmath>

namespace privstruct {

std::vector<PairOutcome> pair_outcomes(const PolicyDisclosure& pp,
                                       const DataSafetyDeclaration& ds,
                                       PracticeLabel practice) {
    if (practice != PracticeLabel::FirstPartyCollection &&
        practice != PracticeLabel::ThirdPartySharing) {
        throw ComplianceError("pair_outcomes: practice must be c0 or c1");
    }
    const DeclarationMode mode = practice == PracticeLabel::FirstPartyCollection
                                     ? DeclarationMode::Collected
                                     : DeclarationMode::Shared;
    std::vector<PairOutcome> out;
    auto presence = pp.item_presence.find(practice);
    if (presence == pp.item_presence.end()) return out;
    static const std::set<PurposeLabel> kEmpty;
    for (ItemLabel item : presence->second) {
        const auto* declared = ds.purposes(mode, item);
        if (declared == nullptr) continue;  // conditioning event: d[j] in PP n DS
        const auto* stated = pp.purposes(practice, item);
        const auto& pp_set = stated ? *stated : kEmpty;
        for (std::size_t i = 0; i < kPurposeCount; ++i) {
            const auto purpose = static_cast<PurposeLabel>(i);
            const bool in_pp = pp_set.count(purpose) > 0;
            const bool in_ds = declared->count(purpose) > 0;
            PurposeOutcome outcome;
            if (in_pp && in_ds) {
                outcome = PurposeOutcome::WellDisclosed;
            } else if (in_pp) {
                outcome = PurposeOutcome::OverStated;
            } else if (in_ds) {
                outcome = PurposeOutcome::UnderStated;
            } else {
                outcome = PurposeOutcome::NonExistent;
            }
            out.push_back({pp.policy_id, practice, item, purpose, outcome, pp.scope});
        }
    }
    return out;
}

ComplianceMatrix aggregate(const std::vector<PairOutcome>& outcomes,
                           PracticeLabel practice, DisclosureScope scope) {
    std::array<std::array<std::array<std::size_t, 4>, kItemCount>, kPurposeCount> counts{};
    std::array<std::size_t, kItemCount> column_n{};
    for (const auto& o : outcomes) {
        if (o.practice != practice || o.scope != scope) continue;
        const auto i = static_cast<std::size_t>(o.purpose);
        const auto j = static_cast<std::size_t>(o.item);
        ++counts[i][j][static_cast<std::size_t>(o.outcome)];
    }
    // Every qualifying (policy, item) pair contributes one outcome per purpose,
    // so any purpose row carries the column count.
    for (std::size_t j = 0; j < kItemCount; ++j) {
        std::size_t n = 0;
        for (std::size_t k = 0; k < 4; ++k) n += counts[0][j][k];
        column_n[j] = n;
    }

    ComplianceMatrix m;
    m.practice = practice;
    m.scope = scope;
    for (std::size_t i = 0; i < kPurposeCount; ++i) {
        for (std::size_t j = 0; j < kItemCount; ++j) {
            auto& cell = m.cells[i][j];
            cell.n = column_n[j];
            if (cell.n == 0) continue;
            const auto n = static_cast<double>(cell.n);
            cell.p_wd = static_cast<double>(counts[i][j][0]) / n;
            cell.p_os = static_cast<double>(counts[i][j][1]) / n;
            cell.p_us = static_cast<double>(counts[i][j][2]) / n;
            cell.p_ne = static_cast<double>(counts[i][j][3]) / n;
        }
    }
    return m;
}

namespace {

ComplianceMatrix cellwise_difference(const ComplianceMatrix& a, const ComplianceMatrix& b,
                                     DisclosureScope scope) {
    ComplianceMatrix d;
    d.practice = b.practice;
    d.scope = scope;
    for (std::size_t i = 0; i < kPurposeCount; ++i) {
        for (std::size_t j = 0; j < kItemCount; ++j) {
            if (a.cells[i][j].n != b.cells[i][j].n) {
                throw ComplianceError("scope_deltas: qualifying-pair count differs at (p" +
                                      std::to_string(i) + ", d" + std::to_string(j) + ")");
            }
            auto& cell = d.cells[i][j];
            cell.n = b.cells[i][j].n;
            cell.p_wd = b.cells[i][j].p_wd - a.cells[i][j].p_wd;
            cell.p_os = b.cells[i][j].p_os - a.cells[i][j].p_os;
            cell.p_us = b.cells[i][j].p_us - a.cells[i][j].p_us;
            cell.p_ne = b.cells[i][j].p_ne - a.cells[i][j].p_ne;
        }
    }
    return d;
}

}  // namespace

ScopeDeltas scope_deltas(const ComplianceMatrix& base, const ComplianceMatrix& plus_global,
                         const ComplianceMatrix& plus_floating) {
    return {cellwise_difference(base, plus_global, DisclosureScope::PlusGlobal),
            cellwise_difference(plus_global, plus_floating, DisclosureScope::PlusFloating)};
}

ItemAverages item_averages(const ComplianceMatrix& matrix,
                           const std::vector<ItemLabel>& items) {
    if (items.empty()) throw ComplianceError("item_averages: empty item list");
    ItemAverages avg;
    std::size_t used = 0;
    for (ItemLabel item : items) {
        const auto j = static_cast<std::size_t>(item);
        if (matrix.cells[0][j].n == 0) {
            avg.sparse_items.push_back(item);
            continue;
        }
        double wd = 0.0, os = 0.0, us = 0.0, ne = 0.0;
        for (std::size_t i = 0; i < kPurposeCount; ++i) {
            wd += matrix.cells[i][j].p_wd;
            os += matrix.cells[i][j].p_os;
            us += matrix.cells[i][j].p_us;
            ne += matrix.cells[i][j].p_ne;
        }
        const auto p = static_cast<double>(kPurposeCount);
        avg.avg_wd += wd / p;
        avg.avg_os += os / p;
        avg.avg_us += us / p;
        avg.avg_ne += ne / p;
        ++used;
    }
    if (used == 0) throw ComplianceError("item_averages: every listed item is sparse");
    const auto denom = static_cast<double>(used);
    avg.avg_wd /= denom;
    avg.avg_os /= denom;
    avg.avg_us /= denom;
    avg.avg_ne /= denom;
    return avg;
}

double relative_change_percent(double delta_avg, double base_avg) {
    if (base_avg == 0.0) return 0.0;
    return delta_avg / base_avg * 100.0;
}

PositionalProfile positional_profile(const std::vector<ProfileInput>& corpus,
                                     std::size_t n_bins) {
    PositionalProfile profile;
    profile.n_bins = n_bins;
    profile.mass_heading.assign(n_bins, {});
    profile.mass_text.assign(n_bins, {});
    std::array<double, kPracticeCount> both{}, either{};

    for (const auto& input : corpus) {
        if (input.doc_length == 0) continue;
        const auto len = static_cast<double>(input.doc_length);
        for (const auto& span : input.spans) {
            if (span.end <= span.begin) continue;
            const double a = static_cast<double>(span.begin) / len;
            const double b = static_cast<double>(span.end) / len;
            for (std::size_t bin = 0; bin < n_bins; ++bin) {
                const double lo = static_cast<double>(bin) / static_cast<double>(n_bins);
                const double hi = static_cast<double>(bin + 1) / static_cast<double>(n_bins);
                const double overlap = std::min(b, hi) - std::max(a, lo);
                if (overlap <= 0.0) continue;
                const double chars = overlap * len;
                profile.mass_heading[bin][static_cast<std::size_t>(span.heading_label)] +=
                    chars;
                profile.mass_text[bin][static_cast<std::size_t>(span.text_label)] += chars;
            }
            const auto chars = static_cast<double>(span.end - span.begin);
            either[static_cast<std::size_t>(span.heading_label)] += chars;
            if (span.text_label != span.heading_label) {
                either[static_cast<std::size_t>(span.text_label)] += chars;
            } else {
                both[static_cast<std::size_t>(span.heading_label)] += chars;
            }
        }
    }

    auto normalize_bins = [](std::vector<std::array<double, kPracticeCount>>& mass) {
        for (auto& bin : mass) {
            double total = 0.0;
            for (double v : bin) total += v;
            if (total <= 0.0) continue;
            for (double& v : bin) v /= total;
        }
    };
    normalize_bins(profile.mass_heading);
    normalize_bins(profile.mass_text);

    for (std::size_t c = 0; c < kPracticeCount; ++c) {
        profile.agreement[c] = either[c] > 0.0 ? both[c] / either[c] : -1.0;
    }
    return profile;
}

}  // namespace privstruct
