#pragma once

#include "privstruct/datasafety.hpp"
#include "privstruct/taxonomy.hpp"

#include <array>
#include <optional>
#include <set>
#include <vector>

namespace privstruct {

inline constexpr std::size_t kDilutionRows = kPurposeCount;      // PP purposes p0..p7
inline constexpr std::size_t kDilutionCols = kPurposeCount - 1;  // DS purposes p0..p6

/// 8x7 purpose-disagreement matrix for one item and practice. The column axis
/// has no p7: declarations never carry an Other purpose.
struct DilutionMatrix {
    ItemLabel item = ItemLabel::Generic;
    PracticeLabel practice = PracticeLabel::FirstPartyCollection;
    std::array<std::array<double, kDilutionCols>, kDilutionRows> values{};
    bool normalized = false;
    std::size_t contributing_pairs = 0;

    double sum() const;
};

class DilutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cell (x, y) = 1 iff p[x] in PP\DS and p[y] in DS\PP. Returns nullopt when no
// two-sided disagreement exists (the all-zero matrix is never normalized).
std::optional<DilutionMatrix> pair_dilution(const std::set<PurposeLabel>& pp_purposes,
                                            const std::set<PurposeLabel>& ds_purposes,
                                            ItemLabel item, PracticeLabel practice);

// Divides every cell by the total; requires a positive sum.
DilutionMatrix normalize(DilutionMatrix matrix);

// Elementwise sum of normalized per-pair matrices, renormalized. Empty input
// yields an unnormalized zero matrix with contributing_pairs = 0 (excluded
// from reports). Mixed item/practice inputs are an error.
DilutionMatrix aggregate_dilution(const std::vector<DilutionMatrix>& matrices);

}  // namespace privstruct
