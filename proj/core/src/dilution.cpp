#include "privstruct/dilution.hpp"

namespace privstruct {

double DilutionMatrix::sum() const {
    double total = 0.0;
    for (const auto& row : values) {
        for (double v : row) total += v;
    }
    return total;
}

std::optional<DilutionMatrix> pair_dilution(const std::set<PurposeLabel>& pp_purposes,
                                            const std::set<PurposeLabel>& ds_purposes,
                                            ItemLabel item, PracticeLabel practice) {
    DilutionMatrix m;
    m.item = item;
    m.practice = practice;
    m.contributing_pairs = 1;
    bool any = false;
    for (std::size_t x = 0; x < kDilutionRows; ++x) {
        const auto px = static_cast<PurposeLabel>(x);
        const bool pp_only = pp_purposes.count(px) > 0 && ds_purposes.count(px) == 0;
        if (!pp_only) continue;
        for (std::size_t y = 0; y < kDilutionCols; ++y) {
            const auto py = static_cast<PurposeLabel>(y);
            if (ds_purposes.count(py) > 0 && pp_purposes.count(py) == 0) {
                m.values[x][y] = 1.0;
                any = true;
            }
        }
    }
    if (!any) return std::nullopt;
    return m;
}

DilutionMatrix normalize(DilutionMatrix matrix) {
    const double total = matrix.sum();
    if (total <= 0.0) throw DilutionError("normalize: all-zero dilution matrix");
    for (auto& row : matrix.values) {
        for (double& v : row) v /= total;
    }
    matrix.normalized = true;
    return matrix;
}

DilutionMatrix aggregate_dilution(const std::vector<DilutionMatrix>& matrices) {
    DilutionMatrix out;
    if (matrices.empty()) return out;  // empty marker, excluded from reports
    out.item = matrices.front().item;
    out.practice = matrices.front().practice;
    for (const auto& m : matrices) {
        if (m.item != out.item || m.practice != out.practice) {
            throw DilutionError("aggregate_dilution: mixed item/practice inputs");
        }
        if (!m.normalized) {
            throw DilutionError("aggregate_dilution: inputs must be normalized");
        }
        for (std::size_t x = 0; x < kDilutionRows; ++x) {
            for (std::size_t y = 0; y < kDilutionCols; ++y) {
                out.values[x][y] += m.values[x][y];
            }
        }
    }
    out.contributing_pairs = matrices.size();
    return normalize(std::move(out));
}

}  // namespace privstruct
