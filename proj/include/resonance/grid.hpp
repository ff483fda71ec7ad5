#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace resonance {

struct CellFailure {
    std::size_t row;
    std::size_t col;
    std::string message;
};

/// Rectangular grid of values over two named axes; row-major storage.
/// Failed cells hold NaN and are listed in `failures`.
struct HeatmapGrid {
    std::string row_axis;
    std::string col_axis;
    std::vector<double> row_values;
    std::vector<double> col_values;
    std::vector<double> values;
    std::string provenance;  // "theory_rho" or an empirical metric name
    std::vector<CellFailure> failures;

    HeatmapGrid() = default;
    HeatmapGrid(std::string row_name, std::vector<double> rows, std::string col_name, std::vector<double> cols,
                std::string provenance_tag);

    std::size_t rows() const noexcept { return row_values.size(); }
    std::size_t cols() const noexcept { return col_values.size(); }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    bool same_axes(const HeatmapGrid& other) const;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace resonance
