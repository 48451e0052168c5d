#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ccl/cli/config.hpp"
#include "ccl/cli/serialize.hpp"

namespace ccl::cli {

class ColumnMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Required columns per kind:
///   positions          series, z                  one row of markers per series
///   density            series, z, n [, n_ansatz]  markers for n, line for the ansatz
///   scaling            N, <y_column>              log-log with the power-law fit overlaid
///   energy-comparison  N, energy_exact, energy_variational; lower panel shows exact - variational
struct PlotSpec {
    PlotKind kind = PlotKind::Positions;
    std::string title{};
    std::string y_column = "dz_min";  // scaling only
    std::string series_label = "N";
};

/// Throws ColumnMismatchError for an empty table or missing columns.
std::string render_svg(const Table& data, const PlotSpec& spec);

/// render_svg + atomic write; nothing is written when rendering fails.
void emit_plot(const Table& data, const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace ccl::cli
