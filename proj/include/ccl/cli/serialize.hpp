#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccl/analysis.hpp"
#include "ccl/solver.hpp"
#include "ccl/variational.hpp"
#include "ccl/zigzag.hpp"

namespace ccl::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "ccl-1.0.0";

using Json = nlohmann::ordered_json;

/// Malformed JSON/CSV input.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure. Exit status 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Two-space indented JSON with every double printed by format_double (non-finite -> null), LF
/// line endings and a trailing newline.
std::string dump_json(const Json& j);

/// Numeric table with a header row. Lines starting with '#' are comments.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;  // without the leading "# "

    std::optional<std::size_t> column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;  // throws FormatError if absent
};

std::string write_csv(const Table& table);
Table parse_csv(const std::string& text);

Json to_json(const GroundStateResult& r, int exponent);
GroundStateResult ground_state_from_json(const Json& j);

Json to_json(const VariationalSolution& s);
VariationalSolution variational_from_json(const Json& j);

Json to_json(const ZigzagResult& z, int n, int exponent);
ZigzagResult zigzag_from_json(const Json& j);

Json to_json(const ModeSpectrum& m);

Json to_json(const PowerLawFit& f, const std::string& column);
PowerLawFit fit_from_json(const Json& j);

/// Scan rows as N,energy,dz_min,half_length,peak_fraction,uniformity[,beta_c]. Failed rows carry
/// NaN in every numeric column plus a "row N failed: ..." comment.
Table scan_table(const std::vector<ScanRow>& rows, const std::vector<double>* beta_c = nullptr);
std::vector<ScanRow> scan_rows_from_table(const Table& table);

/// Writes to a temporary sibling and renames it over `path`. `before_rename` runs between the two
/// steps; if it throws, the temporary is removed and `path` is left untouched.
void write_file_atomic(const std::filesystem::path& path, const std::string& content,
                       const std::function<void()>& before_rename = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace ccl::cli
