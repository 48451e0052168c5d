#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccl/solver.hpp"

namespace ccl::cli {

/// Bad command line; the message already contains usage text. Exit status 2 (0 for --help).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what, int status = 2) : std::runtime_error(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

enum class Command { GroundState, Scan, Variational, Zigzag, Fit, Plot };
enum class OutputFormat { Csv, Json };
enum class PlotKind { Positions, Density, Scaling, EnergyComparison };

const char* to_string(Command c);
const char* to_string(PlotKind k);

struct RunConfig {
    Command command = Command::GroundState;
    int exponent = 4;
    std::vector<int> ns{};
    SolverOptions solver{};
    std::filesystem::path output{};  // empty: standard output
    OutputFormat format = OutputFormat::Json;
    std::optional<std::filesystem::path> cache_dir{};  // resolved cache directory, nullopt disables
    unsigned threads = 1;

    std::string fit_column{};  // scan: "dz_min", "beta_c", ...; fit/plot: column to use
    bool zigzag_column = false;
    std::optional<double> beta{};          // zigzag: also report the mode spectrum here
    std::optional<double> half_length{};   // variational: evaluate E(L) here
    bool numeric_functional = false;       // variational: also run the quadrature
    std::filesystem::path input{};         // fit/plot input table
    PlotKind plot_kind = PlotKind::Positions;
};

/// "7", "10,20,50" or "start:stop:step" (stop included when aligned). Result is ascending.
std::vector<int> parse_n_spec(const std::string& text);

/// CCL_CACHE_DIR, else $XDG_CACHE_HOME or $HOME/.cache, + "/coulomb-crystal-lab".
std::filesystem::path default_cache_dir();

RunConfig parse_args(int argc, const char* const* argv);

}  // namespace ccl::cli
