#include "ccl/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace ccl::cli {

namespace {

int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw UsageError("invalid " + what + ": '" + s + "'");
    }
    if (used != s.size()) throw UsageError("invalid " + what + ": '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

struct Shared {
    int p = 4;
    std::string n;
    double tol = 1e-10;
    std::int64_t max_iter = 1'000'000;
    std::string out;
    std::string format;
    std::string cache_dir;
    bool no_cache = false;
    unsigned threads = 1;
};

void add_shared(CLI::App* cmd, Shared& s, bool needs_n) {
    cmd->add_option("--p", s.p, "trap exponent (2 = quadratic, 4 = quartic)")->capture_default_str();
    auto* n = cmd->add_option("--n", s.n, "ion number: N, list a,b,c or range start:stop:step");
    if (needs_n) n->required();
    cmd->add_option("--tol", s.tol, "gradient max-norm tolerance")->capture_default_str();
    cmd->add_option("--max-iter", s.max_iter, "conjugate-gradient iteration limit")->capture_default_str();
    cmd->add_option("-o,--out", s.out, "output file (default: standard output)");
    cmd->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--cache-dir", s.cache_dir, "ground-state cache directory (overrides CCL_CACHE_DIR)");
    cmd->add_flag("--no-cache", s.no_cache, "do not read or write the ground-state cache");
    cmd->add_option("--threads", s.threads, "worker threads for scans (0 = all cores)")->capture_default_str();
}

RunConfig build_config(const std::string& name, const Shared& shared, const std::string& fit_col, bool zigzag_col,
                       std::optional<double> length, bool numeric, std::optional<double> beta,
                       const std::string& input, const std::string& column, const std::string& kind);

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::GroundState: return "ground-state";
        case Command::Scan: return "scan";
        case Command::Variational: return "variational";
        case Command::Zigzag: return "zigzag";
        case Command::Fit: return "fit";
        case Command::Plot: return "plot";
    }
    return "?";
}

const char* to_string(PlotKind k) {
    switch (k) {
        case PlotKind::Positions: return "positions";
        case PlotKind::Density: return "density";
        case PlotKind::Scaling: return "scaling";
        case PlotKind::EnergyComparison: return "energy-comparison";
    }
    return "?";
}

std::vector<int> parse_n_spec(const std::string& text) {
    if (text.empty()) throw UsageError("empty N specification");
    std::vector<int> ns;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw UsageError("range must be start:stop:step, got '" + text + "'");
        const int start = parse_int(parts[0], "range start");
        const int stop = parse_int(parts[1], "range stop");
        const int step = parse_int(parts[2], "range step");
        if (step <= 0 || stop < start) throw UsageError("range must be ascending with a positive step");
        for (int n = start; n <= stop; n += step) ns.push_back(n);
    } else {
        for (const auto& part : split(text, ',')) ns.push_back(parse_int(part, "N"));
        if (!std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
            throw UsageError("N list must be strictly ascending");
        }
    }
    for (int n : ns) {
        if (n < 1) throw UsageError("N must be positive");
    }
    return ns;
}

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("CCL_CACHE_DIR"); env && *env) return env;
    std::filesystem::path base;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
        base = xdg;
    } else if (const char* home = std::getenv("HOME"); home && *home) {
        base = std::filesystem::path(home) / ".cache";
    } else {
        base = std::filesystem::temp_directory_path();
    }
    return base / "coulomb-crystal-lab";
}

RunConfig parse_args(int argc, const char* const* argv) {
    CLI::App app{"Ground states, variational estimates and zigzag thresholds of linear ion crystals", "ccl"};
    app.require_subcommand(1);

    Shared shared;
    std::string fit_col = "none";
    bool zigzag_col = false;
    double beta = 0.0;
    double length = 0.0;
    bool numeric = false;
    std::string input;
    std::string column;
    std::string kind = "positions";

    auto* gs = app.add_subcommand("ground-state", "discrete ground state of one chain");
    add_shared(gs, shared, true);

    auto* sc = app.add_subcommand("scan", "ground-state observables over a range of N");
    add_shared(sc, shared, true);
    sc->add_option("--fit", fit_col, "power-law fit column: dzmin, beta_c, energy, half_length or none")
        ->check(CLI::IsMember({"none", "dzmin", "dz_min", "beta_c", "energy", "half_length"}));
    sc->add_flag("--zigzag", zigzag_col, "append the beta_c column");

    auto* va = app.add_subcommand("variational", "local-density variational estimate");
    add_shared(va, shared, true);
    auto* l_opt = va->add_option("--L", length, "also evaluate the energy functional at this half-length");
    va->add_flag("--numeric", numeric, "also evaluate the functional by quadrature");

    auto* zz = app.add_subcommand("zigzag", "critical transverse confinement beta_c");
    add_shared(zz, shared, true);
    auto* beta_opt = zz->add_option("--beta", beta, "also report the transverse mode spectrum at this beta");

    auto* fi = app.add_subcommand("fit", "power-law fit of a CSV column against N");
    add_shared(fi, shared, false);
    fi->add_option("--input", input, "CSV table with an N column")->required();
    fi->add_option("--column", column, "column to fit")->required();

    auto* pl = app.add_subcommand("plot", "static SVG plot");
    add_shared(pl, shared, false);
    pl->add_option("--kind", kind, "positions, density, scaling or energy-comparison")
        ->check(CLI::IsMember({"positions", "density", "scaling", "energy-comparison"}));
    pl->add_option("--input", input, "scan CSV for scaling / energy-comparison plots");
    pl->add_option("--column", column, "column for scaling plots (default dz_min)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), 0);
    } catch (const CLI::ParseError& e) {
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        throw UsageError(std::string(e.what()) + "\n\n" + sub->help());
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        return build_config(sub->get_name(), shared, fit_col, zigzag_col, l_opt->count() > 0 ? std::optional(length) : std::nullopt,
                            numeric, beta_opt->count() > 0 ? std::optional(beta) : std::nullopt, input, column, kind);
    } catch (const UsageError& e) {
        throw UsageError(std::string(e.what()) + "\n\n" + sub->help());
    }
}

namespace {

RunConfig build_config(const std::string& name, const Shared& shared, const std::string& fit_col, bool zigzag_col,
                       std::optional<double> length, bool numeric, std::optional<double> beta,
                       const std::string& input, const std::string& column, const std::string& kind) {
    RunConfig cfg;
    static const std::map<std::string, Command> commands{
        {"ground-state", Command::GroundState}, {"scan", Command::Scan}, {"variational", Command::Variational},
        {"zigzag", Command::Zigzag},            {"fit", Command::Fit},   {"plot", Command::Plot}};
    cfg.command = commands.at(name);

    try {
        PotentialSpec check(shared.p);
        (void)check;
    } catch (const ccl::Error& e) {
        throw UsageError(e.what());
    }
    cfg.exponent = shared.p;
    if (!shared.n.empty()) cfg.ns = parse_n_spec(shared.n);
    cfg.solver.gradient_tolerance = shared.tol;
    cfg.solver.max_iterations = shared.max_iter;
    try {
        cfg.solver.validate();
    } catch (const ccl::Error& e) {
        throw UsageError(e.what());
    }
    cfg.output = shared.out == "-" ? std::filesystem::path{} : std::filesystem::path{shared.out};
    cfg.threads = shared.threads;
    if (!shared.no_cache) cfg.cache_dir = shared.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(shared.cache_dir);

    const bool table = cfg.command == Command::Scan || (cfg.command == Command::Zigzag && cfg.ns.size() > 1);
    if (shared.format.empty()) {
        cfg.format = table ? OutputFormat::Csv : OutputFormat::Json;
    } else {
        cfg.format = shared.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    }

    auto single_n = [&] {
        if (cfg.ns.size() != 1) throw UsageError(name + " takes a single N");
    };
    switch (cfg.command) {
        case Command::GroundState:
            single_n();
            break;
        case Command::Variational:
            single_n();
            if (cfg.exponent != 2 && cfg.exponent != 4) throw UsageError("variational needs --p 2 or --p 4");
            if (length) {
                if (!(*length > 0.0)) throw UsageError("--L must be positive");
                cfg.half_length = length;
            }
            cfg.numeric_functional = numeric;
            break;
        case Command::Scan:
            for (int n : cfg.ns) {
                if (n < 2) throw UsageError("scan needs N >= 2");
            }
            cfg.fit_column = fit_col == "none" ? "" : (fit_col == "dzmin" ? "dz_min" : fit_col);
            cfg.zigzag_column = zigzag_col || cfg.fit_column == "beta_c";
            break;
        case Command::Zigzag:
            for (int n : cfg.ns) {
                if (n < 2) throw UsageError("zigzag needs N >= 2");
            }
            if (beta) {
                if (!(*beta > 0.0)) throw UsageError("--beta must be positive");
                if (cfg.ns.size() != 1) throw UsageError("--beta needs a single N");
                cfg.beta = beta;
            }
            break;
        case Command::Fit:
            cfg.input = input;
            cfg.fit_column = column == "dzmin" ? "dz_min" : column;
            cfg.format = OutputFormat::Json;
            break;
        case Command::Plot: {
            static const std::map<std::string, PlotKind> kinds{{"positions", PlotKind::Positions},
                                                               {"density", PlotKind::Density},
                                                               {"scaling", PlotKind::Scaling},
                                                               {"energy-comparison", PlotKind::EnergyComparison}};
            cfg.plot_kind = kinds.at(kind);
            cfg.input = input;
            cfg.fit_column = column.empty() ? "dz_min" : column;
            if (cfg.output.empty()) throw UsageError("plot needs --out <file.svg>");
            const bool from_table = cfg.plot_kind == PlotKind::Scaling || cfg.plot_kind == PlotKind::EnergyComparison;
            if (from_table && cfg.input.empty()) throw UsageError(std::string(to_string(cfg.plot_kind)) + " plot needs --input");
            if (!from_table && cfg.ns.empty()) throw UsageError(std::string(to_string(cfg.plot_kind)) + " plot needs --n");
            if (cfg.plot_kind == PlotKind::Density && cfg.exponent != 2 && cfg.exponent != 4) {
                throw UsageError("density plot overlays the ansatz and needs --p 2 or --p 4");
            }
            if (cfg.plot_kind == PlotKind::EnergyComparison && cfg.exponent != 2 && cfg.exponent != 4) {
                throw UsageError("energy-comparison plot needs --p 2 or --p 4");
            }
            break;
        }
    }
    return cfg;
}

}  // namespace

}  // namespace ccl::cli
