#include "ccl/cli/serialize.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace ccl::cli {

namespace {

void dump_value(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close_pad(2 * depth, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                dump_value(value, out, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                dump_value(value, out, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

double number(const Json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) throw FormatError(std::string("field '") + key + "' is not a number");
    return v.get<double>();
}

template <class T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

void check_kind(const Json& j, const char* kind) {
    if (!j.is_object()) throw FormatError("expected a JSON object");
    if (field<int>(j, "schema_version") != kSchemaVersion) throw FormatError("unsupported schema_version");
    if (field<std::string>(j, "kind") != kind) throw FormatError(std::string("expected kind '") + kind + "'");
}

Json vector_json(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

double parse_cell(const std::string& cell, std::size_t line) {
    if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw FormatError("line " + std::to_string(line) + ": not a number: '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const Json& j) {
    std::string out;
    dump_value(j, out, 0);
    out += "\n";
    return out;
}

std::optional<std::size_t> Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    return std::nullopt;
}

std::vector<double> Table::column(const std::string& name) const {
    const auto idx = column_index(name);
    if (!idx) throw FormatError("table has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(*idx));
    return out;
}

std::string write_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            // N and other integral columns print without exponent noise under %.17g
            out += format_double(row[i]);
        }
        out += '\n';
    }
    for (const auto& c : table.comments) out += "# " + c + '\n';
    return out;
}

Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (!header) {
            t.columns = std::move(cells);
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                              " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, lineno));
        t.rows.push_back(std::move(row));
    }
    if (!header) throw FormatError("CSV has no header row");
    return t;
}

Json to_json(const GroundStateResult& r, int exponent) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "ground-state";
    j["code_version"] = kCodeVersion;
    j["potential"] = {{"exponent", exponent}};
    j["N"] = r.chain.size();
    j["energy"] = r.energy;
    j["gradient_max_norm"] = r.gradient_max_norm;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["asymmetric"] = r.asymmetric;
    j["diagnostics"] = r.diagnostics;
    j["positions"] = vector_json(r.chain.positions());
    return j;
}

GroundStateResult ground_state_from_json(const Json& j) {
    check_kind(j, "ground-state");
    auto positions = field<std::vector<double>>(j, "positions");
    if (positions.size() != field<std::size_t>(j, "N")) throw FormatError("N does not match positions");
    std::optional<IonChain> chain;
    try {
        chain.emplace(std::move(positions));
    } catch (const ccl::Error& e) {
        throw FormatError(std::string("positions: ") + e.what());
    }
    GroundStateResult r{*chain};
    r.energy = number(j, "energy");
    r.gradient_max_norm = number(j, "gradient_max_norm");
    r.iterations = field<std::int64_t>(j, "iterations");
    r.converged = field<bool>(j, "converged");
    r.asymmetric = field<bool>(j, "asymmetric");
    r.diagnostics = field<std::string>(j, "diagnostics");
    return r;
}

Json to_json(const VariationalSolution& s) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "variational";
    j["code_version"] = kCodeVersion;
    j["family"] = to_string(s.family);
    j["N"] = s.n;
    j["L_min"] = s.l_min;
    j["E_min"] = s.e_min;
    return j;
}

VariationalSolution variational_from_json(const Json& j) {
    check_kind(j, "variational");
    const auto family = field<std::string>(j, "family");
    AnsatzFamily f;
    if (family == to_string(AnsatzFamily::InvertedParabola)) {
        f = AnsatzFamily::InvertedParabola;
    } else if (family == to_string(AnsatzFamily::InvertedQuartic)) {
        f = AnsatzFamily::InvertedQuartic;
    } else {
        throw FormatError("unknown ansatz family '" + family + "'");
    }
    return {f, field<int>(j, "N"), number(j, "L_min"), number(j, "E_min")};
}

Json to_json(const ZigzagResult& z, int n, int exponent) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "zigzag";
    j["code_version"] = kCodeVersion;
    j["potential"] = {{"exponent", exponent}};
    j["N"] = n;
    j["beta_c"] = z.beta_c;
    j["lambda_min_base"] = z.lambda_min_base;
    j["mode"] = vector_json({z.mode.data(), static_cast<std::size_t>(z.mode.size())});
    return j;
}

ZigzagResult zigzag_from_json(const Json& j) {
    check_kind(j, "zigzag");
    const auto mode = field<std::vector<double>>(j, "mode");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(mode.data(), static_cast<Eigen::Index>(mode.size()));
    return {number(j, "beta_c"), number(j, "lambda_min_base"), std::move(v)};
}

Json to_json(const ModeSpectrum& m) {
    Json j;
    j["beta"] = m.beta;
    j["unstable"] = m.unstable;
    j["eigenvalues"] = vector_json({m.eigenvalues.data(), static_cast<std::size_t>(m.eigenvalues.size())});
    j["frequencies"] = vector_json({m.frequencies.data(), static_cast<std::size_t>(m.frequencies.size())});
    return j;
}

Json to_json(const PowerLawFit& f, const std::string& column) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "power-law-fit";
    j["code_version"] = kCodeVersion;
    j["column"] = column;
    j["prefactor"] = f.prefactor;
    j["exponent"] = f.exponent;
    j["r_squared"] = f.r_squared;
    j["n_min"] = f.n_range.first;
    j["n_max"] = f.n_range.second;
    return j;
}

PowerLawFit fit_from_json(const Json& j) {
    check_kind(j, "power-law-fit");
    return {number(j, "prefactor"), number(j, "exponent"), number(j, "r_squared"),
            {number(j, "n_min"), number(j, "n_max")}};
}

Table scan_table(const std::vector<ScanRow>& rows, const std::vector<double>* beta_c) {
    Table t;
    t.columns = {"N", "energy", "dz_min", "half_length", "peak_fraction", "uniformity"};
    if (beta_c) t.columns.push_back("beta_c");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        std::vector<double> row{static_cast<double>(r.n)};
        if (r.ok) {
            row.insert(row.end(), {r.energy, r.dz_min, r.half_length, r.peak_fraction, r.uniformity});
        } else {
            row.insert(row.end(), 5, nan);
            t.comments.push_back("row " + std::to_string(r.n) + " failed: " + r.error);
        }
        if (beta_c) row.push_back(r.ok ? beta_c->at(k) : nan);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<ScanRow> scan_rows_from_table(const Table& table) {
    const auto n = table.column("N");
    const auto e = table.column("energy");
    const auto dz = table.column("dz_min");
    const auto hl = table.column("half_length");
    const auto pf = table.column("peak_fraction");
    const auto un = table.column("uniformity");
    std::vector<ScanRow> rows(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
        auto& r = rows[k];
        r.n = static_cast<int>(n[k]);
        r.ok = !std::isnan(e[k]);
        r.energy = e[k];
        r.dz_min = dz[k];
        r.half_length = hl[k];
        r.peak_fraction = pf[k];
        r.uniformity = un[k];
    }
    const std::string prefix = "row ";
    for (const auto& c : table.comments) {
        if (c.rfind(prefix, 0) != 0) continue;
        const auto colon = c.find(" failed: ");
        if (colon == std::string::npos) continue;
        const int id = std::atoi(c.substr(prefix.size(), colon - prefix.size()).c_str());
        for (auto& r : rows) {
            if (r.n == id && !r.ok) r.error = c.substr(colon + 9);
        }
    }
    return rows;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content,
                       const std::function<void()>& before_rename) {
    static std::atomic<unsigned> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.close();
        if (!f) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("failed writing " + tmp.string());
        }
    }
    try {
        if (before_rename) before_rename();
    } catch (...) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("error reading " + path.string());
    return ss.str();
}

}  // namespace ccl::cli
