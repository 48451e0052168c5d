#include "ccl/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "ccl/analysis.hpp"

namespace ccl::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double fraction(double v) const {
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            const int d0 = static_cast<int>(std::floor(std::log10(lo)));
            const int d1 = static_cast<int>(std::ceil(std::log10(hi)));
            const bool sparse = d1 - d0 > 3;
            for (int d = d0; d <= d1; ++d) {
                for (double m : {1.0, 2.0, 5.0}) {
                    if (sparse && m != 1.0) continue;
                    const double v = m * std::pow(10.0, d);
                    if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) t.push_back(v);
                }
            }
            return t;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
            t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        }
        return t;
    }
};

Axis make_axis(const std::vector<double>& values, bool log, bool include_zero = false) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v) || (log && v <= 0.0)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) {
        lo = log ? 1.0 : 0.0;
        hi = log ? 10.0 : 1.0;
    }
    if (include_zero && !log) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    if (log) {
        if (hi <= lo) hi = lo * 10.0;
        return {lo / 1.15, hi * 1.15, true};
    }
    if (hi <= lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad, false};
}

class Canvas {
public:
    Canvas(double x, double y, double w, double h, Axis ax, Axis ay) : x_(x), y_(y), w_(w), h_(h), ax_(ax), ay_(ay) {}

    double px(double v) const { return x_ + ax_.fraction(v) * w_; }
    double py(double v) const { return y_ + h_ - ay_.fraction(v) * h_; }
    bool visible(double vx, double vy) const {
        return std::isfinite(vx) && std::isfinite(vy) && (!ax_.log || vx > 0) && (!ay_.log || vy > 0);
    }

    void frame(std::ostringstream& os, const std::string& xlabel, const std::string& ylabel, bool y_ticks = true) const {
        os << "<rect x=\"" << num(x_) << "\" y=\"" << num(y_) << "\" width=\"" << num(w_) << "\" height=\"" << num(h_)
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : ax_.ticks()) {
            const double x = px(t);
            os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y_ + h_) << "\" x2=\"" << num(x) << "\" y2=\""
               << num(y_ + h_ + 5) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << num(x) << "\" y=\"" << num(y_ + h_ + 18)
               << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
        }
        if (y_ticks) {
            for (double t : ay_.ticks()) {
                const double y = py(t);
                os << "<line x1=\"" << num(x_ - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x_) << "\" y2=\""
                   << num(y) << "\" stroke=\"black\"/>\n";
                os << "<text x=\"" << num(x_ - 8) << "\" y=\"" << num(y + 4)
                   << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
            }
        }
        os << "<text x=\"" << num(x_ + w_ / 2) << "\" y=\"" << num(y_ + h_ + 36)
           << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
        if (!ylabel.empty()) {
            os << "<text x=\"" << num(x_ - 48) << "\" y=\"" << num(y_ + h_ / 2) << "\" font-size=\"13\" "
               << "text-anchor=\"middle\" transform=\"rotate(-90 " << num(x_ - 48) << ' ' << num(y_ + h_ / 2) << ")\">"
               << escape(ylabel) << "</text>\n";
        }
    }

    void marker(std::ostringstream& os, double vx, double vy, const char* color, double r = 3.5) const {
        if (!visible(vx, vy)) return;
        os << "<circle class=\"marker\" cx=\"" << num(px(vx)) << "\" cy=\"" << num(py(vy)) << "\" r=\"" << num(r)
           << "\" fill=\"" << color << "\"/>\n";
    }

    void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts, const char* color,
                  bool dashed = false) const {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
           << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        bool first = true;
        for (const auto& [vx, vy] : pts) {
            if (!visible(vx, vy)) continue;
            if (!first) os << ' ';
            first = false;
            os << num(px(vx)) << ',' << num(py(vy));
        }
        os << "\"/>\n";
    }

private:
    double x_, y_, w_, h_;
    Axis ax_, ay_;
};

void require(const Table& data, std::initializer_list<const char*> cols, PlotKind kind) {
    if (data.rows.empty()) throw ColumnMismatchError(std::string(to_string(kind)) + " plot: table has no rows");
    for (const char* c : cols) {
        if (!data.column_index(c)) {
            throw ColumnMismatchError(std::string(to_string(kind)) + " plot: missing column '" + c + "'");
        }
    }
}

// rows grouped by the series column, in first-appearance order
std::vector<std::pair<double, std::vector<std::size_t>>> group_series(const Table& data) {
    const std::size_t s = *data.column_index("series");
    std::vector<std::pair<double, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const double key = data.rows[i][s];
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(i);
    }
    return groups;
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape(title)
           << "</text>\n";
    }
}

void legend(std::ostringstream& os, double x, double y, std::size_t index, const std::string& text, bool line) {
    const char* color = kPalette[index % std::size(kPalette)];
    const double ly = y + 16.0 * static_cast<double>(index);
    if (line) {
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(x + 18) << "\" y2=\"" << num(ly)
           << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    } else {
        os << "<circle cx=\"" << num(x + 9) << "\" cy=\"" << num(ly) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    os << "<text x=\"" << num(x + 24) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">" << escape(text)
       << "</text>\n";
}

void positions(std::ostringstream& os, const Table& data, const PlotSpec& spec) {
    const auto groups = group_series(data);
    const auto z = data.column("z");
    Axis ax = make_axis(z, false);
    Axis ay{-0.5, static_cast<double>(groups.size()) - 0.5, false};
    Canvas c(90, 40, kWidth - 130, kHeight - 100, ax, ay);
    c.frame(os, "z (dimensionless)", "", false);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double row = static_cast<double>(groups.size() - 1 - g);
        const char* color = kPalette[g % std::size(kPalette)];
        c.polyline(os, {{ax.lo, row}, {ax.hi, row}}, "#bbbbbb");
        for (std::size_t i : groups[g].second) c.marker(os, z[i], row, color, 4.5);
        os << "<text x=\"82\" y=\"" << num(c.py(row) + 4) << "\" font-size=\"12\" text-anchor=\"end\">"
           << escape(spec.series_label) << '=' << tick_label(groups[g].first) << "</text>\n";
    }
}

void density(std::ostringstream& os, const Table& data, const PlotSpec& spec) {
    const auto groups = group_series(data);
    const auto z = data.column("z");
    const auto n = data.column("n");
    const bool ansatz = data.column_index("n_ansatz").has_value();
    std::vector<double> all_n = n;
    std::vector<double> na;
    if (ansatz) {
        na = data.column("n_ansatz");
        all_n.insert(all_n.end(), na.begin(), na.end());
    }
    Canvas c(80, 40, kWidth - 120, kHeight - 100, make_axis(z, false), make_axis(all_n, false, true));
    c.frame(os, "z (dimensionless)", "n (ions per unit length)");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const char* color = kPalette[g % std::size(kPalette)];
        for (std::size_t i : groups[g].second) c.marker(os, z[i], n[i], color, 2.5);
        if (ansatz) {
            std::vector<std::pair<double, double>> line;
            for (std::size_t i : groups[g].second) line.emplace_back(z[i], na[i]);
            std::sort(line.begin(), line.end());
            c.polyline(os, line, color, true);
        }
        legend(os, kWidth - 150, 56, g, spec.series_label + "=" + tick_label(groups[g].first), false);
    }
}

void scaling(std::ostringstream& os, const Table& data, const PlotSpec& spec) {
    const auto ns = data.column("N");
    const auto ys = data.column(spec.y_column);
    Canvas c(80, 40, kWidth - 120, kHeight - 100, make_axis(ns, true), make_axis(ys, true));
    c.frame(os, "N", spec.y_column);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        c.marker(os, ns[i], ys[i], kPalette[0]);
        if (ns[i] >= kMinFitN && std::isfinite(ys[i]) && ys[i] > 0.0) pts.emplace_back(ns[i], ys[i]);
    }
    legend(os, 100, 56, 0, "discrete ground states", false);
    if (pts.size() >= 3) {
        const PowerLawFit fit = power_law_fit(pts);
        c.polyline(os, {{fit.n_range.first, fit(fit.n_range.first)}, {fit.n_range.second, fit(fit.n_range.second)}},
                   kPalette[1]);
        char buf[96];
        std::snprintf(buf, sizeof buf, "fit %.3g N^%.3g", fit.prefactor, fit.exponent);
        legend(os, 100, 56, 1, buf, true);
    }
}

void energy_comparison(std::ostringstream& os, const Table& data) {
    const auto ns = data.column("N");
    const auto exact = data.column("energy_exact");
    const auto var = data.column("energy_variational");
    std::vector<double> both = exact;
    both.insert(both.end(), var.begin(), var.end());
    std::vector<double> diff(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) diff[i] = exact[i] - var[i];

    const Axis ax = make_axis(ns, false);
    Canvas top(90, 40, kWidth - 130, 190, ax, make_axis(both, false));
    top.frame(os, "", "E");
    std::vector<std::pair<double, double>> e_line;
    std::vector<std::pair<double, double>> v_line;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        top.marker(os, ns[i], exact[i], kPalette[0]);
        e_line.emplace_back(ns[i], exact[i]);
        v_line.emplace_back(ns[i], var[i]);
    }
    top.polyline(os, v_line, kPalette[1]);
    legend(os, 110, 56, 0, "discrete ground state", false);
    legend(os, 110, 56, 1, "variational estimate", true);

    Canvas bottom(90, 280, kWidth - 130, 90, ax, make_axis(diff, false, true));
    bottom.frame(os, "N", "exact - var.");
    std::vector<std::pair<double, double>> d_line;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        bottom.marker(os, ns[i], diff[i], kPalette[2], 3.0);
        d_line.emplace_back(ns[i], diff[i]);
    }
    bottom.polyline(os, d_line, kPalette[2]);
}

}  // namespace

std::string render_svg(const Table& data, const PlotSpec& spec) {
    switch (spec.kind) {
        case PlotKind::Positions: require(data, {"series", "z"}, spec.kind); break;
        case PlotKind::Density: require(data, {"series", "z", "n"}, spec.kind); break;
        case PlotKind::Scaling: require(data, {"N", spec.y_column.c_str()}, spec.kind); break;
        case PlotKind::EnergyComparison: require(data, {"N", "energy_exact", "energy_variational"}, spec.kind); break;
    }
    std::ostringstream os;
    header(os, spec.title);
    switch (spec.kind) {
        case PlotKind::Positions: positions(os, data, spec); break;
        case PlotKind::Density: density(os, data, spec); break;
        case PlotKind::Scaling: scaling(os, data, spec); break;
        case PlotKind::EnergyComparison: energy_comparison(os, data); break;
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const Table& data, const PlotSpec& spec, const std::filesystem::path& path) {
    write_file_atomic(path, render_svg(data, spec));
}

}  // namespace ccl::cli
