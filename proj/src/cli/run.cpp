#include "ccl/cli/run.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "ccl/cli/cache.hpp"
#include "ccl/cli/serialize.hpp"
#include "ccl/cli/svg_plot.hpp"

namespace ccl::cli {

namespace {

// Keeps every result of this run in memory in front of the optional file cache, so a second
// pass over the same N (e.g. the beta_c column of a scan) does not solve again.
class RunCache final : public GroundStateCache {
public:
    explicit RunCache(GroundStateCache* backing) : backing_(backing) {}

    std::optional<GroundStateResult> lookup(int exponent, int n, double tol) override {
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find({exponent, n, tol}); it != memo_.end()) return it->second;
        }
        if (!backing_) return std::nullopt;
        auto hit = backing_->lookup(exponent, n, tol);
        if (hit) remember(exponent, n, tol, *hit);
        return hit;
    }

    void store(int exponent, int n, double tol, const GroundStateResult& result) override {
        remember(exponent, n, tol, result);
        if (backing_) backing_->store(exponent, n, tol, result);
    }

private:
    void remember(int exponent, int n, double tol, const GroundStateResult& r) {
        std::lock_guard lock(mutex_);
        memo_.insert_or_assign(Key{exponent, n, tol}, r);
    }

    using Key = std::tuple<int, int, double>;
    GroundStateCache* backing_;
    std::mutex mutex_;
    std::map<Key, GroundStateResult> memo_;
};

struct Context {
    const RunConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    PotentialSpec potential;
    std::optional<FileCache> file_cache{};
    std::optional<RunCache> cache{};

    Context(const RunConfig& c, std::ostream& o, std::ostream& e) : cfg(c), out(o), err(e), potential(c.exponent) {
        if (cfg.cache_dir) file_cache.emplace(*cfg.cache_dir, [this](const std::string& m) { err << "warning: " << m << '\n'; });
        cache.emplace(file_cache ? &*file_cache : nullptr);
    }

    ScanOptions scan_options() {
        return {cfg.solver, cfg.threads, &*cache};
    }

    GroundStateResult solve(int n) { return ground_state(n, potential, cfg.solver, &*cache); }

    void emit(const std::string& content) {
        if (cfg.output.empty()) {
            out << content;
        } else {
            write_file_atomic(cfg.output, content);
        }
    }

    void emit_fit_sidecar(const PowerLawFit& fit, const std::string& column) {
        if (cfg.output.empty()) return;
        std::filesystem::path side = cfg.output;
        side += ".fit.json";
        write_file_atomic(side, dump_json(to_json(fit, column)));
    }
};

std::string fit_comment(const PowerLawFit& f, const std::string& column) {
    return "fit column=" + column + " prefactor=" + format_double(f.prefactor) + " exponent=" +
           format_double(f.exponent) + " r_squared=" + format_double(f.r_squared) +
           " n_min=" + format_double(f.n_range.first) + " n_max=" + format_double(f.n_range.second);
}

std::optional<PowerLawFit> fit_column(const Table& t, const std::string& column) {
    const auto ns = t.column("N");
    const auto ys = t.column(column);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] >= kMinFitN && std::isfinite(ys[i]) && ys[i] > 0.0) pts.emplace_back(ns[i], ys[i]);
    }
    if (pts.size() < 3) return std::nullopt;
    return power_law_fit(pts);
}

Json table_json(const Table& t, const char* kind, int exponent) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["code_version"] = kCodeVersion;
    j["potential"] = {{"exponent", exponent}};
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json row;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            if (t.columns[i] == "N") {
                row["N"] = static_cast<int>(r[i]);
            } else {
                row[t.columns[i]] = r[i];
            }
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    if (!t.comments.empty()) j["notes"] = t.comments;
    return j;
}

int cmd_ground_state(Context& ctx) {
    const int n = ctx.cfg.ns.front();
    const GroundStateResult r = ctx.solve(n);
    if (ctx.cfg.format == OutputFormat::Json) {
        ctx.emit(dump_json(to_json(r, ctx.cfg.exponent)));
    } else {
        Table t{{"index", "z"}, {}, {}};
        for (std::size_t i = 0; i < r.chain.size(); ++i) t.rows.push_back({static_cast<double>(i), r.chain[i]});
        ctx.emit(write_csv(t));
    }
    if (r.asymmetric) ctx.err << "warning: ground state is not reflection-symmetric within 1e-6\n";
    if (!r.converged) {
        ctx.err << "error: N=" << n << ": " << r.diagnostics << '\n';
        return kExitComputation;
    }
    return kExitOk;
}

int cmd_scan(Context& ctx) {
    const auto rows = scan(ctx.cfg.ns, ctx.potential, ctx.scan_options());
    std::vector<double> beta;
    if (ctx.cfg.zigzag_column) {
        const auto bc = beta_c_scan(ctx.cfg.ns, ctx.potential, ctx.scan_options());
        for (const auto& r : bc.rows) beta.push_back(r.ok ? r.beta_c : std::nan(""));
    }
    Table t = scan_table(rows, ctx.cfg.zigzag_column ? &beta : nullptr);
    std::optional<PowerLawFit> fit;
    if (!ctx.cfg.fit_column.empty()) {
        fit = fit_column(t, ctx.cfg.fit_column);
        if (fit) {
            t.comments.push_back(fit_comment(*fit, ctx.cfg.fit_column));
        } else {
            ctx.err << "warning: fewer than 3 usable rows with N >= " << kMinFitN << "; no fit\n";
        }
    }
    if (ctx.cfg.format == OutputFormat::Csv) {
        ctx.emit(write_csv(t));
    } else {
        Json j = table_json(t, "scan", ctx.cfg.exponent);
        if (fit) j["fit"] = to_json(*fit, ctx.cfg.fit_column);
        ctx.emit(dump_json(j));
    }
    if (fit) ctx.emit_fit_sidecar(*fit, ctx.cfg.fit_column);
    int status = kExitOk;
    for (const auto& r : rows) {
        if (!r.ok) {
            ctx.err << "error: N=" << r.n << ": " << r.error << '\n';
            status = kExitComputation;
        }
    }
    return status;
}

int cmd_variational(Context& ctx) {
    const int n = ctx.cfg.ns.front();
    const AnsatzFamily family = *family_for(ctx.potential);
    const VariationalSolution sol = optimal_solution(n, family);
    Json j = to_json(sol);
    if (ctx.cfg.half_length) {
        const double l = *ctx.cfg.half_length;
        j["L"] = l;
        if (family == AnsatzFamily::InvertedQuartic) j["E_of_L"] = closed_form_energy_of_L(n, l, family);
        if (ctx.cfg.numeric_functional) j["E_of_L_numeric"] = functional_energy_numeric(n, l, family);
    } else if (ctx.cfg.numeric_functional) {
        j["E_min_numeric"] = functional_energy_numeric(n, sol.l_min, family);
    }
    ctx.emit(dump_json(j));
    return kExitOk;
}

int cmd_zigzag(Context& ctx) {
    if (ctx.cfg.ns.size() == 1) {
        const int n = ctx.cfg.ns.front();
        const GroundStateResult r = ctx.solve(n);
        if (!r.converged) {
            ctx.err << "error: N=" << n << ": " << r.diagnostics << '\n';
            return kExitComputation;
        }
        Json j = to_json(critical_beta(r.chain), n, ctx.cfg.exponent);
        if (ctx.cfg.beta) j["spectrum"] = to_json(mode_spectrum(r.chain, *ctx.cfg.beta));
        ctx.emit(dump_json(j));
        return kExitOk;
    }
    const auto bc = beta_c_scan(ctx.cfg.ns, ctx.potential, ctx.scan_options());
    Table t{{"N", "beta_c", "dz_min"}, {}, {}};
    int status = kExitOk;
    for (const auto& r : bc.rows) {
        if (r.ok) {
            t.rows.push_back({static_cast<double>(r.n), r.beta_c, r.dz_min});
        } else {
            t.rows.push_back({static_cast<double>(r.n), std::nan(""), std::nan("")});
            t.comments.push_back("row " + std::to_string(r.n) + " failed: " + r.error);
            ctx.err << "error: N=" << r.n << ": " << r.error << '\n';
            status = kExitComputation;
        }
    }
    if (bc.fit) t.comments.push_back(fit_comment(*bc.fit, "beta_c"));
    if (ctx.cfg.format == OutputFormat::Csv) {
        ctx.emit(write_csv(t));
    } else {
        Json j = table_json(t, "zigzag-scan", ctx.cfg.exponent);
        if (bc.fit) j["fit"] = to_json(*bc.fit, "beta_c");
        ctx.emit(dump_json(j));
    }
    if (bc.fit) ctx.emit_fit_sidecar(*bc.fit, "beta_c");
    return status;
}

int cmd_fit(Context& ctx) {
    const Table t = parse_csv(read_file(ctx.cfg.input));
    const auto fit = fit_column(t, ctx.cfg.fit_column);
    if (!fit) throw FormatError("need at least 3 finite positive rows with N >= " + std::to_string(kMinFitN));
    ctx.emit(dump_json(to_json(*fit, ctx.cfg.fit_column)));
    return kExitOk;
}

int cmd_plot(Context& ctx) {
    PlotSpec spec{ctx.cfg.plot_kind, {}, ctx.cfg.fit_column, "N"};
    Table t;
    int status = kExitOk;
    const std::string trap = ctx.cfg.exponent == 2 ? "quadratic" : ctx.cfg.exponent == 4 ? "quartic" : "z^" + std::to_string(ctx.cfg.exponent);
    switch (ctx.cfg.plot_kind) {
        case PlotKind::Positions:
        case PlotKind::Density: {
            const bool dens = ctx.cfg.plot_kind == PlotKind::Density;
            t.columns = dens ? std::vector<std::string>{"series", "z", "n", "n_ansatz"}
                             : std::vector<std::string>{"series", "z"};
            for (int n : ctx.cfg.ns) {
                const GroundStateResult r = ctx.solve(n);
                if (!r.converged) {
                    ctx.err << "error: N=" << n << ": " << r.diagnostics << '\n';
                    status = kExitComputation;
                }
                if (!dens) {
                    for (double z : r.chain.positions()) t.rows.push_back({static_cast<double>(n), z});
                    continue;
                }
                if (n < 2) throw DomainError("density plot needs N >= 2");
                const auto family = *family_for(ctx.potential);
                const double l = optimal_solution(n, family).l_min;
                for (const auto& s : local_density(r.chain).samples) {
                    t.rows.push_back({static_cast<double>(n), s.z, s.n, ansatz_density(s.z, n, l, family)});
                }
            }
            spec.title = dens ? "Ion density, " + trap + " trap (markers: discrete, dashed: ansatz)"
                              : "Ground-state crystals, " + trap + " trap";
            break;
        }
        case PlotKind::Scaling:
            t = parse_csv(read_file(ctx.cfg.input));
            spec.title = ctx.cfg.fit_column + " versus N";
            break;
        case PlotKind::EnergyComparison: {
            const Table in = parse_csv(read_file(ctx.cfg.input));
            const auto ns = in.column("N");
            const auto e = in.column("energy");
            const auto family = *family_for(ctx.potential);
            t.columns = {"N", "energy_exact", "energy_variational"};
            for (std::size_t i = 0; i < ns.size(); ++i) {
                const int n = static_cast<int>(ns[i]);
                t.rows.push_back({ns[i], e[i], optimal_solution(n, family).e_min});
            }
            spec.title = "Ground-state energy, " + trap + " trap";
            break;
        }
    }
    emit_plot(t, spec, ctx.cfg.output);
    return status;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        Context ctx(cfg, out, err);
        switch (cfg.command) {
            case Command::GroundState: return cmd_ground_state(ctx);
            case Command::Scan: return cmd_scan(ctx);
            case Command::Variational: return cmd_variational(ctx);
            case Command::Zigzag: return cmd_zigzag(ctx);
            case Command::Fit: return cmd_fit(ctx);
            case Command::Plot: return cmd_plot(ctx);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        err << "error: invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ColumnMismatchError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitComputation;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const UsageError& e) {
        (e.status() == 0 ? out : err) << e.what();
        return e.status();
    }
    return run(cfg, out, err);
}

}  // namespace ccl::cli
