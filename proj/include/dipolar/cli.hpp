// Command-line front end: flat key = value config files, flag
// overrides, dispatch to the solver modules, and deterministic result
// records.
//
// Grammar: a config file holds `key = value` lines, `#` starts a
// comment.  Every key can also be given as `--key value` on the command
// line; flags win over the file.  Unknown keys are rejected.  Exit
// codes: 0 ok, 1 usage/config error, 2 indeterminate, 3 collapse
// detected, 4 non-convergence, 5 I/O error.

#ifndef DIPOLAR_CLI_HPP
#define DIPOLAR_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "gn_solver.hpp"
#include "grid.hpp"
#include "ground_state.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "stability.hpp"

namespace dipolar {

inline const char* version_string() { return "dipolar-stab 0.1.0"; }

enum class ExitCode : int {
    Ok = 0,
    UsageError = 1,
    Indeterminate = 2,
    CollapseDetected = 3,
    NonConvergence = 4,
    IoError = 5,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        // Fraction tokens ("1/3") are accepted for exact-looking input;
        // the nearest representable double is used downstream.
        const std::string& s = it->second;
        std::size_t slash = s.find('/');
        try {
            if (slash != std::string::npos) {
                double num = std::stod(s.substr(0, slash));
                double den = std::stod(s.substr(slash + 1));
                if (den == 0) throw ConfigError("division by zero in key " + key);
                return num / den;
            }
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse number from '" + s + "'");
        }
    }

    int get_int(const std::string& key, int dflt) const {
        double v = get_double(key, dflt);
        if (v != std::floor(v))
            throw ConfigError("key '" + key + "': integer expected");
        return static_cast<int>(v);
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        const std::string& s = it->second;
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError("key '" + key + "': boolean expected, got '" + s + "'");
    }

    std::vector<int> get_int_list(const std::string& key, const std::string& dflt) const {
        std::string s = get_string(key, dflt);
        std::vector<int> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("key '" + key + "': integer list expected");
            }
        }
        if (out.empty()) throw ConfigError("key '" + key + "': empty list");
        return out;
    }
};

namespace cli_detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline const std::set<std::string>& allowed_keys(const std::string& command) {
    static const std::set<std::string> common = {
        "config", "output", "csv", "seed", "timestamps"};
    static const std::map<std::string, std::set<std::string>> per_cmd = {
        {"gn-constant", {"a", "b", "n", "box", "refine", "tol_rel", "tol_grad",
                         "max_iter"}},
        {"stability", {"beta", "lambda", "n3sq", "tol", "borderline", "n", "box",
                       "refine"}},
        {"ground-state", {"beta", "lambda", "n3sq", "trap", "w1", "w2",
                          "quartic_c", "n", "box", "max_iter", "precondition"}},
        {"collapse-scan", {"beta", "lambda", "n3sq", "trap", "w1", "w2",
                           "quartic_c", "m_list", "seed_n", "seed_box",
                           "max_nodes"}},
        {"symbol-dump", {"kind", "a", "b", "n3sq", "n", "box"}},
    };
    auto it = per_cmd.find(command);
    if (it == per_cmd.end()) throw ConfigError("unknown command: " + command);
    static std::map<std::string, std::set<std::string>> merged;
    auto mit = merged.find(command);
    if (mit == merged.end()) {
        std::set<std::string> u = common;
        u.insert(it->second.begin(), it->second.end());
        mit = merged.emplace(command, std::move(u)).first;
    }
    return mit->second;
}

inline void check_key(const std::string& command, const std::string& key) {
    if (key == "epsilon")
        throw ConfigError("key 'epsilon' is out of scope: the transverse width "
                          "is fixed to (2 pi)^{-1/2} by the model");
    const auto& allowed = allowed_keys(command);
    if (!allowed.count(key))
        throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
}

inline void load_config_file(const std::string& path, const std::string& command,
                             std::map<std::string, std::string>& kv) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": empty key or value");
        check_key(command, key);
        kv[key] = value;
    }
}

inline PhysicalParams params_from(const RunConfig& cfg) {
    PhysicalParams p;
    p.beta = cfg.get_double("beta", 0.0);
    p.lambda = cfg.get_double("lambda", 0.0);
    double n3sq = cfg.get_double("n3sq", 1.0);
    if (n3sq < 0 || n3sq > 1) throw ConfigError("n3sq must lie in [0, 1]");
    p.n3 = std::sqrt(n3sq);
    std::string trap = cfg.get_string("trap", "harmonic");
    if (trap == "harmonic") {
        p.trap.kind = TrapSpec::Kind::Harmonic;
        p.trap.w1 = cfg.get_double("w1", 1.0);
        p.trap.w2 = cfg.get_double("w2", 1.0);
    } else if (trap == "quartic") {
        p.trap.kind = TrapSpec::Kind::Quartic;
        p.trap.c = cfg.get_double("quartic_c", 1.0);
    } else {
        throw ConfigError("trap must be 'harmonic' or 'quartic'");
    }
    validate(p);
    return p;
}

inline void echo_config(const RunConfig& cfg, ResultRecord& rec) {
    rec.add("version", version_string());
    rec.add("command", cfg.command);
    for (const auto& [k, v] : cfg.kv) rec.add("config." + k, v);
    if (cfg.get_bool("timestamps", false)) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        rec.add("timestamp_unix_ms",
                std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(now).count()));
    }
}

inline void emit(const RunConfig& cfg, const ResultRecord& rec, std::ostream& out) {
    rec.render(out);
    std::string path = cfg.get_string("output", "");
    if (!path.empty()) write_file(path, rec);
}

inline GNOptions gn_options_from(const RunConfig& cfg) {
    GNOptions o;
    int n = cfg.get_int("n", 128);
    double box = cfg.get_double("box", 24.0);
    o.tol_rel = cfg.get_double("tol_rel", o.tol_rel);
    o.tol_grad = cfg.get_double("tol_grad", o.tol_grad);
    o.max_iter = cfg.get_int("max_iter", o.max_iter);
    if (cfg.get_bool("refine", true)) {
        o.scenes = {{n, box}, {2 * n, box * 4.0 / 3.0}};
        o.extra_scene = {3 * n, box * 5.0 / 3.0};
    } else {
        o.scenes = {{n, box}};
        o.extra_scene = {n, box};
    }
    return o;
}

inline ExitCode cmd_gn_constant(const RunConfig& cfg, std::ostream& out) {
    double a = cfg.get_double("a", 1.0);
    double b = cfg.get_double("b", 0.0);
    ResultRecord rec;
    echo_config(cfg, rec);
    try {
        GNResult r = compute_gn_constant(a, b, gn_options_from(cfg));
        rec.add("C", r.C);
        rec.add("C_err", r.err);
        rec.add("residual", r.residual);
        for (std::size_t i = 0; i < r.grid_study.size(); ++i) {
            std::string p = "grid_study." + std::to_string(i) + ".";
            rec.add(p + "n", r.grid_study[i].n);
            rec.add(p + "box", r.grid_study[i].box);
            rec.add(p + "C", r.grid_study[i].C);
        }
        rec.add("multistart_warning", r.multistart_warning ? "true" : "false");
        rec.add("refine_warning", r.refine_warning ? "true" : "false");
        emit(cfg, rec, out);
        std::string csv = cfg.get_string("csv", "");
        if (!csv.empty()) {
            CsvTable t;
            t.header = {"n", "box", "C"};
            for (const auto& e : r.grid_study)
                t.rows.push_back({std::to_string(e.n), format_double(e.box),
                                  format_double(e.C)});
            write_file(csv, t);
        }
        return ExitCode::Ok;
    } catch (const GNNonConvergence& e) {
        rec.add("error", e.what());
        emit(cfg, rec, out);
        return ExitCode::NonConvergence;
    } catch (const GNError& e) {
        rec.add("error", e.what());
        emit(cfg, rec, out);
        return ExitCode::Indeterminate;
    }
}

inline ExitCode cmd_stability(const RunConfig& cfg, std::ostream& out) {
    PhysicalParams p = params_from(cfg);
    ClassifyOptions opt;
    opt.tol = cfg.get_double("tol", opt.tol);
    opt.borderline_analysis = cfg.get_bool("borderline", false);
    opt.gn = gn_options_from(cfg);
    StabilityVerdict v = classify(p, opt);
    ResultRecord rec;
    echo_config(cfg, rec);
    rec.add("a", v.eff.a);
    rec.add("b", v.eff.b);
    rec.add("verdict", to_string(v.verdict));
    if (v.C) {
        rec.add("C", *v.C);
        rec.add("C_err", v.C_err);
    }
    if (v.borderline_sign) rec.add("borderline_sign", *v.borderline_sign);
    if (!v.notes.empty()) rec.add("notes", v.notes);
    emit(cfg, rec, out);
    return v.verdict == StabilityCase::Indeterminate ? ExitCode::Indeterminate
                                                     : ExitCode::Ok;
}

inline ExitCode cmd_ground_state(const RunConfig& cfg, std::ostream& out) {
    PhysicalParams p = params_from(cfg);
    int n = cfg.get_int("n", 128);
    double box = cfg.get_double("box", 16.0);
    Grid2D g = make_grid(n, n, box, box);
    GroundStateOptions opt;
    opt.max_iter = cfg.get_int("max_iter", opt.max_iter);
    opt.precondition = cfg.get_bool("precondition", true);
    GroundStateResult r = minimize_trapped(p, g, opt);
    ResultRecord rec;
    echo_config(cfg, rec);
    rec.add("converged", r.converged ? "true" : "false");
    rec.add("collapse_detected", r.collapse_detected ? "true" : "false");
    rec.add("iterations", r.iterations);
    rec.add("energy.total", r.energy.total);
    rec.add("energy.kinetic", r.energy.kinetic);
    rec.add("energy.potential", r.energy.potential);
    rec.add("energy.quartic", r.energy.quartic);
    rec.add("energy.dipolar", r.energy.dipolar);
    rec.add("mass", r.energy.mass);
    rec.add("mu", r.mu);
    rec.add("residual", r.residual);
    if (!r.L_history.empty()) rec.add("L_final", r.L_history.back());
    if (!r.notes.empty()) rec.add("notes", r.notes);
    emit(cfg, rec, out);
    std::string csv = cfg.get_string("csv", "");
    if (!csv.empty()) {
        CsvTable t;
        t.header = {"iteration", "L", "energy"};
        // The metastability probe can append one L entry past the flow's
        // energy history; emit only the paired prefix.
        for (std::size_t i = 0; i < std::min(r.L_history.size(), r.E_history.size()); ++i)
            t.rows.push_back({std::to_string(i), format_double(r.L_history[i]),
                              format_double(r.E_history[i])});
        write_file(csv, t);
    }
    if (r.collapse_detected) return ExitCode::CollapseDetected;
    if (!r.converged) return ExitCode::NonConvergence;
    return ExitCode::Ok;
}

inline ExitCode cmd_collapse_scan(const RunConfig& cfg, std::ostream& out) {
    PhysicalParams p = params_from(cfg);
    EffectiveParams eff = effective_params(p);
    ResultRecord rec;
    echo_config(cfg, rec);
    rec.add("a", eff.a);
    rec.add("b", eff.b);
    try {
        GNOptions gopt = single_scene_gn(cfg.get_int("seed_n", 128),
                                         cfg.get_double("seed_box", 24.0));
        GNResult gn = compute_gn_constant(eff.a, eff.b, gopt);
        rec.add("C", gn.C);
        std::vector<int> ms = cfg.get_int_list("m_list", "2,4,8");
        std::sort(ms.begin(), ms.end());
        std::vector<double> Ls;
        for (int m : ms) {
            if (m < 1) throw ConfigError("m_list entries must be >= 1");
            Ls.push_back(1.0 / m);
        }
        std::sort(Ls.begin(), Ls.end(), std::greater<double>());
        ScanOptions sopt;
        sopt.max_nodes = cfg.get_int("max_nodes", sopt.max_nodes);
        ScalingScan scan = collapse_scan(p, gn.optimizer, Ls, sopt);
        rec.add("fit.c2", scan.fit.c2);
        rec.add("fit.clog", scan.fit.clog);
        rec.add("fit.c0", scan.fit.c0);
        rec.add("fit.residual", scan.fit_residual);
        for (std::size_t i = 0; i < scan.L_values.size(); ++i) {
            std::string pre = "scan." + std::to_string(i) + ".";
            rec.add(pre + "L", scan.L_values[i]);
            rec.add(pre + "energy", scan.energies[i]);
        }
        emit(cfg, rec, out);
        std::string csv = cfg.get_string("csv", "");
        if (!csv.empty()) {
            CsvTable t;
            t.header = {"L", "energy", "kinetic", "potential", "quartic", "dipolar"};
            for (std::size_t i = 0; i < scan.L_values.size(); ++i) {
                const EnergyBreakdown& e = scan.breakdown[i];
                t.rows.push_back({format_double(scan.L_values[i]),
                                  format_double(e.total), format_double(e.kinetic),
                                  format_double(e.potential), format_double(e.quartic),
                                  format_double(e.dipolar)});
            }
            // Fit summary block: comment lines after the data rows.
            t.rows.push_back({"# fit", "c2=" + format_double(scan.fit.c2),
                              "clog=" + format_double(scan.fit.clog),
                              "c0=" + format_double(scan.fit.c0),
                              "residual=" + format_double(scan.fit_residual), ""});
            write_file(csv, t);
        }
        return ExitCode::Ok;
    } catch (const GNError& e) {
        rec.add("error", e.what());
        emit(cfg, rec, out);
        return ExitCode::Indeterminate;
    }
}

inline ExitCode cmd_symbol_dump(const RunConfig& cfg, std::ostream& out) {
    std::string kind = cfg.get_string("kind", "highfreq");
    int n = cfg.get_int("n", 64);
    double box = cfg.get_double("box", 16.0);
    // The dump only tabulates the symbol, so the solver-grade minimum of
    // 16 nodes per axis does not apply; tiny grids are fine here.
    if (n < 2 || n % 2 != 0) throw ConfigError("n must be even and >= 2");
    if (!(box > 0)) throw ConfigError("box must be positive");
    Grid2D g;
    g.n1 = g.n2 = n;
    g.L1 = g.L2 = box;
    g.dx1 = g.dx2 = box / n;
    KernelSymbol sym;
    if (kind == "highfreq") {
        sym = build_symbol_high_freq(g);
    } else if (kind == "fab") {
        sym = build_symbol_fab(g, cfg.get_double("a", 1.0), cfg.get_double("b", 0.0));
    } else if (kind == "quasi2d") {
        double n3sq = cfg.get_double("n3sq", 1.0);
        if (n3sq < 0 || n3sq > 1) throw ConfigError("n3sq must lie in [0, 1]");
        sym = build_symbol_quasi2d(g, std::sqrt(n3sq));
    } else {
        throw ConfigError("kind must be highfreq, fab, or quasi2d");
    }
    CsvTable t;
    t.header = {"xi1", "xi2", "value"};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            t.rows.push_back({format_double(g.xi1(i)), format_double(g.xi2(j)),
                              format_double(sym.values.at(i, j))});
    std::string csv = cfg.get_string("csv", "");
    ResultRecord rec;
    echo_config(cfg, rec);
    rec.add("rows", static_cast<int>(t.rows.size()));
    emit(cfg, rec, out);
    if (!csv.empty())
        write_file(csv, t);
    else
        t.render(out);
    return ExitCode::Ok;
}

} // namespace cli_detail

inline RunConfig parse_config(int argc, const char* const* argv) {
    if (argc < 2)
        throw ConfigError("usage: dipolar-stab <command> [--config path] "
                          "[--key value ...]; commands: gn-constant, stability, "
                          "ground-state, collapse-scan, symbol-dump");
    RunConfig cfg;
    cfg.command = argv[1];
    cli_detail::allowed_keys(cfg.command); // validates the command name

    // First pass: pick up --config and load the file, so flags override.
    std::vector<std::pair<std::string, std::string>> flags;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) != 0)
            throw ConfigError("expected --key, got '" + arg + "'");
        std::string key = arg.substr(2);
        if (i + 1 >= argc) throw ConfigError("missing value for --" + key);
        std::string value = argv[++i];
        if (key == "config") {
            cli_detail::load_config_file(value, cfg.command, cfg.kv);
            cfg.kv["config"] = value;
        } else {
            cli_detail::check_key(cfg.command, key);
            flags.emplace_back(key, value);
        }
    }
    for (auto& [k, v] : flags) cfg.kv[k] = v;
    return cfg;
}

inline ExitCode run_command(const RunConfig& cfg, std::ostream& out = std::cout) {
    using namespace cli_detail;
    if (cfg.command == "gn-constant") return cmd_gn_constant(cfg, out);
    if (cfg.command == "stability") return cmd_stability(cfg, out);
    if (cfg.command == "ground-state") return cmd_ground_state(cfg, out);
    if (cfg.command == "collapse-scan") return cmd_collapse_scan(cfg, out);
    if (cfg.command == "symbol-dump") return cmd_symbol_dump(cfg, out);
    throw ConfigError("unknown command: " + cfg.command);
}

inline int cli_main(int argc, const char* const* argv) {
    try {
        RunConfig cfg = parse_config(argc, argv);
        return static_cast<int>(run_command(cfg));
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::IoError);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::UsageError);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::UsageError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NonConvergence);
    }
}

} // namespace dipolar

#endif
