#ifndef GTQW_TOOLS_CLI_HPP
#define GTQW_TOOLS_CLI_HPP

// Command-line front end. Kept in a header so the tests can drive run()
// in-process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <new>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtqw/gtqw.hpp"
#include "svg_plot.hpp"

namespace gtqw::cli {

namespace fs = std::filesystem;

inline constexpr const char* kOutputDirEnv = "GTQW_OUTPUT_DIR";

// ---------------------------------------------------------------- parsing

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ParameterError("bad integer '" + s + "' in " + what);
}

/// "2..5", "2,4,8" or a mix such as "2..4,8". Duplicates are dropped,
/// first occurrence wins the order.
inline std::vector<int> parse_int_set(const std::string& text, const std::string& what) {
    std::vector<int> out;
    auto push = [&](int v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) {
            out.push_back(v);
        }
    };
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) {
            continue;
        }
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            push(parse_int(part, what));
            continue;
        }
        const int lo = parse_int(trim(part.substr(0, dots)), what);
        const int hi = parse_int(trim(part.substr(dots + 2)), what);
        if (hi < lo) {
            throw ParameterError("empty range '" + part + "' in " + what);
        }
        for (int v = lo; v <= hi; ++v) {
            push(v);
        }
    }
    if (out.empty()) {
        throw ParameterError(what + " is empty");
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) {
                throw std::invalid_argument(part);
            }
        } catch (const std::exception&) {
            throw ParameterError("bad number '" + part + "' in " + what);
        }
    }
    return out;
}

/// Grid 0, step, 2 step, ..., always ending exactly at tau_max.
inline std::vector<double> uniform_grid(double tau_max, double step) {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
        throw ParameterError("--tau-max must be positive");
    }
    if (!(step > 0.0)) {
        throw ParameterError("--tau-step must be positive");
    }
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * step;
        if (t >= tau_max * (1.0 - 1e-12)) {
            break;
        }
        grid.push_back(t);
    }
    grid.push_back(tau_max);
    return grid;
}

// ---------------------------------------------------------------- config

/// Flat `key = value` lines; '#' starts a comment line. Keys are long
/// option names without the leading dashes.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    std::vector<std::pair<std::string, std::string>> items;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw IoError("config " + path + " line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        while (!key.empty() && key[0] == '-') {
            key.erase(0, 1);
        }
        if (key.empty()) {
            throw IoError("config " + path + " line " + std::to_string(line_no) + ": empty key");
        }
        items.emplace_back(key, trim(t.substr(eq + 1)));
    }
    return items;
}

// ---------------------------------------------------------------- output

inline fs::path output_path(const std::string& dir, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(dir) / p;
}

inline void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os << content;
    os.flush();
    if (!os) {
        throw IoError("write to " + path.string() + " failed");
    }
}

inline std::ifstream open_input(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(std::string("cannot open ") + what + " file " + path);
    }
    return in;
}

inline std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------- commands

struct Common {
    std::string output_dir = ".";
    std::string config;
};

struct GraphArgs {
    int B = 2, n = 2;
    std::uint64_t seed = 1;
    std::string out;
};

inline int cmd_graph(const GraphArgs& a, const Common& c, std::ostream& out) {
    const GluedTreeGraph g = build_glued_tree({a.B, a.n, a.seed});
    const auto report = validate_gluing(g);
    if (!report.passed()) {
        throw NumericalError("generated graph failed validation: " + report.violations.front().detail);
    }
    const std::string name = a.out.empty() ? "graph_B" + std::to_string(a.B) + "_n" + std::to_string(a.n) + "_s" +
                                                 std::to_string(a.seed) + ".json"
                                           : a.out;
    const fs::path path = output_path(c.output_dir, name);
    write_file(path, graph_to_json(g).dump() + "\n");
    out << "nodes " << g.node_count() << " edges " << g.edges.size() << " -> " << path.string() << "\n";
    return 0;
}

struct SweepArgs {
    std::string kind = "qw-chain";
    int B = 2, n = 2;
    double gamma = 1.0;
    std::uint64_t seed = 1;
    double tau_max = 10.0;
    double tau_step = 0.0;
    std::optional<std::string> tau_grid;
    std::string units = "dimensionless";
    double gamma_phys = 0.0;
    double krylov_tol = 1e-10;
    std::string out;
    std::string svg;
};

inline int cmd_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    const WalkKind kind = walk_kind_from_string(a.kind);
    std::vector<double> grid;
    if (a.tau_grid) {
        grid = parse_double_list(*a.tau_grid, "--tau-grid");
        if (grid.empty()) {
            throw ParameterError("--tau-grid is empty");
        }
    } else {
        grid = uniform_grid(a.tau_max, a.tau_step > 0.0 ? a.tau_step : a.tau_max / 1000.0);
    }
    if (a.units != "dimensionless" && a.units != "physical") {
        throw ParameterError("--units must be dimensionless or physical");
    }
    SweepOptions opts;
    opts.gluing_seed = a.seed;
    opts.krylov.tol = a.krylov_tol;
    HittingCurve curve = sweep_curve(kind, a.B, a.n, a.gamma, grid, opts);
    for (double v : curve.values) {
        if (!std::isfinite(v)) {
            throw NumericalError("non-finite hitting probability in sweep");
        }
    }
    if (a.units == "physical") {
        curve = to_physical_units(std::move(curve), a.gamma_phys);
    }

    std::ostringstream csv;
    write_curve_csv(csv, curve);
    const std::string name = a.out.empty() ? "sweep_" + a.kind + "_B" + std::to_string(a.B) + "_n" +
                                                  std::to_string(a.n) + ".csv"
                                            : a.out;
    const fs::path path = output_path(c.output_dir, name);
    write_file(path, csv.str());

    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
        if (curve.values[i] > curve.values[best]) {
            best = i;
        }
    }
    out << "points " << curve.times.size() << " max " << format_number(curve.values[best]) << " at "
        << (curve.gamma_phys_per_mm ? "z_mm " : "tau ") << format_number(curve.times[best]) << " final "
        << format_number(curve.values.back()) << " -> " << path.string() << "\n";

    if (!a.svg.empty()) {
        PlotSpec spec{std::string(to_string(kind)) + " exit probability, B=" + std::to_string(a.B) +
                          ", n=" + std::to_string(a.n),
                      curve.gamma_phys_per_mm ? "z (mm)" : "tau = gamma t", "exit probability", false};
        write_file(output_path(c.output_dir, a.svg),
                   render_line_chart(spec, {{to_string(kind), curve.times, curve.values}}));
    }
    return 0;
}

struct ScalingArgs {
    std::string B = "2..5";
    std::string n = "2..16";
    double gamma = 1.0;
    double coarse_step = 0.0;
    double refine_tol = 1e-9;
    double tau_max = 200.0;
    unsigned threads = 0;
    bool compare_crw = false;
    std::string out = "scaling.csv";
    std::string fits = "scaling_fits.json";
    std::string crw_out = "scaling_crw_compare.csv";
    std::string svg;
};

inline int cmd_scaling(const ScalingArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
    const auto Bs = parse_int_set(a.B, "--B");
    const auto ns = parse_int_set(a.n, "--n");
    if (!(a.gamma > 0.0)) {
        throw ParameterError("--gamma must be positive");
    }
    PeakConfig cfg;
    cfg.coarse_step = a.coarse_step;
    cfg.refine_tol = a.refine_tol;
    cfg.tau_max = a.tau_max;
    const auto records = scaling_sweep(Bs, ns, a.gamma, cfg, a.threads);

    std::ostringstream csv;
    write_scaling_csv(csv, records);
    const fs::path csv_path = output_path(c.output_dir, a.out);
    write_file(csv_path, csv.str());

    nlohmann::json fits;
    fits["gamma"] = a.gamma;
    fits["records"] = records.size();
    nlohmann::json warnings = nlohmann::json::array();
    auto warn = [&](const std::string& w) {
        err << "warning: " << w << "\n";
        warnings.push_back(w);
    };
    for (const auto& w : depth_monotonicity_warnings(records)) {
        warn(w);
    }

    nlohmann::json by_b = nlohmann::json::array();
    for (int B : Bs) {
        std::vector<double> x, p, t;
        for (const auto& r : records) {
            if (r.branching == B) {
                x.push_back(r.depth);
                p.push_back(r.p_star_qw);
                t.push_back(r.tau_star);
            }
        }
        if (x.size() < 3) {
            warn("fits skipped for B=" + std::to_string(B) + ": " + std::to_string(x.size()) +
                 " depth(s), need at least 3");
            continue;
        }
        const auto pf = fit_power_law(x, p);
        const auto tf = fit_linear(x, t);
        by_b.push_back({{"B", B}, {"p_star_vs_n", fit_to_json(pf)}, {"tau_star_vs_n", fit_to_json(tf)}});
        out << "B=" << B << " p_star ~ n^" << format_number(pf.slope) << " (r2 " << format_number(pf.r_squared)
            << "), tau_star slope " << format_number(tf.slope) << " (r2 " << format_number(tf.r_squared) << ")\n";
    }
    nlohmann::json by_n = nlohmann::json::array();
    if (Bs.size() >= 3) {
        for (int n : ns) {
            std::vector<double> x, r;
            for (const auto& rec : records) {
                if (rec.depth == n) {
                    x.push_back(rec.branching);
                    r.push_back(rec.enhancement_ratio);
                }
            }
            by_n.push_back({{"n", n}, {"ratio_vs_B", fit_to_json(fit_power_law(x, r))}});
        }
    }
    fits["by_branching"] = by_b;
    fits["by_depth"] = by_n;
    fits["warnings"] = warnings;
    const fs::path fits_path = output_path(c.output_dir, a.fits);
    write_file(fits_path, fits.dump(2) + "\n");

    if (a.compare_crw) {
        std::ostringstream cmp;
        cmp << "B,n,log10_p_qw,log10_p_crw_at_tau_star,log10_p_crw_stationary\n";
        for (const auto& r : records) {
            cmp << r.branching << ',' << r.depth << ',' << format_number(std::log10(r.p_star_qw)) << ','
                << format_number(std::log10(r.p_crw_at_tau_star)) << ','
                << format_number(std::log10(r.p_crw_stationary)) << '\n';
        }
        write_file(output_path(c.output_dir, a.crw_out), cmp.str());
    }

    if (!a.svg.empty()) {
        std::vector<Series> series;
        for (int B : Bs) {
            Series qw{"QW B=" + std::to_string(B), {}, {}};
            Series crw{"CRW B=" + std::to_string(B), {}, {}};
            for (const auto& r : records) {
                if (r.branching == B) {
                    qw.x.push_back(r.depth);
                    qw.y.push_back(r.p_star_qw);
                    crw.x.push_back(r.depth);
                    crw.y.push_back(r.p_crw_stationary);
                }
            }
            series.push_back(std::move(qw));
            if (a.compare_crw) {
                series.push_back(std::move(crw));
            }
        }
        write_file(output_path(c.output_dir, a.svg),
                   render_line_chart({"optimal hitting efficiency", "depth n", "probability", a.compare_crw},
                                     series));
    }
    out << "records " << records.size() << " -> " << csv_path.string() << ", " << fits_path.string() << "\n";
    return 0;
}

struct DesignArgs {
    int B = 2, n = 2;
    std::string calib;
    double gamma_phys = 0.0;
    double z = 0.0;
    std::string out = "layout.json";
};

inline int cmd_design(const DesignArgs& a, const Common& c, std::ostream& out) {
    if (a.calib.empty()) {
        throw ParameterError("--calib is required");
    }
    auto in = open_input(a.calib, "calibration");
    const auto fit = fit_coupling_model(read_calibration_csv(in));
    const auto layout = design_layout(a.B, a.n, a.gamma_phys, fit.model, a.z);
    auto j = layout_to_json(layout);
    j["center_pair_index"] = layout.center_pair_index;
    j["coupling_model"] = {{"c0_per_mm", fit.model.c0_per_mm},
                           {"d0_mm", fit.model.d0_mm},
                           {"rms_log_residual", fit.rms_log_residual},
                           {"max_relative_residual", fit.max_relative_residual}};
    const fs::path path = output_path(c.output_dir, a.out);
    write_file(path, j.dump(2) + "\n");
    const double outer = layout.spacings_mm.front();
    const double center = layout.spacings_mm[layout.center_pair_index];
    out << "waveguides " << layout.positions_mm.size() << " outer gap " << format_number(outer) << " mm, center gap "
        << format_number(center) << " mm (reduced by " << format_number(outer - center) << " mm) -> "
        << path.string() << "\n";
    return 0;
}

struct FrameArgs {
    std::string frame;
    std::string spots;
    long exit_index = -1;
    std::string out = "frame_probabilities.csv";
};

inline int cmd_frame(const FrameArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
    if (a.frame.empty() || a.spots.empty()) {
        throw ParameterError("--frame and --spots are required");
    }
    const Frame frame = read_frame_file(a.frame);
    auto spots_in = open_input(a.spots, "spots");
    nlohmann::json sj;
    try {
        sj = nlohmann::json::parse(spots_in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("spots file " + a.spots + ": " + e.what());
    }
    const auto spots = spots_from_json(sj);
    const auto result = frame_probabilities(frame, spots);
    for (const auto& w : result.warnings) {
        err << "warning: " << w << "\n";
    }
    std::ostringstream csv;
    csv << "spot,x,y,probability\n";
    for (std::size_t i = 0; i < spots.size(); ++i) {
        csv << i << ',' << format_number(spots[i].x) << ',' << format_number(spots[i].y) << ','
            << full_precision(result.probabilities[i]) << '\n';
    }
    const fs::path path = output_path(c.output_dir, a.out);
    write_file(path, csv.str());
    if (a.exit_index >= 0) {
        const double p = hitting_from_frame(frame, spots, static_cast<std::size_t>(a.exit_index));
        out << "exit_probability " << full_precision(p) << "\n";
    }
    out << "spots " << spots.size() << " -> " << path.string() << "\n";
    return 0;
}

struct AlphaArgs {
    std::string counts;
    std::string out = "alpha.csv";
};

inline int cmd_alpha(const AlphaArgs& a, const Common& c, std::ostream& out) {
    if (a.counts.empty()) {
        throw ParameterError("--counts is required");
    }
    auto in = open_input(a.counts, "counts");
    const auto rows = read_counts_csv(in);
    std::ostringstream csv;
    csv << "N3,N13,N23,N123,alpha,std_error\n";
    char buf[96];
    for (const auto& r : rows) {
        const auto est = alpha(r);
        csv << r.n3 << ',' << r.n13 << ',' << r.n23 << ',' << r.n123 << ',' << format_number(est.value) << ','
            << format_number(est.std_error) << '\n';
        std::snprintf(buf, sizeof buf, "alpha %.3f +/- %.3f\n", est.value, est.std_error);
        out << buf;
    }
    write_file(output_path(c.output_dir, a.out), csv.str());
    return 0;
}

// ---------------------------------------------------------------- driver

/// Splices `--key=value` pairs from the subcommand's --config file in front
/// of the command-line flags; with take-last semantics the flags win.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == args.size()) {
        return args;
    }
    CLI::App* sub = app.get_subcommand_no_throw(args[sub_pos]);
    if (sub == nullptr) {
        return args;
    }
    std::optional<std::string> config;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
        }
    }
    if (!config) {
        return args;
    }
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
    for (const auto& [key, value] : read_config_file(*config)) {
        if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
            throw ParameterError("config " + *config + ": unknown key '" + key + "' for " + sub->get_name());
        }
        out.push_back("--" + key + "=" + value);
    }
    out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
    return out;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum and classical walks on central-random glued trees", "gtqw"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output-dir", common.output_dir, "Directory for relative output paths")
            ->envname(kOutputDirEnv)
            ->capture_default_str();
        sub->add_option("--config", common.config, "Flat key = value file; command-line flags win");
    };

    GraphArgs ga;
    auto* graph = app.add_subcommand("graph", "Generate a glued tree and write it as JSON");
    graph->add_option("--B", ga.B, "Branching rate (>= 2)")->capture_default_str();
    graph->add_option("--n", ga.n, "Tree depth (>= 1)")->capture_default_str();
    graph->add_option("--seed", ga.seed, "Gluing seed")->capture_default_str();
    graph->add_option("--out", ga.out, "Output file (default graph_B<B>_n<n>_s<seed>.json)");
    add_common(graph);

    SweepArgs sa;
    std::string tau_grid;
    auto* sweep = app.add_subcommand("sweep", "Exit-probability curve over a time grid");
    sweep->add_option("--kind", sa.kind, "qw-chain, qw-full, crw-full or crw-lumped")->capture_default_str();
    sweep->add_option("--B", sa.B, "Branching rate")->capture_default_str();
    sweep->add_option("--n", sa.n, "Tree depth")->capture_default_str();
    sweep->add_option("--gamma", sa.gamma, "Hopping rate")->capture_default_str();
    sweep->add_option("--seed", sa.seed, "Gluing seed (full-graph kinds)")->capture_default_str();
    sweep->add_option("--tau-max", sa.tau_max, "Last grid point")->capture_default_str();
    sweep->add_option("--tau-step", sa.tau_step, "Grid step (default tau-max / 1000)");
    auto* grid_opt = sweep->add_option("--tau-grid", tau_grid, "Explicit comma-separated grid; overrides tau-max");
    sweep->add_option("--units", sa.units, "dimensionless or physical")->capture_default_str();
    sweep->add_option("--gamma-phys", sa.gamma_phys, "Physical hopping rate per mm (physical units)");
    sweep->add_option("--krylov-tol", sa.krylov_tol, "Krylov tolerance (full-graph kinds)")->capture_default_str();
    sweep->add_option("--out", sa.out, "Output CSV (default sweep_<kind>_B<B>_n<n>.csv)");
    sweep->add_option("--svg", sa.svg, "Also write an SVG line chart here");
    add_common(sweep);

    ScalingArgs sc;
    auto* scaling = app.add_subcommand("scaling", "First-peak table over B and n with fits");
    scaling->add_option("--B", sc.B, "Branching rates: list or range, e.g. 2..5")->capture_default_str();
    scaling->add_option("--n", sc.n, "Depths: list or range, e.g. 2..16")->capture_default_str();
    scaling->add_option("--gamma", sc.gamma, "Hopping rate")->capture_default_str();
    scaling->add_option("--coarse-step", sc.coarse_step, "Peak scan step in tau (default 0.02/sqrt(B))");
    scaling->add_option("--refine-tol", sc.refine_tol, "Peak refinement tolerance")->capture_default_str();
    scaling->add_option("--tau-max", sc.tau_max, "Peak search horizon")->capture_default_str();
    scaling->add_option("--threads", sc.threads, "Worker threads (0 = hardware)")->capture_default_str();
    scaling->add_flag("--compare-crw", sc.compare_crw, "Also write log10 QW vs CRW data");
    scaling->add_option("--out", sc.out, "Scaling table CSV")->capture_default_str();
    scaling->add_option("--fits", sc.fits, "Fit summary JSON")->capture_default_str();
    scaling->add_option("--crw-out", sc.crw_out, "QW vs CRW comparison CSV")->capture_default_str();
    scaling->add_option("--svg", sc.svg, "Also write an SVG chart here");
    add_common(scaling);

    DesignArgs da;
    auto* design = app.add_subcommand("design", "Waveguide spacings realizing the reduced chain");
    design->add_option("--B", da.B, "Branching rate")->capture_default_str();
    design->add_option("--n", da.n, "Tree depth")->capture_default_str();
    design->add_option("--calib", da.calib, "Calibration CSV (spacing_mm,coupling_per_mm)");
    design->add_option("--gamma-phys", da.gamma_phys, "Physical hopping rate per mm");
    design->add_option("--z", da.z, "Chip length in mm");
    design->add_option("--out", da.out, "Layout JSON")->capture_default_str();
    add_common(design);

    FrameArgs fa;
    auto* frame = app.add_subcommand("frame", "Per-waveguide probabilities from a camera frame");
    frame->add_option("--frame", fa.frame, "Frame file (ASCII grid or PGM)");
    frame->add_option("--spots", fa.spots, "Spots JSON: [{x, y, radius}, ...]");
    frame->add_option("--exit-index", fa.exit_index, "Spot index of the exit waveguide");
    frame->add_option("--out", fa.out, "Probabilities CSV")->capture_default_str();
    add_common(frame);

    AlphaArgs aa;
    auto* alpha_cmd = app.add_subcommand("alpha", "Anti-correlation parameter from coincidence counts");
    alpha_cmd->add_option("--counts", aa.counts, "Counts CSV (N3,N13,N23,N123)");
    alpha_cmd->add_option("--out", aa.out, "Output CSV")->capture_default_str();
    add_common(alpha_cmd);

    try {
        std::vector<std::string> expanded = expand_config(args, app);
        std::reverse(expanded.begin(), expanded.end());
        app.parse(expanded);
        if (grid_opt->count() > 0) {
            sa.tau_grid = tau_grid;
        }
        if (graph->parsed()) return cmd_graph(ga, common, out);
        if (sweep->parsed()) return cmd_sweep(sa, common, out);
        if (scaling->parsed()) return cmd_scaling(sc, common, out, err);
        if (design->parsed()) return cmd_design(da, common, out);
        if (frame->parsed()) return cmd_frame(fa, common, out, err);
        if (alpha_cmd->parsed()) return cmd_alpha(aa, common, out);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace gtqw::cli

#endif
