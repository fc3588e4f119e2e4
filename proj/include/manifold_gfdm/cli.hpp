#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "manifold_gfdm/benchmarks.hpp"
#include "manifold_gfdm/io.hpp"
#include "manifold_gfdm/vtk.hpp"

namespace mgfdm {

enum class Command { RunCase, SweepFrequency, BandgapScan, CurvatureSweep, DumpCloud };
enum class CaseId { Sphere, Cdp, Cylinder, CylinderHoles, PeriodicInclusions };

struct RunConfig {
    Command command = Command::RunCase;
    CaseId case_id = CaseId::Sphere;
    std::optional<int> n;
    std::optional<double> dh;
    int m = 40;
    std::optional<double> omega;
    std::optional<double> f_norm;
    double ff = 0.4;
    double ka = std::numbers::pi / 16.0;
    int steps = 80;
    double f_lo = 0.05;
    double f_hi = 2.0;
    double ff_lo = 0.2;
    double ff_hi = 0.75;
    unsigned seed = 42;
    std::string out_dir = "out";
    bool literal_transmission = false;
    bool row_equilibration = false;
    bool stencil_dump = false;
};

inline std::string cli_usage() {
    return "usage: manifold-gfdm <command> [case] [options]\n"
           "\n"
           "commands:\n"
           "  run-case <sphere|cdp|cylinder|cylinder-holes|periodic-inclusions>\n"
           "  sweep-frequency      transmission spectrum over f_norm\n"
           "  bandgap-scan         bandgap intervals over filling fractions\n"
           "  curvature-sweep      spectra over curvatures ka\n"
           "  dump-cloud <case>    write the sampled node cloud as CSV\n"
           "\n"
           "options (also accepted as key = value lines via --config FILE;\n"
           "command-line values win):\n"
           "  --n INT          node count, >= 4 (sphere, cdp)\n"
           "  --dh FLOAT       node spacing, > 0 (cylinder, periodic cell)\n"
           "  --m INT          stencil support size, in [10, 100] (default 40)\n"
           "  --omega FLOAT    angular frequency, > 0\n"
           "  --f-norm FLOAT   normalized frequency, > 0\n"
           "  --ff FLOAT       filling fraction, in (0, 0.78]\n"
           "  --ka FLOAT       curvature, in [0, pi/16]\n"
           "  --steps INT      sweep resolution, >= 1 (default 80)\n"
           "  --f-lo/--f-hi    sweep range (default [0.05, 2])\n"
           "  --ff-lo/--ff-hi  bandgap scan range (default [0.2, 0.75])\n"
           "  --seed INT       sampling seed (default 42)\n"
           "  --out DIR        output directory (default ./out)\n"
           "  --literal-transmission-formula\n"
           "  --row-equilibration\n"
           "  --stencil-dump\n";
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw UsageError("--" + key + " expects a number, got '" + value + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (v != static_cast<long long>(v))
        throw UsageError("--" + key + " expects an integer, got '" + value + "'");
    return static_cast<int>(v);
}

inline CaseId parse_case(const std::string& name) {
    if (name == "sphere") return CaseId::Sphere;
    if (name == "cdp") return CaseId::Cdp;
    if (name == "cylinder") return CaseId::Cylinder;
    if (name == "cylinder-holes") return CaseId::CylinderHoles;
    if (name == "periodic-inclusions") return CaseId::PeriodicInclusions;
    throw UsageError("unknown case '" + name +
                     "'; expected sphere, cdp, cylinder, cylinder-holes or "
                     "periodic-inclusions");
}

// Applies one key/value setting; `key` comes without leading dashes.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") {
        cfg.n = parse_int(key, value);
        if (*cfg.n < 4) throw UsageError("--n must be at least 4, got " + value);
    } else if (key == "dh") {
        cfg.dh = parse_number(key, value);
        if (!(*cfg.dh > 0.0)) throw UsageError("--dh must be positive, got " + value);
    } else if (key == "m") {
        cfg.m = parse_int(key, value);
        if (cfg.m < 10 || cfg.m > 100)
            throw UsageError("--m must lie in [10, 100], got " + value);
    } else if (key == "omega") {
        cfg.omega = parse_number(key, value);
        if (!(*cfg.omega > 0.0)) throw UsageError("--omega must be positive, got " + value);
    } else if (key == "f-norm" || key == "f_norm") {
        cfg.f_norm = parse_number(key, value);
        if (!(*cfg.f_norm > 0.0)) throw UsageError("--f-norm must be positive, got " + value);
    } else if (key == "ff") {
        cfg.ff = parse_number(key, value);
        if (!(cfg.ff > 0.0) || cfg.ff > 0.78)
            throw UsageError("--ff must lie in (0, 0.78], got " + value);
    } else if (key == "ka") {
        cfg.ka = parse_number(key, value);
        if (cfg.ka < 0.0 || cfg.ka > std::numbers::pi / 16.0 + 1e-12)
            throw UsageError("--ka must lie in [0, pi/16], got " + value);
    } else if (key == "steps") {
        cfg.steps = parse_int(key, value);
        if (cfg.steps < 1) throw UsageError("--steps must be at least 1, got " + value);
    } else if (key == "f-lo" || key == "f_lo") {
        cfg.f_lo = parse_number(key, value);
    } else if (key == "f-hi" || key == "f_hi") {
        cfg.f_hi = parse_number(key, value);
    } else if (key == "ff-lo" || key == "ff_lo") {
        cfg.ff_lo = parse_number(key, value);
    } else if (key == "ff-hi" || key == "ff_hi") {
        cfg.ff_hi = parse_number(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<unsigned>(parse_int(key, value));
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "literal-transmission-formula") {
        cfg.literal_transmission = value.empty() || value == "true" || value == "1";
    } else if (key == "row-equilibration") {
        cfg.row_equilibration = value.empty() || value == "true" || value == "1";
    } else if (key == "stencil-dump") {
        cfg.stencil_dump = value.empty() || value == "true" || value == "1";
    } else {
        throw UsageError("unknown option --" + key + "\n" + cli_usage());
    }
}

inline bool is_flag_key(const std::string& key) {
    return key == "literal-transmission-formula" || key == "row-equilibration" ||
           key == "stencil-dump";
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> out;
    const std::string text = read_text(path);
    size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto strip = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) +
                             " is not 'key = value': " + line);
        out[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return out;
}

}  // namespace detail

// Parses a command line (without argv[0]); file settings from --config apply
// first, explicit command-line options override them.
inline RunConfig parse_run_config(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError(cli_usage());

    RunConfig cfg;
    size_t pos = 0;
    const std::string& command = args[pos++];
    if (command == "run-case") cfg.command = Command::RunCase;
    else if (command == "sweep-frequency") cfg.command = Command::SweepFrequency;
    else if (command == "bandgap-scan") cfg.command = Command::BandgapScan;
    else if (command == "curvature-sweep") cfg.command = Command::CurvatureSweep;
    else if (command == "dump-cloud") cfg.command = Command::DumpCloud;
    else throw UsageError("unknown command '" + command + "'\n" + cli_usage());

    if (cfg.command == Command::RunCase || cfg.command == Command::DumpCloud) {
        if (pos >= args.size() || args[pos].rfind("--", 0) == 0)
            throw UsageError(command + " needs a case id\n" + cli_usage());
        cfg.case_id = detail::parse_case(args[pos++]);
    }

    std::string config_file;
    std::vector<std::pair<std::string, std::string>> cli_settings;
    while (pos < args.size()) {
        std::string arg = args[pos++];
        if (arg.rfind("--", 0) != 0)
            throw UsageError("unexpected positional argument '" + arg + "'\n" + cli_usage());
        arg = arg.substr(2);
        std::string key = arg, value;
        if (const size_t eq = arg.find('='); eq != std::string::npos) {
            key = arg.substr(0, eq);
            value = arg.substr(eq + 1);
        } else if (!detail::is_flag_key(key) && key != "config") {
            if (pos >= args.size())
                throw UsageError("--" + key + " expects a value\n" + cli_usage());
            value = args[pos++];
        } else if (key == "config") {
            if (pos >= args.size()) throw UsageError("--config expects a file path");
            value = args[pos++];
        }
        if (key == "config") config_file = value;
        else cli_settings.emplace_back(key, value);
    }

    if (!config_file.empty())
        for (const auto& [key, value] : detail::read_config_file(config_file))
            detail::apply_setting(cfg, key, value);
    for (const auto& [key, value] : cli_settings) detail::apply_setting(cfg, key, value);
    return cfg;
}

// ---------------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------------

namespace detail {

inline CaseResult run_configured_case(const RunConfig& cfg,
                                      std::vector<StencilWeights>* stencils_out = nullptr) {
    switch (cfg.case_id) {
        case CaseId::Sphere:
            return case_sphere(cfg.n.value_or(2500), cfg.m, cfg.omega.value_or(1000.0));
        case CaseId::Cdp:
            return case_cdp(cfg.omega.value_or(1e4), cfg.n.value_or(3996), cfg.m, cfg.seed);
        case CaseId::Cylinder:
            return case_cylinder(cfg.dh.value_or(0.061), false, cfg.omega.value_or(1e4),
                                 cfg.m);
        case CaseId::CylinderHoles:
            return case_cylinder(cfg.dh.value_or(0.031), true, cfg.omega.value_or(1e4), cfg.m);
        case CaseId::PeriodicInclusions: {
            const PeriodicCellGeometry cell =
                build_periodic_cell(cfg.ff, cfg.dh.value_or(0.045), cfg.m, cfg.ka);
            if (stencils_out) *stencils_out = cell.stencils;
            return run_periodic_cell(cell, cfg.f_norm.value_or(0.5));
        }
    }
    throw Error("unreachable");
}

inline SurfaceCloud sample_configured_cloud(const RunConfig& cfg) {
    switch (cfg.case_id) {
        case CaseId::Sphere:
            return sample_sphere(cfg.n.value_or(2500), kSphereRelaxIters);
        case CaseId::Cdp: {
            LevelSetSampleOptions opt;
            opt.target_n = cfg.n.value_or(3996);
            opt.box_lo = Vec3(-1.32, -1.32, -0.34);
            opt.box_hi = Vec3(1.32, 1.32, 0.34);
            opt.seed = cfg.seed;
            return sample_level_set(cdp_surface(), opt);
        }
        case CaseId::Cylinder:
            return sample_cylinder_patch(1.0, std::numbers::pi, 1.5, cfg.dh.value_or(0.061));
        case CaseId::CylinderHoles:
            return case_cylinder(cfg.dh.value_or(0.031), true).cloud;
        case CaseId::PeriodicInclusions:
            return build_periodic_cell(cfg.ff, cfg.dh.value_or(0.045), cfg.m, cfg.ka).cloud;
    }
    throw Error("unreachable");
}

inline std::string case_name(CaseId id) {
    switch (id) {
        case CaseId::Sphere: return "sphere";
        case CaseId::Cdp: return "cdp";
        case CaseId::Cylinder: return "cylinder";
        case CaseId::CylinderHoles: return "cylinder-holes";
        case CaseId::PeriodicInclusions: return "periodic-inclusions";
    }
    return "?";
}

}  // namespace detail

// Executes a parsed configuration, writing artifacts under cfg.out_dir and a
// one-line summary to `out`. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir;
    const detail::Stopwatch clock;

    switch (cfg.command) {
        case Command::RunCase: {
            std::vector<StencilWeights> stencils;
            const CaseResult r = detail::run_configured_case(
                cfg, cfg.stencil_dump ? &stencils : nullptr);
            write_text_atomic(dir / "field.csv", field_to_csv(r));
            write_text_atomic(dir / "field.vtk",
                              field_to_vtk(r, detail::case_name(cfg.case_id)));
            if (cfg.stencil_dump && !stencils.empty())
                write_text_atomic(dir / "stencils.csv", stencils_to_csv(stencils));
            std::string summary = "case=" + detail::case_name(cfg.case_id) +
                                  " N=" + std::to_string(r.n_nodes) +
                                  " m=" + std::to_string(r.support) +
                                  " omega=" + format_double(r.omega);
            if (r.global_error) summary += " global_error=" + format_double(*r.global_error);
            if (cfg.case_id == CaseId::PeriodicInclusions)
                summary += " T_db=" + format_double(transmission(r.field, r.cloud,
                                                                 cfg.literal_transmission));
            summary += " residual=" + format_double(r.residual) +
                       " runtime_s=" + format_double(r.runtime_s) +
                       " seed=" + std::to_string(cfg.seed);
            write_text_atomic(dir / "summary.txt", summary + "\n");
            out << summary << "\n";
            return 0;
        }
        case Command::SweepFrequency: {
            SweepOptions opt;
            opt.f_lo = cfg.f_lo;
            opt.f_hi = cfg.f_hi;
            opt.steps = cfg.steps;
            opt.dh = cfg.dh.value_or(0.045);
            opt.support = cfg.m;
            opt.ka = cfg.ka;
            opt.literal_transmission = cfg.literal_transmission;
            const Spectrum spec = frequency_sweep(cfg.ff, opt);
            write_text_atomic(dir / "spectrum.csv", spectrum_to_csv(spec));
            double t_min = spec.points.front().t_db;
            for (const auto& pt : spec.points) t_min = std::min(t_min, pt.t_db);
            out << "sweep ff=" << format_double(cfg.ff) << " N=" << spec.n_nodes
                << " m=" << spec.support << " steps=" << cfg.steps
                << " min_T_db=" << format_double(t_min)
                << " runtime_s=" << format_double(clock.seconds()) << "\n";
            return 0;
        }
        case Command::BandgapScan: {
            SweepOptions opt;
            opt.f_lo = cfg.f_lo;
            opt.f_hi = cfg.f_hi;
            opt.steps = cfg.steps;
            opt.dh = cfg.dh.value_or(0.045);
            opt.support = cfg.m;
            opt.ka = cfg.ka;
            const int ff_steps = 12;
            const auto sets = bandgap_scan(cfg.ff_lo, cfg.ff_hi, ff_steps, opt);
            write_text_atomic(dir / "bandgaps.csv", bandgaps_to_csv(sets));
            out << "bandgap-scan ff=[" << format_double(cfg.ff_lo) << ", "
                << format_double(cfg.ff_hi) << "] runtime_s=" << format_double(clock.seconds())
                << "\n";
            return 0;
        }
        case Command::CurvatureSweep: {
            SweepOptions opt;
            opt.f_lo = cfg.f_lo;
            opt.f_hi = cfg.f_hi;
            opt.steps = cfg.steps;
            opt.dh = cfg.dh.value_or(0.045);
            opt.support = cfg.m;
            const std::vector<double> kas = {0.0, std::numbers::pi / 32.0,
                                             std::numbers::pi / 16.0};
            const auto spectra = curvature_sweep(kas, cfg.ff, opt);
            for (size_t k = 0; k < spectra.size(); ++k)
                write_text_atomic(dir / ("spectrum_ka" + std::to_string(k) + ".csv"),
                                  spectrum_to_csv(spectra[k]));
            out << "curvature-sweep ff=" << format_double(cfg.ff)
                << " runtime_s=" << format_double(clock.seconds()) << "\n";
            return 0;
        }
        case Command::DumpCloud: {
            const SurfaceCloud cloud = detail::sample_configured_cloud(cfg);
            write_text_atomic(dir / "cloud.csv", cloud_to_csv(cloud));
            out << "cloud case=" << detail::case_name(cfg.case_id)
                << " N=" << cloud.size() << "\n";
            return 0;
        }
    }
    return 1;
}

inline int cli_main(int argc, char** argv) {
    try {
        const std::vector<std::string> args(argv + 1, argv + argc);
        return run(parse_run_config(args));
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mgfdm
