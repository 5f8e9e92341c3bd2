#include "langevin/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "langevin/config_file.hpp"
#include "langevin/errors.hpp"
#include "langevin/experiment.hpp"
#include "langevin/table_io.hpp"

namespace langevin {

namespace {

struct Options {
    std::string config;
    std::string out_dir = ".";
    int workers = 1;
    std::optional<std::uint64_t> seed;
    bool paper_scale = false;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ExperimentConfig load(const Options& o) {
    ExperimentConfig cfg = load_experiment(ConfigFile::load(o.config));
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

int emit_sweep(const SweepTable& table, const ExperimentConfig& cfg, const Options& o,
               const std::string& stem, std::ostream& out) {
    const std::filesystem::path dir(o.out_dir);
    const auto csv = dir / (stem + ".csv");
    write_file(csv, sweep_csv(table, cfg.wallclock));
    out << "wrote " << csv.string() << '\n';
    if (cfg.svg) {
        const auto svg = dir / (stem + ".svg");
        write_file(svg, sweep_svg(table, cfg.label));
        out << "wrote " << svg.string() << '\n';
    }
    return table.any_failed() ? kExitNumerical : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Perturbed underdamped Langevin samplers: analysis, design and experiments",
                 "langevin-perturb"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", o.config, "Experiment config file");
        if (config_required) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "Output directory")->check(CLI::ExistingDirectory);
        sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Override the base seed");
    };

    auto* analytic = app.add_subcommand("analytic-sweep", "Exact asymptotic variance over a grid");
    auto* mc = app.add_subcommand("mc-sweep", "Monte Carlo estimator spread over a grid");
    auto* design = app.add_subcommand("design-j", "Emit optimal J1 and J2");
    auto* spectrum = app.add_subcommand("spectrum", "Truncated generator spectrum");
    auto* overdamped = app.add_subcommand("overdamped-check", "Coupled overdamped-limit errors");
    auto* bridge = app.add_subcommand("bridge", "Diffusion-bridge preset run");
    for (auto* s : {analytic, mc, design, spectrum, overdamped}) add_common(s, true);
    add_common(bridge, false);
    bridge->add_flag("--paper-scale", o.paper_scale, "dt = 1e-4, T = 100, N = 500");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const std::filesystem::path dir(o.out_dir);
        if (*analytic) {
            const ExperimentConfig cfg = load(o);
            return emit_sweep(run_analytic_sweep(cfg), cfg, o, "analytic_sweep", out);
        }
        if (*mc) {
            const ExperimentConfig cfg = load(o);
            return emit_sweep(run_mc_sweep(cfg, o.workers), cfg, o, "mc_sweep", out);
        }
        if (*bridge) {
            ExperimentConfig cfg = o.config.empty() ? bridge_preset(o.paper_scale) : load(o);
            if (o.seed) cfg.seed = *o.seed;
            return emit_sweep(run_mc_sweep(cfg, o.workers), cfg, o, "bridge", out);
        }
        if (*design) {
            const ExperimentConfig cfg = load(o);
            const DesignResult r = run_design(cfg);
            const auto path = dir / "design_j.csv";
            write_file(path, matrix_blocks_csv({{"J1", r.J1.mat()},
                                                {"J2", r.J2.mat()},
                                                {"J_unit", r.J_unit.mat()},
                                                {"A_sym", r.A_sym.mat()}}));
            out << "wrote " << path.string() << '\n';
            return kExitOk;
        }
        if (*spectrum) {
            const ExperimentConfig cfg = load(o);
            const auto path = dir / "spectrum.csv";
            write_file(path, spectrum_csv(run_spectrum(cfg)));
            out << "wrote " << path.string() << '\n';
            return kExitOk;
        }
        if (*overdamped) {
            const ExperimentConfig cfg = load(o);
            const auto path = dir / "overdamped.csv";
            write_file(path, overdamped_csv(run_overdamped_check(cfg, o.workers)));
            out << "wrote " << path.string() << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

}  // namespace langevin
