#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tcm/scenario.hpp"

namespace {

struct Overrides {
    std::string config_file;
    std::string preset;
    std::vector<std::pair<std::string, std::string>> settings;
};

// Flags are collected in command-line order and applied after the preset and
// config file, so explicit flags always win.
void add_setting_flag(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                      const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.settings.emplace_back(key, v); }, help);
}

tcm::ScenarioConfig resolve(const Overrides& ov) {
    tcm::ScenarioConfig cfg;
    if (!ov.preset.empty()) cfg = tcm::preset_config(ov.preset);
    if (!ov.config_file.empty()) {
        std::ifstream in(ov.config_file);
        if (!in) throw tcm::ConfigError("cannot read config file '" + ov.config_file + "'");
        cfg = tcm::parse_config(in, cfg);
    }
    for (const auto& [k, v] : ov.settings) tcm::apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw tcm::ConfigError("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw std::runtime_error("write failed");
    }

  private:
    std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* app, Overrides& ov) {
    app->add_option("--config", ov.config_file, "key=value configuration file");
    app->add_option("--preset", ov.preset, "fig1, fig2, fig3 or fig4")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
    add_setting_flag(app, ov, "--atomic", "atomic", "atomic state name or amplitudes ee,eg,ge,gg");
    add_setting_flag(app, ov, "--field", "field", "fock or coherent");
    add_setting_flag(app, ov, "--n", "n", "Fock photon number");
    add_setting_flag(app, ov, "--mean-n", "mean_n", "coherent mean photon number");
    add_setting_flag(app, ov, "--g", "g", "coupling rate");
    add_setting_flag(app, ov, "--t-max", "t_max", "final gt");
    add_setting_flag(app, ov, "--steps", "steps", "number of time points");
    add_setting_flag(app, ov, "--seed", "seed", "random seed");
    add_setting_flag(app, ov, "--samples", "samples", "sweep sample count");
    add_setting_flag(app, ov, "--out", "out", "output path (stdout if omitted)");
    add_setting_flag(app, ov, "--tail-tol", "tail_tol", "coherent-state Poisson tail tolerance");
    add_setting_flag(app, ov, "--rank-tol", "rank_tol", "effective-rank tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-atom Tavis-Cummings entanglement simulator"};
    app.require_subcommand(1);

    Overrides ov;
    auto* scenario = app.add_subcommand("scenario", "tangle time series as CSV");
    auto* compare = app.add_subcommand("compare-approx", "exact vs approximate field-ensemble tangle");
    auto* sweep = app.add_subcommand("sweep", "I-residual tangle positivity sweep");
    auto* scaling = app.add_subcommand("scaling", "peak atom-atom tangle vs photon number for |gg,n>");
    for (auto* sc : {scenario, compare, sweep, scaling}) add_common(sc, ov);
    add_setting_flag(sweep, ov, "--dims", "dims", "2x2x3 or 2x2x4");
    std::string dump_path;
    sweep->add_option("--dump", dump_path, "file for counterexample states");
    bool serial = false;
    for (auto* sc : {scenario, compare, sweep}) sc->add_flag("--serial", serial, "use the serial reference path");
    add_setting_flag(compare, ov, "--approx-form", "approx_form", "printed or pointer");
    add_setting_flag(scaling, ov, "--n-list", "n_list", "comma-separated photon numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const tcm::ScenarioConfig cfg = resolve(ov);
        const auto exec = serial ? tcm::Execution::serial : tcm::Execution::parallel;
        Output out(cfg.out);
        if (*scenario) {
            tcm::write_scenario_csv(out.stream(), cfg, tcm::run_series(cfg, exec));
        } else if (*compare) {
            const auto cmp = tcm::compare_exact_vs_approx(cfg, exec);
            tcm::write_compare_csv(out.stream(), cfg, cmp);
        } else if (*sweep) {
            const auto shape = tcm::parse_dims(cfg.dims);
            tcm::SweepOptions opts;
            opts.rank_tol = cfg.rank_tol;
            opts.parallel = !serial;
            const auto result = tcm::positivity_sweep(shape, cfg.samples, cfg.seed, opts);
            tcm::write_sweep_summary(out.stream(), shape, cfg.seed, result);
            if (!dump_path.empty()) {
                std::ofstream dump(dump_path);
                if (!dump) throw tcm::ConfigError("cannot open dump file '" + dump_path + "'");
                tcm::write_state_dump(dump, shape, result.counterexamples);
            }
        } else if (*scaling) {
            tcm::write_scaling_csv(out.stream(), tcm::scaling_study(cfg.n_list, cfg.g));
        }
        out.finish();
    } catch (const tcm::TruncationError& e) {
        std::cerr << "truncation guard: " << e.what() << '\n';
        return 2;
    } catch (const tcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
