#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ridetect/errors.hpp"
#include "ridetect/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rapid-intensification detection pipeline"};
    app.require_subcommand(1);

    std::string basin;
    std::string data_dir;
    std::string config_path;
    std::string out_dir;
    std::string label_rule;
    std::string seeds;
    int n = 0;
    int multiplier = 0;
    bool deterministic_svg = false;

    CLI::Option* basin_opt = app.add_option("--basin", basin, "south_pacific or south_indian");
    CLI::Option* data_dir_opt =
        app.add_option("--data-dir", data_dir, "directory of b-deck files");
    CLI::Option* config_opt =
        app.add_option("--config", config_path, "key=value config file; flags win");
    CLI::Option* n_opt = app.add_option("--n", n, "window length in track points");
    CLI::Option* seeds_opt =
        app.add_option("--seeds", seeds, "seed count, or a comma-separated seed list");
    CLI::Option* multiplier_opt =
        app.add_option("--multiplier", multiplier, "synthetic replicates per RI window");
    CLI::Option* out_dir_opt = app.add_option("--out-dir", out_dir, "output directory");
    CLI::Option* label_rule_opt =
        app.add_option("--label-rule", label_rule, "any_span or last_anchored");
    CLI::Option* svg_opt = app.add_flag("--deterministic-svg", deterministic_svg,
                                        "omit the timestamp comment from SVG outputs");

    CLI::App* ingest = app.add_subcommand("ingest", "parse b-decks into the canonical table");
    CLI::App* stats = app.add_subcommand("stats", "annual and per-category RI climatology");
    CLI::App* sweep = app.add_subcommand("sweep", "U/M benchmark across window lengths");
    CLI::App* benchmark =
        app.add_subcommand("benchmark", "repeated-seed benchmark of the configured strategies");
    CLI::App* augment =
        app.add_subcommand("augment", "augmentation report plus M vs DA-M benchmark");
    CLI::App* plot = app.add_subcommand("plot", "track maps, annual charts, wind histograms");
    for (CLI::App* sub : {ingest, stats, sweep, benchmark, augment, plot}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        ridetect::ExperimentConfig config;
        if (config_opt->count() > 0) {
            config = ridetect::load_config_file(config_path);
        }
        if (basin_opt->count() > 0) ridetect::apply_override(config, "basin", basin);
        if (data_dir_opt->count() > 0) ridetect::apply_override(config, "data_dir", data_dir);
        if (out_dir_opt->count() > 0) ridetect::apply_override(config, "out_dir", out_dir);
        if (n_opt->count() > 0) {
            ridetect::apply_override(config, "n", std::to_string(n));
            config.sweep_n = {n};
        }
        if (seeds_opt->count() > 0) ridetect::apply_override(config, "seeds", seeds);
        if (multiplier_opt->count() > 0) {
            ridetect::apply_override(config, "multiplier", std::to_string(multiplier));
        }
        if (label_rule_opt->count() > 0) {
            ridetect::apply_override(config, "label_rule", label_rule);
        }
        if (svg_opt->count() > 0) config.deterministic_svg = true;

        if (app.got_subcommand(ingest)) {
            ridetect::cmd_ingest(config, std::cout);
        } else if (app.got_subcommand(stats)) {
            ridetect::cmd_stats(config, std::cout);
        } else if (app.got_subcommand(sweep)) {
            ridetect::cmd_sweep(config, std::cout);
        } else if (app.got_subcommand(benchmark)) {
            ridetect::cmd_benchmark(config, std::cout);
        } else if (app.got_subcommand(augment)) {
            ridetect::cmd_augment(config, std::cout);
        } else {
            ridetect::cmd_plot(config, std::cout);
        }
        return 0;
    } catch (const ridetect::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ridetect::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitData;
    } catch (const ridetect::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ridetect::TrainingDiverged& e) {
        std::cerr << "training diverged: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const ridetect::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
