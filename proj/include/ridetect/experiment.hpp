#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ridetect/augmentation.hpp"
#include "ridetect/bdeck.hpp"
#include "ridetect/strategies.hpp"
#include "ridetect/windowing.hpp"

namespace ridetect {

/// Wind thresholds (knots) separating storm categories 1..N; winds below the
/// first threshold fall into category 0.
struct CategoryScale {
    std::vector<int> thresholds = {64, 83, 96, 113, 137};
};

/// Throws ConfigError unless the thresholds are strictly increasing and
/// nonempty.
void validate(const CategoryScale& scale);

int category_of(const CategoryScale& scale, double wind);

/// One experiment: which basin, where the b-deck files live, how to window
/// and train, and where outputs go. Parsed from a key=value file with flag
/// overrides applied on top (flags win).
///
/// Keys: basin, data_dir, out_dir, n, stride, ri_threshold, strict_exceed,
/// label_rule, train_fraction, seeds, strategies, epochs, hidden_size,
/// batch_size, learning_rate, multiplier, relabel, generator_epochs,
/// generator_hidden_size, generator_learning_rate, sweep_n, categories,
/// year_min, year_max, min_points, deterministic_svg, predictions_file,
/// synthetics_file.
struct ExperimentConfig {
    Basin basin = Basin::SouthIndian;
    std::string data_dir;  ///< empty: data/fixtures/<basin name>
    std::string out_dir = "out";
    CleanConfig clean;
    double train_fraction = 0.75;
    WindowingConfig window;
    NetworkSpec network;  ///< classifier template
    AugmentationConfig augmentation;
    std::vector<StrategyKind> strategies = {StrategyKind::U, StrategyKind::M, StrategyKind::E,
                                            StrategyKind::HE};
    std::vector<std::uint64_t> seeds = StrategySpec::default_seeds();
    std::vector<int> sweep_n = {5, 6, 7, 8};
    CategoryScale categories;
    bool deterministic_svg = false;
    std::string predictions_file;  ///< empty: <out_dir>/predictions_<basin>.csv
    std::string synthetics_file;   ///< empty: <out_dir>/synthetics_<basin>.csv
};

Basin basin_from_name(std::string_view name);

/// Apply one key=value setting. Throws ConfigError on unknown keys or
/// unparseable values. The seeds value is either a comma list of seeds or a
/// single integer k meaning seeds 1..k (a trailing comma forces the list
/// reading).
void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parse `key = value` lines; '#' starts a comment, blank lines are skipped.
ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config_file(const std::string& path);

/// Cross-field checks: nonempty seeds, multiplier >= 1, valid windowing,
/// strictly increasing categories, train fraction in (0, 1).
void validate(const ExperimentConfig& config);

std::string resolved_data_dir(const ExperimentConfig& config);
std::string predictions_path(const ExperimentConfig& config);
std::string synthetics_path(const ExperimentConfig& config);

struct YearCount {
    int year = 0;
    std::int64_t count = 0;
};

struct CategoryCount {
    int category = 0;
    std::int64_t count = 0;
};

struct SplitSummary {
    std::string split;
    std::int64_t cyclones = 0;
    ClassStats windows;
};

/// The stats command's numbers: annual frequencies, RI events per storm
/// category, and the split/instance/minority summary.
struct ClimatologyReport {
    std::vector<YearCount> cyclones_by_year;
    std::vector<YearCount> ri_events_by_year;
    std::vector<CategoryCount> ri_by_category;  ///< every category 0..N
    std::vector<SplitSummary> splits;           ///< train, test, total
};

/// Number of qualifying 24-hour rises (i -> i+4) anywhere on the track,
/// independent of the window length.
int count_ri_events(const Cyclone& cyclone, const WindowingConfig& wcfg);

/// Annual bins use the calendar year of each cyclone's first track point.
/// RI events are attributed to the category of the cyclone's lifetime peak
/// wind.
ClimatologyReport compute_climatology(const BasinDataset& dataset, const DatasetSplit& split,
                                      const ExperimentConfig& config);

/// Command entry points. Each loads the basin directory named by the config,
/// writes its artifacts under out_dir, and logs one-line progress notes.
/// Errors propagate: ConfigError for bad settings, ParseError/DataError for
/// bad inputs, TrainingDiverged/NumericError for failed training.
void cmd_ingest(const ExperimentConfig& config, std::ostream& log);
void cmd_stats(const ExperimentConfig& config, std::ostream& log);
void cmd_sweep(const ExperimentConfig& config, std::ostream& log);
void cmd_benchmark(const ExperimentConfig& config, std::ostream& log);
void cmd_augment(const ExperimentConfig& config, std::ostream& log);
void cmd_plot(const ExperimentConfig& config, std::ostream& log);

}  // namespace ridetect
