#include "ridetect/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "ridetect/errors.hpp"
#include "ridetect/numfmt.hpp"
#include "ridetect/svg.hpp"
#include "ridetect/utctime.hpp"

namespace ridetect {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> items;
    while (!value.empty()) {
        const std::size_t comma = value.find(',');
        const std::string_view item = trim(value.substr(0, comma));
        if (!item.empty()) {
            items.push_back(item);
        }
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return items;
}

int require_int(std::string_view key, std::string_view value) {
    int out = 0;
    if (!parse_int(value, out)) {
        throw ConfigError("key '" + std::string(key) + "': not an integer: '" +
                          std::string(value) + "'");
    }
    return out;
}

double require_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    if (!parse_double(value, out)) {
        throw ConfigError("key '" + std::string(key) + "': not a number: '" +
                          std::string(value) + "'");
    }
    return out;
}

bool require_bool(std::string_view key, std::string_view value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("key '" + std::string(key) + "': expected true or false, got '" +
                      std::string(value) + "'");
}

std::uint64_t require_u64(std::string_view key, std::string_view value) {
    std::uint64_t out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("key '" + std::string(key) + "': not an unsigned integer: '" +
                          std::string(value) + "'");
    }
    return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << content;
}

void write_svg_text(const ExperimentConfig& config, const std::string& path,
                    const std::string& svg) {
    std::string prefix;
    if (!config.deterministic_svg) {
        const UtcTime now{static_cast<std::int64_t>(std::time(nullptr))};
        prefix = "<!-- generated " + to_iso8601(now) + " -->\n";
    }
    write_text_file(path, prefix + svg);
}

void write_svg_file(const ExperimentConfig& config, const std::string& path,
                    const SvgDocument& doc) {
    write_svg_text(config, path, doc.render());
}

std::string basin_suffix(const ExperimentConfig& config) {
    return std::string(basin_name(config.basin));
}

BasinDataset load_dataset(const ExperimentConfig& config, IngestReport& report) {
    return load_basin_dir(resolved_data_dir(config), config.basin, config.clean, report);
}

StrategySpec make_spec(const ExperimentConfig& config, StrategyKind kind) {
    StrategySpec spec;
    spec.kind = kind;
    spec.window = config.window;
    spec.network = config.network;
    spec.augmentation = config.augmentation;
    spec.seeds = config.seeds;
    return spec;
}

std::string year_counts_csv(const std::vector<YearCount>& counts, std::string_view value_name) {
    std::ostringstream out;
    out << "year," << value_name << '\n';
    for (const YearCount& row : counts) {
        out << row.year << ',' << row.count << '\n';
    }
    return out.str();
}

std::string category_counts_csv(const std::vector<CategoryCount>& counts) {
    std::ostringstream out;
    out << "category,ri_events\n";
    for (const CategoryCount& row : counts) {
        out << row.category << ',' << row.count << '\n';
    }
    return out.str();
}

std::string split_summary_csv(const std::vector<SplitSummary>& splits) {
    std::ostringstream out;
    out << "split,cyclones,windows,ri_windows,minority_pct\n";
    for (const SplitSummary& row : splits) {
        out << row.split << ',' << row.cyclones << ',' << row.windows.total << ','
            << row.windows.ri << ',' << format_double(row.windows.minority_pct) << '\n';
    }
    return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        fields.push_back(line.substr(begin, comma - begin));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return fields;
}

struct PredictionRow {
    std::string strategy;
    std::string cyclone_id;
    int start_index = 0;
    int label = 0;
    int predicted = 0;
};

constexpr std::string_view kPredictionsHeader =
    "strategy,cyclone_id,start_index,label,predicted,p_nonri,p_ri";

std::vector<PredictionRow> read_predictions(std::istream& in, const std::string& file) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kPredictionsHeader) {
        throw ParseError(file, 1, "bad predictions header");
    }
    std::vector<PredictionRow> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(std::string(trim(line)));
        if (fields.size() != 7) {
            throw ParseError(file, line_no, "expected 7 fields");
        }
        PredictionRow row;
        row.strategy = fields[0];
        row.cyclone_id = fields[1];
        if (!parse_int(fields[2], row.start_index) || !parse_int(fields[3], row.label) ||
            !parse_int(fields[4], row.predicted)) {
            throw ParseError(file, line_no, "bad integer field");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct SyntheticTrack {
    std::string id;
    std::vector<std::array<double, 3>> rows;  ///< lat, lon, wind
};

std::vector<SyntheticTrack> read_synthetics(std::istream& in, const std::string& file) {
    std::string line;
    if (!std::getline(in, line) ||
        trim(line) != "cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt,provenance") {
        throw ParseError(file, 1, "bad synthetics header");
    }
    std::vector<SyntheticTrack> tracks;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(std::string(trim(line)));
        if (fields.size() != 6) {
            throw ParseError(file, line_no, "expected 6 fields");
        }
        std::array<double, 3> row{};
        if (!parse_double(fields[2], row[0]) || !parse_double(fields[3], row[1]) ||
            !parse_double(fields[4], row[2])) {
            throw ParseError(file, line_no, "bad numeric field");
        }
        if (tracks.empty() || tracks.back().id != fields[0]) {
            tracks.push_back(SyntheticTrack{fields[0], {}});
        }
        tracks.back().rows.push_back(row);
    }
    return tracks;
}

/// Linear map from data space onto the SVG canvas with fixed margins,
/// y flipped so north is up.
struct MapProjection {
    double lon_lo = 0.0, lon_hi = 1.0;
    double lat_lo = 0.0, lat_hi = 1.0;
    double width = 900.0, height = 540.0, margin = 40.0;

    void fit(double lat, double lon) {
        lat_lo = std::min(lat_lo, lat);
        lat_hi = std::max(lat_hi, lat);
        lon_lo = std::min(lon_lo, lon);
        lon_hi = std::max(lon_hi, lon);
    }
    void pad() {
        if (lon_hi - lon_lo < 1e-9) lon_hi = lon_lo + 1e-9;
        if (lat_hi - lat_lo < 1e-9) lat_hi = lat_lo + 1e-9;
    }
    double x(double lon) const {
        return margin + (lon - lon_lo) / (lon_hi - lon_lo) * (width - 2.0 * margin);
    }
    double y(double lat) const {
        return margin + (lat_hi - lat) / (lat_hi - lat_lo) * (height - 2.0 * margin);
    }
};

MapProjection fit_projection(const std::vector<Cyclone>& cyclones) {
    MapProjection proj;
    bool first = true;
    for (const Cyclone& c : cyclones) {
        for (const TrackPoint& p : c.points) {
            if (first) {
                proj.lat_lo = proj.lat_hi = p.lat;
                proj.lon_lo = proj.lon_hi = p.lon;
                first = false;
            } else {
                proj.fit(p.lat, p.lon);
            }
        }
    }
    proj.pad();
    return proj;
}

std::string bar_chart_svg(const std::vector<YearCount>& counts, const std::string& title) {
    SvgDocument doc(900, 360);
    doc.text(20, 24, title, 15);
    if (counts.empty()) {
        return doc.render();
    }
    std::int64_t max_count = 1;
    for (const YearCount& row : counts) max_count = std::max(max_count, row.count);
    const double left = 40.0, bottom = 320.0, top = 50.0;
    const double span_x = 900.0 - left - 20.0;
    const double bar_w = span_x / static_cast<double>(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double h = (bottom - top) * static_cast<double>(counts[k].count) /
                         static_cast<double>(max_count);
        const double x = left + static_cast<double>(k) * bar_w;
        doc.rect(x + 1.0, bottom - h, bar_w - 2.0, h, "#4477aa");
        if (counts.size() <= 30 || k % 5 == 0) {
            doc.text(x + bar_w / 2.0, bottom + 16.0, std::to_string(counts[k].year), 9, "middle");
        }
    }
    doc.text(left, top - 6.0, "max " + std::to_string(max_count), 10);
    return doc.render();
}

std::string benchmark_csv_string(std::span<const BenchmarkResult> results,
                                 bool include_aggregates) {
    std::ostringstream out;
    write_benchmark_csv(results, out, include_aggregates);
    return out.str();
}

std::string predictions_csv(const ExperimentConfig& config, const DatasetSplit& split,
                            std::span<const StrategyKind> kinds) {
    const std::vector<LabeledWindow> test_windows = build_all_windows(split.test, config.window);
    std::ostringstream out;
    out << kPredictionsHeader << '\n';
    for (StrategyKind kind : kinds) {
        const TrainedClassifier classifier =
            train_strategy(make_spec(config, kind), split, config.seeds.front());
        for (const LabeledWindow& w : test_windows) {
            const Vec probs = predict(classifier, w);
            out << strategy_name(kind) << ',' << w.cyclone_id << ',' << w.start_index << ','
                << (w.label == Label::RI ? 1 : 0) << ',' << predicted_class(probs) << ','
                << format_double(probs[0]) << ',' << format_double(probs[1]) << '\n';
        }
    }
    return out.str();
}

void log_benchmark(std::ostream& log, const BenchmarkResult& result) {
    const MetricSummary ri = summarize_class(result, "RI");
    log << strategy_name(result.kind) << " n=" << result.n << ": RI F1 "
        << format_double(ri.f1.mean) << " +/- " << format_double(ri.f1.ci_halfwidth) << " over "
        << result.runs.size() << " runs";
    if (!result.diverged_seeds.empty()) {
        log << " (" << result.diverged_seeds.size() << " diverged)";
    }
    log << '\n';
}

}  // namespace

void validate(const CategoryScale& scale) {
    if (scale.thresholds.empty()) {
        throw ConfigError("category scale needs at least one threshold");
    }
    for (std::size_t k = 1; k < scale.thresholds.size(); ++k) {
        if (scale.thresholds[k] <= scale.thresholds[k - 1]) {
            throw ConfigError("category thresholds must be strictly increasing");
        }
    }
}

int category_of(const CategoryScale& scale, double wind) {
    int category = 0;
    for (std::size_t k = 0; k < scale.thresholds.size(); ++k) {
        if (wind >= static_cast<double>(scale.thresholds[k])) {
            category = static_cast<int>(k) + 1;
        }
    }
    return category;
}

Basin basin_from_name(std::string_view name) {
    if (name == "south_pacific" || name == "sp" || name == "SP") return Basin::SouthPacific;
    if (name == "south_indian" || name == "si" || name == "SI") return Basin::SouthIndian;
    throw ConfigError("unknown basin '" + std::string(name) + "'");
}

void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value) {
    if (key == "basin") {
        config.basin = basin_from_name(value);
    } else if (key == "data_dir") {
        config.data_dir = std::string(value);
    } else if (key == "out_dir") {
        config.out_dir = std::string(value);
    } else if (key == "n") {
        config.window.n = require_int(key, value);
    } else if (key == "stride") {
        config.window.stride = require_int(key, value);
    } else if (key == "ri_threshold") {
        config.window.ri_threshold = require_int(key, value);
    } else if (key == "strict_exceed") {
        config.window.strict_exceed = require_bool(key, value);
    } else if (key == "label_rule") {
        if (value == "any_span") {
            config.window.label_rule = LabelRule::AnySpan;
        } else if (value == "last_anchored") {
            config.window.label_rule = LabelRule::LastAnchored;
        } else {
            throw ConfigError("key 'label_rule': expected any_span or last_anchored");
        }
    } else if (key == "train_fraction") {
        config.train_fraction = require_double(key, value);
    } else if (key == "seeds") {
        std::vector<std::uint64_t> seeds;
        if (value.find(',') == std::string_view::npos) {
            const int count = require_int(key, value);
            if (count < 1) {
                throw ConfigError("key 'seeds': count must be positive");
            }
            seeds = StrategySpec::default_seeds(count);
        } else {
            for (std::string_view item : split_list(value)) {
                seeds.push_back(require_u64(key, item));
            }
        }
        config.seeds = std::move(seeds);
    } else if (key == "strategies") {
        std::vector<StrategyKind> kinds;
        for (std::string_view item : split_list(value)) {
            kinds.push_back(strategy_from_name(item));
        }
        if (kinds.empty()) {
            throw ConfigError("key 'strategies': empty list");
        }
        config.strategies = std::move(kinds);
    } else if (key == "epochs") {
        config.network.epochs = require_int(key, value);
    } else if (key == "hidden_size") {
        config.network.hidden_size = require_int(key, value);
    } else if (key == "batch_size") {
        config.network.batch_size = require_int(key, value);
    } else if (key == "learning_rate") {
        config.network.learning_rate = require_double(key, value);
    } else if (key == "multiplier") {
        const int multiplier = require_int(key, value);
        if (multiplier < 1) {
            throw ConfigError("key 'multiplier': must be >= 1");
        }
        config.augmentation.multiplier = multiplier;
    } else if (key == "relabel") {
        if (value == "keep_only_ri") {
            config.augmentation.relabel = RelabelPolicy::KeepOnlyRI;
        } else if (value == "trust_construction") {
            config.augmentation.relabel = RelabelPolicy::TrustConstruction;
        } else {
            throw ConfigError("key 'relabel': expected keep_only_ri or trust_construction");
        }
    } else if (key == "generator_epochs") {
        config.augmentation.generator.epochs = require_int(key, value);
    } else if (key == "generator_hidden_size") {
        config.augmentation.generator.hidden_size = require_int(key, value);
    } else if (key == "generator_learning_rate") {
        config.augmentation.generator.learning_rate = require_double(key, value);
    } else if (key == "sweep_n") {
        std::vector<int> values;
        for (std::string_view item : split_list(value)) {
            values.push_back(require_int(key, item));
        }
        if (values.empty()) {
            throw ConfigError("key 'sweep_n': empty list");
        }
        config.sweep_n = std::move(values);
    } else if (key == "categories") {
        std::vector<int> thresholds;
        for (std::string_view item : split_list(value)) {
            thresholds.push_back(require_int(key, item));
        }
        config.categories.thresholds = std::move(thresholds);
    } else if (key == "year_min") {
        config.clean.year_min = require_int(key, value);
    } else if (key == "year_max") {
        config.clean.year_max = require_int(key, value);
    } else if (key == "min_points") {
        config.clean.min_points = require_int(key, value);
    } else if (key == "deterministic_svg") {
        config.deterministic_svg = require_bool(key, value);
    } else if (key == "predictions_file") {
        config.predictions_file = std::string(value);
    } else if (key == "synthetics_file") {
        config.synthetics_file = std::string(value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig config;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        const std::size_t hash = text.find('#');
        if (hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string_view key = trim(text.substr(0, eq));
        const std::string_view value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        }
        try {
            apply_override(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse_config(in, path);
}

void validate(const ExperimentConfig& config) {
    validate(config.window);
    validate(config.categories);
    if (config.seeds.empty()) {
        throw ConfigError("seeds must be nonempty");
    }
    if (config.augmentation.multiplier < 1) {
        throw ConfigError("multiplier must be >= 1");
    }
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    if (config.sweep_n.empty()) {
        throw ConfigError("sweep_n must be nonempty");
    }
    for (int n : config.sweep_n) {
        WindowingConfig wcfg = config.window;
        wcfg.n = n;
        validate(wcfg);
    }
}

std::string resolved_data_dir(const ExperimentConfig& config) {
    if (!config.data_dir.empty()) {
        return config.data_dir;
    }
    return join_path("data/fixtures", std::string(basin_name(config.basin)));
}

std::string predictions_path(const ExperimentConfig& config) {
    if (!config.predictions_file.empty()) {
        return config.predictions_file;
    }
    return join_path(config.out_dir, "predictions_" + basin_suffix(config) + ".csv");
}

std::string synthetics_path(const ExperimentConfig& config) {
    if (!config.synthetics_file.empty()) {
        return config.synthetics_file;
    }
    return join_path(config.out_dir, "synthetics_" + basin_suffix(config) + ".csv");
}

int count_ri_events(const Cyclone& cyclone, const WindowingConfig& wcfg) {
    int events = 0;
    const std::vector<TrackPoint>& points = cyclone.points;
    for (std::size_t i = 0; i + WindowingConfig::kRiSpan < points.size(); ++i) {
        const int rise = points[i + WindowingConfig::kRiSpan].wind - points[i].wind;
        const bool hit =
            wcfg.strict_exceed ? rise > wcfg.ri_threshold : rise >= wcfg.ri_threshold;
        if (hit) ++events;
    }
    return events;
}

ClimatologyReport compute_climatology(const BasinDataset& dataset, const DatasetSplit& split,
                                      const ExperimentConfig& config) {
    ClimatologyReport report;

    std::map<int, std::int64_t> cyclones_by_year;
    std::map<int, std::int64_t> ri_by_year;
    std::vector<std::int64_t> by_category(config.categories.thresholds.size() + 1, 0);
    for (const Cyclone& c : dataset.cyclones) {
        const int year = utc_year(c.start());
        cyclones_by_year[year] += 1;
        const int events = count_ri_events(c, config.window);
        ri_by_year[year] += events;
        if (events > 0) {
            int peak = 0;
            for (const TrackPoint& p : c.points) peak = std::max(peak, p.wind);
            by_category[static_cast<std::size_t>(
                category_of(config.categories, static_cast<double>(peak)))] += events;
        }
    }
    for (const auto& [year, count] : cyclones_by_year) {
        report.cyclones_by_year.push_back(YearCount{year, count});
    }
    for (const auto& [year, count] : ri_by_year) {
        report.ri_events_by_year.push_back(YearCount{year, count});
    }
    for (std::size_t k = 0; k < by_category.size(); ++k) {
        report.ri_by_category.push_back(CategoryCount{static_cast<int>(k), by_category[k]});
    }

    const auto summarize = [&](const std::string& name, const std::vector<Cyclone>& part) {
        SplitSummary summary;
        summary.split = name;
        summary.cyclones = static_cast<std::int64_t>(part.size());
        const std::vector<LabeledWindow> windows = build_all_windows(part, config.window);
        if (!windows.empty()) {
            summary.windows = class_stats(windows);
        }
        return summary;
    };
    report.splits.push_back(summarize("train", split.train));
    report.splits.push_back(summarize("test", split.test));
    report.splits.push_back(summarize("total", dataset.cyclones));
    return report;
}

void cmd_ingest(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport report;
    const BasinDataset dataset = load_dataset(config, report);

    std::ostringstream canonical;
    write_canonical_csv(dataset.cyclones, canonical);
    const std::string suffix = basin_suffix(config);
    write_text_file(join_path(config.out_dir, "canonical_" + suffix + ".csv"), canonical.str());
    write_text_file(join_path(config.out_dir, "ingest_report_" + suffix + ".json"),
                    report.to_json() + "\n");
    log << "ingested " << dataset.cyclones.size() << " cyclones from "
        << resolved_data_dir(config) << " (" << report.storms_assembled << " assembled, "
        << report.storms_rejected_short + report.storms_rejected_period << " rejected)\n";
}

void cmd_stats(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport ingest;
    const BasinDataset dataset = load_dataset(config, ingest);
    const DatasetSplit split = split_by_period(dataset, config.train_fraction);
    const ClimatologyReport report = compute_climatology(dataset, split, config);

    const std::string suffix = basin_suffix(config);
    write_text_file(join_path(config.out_dir, "cyclones_by_year_" + suffix + ".csv"),
                    year_counts_csv(report.cyclones_by_year, "cyclones"));
    write_text_file(join_path(config.out_dir, "ri_events_by_year_" + suffix + ".csv"),
                    year_counts_csv(report.ri_events_by_year, "ri_events"));
    write_text_file(join_path(config.out_dir, "ri_by_category_" + suffix + ".csv"),
                    category_counts_csv(report.ri_by_category));
    write_text_file(join_path(config.out_dir, "split_summary_" + suffix + ".csv"),
                    split_summary_csv(report.splits));

    for (const SplitSummary& row : report.splits) {
        log << row.split << ": " << row.cyclones << " cyclones, " << row.windows.total
            << " windows, " << row.windows.ri << " RI ("
            << format_double(row.windows.minority_pct) << "% minority)\n";
    }
}

void cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport ingest;
    const BasinDataset dataset = load_dataset(config, ingest);
    const DatasetSplit split = split_by_period(dataset, config.train_fraction);

    std::vector<BenchmarkResult> results;
    for (int n : config.sweep_n) {
        for (StrategyKind kind : {StrategyKind::U, StrategyKind::M}) {
            StrategySpec spec = make_spec(config, kind);
            spec.window.n = n;
            results.push_back(run_benchmark(spec, split));
            log_benchmark(log, results.back());
        }
    }
    const std::string suffix = basin_suffix(config);
    write_text_file(join_path(config.out_dir, "sweep_" + suffix + ".csv"),
                    benchmark_csv_string(results, false));

    int best_n = config.sweep_n.front();
    double best_f1 = -1.0;
    for (std::size_t k = 0; k < config.sweep_n.size(); ++k) {
        const double u_f1 = summarize_class(results[2 * k], "RI").f1.mean;
        const double m_f1 = summarize_class(results[2 * k + 1], "RI").f1.mean;
        const double mean_f1 = 0.5 * (u_f1 + m_f1);
        if (mean_f1 > best_f1) {
            best_f1 = mean_f1;
            best_n = config.sweep_n[static_cast<std::size_t>(k)];
        }
    }
    log << "selected n=" << best_n << " (mean RI F1 " << format_double(best_f1) << ")\n";
}

void cmd_benchmark(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport ingest;
    const BasinDataset dataset = load_dataset(config, ingest);
    const DatasetSplit split = split_by_period(dataset, config.train_fraction);

    std::vector<BenchmarkResult> results;
    for (StrategyKind kind : config.strategies) {
        results.push_back(run_benchmark(make_spec(config, kind), split));
        log_benchmark(log, results.back());
    }
    const std::string suffix = basin_suffix(config);
    write_text_file(join_path(config.out_dir, "benchmark_" + suffix + ".csv"),
                    benchmark_csv_string(results, true));
    write_text_file(predictions_path(config),
                    predictions_csv(config, split, config.strategies));
    log << "wrote benchmark_" << suffix << ".csv and " << predictions_path(config) << '\n';
}

void cmd_augment(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport ingest;
    const BasinDataset dataset = load_dataset(config, ingest);
    const DatasetSplit split = split_by_period(dataset, config.train_fraction);
    const std::string suffix = basin_suffix(config);

    const AugmentationArtifacts artifacts =
        run_augmentation(make_spec(config, StrategyKind::DA_M), split, config.seeds.front());
    std::ostringstream synthetics;
    write_synthetics_csv(artifacts.synthetics, synthetics);
    write_text_file(synthetics_path(config), synthetics.str());

    nlohmann::ordered_json j;
    j["basin"] = std::string(basin_name(config.basin));
    j["seed"] = config.seeds.front();
    j["generator"] = {{"holdout_count", artifacts.generator.report.holdout_count},
                      {"mse", artifacts.generator.report.mse},
                      {"mse_per_feature", artifacts.generator.report.mse_per_feature}};
    j["synthesis"] = {{"generated", artifacts.synthesis.generated},
                      {"kept", artifacts.synthesis.kept},
                      {"discarded", artifacts.synthesis.discarded}};
    j["train_windows"] = {{"before",
                           {{"total", artifacts.assimilation.before.total},
                            {"ri", artifacts.assimilation.before.ri},
                            {"minority_pct", artifacts.assimilation.before.minority_pct}}},
                          {"after",
                           {{"total", artifacts.assimilation.after.total},
                            {"ri", artifacts.assimilation.after.ri},
                            {"minority_pct", artifacts.assimilation.after.minority_pct}}}};
    write_text_file(join_path(config.out_dir, "augment_report_" + suffix + ".json"),
                    j.dump(2) + "\n");
    log << "generator holdout MSE " << format_double(artifacts.generator.report.mse) << " over "
        << artifacts.generator.report.holdout_count << " samples; kept "
        << artifacts.synthesis.kept << "/" << artifacts.synthesis.generated
        << " synthetics; minority "
        << format_double(artifacts.assimilation.before.minority_pct) << "% -> "
        << format_double(artifacts.assimilation.after.minority_pct) << "%\n";

    std::vector<BenchmarkResult> results;
    for (StrategyKind kind : {StrategyKind::M, StrategyKind::DA_M}) {
        results.push_back(run_benchmark(make_spec(config, kind), split));
        log_benchmark(log, results.back());
    }
    write_text_file(join_path(config.out_dir, "augment_" + suffix + ".csv"),
                    benchmark_csv_string(results, true));
    const StrategyKind kinds[] = {StrategyKind::M, StrategyKind::DA_M};
    write_text_file(predictions_path(config), predictions_csv(config, split, kinds));
    log << "wrote augment_" << suffix << ".csv, " << synthetics_path(config) << " and "
        << predictions_path(config) << '\n';
}

void cmd_plot(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out_dir);
    IngestReport ingest;
    const BasinDataset dataset = load_dataset(config, ingest);
    const DatasetSplit split = split_by_period(dataset, config.train_fraction);
    const std::string suffix = basin_suffix(config);

    std::vector<PredictionRow> predictions;
    const std::string pred_path = predictions_path(config);
    if (fs::exists(pred_path)) {
        std::ifstream in(pred_path);
        predictions = read_predictions(in, pred_path);
    } else if (!config.predictions_file.empty()) {
        throw DataError("predictions file not found: " + pred_path);
    }
    std::string plotted_strategy;
    std::map<std::pair<std::string, int>, int> predicted_by_window;
    if (!predictions.empty()) {
        plotted_strategy = predictions.front().strategy;
        for (const PredictionRow& row : predictions) {
            if (row.strategy == plotted_strategy) {
                predicted_by_window[{row.cyclone_id, row.start_index}] = row.predicted;
            }
        }
    }

    const MapProjection proj = fit_projection(dataset.cyclones);
    SvgDocument tracks(proj.width, proj.height);
    std::ostringstream ri_points;
    ri_points << "cyclone_id,point_index,lat_deg,lon_deg_east,wind_kt,status\n";
    for (const Cyclone& c : dataset.cyclones) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(c.points.size());
        for (const TrackPoint& p : c.points) {
            pts.emplace_back(proj.x(p.lon), proj.y(p.lat));
        }
        tracks.polyline(pts, "#88aacc", 1.0);
    }
    if (predicted_by_window.empty()) {
        for (const Cyclone& c : dataset.cyclones) {
            for (std::size_t i = 0; i + WindowingConfig::kRiSpan < c.points.size(); ++i) {
                const TrackPoint& from = c.points[i];
                const TrackPoint& to = c.points[i + WindowingConfig::kRiSpan];
                const int rise = to.wind - from.wind;
                const bool hit = config.window.strict_exceed
                                     ? rise > config.window.ri_threshold
                                     : rise >= config.window.ri_threshold;
                if (!hit) continue;
                tracks.circle(proj.x(to.lon), proj.y(to.lat), 2.5, "#ff9900");
                ri_points << c.id << ',' << i + WindowingConfig::kRiSpan << ','
                          << format_double(to.lat) << ',' << format_double(to.lon) << ','
                          << to.wind << ",event\n";
            }
        }
    }
    if (!predicted_by_window.empty()) {
        const std::vector<LabeledWindow> test_windows =
            build_all_windows(split.test, config.window);
        std::map<std::string, const Cyclone*> by_id;
        for (const Cyclone& c : split.test) by_id[c.id] = &c;
        for (const LabeledWindow& w : test_windows) {
            if (w.label != Label::RI) continue;
            const auto pred = predicted_by_window.find({w.cyclone_id, w.start_index});
            if (pred == predicted_by_window.end()) continue;
            const Cyclone& c = *by_id.at(w.cyclone_id);
            const std::size_t end_index =
                static_cast<std::size_t>(w.start_index + config.window.n - 1);
            const TrackPoint& p = c.points[end_index];
            const bool detected = pred->second == 1;
            tracks.circle(proj.x(p.lon), proj.y(p.lat), 3.0,
                          detected ? "#2ca02c" : "#d62728");
            ri_points << c.id << ',' << end_index << ',' << format_double(p.lat) << ','
                      << format_double(p.lon) << ',' << p.wind << ','
                      << (detected ? "detected" : "missed") << '\n';
        }
        tracks.text(20, 24, "RI windows, " + plotted_strategy + ": detected green, missed red",
                    13);
    } else {
        tracks.text(20, 24, "tracks with RI events marked", 13);
    }
    write_svg_file(config, join_path(config.out_dir, "tracks_" + suffix + ".svg"), tracks);
    write_text_file(join_path(config.out_dir, "ri_points_" + suffix + ".csv"), ri_points.str());
    std::ostringstream canonical;
    write_canonical_csv(dataset.cyclones, canonical);
    write_text_file(join_path(config.out_dir, "track_points_" + suffix + ".csv"),
                    canonical.str());

    const ClimatologyReport climate = compute_climatology(dataset, split, config);
    write_text_file(join_path(config.out_dir, "cyclones_by_year_" + suffix + ".csv"),
                    year_counts_csv(climate.cyclones_by_year, "cyclones"));
    write_text_file(join_path(config.out_dir, "ri_events_by_year_" + suffix + ".csv"),
                    year_counts_csv(climate.ri_events_by_year, "ri_events"));
    write_svg_text(config, join_path(config.out_dir, "cyclones_by_year_" + suffix + ".svg"),
                   bar_chart_svg(climate.cyclones_by_year, "cyclones per year (" + suffix + ")"));
    write_svg_text(config, join_path(config.out_dir, "ri_events_by_year_" + suffix + ".svg"),
                   bar_chart_svg(climate.ri_events_by_year,
                                 "RI events per year (" + suffix + ")"));

    const std::string synth_path = synthetics_path(config);
    if (fs::exists(synth_path)) {
        std::ifstream in(synth_path);
        const std::vector<SyntheticTrack> synthetics = read_synthetics(in, synth_path);
        if (synthetics.empty()) {
            throw DataError("synthetics file is empty: " + synth_path);
        }

        MapProjection sproj;
        bool first = true;
        for (const SyntheticTrack& t : synthetics) {
            for (const auto& row : t.rows) {
                if (first) {
                    sproj.lat_lo = sproj.lat_hi = row[0];
                    sproj.lon_lo = sproj.lon_hi = row[1];
                    first = false;
                } else {
                    sproj.fit(row[0], row[1]);
                }
            }
        }
        sproj.pad();
        SvgDocument synth_tracks(sproj.width, sproj.height);
        synth_tracks.text(20, 24, "synthetic RI sequences", 13);
        for (const SyntheticTrack& t : synthetics) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& row : t.rows) {
                pts.emplace_back(sproj.x(row[1]), sproj.y(row[0]));
            }
            synth_tracks.polyline(pts, "#aa3377", 1.0);
            if (!t.rows.empty()) {
                synth_tracks.circle(sproj.x(t.rows[0][1]), sproj.y(t.rows[0][0]), 2.0,
                                    "#ff9900");
            }
        }
        write_svg_file(config, join_path(config.out_dir, "synthetic_tracks_" + suffix + ".svg"),
                       synth_tracks);

        std::vector<double> real_means;
        for (const LabeledWindow& w : build_all_windows(split.train, config.window)) {
            if (w.label != Label::RI) continue;
            double sum = 0.0;
            for (int t = 0; t < w.features.rows; ++t) sum += w.features(t, kFeatWind);
            real_means.push_back(sum / w.features.rows);
        }
        std::vector<double> synth_means;
        for (const SyntheticTrack& t : synthetics) {
            double sum = 0.0;
            for (const auto& row : t.rows) sum += row[2];
            synth_means.push_back(sum / static_cast<double>(t.rows.size()));
        }
        if (real_means.empty()) {
            throw DataError("no real RI windows to compare against");
        }
        double lo = real_means.front();
        double hi = real_means.front();
        for (double v : real_means) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (double v : synth_means) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo < 1e-9) hi = lo + 1e-9;
        constexpr int kBins = 20;
        std::vector<std::int64_t> real_bins(kBins, 0);
        std::vector<std::int64_t> synth_bins(kBins, 0);
        const auto bin_of = [&](double v) {
            return std::min(kBins - 1, static_cast<int>((v - lo) / (hi - lo) * kBins));
        };
        for (double v : real_means) ++real_bins[static_cast<std::size_t>(bin_of(v))];
        for (double v : synth_means) ++synth_bins[static_cast<std::size_t>(bin_of(v))];

        std::ostringstream hist;
        hist << "bin_lo,bin_hi,real_count,synthetic_count\n";
        for (int b = 0; b < kBins; ++b) {
            const double bin_lo = lo + (hi - lo) * b / kBins;
            const double bin_hi = lo + (hi - lo) * (b + 1) / kBins;
            hist << format_double(bin_lo) << ',' << format_double(bin_hi) << ','
                 << real_bins[static_cast<std::size_t>(b)] << ','
                 << synth_bins[static_cast<std::size_t>(b)] << '\n';
        }
        write_text_file(join_path(config.out_dir, "wind_histogram_" + suffix + ".csv"),
                        hist.str());

        SvgDocument histogram(900, 360);
        histogram.text(20, 24, "average wind per RI instance: real blue, synthetic purple", 13);
        std::int64_t max_count = 1;
        for (int b = 0; b < kBins; ++b) {
            max_count = std::max({max_count, real_bins[static_cast<std::size_t>(b)],
                                  synth_bins[static_cast<std::size_t>(b)]});
        }
        const double left = 40.0, bottom = 320.0, top = 50.0;
        const double bar_w = (900.0 - left - 20.0) / (2.0 * kBins);
        for (int b = 0; b < kBins; ++b) {
            const double hr = (bottom - top) *
                              static_cast<double>(real_bins[static_cast<std::size_t>(b)]) /
                              static_cast<double>(max_count);
            const double hs = (bottom - top) *
                              static_cast<double>(synth_bins[static_cast<std::size_t>(b)]) /
                              static_cast<double>(max_count);
            const double x = left + 2.0 * b * bar_w;
            histogram.rect(x, bottom - hr, bar_w - 1.0, hr, "#4477aa");
            histogram.rect(x + bar_w, bottom - hs, bar_w - 1.0, hs, "#aa3377");
        }
        write_svg_file(config, join_path(config.out_dir, "wind_histogram_" + suffix + ".svg"),
                       histogram);
        log << "plotted " << synthetics.size() << " synthetic sequences and the wind histogram\n";
    } else if (!config.synthetics_file.empty()) {
        throw DataError("synthetics file not found: " + synth_path);
    }

    log << "wrote tracks_" << suffix << ".svg and annual charts into " << config.out_dir << '\n';
}

}  // namespace ridetect
