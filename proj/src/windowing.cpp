#include "ridetect/windowing.hpp"

#include <ostream>

#include "ridetect/errors.hpp"
#include "ridetect/numfmt.hpp"

namespace ridetect {
namespace {

bool reaches_threshold(double rise, const WindowingConfig& config) {
    const double thr = static_cast<double>(config.ri_threshold);
    return config.strict_exceed ? rise > thr : rise >= thr;
}

}  // namespace

void validate(const WindowingConfig& config) {
    if (config.n < WindowingConfig::kRiSpan + 1) {
        throw ConfigError("window length n must be at least " +
                          std::to_string(WindowingConfig::kRiSpan + 1) + ", got " +
                          std::to_string(config.n));
    }
    if (config.stride < 1) {
        throw ConfigError("stride must be positive");
    }
    if (config.ri_threshold <= 0) {
        throw ConfigError("RI threshold must be positive");
    }
}

Label label_window(std::span<const double> winds, const WindowingConfig& config) {
    const int n = static_cast<int>(winds.size());
    constexpr int span = WindowingConfig::kRiSpan;
    if (n < span + 1) {
        throw ConfigError("label_window: need at least " + std::to_string(span + 1) +
                          " winds, got " + std::to_string(n));
    }
    if (config.label_rule == LabelRule::LastAnchored) {
        return reaches_threshold(winds[n - 1] - winds[n - 1 - span], config) ? Label::RI
                                                                             : Label::NonRI;
    }
    for (int i = 0; i + span < n; ++i) {
        if (reaches_threshold(winds[i + span] - winds[i], config)) {
            return Label::RI;
        }
    }
    return Label::NonRI;
}

std::vector<LabeledWindow> build_windows(const Cyclone& c, const WindowingConfig& config,
                                         const FeatureScaler* scaler) {
    validate(config);
    std::vector<LabeledWindow> out;
    const int len = static_cast<int>(c.points.size());
    if (len < config.n) {
        return out;
    }
    out.reserve(static_cast<std::size_t>((len - config.n) / config.stride + 1));

    std::vector<double> winds(static_cast<std::size_t>(config.n));
    for (int start = 0; start + config.n <= len; start += config.stride) {
        LabeledWindow w;
        w.cyclone_id = c.id;
        w.start_index = start;
        w.features = Mat(config.n, kFeatureCount);
        for (int i = 0; i < config.n; ++i) {
            const TrackPoint& p = c.points[static_cast<std::size_t>(start + i)];
            winds[static_cast<std::size_t>(i)] = static_cast<double>(p.wind);
            w.features(i, kFeatLat) = p.lat;
            w.features(i, kFeatLon) = p.lon;
            w.features(i, kFeatWind) = static_cast<double>(p.wind);
        }
        w.label = label_window(winds, config);
        if (scaler != nullptr) {
            for (int i = 0; i < config.n; ++i) {
                for (int f = 0; f < kFeatureCount; ++f) {
                    w.features(i, f) = scaler->scale(f, w.features(i, f));
                }
            }
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<LabeledWindow> build_all_windows(const std::vector<Cyclone>& cyclones,
                                             const WindowingConfig& config,
                                             const FeatureScaler* scaler) {
    std::vector<LabeledWindow> out;
    for (const Cyclone& c : cyclones) {
        std::vector<LabeledWindow> w = build_windows(c, config, scaler);
        out.insert(out.end(), std::make_move_iterator(w.begin()),
                   std::make_move_iterator(w.end()));
    }
    return out;
}

ClassStats class_stats(std::span<const LabeledWindow> windows) {
    if (windows.empty()) {
        throw DataError("class_stats: empty window list");
    }
    ClassStats stats;
    stats.total = static_cast<std::int64_t>(windows.size());
    for (const LabeledWindow& w : windows) {
        if (w.label == Label::RI) {
            ++stats.ri;
        }
    }
    stats.minority_pct = 100.0 * static_cast<double>(stats.ri) / static_cast<double>(stats.total);
    return stats;
}

FeatureScaler fit_scaler(std::span<const LabeledWindow> windows) {
    if (windows.empty()) {
        throw DataError("fit_scaler: empty window list");
    }
    FeatureScaler s;
    for (int f = 0; f < kFeatureCount; ++f) {
        s.lo[f] = windows[0].features(0, f);
        s.hi[f] = windows[0].features(0, f);
    }
    for (const LabeledWindow& w : windows) {
        for (int i = 0; i < w.features.rows; ++i) {
            for (int f = 0; f < kFeatureCount; ++f) {
                const double v = w.features(i, f);
                if (v < s.lo[f]) s.lo[f] = v;
                if (v > s.hi[f]) s.hi[f] = v;
            }
        }
    }
    return s;
}

std::vector<LabeledWindow> apply_scaler(const FeatureScaler& scaler,
                                        std::span<const LabeledWindow> windows) {
    std::vector<LabeledWindow> out(windows.begin(), windows.end());
    for (LabeledWindow& w : out) {
        for (int i = 0; i < w.features.rows; ++i) {
            for (int f = 0; f < kFeatureCount; ++f) {
                w.features(i, f) = scaler.scale(f, w.features(i, f));
            }
        }
    }
    return out;
}

void write_windows_csv(std::span<const LabeledWindow> windows, std::ostream& out) {
    const int n = windows.empty() ? 0 : windows[0].features.rows;
    out << "cyclone_id,start_index,label";
    for (int i = 0; i < n; ++i) {
        out << ",f_" << i << "_lat,f_" << i << "_lon,f_" << i << "_wind";
    }
    out << '\n';
    for (const LabeledWindow& w : windows) {
        out << w.cyclone_id << ',' << w.start_index << ','
            << (w.label == Label::RI ? "RI" : "NonRI");
        for (int i = 0; i < w.features.rows; ++i) {
            for (int f = 0; f < kFeatureCount; ++f) {
                out << ',' << format_double(w.features(i, f));
            }
        }
        out << '\n';
    }
}

}  // namespace ridetect
