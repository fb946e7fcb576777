#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ridetect/bdeck.hpp"
#include "ridetect/mat.hpp"

namespace ridetect {

enum class Label { NonRI = 0, RI = 1 };
enum class LabelRule { AnySpan, LastAnchored };

/// Feature column order inside every window.
inline constexpr int kFeatLat = 0;
inline constexpr int kFeatLon = 1;
inline constexpr int kFeatWind = 2;
inline constexpr int kFeatureCount = 3;

struct WindowingConfig {
    int n = 6;               ///< window length in 6-hourly points
    int stride = 1;
    int ri_threshold = 30;   ///< knots over the 24-hour span
    LabelRule label_rule = LabelRule::AnySpan;
    bool strict_exceed = false;  ///< compare with > instead of >=

    /// 24 hours expressed in 6-hour intervals; fixed by the RI definition.
    static constexpr int kRiSpan = 4;
};

/// Throws ConfigError unless n >= 5, stride >= 1, ri_threshold > 0.
void validate(const WindowingConfig& config);

struct LabeledWindow {
    std::string cyclone_id;
    int start_index = 0;
    Mat features;  ///< n x 3, columns (lat, lon, wind)
    Label label = Label::NonRI;
    bool synthetic = false;
};

/// Min-max scaling to [0, 1], fitted on training windows only.
struct FeatureScaler {
    std::array<double, kFeatureCount> lo{};
    std::array<double, kFeatureCount> hi{};

    double scale(int feature, double v) const {
        const double span = hi[feature] - lo[feature];
        if (span <= 0.0) return 0.0;
        return (v - lo[feature]) / span;
    }
    double invert(int feature, double v) const {
        const double span = hi[feature] - lo[feature];
        if (span <= 0.0) return lo[feature];
        return lo[feature] + v * span;
    }
};

struct ClassStats {
    std::int64_t total = 0;
    std::int64_t ri = 0;
    double minority_pct = 0.0;
};

/// RI decision over one window's raw wind column. AnySpan scans every i with
/// i + 4 < n; LastAnchored tests only the final 24-hour span. Throws
/// ConfigError when fewer than 5 winds are supplied.
Label label_window(std::span<const double> winds, const WindowingConfig& config);

/// Slide a length-n window over the track at the configured stride. Labels
/// come from raw winds; features are scaled afterwards when a scaler is
/// supplied. Tracks shorter than n yield an empty list.
std::vector<LabeledWindow> build_windows(const Cyclone& c, const WindowingConfig& config,
                                         const FeatureScaler* scaler = nullptr);

/// Convenience: windows for every cyclone, concatenated in input order.
std::vector<LabeledWindow> build_all_windows(const std::vector<Cyclone>& cyclones,
                                             const WindowingConfig& config,
                                             const FeatureScaler* scaler = nullptr);

/// Throws DataError on an empty window list.
ClassStats class_stats(std::span<const LabeledWindow> windows);

/// Per-feature min/max over the supplied (training) windows. Throws DataError
/// on an empty list.
FeatureScaler fit_scaler(std::span<const LabeledWindow> windows);

/// Copy of the windows with every feature mapped through the scaler. Labels
/// are untouched.
std::vector<LabeledWindow> apply_scaler(const FeatureScaler& scaler,
                                        std::span<const LabeledWindow> windows);

/// Inspection CSV: cyclone_id,start_index,label,f_0_lat,...,f_{n-1}_wind.
void write_windows_csv(std::span<const LabeledWindow> windows, std::ostream& out);

}  // namespace ridetect
