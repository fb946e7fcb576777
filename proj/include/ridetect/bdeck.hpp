#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ridetect/utctime.hpp"

namespace ridetect {

enum class Basin { SouthPacific, SouthIndian };

std::string_view basin_name(Basin b);

/// One six-hourly best-track observation.
struct TrackPoint {
    UtcTime timestamp;
    double lat = 0.0;  ///< degrees, positive north
    double lon = 0.0;  ///< degrees east, normalized to [0, 360)
    int wind = 0;      ///< knots

    bool operator==(const TrackPoint&) const = default;
};

/// One storm: an ordered 6-hourly track.
struct Cyclone {
    std::string id;  ///< basin code + storm number + "-" + season year, e.g. "SH06-1998"
    std::string name;
    std::vector<TrackPoint> points;

    UtcTime start() const { return points.front().timestamp; }
};

struct BasinDataset {
    Basin basin = Basin::SouthPacific;
    std::vector<Cyclone> cyclones;
    int year_min = 1980;
    int year_max = 2020;
};

struct DatasetSplit {
    std::vector<Cyclone> train;
    std::vector<Cyclone> test;
    double train_fraction = 0.75;
};

/// Decoded fields of one b-deck line before grouping.
struct BdeckRecord {
    std::string basin_code;  ///< two-letter ATCF basin code, e.g. "SH"
    int storm_number = 0;
    UtcTime timestamp;
    double lat = 0.0;
    double lon = 0.0;
    int wind = 0;
    std::string name;
};

struct CleanConfig {
    int year_min = 1980;
    int year_max = 2020;
    int min_points = 5;  ///< storms shorter than this after cleaning are rejected
};

/// Tallies from one ingest pass, serialized to JSON on request.
struct IngestReport {
    std::int64_t files = 0;
    std::int64_t lines_total = 0;
    std::int64_t lines_parsed = 0;
    std::int64_t lines_skipped = 0;
    std::int64_t storms_assembled = 0;
    std::int64_t storms_accepted = 0;
    std::int64_t storms_rejected_short = 0;
    std::int64_t storms_rejected_period = 0;
    std::int64_t storms_truncated = 0;
    std::int64_t points_dropped_offsynoptic = 0;

    std::string to_json() const;
};

/// Decode one comma-separated b-deck line. Returns nullopt for blank or
/// comment lines. Throws ParseError (with file and line number) on malformed
/// tokens or an unknown basin code.
std::optional<BdeckRecord> parse_bdeck_line(std::string_view line, const std::string& file,
                                            long line_no);

/// Group records into storms keyed by (basin code, storm number, season year),
/// dedup same-timestamp radius lines keeping the maximum wind, and sort each
/// track by time. Season year follows the southern-hemisphere convention: a
/// July-or-later month belongs to the season labeled with the next calendar
/// year. Throws DataError when same-timestamp lines disagree on position by
/// more than half a degree.
std::vector<Cyclone> assemble_cyclones(const std::vector<BdeckRecord>& records);

/// Drop off-synoptic points, truncate at the first non-6-hour gap, and apply
/// the period and minimum-length filters. Returns nullopt when the storm is
/// rejected; tallies every action in the report.
std::optional<Cyclone> clean_cyclone(const Cyclone& c, const CleanConfig& config,
                                     IngestReport& report);

/// Read every regular file in a directory (sorted by name), parse, assemble,
/// and clean. Throws DataError when the directory is missing or empty.
BasinDataset load_basin_dir(const std::string& dir, Basin basin, const CleanConfig& config,
                            IngestReport& report);

/// Chronological split at storm granularity: the earliest ceil(fraction * N)
/// storms train, the rest test. Throws DataError when fewer than two storms
/// are available or either side would be empty.
DatasetSplit split_by_period(const BasinDataset& dataset, double fraction = 0.75);

/// Canonical dataset CSV, one row per point:
/// cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt
void write_canonical_csv(const std::vector<Cyclone>& cyclones, std::ostream& out);
std::vector<Cyclone> read_canonical_csv(std::istream& in, const std::string& file = "<memory>");

}  // namespace ridetect
