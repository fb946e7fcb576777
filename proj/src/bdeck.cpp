#include "ridetect/bdeck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "ridetect/errors.hpp"
#include "ridetect/numfmt.hpp"

namespace ridetect {
namespace {

constexpr std::array<std::string_view, 7> kBasinCodes = {"AL", "CP", "EP", "IO",
                                                         "SH", "SL", "WP"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

UtcTime parse_bdeck_timestamp(std::string_view token, const std::string& file, long line_no) {
    int y = 0, mo = 0, d = 0, h = 0;
    if (token.size() != 10 || !parse_int(token.substr(0, 4), y) ||
        !parse_int(token.substr(4, 2), mo) || !parse_int(token.substr(6, 2), d) ||
        !parse_int(token.substr(8, 2), h)) {
        throw ParseError(file, line_no, "bad timestamp token '" + std::string(token) + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23) {
        throw ParseError(file, line_no, "timestamp out of range '" + std::string(token) + "'");
    }
    const UtcTime t = make_utc(y, mo, d, h);
    const CivilTime back = civil_from_utc(t);
    if (back.year != y || back.month != mo || back.day != d) {
        throw ParseError(file, line_no, "no such calendar day '" + std::string(token) + "'");
    }
    return t;
}

double parse_hemisphere_token(std::string_view token, char pos_suffix, char neg_suffix,
                              const std::string& file, long line_no) {
    if (token.size() < 2) {
        throw ParseError(file, line_no, "bad coordinate token '" + std::string(token) + "'");
    }
    const char suffix = token.back();
    int tenths = 0;
    if ((suffix != pos_suffix && suffix != neg_suffix) ||
        !parse_int(token.substr(0, token.size() - 1), tenths) || tenths < 0) {
        throw ParseError(file, line_no, "bad coordinate token '" + std::string(token) + "'");
    }
    const double degrees = tenths / 10.0;
    return suffix == pos_suffix ? degrees : -degrees;
}

/// Season a southern-hemisphere timestamp belongs to: seasons straddle the
/// new year and are labeled by the year they end in.
int season_year(UtcTime t) {
    const CivilTime c = civil_from_utc(t);
    return c.month >= 7 ? c.year + 1 : c.year;
}

std::string make_cyclone_id(const std::string& basin_code, int number, int season) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02d-%04d", basin_code.c_str(), number, season);
    return buf;
}

double lon_distance(double a, double b) {
    const double d = std::fabs(a - b);
    return std::min(d, 360.0 - d);
}

}  // namespace

std::string_view basin_name(Basin b) {
    return b == Basin::SouthPacific ? "south_pacific" : "south_indian";
}

std::optional<BdeckRecord> parse_bdeck_line(std::string_view line, const std::string& file,
                                            long line_no) {
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
        return std::nullopt;
    }
    const std::vector<std::string_view> fields = split_commas(body);
    if (fields.size() < 9) {
        throw ParseError(file, line_no, "expected at least 9 comma-separated fields, got " +
                                            std::to_string(fields.size()));
    }

    BdeckRecord rec;
    rec.basin_code = std::string(fields[0]);
    if (std::find(kBasinCodes.begin(), kBasinCodes.end(), rec.basin_code) == kBasinCodes.end()) {
        throw ParseError(file, line_no, "unknown basin code '" + rec.basin_code + "'");
    }
    if (!parse_int(fields[1], rec.storm_number) || rec.storm_number < 0) {
        throw ParseError(file, line_no, "bad storm number '" + std::string(fields[1]) + "'");
    }
    rec.timestamp = parse_bdeck_timestamp(fields[2], file, line_no);

    rec.lat = parse_hemisphere_token(fields[6], 'N', 'S', file, line_no);
    if (rec.lat < -90.0 || rec.lat > 90.0) {
        throw ParseError(file, line_no, "latitude out of range '" + std::string(fields[6]) + "'");
    }
    double lon = parse_hemisphere_token(fields[7], 'E', 'W', file, line_no);
    if (lon < -360.0 || lon > 360.0) {
        throw ParseError(file, line_no, "longitude out of range '" + std::string(fields[7]) + "'");
    }
    if (lon < 0.0) {
        lon = 360.0 + lon;  // west longitudes continue east across the dateline
    }
    if (lon >= 360.0) {
        lon -= 360.0;
    }
    rec.lon = lon;

    if (!parse_int(fields[8], rec.wind) || rec.wind < 0) {
        throw ParseError(file, line_no, "bad wind token '" + std::string(fields[8]) + "'");
    }
    if (fields.size() > 27 && !fields[27].empty()) {
        rec.name = std::string(fields[27]);
    }
    return rec;
}

std::vector<Cyclone> assemble_cyclones(const std::vector<BdeckRecord>& records) {
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, Cyclone> storms;
    std::map<Key, std::map<std::int64_t, std::size_t>> point_index;

    for (const BdeckRecord& rec : records) {
        const Key key{rec.basin_code, rec.storm_number, season_year(rec.timestamp)};
        Cyclone& storm = storms[key];
        if (storm.id.empty()) {
            storm.id = make_cyclone_id(rec.basin_code, rec.storm_number, std::get<2>(key));
        }
        if (!rec.name.empty()) {
            storm.name = rec.name;
        }

        auto& index = point_index[key];
        const auto it = index.find(rec.timestamp.secs);
        if (it == index.end()) {
            index.emplace(rec.timestamp.secs, storm.points.size());
            storm.points.push_back(TrackPoint{rec.timestamp, rec.lat, rec.lon, rec.wind});
            continue;
        }
        TrackPoint& existing = storm.points[it->second];
        if (std::fabs(existing.lat - rec.lat) > 0.5 || lon_distance(existing.lon, rec.lon) > 0.5) {
            throw DataError("storm " + storm.id + ": conflicting positions at " +
                            to_iso8601(rec.timestamp));
        }
        existing.wind = std::max(existing.wind, rec.wind);
    }

    std::vector<Cyclone> out;
    out.reserve(storms.size());
    for (auto& [key, storm] : storms) {
        std::sort(storm.points.begin(), storm.points.end(),
                  [](const TrackPoint& a, const TrackPoint& b) { return a.timestamp < b.timestamp; });
        out.push_back(std::move(storm));
    }
    return out;
}

std::optional<Cyclone> clean_cyclone(const Cyclone& c, const CleanConfig& config,
                                     IngestReport& report) {
    Cyclone cleaned;
    cleaned.id = c.id;
    cleaned.name = c.name;
    for (const TrackPoint& p : c.points) {
        const CivilTime civil = civil_from_utc(p.timestamp);
        if (civil.hour % 6 == 0 && civil.minute == 0 && civil.second == 0) {
            cleaned.points.push_back(p);
        } else {
            ++report.points_dropped_offsynoptic;
        }
    }

    std::size_t keep = cleaned.points.empty() ? 0 : 1;
    while (keep < cleaned.points.size() &&
           cleaned.points[keep].timestamp.secs - cleaned.points[keep - 1].timestamp.secs ==
               kSixHours) {
        ++keep;
    }
    if (keep < cleaned.points.size()) {
        cleaned.points.resize(keep);
        ++report.storms_truncated;
    }

    if (!cleaned.points.empty()) {
        const int year = utc_year(cleaned.start());
        if (year < config.year_min || year > config.year_max) {
            ++report.storms_rejected_period;
            return std::nullopt;
        }
    }
    if (static_cast<int>(cleaned.points.size()) < config.min_points) {
        ++report.storms_rejected_short;
        return std::nullopt;
    }
    return cleaned;
}

BasinDataset load_basin_dir(const std::string& dir, Basin basin, const CleanConfig& config,
                            IngestReport& report) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw DataError("not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw DataError("no input files in " + dir);
    }
    std::sort(files.begin(), files.end());

    std::vector<BdeckRecord> records;
    for (const fs::path& path : files) {
        ++report.files;
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open " + path.string());
        }
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            ++report.lines_total;
            if (auto rec = parse_bdeck_line(line, path.string(), line_no)) {
                records.push_back(std::move(*rec));
                ++report.lines_parsed;
            } else {
                ++report.lines_skipped;
            }
        }
    }

    BasinDataset dataset;
    dataset.basin = basin;
    dataset.year_min = config.year_min;
    dataset.year_max = config.year_max;
    std::vector<Cyclone> assembled = assemble_cyclones(records);
    report.storms_assembled += static_cast<std::int64_t>(assembled.size());
    for (const Cyclone& storm : assembled) {
        if (auto cleaned = clean_cyclone(storm, config, report)) {
            dataset.cyclones.push_back(std::move(*cleaned));
            ++report.storms_accepted;
        }
    }
    std::sort(dataset.cyclones.begin(), dataset.cyclones.end(),
              [](const Cyclone& a, const Cyclone& b) {
                  if (a.start().secs != b.start().secs) return a.start().secs < b.start().secs;
                  return a.id < b.id;
              });
    return dataset;
}

DatasetSplit split_by_period(const BasinDataset& dataset, double fraction) {
    const std::size_t count = dataset.cyclones.size();
    if (count < 2) {
        throw DataError("split_by_period: need at least two storms, got " + std::to_string(count));
    }
    std::vector<Cyclone> ordered = dataset.cyclones;
    std::sort(ordered.begin(), ordered.end(), [](const Cyclone& a, const Cyclone& b) {
        if (a.start().secs != b.start().secs) return a.start().secs < b.start().secs;
        return a.id < b.id;
    });

    const auto n_train = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(count)));
    if (n_train == 0 || n_train >= count) {
        throw DataError("split_by_period: fraction " + format_double(fraction) +
                        " leaves an empty train or test set");
    }
    DatasetSplit split;
    split.train_fraction = fraction;
    split.train.assign(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(ordered.begin() + static_cast<std::ptrdiff_t>(n_train), ordered.end());
    return split;
}

void write_canonical_csv(const std::vector<Cyclone>& cyclones, std::ostream& out) {
    out << "cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt\n";
    for (const Cyclone& storm : cyclones) {
        for (const TrackPoint& p : storm.points) {
            out << storm.id << ',' << to_iso8601(p.timestamp) << ',' << format_double(p.lat)
                << ',' << format_double(p.lon) << ',' << p.wind << '\n';
        }
    }
}

std::vector<Cyclone> read_canonical_csv(std::istream& in, const std::string& file) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError(file, 1, "empty canonical CSV");
    }
    ++line_no;
    if (trim(line) != "cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt") {
        throw ParseError(file, 1, "unexpected canonical CSV header");
    }

    std::vector<Cyclone> out;
    std::map<std::string, bool> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) {
            continue;
        }
        const std::vector<std::string_view> fields = split_commas(body);
        if (fields.size() != 5) {
            throw ParseError(file, line_no, "expected 5 fields");
        }
        const std::string id(fields[0]);
        TrackPoint p;
        p.timestamp = parse_iso8601(fields[1], file, line_no);
        if (!parse_double(fields[2], p.lat) || !parse_double(fields[3], p.lon) ||
            !parse_int(fields[4], p.wind)) {
            throw ParseError(file, line_no, "bad numeric field");
        }
        if (out.empty() || out.back().id != id) {
            if (seen[id]) {
                throw ParseError(file, line_no, "rows for " + id + " are not contiguous");
            }
            seen[id] = true;
            Cyclone storm;
            storm.id = id;
            out.push_back(std::move(storm));
        }
        out.back().points.push_back(p);
    }
    return out;
}

std::string IngestReport::to_json() const {
    nlohmann::ordered_json j;
    j["files"] = files;
    j["lines_total"] = lines_total;
    j["lines_parsed"] = lines_parsed;
    j["lines_skipped"] = lines_skipped;
    j["storms_assembled"] = storms_assembled;
    j["storms_accepted"] = storms_accepted;
    j["storms_rejected_short"] = storms_rejected_short;
    j["storms_rejected_period"] = storms_rejected_period;
    j["storms_truncated"] = storms_truncated;
    j["points_dropped_offsynoptic"] = points_dropped_offsynoptic;
    return j.dump(2);
}

}  // namespace ridetect
