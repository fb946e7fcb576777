/// Writes the bundled b-deck fixture corpora under data/fixtures/. The
/// storms are synthetic but shaped like Southern-Hemisphere best tracks:
/// 6-hourly cadence, seasonal timing, poleward drift, planted RI bursts,
/// radius lines that duplicate timestamps, off-synoptic entries, and one
/// mid-track gap per handful of storms.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "ridetect/errors.hpp"
#include "ridetect/utctime.hpp"

namespace {

using ridetect::DataError;
using ridetect::kSixHours;
using ridetect::make_utc;
using ridetect::UtcTime;

constexpr std::array<const char*, 24> kNames = {
    "ANIKA",  "BARUGA", "CELESTE", "DARIAN", "EVONNE", "FINAU",  "GRETEL", "HAROLD",
    "IMOGEN", "JASPER", "KIRRILY", "LUCAS",  "MINGZHU", "NIRAN",  "OLWYN",  "PADDY",
    "QUENTIN", "RUBY",  "SEROJA",  "TIFFANY", "URIAH",  "VERNON", "WASI",   "YASA"};

struct StormPlan {
    int number = 1;
    int season = 2000;
    UtcTime start;
    std::string name;
    std::vector<int> winds;   ///< 6-hourly VMAX, knots
    std::vector<double> lats;
    std::vector<double> lons;  ///< degrees east, [0, 360)
    int gap_index = -1;        ///< omit this point when emitting, -1 for none
    bool off_synoptic = false;
    int bursts = 0;
};

int max_rise_over_24h(const std::vector<int>& winds) {
    int best = 0;
    for (std::size_t i = 0; i + 4 < winds.size(); ++i) {
        best = std::max(best, winds[i + 4] - winds[i]);
    }
    return best;
}

std::vector<int> make_winds(std::mt19937_64& rng, int length, int bursts) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pattern_pick(0, 2);
    const std::array<std::array<int, 4>, 3> patterns = {
        {{5, 10, 10, 10}, {10, 10, 5, 10}, {10, 15, 10, 5}}};

    const int decay_steps = length / 3;
    const int rise_steps = length - 1 - decay_steps;
    std::vector<int> rates(static_cast<std::size_t>(length - 1), 0);
    for (int t = 0; t < rise_steps; ++t) {
        rates[static_cast<std::size_t>(t)] = coin(rng) == 0 ? 0 : 5;
    }
    for (int t = rise_steps; t < length - 1; ++t) {
        const int r = pattern_pick(rng);
        rates[static_cast<std::size_t>(t)] = r == 0 ? 0 : (r == 1 ? -5 : -10);
    }

    int previous_end = 1;
    for (int b = 0; b < bursts; ++b) {
        const int last_start = rise_steps - 4 - (bursts - 1 - b) * 6;
        if (last_start < previous_end) {
            break;
        }
        std::uniform_int_distribution<int> place(previous_end, last_start);
        const int p = place(rng);
        const std::array<int, 4>& pattern = patterns[static_cast<std::size_t>(pattern_pick(rng))];
        for (int k = 0; k < 4; ++k) {
            rates[static_cast<std::size_t>(p + k)] = pattern[static_cast<std::size_t>(k)];
        }
        previous_end = p + 6;
    }

    std::uniform_int_distribution<int> base_pick(4, 7);
    std::vector<int> winds(static_cast<std::size_t>(length));
    winds[0] = base_pick(rng) * 5;
    for (int t = 1; t < length; ++t) {
        const int w = winds[static_cast<std::size_t>(t - 1)] + rates[static_cast<std::size_t>(t - 1)];
        winds[static_cast<std::size_t>(t)] = std::clamp(w, 20, 150);
    }
    return winds;
}

StormPlan make_storm(std::mt19937_64& rng, int number, int season, bool south_pacific,
                     bool want_ri, std::size_t name_index) {
    StormPlan storm;
    storm.number = number;
    storm.season = season;
    storm.name = kNames[name_index % kNames.size()];

    std::uniform_int_distribution<int> month_pick(0, 5);
    const std::array<int, 6> months = {11, 12, 1, 2, 3, 4};
    const int month = months[static_cast<std::size_t>(month_pick(rng))];
    const int year = month >= 11 ? season - 1 : season;
    std::uniform_int_distribution<int> day_pick(1, 28);
    std::uniform_int_distribution<int> hour_pick(0, 3);
    storm.start = make_utc(year, month, day_pick(rng), 6 * hour_pick(rng));

    std::uniform_int_distribution<int> length_pick(18, 40);
    const int length = length_pick(rng);
    storm.bursts = 0;
    if (want_ri) {
        std::uniform_int_distribution<int> burst_pick(1, 4);
        storm.bursts = burst_pick(rng) == 4 ? 2 : 1;
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        storm.winds = make_winds(rng, length, storm.bursts);
        const int rise = max_rise_over_24h(storm.winds);
        if (want_ri ? rise >= 30 : rise < 30) {
            break;
        }
        storm.winds.clear();
    }
    if (storm.winds.empty()) {
        throw DataError("storm synthesis failed for " + storm.name);
    }

    std::uniform_real_distribution<double> lat0_pick(-16.0, -8.0);
    std::uniform_real_distribution<double> dlat_pick(-0.5, -0.1);
    std::uniform_real_distribution<double> wobble(-0.1, 0.1);
    double lat = lat0_pick(rng);
    const double dlat = dlat_pick(rng);

    double lon = 0.0;
    double dlon = 0.0;
    if (south_pacific) {
        std::uniform_real_distribution<double> lon0_pick(150.0, 182.0);
        std::uniform_real_distribution<double> dlon_pick(-0.2, 0.8);
        lon = lon0_pick(rng);
        dlon = dlon_pick(rng);
    } else {
        std::uniform_real_distribution<double> lon0_pick(45.0, 110.0);
        std::uniform_real_distribution<double> dlon_pick(-0.6, 0.4);
        lon = lon0_pick(rng);
        dlon = dlon_pick(rng);
    }

    for (int t = 0; t < length; ++t) {
        storm.lats.push_back(std::clamp(lat, -40.0, -5.0));
        double wrapped = lon;
        while (wrapped < 0.0) wrapped += 360.0;
        while (wrapped >= 360.0) wrapped -= 360.0;
        storm.lons.push_back(wrapped);
        lat += dlat + wobble(rng);
        lon += dlon + wobble(rng);
    }
    return storm;
}

std::string lat_token(double lat) {
    const long tenths = std::lround(std::fabs(lat) * 10.0);
    return std::to_string(tenths) + (lat < 0.0 ? 'S' : 'N');
}

std::string lon_token(double lon) {
    if (lon <= 180.0) {
        return std::to_string(std::lround(lon * 10.0)) + 'E';
    }
    return std::to_string(std::lround((360.0 - lon) * 10.0)) + 'W';
}

std::string bdeck_timestamp(UtcTime t) {
    const ridetect::CivilTime c = ridetect::civil_from_utc(t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02d%02d", c.year, c.month, c.day, c.hour);
    return buf;
}

void emit_line(std::ostream& out, const StormPlan& storm, UtcTime t, double lat, double lon,
               int wind, int rad) {
    const int mslp = 1012 - (wind * 7) / 10;
    const char* type = wind >= 64 ? "TY" : (wind >= 34 ? "TS" : "TD");
    out << "SH, " << (storm.number < 10 ? "0" : "") << storm.number << ", "
        << bdeck_timestamp(t) << ",   , BEST,   0, " << lat_token(lat) << ", "
        << lon_token(lon) << ", " << wind << ", " << mslp << ", " << type << ",  " << rad
        << ", NEQ,   60,   60,   60,   60, 1010,  150,  20, " << wind + wind / 4
        << ",   0,   P,   0,    , 270,   8, " << storm.name << ", D\n";
}

void write_storm(const std::filesystem::path& dir, const StormPlan& storm,
                 std::mt19937_64& rng) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "bsh%02d%04d.dat", storm.number, storm.season);
    std::ofstream out(dir / buf, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + (dir / buf).string());
    }

    std::uniform_int_distribution<int> radius_coin(0, 2);
    for (std::size_t t = 0; t < storm.winds.size(); ++t) {
        if (static_cast<int>(t) == storm.gap_index) {
            continue;
        }
        const UtcTime when{storm.start.secs + static_cast<std::int64_t>(t) * kSixHours};
        const int wind = storm.winds[t];
        emit_line(out, storm, when, storm.lats[t], storm.lons[t], wind, wind >= 34 ? 34 : 0);
        if (wind >= 50 && radius_coin(rng) != 0) {
            emit_line(out, storm, when, storm.lats[t], storm.lons[t], wind, 50);
        }
        if (wind >= 64 && radius_coin(rng) != 0) {
            emit_line(out, storm, when, storm.lats[t], storm.lons[t], wind, 64);
        }
        if (storm.off_synoptic && t == 5) {
            const UtcTime odd{when.secs + 3 * ridetect::kSecondsPerHour};
            emit_line(out, storm, odd, storm.lats[t], storm.lons[t], wind, 0);
        }
    }
}

void write_basin(const std::filesystem::path& root, bool south_pacific, std::uint64_t seed) {
    const std::filesystem::path dir =
        root / (south_pacific ? "south_pacific" : "south_indian");
    std::filesystem::create_directories(dir);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> per_season(2, 3);
    std::uniform_int_distribution<int> ri_coin(0, 9);

    std::size_t name_index = south_pacific ? 0 : 7;
    int storms_written = 0;
    int ri_storms = 0;
    int quirk_step = 0;
    for (int season = 1999; season <= 2018; ++season) {
        const int count = per_season(rng);
        for (int number = 1; number <= count; ++number) {
            const bool want_ri = ri_coin(rng) < 3;
            StormPlan storm =
                make_storm(rng, number, season, south_pacific, want_ri, name_index++);
            ++quirk_step;
            if (quirk_step % 7 == 0) {
                storm.gap_index = static_cast<int>(storm.winds.size()) - 4;
            }
            if (quirk_step % 5 == 0) {
                storm.off_synoptic = true;
            }
            write_storm(dir, storm, rng);
            ++storms_written;
            ri_storms += storm.bursts > 0 ? 1 : 0;
        }
    }

    StormPlan ancient = make_storm(rng, 21, 1975, south_pacific, false, name_index++);
    write_storm(dir, ancient, rng);
    StormPlan stub = make_storm(rng, 22, 2010, south_pacific, false, name_index++);
    stub.winds.resize(3);
    stub.lats.resize(3);
    stub.lons.resize(3);
    write_storm(dir, stub, rng);

    std::cout << dir.string() << ": " << storms_written << " storms (" << ri_storms
              << " with RI bursts) plus 2 reject cases\n";
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path root = argc > 1 ? argv[1] : "data/fixtures";
    try {
        write_basin(root, true, 0x53500001ULL);
        write_basin(root, false, 0x53490002ULL);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
