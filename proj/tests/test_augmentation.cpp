#include "ridetect/augmentation.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ridetect/errors.hpp"

using namespace ridetect;

namespace {

Cyclone make_cyclone(const std::string& id, const std::vector<int>& winds, double lat0 = -12.0,
                     double lon0 = 160.0) {
    Cyclone c;
    c.id = id;
    for (std::size_t i = 0; i < winds.size(); ++i) {
        TrackPoint p;
        p.timestamp = UtcTime{make_utc(2001, 2, 1, 0).secs +
                              static_cast<std::int64_t>(i) * kSixHours};
        p.lat = lat0 - 0.2 * static_cast<double>(i);
        p.lon = lon0 + 0.4 * static_cast<double>(i);
        p.wind = winds[i];
        c.points.push_back(p);
    }
    return c;
}

FeatureScaler wide_scaler() {
    FeatureScaler s;
    s.lo = {-20.0, 150.0, 0.0};
    s.hi = {0.0, 200.0, 100.0};
    return s;
}

LabeledWindow window_with_winds(const std::string& id, const std::vector<double>& winds,
                                double lat0 = -12.0, double lon0 = 160.0) {
    LabeledWindow w;
    w.cyclone_id = id;
    w.features = Mat(static_cast<int>(winds.size()), kFeatureCount);
    for (int t = 0; t < w.features.rows; ++t) {
        w.features(t, kFeatLat) = lat0 - 0.2 * t;
        w.features(t, kFeatLon) = lon0 + 0.4 * t;
        w.features(t, kFeatWind) = winds[static_cast<std::size_t>(t)];
    }
    WindowingConfig wcfg;
    wcfg.n = w.features.rows;
    w.label = label_window(winds, wcfg);
    return w;
}

/// All-zero network whose dense bias fixes the output, so the generator
/// predicts the same constant continuation for every source.
NetworkParams constant_generator(const Vec& output) {
    NetworkSpec spec = default_generator_spec();
    NetworkParams params = init_params(spec, 7);
    for (auto& [name, tensor] : tensor_list(params)) {
        std::fill(tensor->begin(), tensor->end(), 0.0);
    }
    params.dense.b = output;
    return params;
}

DatasetSplit toy_split() {
    DatasetSplit split;
    split.train.push_back(
        make_cyclone("SH01-2001", {25, 30, 35, 40, 60, 75, 85, 90, 95, 100}));
    split.train.push_back(make_cyclone("SH02-2001", {30, 32, 34, 33, 35, 36, 38, 37}));
    split.train.push_back(make_cyclone("SH03-2001", {30, 31, 32, 33, 34, 35, 36}));
    split.test.push_back(make_cyclone("SH04-2001", {20, 30, 45, 55, 70, 80}));
    return split;
}

}  // namespace

TEST_CASE("default augmentation config matches the generator description") {
    const AugmentationConfig config;
    CHECK(config.multiplier == 1);
    CHECK(config.relabel == RelabelPolicy::KeepOnlyRI);
    CHECK(config.generator.input_size == 3);
    CHECK(config.generator.hidden_size == 50);
    CHECK(config.generator.output_size == 12);
    CHECK(config.generator.hidden_activation == Activation::Tanh);
    CHECK(config.generator.output_activation == OutputActivation::Linear);
    CHECK(config.generator.loss == LossKind::MSE);
    CHECK(config.generator.epochs == 100);
}

TEST_CASE("generator samples follow the L - 7 sliding count") {
    const DatasetSplit split = toy_split();
    const WindowingConfig wcfg;
    const GeneratorDataset data = build_generator_dataset(split, wcfg, wide_scaler());

    int c1 = 0;
    int c2 = 0;
    int c3 = 0;
    std::set<int> offsets1;
    for (const GeneratorSample& s : data.train) {
        if (s.cyclone_id == "SH01-2001") {
            ++c1;
            offsets1.insert(s.offset);
        } else if (s.cyclone_id == "SH02-2001") {
            ++c2;
        } else if (s.cyclone_id == "SH03-2001") {
            ++c3;
        }
    }
    CHECK(c1 == 3);
    CHECK(offsets1 == std::set<int>{0, 1, 2});
    CHECK(c2 == 1);
    CHECK(c3 == 0);
    CHECK(data.train.size() == 4);
}

TEST_CASE("sample segments are consecutive scaled track slices") {
    const DatasetSplit split = toy_split();
    const FeatureScaler scaler = wide_scaler();
    const GeneratorDataset data = build_generator_dataset(split, WindowingConfig{}, scaler);

    const Cyclone& c = split.train[0];
    for (const GeneratorSample& s : data.train) {
        if (s.cyclone_id != c.id) continue;
        REQUIRE(s.input.rows == 4);
        REQUIRE(s.target.size() == 12);
        for (int t = 0; t < 4; ++t) {
            const TrackPoint& past = c.points[static_cast<std::size_t>(s.offset + t)];
            const TrackPoint& future = c.points[static_cast<std::size_t>(s.offset + 4 + t)];
            CHECK(s.input(t, kFeatLat) == scaler.scale(kFeatLat, past.lat));
            CHECK(s.input(t, kFeatLon) == scaler.scale(kFeatLon, past.lon));
            CHECK(s.input(t, kFeatWind) == scaler.scale(kFeatWind, past.wind));
            const std::size_t base = static_cast<std::size_t>(t) * 3;
            CHECK(s.target[base + kFeatLat] == scaler.scale(kFeatLat, future.lat));
            CHECK(s.target[base + kFeatLon] == scaler.scale(kFeatLon, future.lon));
            CHECK(s.target[base + kFeatWind] == scaler.scale(kFeatWind, future.wind));
        }
    }
}

TEST_CASE("holdout draws from RI cyclones only and stays inside the train samples") {
    const DatasetSplit split = toy_split();
    const GeneratorDataset data = build_generator_dataset(split, WindowingConfig{}, wide_scaler());

    REQUIRE(!data.holdout.empty());
    for (const GeneratorSample& h : data.holdout) {
        CHECK(h.cyclone_id == "SH01-2001");
        const bool in_train =
            std::any_of(data.train.begin(), data.train.end(), [&](const GeneratorSample& s) {
                return s.cyclone_id == h.cyclone_id && s.offset == h.offset &&
                       s.input == h.input && s.target == h.target;
            });
        CHECK(in_train);
    }
    CHECK(data.holdout.size() == 3);
}

TEST_CASE("a split without RI cyclones cannot feed the generator") {
    DatasetSplit split;
    split.train.push_back(make_cyclone("SH02-2001", {30, 32, 34, 33, 35, 36, 38, 37}));
    CHECK_THROWS_AS(build_generator_dataset(split, WindowingConfig{}, wide_scaler()), DataError);
}

TEST_CASE("overfit generator memorizes the corpus and beats the untrained one") {
    DatasetSplit split;
    split.train.push_back(
        make_cyclone("SH01-2002", {20, 25, 32, 45, 60, 72, 80, 85, 88, 90, 92, 93}));
    split.train.push_back(
        make_cyclone("SH02-2002", {35, 38, 36, 40, 42, 41, 44, 46, 45, 48, 47, 50}, -8.0, 175.0));
    const FeatureScaler scaler = wide_scaler();
    const GeneratorDataset data = build_generator_dataset(split, WindowingConfig{}, scaler);
    REQUIRE(data.train.size() == 10);
    REQUIRE(data.holdout.size() == 5);

    AugmentationConfig config;
    config.generator.hidden_size = 32;
    config.generator.epochs = 400;
    config.generator.learning_rate = 0.005;
    const TrainedGenerator trained = train_generator(config, data, 11);
    CHECK(trained.report.holdout_count == 5);
    CHECK(trained.report.mse < 0.01);
    for (double per_feature : trained.report.mse_per_feature) {
        CHECK(per_feature < 0.03);
    }

    AugmentationConfig untrained = config;
    untrained.generator.epochs = 0;
    const TrainedGenerator baseline = train_generator(untrained, data, 11);
    CHECK(baseline.report.mse > trained.report.mse);

    SUBCASE("synthetic average winds overlap the real RI histogram") {
        WindowingConfig wcfg;
        std::vector<LabeledWindow> ri_windows;
        for (const LabeledWindow& w : build_all_windows(split.train, wcfg)) {
            if (w.label == Label::RI) ri_windows.push_back(w);
        }
        REQUIRE(!ri_windows.empty());
        const std::vector<SyntheticSequence> synthetics =
            synthesize(trained.params, ri_windows, scaler, config, wcfg);
        REQUIRE(!synthetics.empty());

        const auto mean_wind = [](const Mat& rows) {
            double sum = 0.0;
            for (int t = 0; t < rows.rows; ++t) sum += rows(t, kFeatWind);
            return sum / rows.rows;
        };
        std::vector<double> real_means;
        std::vector<double> synth_means;
        for (const LabeledWindow& w : ri_windows) real_means.push_back(mean_wind(w.features));
        for (const SyntheticSequence& s : synthetics) synth_means.push_back(mean_wind(s.rows));

        const auto [lo_r, hi_r] = std::minmax_element(real_means.begin(), real_means.end());
        const auto [lo_s, hi_s] = std::minmax_element(synth_means.begin(), synth_means.end());
        const double lo = std::min(*lo_r, *lo_s);
        const double hi = std::max(*hi_r, *hi_s) + 1e-9;
        constexpr int kBins = 8;
        std::vector<int> real_bins(kBins, 0);
        std::vector<int> synth_bins(kBins, 0);
        const auto bin_of = [&](double v) {
            return std::min(kBins - 1, static_cast<int>((v - lo) / (hi - lo) * kBins));
        };
        for (double v : real_means) ++real_bins[static_cast<std::size_t>(bin_of(v))];
        for (double v : synth_means) ++synth_bins[static_cast<std::size_t>(bin_of(v))];
        bool overlap = false;
        for (int b = 0; b < kBins; ++b) {
            overlap = overlap || (real_bins[static_cast<std::size_t>(b)] > 0 &&
                                  synth_bins[static_cast<std::size_t>(b)] > 0);
        }
        CHECK(overlap);
    }
}

TEST_CASE("shuffling the sample order cannot change the trained generator") {
    DatasetSplit split = toy_split();
    split.train.push_back(make_cyclone("SH05-2001", {22, 28, 36, 40, 58, 66, 70, 72, 74, 73},
                                       -15.0, 188.0));
    const GeneratorDataset data =
        build_generator_dataset(split, WindowingConfig{}, wide_scaler());

    GeneratorDataset shuffled = data;
    std::mt19937 rng(99);
    std::shuffle(shuffled.train.begin(), shuffled.train.end(), rng);
    std::shuffle(shuffled.holdout.begin(), shuffled.holdout.end(), rng);

    AugmentationConfig config;
    config.generator.hidden_size = 12;
    config.generator.epochs = 8;
    const TrainedGenerator a = train_generator(config, data, 5);
    const TrainedGenerator b = train_generator(config, shuffled, 5);
    CHECK(a.params.lstm.wi == b.params.lstm.wi);
    CHECK(a.params.lstm.uo == b.params.lstm.uo);
    CHECK(a.params.dense.w == b.params.dense.w);
    CHECK(a.params.dense.b == b.params.dense.b);
    CHECK(a.report.mse == b.report.mse);
}

TEST_CASE("a prediction equal to the true continuation reproduces the real eight points") {
    const Cyclone c = make_cyclone("SH01-2003", {25, 32, 44, 52, 64, 78, 86, 92});
    const FeatureScaler scaler = wide_scaler();

    LabeledWindow source;
    source.cyclone_id = c.id;
    source.start_index = 0;
    source.features = Mat(8, kFeatureCount);
    for (int t = 0; t < 8; ++t) {
        source.features(t, kFeatLat) = c.points[static_cast<std::size_t>(t)].lat;
        source.features(t, kFeatLon) = c.points[static_cast<std::size_t>(t)].lon;
        source.features(t, kFeatWind) = c.points[static_cast<std::size_t>(t)].wind;
    }
    Mat prediction(4, kFeatureCount);
    for (int t = 0; t < 4; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            prediction(t, f) = scaler.scale(f, source.features(4 + t, f));
        }
    }

    const SyntheticSequence seq =
        make_synthetic(source, prediction, scaler, WindowingConfig{}, 0);
    CHECK(seq.id == "SH01-2003#0-syn0");
    CHECK(seq.source_cyclone_id == "SH01-2003");
    for (int t = 0; t < 4; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            CHECK(seq.rows(t, f) == source.features(t, f));
        }
    }
    for (int t = 4; t < 8; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            CHECK(seq.rows(t, f) == doctest::Approx(source.features(t, f)).epsilon(1e-12));
        }
    }
    CHECK(seq.label == Label::RI);
}

TEST_CASE("generated rows are clamped and wrapped into physical ranges") {
    const FeatureScaler scaler = wide_scaler();
    const LabeledWindow source = window_with_winds("SH09-2001", {20, 25, 30, 35, 40, 45});

    Mat prediction(4, kFeatureCount);
    prediction.fill(0.5);
    prediction(0, kFeatLat) = 20.0;
    prediction(1, kFeatLat) = -20.0;
    prediction(0, kFeatLon) = 5.0;
    prediction(1, kFeatLon) = -4.0;
    prediction(0, kFeatWind) = -3.0;

    const SyntheticSequence seq =
        make_synthetic(source, prediction, scaler, WindowingConfig{}, 0);
    CHECK(seq.rows(4, kFeatLat) == 90.0);
    CHECK(seq.rows(5, kFeatLat) == -90.0);
    CHECK(seq.rows(4, kFeatLon) == doctest::Approx(40.0));
    CHECK(seq.rows(5, kFeatLon) == doctest::Approx(310.0));
    CHECK(seq.rows(4, kFeatWind) == 0.0);
    for (int t = 0; t < 8; ++t) {
        CHECK(seq.rows(t, kFeatWind) >= 0.0);
        CHECK(seq.rows(t, kFeatLat) >= -90.0);
        CHECK(seq.rows(t, kFeatLat) <= 90.0);
        CHECK(seq.rows(t, kFeatLon) >= 0.0);
        CHECK(seq.rows(t, kFeatLon) < 360.0);
    }
}

TEST_CASE("a constant-wind generator keeps only sources that already rise") {
    const FeatureScaler scaler = wide_scaler();
    Vec bias(12, 0.5);
    bias[0 * 3 + kFeatWind] = scaler.scale(kFeatWind, 60.0);
    bias[1 * 3 + kFeatWind] = scaler.scale(kFeatWind, 60.0);
    bias[2 * 3 + kFeatWind] = scaler.scale(kFeatWind, 60.0);
    bias[3 * 3 + kFeatWind] = scaler.scale(kFeatWind, 60.0);
    const NetworkParams generator = constant_generator(bias);

    const std::vector<LabeledWindow> sources = {
        window_with_winds("SH01-2001", {20, 30, 40, 55, 85, 90}),
        window_with_winds("SH02-2001", {50, 52, 54, 56, 88, 90}),
    };
    REQUIRE(sources[0].label == Label::RI);
    REQUIRE(sources[1].label == Label::RI);

    SynthesisReport report;
    const AugmentationConfig config;
    const std::vector<SyntheticSequence> kept =
        synthesize(generator, sources, scaler, config, WindowingConfig{}, &report);
    CHECK(report.generated == 2);
    CHECK(report.kept == 1);
    CHECK(report.discarded == 1);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].source_cyclone_id == "SH01-2001");
    CHECK(kept[0].rows(7, kFeatWind) == doctest::Approx(60.0));

    SUBCASE("TrustConstruction keeps everything but still derives labels") {
        AugmentationConfig trust = config;
        trust.relabel = RelabelPolicy::TrustConstruction;
        SynthesisReport trust_report;
        const std::vector<SyntheticSequence> all =
            synthesize(generator, sources, scaler, trust, WindowingConfig{}, &trust_report);
        CHECK(trust_report.generated == 2);
        CHECK(trust_report.kept == 2);
        CHECK(trust_report.discarded == 0);
        REQUIRE(all.size() == 2);
        CHECK(all[0].label == Label::RI);
        CHECK(all[1].label == Label::NonRI);
    }

    SUBCASE("multiplier replicates each source with distinct ids") {
        AugmentationConfig tripled = config;
        tripled.multiplier = 3;
        SynthesisReport triple_report;
        const std::vector<SyntheticSequence> synths =
            synthesize(generator, sources, scaler, tripled, WindowingConfig{}, &triple_report);
        CHECK(triple_report.generated == 6);
        CHECK(triple_report.kept == 3);
        REQUIRE(synths.size() == 3);
        CHECK(synths[0].id == "SH01-2001#0-syn0");
        CHECK(synths[1].id == "SH01-2001#0-syn1");
        CHECK(synths[2].id == "SH01-2001#0-syn2");
        CHECK(synths[0].rows == synths[1].rows);
        CHECK(synths[1].rows == synths[2].rows);
    }
}

TEST_CASE("synthesis sources never come from the test split") {
    const DatasetSplit split = toy_split();
    const WindowingConfig wcfg;
    std::vector<LabeledWindow> ri_sources;
    for (const LabeledWindow& w : build_all_windows(split.train, wcfg)) {
        if (w.label == Label::RI) ri_sources.push_back(w);
    }
    REQUIRE(!ri_sources.empty());

    const FeatureScaler scaler = wide_scaler();
    Vec bias(12, 0.5);
    const NetworkParams generator = constant_generator(bias);
    AugmentationConfig config;
    config.relabel = RelabelPolicy::TrustConstruction;
    const std::vector<SyntheticSequence> synths =
        synthesize(generator, ri_sources, scaler, config, wcfg);

    std::set<std::string> train_ids;
    for (const Cyclone& c : split.train) train_ids.insert(c.id);
    std::set<std::string> test_ids;
    for (const Cyclone& c : split.test) test_ids.insert(c.id);
    REQUIRE(!synths.empty());
    for (const SyntheticSequence& s : synths) {
        CHECK(train_ids.count(s.source_cyclone_id) == 1);
        CHECK(test_ids.count(s.source_cyclone_id) == 0);
    }
}

TEST_CASE("assimilation windows each synthetic with the classifier n at stride 1") {
    WindowingConfig wcfg;
    const std::vector<LabeledWindow> train = {
        window_with_winds("SH01-2001", {20, 22, 24, 26, 28, 30}),
        window_with_winds("SH02-2001", {20, 30, 42, 50, 55, 58}),
    };
    REQUIRE(train[0].label == Label::NonRI);
    REQUIRE(train[1].label == Label::RI);

    SyntheticSequence seq;
    seq.id = "SH02-2001#0-syn0";
    seq.source_cyclone_id = "SH02-2001";
    seq.rows = Mat(8, kFeatureCount);
    const double winds[8] = {20, 25, 28, 30, 52, 55, 57, 58};
    for (int t = 0; t < 8; ++t) {
        seq.rows(t, kFeatLat) = -10.0;
        seq.rows(t, kFeatLon) = 170.0;
        seq.rows(t, kFeatWind) = winds[t];
    }
    seq.label = Label::RI;

    const AssimilationResult result = assimilate(train, {&seq, 1}, wcfg);
    CHECK(result.before.total == 2);
    CHECK(result.before.ri == 1);
    REQUIRE(result.augmented.size() == 5);
    CHECK(result.after.total == 5);
    CHECK(result.after.ri == 3);
    CHECK(result.after.minority_pct > result.before.minority_pct);

    const LabeledWindow& w0 = result.augmented[2];
    const LabeledWindow& w1 = result.augmented[3];
    const LabeledWindow& w2 = result.augmented[4];
    CHECK(w0.cyclone_id == seq.id);
    CHECK(w0.start_index == 0);
    CHECK(w0.synthetic);
    CHECK(w0.label == Label::RI);
    CHECK(w1.start_index == 1);
    CHECK(w1.label == Label::RI);
    CHECK(w2.start_index == 2);
    CHECK(w2.label == Label::NonRI);
    CHECK(w2.features(0, kFeatWind) == 28.0);
    CHECK(w2.features(5, kFeatWind) == 58.0);

    SUBCASE("no synthetics leaves the train set unchanged") {
        const AssimilationResult empty = assimilate(train, {}, wcfg);
        CHECK(empty.augmented.size() == train.size());
        CHECK(empty.before.total == empty.after.total);
        CHECK(empty.before.ri == empty.after.ri);
        CHECK(empty.augmented[0].cyclone_id == train[0].cyclone_id);
        CHECK(empty.augmented[0].features == train[0].features);
    }
}

TEST_CASE("synthetic CSV marks source and generated rows") {
    SyntheticSequence seq;
    seq.id = "SH01-2001#2-syn0";
    seq.source_cyclone_id = "SH01-2001";
    seq.rows = Mat(8, kFeatureCount);
    for (int t = 0; t < 8; ++t) {
        seq.rows(t, kFeatLat) = -11.5;
        seq.rows(t, kFeatLon) = 181.25;
        seq.rows(t, kFeatWind) = 40.0 + 5.0 * t;
    }

    std::ostringstream out;
    write_synthetics_csv({&seq, 1}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt,provenance");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == "SH01-2001#2-syn0,2000-01-01T00:00:00Z,-11.5,181.25,40,source");
    CHECK(rows[3].find(",source") != std::string::npos);
    CHECK(rows[4].find(",generated") != std::string::npos);
    CHECK(rows[7] == "SH01-2001#2-syn0,2000-01-02T18:00:00Z,-11.5,181.25,75,generated");
}
