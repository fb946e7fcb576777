#include "ridetect/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ridetect/errors.hpp"
#include "ridetect/numfmt.hpp"
#include "ridetect/utctime.hpp"

namespace ridetect {
namespace {

constexpr int kGenSteps = 4;

bool cyclone_has_ri(const Cyclone& c, const WindowingConfig& wcfg) {
    if (c.points.size() < static_cast<std::size_t>(WindowingConfig::kRiSpan + 1)) {
        return false;
    }
    std::vector<double> winds;
    winds.reserve(c.points.size());
    for (const TrackPoint& p : c.points) {
        winds.push_back(static_cast<double>(p.wind));
    }
    WindowingConfig whole = wcfg;
    whole.label_rule = LabelRule::AnySpan;
    return label_window(winds, whole) == Label::RI;
}

void sort_samples(std::vector<GeneratorSample>& samples) {
    std::sort(samples.begin(), samples.end(),
              [](const GeneratorSample& a, const GeneratorSample& b) {
                  if (a.cyclone_id != b.cyclone_id) return a.cyclone_id < b.cyclone_id;
                  return a.offset < b.offset;
              });
}

double wrap_longitude(double lon) {
    double x = std::fmod(lon, 360.0);
    if (x < 0.0) x += 360.0;
    return x;
}

}  // namespace

NetworkSpec default_generator_spec() {
    NetworkSpec spec;
    spec.input_size = kFeatureCount;
    spec.hidden_size = 50;
    spec.output_size = kGenSteps * kFeatureCount;
    spec.hidden_activation = Activation::Tanh;
    spec.output_activation = OutputActivation::Linear;
    spec.loss = LossKind::MSE;
    spec.epochs = 100;
    return spec;
}

AugmentationConfig::AugmentationConfig() : generator(default_generator_spec()) {}

GeneratorDataset build_generator_dataset(const DatasetSplit& split, const WindowingConfig& wcfg,
                                         const FeatureScaler& scaler) {
    GeneratorDataset data;
    bool any_ri_cyclone = false;
    for (const Cyclone& c : split.train) {
        const int len = static_cast<int>(c.points.size());
        const bool is_ri = cyclone_has_ri(c, wcfg);
        any_ri_cyclone = any_ri_cyclone || is_ri;
        for (int offset = 0; offset + 2 * kGenSteps <= len; ++offset) {
            GeneratorSample s;
            s.cyclone_id = c.id;
            s.offset = offset;
            s.input = Mat(kGenSteps, kFeatureCount);
            s.target.resize(static_cast<std::size_t>(kGenSteps * kFeatureCount));
            for (int t = 0; t < kGenSteps; ++t) {
                const TrackPoint& past = c.points[static_cast<std::size_t>(offset + t)];
                const TrackPoint& future =
                    c.points[static_cast<std::size_t>(offset + kGenSteps + t)];
                s.input(t, kFeatLat) = scaler.scale(kFeatLat, past.lat);
                s.input(t, kFeatLon) = scaler.scale(kFeatLon, past.lon);
                s.input(t, kFeatWind) = scaler.scale(kFeatWind, static_cast<double>(past.wind));
                const std::size_t base = static_cast<std::size_t>(t * kFeatureCount);
                s.target[base + kFeatLat] = scaler.scale(kFeatLat, future.lat);
                s.target[base + kFeatLon] = scaler.scale(kFeatLon, future.lon);
                s.target[base + kFeatWind] =
                    scaler.scale(kFeatWind, static_cast<double>(future.wind));
            }
            data.train.push_back(s);
            if (is_ri) {
                data.holdout.push_back(std::move(s));
            }
        }
    }
    if (!any_ri_cyclone) {
        throw DataError("build_generator_dataset: no RI cyclone in the train split");
    }
    sort_samples(data.train);
    sort_samples(data.holdout);
    return data;
}

TrainedGenerator train_generator(const AugmentationConfig& config, const GeneratorDataset& data,
                                 std::uint64_t seed) {
    if (data.train.empty()) {
        throw DataError("train_generator: empty sample set");
    }
    std::vector<GeneratorSample> ordered = data.train;
    sort_samples(ordered);

    std::vector<TrainSample> samples;
    samples.reserve(ordered.size());
    for (const GeneratorSample& g : ordered) {
        TrainSample s;
        s.x = g.input;
        s.target = g.target;
        samples.push_back(std::move(s));
    }

    TrainedGenerator out;
    const TrainResult result = train(config.generator, samples, seed);
    out.params = result.params;

    std::vector<GeneratorSample> held = data.holdout;
    sort_samples(held);

    GeneratorReport& report = out.report;
    report.holdout_count = static_cast<int>(held.size());
    if (!held.empty()) {
        std::array<double, kFeatureCount> sq_sum{};
        double total = 0.0;
        for (const GeneratorSample& g : held) {
            const Vec pred = network_forward(out.params, g.input);
            for (int t = 0; t < kGenSteps; ++t) {
                for (int f = 0; f < kFeatureCount; ++f) {
                    const std::size_t k = static_cast<std::size_t>(t * kFeatureCount + f);
                    const double d = pred[k] - g.target[k];
                    sq_sum[static_cast<std::size_t>(f)] += d * d;
                    total += d * d;
                }
            }
        }
        const double per_feature_n = static_cast<double>(held.size() * kGenSteps);
        for (int f = 0; f < kFeatureCount; ++f) {
            report.mse_per_feature[static_cast<std::size_t>(f)] =
                sq_sum[static_cast<std::size_t>(f)] / per_feature_n;
        }
        report.mse = total / (per_feature_n * kFeatureCount);
    }
    return out;
}

Mat predict_continuation(const NetworkParams& generator, const Mat& source_raw,
                         const FeatureScaler& scaler) {
    if (source_raw.rows < kGenSteps || source_raw.cols != kFeatureCount) {
        throw DataError("predict_continuation: source window too small");
    }
    Mat input(kGenSteps, kFeatureCount);
    for (int t = 0; t < kGenSteps; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            input(t, f) = scaler.scale(f, source_raw(t, f));
        }
    }
    const Vec flat = network_forward(generator, input);
    Mat pred(kGenSteps, kFeatureCount);
    for (int t = 0; t < kGenSteps; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            pred(t, f) = flat[static_cast<std::size_t>(t * kFeatureCount + f)];
        }
    }
    return pred;
}

SyntheticSequence make_synthetic(const LabeledWindow& source_raw, const Mat& prediction_scaled,
                                 const FeatureScaler& scaler, const WindowingConfig& wcfg,
                                 int replicate) {
    if (source_raw.features.rows < kGenSteps) {
        throw DataError("make_synthetic: source window too small");
    }
    SyntheticSequence seq;
    seq.source_cyclone_id = source_raw.cyclone_id;
    seq.source_start = source_raw.start_index;
    seq.id = source_raw.cyclone_id + "#" + std::to_string(source_raw.start_index) + "-syn" +
             std::to_string(replicate);
    seq.rows = Mat(2 * kGenSteps, kFeatureCount);
    for (int t = 0; t < kGenSteps; ++t) {
        for (int f = 0; f < kFeatureCount; ++f) {
            seq.rows(t, f) = source_raw.features(t, f);
        }
    }
    for (int t = 0; t < kGenSteps; ++t) {
        const double lat = scaler.invert(kFeatLat, prediction_scaled(t, kFeatLat));
        const double lon = scaler.invert(kFeatLon, prediction_scaled(t, kFeatLon));
        const double wind = scaler.invert(kFeatWind, prediction_scaled(t, kFeatWind));
        seq.rows(kGenSteps + t, kFeatLat) = std::clamp(lat, -90.0, 90.0);
        seq.rows(kGenSteps + t, kFeatLon) = wrap_longitude(lon);
        seq.rows(kGenSteps + t, kFeatWind) = std::max(0.0, wind);
    }

    std::vector<double> winds(2 * kGenSteps);
    for (int t = 0; t < 2 * kGenSteps; ++t) {
        winds[static_cast<std::size_t>(t)] = seq.rows(t, kFeatWind);
    }
    WindowingConfig relabel = wcfg;
    relabel.label_rule = LabelRule::AnySpan;
    seq.label = label_window(winds, relabel);
    return seq;
}

std::vector<SyntheticSequence> synthesize(const NetworkParams& generator,
                                          std::span<const LabeledWindow> ri_sources_raw,
                                          const FeatureScaler& scaler,
                                          const AugmentationConfig& config,
                                          const WindowingConfig& wcfg,
                                          SynthesisReport* report) {
    std::vector<const LabeledWindow*> sources;
    sources.reserve(ri_sources_raw.size());
    for (const LabeledWindow& w : ri_sources_raw) {
        sources.push_back(&w);
    }
    std::sort(sources.begin(), sources.end(), [](const LabeledWindow* a, const LabeledWindow* b) {
        if (a->cyclone_id != b->cyclone_id) return a->cyclone_id < b->cyclone_id;
        return a->start_index < b->start_index;
    });

    SynthesisReport local;
    std::vector<SyntheticSequence> out;
    for (const LabeledWindow* source : sources) {
        const Mat prediction = predict_continuation(generator, source->features, scaler);
        for (int rep = 0; rep < config.multiplier; ++rep) {
            SyntheticSequence seq = make_synthetic(*source, prediction, scaler, wcfg, rep);
            ++local.generated;
            if (config.relabel == RelabelPolicy::KeepOnlyRI && seq.label != Label::RI) {
                ++local.discarded;
                continue;
            }
            ++local.kept;
            out.push_back(std::move(seq));
        }
    }
    if (report != nullptr) {
        *report = local;
    }
    return out;
}

AssimilationResult assimilate(std::span<const LabeledWindow> train_windows,
                              std::span<const SyntheticSequence> synthetics,
                              const WindowingConfig& wcfg) {
    validate(wcfg);
    AssimilationResult result;
    result.augmented.assign(train_windows.begin(), train_windows.end());
    result.before = class_stats(train_windows);

    for (const SyntheticSequence& seq : synthetics) {
        const int len = seq.rows.rows;
        std::vector<double> winds(static_cast<std::size_t>(wcfg.n));
        for (int start = 0; start + wcfg.n <= len; ++start) {
            LabeledWindow w;
            w.cyclone_id = seq.id;
            w.start_index = start;
            w.synthetic = true;
            w.features = Mat(wcfg.n, kFeatureCount);
            for (int t = 0; t < wcfg.n; ++t) {
                for (int f = 0; f < kFeatureCount; ++f) {
                    w.features(t, f) = seq.rows(start + t, f);
                }
                winds[static_cast<std::size_t>(t)] = w.features(t, kFeatWind);
            }
            w.label = label_window(winds, wcfg);
            result.augmented.push_back(std::move(w));
        }
    }
    result.after = class_stats(result.augmented);
    return result;
}

void write_synthetics_csv(std::span<const SyntheticSequence> synthetics, std::ostream& out) {
    out << "cyclone_id,timestamp_iso8601,lat_deg,lon_deg_east,wind_kt,provenance\n";
    const UtcTime base = make_utc(2000, 1, 1, 0);
    for (const SyntheticSequence& seq : synthetics) {
        for (int t = 0; t < seq.rows.rows; ++t) {
            const UtcTime stamp{base.secs + static_cast<std::int64_t>(t) * kSixHours};
            out << seq.id << ',' << to_iso8601(stamp) << ','
                << format_double(seq.rows(t, kFeatLat)) << ','
                << format_double(seq.rows(t, kFeatLon)) << ','
                << format_double(seq.rows(t, kFeatWind)) << ','
                << (t < kGenSteps ? "source" : "generated") << '\n';
        }
    }
}

}  // namespace ridetect
