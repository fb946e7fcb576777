#include "ridetect/strategies.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <iostream>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

#include "ridetect/errors.hpp"
#include "ridetect/numfmt.hpp"
#include "ridetect/rng.hpp"

namespace ridetect {
namespace {

constexpr std::uint64_t kGeneratorSalt = 0xDA7AULL;

void sort_canonical(std::vector<LabeledWindow>& windows) {
    std::sort(windows.begin(), windows.end(), [](const LabeledWindow& a, const LabeledWindow& b) {
        if (a.cyclone_id != b.cyclone_id) return a.cyclone_id < b.cyclone_id;
        return a.start_index < b.start_index;
    });
}

Mat project(const LabeledWindow& window, std::span<const int> features) {
    Mat x(window.features.rows, static_cast<int>(features.size()));
    for (int t = 0; t < window.features.rows; ++t) {
        for (std::size_t j = 0; j < features.size(); ++j) {
            x(t, static_cast<int>(j)) = window.features(t, features[j]);
        }
    }
    return x;
}

NetworkSpec member_network_spec(const StrategySpec& spec, int input_size) {
    NetworkSpec ns = spec.network;
    ns.input_size = input_size;
    ns.output_size = 2;
    ns.output_activation = OutputActivation::Softmax;
    ns.loss = LossKind::CrossEntropy;
    return ns;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::U: return "U-LSTM";
        case StrategyKind::M: return "M-LSTM";
        case StrategyKind::E: return "E-LSTM";
        case StrategyKind::HE: return "HE-LSTM";
        case StrategyKind::DA_M: return "DA-M-LSTM";
    }
    return "?";
}

StrategyKind strategy_from_name(std::string_view name) {
    std::string upper(name);
    for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (upper == "U" || upper == "U-LSTM") return StrategyKind::U;
    if (upper == "M" || upper == "M-LSTM") return StrategyKind::M;
    if (upper == "E" || upper == "E-LSTM") return StrategyKind::E;
    if (upper == "HE" || upper == "HE-LSTM") return StrategyKind::HE;
    if (upper == "DA-M" || upper == "DA_M" || upper == "DA-M-LSTM") return StrategyKind::DA_M;
    throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::vector<std::vector<int>> member_features(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::U: return {{kFeatWind}};
        case StrategyKind::M:
        case StrategyKind::DA_M: return {{kFeatLat, kFeatLon, kFeatWind}};
        case StrategyKind::E: return {{kFeatWind}, {kFeatLat}, {kFeatLon}};
        case StrategyKind::HE: return {{kFeatWind}, {kFeatLat, kFeatLon}};
    }
    return {};
}

std::vector<std::uint64_t> StrategySpec::default_seeds(int count) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
    return seeds;
}

AugmentationArtifacts run_augmentation(const StrategySpec& spec, const DatasetSplit& split,
                                       std::uint64_t seed) {
    validate(spec.window);
    std::vector<LabeledWindow> raw = build_all_windows(split.train, spec.window);
    sort_canonical(raw);

    AugmentationArtifacts artifacts;
    artifacts.scaler = fit_scaler(raw);
    const GeneratorDataset gen_data =
        build_generator_dataset(split, spec.window, artifacts.scaler);
    artifacts.generator =
        train_generator(spec.augmentation, gen_data, mix_seed(seed, kGeneratorSalt));

    std::vector<LabeledWindow> sources;
    for (const LabeledWindow& w : raw) {
        if (w.label == Label::RI) {
            sources.push_back(w);
        }
    }
    artifacts.synthetics =
        synthesize(artifacts.generator.params, sources, artifacts.scaler, spec.augmentation,
                   spec.window, &artifacts.synthesis);
    artifacts.assimilation = assimilate(raw, artifacts.synthetics, spec.window);
    return artifacts;
}

TrainedClassifier train_strategy(const StrategySpec& spec, const DatasetSplit& split,
                                 std::uint64_t seed) {
    validate(spec.window);
    std::vector<LabeledWindow> raw = build_all_windows(split.train, spec.window);
    sort_canonical(raw);
    if (raw.empty()) {
        throw DataError("train_strategy: train split yields no windows");
    }
    const ClassStats before = class_stats(raw);
    if (before.ri == 0 || before.ri == before.total) {
        throw DataError("train_strategy: training windows contain a single class");
    }

    TrainedClassifier classifier;
    classifier.kind = spec.kind;
    classifier.seed = seed;
    classifier.scaler = fit_scaler(raw);
    classifier.train_stats_before = before;
    classifier.train_stats_after = before;

    std::vector<LabeledWindow> working = raw;
    if (spec.kind == StrategyKind::DA_M) {
        AugmentationArtifacts artifacts = run_augmentation(spec, split, seed);
        classifier.generator = artifacts.generator.report;
        classifier.synthesis = artifacts.synthesis;
        classifier.train_stats_after = artifacts.assimilation.after;
        working = std::move(artifacts.assimilation.augmented);
        sort_canonical(working);
    }

    const std::vector<LabeledWindow> scaled = apply_scaler(classifier.scaler, working);
    const std::vector<std::vector<int>> projections = member_features(spec.kind);
    for (std::size_t index = 0; index < projections.size(); ++index) {
        const std::vector<int>& features = projections[index];
        const NetworkSpec ns = member_network_spec(spec, static_cast<int>(features.size()));

        std::vector<TrainSample> samples;
        samples.reserve(scaled.size());
        for (const LabeledWindow& w : scaled) {
            TrainSample s;
            s.x = project(w, features);
            s.target_class = w.label == Label::RI ? 1 : 0;
            samples.push_back(std::move(s));
        }
        const TrainResult result = train(ns, samples, mix_seed(seed, index));
        classifier.members.push_back(TrainedMember{features, result.params});
    }
    return classifier;
}

Vec predict(const TrainedClassifier& classifier, const LabeledWindow& window_raw) {
    Vec fused(2, 0.0);
    for (const TrainedMember& member : classifier.members) {
        Mat x(window_raw.features.rows, static_cast<int>(member.features.size()));
        for (int t = 0; t < window_raw.features.rows; ++t) {
            for (std::size_t j = 0; j < member.features.size(); ++j) {
                const int f = member.features[j];
                x(t, static_cast<int>(j)) =
                    classifier.scaler.scale(f, window_raw.features(t, f));
            }
        }
        const Vec probs = network_forward(member.params, x);
        fused[0] += probs[0];
        fused[1] += probs[1];
    }
    const double inv = 1.0 / static_cast<double>(classifier.members.size());
    fused[0] *= inv;
    fused[1] *= inv;
    return fused;
}

int predicted_class(const Vec& probs) { return probs[1] > probs[0] ? 1 : 0; }

RunResult evaluate(const TrainedClassifier& classifier, std::span<const LabeledWindow> test_raw,
                   std::uint64_t seed) {
    if (test_raw.empty()) {
        throw DataError("evaluate: empty test set");
    }
    std::vector<int> preds;
    std::vector<int> labels;
    preds.reserve(test_raw.size());
    labels.reserve(test_raw.size());
    for (const LabeledWindow& w : test_raw) {
        preds.push_back(predicted_class(predict(classifier, w)));
        labels.push_back(w.label == Label::RI ? 1 : 0);
    }
    RunResult run;
    run.seed = seed;
    run.cm = confusion(preds, labels);
    run.cls = class_metrics(run.cm);
    const double total = static_cast<double>(run.cm.total());
    const double w1 = static_cast<double>(run.cm.tp + run.cm.fn) / total;
    run.agg = aggregate(run.cls, w1, 1.0 - w1);
    return run;
}

BenchmarkResult run_benchmark(const StrategySpec& spec, const DatasetSplit& split) {
    if (spec.seeds.size() < 2) {
        throw DataError("run_benchmark: need at least two seeds");
    }
    const std::vector<LabeledWindow> test_raw = build_all_windows(split.test, spec.window);
    if (test_raw.empty()) {
        throw DataError("run_benchmark: test split yields no windows");
    }

    const std::size_t count = spec.seeds.size();
    std::vector<std::optional<RunResult>> slots(count);
    std::vector<std::string> failures(count);
    std::atomic<std::size_t> next{0};

    const auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) {
                return;
            }
            const std::uint64_t seed = spec.seeds[k];
            try {
                const TrainedClassifier classifier = train_strategy(spec, split, seed);
                slots[k] = evaluate(classifier, test_raw, seed);
            } catch (const TrainingDiverged& e) {
                failures[k] = e.what();
            }
        }
    };

    unsigned hc = std::thread::hardware_concurrency();
    if (hc == 0) hc = 1;
    const std::size_t n_workers = std::min<std::size_t>(hc, count);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < n_workers; ++k) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    BenchmarkResult result;
    result.kind = spec.kind;
    result.n = spec.window.n;
    for (std::size_t k = 0; k < count; ++k) {
        if (slots[k].has_value()) {
            result.runs.push_back(*slots[k]);
        } else {
            result.diverged_seeds.push_back(spec.seeds[k]);
            std::cerr << "warning: seed " << spec.seeds[k] << " diverged: " << failures[k]
                      << "\n";
        }
    }
    const double diverged_frac =
        static_cast<double>(result.diverged_seeds.size()) / static_cast<double>(count);
    if (diverged_frac > 0.2) {
        throw DataError("run_benchmark: more than 20% of runs diverged");
    }
    if (result.runs.size() < 2) {
        throw DataError("run_benchmark: fewer than two successful runs");
    }
    return result;
}

MetricSummary summarize_class(const BenchmarkResult& result, std::string_view row) {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<double> f1_classmean;
    for (const RunResult& run : result.runs) {
        if (row == "RI") {
            precision.push_back(run.cls.ri.precision);
            recall.push_back(run.cls.ri.recall);
            f1.push_back(run.cls.ri.f1);
            f1_classmean.push_back(run.cls.ri.f1);
        } else if (row == "NonRI") {
            precision.push_back(run.cls.non_ri.precision);
            recall.push_back(run.cls.non_ri.recall);
            f1.push_back(run.cls.non_ri.f1);
            f1_classmean.push_back(run.cls.non_ri.f1);
        } else if (row == "Macro") {
            precision.push_back(run.agg.macro_precision);
            recall.push_back(run.agg.macro_recall);
            f1.push_back(run.agg.macro_f1);
            f1_classmean.push_back(run.agg.macro_f1_classmean);
        } else if (row == "Weighted") {
            precision.push_back(run.agg.weighted_precision);
            recall.push_back(run.agg.weighted_recall);
            f1.push_back(run.agg.weighted_f1);
            f1_classmean.push_back(run.agg.weighted_f1_classmean);
        } else {
            throw ConfigError("unknown benchmark row '" + std::string(row) + "'");
        }
    }
    MetricSummary summary;
    summary.precision = summarize_runs(precision);
    summary.recall = summarize_runs(recall);
    summary.f1 = summarize_runs(f1);
    summary.f1_classmean = summarize_runs(f1_classmean);
    return summary;
}

void write_benchmark_csv(std::span<const BenchmarkResult> results, std::ostream& out,
                         bool include_aggregates) {
    out << "strategy,n,class_or_aggregate,precision_mean,precision_ci,recall_mean,recall_ci,"
           "f1_mean,f1_ci,f1_classmean_mean,f1_classmean_ci\n";
    constexpr std::string_view kRows[] = {"NonRI", "RI", "Macro", "Weighted"};
    const std::size_t row_count = include_aggregates ? 4 : 2;
    for (const BenchmarkResult& result : results) {
        for (std::string_view row : std::span(kRows).first(row_count)) {
            const MetricSummary s = summarize_class(result, row);
            out << strategy_name(result.kind) << ',' << result.n << ',' << row << ','
                << format_double(s.precision.mean) << ',' << format_double(s.precision.ci_halfwidth)
                << ',' << format_double(s.recall.mean) << ',' << format_double(s.recall.ci_halfwidth)
                << ',' << format_double(s.f1.mean) << ',' << format_double(s.f1.ci_halfwidth) << ','
                << format_double(s.f1_classmean.mean) << ','
                << format_double(s.f1_classmean.ci_halfwidth) << '\n';
        }
    }
}

}  // namespace ridetect
