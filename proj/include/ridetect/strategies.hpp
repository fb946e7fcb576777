#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ridetect/augmentation.hpp"
#include "ridetect/bdeck.hpp"
#include "ridetect/metrics.hpp"
#include "ridetect/nn.hpp"
#include "ridetect/windowing.hpp"

namespace ridetect {

enum class StrategyKind { U, M, E, HE, DA_M };

std::string_view strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(std::string_view name);

/// Feature columns each member network sees, in member order.
std::vector<std::vector<int>> member_features(StrategyKind kind);

struct StrategySpec {
    StrategyKind kind = StrategyKind::M;
    WindowingConfig window;
    NetworkSpec network;  ///< template; input size is set per member
    AugmentationConfig augmentation;  ///< used by DA_M only
    std::vector<std::uint64_t> seeds = default_seeds();

    static std::vector<std::uint64_t> default_seeds(int count = 30);
};

struct TrainedMember {
    std::vector<int> features;
    NetworkParams params;
};

struct TrainedClassifier {
    StrategyKind kind = StrategyKind::M;
    std::uint64_t seed = 0;
    FeatureScaler scaler;  ///< fitted on the real train windows only
    std::vector<TrainedMember> members;
    SynthesisReport synthesis;      ///< DA_M only
    GeneratorReport generator;      ///< DA_M only
    ClassStats train_stats_before;  ///< real train windows
    ClassStats train_stats_after;   ///< after assimilation (equal to before unless DA_M)
};

struct RunResult {
    std::uint64_t seed = 0;
    ConfusionMatrix cm;
    ClassMetrics cls;
    AggregateMetrics agg;
};

struct BenchmarkResult {
    StrategyKind kind = StrategyKind::M;
    int n = 6;
    std::vector<RunResult> runs;
    std::vector<std::uint64_t> diverged_seeds;
};

/// Everything the DA_M pipeline produces before classifier training. The
/// generator seed is derived from the run seed, so train_strategy on the same
/// run seed reproduces these artifacts exactly.
struct AugmentationArtifacts {
    FeatureScaler scaler;  ///< fitted on the real train windows
    TrainedGenerator generator;
    std::vector<SyntheticSequence> synthetics;
    SynthesisReport synthesis;
    AssimilationResult assimilation;
};

/// Run generator training, synthesis, and assimilation for one run seed.
AugmentationArtifacts run_augmentation(const StrategySpec& spec, const DatasetSplit& split,
                                       std::uint64_t seed);

/// Train every member of the strategy on its feature projection of the same
/// (canonically ordered) train windows. DA_M first trains the generator,
/// synthesizes from the train RI windows, and assimilates. Throws DataError
/// when the train windows contain only one class.
TrainedClassifier train_strategy(const StrategySpec& spec, const DatasetSplit& split,
                                 std::uint64_t seed);

/// Class-probability prediction for one raw (unscaled) window: members see
/// the scaled projection; ensembles fuse by the arithmetic mean of member
/// softmax outputs.
Vec predict(const TrainedClassifier& classifier, const LabeledWindow& window_raw);

/// Argmax with ties broken toward non-RI. Returns 1 for RI, 0 otherwise.
int predicted_class(const Vec& probs);

/// Evaluate a trained classifier on raw test windows: confusion matrix plus
/// per-class and aggregate metrics, weighted by the test class proportions.
RunResult evaluate(const TrainedClassifier& classifier, std::span<const LabeledWindow> test_raw,
                   std::uint64_t seed);

/// One train+evaluate per seed. Diverged runs are excluded with a note on
/// stderr; more than 20% divergence aborts with DataError. Needs at least two
/// seeds and leaves at least two successful runs.
BenchmarkResult run_benchmark(const StrategySpec& spec, const DatasetSplit& split);

/// Mean and 95% CI of one metric across runs.
struct MetricSummary {
    RunSummary precision;
    RunSummary recall;
    RunSummary f1;
    RunSummary f1_classmean;
};

/// Rows of the benchmark table: RI, NonRI, Macro, Weighted.
MetricSummary summarize_class(const BenchmarkResult& result, std::string_view row);

/// Benchmark CSV:
/// strategy,n,class_or_aggregate,precision_mean,precision_ci,recall_mean,
/// recall_ci,f1_mean,f1_ci,f1_classmean_mean,f1_classmean_ci
/// The last two columns carry the conventional mean-of-class-F1 aggregate;
/// for the per-class rows they repeat the f1 columns. With
/// include_aggregates false only the NonRI and RI rows are written (the
/// timeframe-sweep table shape).
void write_benchmark_csv(std::span<const BenchmarkResult> results, std::ostream& out,
                         bool include_aggregates = true);

}  // namespace ridetect
