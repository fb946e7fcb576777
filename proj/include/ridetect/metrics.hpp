#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ridetect {

/// Binary confusion counts. Class convention throughout: 1 = RI (positive),
/// 0 = non-RI (negative).
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Precision / recall / F1 for one class. `degenerate` is set when any of the
/// three had a zero denominator and was coerced to 0.0.
struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;
};

/// Per-class metrics for both classes of the binary problem. The non-RI entry
/// is computed with the positive/negative roles swapped.
struct ClassMetrics {
    ClassScores ri;
    ClassScores non_ri;
};

/// Macro and weighted aggregates. The f1 fields follow the convention of this
/// pipeline's reference results: harmonic mean of the aggregated precision and
/// recall. The *_f1_classmean fields carry the more common mean of per-class
/// F1 scores for comparison.
struct AggregateMetrics {
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double macro_f1_classmean = 0.0;

    double w1 = 0.0;  ///< weight of the RI class (its proportion in the evaluated set)
    double w2 = 0.0;  ///< weight of the non-RI class
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    double weighted_f1_classmean = 0.0;
};

/// Mean and 95% confidence-interval half-width over repeated runs.
struct RunSummary {
    double mean = 0.0;
    double ci_halfwidth = 0.0;
};

/// Count TP/FP/TN/FN over paired prediction and label sequences.
/// Throws DataError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

/// Per-class precision/recall/F1 for both classes. Zero denominators yield
/// 0.0 and set the degenerate flag.
ClassMetrics class_metrics(const ConfusionMatrix& cm);

/// Macro and weighted aggregates from per-class metrics. w1 and w2 are the
/// class proportions in the evaluated set and must sum to 1 within 1e-9;
/// throws DataError otherwise.
AggregateMetrics aggregate(const ClassMetrics& cls, double w1, double w2);

/// Mean and 1.96 * s / sqrt(R) half-width, with s the sample standard
/// deviation (n - 1). Throws DataError on fewer than two runs.
RunSummary summarize_runs(std::span<const double> values);

}  // namespace ridetect
