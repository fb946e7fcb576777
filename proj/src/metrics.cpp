#include "ridetect/metrics.hpp"

#include <cmath>
#include <cstddef>

#include "ridetect/errors.hpp"

namespace ridetect {
namespace {

ClassScores scores_from_counts(double tp, double fp, double fn) {
    ClassScores s;
    if (tp + fp > 0.0) {
        s.precision = tp / (tp + fp);
    } else {
        s.degenerate = true;
    }
    if (tp + fn > 0.0) {
        s.recall = tp / (tp + fn);
    } else {
        s.degenerate = true;
    }
    if (s.precision + s.recall > 0.0) {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    } else {
        s.degenerate = true;
    }
    return s;
}

double harmonic_mean(double p, double r) {
    if (p + r <= 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw DataError("confusion: prediction/label length mismatch");
    }
    if (predictions.empty()) {
        throw DataError("confusion: empty input");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_ri = predictions[i] == 1;
        const bool is_ri = labels[i] == 1;
        if (pred_ri && is_ri) {
            ++cm.tp;
        } else if (pred_ri && !is_ri) {
            ++cm.fp;
        } else if (!pred_ri && is_ri) {
            ++cm.fn;
        } else {
            ++cm.tn;
        }
    }
    return cm;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm) {
    ClassMetrics m;
    m.ri = scores_from_counts(static_cast<double>(cm.tp), static_cast<double>(cm.fp),
                              static_cast<double>(cm.fn));
    m.non_ri = scores_from_counts(static_cast<double>(cm.tn), static_cast<double>(cm.fn),
                                  static_cast<double>(cm.fp));
    return m;
}

AggregateMetrics aggregate(const ClassMetrics& cls, double w1, double w2) {
    if (std::abs(w1 + w2 - 1.0) > 1e-9) {
        throw DataError("aggregate: class weights must sum to 1");
    }
    AggregateMetrics agg;
    agg.w1 = w1;
    agg.w2 = w2;

    agg.macro_precision = 0.5 * (cls.ri.precision + cls.non_ri.precision);
    agg.macro_recall = 0.5 * (cls.ri.recall + cls.non_ri.recall);
    agg.macro_f1 = harmonic_mean(agg.macro_precision, agg.macro_recall);
    agg.macro_f1_classmean = 0.5 * (cls.ri.f1 + cls.non_ri.f1);

    agg.weighted_precision = w1 * cls.ri.precision + w2 * cls.non_ri.precision;
    agg.weighted_recall = w1 * cls.ri.recall + w2 * cls.non_ri.recall;
    agg.weighted_f1 = harmonic_mean(agg.weighted_precision, agg.weighted_recall);
    agg.weighted_f1_classmean = w1 * cls.ri.f1 + w2 * cls.non_ri.f1;
    return agg;
}

RunSummary summarize_runs(std::span<const double> values) {
    if (values.size() < 2) {
        throw DataError("summarize_runs: need at least two runs");
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;

    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sample_sd = std::sqrt(ss / (n - 1.0));

    RunSummary out;
    out.mean = mean;
    out.ci_halfwidth = 1.96 * sample_sd / std::sqrt(n);
    return out;
}

}  // namespace ridetect
