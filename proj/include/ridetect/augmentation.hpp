#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ridetect/bdeck.hpp"
#include "ridetect/nn.hpp"
#include "ridetect/windowing.hpp"

namespace ridetect {

/// One (4 past steps -> 4 future steps) generator instance in scaled units.
struct GeneratorSample {
    Mat input;   ///< 4 x 3
    Vec target;  ///< 12, the 4 x 3 continuation flattened row-major
    std::string cyclone_id;
    int offset = 0;
};

struct GeneratorDataset {
    std::vector<GeneratorSample> train;    ///< from every train-split cyclone
    std::vector<GeneratorSample> holdout;  ///< the subset from RI cyclones, for the quality check
};

enum class RelabelPolicy { KeepOnlyRI, TrustConstruction };

struct AugmentationConfig {
    int multiplier = 1;  ///< synthetic sequences per real RI window
    RelabelPolicy relabel = RelabelPolicy::KeepOnlyRI;
    NetworkSpec generator;

    AugmentationConfig();
};

/// Generator defaults: 3 features in, 50 hidden tanh units, linear 12 out,
/// MSE, 100 epochs.
NetworkSpec default_generator_spec();

/// Eight-row synthetic track segment in raw units: rows 0-3 copied from the
/// source RI window, rows 4-7 generated.
struct SyntheticSequence {
    std::string id;  ///< unique provenance id, derived from the source window
    std::string source_cyclone_id;
    int source_start = 0;
    Mat rows;  ///< 8 x 3 (lat, lon, wind)
    Label label = Label::NonRI;
};

struct GeneratorReport {
    int holdout_count = 0;
    double mse = 0.0;  ///< over all holdout entries, scaled units
    std::array<double, kFeatureCount> mse_per_feature{};
};

struct TrainedGenerator {
    NetworkParams params;
    GeneratorReport report;
};

struct SynthesisReport {
    int generated = 0;
    int kept = 0;
    int discarded = 0;
};

struct AssimilationResult {
    std::vector<LabeledWindow> augmented;
    ClassStats before;
    ClassStats after;
};

/// Slide the (4 in, 4 out) frame over every train-split cyclone; a length-L
/// track yields max(0, L - 7) samples. The holdout collects the samples of
/// cyclones whose track contains at least one RI rise. Features are scaled
/// with the supplied (train-fitted) scaler. Throws DataError when the split
/// has no RI cyclone. The windowing config supplies the RI threshold and
/// comparison used to recognise RI cyclones.
GeneratorDataset build_generator_dataset(const DatasetSplit& split, const WindowingConfig& wcfg,
                                         const FeatureScaler& scaler);

/// MSE-train the generator on the canonical sample order (sorted by cyclone
/// and offset, so input permutations cannot change the outcome), then report
/// holdout error per feature.
TrainedGenerator train_generator(const AugmentationConfig& config, const GeneratorDataset& data,
                                 std::uint64_t seed);

/// Predict the 4-step continuation of one raw source window's first 4 points.
/// Returns the 4 x 3 prediction in scaled units.
Mat predict_continuation(const NetworkParams& generator, const Mat& source_raw,
                         const FeatureScaler& scaler);

/// Assemble one synthetic sequence from a raw source window and a 4 x 3
/// scaled prediction: copy rows 0-3 verbatim, inverse-scale the prediction
/// into rows 4-7, clamp wind to >= 0 and latitude to [-90, 90], wrap
/// longitude into [0, 360), then label the 8-point wind series (AnySpan).
SyntheticSequence make_synthetic(const LabeledWindow& source_raw, const Mat& prediction_scaled,
                                 const FeatureScaler& scaler, const WindowingConfig& wcfg,
                                 int replicate);

/// Run make_synthetic over every raw train RI window, multiplier times each,
/// discarding sequences that lose the RI label when the policy is KeepOnlyRI.
std::vector<SyntheticSequence> synthesize(const NetworkParams& generator,
                                          std::span<const LabeledWindow> ri_sources_raw,
                                          const FeatureScaler& scaler,
                                          const AugmentationConfig& config,
                                          const WindowingConfig& wcfg,
                                          SynthesisReport* report = nullptr);

/// Window every synthetic sequence with the classifier's n (stride 1), label
/// each window from its wind column, and append to the real training windows.
/// Appended windows carry the synthetic flag.
AssimilationResult assimilate(std::span<const LabeledWindow> train_windows,
                              std::span<const SyntheticSequence> synthetics,
                              const WindowingConfig& wcfg);

/// Track-point CSV of synthetic sequences with a provenance column.
/// Timestamps are fabricated on a 6-hour grid starting 2000-01-01T00:00:00Z.
void write_synthetics_csv(std::span<const SyntheticSequence> synthetics, std::ostream& out);

}  // namespace ridetect
