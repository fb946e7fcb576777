/// End-to-end acceptance checks, one printed line per criterion. Criteria
/// 1-7 gate the exit code; criterion 8 is a reporting-only diagnostic.
/// The real-data variants of criteria 5 and 8 run when data/jtwc/<basin>
/// exists and holds b-deck files; otherwise they are reported as skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ridetect/augmentation.hpp"
#include "ridetect/bdeck.hpp"
#include "ridetect/errors.hpp"
#include "ridetect/experiment.hpp"
#include "ridetect/metrics.hpp"
#include "ridetect/nn.hpp"
#include "ridetect/strategies.hpp"
#include "ridetect/utctime.hpp"
#include "ridetect/windowing.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ridetect;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    bool skip = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

// --- criterion 1: BPTT gradients vs central finite differences ------------

NetworkSpec fd_spec(int input, int hidden, LossKind loss, Activation act) {
    NetworkSpec spec;
    spec.input_size = input;
    spec.hidden_size = hidden;
    spec.hidden_activation = act;
    spec.loss = loss;
    if (loss == LossKind::CrossEntropy) {
        spec.output_size = 2;
        spec.output_activation = OutputActivation::Softmax;
    } else {
        spec.output_size = 3;
        spec.output_activation = OutputActivation::Linear;
    }
    return spec;
}

TrainSample fd_sample(const NetworkSpec& spec, int T, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    TrainSample s;
    s.x = Mat(T, spec.input_size);
    for (double& v : s.x.a) {
        v = unit(rng);
    }
    if (spec.loss == LossKind::CrossEntropy) {
        s.target_class = static_cast<int>(rng() % 2);
    } else {
        s.target.resize(static_cast<std::size_t>(spec.output_size));
        for (double& v : s.target) {
            v = unit(rng);
        }
    }
    return s;
}

Outcome criterion_gradients() {
    const auto start = Clock::now();
    std::mt19937_64 rng(90210);
    const double h = 1e-5;
    double worst = 0.0;
    long coords = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const LossKind loss = trial % 2 == 0 ? LossKind::CrossEntropy : LossKind::MSE;
        const Activation act = trial % 4 < 2 ? Activation::Tanh : Activation::ReLU;
        const int input = 1 + static_cast<int>(rng() % 3);
        const int hidden = 2 + static_cast<int>(rng() % 7);
        const int T = 2 + static_cast<int>(rng() % 5);
        const NetworkSpec spec = fd_spec(input, hidden, loss, act);
        NetworkParams params = init_params(spec, rng());

        std::vector<TrainSample> batch;
        const int B = 1 + static_cast<int>(rng() % 3);
        for (int b = 0; b < B; ++b) {
            batch.push_back(fd_sample(spec, T, rng));
        }

        const BatchResult analytic = forward_backward(params, batch);
        const auto grads = tensor_list(analytic.grads);
        const auto tensors = tensor_list(params);
        for (std::size_t n = 0; n < tensors.size(); ++n) {
            Vec& values = *tensors[n].second;
            for (std::size_t k = 0; k < values.size(); ++k) {
                const double saved = values[k];
                values[k] = saved + h;
                const double up = forward_backward(params, batch).loss;
                values[k] = saved - h;
                const double down = forward_backward(params, batch).loss;
                values[k] = saved;

                const double fd = (up - down) / (2.0 * h);
                const double an = (*grads[n].second)[k];
                const double scale = std::max(std::fabs(fd), std::fabs(an));
                const double err =
                    scale > 1e-6 ? std::fabs(fd - an) / scale : std::fabs(fd - an);
                worst = std::max(worst, err);
                ++coords;
            }
        }
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = worst < 1e-4 && elapsed < 30.0;
    out.detail = "worst rel err " + fmt(worst) + " over " + std::to_string(coords) +
                 " coordinates, " + fmt(elapsed) + " s";
    return out;
}

// --- criterion 2: labeling vs brute-force enumerator -----------------------

Cyclone random_cyclone(std::mt19937_64& rng, int index) {
    Cyclone c;
    c.id = "SH" + std::to_string(index % 90 + 1) + "-" + std::to_string(2000 + index % 20);
    const int length = 5 + static_cast<int>(rng() % 36);
    int wind = 20 + 5 * static_cast<int>(rng() % 10);
    for (int t = 0; t < length; ++t) {
        TrackPoint p;
        p.timestamp = UtcTime{make_utc(2005, 1, 1, 0).secs + t * kSixHours};
        p.lat = -10.0 - 0.1 * t;
        p.lon = 80.0 + 0.2 * t;
        p.wind = wind;
        c.points.push_back(p);
        wind = std::max(15, wind + static_cast<int>(rng() % 26) - 10);
    }
    return c;
}

Label brute_label(const Cyclone& c, int s, const WindowingConfig& wcfg) {
    const auto rise = [&](int i) {
        const int delta = c.points[static_cast<std::size_t>(i + 4)].wind -
                          c.points[static_cast<std::size_t>(i)].wind;
        return wcfg.strict_exceed ? delta > wcfg.ri_threshold : delta >= wcfg.ri_threshold;
    };
    if (wcfg.label_rule == LabelRule::LastAnchored) {
        return rise(s + wcfg.n - 5) ? Label::RI : Label::NonRI;
    }
    for (int i = s; i + 4 <= s + wcfg.n - 1; ++i) {
        if (rise(i)) {
            return Label::RI;
        }
    }
    return Label::NonRI;
}

Outcome criterion_labeling() {
    const auto start = Clock::now();
    std::mt19937_64 rng(90211);
    long windows_checked = 0;
    long mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        const Cyclone c = random_cyclone(rng, k);
        for (LabelRule rule : {LabelRule::AnySpan, LabelRule::LastAnchored}) {
            WindowingConfig wcfg;
            wcfg.n = 5 + static_cast<int>(rng() % 4);
            wcfg.stride = 1 + static_cast<int>(rng() % 3);
            wcfg.strict_exceed = rng() % 2 == 0;
            wcfg.label_rule = rule;

            const std::vector<LabeledWindow> got = build_all_windows({c}, wcfg);
            std::vector<std::pair<int, Label>> expected;
            for (int s = 0; s + wcfg.n <= static_cast<int>(c.points.size()); s += wcfg.stride) {
                expected.emplace_back(s, brute_label(c, s, wcfg));
            }
            if (got.size() != expected.size()) {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < got.size(); ++i) {
                ++windows_checked;
                if (got[i].start_index != expected[i].first ||
                    got[i].label != expected[i].second) {
                    ++mismatches;
                }
            }
        }
    }
    Outcome out;
    out.pass = mismatches == 0;
    out.detail = std::to_string(windows_checked) + " windows over 1000 cyclones, " +
                 std::to_string(mismatches) + " mismatches, " + fmt(seconds_since(start)) +
                 " s";
    return out;
}

// --- criterion 3: metrics vs brute force -----------------------------------

Outcome criterion_metrics() {
    const auto start = Clock::now();
    std::mt19937_64 rng(90212);
    double worst = 0.0;
    long identity_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const int len = 1 + static_cast<int>(rng() % 200);
        std::vector<int> labels(static_cast<std::size_t>(len));
        std::vector<int> preds(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
            preds[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
        }

        const ConfusionMatrix cm = confusion(preds, labels);
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (int i = 0; i < len; ++i) {
            const bool is_ri = labels[static_cast<std::size_t>(i)] == 1;
            const bool said_ri = preds[static_cast<std::size_t>(i)] == 1;
            tp += is_ri && said_ri;
            fp += !is_ri && said_ri;
            fn += is_ri && !said_ri;
            tn += !is_ri && !said_ri;
        }
        if (cm.tp != tp || cm.fp != fp || cm.tn != tn || cm.fn != fn) {
            ++identity_failures;
            continue;
        }

        const auto brute_scores = [](double btp, double bfp, double bfn) {
            double precision = btp + bfp > 0.0 ? btp / (btp + bfp) : 0.0;
            double recall = btp + bfn > 0.0 ? btp / (btp + bfn) : 0.0;
            double f1 = precision + recall > 0.0
                            ? 2.0 * precision * recall / (precision + recall)
                            : 0.0;
            return std::array<double, 3>{precision, recall, f1};
        };
        const ClassMetrics cls = class_metrics(cm);
        const auto ri = brute_scores(static_cast<double>(tp), static_cast<double>(fp),
                                     static_cast<double>(fn));
        const auto non = brute_scores(static_cast<double>(tn), static_cast<double>(fn),
                                      static_cast<double>(fp));
        worst = std::max({worst, std::fabs(cls.ri.precision - ri[0]),
                          std::fabs(cls.ri.recall - ri[1]), std::fabs(cls.ri.f1 - ri[2]),
                          std::fabs(cls.non_ri.precision - non[0]),
                          std::fabs(cls.non_ri.recall - non[1]),
                          std::fabs(cls.non_ri.f1 - non[2])});

        const double w1 = static_cast<double>(tp + fn) / static_cast<double>(len);
        const double w2 = static_cast<double>(fp + tn) / static_cast<double>(len);
        const AggregateMetrics agg = aggregate(cls, w1, w2);
        const auto harmonic = [](double p, double r) {
            return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        };
        const bool identities =
            agg.macro_precision == 0.5 * (cls.ri.precision + cls.non_ri.precision) &&
            agg.macro_recall == 0.5 * (cls.ri.recall + cls.non_ri.recall) &&
            agg.macro_f1 == harmonic(agg.macro_precision, agg.macro_recall) &&
            agg.macro_f1_classmean == 0.5 * (cls.ri.f1 + cls.non_ri.f1) &&
            agg.weighted_precision == w1 * cls.ri.precision + w2 * cls.non_ri.precision &&
            agg.weighted_recall == w1 * cls.ri.recall + w2 * cls.non_ri.recall &&
            agg.weighted_f1 == harmonic(agg.weighted_precision, agg.weighted_recall) &&
            agg.weighted_f1_classmean == w1 * cls.ri.f1 + w2 * cls.non_ri.f1;
        identity_failures += identities ? 0 : 1;
    }
    Outcome out;
    out.pass = worst <= 1e-12 && identity_failures == 0;
    out.detail = "worst abs diff " + fmt(worst) + ", " + std::to_string(identity_failures) +
                 " identity failures, " + fmt(seconds_since(start)) + " s";
    return out;
}

// --- criterion 4: overfit sanity -------------------------------------------

Cyclone toy_cyclone(const std::string& id, const std::vector<int>& winds) {
    Cyclone c;
    c.id = id;
    for (std::size_t t = 0; t < winds.size(); ++t) {
        TrackPoint p;
        p.timestamp = UtcTime{make_utc(2003, 2, 1, 0).secs +
                              static_cast<std::int64_t>(t) * kSixHours};
        p.lat = -14.0 - 0.25 * static_cast<double>(t);
        p.lon = 75.0 + 0.35 * static_cast<double>(t);
        p.wind = winds[t];
        c.points.push_back(p);
    }
    return c;
}

Outcome criterion_overfit() {
    const auto start = Clock::now();

    std::vector<TrainSample> samples;
    for (int k = 0; k < 10; ++k) {
        TrainSample rising;
        rising.x = Mat(6, 3);
        TrainSample flat;
        flat.x = Mat(6, 3);
        for (int t = 0; t < 6; ++t) {
            rising.x(t, 0) = 0.3 + 0.01 * k;
            rising.x(t, 1) = 0.5;
            rising.x(t, 2) = 0.1 + 0.15 * t + 0.005 * k;
            flat.x(t, 0) = 0.3 + 0.01 * k;
            flat.x(t, 1) = 0.5;
            flat.x(t, 2) = 0.35 + 0.005 * k;
        }
        rising.target_class = 1;
        flat.target_class = 0;
        samples.push_back(rising);
        samples.push_back(flat);
    }
    NetworkSpec spec;
    spec.input_size = 3;
    spec.epochs = 200;
    const TrainResult trained = train(spec, samples, 7);
    int correct = 0;
    for (const TrainSample& s : samples) {
        const Vec probs = network_forward(trained.params, s.x);
        const int predicted = probs[1] > probs[0] ? 1 : 0;
        correct += predicted == s.target_class ? 1 : 0;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());

    DatasetSplit split;
    split.train.push_back(
        toy_cyclone("SH01-2003", {25, 30, 40, 55, 70, 80, 85, 88, 90, 88, 85, 80}));
    split.train.push_back(toy_cyclone("SH02-2003", {25, 25, 30, 30, 35, 35, 40, 40, 45, 45}));
    split.train.push_back(toy_cyclone("SH03-2003", {30, 35, 35, 40, 45, 50, 50, 55, 55, 50}));
    split.train.push_back(toy_cyclone("SH04-2003", {20, 25, 30, 30, 35, 40, 40, 35, 30}));
    split.train.push_back(toy_cyclone("SH05-2003", {35, 40, 45, 45, 50, 55, 60, 60, 55, 50}));
    WindowingConfig wcfg;
    const FeatureScaler scaler = fit_scaler(build_all_windows(split.train, wcfg));
    const GeneratorDataset dataset = build_generator_dataset(split, wcfg, scaler);
    AugmentationConfig aug;
    aug.generator.epochs = 800;
    const TrainedGenerator generator = train_generator(aug, dataset, 7);

    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = accuracy >= 0.99 && generator.report.mse < 0.01 && elapsed < 120.0;
    out.detail = "train accuracy " + fmt(accuracy) + ", generator holdout MSE " +
                 fmt(generator.report.mse) + " over " +
                 std::to_string(generator.report.holdout_count) + " samples, " + fmt(elapsed) +
                 " s";
    return out;
}

// --- criterion 5: directional DA improvement -------------------------------

double mean_ri_f1(const BenchmarkResult& result) {
    return summarize_class(result, "RI").f1.mean;
}

Outcome da_gap_on(const std::string& dir, Basin basin, double budget_seconds) {
    const auto start = Clock::now();
    IngestReport report;
    const BasinDataset dataset = load_basin_dir(dir, basin, CleanConfig{}, report);
    const DatasetSplit split = split_by_period(dataset, 0.75);

    StrategySpec spec;
    spec.seeds = StrategySpec::default_seeds(10);
    spec.kind = StrategyKind::M;
    const double m_f1 = mean_ri_f1(run_benchmark(spec, split));
    spec.kind = StrategyKind::DA_M;
    const double da_f1 = mean_ri_f1(run_benchmark(spec, split));

    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = da_f1 - m_f1 >= 0.05 && elapsed < budget_seconds;
    out.detail = "M-LSTM RI F1 " + fmt(m_f1) + ", DA-M-LSTM " + fmt(da_f1) + ", gap " +
                 fmt(da_f1 - m_f1) + " over 10 seeds, " + fmt(elapsed) + " s";
    return out;
}

bool has_bdeck_files(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        return false;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            return true;
        }
    }
    return false;
}

// --- criterion 6: CLI determinism ------------------------------------------

ExperimentConfig determinism_config(const std::string& out_dir) {
    ExperimentConfig config;
    config.basin = Basin::SouthIndian;
    config.out_dir = out_dir;
    config.seeds = {1, 2};
    config.network.epochs = 5;
    config.network.hidden_size = 8;
    config.augmentation.generator.epochs = 5;
    config.augmentation.generator.hidden_size = 8;
    config.strategies = {StrategyKind::HE};
    config.sweep_n = {5, 6};
    config.deterministic_svg = true;
    return config;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion_determinism() {
    const auto start = Clock::now();
    const fs::path base = fs::temp_directory_path() / "ridetect_acceptance";
    fs::remove_all(base);
    const fs::path out1 = base / "run1";
    const fs::path out2 = base / "run2";

    std::ostringstream log;
    for (const fs::path& out : {out1, out2}) {
        ExperimentConfig config = determinism_config(out.string());
        cmd_ingest(config, log);
        cmd_stats(config, log);
        cmd_sweep(config, log);
        cmd_benchmark(config, log);
        cmd_augment(config, log);
        cmd_plot(config, log);
    }

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(out1)) {
        names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());

    int compared = 0;
    std::vector<std::string> differing;
    for (const std::string& name : names) {
        if (!fs::exists(out2 / name)) {
            differing.push_back(name + " (missing)");
            continue;
        }
        ++compared;
        if (slurp(out1 / name) != slurp(out2 / name)) {
            differing.push_back(name);
        }
    }

    Outcome out;
    out.pass = differing.empty() && compared > 0;
    out.detail = std::to_string(compared) + " artifacts byte-compared, ";
    if (differing.empty()) {
        out.detail += "all identical";
    } else {
        out.detail += "differing:";
        for (const std::string& name : differing) {
            out.detail += " " + name;
        }
    }
    out.detail += ", " + fmt(seconds_since(start)) + " s";
    return out;
}

// --- criterion 7: augmentation hygiene --------------------------------------

Outcome criterion_hygiene() {
    const auto start = Clock::now();
    IngestReport report;
    const BasinDataset dataset =
        load_basin_dir("data/fixtures/south_indian", Basin::SouthIndian, CleanConfig{}, report);
    const DatasetSplit split = split_by_period(dataset, 0.75);

    StrategySpec spec;
    spec.kind = StrategyKind::DA_M;
    const AugmentationArtifacts artifacts = run_augmentation(spec, split, 1);

    std::set<std::string> test_ids;
    for (const Cyclone& c : split.test) {
        test_ids.insert(c.id);
    }

    bool minority_ok = true;
    int kept_ri = 0;
    for (const SyntheticSequence& s : artifacts.synthetics) {
        kept_ri += s.label == Label::RI ? 1 : 0;
    }
    if (kept_ri >= 1) {
        minority_ok =
            artifacts.assimilation.after.minority_pct > artifacts.assimilation.before.minority_pct;
    }

    int leaked = 0;
    int negative_winds = 0;
    for (const SyntheticSequence& s : artifacts.synthetics) {
        leaked += test_ids.count(s.source_cyclone_id) > 0 ? 1 : 0;
        for (int t = 0; t < s.rows.rows; ++t) {
            negative_winds += s.rows(t, kFeatWind) < 0.0 ? 1 : 0;
        }
    }

    Outcome out;
    out.pass = minority_ok && leaked == 0 && negative_winds == 0 && kept_ri >= 1;
    out.detail = std::to_string(artifacts.synthetics.size()) + " synthetics (" +
                 std::to_string(kept_ri) + " RI), minority " +
                 fmt(artifacts.assimilation.before.minority_pct) + "% -> " +
                 fmt(artifacts.assimilation.after.minority_pct) + "%, " +
                 std::to_string(leaked) + " test-split sources, " +
                 std::to_string(negative_winds) + " negative winds, " +
                 fmt(seconds_since(start)) + " s";
    return out;
}

// --- criterion 8: real-data minority diagnostic ------------------------------

Outcome minority_diagnostic(const std::string& dir, Basin basin, double target_pct) {
    IngestReport report;
    const BasinDataset dataset = load_basin_dir(dir, basin, CleanConfig{}, report);
    const DatasetSplit split = split_by_period(dataset, 0.75);
    WindowingConfig wcfg;
    const ClassStats stats = class_stats(build_all_windows(split.train, wcfg));
    const double deviation = stats.minority_pct - target_pct;
    Outcome out;
    out.pass = std::fabs(deviation) <= 1.5;
    out.detail = "train minority " + fmt(stats.minority_pct) + "% vs " + fmt(target_pct) +
                 "% target (deviation " + fmt(deviation) + " pp)";
    return out;
}

void print_line(const std::string& label, const Outcome& outcome) {
    const char* verdict = outcome.skip ? "SKIP" : (outcome.pass ? "PASS" : "FAIL");
    std::cout << label << ": " << verdict << " (" << outcome.detail << ")\n";
}

}  // namespace

int main() {
    bool all_pass = true;
    const auto gate = [&all_pass](const std::string& label, const Outcome& outcome) {
        print_line(label, outcome);
        if (!outcome.skip && !outcome.pass) {
            all_pass = false;
        }
    };

    try {
        gate("criterion 1 gradient check", criterion_gradients());
        gate("criterion 2 labeling oracle", criterion_labeling());
        gate("criterion 3 metrics oracle", criterion_metrics());
        gate("criterion 4 overfit sanity", criterion_overfit());
        gate("criterion 5 fixture DA gap", da_gap_on("data/fixtures/south_indian",
                                                     Basin::SouthIndian, 600.0));
        if (has_bdeck_files("data/jtwc/south_indian")) {
            gate("criterion 5 real-data DA gap",
                 da_gap_on("data/jtwc/south_indian", Basin::SouthIndian, 3600.0));
        } else {
            Outcome skip;
            skip.skip = true;
            skip.detail = "no b-deck files under data/jtwc/south_indian";
            print_line("criterion 5 real-data DA gap", skip);
        }
        gate("criterion 6 determinism", criterion_determinism());
        gate("criterion 7 augmentation hygiene", criterion_hygiene());

        const struct {
            const char* label;
            const char* dir;
            Basin basin;
            double target;
        } diagnostics[] = {
            {"criterion 8 SP minority diagnostic", "data/jtwc/south_pacific",
             Basin::SouthPacific, 5.16},
            {"criterion 8 SI minority diagnostic", "data/jtwc/south_indian",
             Basin::SouthIndian, 3.86},
        };
        for (const auto& diag : diagnostics) {
            if (has_bdeck_files(diag.dir)) {
                const Outcome outcome = minority_diagnostic(diag.dir, diag.basin, diag.target);
                std::cout << diag.label << ": "
                          << (outcome.pass ? "WITHIN TOLERANCE" : "DEVIATION (non-blocking)")
                          << " (" << outcome.detail << ")\n";
            } else {
                Outcome skip;
                skip.skip = true;
                skip.detail = std::string("no b-deck files under ") + diag.dir;
                print_line(diag.label, skip);
            }
        }
    } catch (const std::exception& e) {
        std::cout << "acceptance aborted: " << e.what() << '\n';
        return 1;
    }

    std::cout << (all_pass ? "acceptance: all blocking criteria passed\n"
                           : "acceptance: blocking criteria FAILED\n");
    return all_pass ? 0 : 1;
}
