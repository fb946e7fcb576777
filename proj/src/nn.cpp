#include "ridetect/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"
#include "ridetect/errors.hpp"
#include "ridetect/rng.hpp"

namespace ridetect {
namespace {

constexpr double kProbFloor = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double activate(Activation kind, double z) {
    return kind == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

/// Derivative expressed through the activation value, which works for both
/// kinds: tanh' = 1 - a^2, and for ReLU the output is positive exactly where
/// the slope is 1.
double activate_deriv_from_value(Activation kind, double a) {
    return kind == Activation::Tanh ? 1.0 - a * a : (a > 0.0 ? 1.0 : 0.0);
}

/// ReLU slope at the cell value needs the pre-activation sign, so it takes c
/// rather than act(c).
double cell_act_deriv(Activation kind, double c, double c_act) {
    return kind == Activation::Tanh ? 1.0 - c_act * c_act : (c > 0.0 ? 1.0 : 0.0);
}

void require_finite(const Mat& m, const std::string& what) {
    for (double v : m.a) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite value in " + what);
        }
    }
}

Mat glorot(int rows, int cols, int fan_in, int fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Mat m(rows, cols);
    for (double& v : m.a) {
        v = dist(rng);
    }
    return m;
}

NetworkParams zeros_like(const NetworkParams& p) {
    NetworkParams z = p;
    for (auto& [name, tensor] : tensor_list(z)) {
        (void)name;
        std::fill(tensor->begin(), tensor->end(), 0.0);
    }
    return z;
}

}  // namespace

void validate(const NetworkSpec& spec) {
    if (spec.input_size < 1 || spec.hidden_size < 1 || spec.output_size < 1) {
        throw ConfigError("network sizes must be positive");
    }
    if (spec.batch_size < 1) {
        throw ConfigError("batch size must be positive");
    }
    if (spec.epochs < 0) {
        throw ConfigError("epochs must be non-negative");
    }
    if (!(spec.learning_rate > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    const bool ce = spec.loss == LossKind::CrossEntropy;
    const bool soft = spec.output_activation == OutputActivation::Softmax;
    if (ce != soft) {
        throw ConfigError("cross-entropy pairs with softmax and MSE with linear output");
    }
}

std::vector<std::pair<std::string, Vec*>> tensor_list(NetworkParams& p) {
    return {
        {"lstm.wi", &p.lstm.wi.a}, {"lstm.wf", &p.lstm.wf.a}, {"lstm.wg", &p.lstm.wg.a},
        {"lstm.wo", &p.lstm.wo.a}, {"lstm.ui", &p.lstm.ui.a}, {"lstm.uf", &p.lstm.uf.a},
        {"lstm.ug", &p.lstm.ug.a}, {"lstm.uo", &p.lstm.uo.a}, {"lstm.bi", &p.lstm.bi},
        {"lstm.bf", &p.lstm.bf},   {"lstm.bg", &p.lstm.bg},   {"lstm.bo", &p.lstm.bo},
        {"dense.w", &p.dense.w.a}, {"dense.b", &p.dense.b},
    };
}

std::vector<std::pair<std::string, const Vec*>> tensor_list(const NetworkParams& p) {
    std::vector<std::pair<std::string, const Vec*>> out;
    for (auto& [name, tensor] : tensor_list(const_cast<NetworkParams&>(p))) {
        out.emplace_back(name, tensor);
    }
    return out;
}

Vec softmax(std::span<const double> z) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    Vec out(z.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        out[k] = std::exp(z[k] - zmax);
        sum += out[k];
    }
    double clamped_sum = 0.0;
    for (double& v : out) {
        v = std::max(v / sum, kProbFloor);
        clamped_sum += v;
    }
    for (double& v : out) {
        v /= clamped_sum;
    }
    return out;
}

double cross_entropy(const Mat& probs, std::span<const int> targets) {
    if (static_cast<std::size_t>(probs.rows) != targets.size() || probs.rows == 0) {
        throw DataError("cross_entropy: batch shape mismatch");
    }
    double sum = 0.0;
    for (int r = 0; r < probs.rows; ++r) {
        const int t = targets[static_cast<std::size_t>(r)];
        if (t < 0 || t >= probs.cols) {
            throw DataError("cross_entropy: target class out of range");
        }
        sum += -std::log(std::max(probs(r, t), kProbFloor));
    }
    return sum / static_cast<double>(probs.rows);
}

Mat cross_entropy_grad(const Mat& probs, std::span<const int> targets) {
    if (static_cast<std::size_t>(probs.rows) != targets.size() || probs.rows == 0) {
        throw DataError("cross_entropy_grad: batch shape mismatch");
    }
    Mat grad = probs;
    const double inv_b = 1.0 / static_cast<double>(probs.rows);
    for (int r = 0; r < probs.rows; ++r) {
        grad(r, targets[static_cast<std::size_t>(r)]) -= 1.0;
        for (int c = 0; c < probs.cols; ++c) {
            grad(r, c) *= inv_b;
        }
    }
    return grad;
}

double mse(const Mat& pred, const Mat& target) {
    if (pred.rows != target.rows || pred.cols != target.cols || pred.rows == 0) {
        throw DataError("mse: shape mismatch");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pred.a.size(); ++k) {
        const double d = pred.a[k] - target.a[k];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.a.size());
}

Mat mse_grad(const Mat& pred, const Mat& target) {
    if (pred.rows != target.rows || pred.cols != target.cols || pred.rows == 0) {
        throw DataError("mse_grad: shape mismatch");
    }
    Mat grad(pred.rows, pred.cols);
    const double scale = 2.0 / static_cast<double>(pred.a.size());
    for (std::size_t k = 0; k < pred.a.size(); ++k) {
        grad.a[k] = scale * (pred.a[k] - target.a[k]);
    }
    return grad;
}

NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed) {
    validate(spec);
    std::mt19937_64 rng(seed);
    const int in = spec.input_size;
    const int h = spec.hidden_size;
    const int out = spec.output_size;

    NetworkParams p;
    p.spec = spec;
    p.lstm.input_size = in;
    p.lstm.hidden_size = h;
    p.lstm.activation = spec.hidden_activation;
    p.lstm.wi = glorot(h, in, in, h, rng);
    p.lstm.wf = glorot(h, in, in, h, rng);
    p.lstm.wg = glorot(h, in, in, h, rng);
    p.lstm.wo = glorot(h, in, in, h, rng);
    p.lstm.ui = glorot(h, h, h, h, rng);
    p.lstm.uf = glorot(h, h, h, h, rng);
    p.lstm.ug = glorot(h, h, h, h, rng);
    p.lstm.uo = glorot(h, h, h, h, rng);
    p.lstm.bi.assign(static_cast<std::size_t>(h), 0.0);
    p.lstm.bf.assign(static_cast<std::size_t>(h), 1.0);
    p.lstm.bg.assign(static_cast<std::size_t>(h), 0.0);
    p.lstm.bo.assign(static_cast<std::size_t>(h), 0.0);

    p.dense.in_size = h;
    p.dense.out_size = out;
    p.dense.activation = spec.output_activation;
    p.dense.w = glorot(out, h, h, out, rng);
    p.dense.b.assign(static_cast<std::size_t>(out), 0.0);
    return p;
}

LstmCache lstm_forward(const LstmLayerParams& params, const Mat& sequence) {
    if (sequence.rows < 1 || sequence.cols != params.input_size) {
        throw DataError("lstm_forward: sequence shape mismatch");
    }
    require_finite(sequence, "lstm input sequence");

    const int T = sequence.rows;
    const int h = params.hidden_size;
    LstmCache cache;
    cache.x = sequence;
    cache.i = Mat(T, h);
    cache.f = Mat(T, h);
    cache.g = Mat(T, h);
    cache.o = Mat(T, h);
    cache.c = Mat(T, h);
    cache.h = Mat(T, h);
    cache.c_act = Mat(T, h);

    Vec zi(static_cast<std::size_t>(h));
    Vec zf(static_cast<std::size_t>(h));
    Vec zg(static_cast<std::size_t>(h));
    Vec zo(static_cast<std::size_t>(h));
    for (int t = 0; t < T; ++t) {
        for (int k = 0; k < h; ++k) {
            zi[k] = params.bi[k];
            zf[k] = params.bf[k];
            zg[k] = params.bg[k];
            zo[k] = params.bo[k];
        }
        const auto x_t = sequence.row(t);
        matvec_acc(params.wi, x_t, zi);
        matvec_acc(params.wf, x_t, zf);
        matvec_acc(params.wg, x_t, zg);
        matvec_acc(params.wo, x_t, zo);
        if (t > 0) {
            const auto h_prev = cache.h.row(t - 1);
            matvec_acc(params.ui, h_prev, zi);
            matvec_acc(params.uf, h_prev, zf);
            matvec_acc(params.ug, h_prev, zg);
            matvec_acc(params.uo, h_prev, zo);
        }
        for (int k = 0; k < h; ++k) {
            const double i_t = sigmoid(zi[k]);
            const double f_t = sigmoid(zf[k]);
            const double g_t = activate(params.activation, zg[k]);
            const double o_t = sigmoid(zo[k]);
            const double c_prev = t > 0 ? cache.c(t - 1, k) : 0.0;
            const double c_t = f_t * c_prev + i_t * g_t;
            const double c_act = activate(params.activation, c_t);
            cache.i(t, k) = i_t;
            cache.f(t, k) = f_t;
            cache.g(t, k) = g_t;
            cache.o(t, k) = o_t;
            cache.c(t, k) = c_t;
            cache.c_act(t, k) = c_act;
            cache.h(t, k) = o_t * c_act;
        }
    }
    return cache;
}

Vec network_forward(const NetworkParams& params, const Mat& x) {
    const LstmCache cache = lstm_forward(params.lstm, x);
    const int h = params.lstm.hidden_size;
    Vec z = params.dense.b;
    matvec_acc(params.dense.w, cache.h.row(cache.h.rows - 1), z);
    (void)h;
    if (params.dense.activation == OutputActivation::Softmax) {
        return softmax(z);
    }
    return z;
}

BatchResult forward_backward(const NetworkParams& params, std::span<const TrainSample> batch) {
    if (batch.empty()) {
        throw DataError("forward_backward: empty batch");
    }
    const NetworkSpec& spec = params.spec;
    const int h = spec.hidden_size;
    const int out = spec.output_size;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    BatchResult result;
    result.grads = zeros_like(params);
    NetworkParams& g = result.grads;

    Vec z(static_cast<std::size_t>(out));
    Vec dz(static_cast<std::size_t>(out));
    Vec dh(static_cast<std::size_t>(h));
    Vec dc(static_cast<std::size_t>(h));
    Vec dh_prev(static_cast<std::size_t>(h));
    Vec dzi(static_cast<std::size_t>(h));
    Vec dzf(static_cast<std::size_t>(h));
    Vec dzg(static_cast<std::size_t>(h));
    Vec dzo(static_cast<std::size_t>(h));

    for (const TrainSample& sample : batch) {
        if (sample.x.cols != spec.input_size) {
            throw DataError("forward_backward: sample width mismatch");
        }
        const LstmCache cache = lstm_forward(params.lstm, sample.x);
        const int T = cache.h.rows;
        const auto h_last = cache.h.row(T - 1);

        for (int k = 0; k < out; ++k) z[k] = params.dense.b[k];
        matvec_acc(params.dense.w, h_last, z);

        if (spec.loss == LossKind::CrossEntropy) {
            const Vec probs = softmax(z);
            const int target = sample.target_class;
            if (target < 0 || target >= out) {
                throw DataError("forward_backward: target class out of range");
            }
            result.loss += -std::log(std::max(probs[target], kProbFloor));
            for (int k = 0; k < out; ++k) {
                dz[k] = probs[k] - (k == target ? 1.0 : 0.0);
            }
        } else {
            if (sample.target.size() != static_cast<std::size_t>(out)) {
                throw DataError("forward_backward: target length mismatch");
            }
            double sample_loss = 0.0;
            for (int k = 0; k < out; ++k) {
                const double d = z[k] - sample.target[k];
                sample_loss += d * d;
                dz[k] = 2.0 * d / static_cast<double>(out);
            }
            result.loss += sample_loss / static_cast<double>(out);
        }

        outer_acc(g.dense.w, dz, h_last);
        for (int k = 0; k < out; ++k) g.dense.b[k] += dz[k];
        std::fill(dh.begin(), dh.end(), 0.0);
        matvec_transpose_acc(params.dense.w, dz, dh);
        std::fill(dc.begin(), dc.end(), 0.0);

        for (int t = T - 1; t >= 0; --t) {
            for (int k = 0; k < h; ++k) {
                const double i_t = cache.i(t, k);
                const double f_t = cache.f(t, k);
                const double g_t = cache.g(t, k);
                const double o_t = cache.o(t, k);
                const double c_prev = t > 0 ? cache.c(t - 1, k) : 0.0;

                const double do_t = dh[k] * cache.c_act(t, k);
                dc[k] += dh[k] * o_t *
                         cell_act_deriv(params.lstm.activation, cache.c(t, k), cache.c_act(t, k));
                const double di = dc[k] * g_t;
                const double dg = dc[k] * i_t;
                const double df = dc[k] * c_prev;

                dzi[k] = di * i_t * (1.0 - i_t);
                dzf[k] = df * f_t * (1.0 - f_t);
                dzg[k] = dg * activate_deriv_from_value(params.lstm.activation, g_t);
                dzo[k] = do_t * o_t * (1.0 - o_t);

                g.lstm.bi[k] += dzi[k];
                g.lstm.bf[k] += dzf[k];
                g.lstm.bg[k] += dzg[k];
                g.lstm.bo[k] += dzo[k];
                dc[k] *= f_t;
            }
            const auto x_t = cache.x.row(t);
            outer_acc(g.lstm.wi, dzi, x_t);
            outer_acc(g.lstm.wf, dzf, x_t);
            outer_acc(g.lstm.wg, dzg, x_t);
            outer_acc(g.lstm.wo, dzo, x_t);
            if (t > 0) {
                const auto h_prev = cache.h.row(t - 1);
                outer_acc(g.lstm.ui, dzi, h_prev);
                outer_acc(g.lstm.uf, dzf, h_prev);
                outer_acc(g.lstm.ug, dzg, h_prev);
                outer_acc(g.lstm.uo, dzo, h_prev);
            }
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            matvec_transpose_acc(params.lstm.ui, dzi, dh_prev);
            matvec_transpose_acc(params.lstm.uf, dzf, dh_prev);
            matvec_transpose_acc(params.lstm.ug, dzg, dh_prev);
            matvec_transpose_acc(params.lstm.uo, dzo, dh_prev);
            dh = dh_prev;
        }
    }

    result.loss *= inv_b;
    for (auto& [name, tensor] : tensor_list(g)) {
        for (double& v : *tensor) {
            v *= inv_b;
        }
        for (double v : *tensor) {
            if (!std::isfinite(v)) {
                throw NumericError("gradient overflow in " + name);
            }
        }
    }
    return result;
}

AdamState make_adam(const NetworkParams& params) {
    AdamState state;
    state.lr = params.spec.learning_rate;
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    return state;
}

void adam_step(AdamState& state, NetworkParams& params, const NetworkParams& grads) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    const auto p_list = tensor_list(params);
    const auto g_list = tensor_list(grads);
    const auto m_list = tensor_list(state.m);
    const auto v_list = tensor_list(state.v);
    for (std::size_t n = 0; n < p_list.size(); ++n) {
        Vec& p = *p_list[n].second;
        const Vec& g = *g_list[n].second;
        Vec& m = *m_list[n].second;
        Vec& v = *v_list[n].second;
        if (p.size() != g.size()) {
            throw DataError("adam_step: gradient shape mismatch at " + p_list[n].first);
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
            const double m_hat = m[k] / bc1;
            const double v_hat = v[k] / bc2;
            p[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

TrainResult train(const NetworkSpec& spec, std::span<const TrainSample> samples,
                  std::uint64_t seed) {
    validate(spec);
    if (samples.empty()) {
        throw DataError("train: empty training set");
    }

    TrainResult result;
    result.params = init_params(spec, seed);
    AdamState adam = make_adam(result.params);
    std::mt19937_64 shuffle_rng(seed ^ kShuffleSalt);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<TrainSample> batch;
    batch.reserve(static_cast<std::size_t>(spec.batch_size));

    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t pos = 0; pos < order.size();
             pos += static_cast<std::size_t>(spec.batch_size)) {
            const std::size_t end =
                std::min(order.size(), pos + static_cast<std::size_t>(spec.batch_size));
            batch.clear();
            for (std::size_t k = pos; k < end; ++k) {
                batch.push_back(samples[order[k]]);
            }
            try {
                const BatchResult step = forward_backward(result.params, batch);
                loss_sum += step.loss * static_cast<double>(batch.size());
                adam_step(adam, result.params, step.grads);
            } catch (const NumericError& e) {
                throw TrainingDiverged(epoch, e.what());
            }
        }
        const double epoch_loss = loss_sum / static_cast<double>(samples.size());
        if (!std::isfinite(epoch_loss)) {
            throw TrainingDiverged(epoch, "training loss is not finite");
        }
        result.epoch_loss.push_back(epoch_loss);
    }
    return result;
}

namespace {

std::string activation_name(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
std::string output_name(OutputActivation a) {
    return a == OutputActivation::Softmax ? "softmax" : "linear";
}
std::string loss_name(LossKind l) { return l == LossKind::CrossEntropy ? "cross_entropy" : "mse"; }

Activation activation_from(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::ReLU;
    throw ParseError("<checkpoint>", 0, "unknown activation '" + s + "'");
}
OutputActivation output_from(const std::string& s) {
    if (s == "softmax") return OutputActivation::Softmax;
    if (s == "linear") return OutputActivation::Linear;
    throw ParseError("<checkpoint>", 0, "unknown output activation '" + s + "'");
}
LossKind loss_from(const std::string& s) {
    if (s == "cross_entropy") return LossKind::CrossEntropy;
    if (s == "mse") return LossKind::MSE;
    throw ParseError("<checkpoint>", 0, "unknown loss '" + s + "'");
}

}  // namespace

std::string checkpoint_to_json(const NetworkParams& params, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["spec"] = {
        {"input_size", params.spec.input_size},
        {"hidden_size", params.spec.hidden_size},
        {"output_size", params.spec.output_size},
        {"hidden_activation", activation_name(params.spec.hidden_activation)},
        {"output_activation", output_name(params.spec.output_activation)},
        {"loss", loss_name(params.spec.loss)},
        {"epochs", params.spec.epochs},
        {"batch_size", params.spec.batch_size},
        {"learning_rate", params.spec.learning_rate},
    };
    j["seed"] = seed;
    nlohmann::ordered_json tensors;
    const int h = params.spec.hidden_size;
    const int in = params.spec.input_size;
    const int out = params.spec.output_size;
    const auto shape_of = [&](const std::string& name) -> std::pair<int, int> {
        if (name.rfind("lstm.w", 0) == 0) return {h, in};
        if (name.rfind("lstm.u", 0) == 0) return {h, h};
        if (name.rfind("lstm.b", 0) == 0) return {h, 1};
        if (name == "dense.w") return {out, h};
        return {out, 1};
    };
    for (const auto& [name, tensor] : tensor_list(params)) {
        const auto [rows, cols] = shape_of(name);
        nlohmann::ordered_json entry;
        entry["rows"] = rows;
        entry["cols"] = cols;
        entry["data"] = *tensor;
        tensors[name] = std::move(entry);
    }
    j["tensors"] = std::move(tensors);
    return j.dump(2);
}

NetworkParams checkpoint_from_json(const std::string& text, std::uint64_t* seed_out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("<checkpoint>", 0, e.what());
    }
    try {
        const auto& s = j.at("spec");
        NetworkSpec spec;
        spec.input_size = s.at("input_size").get<int>();
        spec.hidden_size = s.at("hidden_size").get<int>();
        spec.output_size = s.at("output_size").get<int>();
        spec.hidden_activation = activation_from(s.at("hidden_activation").get<std::string>());
        spec.output_activation = output_from(s.at("output_activation").get<std::string>());
        spec.loss = loss_from(s.at("loss").get<std::string>());
        spec.epochs = s.at("epochs").get<int>();
        spec.batch_size = s.at("batch_size").get<int>();
        spec.learning_rate = s.at("learning_rate").get<double>();

        NetworkParams params = init_params(spec, 0);
        for (auto& [name, tensor] : tensor_list(params)) {
            const auto& entry = j.at("tensors").at(name);
            const Vec data = entry.at("data").get<Vec>();
            if (data.size() != tensor->size()) {
                throw ParseError("<checkpoint>", 0, "tensor size mismatch for " + name);
            }
            *tensor = data;
        }
        if (seed_out != nullptr) {
            *seed_out = j.at("seed").get<std::uint64_t>();
        }
        return params;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("<checkpoint>", 0, e.what());
    }
}

}  // namespace ridetect
