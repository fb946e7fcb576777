#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ridetect/mat.hpp"

namespace ridetect {

enum class Activation { Tanh, ReLU };
enum class OutputActivation { Softmax, Linear };
enum class LossKind { CrossEntropy, MSE };

struct NetworkSpec {
    int input_size = 1;
    int hidden_size = 50;
    int output_size = 2;
    Activation hidden_activation = Activation::ReLU;
    OutputActivation output_activation = OutputActivation::Softmax;
    LossKind loss = LossKind::CrossEntropy;
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 0.001;
};

/// Throws ConfigError on nonpositive sizes or a loss/output mismatch
/// (cross-entropy pairs with softmax, MSE with linear).
void validate(const NetworkSpec& spec);

/// One LSTM layer. Gate order everywhere (including RNG consumption during
/// init) is i, f, g, o; w* act on the input, u* on the previous hidden state.
struct LstmLayerParams {
    int input_size = 0;
    int hidden_size = 0;
    Activation activation = Activation::Tanh;
    Mat wi, wf, wg, wo;
    Mat ui, uf, ug, uo;
    Vec bi, bf, bg, bo;
};

struct DenseParams {
    int in_size = 0;
    int out_size = 0;
    OutputActivation activation = OutputActivation::Softmax;
    Mat w;
    Vec b;
};

struct NetworkParams {
    NetworkSpec spec;
    LstmLayerParams lstm;
    DenseParams dense;
};

/// Named views of every trainable tensor, in a fixed order shared by Adam,
/// serialization, and the gradient tests.
std::vector<std::pair<std::string, Vec*>> tensor_list(NetworkParams& p);
std::vector<std::pair<std::string, const Vec*>> tensor_list(const NetworkParams& p);

/// Everything the backward pass needs from one forward run over a sequence.
/// Gate matrices hold post-activation values; c_act holds act(c_t).
struct LstmCache {
    Mat x;
    Mat i, f, g, o;
    Mat c, h;
    Mat c_act;
};

struct TrainSample {
    Mat x;                 ///< T x input_size
    int target_class = 0;  ///< cross-entropy target (0 = non-RI, 1 = RI)
    Vec target;            ///< MSE target, length output_size
};

struct BatchResult {
    double loss = 0.0;
    NetworkParams grads;  ///< mean gradients over the batch, shapes match params
};

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;
    NetworkParams m;
    NetworkParams v;
};

struct TrainResult {
    NetworkParams params;
    Vec epoch_loss;  ///< mean training loss per epoch
};

/// Numerically stable softmax; outputs are clamped to at least 1e-12 and
/// renormalized, so they stay inside (0, 1) and sum to 1.
Vec softmax(std::span<const double> z);

/// Mean negative log-likelihood over the batch; probabilities clamped at
/// 1e-12 before the log. Throws DataError on shape mismatch.
double cross_entropy(const Mat& probs, std::span<const int> targets);

/// Gradient of the mean cross-entropy at the softmax input: (p - onehot)/B.
Mat cross_entropy_grad(const Mat& probs, std::span<const int> targets);

/// Mean squared error over batch and output dimensions.
double mse(const Mat& pred, const Mat& target);

/// Gradient of mse at the prediction: 2 (pred - target) / (B * D).
Mat mse_grad(const Mat& pred, const Mat& target);

/// Glorot-uniform weights drawn from mt19937_64(seed) in the fixed tensor
/// order; biases zero except the forget gate's, which starts at 1.
NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed);

/// Run the LSTM over a T x input_size sequence from zero initial state.
/// Throws NumericError on non-finite inputs.
LstmCache lstm_forward(const LstmLayerParams& params, const Mat& sequence);

/// Full inference: LSTM, last hidden state, dense head. Returns softmax
/// probabilities or the raw linear output depending on the head.
Vec network_forward(const NetworkParams& params, const Mat& x);

/// Mean loss and exact mean gradients for one batch via backpropagation
/// through time. Throws NumericError (naming the tensor) if any gradient
/// overflows. Throws DataError on an empty batch.
BatchResult forward_backward(const NetworkParams& params, std::span<const TrainSample> batch);

AdamState make_adam(const NetworkParams& params);

/// In-place Adam update with bias correction.
void adam_step(AdamState& state, NetworkParams& params, const NetworkParams& grads);

/// Full training loop: epochs x shuffled mini-batches, Adam updates, loss
/// curve. Deterministic for a given (spec, samples, seed). Throws
/// TrainingDiverged when the loss stops being finite.
TrainResult train(const NetworkSpec& spec, std::span<const TrainSample> samples,
                  std::uint64_t seed);

/// JSON checkpoint: spec, seed, and every tensor with its shape. Double
/// values round-trip exactly.
std::string checkpoint_to_json(const NetworkParams& params, std::uint64_t seed);
NetworkParams checkpoint_from_json(const std::string& text, std::uint64_t* seed_out = nullptr);

}  // namespace ridetect
