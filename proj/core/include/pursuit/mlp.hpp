#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pursuit/rng.hpp"

namespace pursuit {

enum class Activation : std::uint8_t { Tanh = 0, Relu = 1, Linear = 2 };

struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
    Activation activation = Activation::Linear;
};

/// Fully connected network; parameters are plain values.
struct Mlp {
    std::vector<Layer> layers;

    Eigen::Index input_dim() const { return layers.front().weight.cols(); }
    Eigen::Index output_dim() const { return layers.back().weight.rows(); }
    Eigen::Index parameter_count() const;
    bool same_shape(const Mlp& other) const;
};

/// d(loss)/d(parameter), shaped like the network it belongs to.
struct GradientSet {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;

    static GradientSet zeros_like(const Mlp& net);
    GradientSet& operator+=(const GradientSet& other);
};

/// widths = {in, hidden..., out}. Weights and biases start uniform in +-1/sqrt(fan_in).
Mlp make_mlp(std::span<const int> widths, Activation hidden, Activation output, Rng& rng);

Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input);

/// Activations recorded by a batched forward pass; `values[0]` is the input,
/// `values[k+1]` the output of layer k. Columns are batch items.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> values;
};

Eigen::MatrixXd forward_batch(const Mlp& net, const Eigen::MatrixXd& inputs, ForwardTrace* trace = nullptr);

struct Backprop {
    GradientSet grads;
    Eigen::MatrixXd input_grad;  // in x batch
};

/// Reverse pass for sum over the batch of <output_b, upstream_b>.
/// `output_pre_grad`, when given, is added to the gradient at the output layer's
/// pre-activation (used for penalties on the pre-squash action).
Backprop backward_batch(const Mlp& net, const ForwardTrace& trace, const Eigen::MatrixXd& upstream,
                        const Eigen::MatrixXd* output_pre_grad = nullptr);

/// Output-layer pre-activation recomputed from a forward trace.
Eigen::MatrixXd output_pre_activation(const Mlp& net, const ForwardTrace& trace);

/// Rescales `grads` so their joint L2 norm is at most `max_norm` (no-op when
/// max_norm <= 0). Returns the norm before clipping.
double clip_global_norm(GradientSet& grads, double max_norm);

/// Gradients of <forward(net, input), upstream> w.r.t. every parameter and the input.
std::pair<GradientSet, Eigen::VectorXd> backward(const Mlp& net, const Eigen::VectorXd& input,
                                                 const Eigen::VectorXd& upstream);

/// tau * online + (1 - tau) * target, parameter-wise.
Mlp soft_update(const Mlp& target, const Mlp& online, double tau);
void soft_update_inplace(Mlp& target, const Mlp& online, double tau);

Eigen::VectorXd flatten(const Mlp& net);
void unflatten(Mlp& net, const Eigen::VectorXd& params);
Eigen::VectorXd flatten(const GradientSet& grads);

bool all_finite(const Mlp& net);

/// First-order optimizer minimising a loss given its gradient.
class Optimizer {
public:
    enum class Kind { Sgd, Adam };

    Optimizer() = default;
    Optimizer(Kind kind, double learning_rate) : kind_(kind), lr_(learning_rate) {}

    void step(Mlp& net, const GradientSet& grads);
    double learning_rate() const { return lr_; }

private:
    Kind kind_ = Kind::Sgd;
    double lr_ = 1e-3;
    Eigen::VectorXd m_;
    Eigen::VectorXd v_;
    long t_ = 0;
};

}  // namespace pursuit
