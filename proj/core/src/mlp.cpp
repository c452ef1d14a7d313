#include "pursuit/mlp.hpp"

#include <cmath>

#include "pursuit/errors.hpp"

namespace pursuit {

Eigen::Index Mlp::parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

bool Mlp::same_shape(const Mlp& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& a = layers[k];
        const auto& b = other.layers[k];
        if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() || a.activation != b.activation) {
            return false;
        }
    }
    return true;
}

GradientSet GradientSet::zeros_like(const Mlp& net) {
    GradientSet g;
    for (const auto& l : net.layers) {
        g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    return g;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
    for (std::size_t k = 0; k < weight.size(); ++k) {
        weight[k] += other.weight[k];
        bias[k] += other.bias[k];
    }
    return *this;
}

Mlp make_mlp(std::span<const int> widths, Activation hidden, Activation output, Rng& rng) {
    if (widths.size() < 2) {
        throw ShapeError("make_mlp: need at least input and output widths");
    }
    Mlp net;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const int in = widths[k];
        const int out = widths[k + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        Layer layer;
        layer.weight.resize(out, in);
        layer.bias.resize(out);
        // Row-major fill order keeps initialisation independent of Eigen's storage order.
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) layer.weight(r, c) = uniform(rng, -bound, bound);
        }
        for (int r = 0; r < out; ++r) layer.bias(r) = uniform(rng, -bound, bound);
        layer.activation = (k + 2 == widths.size()) ? output : hidden;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

void activate(Eigen::MatrixXd& z, Activation act) {
    switch (act) {
        case Activation::Tanh: z = z.array().tanh(); break;
        case Activation::Relu: z = z.array().max(0.0); break;
        case Activation::Linear: break;
    }
}

// Multiplies `grad` in place by the activation derivative, expressed through the layer output.
void scale_by_derivative(Eigen::MatrixXd& grad, const Eigen::MatrixXd& output, Activation act) {
    switch (act) {
        case Activation::Tanh: grad.array() *= (1.0 - output.array().square()); break;
        case Activation::Relu: grad.array() *= (output.array() > 0.0).cast<double>(); break;
        case Activation::Linear: break;
    }
}

}  // namespace

Eigen::MatrixXd forward_batch(const Mlp& net, const Eigen::MatrixXd& inputs, ForwardTrace* trace) {
    if (net.layers.empty() || inputs.rows() != net.input_dim()) {
        throw ShapeError("forward: input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                         std::to_string(net.layers.empty() ? 0 : net.input_dim()));
    }
    if (trace) {
        trace->values.clear();
        trace->values.push_back(inputs);
    }
    Eigen::MatrixXd x = inputs;
    for (const auto& layer : net.layers) {
        Eigen::MatrixXd z = layer.weight * x;
        z.colwise() += layer.bias;
        activate(z, layer.activation);
        x = std::move(z);
        if (trace) trace->values.push_back(x);
    }
    return x;
}

Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input) {
    if (net.layers.empty() || input.size() != net.input_dim()) {
        throw ShapeError("forward: input dimension mismatch");
    }
    Eigen::VectorXd x = input;
    for (const auto& layer : net.layers) {
        Eigen::MatrixXd z = layer.weight * x + layer.bias;
        activate(z, layer.activation);
        x = z;
    }
    return x;
}

Backprop backward_batch(const Mlp& net, const ForwardTrace& trace, const Eigen::MatrixXd& upstream,
                        const Eigen::MatrixXd* output_pre_grad) {
    const std::size_t depth = net.layers.size();
    if (trace.values.size() != depth + 1 || upstream.rows() != net.output_dim() ||
        upstream.cols() != trace.values.back().cols()) {
        throw ShapeError("backward: upstream/trace shape mismatch");
    }
    Backprop out;
    out.grads.weight.resize(depth);
    out.grads.bias.resize(depth);
    Eigen::MatrixXd delta = upstream;
    for (std::size_t k = depth; k-- > 0;) {
        const Layer& layer = net.layers[k];
        scale_by_derivative(delta, trace.values[k + 1], layer.activation);
        if (k + 1 == depth && output_pre_grad) delta += *output_pre_grad;
        out.grads.weight[k].noalias() = delta * trace.values[k].transpose();
        out.grads.bias[k] = delta.rowwise().sum();
        Eigen::MatrixXd prev = layer.weight.transpose() * delta;
        delta = std::move(prev);
    }
    out.input_grad = std::move(delta);
    return out;
}

std::pair<GradientSet, Eigen::VectorXd> backward(const Mlp& net, const Eigen::VectorXd& input,
                                                 const Eigen::VectorXd& upstream) {
    if (upstream.size() != net.output_dim()) {
        throw ShapeError("backward: upstream dimension mismatch");
    }
    ForwardTrace trace;
    forward_batch(net, input, &trace);
    Backprop bp = backward_batch(net, trace, upstream);
    return {std::move(bp.grads), bp.input_grad.col(0)};
}

Eigen::MatrixXd output_pre_activation(const Mlp& net, const ForwardTrace& trace) {
    const Layer& last = net.layers.back();
    return (last.weight * trace.values[trace.values.size() - 2]).colwise() + last.bias;
}

double clip_global_norm(GradientSet& grads, double max_norm) {
    double sq = 0.0;
    for (std::size_t k = 0; k < grads.weight.size(); ++k) {
        sq += grads.weight[k].squaredNorm() + grads.bias[k].squaredNorm();
    }
    const double total = std::sqrt(sq);
    if (max_norm > 0.0 && total > max_norm) {
        const double s = max_norm / total;
        for (std::size_t k = 0; k < grads.weight.size(); ++k) {
            grads.weight[k] *= s;
            grads.bias[k] *= s;
        }
    }
    return total;
}

Mlp soft_update(const Mlp& target, const Mlp& online, double tau) {
    Mlp out = target;
    soft_update_inplace(out, online, tau);
    return out;
}

void soft_update_inplace(Mlp& target, const Mlp& online, double tau) {
    if (!target.same_shape(online)) {
        throw ShapeError("soft_update: networks are not shape-congruent");
    }
    for (std::size_t k = 0; k < target.layers.size(); ++k) {
        auto& t = target.layers[k];
        const auto& o = online.layers[k];
        t.weight = tau * o.weight + (1.0 - tau) * t.weight;
        t.bias = tau * o.bias + (1.0 - tau) * t.bias;
    }
}

Eigen::VectorXd flatten(const Mlp& net) {
    Eigen::VectorXd out(net.parameter_count());
    Eigen::Index at = 0;
    for (const auto& l : net.layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out(at++) = l.weight(r, c);
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out(at++) = l.bias(r);
    }
    return out;
}

void unflatten(Mlp& net, const Eigen::VectorXd& params) {
    if (params.size() != net.parameter_count()) {
        throw ShapeError("unflatten: parameter count mismatch");
    }
    Eigen::Index at = 0;
    for (auto& l : net.layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = params(at++);
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = params(at++);
    }
}

Eigen::VectorXd flatten(const GradientSet& grads) {
    Eigen::Index n = 0;
    for (std::size_t k = 0; k < grads.weight.size(); ++k) n += grads.weight[k].size() + grads.bias[k].size();
    Eigen::VectorXd out(n);
    Eigen::Index at = 0;
    for (std::size_t k = 0; k < grads.weight.size(); ++k) {
        const auto& w = grads.weight[k];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) out(at++) = w(r, c);
        }
        for (Eigen::Index r = 0; r < grads.bias[k].size(); ++r) out(at++) = grads.bias[k](r);
    }
    return out;
}

bool all_finite(const Mlp& net) {
    for (const auto& l : net.layers) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

void Optimizer::step(Mlp& net, const GradientSet& grads) {
    if (kind_ == Kind::Sgd) {
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            net.layers[k].weight -= lr_ * grads.weight[k];
            net.layers[k].bias -= lr_ * grads.bias[k];
        }
        return;
    }
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    const Eigen::VectorXd g = flatten(grads);
    if (m_.size() != g.size()) {
        m_ = Eigen::VectorXd::Zero(g.size());
        v_ = Eigen::VectorXd::Zero(g.size());
        t_ = 0;
    }
    ++t_;
    m_ = beta1 * m_ + (1.0 - beta1) * g;
    v_ = beta2 * v_ + (1.0 - beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    Eigen::VectorXd params = flatten(net);
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
    unflatten(net, params);
}

}  // namespace pursuit
