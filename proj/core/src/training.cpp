#include "saved/nn/training.hpp"

#include <cmath>
#include <string>

namespace saved::nn {

AdamState AdamState::init(const MlpParams& params, double learning_rate) {
    require(learning_rate > 0.0, "adam: learning rate must be positive");
    AdamState s;
    s.learning_rate = learning_rate;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        s.m_weights.push_back(Mat::Zero(params.weights[k].rows(), params.weights[k].cols()));
        s.v_weights.push_back(Mat::Zero(params.weights[k].rows(), params.weights[k].cols()));
        s.m_biases.push_back(Vec::Zero(params.biases[k].size()));
        s.v_biases.push_back(Vec::Zero(params.biases[k].size()));
    }
    return s;
}

double gaussian_nll(const GaussianPrediction& pred, const Vec& target) {
    require(pred.mean.size() == target.size() && pred.variance.size() == target.size(),
            "gaussian_nll: dimension mismatch");
    if ((pred.variance.array() <= 0.0).any())
        throw std::domain_error("gaussian_nll: non-positive variance");
    const auto diff = (target - pred.mean).array();
    return (diff.square() / (2.0 * pred.variance.array()) + 0.5 * pred.variance.array().log())
        .sum();
}

double mse_loss(const Vec& pred, const Vec& target) {
    require(pred.size() == target.size(), "mse_loss: dimension mismatch");
    return (pred - target).squaredNorm();
}

Gradients Gradients::zeros_like(const MlpParams& params) {
    Gradients g;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        g.weights.push_back(Mat::Zero(params.weights[k].rows(), params.weights[k].cols()));
        g.biases.push_back(Vec::Zero(params.biases[k].size()));
    }
    return g;
}

namespace {

// Loss value plus gradient with respect to the raw output rows.
double loss_and_output_grad(const MlpParams& params, const Mat& raw, const Mat& targets,
                            LossKind loss, Mat& grad_raw) {
    const Eigen::Index batch = raw.rows();
    const int d = params.prediction_dim();
    require(targets.cols() == d, "training: target dimension mismatch");
    grad_raw.setZero(raw.rows(), raw.cols());
    double total = 0.0;

    if (loss == LossKind::mse) {
        // Gaussian-head nets regress the mean columns; variance logits get
        // no gradient under mse.
        const auto diff = raw.leftCols(d) - targets;
        total = diff.squaredNorm();
        grad_raw.leftCols(d) = 2.0 * diff / static_cast<double>(batch);
        return total / static_cast<double>(batch);
    }

    require(params.output_mode == OutputMode::gaussian_head,
            "training: nll loss requires a gaussian head");
    for (Eigen::Index i = 0; i < batch; ++i) {
        for (int j = 0; j < d; ++j) {
            const double mu = raw(i, j);
            const double rv = raw(i, d + j);
            const double var = variance_from_raw(rv, params.var_min, params.var_max);
            const double diff = targets(i, j) - mu;
            total += diff * diff / (2.0 * var) + 0.5 * std::log(var);
            grad_raw(i, j) = (mu - targets(i, j)) / var;
            const double dvar = -diff * diff / (2.0 * var * var) + 0.5 / var;
            grad_raw(i, d + j) = dvar * variance_from_raw_grad(rv, params.var_min, params.var_max);
        }
    }
    grad_raw /= static_cast<double>(batch);
    return total / static_cast<double>(batch);
}

}  // namespace

double backward(const MlpParams& params, const Mat& inputs, const Mat& targets,
                LossKind loss, Gradients& grads) {
    require(inputs.rows() > 0, "training: empty batch");
    require(inputs.rows() == targets.rows(), "training: batch size mismatch");
    if (inputs.cols() != params.input_dim()) throw ShapeError("training: input dimension mismatch");

    const std::size_t n_layers = params.num_layers();
    std::vector<Mat> acts(n_layers + 1);  // acts[0] = inputs, acts[k+1] = layer k output
    std::vector<Mat> pre(n_layers);       // pre-activations
    acts[0] = inputs;
    for (std::size_t k = 0; k < n_layers; ++k) {
        pre[k] = acts[k] * params.weights[k].transpose();
        pre[k].rowwise() += params.biases[k].transpose();
        if (k + 1 < n_layers)
            acts[k + 1] = pre[k].unaryExpr([](double v) { return swish(v); });
        else
            acts[k + 1] = pre[k];
    }

    Mat delta;  // gradient w.r.t. the current layer's pre-activation
    const double loss_value = loss_and_output_grad(params, acts[n_layers], targets, loss, delta);

    if (grads.weights.size() != n_layers) grads = Gradients::zeros_like(params);
    for (std::size_t k = n_layers; k-- > 0;) {
        grads.weights[k] = delta.transpose() * acts[k];
        grads.biases[k] = delta.colwise().sum().transpose();
        if (!grads.weights[k].allFinite() || !grads.biases[k].allFinite())
            throw TrainingDivergence("training diverged: non-finite gradient at layer " +
                                     std::to_string(k));
        if (k > 0) {
            delta = (delta * params.weights[k])
                        .cwiseProduct(pre[k - 1].unaryExpr([](double v) { return swish_grad(v); }));
        }
    }
    return loss_value;
}

void adam_step(MlpParams& params, AdamState& adam, const Gradients& grads) {
    adam.step_count += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        adam.m_weights[k] = adam.beta1 * adam.m_weights[k] + (1.0 - adam.beta1) * grads.weights[k];
        adam.v_weights[k] = adam.beta2 * adam.v_weights[k] +
                            (1.0 - adam.beta2) * grads.weights[k].cwiseProduct(grads.weights[k]);
        params.weights[k].array() -=
            adam.learning_rate * (adam.m_weights[k].array() / bc1) /
            ((adam.v_weights[k].array() / bc2).sqrt() + adam.epsilon);

        adam.m_biases[k] = adam.beta1 * adam.m_biases[k] + (1.0 - adam.beta1) * grads.biases[k];
        adam.v_biases[k] = adam.beta2 * adam.v_biases[k] +
                           (1.0 - adam.beta2) * grads.biases[k].cwiseProduct(grads.biases[k]);
        params.biases[k].array() -= adam.learning_rate * (adam.m_biases[k].array() / bc1) /
                                    ((adam.v_biases[k].array() / bc2).sqrt() + adam.epsilon);
    }
}

double backward_and_step(MlpParams& params, AdamState& adam, const Mat& inputs,
                         const Mat& targets, LossKind loss) {
    Gradients grads;
    const double loss_value = backward(params, inputs, targets, loss, grads);
    adam_step(params, adam, grads);
    return loss_value;
}

double batch_loss(const MlpParams& params, const Mat& inputs, const Mat& targets, LossKind loss) {
    const Mat raw = forward_batch_raw(params, inputs);
    Mat scratch;
    return loss_and_output_grad(params, raw, targets, loss, scratch);
}

}  // namespace saved::nn
