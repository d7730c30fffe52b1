#pragma once

#include <vector>

#include "saved/nn/mlp.hpp"

namespace saved::nn {

enum class LossKind { nll, mse };

/// Adam optimizer state; moment shapes mirror the parameter shapes exactly.
struct AdamState {
    long step_count = 0;
    std::vector<Mat> m_weights, v_weights;
    std::vector<Vec> m_biases, v_biases;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(const MlpParams& params, double learning_rate);
};

/// Negative log-likelihood of `target` under an axis-aligned Gaussian, with
/// the (2*pi) constant dropped:
///   sum_d [ (target_d - mean_d)^2 / (2 var_d) + log(var_d) / 2 ].
/// Throws std::domain_error on non-positive variance.
double gaussian_nll(const GaussianPrediction& pred, const Vec& target);

/// Sum of squared errors over prediction dimensions.
double mse_loss(const Vec& pred, const Vec& target);

struct Gradients {
    std::vector<Mat> weights;
    std::vector<Vec> biases;

    static Gradients zeros_like(const MlpParams& params);
};

/// Reverse-mode gradient of the batch-mean loss through the whole network.
/// `targets` rows have prediction_dim() columns. Returns the batch-mean
/// loss. Throws TrainingDivergence (naming the layer) on non-finite
/// gradients.
double backward(const MlpParams& params, const Mat& inputs, const Mat& targets,
                LossKind loss, Gradients& grads);

/// Applies one Adam update in place.
void adam_step(MlpParams& params, AdamState& adam, const Gradients& grads);

/// backward + one Adam update; returns the pre-update batch-mean loss.
double backward_and_step(MlpParams& params, AdamState& adam, const Mat& inputs,
                         const Mat& targets, LossKind loss);

/// Batch-mean loss without touching parameters (evaluation only).
double batch_loss(const MlpParams& params, const Mat& inputs, const Mat& targets, LossKind loss);

}  // namespace saved::nn
