#pragma once

#include <cstddef>
#include <vector>

#include "saved/common.hpp"
#include "saved/rng.hpp"

namespace saved::nn {

enum class OutputMode { deterministic, gaussian_head };

/// Mean and per-dimension variance of an axis-aligned Gaussian.
struct GaussianPrediction {
    Vec mean;
    Vec variance;
};

/// Multilayer perceptron parameters. Hidden layers use swish activations;
/// the output layer is linear. In gaussian_head mode the raw output has
/// dimension 2*d: d means followed by d raw log-variance logits, which the
/// forward pass maps to variances via softplus clamped to [var_min, var_max].
struct MlpParams {
    std::vector<int> layer_sizes;  // [input, hidden..., raw_output]
    std::vector<Mat> weights;      // weights[k] has shape out_k x in_k
    std::vector<Vec> biases;       // biases[k] has length out_k
    OutputMode output_mode = OutputMode::deterministic;
    double var_min = 1e-6;
    double var_max = 1e2;

    int input_dim() const { return layer_sizes.front(); }
    int raw_output_dim() const { return layer_sizes.back(); }
    /// Dimension of the prediction the net makes (half the raw output for a
    /// gaussian head).
    int prediction_dim() const {
        return output_mode == OutputMode::gaussian_head ? raw_output_dim() / 2
                                                        : raw_output_dim();
    }
    std::size_t num_layers() const { return weights.size(); }
    std::size_t parameter_count() const;

    /// Checks layer-dimension compatibility, head-dimension parity and
    /// finiteness of every entry. Throws ShapeError on violation.
    void validate() const;
};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double swish(double z) { return z * sigmoid(z); }

inline double swish_grad(double z) {
    const double s = sigmoid(z);
    return s + z * s * (1.0 - s);
}

inline double softplus(double z) {
    if (z > 30.0) return z;
    if (z < -30.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

/// d softplus / dz.
inline double softplus_grad(double z) { return sigmoid(z); }

/// Variance head transform: softplus of the raw logit, hard-clamped to the
/// configured bounds.
inline double variance_from_raw(double raw, double var_min, double var_max) {
    const double v = softplus(raw);
    if (v < var_min) return var_min;
    if (v > var_max) return var_max;
    return v;
}

/// Subgradient of variance_from_raw (zero where the clamp is active).
inline double variance_from_raw_grad(double raw, double var_min, double var_max) {
    const double v = softplus(raw);
    if (v <= var_min || v >= var_max) return 0.0;
    return softplus_grad(raw);
}

/// Builds an MLP with truncated-normal fan-in initialization
/// (std = 1/sqrt(fan_in), resampled beyond two standard deviations) and zero
/// biases.
MlpParams make_mlp(const std::vector<int>& layer_sizes, OutputMode mode, Rng& rng);

/// Forward pass for a deterministic net. Throws ShapeError on input length
/// mismatch or if the net has a gaussian head.
Vec forward_deterministic(const MlpParams& params, const Vec& input);

/// Forward pass for a gaussian-head net.
GaussianPrediction forward_gaussian(const MlpParams& params, const Vec& input);

/// Batched forward pass; rows of `inputs` are samples. Returns the raw
/// output rows (gaussian head not yet applied).
Mat forward_batch_raw(const MlpParams& params, const Mat& inputs);

/// Splits raw gaussian-head rows into mean and variance matrices.
void split_gaussian_rows(const MlpParams& params, const Mat& raw, Mat& mean, Mat& variance);

}  // namespace saved::nn
