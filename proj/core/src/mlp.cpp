#include "saved/nn/mlp.hpp"

#include <cmath>
#include <sstream>

namespace saved::nn {

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k)
        n += static_cast<std::size_t>(weights[k].size()) + static_cast<std::size_t>(biases[k].size());
    return n;
}

void MlpParams::validate() const {
    if (layer_sizes.size() < 2) throw ShapeError("mlp: need at least input and output layer sizes");
    if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
        throw ShapeError("mlp: layer count mismatch between sizes, weights and biases");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows() != layer_sizes[k + 1] || weights[k].cols() != layer_sizes[k]) {
            std::ostringstream os;
            os << "mlp: weights[" << k << "] has shape " << weights[k].rows() << "x"
               << weights[k].cols() << ", expected " << layer_sizes[k + 1] << "x" << layer_sizes[k];
            throw ShapeError(os.str());
        }
        if (biases[k].size() != layer_sizes[k + 1])
            throw ShapeError("mlp: bias length mismatch at layer " + std::to_string(k));
        if (!weights[k].allFinite() || !biases[k].allFinite())
            throw ShapeError("mlp: non-finite parameter at layer " + std::to_string(k));
    }
    if (output_mode == OutputMode::gaussian_head && raw_output_dim() % 2 != 0)
        throw ShapeError("mlp: gaussian head requires even raw output dimension");
}

MlpParams make_mlp(const std::vector<int>& layer_sizes, OutputMode mode, Rng& rng) {
    require(layer_sizes.size() >= 2, "make_mlp: need at least two layer sizes");
    for (int s : layer_sizes) require(s > 0, "make_mlp: layer sizes must be positive");

    MlpParams p;
    p.layer_sizes = layer_sizes;
    p.output_mode = mode;
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        const int fan_in = layer_sizes[k];
        const int fan_out = layer_sizes[k + 1];
        const double std = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Mat w(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i) {
            for (int j = 0; j < fan_in; ++j) {
                double z = rng.normal();
                while (std::abs(z) > 2.0) z = rng.normal();  // truncate at 2 std
                w(i, j) = z * std;
            }
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Vec::Zero(fan_out));
    }
    p.validate();
    return p;
}

namespace {

void check_input(const MlpParams& params, Eigen::Index cols) {
    if (cols != params.input_dim()) {
        std::ostringstream os;
        os << "mlp forward: input has dimension " << cols << ", expected " << params.input_dim();
        throw ShapeError(os.str());
    }
}

}  // namespace

Mat forward_batch_raw(const MlpParams& params, const Mat& inputs) {
    check_input(params, inputs.cols());
    Mat a = inputs;
    const std::size_t n_layers = params.num_layers();
    for (std::size_t k = 0; k < n_layers; ++k) {
        Mat z = a * params.weights[k].transpose();
        z.rowwise() += params.biases[k].transpose();
        if (k + 1 < n_layers) {
            a = z.unaryExpr([](double v) { return swish(v); });
        } else {
            a = std::move(z);  // output layer is linear
        }
    }
    return a;
}

void split_gaussian_rows(const MlpParams& params, const Mat& raw, Mat& mean, Mat& variance) {
    const int d = params.prediction_dim();
    mean = raw.leftCols(d);
    variance = raw.rightCols(d).unaryExpr(
        [&](double r) { return variance_from_raw(r, params.var_min, params.var_max); });
}

Vec forward_deterministic(const MlpParams& params, const Vec& input) {
    require(params.output_mode == OutputMode::deterministic,
            "forward_deterministic: net has a gaussian head");
    return forward_batch_raw(params, input.transpose()).row(0).transpose();
}

GaussianPrediction forward_gaussian(const MlpParams& params, const Vec& input) {
    require(params.output_mode == OutputMode::gaussian_head,
            "forward_gaussian: net is deterministic");
    const Mat raw = forward_batch_raw(params, input.transpose());
    Mat mean, var;
    split_gaussian_rows(params, raw, mean, var);
    return GaussianPrediction{mean.row(0).transpose(), var.row(0).transpose()};
}

}  // namespace saved::nn
