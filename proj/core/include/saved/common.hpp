#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace saved {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when an input vector does not match the shape a model expects.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a loss or gradient becomes NaN/Inf during training.
struct TrainingDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on malformed or inconsistent configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on malformed files (checkpoints, demo files, metrics).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace saved
