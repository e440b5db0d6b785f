#pragma once

#include "rbmprop/model.hpp"

#include <cstdint>

namespace rbmprop {

// Fully enumerated model at one theta. State indexing: v_1 least significant
// bit, visibles before hiddens, set bit = high value.
struct ExactDistribution {
    ModelShape shape;
    VectorXd joint;             // 2^(n_visible+n_hidden)
    VectorXd visible_marginal;  // 2^n_visible, summed over hidden completions
    double log_gamma = 0.0;
};

// Q_theta(x): interactions plus visible and hidden main effects.
double neg_potential(const ThetaVector& theta, const NodeState& state);

// log gamma(theta) over all joint states, accumulated in the log domain.
double partition_log(const ThetaVector& theta);

ExactDistribution exact_distribution(const ThetaVector& theta);

// Normalized log P(v) for every visible outcome, with the hidden layer summed
// out analytically per outcome. Stays finite where the probabilities underflow,
// which the instability diagnostics rely on.
VectorXd log_visible_marginal(const ThetaVector& theta);

// t(x) in the canonical layout (visibles, hiddens, interactions row-major).
StatVector sufficient_statistic(const ModelShape& shape, const NodeState& state);

// All t(x) stacked, row per joint state index.
MatrixXd statistic_table(const ModelShape& shape);

// mu(theta) = E_theta t(X) by exact enumeration.
StatVector mean_statistic(const ThetaVector& theta);

// P(H_j = high | v) for each hidden node; hiddens are independent given v.
VectorXd hidden_conditional(const ThetaVector& theta, const VectorXd& visibles);

// P(V_i = high | h) for each visible node.
VectorXd visible_conditional(const ThetaVector& theta, const VectorXd& hiddens);

// n independent draws from the exact visible marginal via inverse CDF.
Dataset sample_visibles_exact(const ThetaVector& theta, Index n, std::uint64_t seed);

}  // namespace rbmprop
