#include "rbmprop/exact.hpp"

#include "rbmprop/numeric.hpp"
#include "rbmprop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbmprop {

double neg_potential(const ThetaVector& theta, const NodeState& state)
{
    const ModelShape& shape = theta.shape;
    require_visibles(shape, state.visibles, "neg_potential");
    require_hiddens(shape, state.hiddens, "neg_potential");
    const double interaction_term = state.visibles.dot(theta.interaction * state.hiddens);
    return interaction_term + theta.visible_main.dot(state.visibles) + theta.hidden_main.dot(state.hiddens);
}

namespace {

// log sum_{h in C} exp(h * a)
double hidden_sum_log(Coding coding, double a)
{
    return coding == Coding::PlusMinusOne ? numeric::log_2cosh(a) : numeric::log1p_exp(a);
}

// log of the unnormalized marginal, sum over hidden completions done per term
VectorXd log_marginal_unnormalized(const ThetaVector& theta)
{
    const ModelShape& shape = theta.shape;
    VectorXd out(shape.n_visible_states());
    for (Index vi = 0; vi < shape.n_visible_states(); ++vi) {
        const VectorXd v = decode_visibles(shape, vi);
        const VectorXd activation = theta.hidden_main + theta.interaction.transpose() * v;
        double acc = theta.visible_main.dot(v);
        for (Index j = 0; j < shape.n_hidden; ++j)
            acc += hidden_sum_log(shape.coding, activation(j));
        out(vi) = acc;
    }
    return out;
}

}  // namespace

double partition_log(const ThetaVector& theta)
{
    const ModelShape& shape = theta.shape;
    VectorXd q(shape.n_joint_states());
    for (Index s = 0; s < shape.n_joint_states(); ++s)
        q(s) = neg_potential(theta, decode_state(shape, s));
    return numeric::log_sum_exp(q);
}

ExactDistribution exact_distribution(const ThetaVector& theta)
{
    const ModelShape& shape = theta.shape;
    ExactDistribution dist;
    dist.shape = shape;

    VectorXd q(shape.n_joint_states());
    for (Index s = 0; s < shape.n_joint_states(); ++s)
        q(s) = neg_potential(theta, decode_state(shape, s));
    dist.log_gamma = numeric::log_sum_exp(q);

    dist.joint = (q.array() - dist.log_gamma).exp();
    dist.visible_marginal = VectorXd::Zero(shape.n_visible_states());
    const Index visible_mask = shape.n_visible_states() - 1;
    for (Index s = 0; s < shape.n_joint_states(); ++s)
        dist.visible_marginal(s & visible_mask) += dist.joint(s);
    return dist;
}

VectorXd log_visible_marginal(const ThetaVector& theta)
{
    VectorXd lg = log_marginal_unnormalized(theta);
    return lg.array() - numeric::log_sum_exp(lg);
}

StatVector sufficient_statistic(const ModelShape& shape, const NodeState& state)
{
    require_visibles(shape, state.visibles, "sufficient_statistic");
    require_hiddens(shape, state.hiddens, "sufficient_statistic");
    StatVector t(shape.m());
    t.head(shape.n_visible) = state.visibles;
    t.segment(shape.n_visible, shape.n_hidden) = state.hiddens;
    for (Index i = 0; i < shape.n_visible; ++i)
        for (Index j = 0; j < shape.n_hidden; ++j)
            t(shape.interaction_index(i, j)) = state.visibles(i) * state.hiddens(j);
    return t;
}

MatrixXd statistic_table(const ModelShape& shape)
{
    MatrixXd table(shape.n_joint_states(), shape.m());
    for (Index s = 0; s < shape.n_joint_states(); ++s)
        table.row(s) = sufficient_statistic(shape, decode_state(shape, s));
    return table;
}

StatVector mean_statistic(const ThetaVector& theta)
{
    const ExactDistribution dist = exact_distribution(theta);
    return statistic_table(theta.shape).transpose() * dist.joint;
}

namespace {

VectorXd layer_conditional(Coding coding, const VectorXd& activation)
{
    const double span = high_value(coding) - low_value(coding);
    VectorXd p(activation.size());
    for (Index k = 0; k < activation.size(); ++k)
        p(k) = numeric::logistic(span * activation(k));
    return p;
}

}  // namespace

VectorXd hidden_conditional(const ThetaVector& theta, const VectorXd& visibles)
{
    require_visibles(theta.shape, visibles, "hidden_conditional");
    return layer_conditional(theta.shape.coding, theta.hidden_main + theta.interaction.transpose() * visibles);
}

VectorXd visible_conditional(const ThetaVector& theta, const VectorXd& hiddens)
{
    require_hiddens(theta.shape, hiddens, "visible_conditional");
    return layer_conditional(theta.shape.coding, theta.visible_main + theta.interaction * hiddens);
}

Dataset sample_visibles_exact(const ThetaVector& theta, Index n, std::uint64_t seed)
{
    if (n < 1) throw std::invalid_argument("sample_visibles_exact: n must be >= 1");
    const ModelShape& shape = theta.shape;
    const ExactDistribution dist = exact_distribution(theta);

    VectorXd cdf(dist.visible_marginal.size());
    double acc = 0.0;
    for (Index i = 0; i < cdf.size(); ++i) {
        acc += dist.visible_marginal(i);
        cdf(i) = acc;
    }
    cdf(cdf.size() - 1) = 1.0;

    Rng rng(seed);
    MatrixXd obs(n, shape.n_visible);
    for (Index r = 0; r < n; ++r) {
        const double u = rng.uniform();
        const double* begin = cdf.data();
        const double* it = std::upper_bound(begin, begin + cdf.size(), u);
        const Index cell = std::min<Index>(it - begin, cdf.size() - 1);
        obs.row(r) = decode_visibles(shape, cell);
    }
    return make_dataset(shape, std::move(obs));
}

}  // namespace rbmprop
