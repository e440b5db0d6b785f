#include "rbmprop/fitters.hpp"

#include "rbmprop/exact.hpp"
#include "rbmprop/numeric.hpp"
#include "rbmprop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbmprop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Precomputed visible outcomes so the Metropolis inner loop avoids decoding
// states per proposal. log g(v) = theta_v.v + sum_j log sum_h exp(h a_j(v)).
struct VisibleTable {
    ModelShape shape;
    MatrixXd vmat;  // n_visible_states x n_visible, coded values

    explicit VisibleTable(const ModelShape& s) : shape(s), vmat(s.n_visible_states(), s.n_visible)
    {
        for (Index vi = 0; vi < s.n_visible_states(); ++vi) vmat.row(vi) = decode_visibles(s, vi);
    }

    VectorXd log_marginal_unnorm(const VectorXd& flat) const
    {
        const Index nv = shape.n_visible, nh = shape.n_hidden;
        const auto visible_main = flat.head(nv);
        const auto hidden_main = flat.segment(nv, nh);
        const Eigen::Map<const RowMajorMatrix> interaction(flat.data() + nv + nh, nv, nh);

        MatrixXd activation = vmat * interaction;
        activation.rowwise() += hidden_main.transpose();
        VectorXd lg = vmat * visible_main;
        for (Index vi = 0; vi < lg.size(); ++vi)
            for (Index j = 0; j < nh; ++j)
                lg(vi) += shape.coding == Coding::PlusMinusOne
                              ? numeric::log_2cosh(activation(vi, j))
                              : numeric::log1p_exp(activation(vi, j));
        return lg;
    }
};

double truncnorm_log_prior_flat(const ModelShape& shape, const VectorXd& flat, const TruncNormalPrior& prior)
{
    const Index n_main = shape.n_visible + shape.n_hidden;
    const double bound_main = prior.trunc_mult * std::sqrt(prior.sigma_main_sq);
    const double bound_int = prior.trunc_mult * std::sqrt(prior.sigma_int_sq);
    double lp = 0.0;
    for (Index k = 0; k < flat.size(); ++k) {
        const bool main = k < n_main;
        if (std::abs(flat(k)) > (main ? bound_main : bound_int)) return kNegInf;
        lp -= flat(k) * flat(k) / (2.0 * (main ? prior.sigma_main_sq : prior.sigma_int_sq));
    }
    return lp;
}

void validate_prior(const TruncNormalPrior& prior)
{
    if (!(prior.sigma_main_sq > 0) || !(prior.sigma_int_sq > 0) || !(prior.trunc_mult > 0))
        throw std::invalid_argument("TruncNormalPrior: variances and trunc_mult must be positive");
    if (prior.sigma_int_sq > prior.sigma_main_sq)
        throw std::invalid_argument("TruncNormalPrior: sigma_int_sq must not exceed sigma_main_sq");
}

MatrixXd impute_hiddens(const ThetaVector& theta, const Dataset& data, Rng& rng)
{
    const ModelShape& shape = theta.shape;
    const double lo = low_value(shape.coding);
    MatrixXd hiddens(data.n, shape.n_hidden);
    for (Index r = 0; r < data.n; ++r) {
        const VectorXd p = hidden_conditional(theta, VectorXd(data.observations.row(r)));
        for (Index j = 0; j < shape.n_hidden; ++j)
            hiddens(r, j) = rng.uniform() < p(j) ? 1.0 : lo;
    }
    return hiddens;
}

// complete-data sufficient sum: visible part is data-constant
StatVector complete_suff_sum(const Dataset& data, const MatrixXd& hiddens)
{
    const ModelShape& shape = data.shape;
    StatVector s(shape.m());
    s.head(shape.n_visible) = data.observations.colwise().sum();
    s.segment(shape.n_visible, shape.n_hidden) = hiddens.colwise().sum();
    const MatrixXd cross = data.observations.transpose() * hiddens;
    for (Index i = 0; i < shape.n_visible; ++i)
        for (Index j = 0; j < shape.n_hidden; ++j)
            s(shape.interaction_index(i, j)) = cross(i, j);
    return s;
}

VectorXd initial_flat(const ModelShape& shape, const TruncNormalPrior& prior, const FitConfig& config, Rng& rng)
{
    VectorXd flat = VectorXd::Zero(shape.m());
    if (config.initial_theta == ThetaInit::PriorDraw) {
        const Index n_main = shape.n_visible + shape.n_hidden;
        for (Index k = 0; k < shape.m(); ++k) {
            const double sigma = std::sqrt(k < n_main ? prior.sigma_main_sq : prior.sigma_int_sq);
            double x;
            do {
                x = sigma * rng.normal();
            } while (std::abs(x) > prior.trunc_mult * sigma);
            flat(k) = x;
        }
    }
    return flat;
}

double geometric_mean(const VectorXd& x)
{
    double acc = 0.0;
    for (Index k = 0; k < x.size(); ++k) acc += std::log(x(k));
    return std::exp(acc / static_cast<double>(x.size()));
}

// Shared Metropolis driver for the two truncated-normal methods. The latent
// variant re-imputes the hidden block every sweep and targets the
// complete-data posterior; the marginal variant never touches hiddens.
PosteriorChain run_adaptive_mh(const Dataset& data, const TruncNormalPrior& prior,
                               const FitConfig& config, const std::string& method, bool latent)
{
    if (data.n < 1) throw std::invalid_argument(method + ": dataset is empty");
    config.validate();
    validate_prior(prior);

    const ModelShape& shape = data.shape;
    const Index m = shape.m();
    const double n = static_cast<double>(data.n);
    const VectorXd counts = data.cell_counts.cast<double>();
    const VisibleTable table(shape);

    Rng rng(config.seed);
    VectorXd flat = initial_flat(shape, prior, config, rng);
    VectorXd scales = VectorXd::Constant(m, config.initial_proposal_scale);
    double block_scale = config.initial_proposal_scale;

    MatrixXd hiddens;
    StatVector suff_sum;

    const auto log_target = [&](const VectorXd& candidate) -> double {
        const double lp = truncnorm_log_prior_flat(shape, candidate, prior);
        if (lp == kNegInf) return kNegInf;
        const VectorXd lg = table.log_marginal_unnorm(candidate);
        const double log_z = numeric::log_sum_exp(lg);
        if (latent) return candidate.dot(suff_sum) - n * log_z + lp;
        return counts.dot(lg) - n * log_z + lp;
    };

    const Index n_stored = config.iterations - config.burn_in;
    PosteriorChain chain;
    chain.method = method;
    chain.shape = shape;
    chain.config = config;
    chain.draws.resize(n_stored, m);
    chain.accept_fraction.resize(n_stored);
    chain.proposal_scale.resize(n_stored);

    double log_target_current = latent ? 0.0 : log_target(flat);
    double accepted_post = 0.0, proposals_post = 0.0;

    for (Index t = 1; t <= config.iterations; ++t) {
        if (latent) {
            const ThetaVector theta = ThetaVector::from_flat(shape, flat);
            hiddens = impute_hiddens(theta, data, rng);
            suff_sum = complete_suff_sum(data, hiddens);
            log_target_current = log_target(flat);
        }

        Index accepted = 0, proposals = 0;
        if (config.proposal == ProposalKind::Componentwise) {
            for (Index k = 0; k < m; ++k) {
                for (Index hit = 0; hit < config.hits_per_coordinate; ++hit) {
                    VectorXd candidate = flat;
                    candidate(k) += scales(k) * rng.normal();
                    const double lt = log_target(candidate);
                    const bool accept = lt > kNegInf && std::log(rng.uniform()) < lt - log_target_current;
                    if (accept) {
                        flat = candidate;
                        log_target_current = lt;
                        ++accepted;
                    }
                    ++proposals;
                    if (t <= config.burn_in) scales(k) = adaptive_scale_update(scales(k), accept, t, config);
                }
            }
        } else {
            VectorXd candidate(m);
            for (Index k = 0; k < m; ++k) candidate(k) = flat(k) + block_scale * rng.normal();
            const double lt = log_target(candidate);
            const bool accept = lt > kNegInf && std::log(rng.uniform()) < lt - log_target_current;
            if (accept) {
                flat = candidate;
                log_target_current = lt;
                ++accepted;
            }
            ++proposals;
            if (t <= config.burn_in) block_scale = adaptive_scale_update(block_scale, accept, t, config);
        }

        if (t > config.burn_in) {
            const Index row = t - config.burn_in - 1;
            chain.draws.row(row) = flat;
            chain.accept_fraction(row) = static_cast<double>(accepted) / static_cast<double>(proposals);
            chain.proposal_scale(row) =
                config.proposal == ProposalKind::Componentwise ? geometric_mean(scales) : block_scale;
            accepted_post += static_cast<double>(accepted);
            proposals_post += static_cast<double>(proposals);
        }
    }

    chain.acceptance_rate = accepted_post / proposals_post;
    chain.final_proposal_scale =
        config.proposal == ProposalKind::Componentwise ? geometric_mean(scales) : block_scale;
    if (latent) chain.final_hiddens = hiddens;
    return chain;
}

}  // namespace

TruncNormalPrior TruncNormalPrior::table_defaults(const ModelShape& shape)
{
    TruncNormalPrior prior;
    prior.sigma_main_sq = 1.0 / static_cast<double>(shape.n_visible + shape.n_hidden);
    // 1/(n_V n_H) exceeds the main variance when either layer has one node;
    // clamp so interactions never get the looser prior
    prior.sigma_int_sq =
        std::min(1.0 / static_cast<double>(shape.n_visible * shape.n_hidden), prior.sigma_main_sq);
    prior.trunc_mult = 3.0;
    return prior;
}

void FitConfig::validate() const
{
    if (iterations < 1) throw std::invalid_argument("FitConfig: iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations)
        throw std::invalid_argument("FitConfig: need 0 <= burn_in < iterations");
    if (!(target_acceptance > 0) || !(target_acceptance < 1))
        throw std::invalid_argument("FitConfig: target_acceptance must lie in (0, 1)");
    if (!(adaptation_decay > 0)) throw std::invalid_argument("FitConfig: adaptation_decay must be positive");
    if (!(initial_proposal_scale > 0))
        throw std::invalid_argument("FitConfig: initial_proposal_scale must be positive");
    if (hits_per_coordinate < 1) throw std::invalid_argument("FitConfig: hits_per_coordinate must be >= 1");
}

ThetaVector trick_full_conditional_theta(const ModelShape& shape, const StatVector& suff_sum,
                                         double C1, double C2, std::uint64_t seed)
{
    if (!(C1 > 0) || !(C2 > 0))
        throw std::invalid_argument("trick_full_conditional_theta: C1 and C2 must be positive");
    if (suff_sum.size() != shape.m())
        throw std::invalid_argument("trick_full_conditional_theta: suff_sum dimension mismatch");
    Rng rng(seed);
    const Index n_main = shape.n_visible + shape.n_hidden;
    VectorXd flat(shape.m());
    for (Index k = 0; k < shape.m(); ++k) {
        const double c = k < n_main ? C1 : C2;
        flat(k) = c * suff_sum(k) + std::sqrt(c) * rng.normal();
    }
    return ThetaVector::from_flat(shape, flat);
}

MatrixXd gibbs_impute_hiddens(const ThetaVector& theta, const Dataset& data, std::uint64_t seed)
{
    require_same_shape(theta.shape, data.shape, "gibbs_impute_hiddens");
    Rng rng(seed);
    return impute_hiddens(theta, data, rng);
}

double truncnorm_log_prior(const ThetaVector& theta, const TruncNormalPrior& prior)
{
    validate_prior(prior);
    return truncnorm_log_prior_flat(theta.shape, theta.flat(), prior);
}

double adaptive_scale_update(double scale, bool accepted, Index iteration, const FitConfig& config)
{
    if (iteration < 1) throw std::invalid_argument("adaptive_scale_update: iteration must be >= 1");
    const double eta = std::pow(static_cast<double>(iteration), -config.adaptation_decay);
    return scale * std::exp(eta * ((accepted ? 1.0 : 0.0) - config.target_acceptance));
}

double marginal_log_likelihood(const ThetaVector& theta, const Dataset& data)
{
    require_same_shape(theta.shape, data.shape, "marginal_log_likelihood");
    const VectorXd lm = log_visible_marginal(theta);
    return data.cell_counts.cast<double>().dot(lm);
}

PosteriorChain fit_bwtplv(const Dataset& data, const TrickPrior& prior, const FitConfig& config)
{
    if (data.n < 1) throw std::invalid_argument("fit_bwtplv: dataset is empty");
    if (!(prior.C > 0)) throw std::invalid_argument("fit_bwtplv: C must be positive");
    config.validate();

    const ModelShape& shape = data.shape;
    const double n = static_cast<double>(data.n);
    const double C1 = prior.C / (n * static_cast<double>(shape.n_visible + shape.n_hidden));
    const double C2 = prior.C / (n * static_cast<double>(shape.n_visible * shape.n_hidden));
    const Index n_main = shape.n_visible + shape.n_hidden;

    Rng rng(config.seed);
    VectorXd flat = VectorXd::Zero(shape.m());
    if (config.initial_theta == ThetaInit::PriorDraw) {
        for (Index k = 0; k < shape.m(); ++k)
            flat(k) = std::sqrt(k < n_main ? C1 : C2) * rng.normal();
    }

    const Index n_stored = config.iterations - config.burn_in;
    PosteriorChain chain;
    chain.method = "bwtplv";
    chain.shape = shape;
    chain.config = config;
    chain.draws.resize(n_stored, shape.m());
    chain.accept_fraction = VectorXd::Ones(n_stored);
    chain.proposal_scale = VectorXd::Zero(n_stored);

    MatrixXd hiddens;
    for (Index t = 1; t <= config.iterations; ++t) {
        const ThetaVector theta = ThetaVector::from_flat(shape, flat);
        hiddens = impute_hiddens(theta, data, rng);
        const StatVector suff_sum = complete_suff_sum(data, hiddens);
        for (Index k = 0; k < shape.m(); ++k) {
            const double c = k < n_main ? C1 : C2;
            flat(k) = c * suff_sum(k) + std::sqrt(c) * rng.normal();
        }
        if (t > config.burn_in) chain.draws.row(t - config.burn_in - 1) = flat;
    }

    chain.acceptance_rate = 1.0;  // Gibbs moves are always accepted
    chain.final_proposal_scale = 0.0;
    chain.final_hiddens = hiddens;
    return chain;
}

PosteriorChain fit_bwtnlv(const Dataset& data, const TruncNormalPrior& prior, const FitConfig& config)
{
    return run_adaptive_mh(data, prior, config, "bwtnlv", /*latent=*/true);
}

PosteriorChain fit_bwtnml(const Dataset& data, const TruncNormalPrior& prior, const FitConfig& config)
{
    return run_adaptive_mh(data, prior, config, "bwtnml", /*latent=*/false);
}

}  // namespace rbmprop
