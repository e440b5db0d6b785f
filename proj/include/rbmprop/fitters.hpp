#pragma once

#include "rbmprop/model.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace rbmprop {

// Prior that cancels gamma(theta)^n so the theta full conditional is Gaussian.
// C splits into C1 = C / (n (n_V + n_H)) and C2 = C / (n n_V n_H).
struct TrickPrior {
    double C = 1.0;
};

// Independent normals per block, truncated componentwise at trunc_mult sigma.
struct TruncNormalPrior {
    double sigma_main_sq = 1.0;
    double sigma_int_sq = 1.0;
    double trunc_mult = 3.0;

    // Shrinks interactions more than mains and tightens with model size.
    static TruncNormalPrior table_defaults(const ModelShape& shape);
};

using PriorSpec = std::variant<TrickPrior, TruncNormalPrior>;

enum class ThetaInit { Zeros, PriorDraw };
enum class ProposalKind { Componentwise, Block };

struct FitConfig {
    Index iterations = 1050;
    Index burn_in = 50;
    double target_acceptance = 0.234;
    double adaptation_decay = 0.6;
    ThetaInit initial_theta = ThetaInit::Zeros;
    std::uint64_t seed = 0;

    // proposal machinery
    ProposalKind proposal = ProposalKind::Componentwise;
    double initial_proposal_scale = 0.1;
    Index hits_per_coordinate = 5;  // Metropolis hits per coordinate per sweep

    void validate() const;
};

struct PosteriorChain {
    std::string method;
    ModelShape shape;
    MatrixXd draws;           // post-burn-in, row per draw, canonical theta layout
    VectorXd accept_fraction; // per stored draw, fraction of proposals accepted
    VectorXd proposal_scale;  // per stored draw, geometric mean of coordinate scales
    double acceptance_rate = 0.0;    // post-burn-in proposals
    double final_proposal_scale = 0.0;
    MatrixXd final_hiddens;   // latent-variable methods only; n x n_hidden
    FitConfig config;

    Index n_draws() const { return draws.rows(); }
};

// One draw from the trick-prior full conditional: independent Gaussians with
// mean C1*S (mains) / C2*S (interactions) and matching variances.
ThetaVector trick_full_conditional_theta(const ModelShape& shape, const StatVector& suff_sum,
                                         double C1, double C2, std::uint64_t seed);

// Hidden block imputation: each row drawn from hidden_conditional at that
// row's visibles.  Returned matrix holds coded values, n x n_hidden.
MatrixXd gibbs_impute_hiddens(const ThetaVector& theta, const Dataset& data, std::uint64_t seed);

// Log truncated-normal prior density up to a constant; -inf outside the box.
double truncnorm_log_prior(const ThetaVector& theta, const TruncNormalPrior& prior);

// Geometric Robbins-Monro step on the proposal scale; callers stop applying
// it after burn-in.
double adaptive_scale_update(double scale, bool accepted, Index iteration, const FitConfig& config);

// sum over visible cells of count(v) * log P_theta(v)
double marginal_log_likelihood(const ThetaVector& theta, const Dataset& data);

// Bayes with Trick Prior and Latent Variables: pure Gibbs.
PosteriorChain fit_bwtplv(const Dataset& data, const TrickPrior& prior, const FitConfig& config);

// Bayes with Truncated Normal prior and Latent Variables: Gibbs imputation
// plus adaptive Metropolis on theta against the complete-data likelihood.
PosteriorChain fit_bwtnlv(const Dataset& data, const TruncNormalPrior& prior, const FitConfig& config);

// Bayes with Truncated Normal prior and Marginalized Likelihood: adaptive
// Metropolis on theta alone.
PosteriorChain fit_bwtnml(const Dataset& data, const TruncNormalPrior& prior, const FitConfig& config);

}  // namespace rbmprop
