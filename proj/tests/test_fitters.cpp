#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rbmprop/exact.hpp"
#include "rbmprop/fitters.hpp"
#include "rbmprop/numeric.hpp"
#include "rbmprop/presets.hpp"
#include "rbmprop/rng.hpp"

#include <cmath>

using namespace rbmprop;

namespace {

Dataset constant_dataset(const ModelShape& shape, double value, Index n)
{
    return make_dataset(shape, MatrixXd::Constant(n, shape.n_visible, value));
}

}  // namespace

TEST_CASE("trick full conditional draws independent gaussians")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);

    SUBCASE("zero sufficient sum centers the draws at zero")
    {
        const double c1 = 0.04, c2 = 0.01;
        const Index reps = 100000;
        VectorXd mean = VectorXd::Zero(shape.m());
        for (Index r = 0; r < reps; ++r)
            mean += trick_full_conditional_theta(shape, StatVector::Zero(shape.m()), c1, c2,
                                                 derive_seed({17, static_cast<std::uint64_t>(r)}))
                        .flat();
        mean /= static_cast<double>(reps);
        const double se_main = std::sqrt(c1 / reps), se_int = std::sqrt(c2 / reps);
        for (Index k = 0; k < 4; ++k) CHECK(std::abs(mean(k)) < 4 * se_main);
        for (Index k = 4; k < 8; ++k) CHECK(std::abs(mean(k)) < 4 * se_int);
    }

    SUBCASE("conditional mean is c * S (complete-the-square oracle)")
    {
        // density proportional to exp(theta.S - |theta|^2 / (2c)) has mean c*S
        const double c = 0.02;
        StatVector suff(shape.m());
        for (Index k = 0; k < shape.m(); ++k) suff(k) = 10.0 * std::sin(static_cast<double>(k + 1));
        const Index reps = 200000;
        VectorXd mean = VectorXd::Zero(shape.m());
        for (Index r = 0; r < reps; ++r)
            mean += trick_full_conditional_theta(shape, suff, c, c,
                                                 derive_seed({18, static_cast<std::uint64_t>(r)}))
                        .flat();
        mean /= static_cast<double>(reps);
        const double se = std::sqrt(c / reps);
        for (Index k = 0; k < shape.m(); ++k) CHECK(std::abs(mean(k) - c * suff(k)) < 4.5 * se);
    }

    SUBCASE("invalid variances rejected")
    {
        CHECK_THROWS_AS(trick_full_conditional_theta(shape, StatVector::Zero(shape.m()), 0.0, 1.0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("trick-prior cancellation: kernel evaluated with and without gamma^n terms")
{
    // log posterior kernel of theta given complete data:
    //   (theta.S - n log gamma) + (n log gamma - penalty) == theta.S - penalty
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    Rng rng(23);
    const Index n = 5000;
    const double C1 = 6.0 / (n * 4.0), C2 = 6.0 / (n * 4.0);
    for (int rep = 0; rep < 20; ++rep) {
        VectorXd flat(shape.m());
        for (Index k = 0; k < shape.m(); ++k) flat(k) = rng.normal();
        const ThetaVector theta = ThetaVector::from_flat(shape, flat);
        StatVector suff(shape.m());
        for (Index k = 0; k < shape.m(); ++k) suff(k) = n * (2.0 * rng.uniform() - 1.0);

        const double penalty = flat.head(4).squaredNorm() / (2 * C1) + flat.tail(4).squaredNorm() / (2 * C2);
        const double log_gamma = partition_log(theta);
        const double with_gamma = (flat.dot(suff) - n * log_gamma) + (n * log_gamma - penalty);
        const double cancelled = flat.dot(suff) - penalty;
        CHECK(with_gamma == doctest::Approx(cancelled).epsilon(1e-9));
    }
}

TEST_CASE("gibbs_impute_hiddens follows the conditional law")
{
    SUBCASE("theta zero gives half-and-half hiddens")
    {
        const ModelShape shape(2, 2, Coding::PlusMinusOne);
        const Dataset data = constant_dataset(shape, 1.0, 10000);
        const MatrixXd hiddens = gibbs_impute_hiddens(ThetaVector::zero(shape), data, 5);
        for (Index j = 0; j < 2; ++j) {
            const double high = (hiddens.col(j).array() == 1.0).count();
            CHECK(std::abs(high / 10000.0 - 0.5) < 4.0 * std::sqrt(0.25 / 10000.0));
        }
    }
    SUBCASE("saturated hidden main pins the column high")
    {
        const ModelShape shape(1, 2, Coding::PlusMinusOne);
        ThetaVector theta(shape);
        theta.hidden_main(0) = 10.0;
        const Dataset data = constant_dataset(shape, -1.0, 2000);
        const MatrixXd hiddens = gibbs_impute_hiddens(theta, data, 6);
        CHECK(hiddens.col(0).minCoeff() == 1.0);
    }
    SUBCASE("tiny-model imputation frequency matches the logistic closed form")
    {
        const ModelShape shape(1, 1, Coding::PlusMinusOne);
        ThetaVector theta(shape);
        theta.hidden_main(0) = 0.4;
        theta.interaction(0, 0) = 0.3;
        const Index n = 40000;
        const Dataset data = constant_dataset(shape, 1.0, n);
        const MatrixXd hiddens = gibbs_impute_hiddens(theta, data, 7);
        const double p = 1.0 / (1.0 + std::exp(-2.0 * 0.7));  // a = 0.4 + 0.3
        const double high = (hiddens.col(0).array() == 1.0).count();
        CHECK(std::abs(high / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("truncated normal prior")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    TruncNormalPrior prior = TruncNormalPrior::table_defaults(shape);
    CHECK(prior.sigma_main_sq == doctest::Approx(0.25));
    CHECK(prior.sigma_int_sq == doctest::Approx(0.25));

    SUBCASE("zero scores zero")
    {
        CHECK(truncnorm_log_prior(ThetaVector::zero(shape), prior) == 0.0);
    }
    SUBCASE("just past the truncation boundary is impossible")
    {
        ThetaVector theta = ThetaVector::zero(shape);
        theta.visible_main(0) = 3.0001 * std::sqrt(prior.sigma_main_sq);
        CHECK(truncnorm_log_prior(theta, prior) == -std::numeric_limits<double>::infinity());
        theta.visible_main(0) = 2.9999 * std::sqrt(prior.sigma_main_sq);
        CHECK(std::isfinite(truncnorm_log_prior(theta, prior)));
    }
    SUBCASE("per-block arithmetic on a hand-built theta")
    {
        TruncNormalPrior p2;
        p2.sigma_main_sq = 0.5;
        p2.sigma_int_sq = 0.25;
        ThetaVector theta = ThetaVector::zero(shape);
        theta.visible_main << 0.3, -0.2;
        theta.hidden_main << 0.1, 0.4;
        theta.interaction << 0.05, -0.1, 0.2, 0.0;
        double expected = 0.0;
        for (double v : {0.3, -0.2, 0.1, 0.4}) expected -= v * v / (2 * 0.5);
        for (double v : {0.05, -0.1, 0.2, 0.0}) expected -= v * v / (2 * 0.25);
        CHECK(truncnorm_log_prior(theta, p2) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("interactions must shrink at least as much as mains")
    {
        TruncNormalPrior bad;
        bad.sigma_main_sq = 0.1;
        bad.sigma_int_sq = 0.2;
        CHECK_THROWS_AS(truncnorm_log_prior(ThetaVector::zero(shape), bad), std::invalid_argument);
    }
}

TEST_CASE("adaptive scale update formula")
{
    FitConfig config;
    config.target_acceptance = 0.234;
    config.adaptation_decay = 0.6;
    SUBCASE("acceptance grows the scale")
    {
        const double updated = adaptive_scale_update(1.0, true, 1, config);
        CHECK(updated == doctest::Approx(std::exp(0.766)).epsilon(1e-12));
        CHECK(updated > 1.0);
    }
    SUBCASE("rejection shrinks the scale")
    {
        const double updated = adaptive_scale_update(0.5, false, 4, config);
        CHECK(updated == doctest::Approx(0.5 * std::exp(std::pow(4.0, -0.6) * -0.234)).epsilon(1e-12));
        CHECK(updated < 0.5);
    }
    SUBCASE("iteration must be positive")
    {
        CHECK_THROWS_AS(adaptive_scale_update(1.0, true, 0, config), std::invalid_argument);
    }
}

TEST_CASE("marginal log likelihood")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    SUBCASE("uniform model scores n log 2^-nv")
    {
        const Dataset data = constant_dataset(shape, 1.0, 40);
        CHECK(marginal_log_likelihood(ThetaVector::zero(shape), data) ==
              doctest::Approx(40.0 * std::log(0.25)).epsilon(1e-12));
    }
    SUBCASE("single observation matches the closed-form cell probability")
    {
        const ModelShape tiny(1, 1, Coding::PlusMinusOne);
        ThetaVector theta(tiny);
        theta.visible_main(0) = 0.7;
        const Dataset data = constant_dataset(tiny, 1.0, 1);
        const double p1 = std::exp(1.4) / (1.0 + std::exp(1.4));
        CHECK(marginal_log_likelihood(theta, data) == doctest::Approx(std::log(p1)).epsilon(1e-12));
    }
    SUBCASE("never beats the empirical multinomial likelihood")
    {
        Rng rng(12);
        const Dataset data = sample_visibles_exact(table1_theta(), 400, 3);
        double empirical_ll = 0.0;
        for (Index c = 0; c < data.cell_counts.size(); ++c)
            if (data.cell_counts(c) > 0)
                empirical_ll += data.cell_counts(c) *
                                std::log(static_cast<double>(data.cell_counts(c)) / data.n);
        for (int rep = 0; rep < 200; ++rep) {
            VectorXd flat(data.shape.m());
            for (Index k = 0; k < data.shape.m(); ++k) flat(k) = 1.5 * rng.normal();
            CHECK(marginal_log_likelihood(ThetaVector::from_flat(data.shape, flat), data) <=
                  empirical_ll + 1e-9);
        }
    }
}

TEST_CASE("fit_bwtplv")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    SUBCASE("chain bookkeeping")
    {
        FitConfig config;
        config.iterations = 120;
        config.burn_in = 20;
        config.seed = 4;
        const PosteriorChain chain = fit_bwtplv(constant_dataset(shape, 1.0, 50), TrickPrior{2.0}, config);
        CHECK(chain.n_draws() == 100);
        CHECK(chain.method == "bwtplv");
        CHECK(chain.acceptance_rate == 1.0);
        CHECK(chain.final_hiddens.rows() == 50);
    }
    SUBCASE("degenerate all-high data pushes posterior main means positive")
    {
        FitConfig config;
        config.iterations = 600;
        config.burn_in = 100;
        config.seed = 9;
        const PosteriorChain chain =
            fit_bwtplv(constant_dataset(shape, 1.0, 200), TrickPrior{1.0}, config);
        const VectorXd mean = chain.draws.colwise().mean();
        for (Index i = 0; i < 2; ++i) CHECK(mean(i) > 0.0);  // visible mains
    }
    SUBCASE("deterministic given seed")
    {
        FitConfig config;
        config.iterations = 60;
        config.burn_in = 10;
        config.seed = 11;
        const Dataset data = constant_dataset(shape, -1.0, 30);
        const PosteriorChain a = fit_bwtplv(data, TrickPrior{1.0}, config);
        const PosteriorChain b = fit_bwtplv(data, TrickPrior{1.0}, config);
        CHECK((a.draws - b.draws).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("invalid C rejected")
    {
        CHECK_THROWS_AS(fit_bwtplv(constant_dataset(shape, 1.0, 10), TrickPrior{0.0}, FitConfig{}),
                        std::invalid_argument);
    }
}

TEST_CASE("truncated-normal fitters respect the box and reproduce bit-exactly")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    const Dataset data = sample_visibles_exact(
        [&] {
            ThetaVector theta(shape);
            theta.visible_main << 0.6, -0.4;
            return theta;
        }(),
        300, 21);
    const TruncNormalPrior prior = TruncNormalPrior::table_defaults(shape);
    FitConfig config;
    config.iterations = 300;
    config.burn_in = 50;
    config.seed = 31;

    for (auto fitter : {&fit_bwtnlv, &fit_bwtnml}) {
        const PosteriorChain chain = (*fitter)(data, prior, config);
        CHECK(chain.n_draws() == 250);
        const double bound_main = 3.0 * std::sqrt(prior.sigma_main_sq);
        const double bound_int = 3.0 * std::sqrt(prior.sigma_int_sq);
        CHECK(chain.draws.leftCols(4).cwiseAbs().maxCoeff() <= bound_main + 1e-12);
        CHECK(chain.draws.rightCols(4).cwiseAbs().maxCoeff() <= bound_int + 1e-12);

        const PosteriorChain again = (*fitter)(data, prior, config);
        CHECK((chain.draws - again.draws).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("oversized proposals are always rejected by the truncation")
{
    const ModelShape shape(1, 1, Coding::PlusMinusOne);
    const Dataset data = constant_dataset(shape, 1.0, 20);
    const TruncNormalPrior prior = TruncNormalPrior::table_defaults(shape);
    FitConfig config;
    config.iterations = 200;
    config.burn_in = 10;
    config.initial_proposal_scale = 1e5;  // virtually every proposal leaves the box
    config.hits_per_coordinate = 1;
    config.seed = 77;
    const PosteriorChain chain = fit_bwtnml(data, prior, config);
    CHECK(chain.acceptance_rate < 0.05);
    CHECK(chain.draws.cwiseAbs().maxCoeff() <= 3.0 * std::sqrt(prior.sigma_main_sq) + 1e-12);
}

TEST_CASE("likelihood ceiling holds for every stored draw of every method")
{
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    ThetaVector truth(shape);
    truth.visible_main << 0.8, -0.3;
    truth.hidden_main << 0.2, -0.1;
    const Dataset data = sample_visibles_exact(truth, 500, 91);

    double empirical_ll = 0.0;
    for (Index c = 0; c < data.cell_counts.size(); ++c)
        if (data.cell_counts(c) > 0)
            empirical_ll +=
                data.cell_counts(c) * std::log(static_cast<double>(data.cell_counts(c)) / data.n);

    FitConfig config;
    config.iterations = 250;
    config.burn_in = 50;
    config.seed = 61;
    const TruncNormalPrior prior = TruncNormalPrior::table_defaults(shape);

    std::vector<PosteriorChain> chains;
    chains.push_back(fit_bwtplv(data, TrickPrior{4.0}, config));
    chains.push_back(fit_bwtnlv(data, prior, config));
    chains.push_back(fit_bwtnml(data, prior, config));
    for (const PosteriorChain& chain : chains) {
        for (Index k = 0; k < chain.n_draws(); ++k) {
            const ThetaVector theta = ThetaVector::from_flat(shape, chain.draws.row(k));
            CHECK(marginal_log_likelihood(theta, data) <= empirical_ll + 1e-9);
        }
    }
}

TEST_CASE("both truncated-normal chains approach the quadrature posterior on the tiny model")
{
    const ModelShape shape(1, 1, Coding::PlusMinusOne);
    ThetaVector truth(shape);
    truth.visible_main(0) = 0.8;
    const Dataset data = sample_visibles_exact(truth, 5, 1001);

    const TruncNormalPrior prior = TruncNormalPrior::table_defaults(shape);
    FitConfig config;
    config.iterations = 30050;
    config.burn_in = 50;
    config.seed = 1002;
    const PosteriorChain nml = fit_bwtnml(data, prior, config);
    config.seed = 1003;
    const PosteriorChain nlv = fit_bwtnlv(data, prior, config);

    const oracle::QuadraturePosterior quad = oracle::quadrature_posterior_11(
        data.cell_counts, prior.sigma_main_sq, prior.sigma_int_sq, prior.trunc_mult, 161);

    for (int k = 0; k < 3; ++k) {
        const double ks_nml =
            oracle::ks_distance_to_cdf(nml.draws.col(k), quad.grids[k], quad.cdfs[k]);
        const double ks_nlv =
            oracle::ks_distance_to_cdf(nlv.draws.col(k), quad.grids[k], quad.cdfs[k]);
        CHECK(ks_nml < 0.08);
        CHECK(ks_nlv < 0.08);
    }
}

TEST_CASE("fit config validation")
{
    FitConfig config;
    config.burn_in = config.iterations;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.burn_in = 10;
    config.iterations = 100;
    config.target_acceptance = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
