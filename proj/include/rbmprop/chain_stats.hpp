#pragma once

#include "rbmprop/fitters.hpp"
#include "rbmprop/model.hpp"

#include <vector>

namespace rbmprop {

// One column per visible cell: the exact marginal probability of that cell
// under each stored theta draw.
MatrixXd cell_probability_series(const PosteriorChain& chain);

struct AcfResult {
    bool constant_series = false;
    VectorXd rho;  // lags 0..max_lag; empty when constant
};

// Biased (1/M) autocovariance normalization, so |rho| <= 1 at every lag.
AcfResult acf(const VectorXd& series, Index max_lag);

struct EssReport {
    bool constant_series = false;
    Index m = 0;          // chain length
    Index block_len = 0;  // b
    double sigma2 = 0.0;  // sample variance of the raw chain
    double c_hat = 0.0;   // b * S_b^2 from overlapping block means
    double m_eff = 0.0;   // M * sigma2 / c_hat, reported uncapped
};

EssReport ess_block_means(const VectorXd& series, Index block_len);

inline Index default_block_len(Index m)
{
    Index b = static_cast<Index>(std::sqrt(static_cast<double>(m)));
    return b < 1 ? 1 : b;
}

struct CellSummary {
    Index cell = 0;  // 1-based outcome index
    double post_mean = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
    double true_value = 0.0;
    double empirical = 0.0;
    double m_eff = 0.0;
};

struct PosteriorSummary {
    std::vector<CellSummary> cells;
    double tv_mean_true = 0.0;       // TV(posterior-mean cells, true cells)
    double tv_empirical_true = 0.0;  // TV(empirical cells, true cells)
};

// block_len = 0 picks floor(sqrt(M))
PosteriorSummary summarize_posterior(const MatrixXd& series, const VectorXd& reference_true,
                                     const VectorXd& reference_empirical, Index block_len = 0);

double tv_distance(const VectorXd& p, const VectorXd& q);

// order-statistic quantile with linear interpolation
double quantile(VectorXd values, double q);

}  // namespace rbmprop
