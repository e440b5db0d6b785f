#include "rbmprop/chain_stats.hpp"

#include "rbmprop/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbmprop {

MatrixXd cell_probability_series(const PosteriorChain& chain)
{
    const ModelShape& shape = chain.shape;
    MatrixXd series(chain.n_draws(), shape.n_visible_states());
    for (Index k = 0; k < chain.n_draws(); ++k) {
        const ThetaVector theta = ThetaVector::from_flat(shape, chain.draws.row(k));
        series.row(k) = exact_distribution(theta).visible_marginal;
    }
    return series;
}

namespace {

double sample_variance(const VectorXd& x)
{
    if (x.size() < 2) throw std::invalid_argument("sample_variance: need at least 2 values");
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

AcfResult acf(const VectorXd& series, Index max_lag)
{
    const Index m = series.size();
    if (m <= max_lag) throw std::invalid_argument("acf: series length must exceed max_lag");
    AcfResult result;
    if (series.minCoeff() == series.maxCoeff()) {
        result.constant_series = true;
        return result;
    }
    const double mean = series.mean();
    const VectorXd centered = series.array() - mean;
    const double c0 = centered.squaredNorm() / static_cast<double>(m);
    result.rho.resize(max_lag + 1);
    result.rho(0) = 1.0;
    for (Index lag = 1; lag <= max_lag; ++lag) {
        const double c = centered.head(m - lag).dot(centered.tail(m - lag)) / static_cast<double>(m);
        result.rho(lag) = c / c0;
    }
    return result;
}

EssReport ess_block_means(const VectorXd& series, Index block_len)
{
    const Index m = series.size();
    if (block_len < 1) throw std::invalid_argument("ess_block_means: block_len must be >= 1");
    if (m - block_len + 1 < 2)
        throw std::invalid_argument("ess_block_means: need at least two overlapping blocks");

    EssReport report;
    report.m = m;
    report.block_len = block_len;

    const double mean = series.mean();
    const double sigma2 = (series.array() - mean).square().sum() / static_cast<double>(m - 1);
    report.sigma2 = sigma2;
    if (series.minCoeff() == series.maxCoeff()) {
        report.constant_series = true;
        report.m_eff = std::numeric_limits<double>::quiet_NaN();
        return report;
    }

    VectorXd block_means(m - block_len + 1);
    double window = series.head(block_len).sum();
    block_means(0) = window / static_cast<double>(block_len);
    for (Index j = 1; j < block_means.size(); ++j) {
        window += series(j + block_len - 1) - series(j - 1);
        block_means(j) = window / static_cast<double>(block_len);
    }

    report.c_hat = static_cast<double>(block_len) * sample_variance(block_means);
    report.m_eff = static_cast<double>(m) * sigma2 / report.c_hat;
    return report;
}

double quantile(VectorXd values, double q)
{
    if (values.size() == 0) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
    std::sort(values.data(), values.data() + values.size());
    const double pos = q * static_cast<double>(values.size() - 1);
    const Index lo = static_cast<Index>(pos);
    if (lo + 1 >= values.size()) return values(values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values(lo) + frac * (values(lo + 1) - values(lo));
}

double tv_distance(const VectorXd& p, const VectorXd& q)
{
    if (p.size() != q.size()) throw std::invalid_argument("tv_distance: dimension mismatch");
    return 0.5 * (p - q).cwiseAbs().sum();
}

PosteriorSummary summarize_posterior(const MatrixXd& series, const VectorXd& reference_true,
                                     const VectorXd& reference_empirical, Index block_len)
{
    const Index n_cells = series.cols();
    if (reference_true.size() != n_cells || reference_empirical.size() != n_cells)
        throw std::invalid_argument("summarize_posterior: reference dimension mismatch");
    if (block_len == 0) block_len = default_block_len(series.rows());

    PosteriorSummary summary;
    VectorXd post_mean(n_cells);
    for (Index i = 0; i < n_cells; ++i) {
        const VectorXd cell_series = series.col(i);
        CellSummary cell;
        cell.cell = i + 1;
        cell.post_mean = cell_series.mean();
        cell.q05 = quantile(cell_series, 0.05);
        cell.q95 = quantile(cell_series, 0.95);
        cell.true_value = reference_true(i);
        cell.empirical = reference_empirical(i);
        const EssReport ess = ess_block_means(cell_series, block_len);
        cell.m_eff = ess.m_eff;
        post_mean(i) = cell.post_mean;
        summary.cells.push_back(cell);
    }
    summary.tv_mean_true = tv_distance(post_mean, reference_true);
    summary.tv_empirical_true = tv_distance(reference_empirical, reference_true);
    return summary;
}

}  // namespace rbmprop
