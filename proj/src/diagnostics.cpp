#include "rbmprop/diagnostics.hpp"

#include "rbmprop/exact.hpp"
#include "rbmprop/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rbmprop {

double hull_distance(const StatVector& mu, const ModelShape& shape, const HullEstimateSpec& spec)
{
    const Index m = shape.m();
    if (mu.size() != m) throw std::invalid_argument("hull_distance: mu dimension mismatch");
    if (spec.direction_count < 1) throw std::invalid_argument("hull_distance: direction_count must be >= 1");

    const MatrixXd table = statistic_table(shape);

    const Index n_axis = spec.include_axis_directions ? 2 * m : 0;
    MatrixXd directions(m, spec.direction_count + n_axis);
    Rng rng(spec.seed);
    for (Index d = 0; d < spec.direction_count; ++d) {
        VectorXd z(m);
        double norm = 0.0;
        do {
            for (Index k = 0; k < m; ++k) z(k) = rng.normal();
            norm = z.norm();
        } while (norm < 1e-12);
        directions.col(d) = z / norm;
    }
    for (Index k = 0; k < n_axis; ++k) {
        directions.col(spec.direction_count + k).setZero();
        directions(k / 2, spec.direction_count + k) = (k % 2 == 0) ? 1.0 : -1.0;
    }

    // support values h(a) = max_t a.t, column per direction
    const VectorXd support = (table * directions).colwise().maxCoeff();
    const VectorXd slack = support - directions.transpose() * mu;
    return slack.minCoeff();
}

double degeneracy_epsilon(const ModelShape& shape, double eps0)
{
    if (!(eps0 >= 0.0) || !(eps0 < 0.5))
        throw std::invalid_argument("degeneracy_epsilon: eps0 must lie in [0, 0.5)");
    const double m = static_cast<double>(shape.m());
    return (1.0 - std::pow(1.0 - 2.0 * eps0, 3.0 / m)) / 2.0;
}

std::pair<double, double> lrep(const ThetaVector& theta)
{
    const VectorXd lm = log_visible_marginal(theta);
    const double value = lm.maxCoeff() - lm.minCoeff();
    return {value, value / static_cast<double>(theta.shape.n_visible)};
}

double one_flip_sensitivity(const ThetaVector& theta)
{
    const ModelShape& shape = theta.shape;
    const VectorXd lm = log_visible_marginal(theta);
    double delta = 0.0;
    for (Index v = 0; v < shape.n_visible_states(); ++v) {
        for (Index k = 0; k < shape.n_visible; ++k) {
            const Index flipped = v ^ (Index(1) << k);
            delta = std::max(delta, std::abs(lm(v) - lm(flipped)));
        }
    }
    return delta;
}

double modal_set_mass(const ThetaVector& theta, double eps)
{
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("modal_set_mass: eps must lie in (0, 1)");
    const VectorXd lm = log_visible_marginal(theta);
    const double threshold = (1.0 - eps) * lm.maxCoeff() + eps * lm.minCoeff();
    double mass = 0.0;
    for (Index v = 0; v < lm.size(); ++v)
        if (lm(v) > threshold) mass += std::exp(lm(v));
    return mass;
}

std::pair<StatVector, double> interpretability_gap(const ThetaVector& theta)
{
    ThetaVector independent = theta;
    independent.interaction.setZero();
    StatVector gap = (mean_statistic(theta) - mean_statistic(independent)).cwiseAbs();
    const double gap_max = gap.size() > 0 ? gap.maxCoeff() : 0.0;
    return {std::move(gap), gap_max};
}

ProprietyReport diagnose(const ThetaVector& theta, const HullEstimateSpec& spec,
                         double eps_modal, double eps0)
{
    ProprietyReport report;
    report.hull_distance = hull_distance(mean_statistic(theta), theta.shape, spec);
    report.epsilon = degeneracy_epsilon(theta.shape, eps0);
    report.near_degenerate = report.hull_distance < report.epsilon;
    std::tie(report.lrep, report.lrep_per_visible) = lrep(theta);
    report.delta_one_flip = one_flip_sensitivity(theta);
    report.eps_modal = eps_modal;
    report.modal_set_mass = modal_set_mass(theta, eps_modal);
    std::tie(report.interp_gap, report.interp_gap_max) = interpretability_gap(theta);
    return report;
}

}  // namespace rbmprop
