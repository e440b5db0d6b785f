#pragma once

#include "rbmprop/model.hpp"

#include <cstdint>
#include <utility>

namespace rbmprop {

// Direction sampling for the support-function hull estimator.
struct HullEstimateSpec {
    Index direction_count = 1024;
    bool include_axis_directions = true;
    std::uint64_t seed = 0;
};

// Impropriety metrics for a single theta.
struct ProprietyReport {
    double hull_distance = 0.0;   // estimated distance of mu(theta) to the hull boundary
    double epsilon = 0.0;         // near-degeneracy threshold
    bool near_degenerate = false; // hull_distance < epsilon
    double lrep = 0.0;
    double lrep_per_visible = 0.0;
    double delta_one_flip = 0.0;
    double modal_set_mass = 0.0;  // at eps_modal below
    double eps_modal = 0.0;
    StatVector interp_gap;
    double interp_gap_max = 0.0;
};

// min over sampled unit directions a of (max_{t in T} a.t - a.mu), with the
// statistic space T enumerated exactly. Always an upper bound on the true
// distance from mu to the hull boundary, so a "near-degenerate" call
// (distance below threshold) is never a false positive.
double hull_distance(const StatVector& mu, const ModelShape& shape, const HullEstimateSpec& spec);

// epsilon solving 1 - (1-2*eps0)^3 = 1 - (1-2*eps)^m, scaling the boundary
// shell volume to be comparable across model dimensions m.
double degeneracy_epsilon(const ModelShape& shape, double eps0 = 0.05);

// log max_v P(v) / min_v P(v) over the exact visible marginal,
// and the same divided by n_visible.
std::pair<double, double> lrep(const ThetaVector& theta);

// Delta(theta): largest log-probability ratio across visible outcomes
// differing in exactly one component.
double one_flip_sensitivity(const ThetaVector& theta);

// Probability of the modal set {v : log P(v) > (1-eps) max + eps min},
// strict inequality.
double modal_set_mass(const ThetaVector& theta, double eps);

// Componentwise |mu(theta) - mu(theta*)| where theta* keeps the main effects
// and zeroes every interaction, plus the maximum component.
std::pair<StatVector, double> interpretability_gap(const ThetaVector& theta);

ProprietyReport diagnose(const ThetaVector& theta, const HullEstimateSpec& spec,
                         double eps_modal = 0.1, double eps0 = 0.05);

}  // namespace rbmprop
