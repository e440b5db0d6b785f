#pragma once

#include "rbmprop/diagnostics.hpp"
#include "rbmprop/model.hpp"

#include <cstdint>
#include <vector>

namespace rbmprop {

enum class GridSpacing { Linear, Geometric };

struct GridSpec {
    std::vector<ModelShape> shapes;
    double magnitude_min = 0.001;
    double magnitude_max = 3.0;
    Index breaks = 24;       // grid points per axis
    Index replicates = 100;  // theta draws per grid point
    std::uint64_t seed = 0;
    HullEstimateSpec hull;
    double eps0 = 0.05;
    double eps_modal = 0.1;
    GridSpacing spacing = GridSpacing::Linear;
    Index threads = 0;  // 0 = hardware concurrency

    void validate() const;
    std::vector<double> magnitudes() const;
};

struct GridRow {
    ModelShape shape;
    double g_main = 0.0;
    double g_interaction = 0.0;
    Index replicate = 0;
    ProprietyReport report;
};

struct GridAggRow {
    ModelShape shape;
    double g_main = 0.0;
    double g_interaction = 0.0;
    double frac_degenerate = 0.0;
    double mean_lrep_per_nv = 0.0;
    double mean_gap_max = 0.0;
    Index n_reps = 0;
};

struct GridStudyResult {
    std::vector<GridRow> rows;
    std::vector<GridAggRow> aggregate;
};

// radius * z / |z| for z of iid standard normals
VectorXd sample_sphere(Index dim, double radius, std::uint64_t seed);

// Mains uniform on the sphere of radius g_main * (n_V + n_H); interactions on
// the sphere of radius g_interaction * (n_V * n_H); both from one task stream.
ThetaVector theta_at_gridpoint(const ModelShape& shape, double g_main, double g_interaction,
                               std::uint64_t seed);

// Full sweep over shape x grid point x replicate. Every task derives its own
// seed from (spec.seed, shape, grid indices, replicate), so the output is
// identical under any worker count or execution order.
GridStudyResult run_grid_study(const GridSpec& spec);

}  // namespace rbmprop
