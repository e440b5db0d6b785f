#include "rbmprop/grid.hpp"

#include "rbmprop/rng.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rbmprop {

void GridSpec::validate() const
{
    if (shapes.empty()) throw std::invalid_argument("GridSpec: no shapes");
    if (!(magnitude_min > 0)) throw std::invalid_argument("GridSpec: magnitude_min must be positive");
    if (!(magnitude_max >= magnitude_min)) throw std::invalid_argument("GridSpec: magnitude_max < magnitude_min");
    if (breaks < 2) throw std::invalid_argument("GridSpec: breaks must be >= 2");
    if (replicates < 1) throw std::invalid_argument("GridSpec: replicates must be >= 1");
}

std::vector<double> GridSpec::magnitudes() const
{
    std::vector<double> g(breaks);
    for (Index k = 0; k < breaks; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(breaks - 1);
        if (spacing == GridSpacing::Linear)
            g[k] = magnitude_min + f * (magnitude_max - magnitude_min);
        else
            g[k] = magnitude_min * std::pow(magnitude_max / magnitude_min, f);
    }
    return g;
}

namespace {

VectorXd sphere_draw(Index dim, double radius, Rng& rng)
{
    if (dim < 1) throw std::invalid_argument("sample_sphere: dim must be >= 1");
    if (radius < 0) throw std::invalid_argument("sample_sphere: radius must be nonnegative");
    VectorXd z(dim);
    if (radius == 0.0) {
        z.setZero();
        return z;
    }
    double norm = 0.0;
    do {
        for (Index k = 0; k < dim; ++k) z(k) = rng.normal();
        norm = z.norm();
    } while (norm < 1e-12);
    return (radius / norm) * z;
}

}  // namespace

VectorXd sample_sphere(Index dim, double radius, std::uint64_t seed)
{
    Rng rng(seed);
    return sphere_draw(dim, radius, rng);
}

ThetaVector theta_at_gridpoint(const ModelShape& shape, double g_main, double g_interaction,
                               std::uint64_t seed)
{
    if (g_main < 0 || g_interaction < 0)
        throw std::invalid_argument("theta_at_gridpoint: magnitudes must be nonnegative");
    Rng rng(seed);
    const Index n_main = shape.n_visible + shape.n_hidden;
    const Index n_int = shape.n_visible * shape.n_hidden;
    const VectorXd mains = sphere_draw(n_main, g_main * static_cast<double>(n_main), rng);
    const VectorXd inter = sphere_draw(n_int, g_interaction * static_cast<double>(n_int), rng);

    ThetaVector theta(shape);
    theta.visible_main = mains.head(shape.n_visible);
    theta.hidden_main = mains.tail(shape.n_hidden);
    for (Index i = 0; i < shape.n_visible; ++i)
        for (Index j = 0; j < shape.n_hidden; ++j)
            theta.interaction(i, j) = inter(i * shape.n_hidden + j);
    return theta;
}

GridStudyResult run_grid_study(const GridSpec& spec)
{
    spec.validate();
    const std::vector<double> mags = spec.magnitudes();

    struct Task {
        Index shape_idx, gi, gj, rep;
    };
    std::vector<Task> tasks;
    tasks.reserve(spec.shapes.size() * mags.size() * mags.size() * spec.replicates);
    for (Index s = 0; s < static_cast<Index>(spec.shapes.size()); ++s)
        for (Index gi = 0; gi < static_cast<Index>(mags.size()); ++gi)
            for (Index gj = 0; gj < static_cast<Index>(mags.size()); ++gj)
                for (Index r = 0; r < spec.replicates; ++r)
                    tasks.push_back({s, gi, gj, r});

    GridStudyResult result;
    result.rows.resize(tasks.size());

    const auto run_task = [&](Index idx) {
        const Task& task = tasks[idx];
        const ModelShape& shape = spec.shapes[task.shape_idx];
        const std::uint64_t task_seed = derive_seed({spec.seed,
                                                     static_cast<std::uint64_t>(shape.n_visible),
                                                     static_cast<std::uint64_t>(shape.n_hidden),
                                                     static_cast<std::uint64_t>(shape.coding == Coding::ZeroOne ? 0 : 1),
                                                     static_cast<std::uint64_t>(task.gi),
                                                     static_cast<std::uint64_t>(task.gj),
                                                     static_cast<std::uint64_t>(task.rep)});
        const ThetaVector theta =
            theta_at_gridpoint(shape, mags[task.gi], mags[task.gj], task_seed);
        HullEstimateSpec hull = spec.hull;
        hull.seed = derive_seed({task_seed, 1});
        GridRow& row = result.rows[idx];
        row.shape = shape;
        row.g_main = mags[task.gi];
        row.g_interaction = mags[task.gj];
        row.replicate = task.rep;
        row.report = diagnose(theta, hull, spec.eps_modal, spec.eps0);
    };

    Index n_threads = spec.threads > 0 ? spec.threads
                                       : static_cast<Index>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        for (Index i = 0; i < static_cast<Index>(tasks.size()); ++i) run_task(i);
    } else {
        std::atomic<Index> next{0};
        std::vector<std::thread> workers;
        for (Index w = 0; w < n_threads; ++w)
            workers.emplace_back([&] {
                for (Index i = next.fetch_add(1); i < static_cast<Index>(tasks.size());
                     i = next.fetch_add(1))
                    run_task(i);
            });
        for (auto& worker : workers) worker.join();
    }

    // deterministic reduction in task order, one aggregate per (shape, grid point)
    for (Index i = 0; i < static_cast<Index>(result.rows.size()); i += spec.replicates) {
        GridAggRow agg;
        agg.shape = result.rows[i].shape;
        agg.g_main = result.rows[i].g_main;
        agg.g_interaction = result.rows[i].g_interaction;
        agg.n_reps = spec.replicates;
        for (Index r = 0; r < spec.replicates; ++r) {
            const ProprietyReport& rep = result.rows[i + r].report;
            agg.frac_degenerate += rep.near_degenerate ? 1.0 : 0.0;
            agg.mean_lrep_per_nv += rep.lrep_per_visible;
            agg.mean_gap_max += rep.interp_gap_max;
        }
        agg.frac_degenerate /= static_cast<double>(spec.replicates);
        agg.mean_lrep_per_nv /= static_cast<double>(spec.replicates);
        agg.mean_gap_max /= static_cast<double>(spec.replicates);
        result.aggregate.push_back(agg);
    }
    return result;
}

}  // namespace rbmprop
