#include "rbmprop/commands.hpp"

#include "rbmprop/chain_stats.hpp"
#include "rbmprop/diagnostics.hpp"
#include "rbmprop/exact.hpp"
#include "rbmprop/fitters.hpp"
#include "rbmprop/grid.hpp"
#include "rbmprop/io.hpp"
#include "rbmprop/presets.hpp"
#include "rbmprop/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace rbmprop {

namespace {

using io::format_csv_row;
using io::format_double;

// seed-derivation tags per role
constexpr std::uint64_t kSeedTheta = 102, kSeedData = 101, kSeedFit = 103, kSeedDiag = 104,
                        kSeedGrid = 105;

std::string hex64(std::uint64_t value)
{
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

class Emitter {
public:
    Emitter(std::string command, std::filesystem::path out_dir, std::uint64_t master_seed)
        : out_dir_(std::move(out_dir))
    {
        manifest_.command = std::move(command);
        manifest_.master_seed = master_seed;
        manifest_.version = kArtifactVersion;
        manifest_.started_at = io::timestamp_utc();
    }

    void emit(const std::string& name, const std::string& content)
    {
        io::write_text_file(out_dir_ / name, content);
        manifest_.outputs.push_back({name, content.size(), hex64(io::fnv1a64(content))});
        files_.push_back(name);
    }

    void annotate(const std::string& key, const std::string& value)
    {
        extra_.emplace_back(key, value);
    }

    CommandResult finish(const ExperimentConfig& config)
    {
        manifest_.config = config.resolved();
        for (const auto& kv : extra_) manifest_.config.push_back(kv);
        manifest_.finished_at = io::timestamp_utc();
        io::write_manifest(out_dir_, manifest_);
        files_.push_back("manifest.json");
        return {out_dir_, files_};
    }

private:
    std::filesystem::path out_dir_;
    io::RunManifest manifest_;
    std::vector<std::string> files_;
    std::vector<std::pair<std::string, std::string>> extra_;
};

ModelShape shape_from_config(const ExperimentConfig& config)
{
    const std::string source = config.get_string("theta.source", "");
    long long nv, nh;
    std::string coding;
    if (source == "table1") {
        nv = config.get_int("model.n_visible", 4);
        nh = config.get_int("model.n_hidden", 4);
        coding = config.get_string("model.coding", "pm1");
        if (nv != 4 || nh != 4 || coding != "pm1")
            throw ConfigError("theta.source = table1 requires model 4x4 with pm1 coding");
    } else {
        nv = config.require_int("model.n_visible");
        nh = config.require_int("model.n_hidden");
        coding = config.get_string("model.coding", "pm1");
    }
    const long long cap = config.get_int("model.cap", ModelShape::kDefaultEnumerationCap);
    if (nv < 1 || nh < 1) throw ConfigError("model.n_visible and model.n_hidden must be >= 1");
    return ModelShape(nv, nh, coding_from_string(coding), cap);
}

ThetaVector theta_from_config(const ExperimentConfig& config, const ModelShape& shape,
                              std::uint64_t master_seed)
{
    const std::string source = config.require_string("theta.source");
    if (source == "zeros") return ThetaVector::zero(shape);
    if (source == "table1") return table1_theta();
    if (source == "file") {
        const std::string path = config.require_string("theta.file");
        try {
            return io::read_theta_file(path, shape);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("theta.file: ") + e.what());
        }
    }
    if (source == "gridpoint") {
        const double g_main = config.require_double("theta.g_main");
        const double g_int = config.require_double("theta.g_interaction");
        const std::uint64_t seed = config.get_u64("theta.seed", derive_seed({master_seed, kSeedTheta}));
        return theta_at_gridpoint(shape, g_main, g_int, seed);
    }
    throw ConfigError("theta.source must be one of zeros, table1, file, gridpoint");
}

Dataset dataset_from_config(const ExperimentConfig& config, const ModelShape& shape,
                            const ThetaVector& theta, std::uint64_t master_seed)
{
    if (config.has("data.file")) return io::read_dataset_csv(config.require_string("data.file"), shape);
    const long long n = config.require_int("data.n");
    if (n < 1) throw ConfigError("data.n must be >= 1");
    const std::uint64_t seed = config.get_u64("data.seed", derive_seed({master_seed, kSeedData}));
    return sample_visibles_exact(theta, n, seed);
}

HullEstimateSpec hull_from_config(const ExperimentConfig& config, std::uint64_t master_seed)
{
    HullEstimateSpec spec;
    spec.direction_count = config.get_int("diag.directions", 1024);
    spec.include_axis_directions = config.get_bool("diag.axis", true);
    spec.seed = config.get_u64("diag.seed", derive_seed({master_seed, kSeedDiag}));
    if (spec.direction_count < 1) throw ConfigError("diag.directions must be >= 1");
    return spec;
}

std::string dataset_csv(const Dataset& data)
{
    std::string csv = "obs_id";
    for (Index i = 1; i <= data.shape.n_visible; ++i) csv += ",v" + std::to_string(i);
    csv += '\n';
    for (Index r = 0; r < data.n; ++r) {
        csv += std::to_string(r + 1);
        for (Index i = 0; i < data.shape.n_visible; ++i)
            csv += ',' + std::to_string(static_cast<long long>(data.observations(r, i)));
        csv += '\n';
    }
    return csv;
}

std::string report_csv_row(const std::string& theta_id, const ModelShape& shape,
                           const ProprietyReport& report)
{
    return format_csv_row({theta_id, std::to_string(shape.n_visible), std::to_string(shape.n_hidden),
                           to_string(shape.coding), format_double(report.hull_distance),
                           format_double(report.epsilon), report.near_degenerate ? "1" : "0",
                           format_double(report.lrep), format_double(report.lrep_per_visible),
                           format_double(report.delta_one_flip), format_double(report.modal_set_mass),
                           format_double(report.interp_gap_max)});
}

FitConfig fit_config_from(const ExperimentConfig& config, std::uint64_t method_seed)
{
    FitConfig fit;
    fit.iterations = config.get_int("fit.iterations", 1050);
    fit.burn_in = config.get_int("fit.burn_in", 50);
    fit.target_acceptance = config.get_double("fit.target_acceptance", 0.234);
    fit.adaptation_decay = config.get_double("fit.adaptation_decay", 0.6);
    fit.initial_proposal_scale = config.get_double("fit.initial_scale", 0.1);
    fit.hits_per_coordinate = config.get_int("fit.hits", 5);
    const std::string proposal = config.get_string("fit.proposal", "componentwise");
    if (proposal == "componentwise")
        fit.proposal = ProposalKind::Componentwise;
    else if (proposal == "block")
        fit.proposal = ProposalKind::Block;
    else
        throw ConfigError("fit.proposal must be componentwise or block");
    const std::string init = config.get_string("fit.init", "zeros");
    if (init == "zeros")
        fit.initial_theta = ThetaInit::Zeros;
    else if (init == "prior")
        fit.initial_theta = ThetaInit::PriorDraw;
    else
        throw ConfigError("fit.init must be zeros or prior");
    fit.seed = method_seed;
    try {
        fit.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return fit;
}

std::string chain_csv(const PosteriorChain& chain)
{
    std::vector<std::string> header = {"iter"};
    for (Index k = 1; k <= chain.shape.m(); ++k) header.push_back("theta_" + std::to_string(k));
    header.push_back("accepted");
    header.push_back("scale");
    std::string out = format_csv_row(header);
    for (Index row = 0; row < chain.n_draws(); ++row) {
        std::vector<std::string> fields = {std::to_string(chain.config.burn_in + row + 1)};
        for (Index k = 0; k < chain.shape.m(); ++k) fields.push_back(format_double(chain.draws(row, k)));
        fields.push_back(format_double(chain.accept_fraction(row)));
        fields.push_back(format_double(chain.proposal_scale(row)));
        out += format_csv_row(fields);
    }
    return out;
}

std::string chain_sidecar_json(const PosteriorChain& chain, const std::string& prior_desc)
{
    nlohmann::json j;
    j["method"] = chain.method;
    j["prior"] = prior_desc;
    j["iterations"] = chain.config.iterations;
    j["burn_in"] = chain.config.burn_in;
    j["target_acceptance"] = chain.config.target_acceptance;
    j["adaptation_decay"] = chain.config.adaptation_decay;
    j["initial_scale"] = chain.config.initial_proposal_scale;
    j["hits_per_coordinate"] = chain.config.hits_per_coordinate;
    j["proposal"] = chain.config.proposal == ProposalKind::Componentwise ? "componentwise" : "block";
    j["seed"] = chain.config.seed;
    j["acceptance_rate"] = chain.acceptance_rate;
    j["final_proposal_scale"] = chain.final_proposal_scale;
    j["stored_draws"] = chain.n_draws();
    return j.dump(2) + "\n";
}

struct FitOutputs {
    std::vector<PosteriorChain> chains;
    std::vector<PosteriorSummary> summaries;
};

const std::vector<std::string> kMethodNames = {"bwtplv", "bwtnlv", "bwtnml"};

std::vector<std::string> parse_methods(const ExperimentConfig& config, const std::string& fallback)
{
    const std::string raw = config.get_string("fit.methods", fallback);
    std::vector<std::string> methods;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (std::find(kMethodNames.begin(), kMethodNames.end(), item) == kMethodNames.end())
            throw ConfigError("unknown fit method '" + item + "' (valid: bwtplv, bwtnlv, bwtnml)");
        methods.push_back(item);
    }
    if (methods.empty()) throw ConfigError("fit.methods selects no method");
    return methods;
}

// Shared fit pipeline: chains, chain files, ess/acf/posterior tables.
FitOutputs run_fit_pipeline(const ExperimentConfig& config, Emitter& emitter, std::uint64_t master_seed,
                            const std::vector<std::string>& methods)
{
    const ModelShape shape = shape_from_config(config);
    const ThetaVector theta = theta_from_config(config, shape, master_seed);
    const Dataset data = dataset_from_config(config, shape, theta, master_seed);

    const TrickPrior trick{config.get_double("prior.c", 6.0)};
    TruncNormalPrior trunc = TruncNormalPrior::table_defaults(shape);
    trunc.sigma_main_sq = config.get_double("prior.sigma_main_sq", trunc.sigma_main_sq);
    trunc.sigma_int_sq = config.get_double("prior.sigma_int_sq", trunc.sigma_int_sq);
    trunc.trunc_mult = config.get_double("prior.trunc_mult", trunc.trunc_mult);

    const VectorXd true_cells = exact_distribution(theta).visible_marginal;
    const VectorXd empirical = data.cell_counts.cast<double>() / static_cast<double>(data.n);

    const long long max_lag = config.get_int("mcmc.max_lag", 40);
    const long long block_len = config.get_int("mcmc.block_len", 0);

    emitter.emit("data.csv", dataset_csv(data));

    FitOutputs outputs;
    std::string ess_csv = format_csv_row({"cell", "method", "M", "b", "sigma2", "Chat", "Meff"});
    std::string acf_csv = format_csv_row({"cell", "method", "lag", "rho"});
    std::string cells_csv =
        format_csv_row({"cell", "method", "post_mean", "q05", "q95", "true", "empirical", "Meff"});
    std::string comparison_csv = format_csv_row(
        {"method", "tv_post_mean_true", "tv_empirical_true", "median_meff", "acceptance_rate"});

    for (size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string& method = methods[mi];
        const std::uint64_t method_seed =
            config.get_u64("fit.seed", derive_seed({master_seed, kSeedFit, static_cast<std::uint64_t>(mi)}));
        const FitConfig fit = fit_config_from(config, method_seed);

        PosteriorChain chain;
        std::string prior_desc;
        if (method == "bwtplv") {
            if (!(trick.C > 0)) throw ConfigError("prior.c must be positive");
            chain = fit_bwtplv(data, trick, fit);
            prior_desc = "trick(C=" + format_double(trick.C) + ")";
        } else if (method == "bwtnlv") {
            chain = fit_bwtnlv(data, trunc, fit);
            prior_desc = "truncnormal(sigma_main_sq=" + format_double(trunc.sigma_main_sq) +
                         ",sigma_int_sq=" + format_double(trunc.sigma_int_sq) +
                         ",trunc_mult=" + format_double(trunc.trunc_mult) + ")";
        } else {
            chain = fit_bwtnml(data, trunc, fit);
            prior_desc = "truncnormal(sigma_main_sq=" + format_double(trunc.sigma_main_sq) +
                         ",sigma_int_sq=" + format_double(trunc.sigma_int_sq) +
                         ",trunc_mult=" + format_double(trunc.trunc_mult) + ")";
        }

        emitter.emit("chain_" + method + ".csv", chain_csv(chain));
        emitter.emit("chain_" + method + ".json", chain_sidecar_json(chain, prior_desc));

        const MatrixXd series = cell_probability_series(chain);
        const Index b = block_len > 0 ? block_len : default_block_len(series.rows());

        std::vector<double> meffs;
        for (Index cell = 0; cell < series.cols(); ++cell) {
            const EssReport ess = ess_block_means(series.col(cell), b);
            ess_csv += format_csv_row({std::to_string(cell + 1), method, std::to_string(ess.m),
                                       std::to_string(ess.block_len), format_double(ess.sigma2),
                                       format_double(ess.c_hat), format_double(ess.m_eff)});
            meffs.push_back(ess.m_eff);

            const AcfResult rho = acf(series.col(cell), max_lag);
            if (rho.constant_series) {
                acf_csv += format_csv_row({std::to_string(cell + 1), method, "0", "constant"});
            } else {
                for (Index lag = 0; lag <= max_lag; ++lag)
                    acf_csv += format_csv_row({std::to_string(cell + 1), method, std::to_string(lag),
                                               format_double(rho.rho(lag))});
            }
        }

        const PosteriorSummary summary = summarize_posterior(series, true_cells, empirical, b);
        for (const CellSummary& cell : summary.cells)
            cells_csv += format_csv_row({std::to_string(cell.cell), method, format_double(cell.post_mean),
                                         format_double(cell.q05), format_double(cell.q95),
                                         format_double(cell.true_value), format_double(cell.empirical),
                                         format_double(cell.m_eff)});

        std::vector<double> sorted_meffs = meffs;
        std::sort(sorted_meffs.begin(), sorted_meffs.end());
        const double median_meff = sorted_meffs[sorted_meffs.size() / 2];
        comparison_csv += format_csv_row({method, format_double(summary.tv_mean_true),
                                          format_double(summary.tv_empirical_true),
                                          format_double(median_meff),
                                          format_double(chain.acceptance_rate)});

        outputs.chains.push_back(std::move(chain));
        outputs.summaries.push_back(summary);
    }

    emitter.emit("ess.csv", ess_csv);
    emitter.emit("acf.csv", acf_csv);
    emitter.emit("posterior_cells.csv", cells_csv);
    emitter.emit("comparison.csv", comparison_csv);
    return outputs;
}

}  // namespace

CommandResult cmd_diagnose(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::uint64_t master_seed)
{
    Emitter emitter("diagnose", out_dir, master_seed);
    const ModelShape shape = shape_from_config(config);
    const ThetaVector theta = theta_from_config(config, shape, master_seed);
    const HullEstimateSpec hull = hull_from_config(config, master_seed);
    const double eps0 = config.get_double("diag.eps0", 0.05);
    const double eps_modal = config.get_double("diag.eps_modal", 0.1);

    const ProprietyReport report = diagnose(theta, hull, eps_modal, eps0);
    std::string csv = format_csv_row({"theta_id", "n_v", "n_h", "coding", "hull_dist", "epsilon",
                                      "near_degenerate", "lrep", "lrep_per_nv", "delta", "modal_mass",
                                      "gap_max"});
    csv += report_csv_row(config.get_string("theta.source", "explicit"), shape, report);
    emitter.emit("report.csv", csv);

    const ExactDistribution dist = exact_distribution(theta);
    std::string dist_csv = format_csv_row({"state_index", "probability"});
    for (Index s = 0; s < dist.joint.size(); ++s)
        dist_csv += format_csv_row({std::to_string(s), format_double(dist.joint(s))});
    emitter.emit("dist.csv", dist_csv);

    nlohmann::json header;
    header["n_visible"] = shape.n_visible;
    header["n_hidden"] = shape.n_hidden;
    header["coding"] = to_string(shape.coding);
    header["indexing"] = "v1 least significant bit, visibles before hiddens, set bit = high value";
    header["log_gamma"] = dist.log_gamma;
    emitter.emit("dist_header.json", header.dump(2) + "\n");

    return emitter.finish(config);
}

CommandResult cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::uint64_t master_seed)
{
    Emitter emitter("simulate", out_dir, master_seed);
    const ModelShape shape = shape_from_config(config);
    const ThetaVector theta = theta_from_config(config, shape, master_seed);
    const long long n = config.require_int("data.n");
    if (n < 1) throw ConfigError("data.n must be >= 1");
    const std::uint64_t seed = config.get_u64("data.seed", derive_seed({master_seed, kSeedData}));

    const Dataset data = sample_visibles_exact(theta, n, seed);
    emitter.emit("data.csv", dataset_csv(data));
    return emitter.finish(config);
}

CommandResult cmd_grid(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       std::uint64_t master_seed)
{
    Emitter emitter("grid", out_dir, master_seed);

    GridSpec spec;
    const std::string shapes_raw = config.get_string("grid.shapes", "1x1,2x2,4x4");
    const Coding coding = coding_from_string(config.get_string("model.coding", "pm1"));
    std::stringstream ss(shapes_raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto x = item.find('x');
        if (x == std::string::npos)
            throw ConfigError("grid.shapes entries look like 2x3, got '" + item + "'");
        try {
            spec.shapes.emplace_back(std::stoll(item.substr(0, x)), std::stoll(item.substr(x + 1)), coding);
        } catch (const std::domain_error&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("bad grid.shapes entry '" + item + "': " + e.what());
        }
    }
    spec.magnitude_min = config.get_double("grid.mag_min", 0.001);
    spec.magnitude_max = config.get_double("grid.mag_max", 3.0);
    spec.breaks = config.get_int("grid.breaks", 24);
    spec.replicates = config.get_int("grid.replicates", 100);
    spec.seed = config.get_u64("grid.seed", derive_seed({master_seed, kSeedGrid}));
    spec.hull = hull_from_config(config, master_seed);
    spec.eps0 = config.get_double("diag.eps0", 0.05);
    spec.eps_modal = config.get_double("diag.eps_modal", 0.1);
    const std::string spacing = config.get_string("grid.spacing", "linear");
    if (spacing == "linear")
        spec.spacing = GridSpacing::Linear;
    else if (spacing == "geometric")
        spec.spacing = GridSpacing::Geometric;
    else
        throw ConfigError("grid.spacing must be linear or geometric");
    spec.threads = config.get_int("grid.threads", 0);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const GridStudyResult result = run_grid_study(spec);

    std::string rows_csv =
        format_csv_row({"n_v", "n_h", "coding", "g_main", "g_int", "replicate", "hull_dist", "epsilon",
                        "near_degenerate", "lrep", "lrep_per_nv", "delta", "modal_mass", "gap_max"});
    for (const GridRow& row : result.rows) {
        rows_csv += format_csv_row(
            {std::to_string(row.shape.n_visible), std::to_string(row.shape.n_hidden),
             to_string(row.shape.coding), format_double(row.g_main), format_double(row.g_interaction),
             std::to_string(row.replicate), format_double(row.report.hull_distance),
             format_double(row.report.epsilon), row.report.near_degenerate ? "1" : "0",
             format_double(row.report.lrep), format_double(row.report.lrep_per_visible),
             format_double(row.report.delta_one_flip), format_double(row.report.modal_set_mass),
             format_double(row.report.interp_gap_max)});
    }
    emitter.emit("grid_rows.csv", rows_csv);

    std::string agg_csv = format_csv_row(
        {"n_v", "n_h", "g_main", "g_int", "frac_degenerate", "mean_lrep_per_nv", "mean_gap_max", "n_reps"});
    for (const GridAggRow& agg : result.aggregate) {
        agg_csv += format_csv_row({std::to_string(agg.shape.n_visible), std::to_string(agg.shape.n_hidden),
                                   format_double(agg.g_main), format_double(agg.g_interaction),
                                   format_double(agg.frac_degenerate), format_double(agg.mean_lrep_per_nv),
                                   format_double(agg.mean_gap_max), std::to_string(agg.n_reps)});
    }
    emitter.emit("grid_agg.csv", agg_csv);

    emitter.annotate("grid.rows_emitted", std::to_string(result.rows.size()));
    emitter.annotate("grid.aggregate_rows", std::to_string(result.aggregate.size()));
    return emitter.finish(config);
}

CommandResult cmd_fit(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      std::uint64_t master_seed)
{
    Emitter emitter("fit", out_dir, master_seed);
    const std::vector<std::string> methods = parse_methods(config, "bwtnml");
    run_fit_pipeline(config, emitter, master_seed, methods);
    return emitter.finish(config);
}

CommandResult cmd_repro(const std::string& target, const ExperimentConfig& config,
                        const std::filesystem::path& out_dir, std::uint64_t master_seed)
{
    if (target == "table1") {
        Emitter emitter("repro table1", out_dir, master_seed);
        std::string csv = format_csv_row({"name", "value"});
        for (const auto& [name, value] : table1_entries()) csv += format_csv_row({name, value});
        emitter.emit("theta.csv", csv);
        return emitter.finish(config);
    }

    if (target == "table3" || target == "fig12" || target == "fig13") {
        ExperimentConfig merged = preset_config("table1");
        merged.merge(config);
        Emitter emitter("repro " + target, out_dir, master_seed);
        std::vector<std::string> methods;
        if (merged.has("fit.methods"))
            methods = parse_methods(merged, "");
        else if (target == "fig13")
            methods = {"bwtplv", "bwtnml"};
        else
            methods = {"bwtnlv", "bwtnml"};

        const FitOutputs outputs = run_fit_pipeline(merged, emitter, master_seed, methods);

        if (target == "table3") {
            std::string summary = format_csv_row({"metric", "value"});
            std::vector<double> medians;
            for (size_t mi = 0; mi < methods.size(); ++mi) {
                std::vector<double> meffs;
                for (const CellSummary& c : outputs.summaries[mi].cells) meffs.push_back(c.m_eff);
                std::sort(meffs.begin(), meffs.end());
                const double median = meffs[meffs.size() / 2];
                medians.push_back(median);
                summary += format_csv_row({"median_meff_" + methods[mi], format_double(median)});
            }
            if (methods.size() == 2)
                summary += format_csv_row({"ess_ratio_" + methods[1] + "_over_" + methods[0],
                                           format_double(medians[1] / medians[0])});
            emitter.emit("table3_summary.csv", summary);
        }
        return emitter.finish(merged);
    }

    if (target == "fig8to11") {
        ExperimentConfig merged = preset_config("desk");
        merged.merge(config);
        return cmd_grid(merged, out_dir, master_seed);
    }

    throw ConfigError("unknown repro target '" + target +
                      "' (available: table1, table3, fig12, fig13, fig8to11)");
}

}  // namespace rbmprop
