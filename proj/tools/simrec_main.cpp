// simrec: phase-transition experiments and geometric sample-complexity
// bounds for simultaneously structured recovery.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simrec/harness.hpp"

namespace {

using namespace simrec;

geometry::ObjectiveSpec objective_from_flags(const std::string& norms_arg, const std::string& weights_arg,
                                             const std::string& cone, const std::string& mode) {
    geometry::ObjectiveSpec spec;
    spec.mode = (mode == "max_ratio" || mode == "fbest") ? geometry::ObjectiveMode::MaxRatio
                                                         : geometry::ObjectiveMode::WeightedSum;
    spec.cone = geometry::cone_kind_from_string(cone);
    std::vector<std::string> kinds;
    std::string token;
    for (char c : norms_arg) {
        if (c == '+' || c == ',') {
            if (!token.empty()) kinds.push_back(token);
            token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty()) kinds.push_back(token);
    if (kinds.empty()) throw ConfigError("--objective needs at least one norm");

    std::vector<double> weights;
    token.clear();
    for (char c : weights_arg) {
        if (c == ',') {
            if (!token.empty()) weights.push_back(std::stod(token));
            token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty()) weights.push_back(std::stod(token));

    for (std::size_t i = 0; i < kinds.size(); ++i) {
        geometry::ObjectiveTerm term;
        term.kind = norms::norm_kind_from_string(kinds[i]);
        term.weight = i < weights.size() ? weights[i] : 1.0;
        spec.terms.push_back(term);
    }
    return spec;
}

int cmd_grid(const std::string& config_path, int threads) {
    harness::ExperimentConfig config = harness::load_config(config_path);
    auto run = harness::run_grid(config, threads);
    std::printf("cells: %zu computed, %d skipped (resume), %d with solver errors -> %s\n", run.cells.size(),
                run.cells_skipped, run.cells_with_errors, config.output_csv.c_str());
    for (const auto& c : run.cells)
        std::printf("  d=%-4d m=%-5d rate=%.3f mean_err=%.3g\n", c.d, c.m, c.rate(), c.mean_error);
    return run.cells_with_errors > 0 ? 2 : 0;
}

int cmd_boundary(const std::string& cells_path, double level, bool failure) {
    auto cells = harness::load_cells_csv(cells_path);
    const double success_level = failure ? 1.0 - level : level;
    auto curve = harness::extract_boundary(cells, success_level);
    if (curve.isotonic_applied) std::fprintf(stderr, "note: isotonic regression applied to noisy columns\n");
    for (int d : curve.omitted_columns)
        std::fprintf(stderr, "warning: d=%d lacks coverage on both sides of the level; omitted\n", d);
    std::printf("d,m_star\n");
    for (const auto& [d, m] : curve.points) std::printf("%d,%.4f\n", d, m);
    return 0;
}

int cmd_bounds(const std::string& signal_path, const std::string& norms_arg, const std::string& weights_arg,
               const std::string& cone, const std::string& mode, std::uint64_t seed) {
    Mat x0 = constructions::load_signal_csv(signal_path);
    auto spec = objective_from_flags(norms_arg, weights_arg, cone, mode);
    if (spec.mode == geometry::ObjectiveMode::MaxRatio) spec = spec.with_references(x0);
    auto report = harness::bound_report(x0, spec, seed);
    std::fputs(report.text.c_str(), stdout);
    return 0;
}

int cmd_ensembles(const std::string& kind_str, int d1, int d2, int m, int seeds, bool dedup, bool sphere,
                  const std::string& signal, std::uint64_t seed) {
    auto kind = measurements::ensemble_kind_from_string(kind_str);
    measurements::DrawOptions options{dedup, sphere};
    harness::SignalStyle style = harness::SignalStyle::Flat;
    if (signal == "spiky")
        style = harness::SignalStyle::Spiky;
    else if (signal == "lifted_flat")
        style = harness::SignalStyle::LiftedFlat;
    else if (signal == "lifted_sparse")
        style = harness::SignalStyle::LiftedSparse;
    else if (signal != "flat")
        throw ConfigError("--signal must be flat, spiky, lifted_flat or lifted_sparse");

    auto row = harness::ensemble_row(kind, d1, d2, m, seeds, options, style, seed);
    std::printf("kind=%s d1=%d d2=%d m=%d seeds=%d\n", kind_str.c_str(), d1, d2, m, seeds);
    std::printf("  bound 2m/n = %.6g, mean ratio = %.6g, exceedance = %.3f\n", row.bound, row.mean_ratio,
                row.exceed_fraction);
    if (kind == measurements::EnsembleKind::QuadraticLifted) {
        std::printf("  coherence bound 3 log d/d = %.6g, max = %.6g, exceedance = %.3f\n",
                    row.coherence_bound, row.max_coherence, row.coherence_exceed_fraction);
        std::printf("  empirical c2 (95th pct of sqrt(ratio) d/(sqrt(m) log d)) = %.4g\n", row.c2_estimate);
    }
    return 0;
}

int cmd_complexity(const std::string& config_path, int d, double target, int threads, int objective_index,
                   int m_min, int m_max) {
    harness::ExperimentConfig config = harness::load_config(config_path);
    auto result =
        harness::find_sample_complexity(config, objective_index, d, target, threads, m_min, m_max);
    if (result.monotone_warning)
        std::fprintf(stderr, "warning: success rates not monotone beyond binomial noise\n");
    std::printf("d=%d target=%.2f -> m*=%d (rate %.3f)\n", d, target, result.m_star, result.rate_at_m_star);
    std::printf("m,trials,successes,rate\n");
    for (const auto& p : result.probes)
        std::printf("%d,%d,%d,%.3f\n", p.m, p.trials, p.successes, p.rate());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simultaneously structured recovery experiments"};
    app.require_subcommand(1);

    int threads = 0;

    auto* grid = app.add_subcommand("grid", "run a phase-transition grid from a JSON config");
    std::string grid_config;
    grid->add_option("config", grid_config, "experiment config JSON")->required();
    grid->add_option("--threads", threads, "worker threads (default: SIMREC_THREADS or all cores)");

    auto* boundary = app.add_subcommand("boundary", "extract a success/failure boundary from a cells CSV");
    std::string cells_path;
    double level = 0.95;
    bool failure = false;
    boundary->add_option("cells", cells_path, "cells CSV from `simrec grid`")->required();
    boundary->add_option("--level", level, "level in (0,1)");
    boundary->add_flag("--failure", failure, "interpret the level as a failure rate");

    auto* bounds = app.add_subcommand("bounds", "geometric lower/upper bounds for a signal");
    std::string signal_path, bounds_norms = "l1", bounds_weights = "", bounds_cone = "full",
                             bounds_mode = "weighted";
    std::uint64_t seed = 7;
    bounds->add_option("signal", signal_path, "dense signal CSV")->required();
    bounds->add_option("--objective", bounds_norms, "norms joined by +, e.g. l1+nuclear");
    bounds->add_option("--weights", bounds_weights, "comma-separated weights (default all 1)");
    bounds->add_option("--cone", bounds_cone, "full | symmetric | psd");
    bounds->add_option("--mode", bounds_mode, "weighted | max_ratio");
    bounds->add_option("--seed", seed, "Monte Carlo seed");

    auto* ensembles = app.add_subcommand("ensembles", "ensemble ratio statistics vs analytic bounds");
    std::string ens_kind = "gaussian", ens_signal = "flat";
    int ens_d1 = 20, ens_d2 = 20, ens_m = 100, ens_seeds = 200;
    bool ens_dedup = false, ens_sphere = false;
    ensembles->add_option("--kind", ens_kind, "gaussian | rademacher | entry_sampling | quadratic");
    ensembles->add_option("--d1", ens_d1);
    ensembles->add_option("--d2", ens_d2);
    ensembles->add_option("--m", ens_m);
    ensembles->add_option("--seeds", ens_seeds);
    ensembles->add_flag("--dedup", ens_dedup, "drop duplicate entry-sampling rows");
    ensembles->add_flag("--sphere", ens_sphere, "quadratic probes on the sqrt(d) sphere");
    ensembles->add_option("--signal", ens_signal, "flat | spiky | lifted_flat | lifted_sparse");
    ensembles->add_option("--seed", seed);

    auto* complexity = app.add_subcommand("complexity", "50%-success sample complexity by bisection");
    std::string cx_config;
    int cx_d = 24, cx_objective = 0, cx_m_min = 1, cx_m_max = 0;
    double cx_target = 0.5;
    complexity->add_option("config", cx_config, "experiment config JSON")->required();
    complexity->add_option("--d", cx_d, "signal dimension")->required();
    complexity->add_option("--target", cx_target, "target success rate");
    complexity->add_option("--objective-index", cx_objective, "index into config objectives");
    complexity->add_option("--m-min", cx_m_min);
    complexity->add_option("--m-max", cx_m_max, "0: full range");
    complexity->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    try {
        if (grid->parsed()) return cmd_grid(grid_config, threads);
        if (boundary->parsed()) return cmd_boundary(cells_path, level, failure);
        if (bounds->parsed())
            return cmd_bounds(signal_path, bounds_norms, bounds_weights, bounds_cone, bounds_mode, seed);
        if (ensembles->parsed())
            return cmd_ensembles(ens_kind, ens_d1, ens_d2, ens_m, ens_seeds, ens_dedup, ens_sphere,
                                 ens_signal, seed);
        if (complexity->parsed())
            return cmd_complexity(cx_config, cx_d, cx_target, threads, cx_objective, cx_m_min, cx_m_max);
    } catch (const simrec::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
