#pragma once

// Experiment driver: phase-transition grids with crash-safe CSV persistence,
// boundary extraction, sample-complexity search, ensemble statistics and
// bound reports.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simrec/constructions.hpp"
#include "simrec/geometry.hpp"
#include "simrec/measurements.hpp"
#include "simrec/solvers.hpp"

namespace simrec::harness {

int default_threads();  // SIMREC_THREADS caps hardware concurrency

struct GeneratorSpec {
    enum class Type { Slr, PhaseRetrieval } type = Type::Slr;
    // S&L: block sizes; d comes from the grid, d1 = d2 = d
    int k1 = 8, k2 = 8, r = 1;
    bool psd = true;
    constructions::SlrSpec::Placement placement = constructions::SlrSpec::Placement::TopLeft;
    // phase retrieval: sparsity of the unlifted vector
    int k = 4;
    bool gaussian_values = false;
};

struct ObjectiveDescriptor {
    enum class Solver { Weighted, Fbest, NonconvexRank1 } solver = Solver::Fbest;
    geometry::ObjectiveSpec spec;  // MaxRatio references are filled per instance
    int k_max = 0;                 // nonconvex sparsity cap (0: use generator k)
    bool symmetric = true;
    std::string name;
};

struct GridSpec {
    std::vector<int> d_values;
    std::vector<double> m_values;  // absolute counts, or fractions of n = d1*d2
    bool m_fraction = false;

    std::vector<int> resolve_m(int n) const;
};

struct ExperimentConfig {
    GeneratorSpec generator;
    measurements::EnsembleKind ensemble = measurements::EnsembleKind::Gaussian;
    measurements::DrawOptions ensemble_options;
    std::vector<ObjectiveDescriptor> objectives;
    GridSpec grid;
    int instances_per_cell = 100;
    int boundary_instances = 200;  // top-up for cells near the transition
    std::uint64_t seed = 1;
    solvers::SolveConfig solver;
    std::string output_csv = "cells.csv";
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_hash(const ExperimentConfig& config, int objective_index);

struct CellResult {
    std::string config_hash;
    int d = 0;
    int m = 0;
    int trials = 0;
    int successes = 0;
    double mean_error = 0.0;
    double median_error = 0.0;
    double mean_iterations = 0.0;
    double wall_ms = 0.0;
    int solver_errors = 0;  // instances that threw; recorded, never fatal

    double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

// One grid cell: instance i draws its generator and operator from the child
// seed hash(seed, d, m, i), so cells are independent and reruns reproduce.
CellResult run_cell(const ExperimentConfig& config, int objective_index, int d, int m, int instances,
                    int threads);

struct GridRunResult {
    std::vector<CellResult> cells;
    int cells_with_errors = 0;
    int cells_skipped = 0;  // already present in the output CSV (resume)
};

GridRunResult run_grid(const ExperimentConfig& config, int threads = 0);

std::vector<CellResult> load_cells_csv(const std::string& path);
void append_cells_csv(const std::string& path, const std::vector<CellResult>& cells, bool write_header);

struct BoundaryCurve {
    double level = 0.5;  // success-rate level being crossed
    std::vector<std::pair<int, double>> points;  // (d, interpolated m*)
    std::vector<int> omitted_columns;            // d values lacking coverage
    bool isotonic_applied = false;
};

// Per-d isotonic fit (success nondecreasing in m) followed by linear
// interpolation of the first level crossing.
BoundaryCurve extract_boundary(const std::vector<CellResult>& cells, double level);

struct ComplexityResult {
    int m_star = 0;
    double rate_at_m_star = 0.0;
    std::vector<CellResult> probes;
    bool monotone_warning = false;
};

// Adaptive bisection over m targeting the given success rate (default 50%).
ComplexityResult find_sample_complexity(const ExperimentConfig& config, int objective_index, int d,
                                        double target_rate = 0.5, int threads = 0, int m_min = 1,
                                        int m_max = 0);

enum class SignalStyle { Flat, Spiky, LiftedFlat, LiftedSparse };

struct EnsembleRow {
    measurements::EnsembleKind kind;
    int d1 = 0, d2 = 0, m = 0, seeds = 0;
    double bound = 0.0;            // 2m/n for the linear ensembles
    double mean_ratio = 0.0;
    double exceed_fraction = 0.0;  // fraction of seeds with ratio > bound
    double coherence_bound = 0.0;  // 3 log d / d (quadratic)
    double max_coherence = 0.0;
    double coherence_exceed_fraction = 0.0;
    double c2_estimate = 0.0;      // 95th percentile of sqrt(ratio) d/(sqrt(m) log d)
};

EnsembleRow ensemble_row(measurements::EnsembleKind kind, int d1, int d2, int m, int seeds,
                         measurements::DrawOptions options, SignalStyle style, std::uint64_t seed);

struct BoundReportOutput {
    geometry::BoundReport lower;
    geometry::BoundReport upper;  // filled for weighted-sum objectives
    bool has_upper = false;
    std::string text;
};

BoundReportOutput bound_report(const Mat& x0, const geometry::ObjectiveSpec& objective, std::uint64_t seed);

}  // namespace simrec::harness
