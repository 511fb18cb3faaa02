#pragma once

// Convex recovery solvers (consensus ADMM for weighted sums; bisection plus
// cyclic projections for the max-of-ratios objective) and the exhaustive
// nonconvex oracle for rank-1 S&L matrices.

#include <string>
#include <vector>

#include "simrec/geometry.hpp"
#include "simrec/matcore.hpp"
#include "simrec/measurements.hpp"

namespace simrec::solvers {

struct SolveConfig {
    int max_iters = 2000;
    double admm_rho = 1.0;
    double primal_tol = 1e-7;
    double dual_tol = 1e-7;
    double bisection_tol = 1e-5;
    double success_threshold = 1e-4;  // normalized-error cutoff for "recovered"
    bool record_history = false;      // keep per-iteration feasibility residuals
};

struct SolveResult {
    Mat x_hat;
    double normalized_error = -1.0;  // ||x_hat - x0||_F / ||x0||_F when x0 known, else -1
    int iterations = 0;
    bool converged = false;
    double objective_value = 0.0;
    double feasibility_residual = 0.0;
    bool unique = true;  // nonconvex oracle: no materially different fit of the same size
    std::string status;
    std::vector<double> residual_history;  // filled when SolveConfig::record_history
};

// minimize sum_i lambda_i ||x||_(i) s.t. A(x) = b, x in cone; consensus ADMM
// with one proximal block per norm, an affine block and a cone block.
SolveResult solve_weighted(const measurements::MeasurementOperator& op, const std::vector<double>& b,
                           const geometry::ObjectiveSpec& objective, const SolveConfig& cfg,
                           const Mat* x0 = nullptr);

// minimize max_i ||x||_(i) / ref_i s.t. A(x) = b, x in cone; bisection on the
// level t with a cyclic-projection feasibility subproblem per probe.
SolveResult solve_fbest(const measurements::MeasurementOperator& op, const std::vector<double>& b,
                        const geometry::ObjectiveSpec& objective, const SolveConfig& cfg,
                        const Mat* x0 = nullptr);

// Exhaustive support search for X0 = +-a a^T with k-sparse a: for each
// candidate support, a damped Gauss-Newton fit of A(sigma x x^T) = b from a
// spectral initialization plus random restarts. Accepts the smallest support
// size reaching residual 1e-8*||b||. `symmetric` searches both signs (the
// symmetric-cone program); false restricts to the PSD side +a a^T.
SolveResult solve_nonconvex_rank1(const measurements::MeasurementOperator& op, const std::vector<double>& b,
                                  int d, int k_max, bool symmetric, const SolveConfig& cfg, Rng& rng,
                                  const Mat* x0 = nullptr);

std::string result_to_json(const SolveResult& result, const std::string& config_hash = "");

}  // namespace simrec::solvers
