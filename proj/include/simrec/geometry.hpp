#pragma once

// Correlations, cone projections, Gaussian distances and the geometric
// lower/upper sample-complexity bounds.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "simrec/matcore.hpp"
#include "simrec/norms.hpp"

namespace simrec::geometry {

enum class ConeKind { Full, Symmetric, Psd };

std::string to_string(ConeKind cone);
ConeKind cone_kind_from_string(const std::string& name);

enum class ObjectiveMode { WeightedSum, MaxRatio };

struct ObjectiveTerm {
    norms::NormKind kind = norms::NormKind::L1;
    double weight = 1.0;     // lambda_i (WeightedSum)
    double reference = 0.0;  // ||x0||_(i) denominator (MaxRatio)
};

struct ObjectiveSpec {
    std::vector<ObjectiveTerm> terms;
    ObjectiveMode mode = ObjectiveMode::WeightedSum;
    ConeKind cone = ConeKind::Full;

    double evaluate(const Mat& x) const;
    // Copy with MaxRatio references filled from x0.
    ObjectiveSpec with_references(const Mat& x0) const;
    std::string label() const;
};

Mat cone_project(ConeKind cone, const Mat& x);
Mat polar_project(ConeKind cone, const Mat& x);

// Analytic normalized Gaussian distance of the cone (0 for the full space;
// sqrt(d(d-1)/(2d^2)) for symmetric matrices; sqrt(3/4 - 1/(4d)) for the PSD
// cone).
double cone_dbar(ConeKind cone, int d);

// rho(x, subdifferential of ||x||_kind), in closed form.
double correlation(const Mat& x, norms::NormKind kind);
// rho(e, subdifferential) for a precomputed sign/support; the largest
// correlation any direction can achieve for a decomposable norm.
double sign_vector_correlation(const norms::SignedSupport& ss);

// Monte Carlo lower estimate of rho(R, subdifferential of f at x0) from
// `samples` randomized subgradient draws; reports the sample minimum.
double subspace_correlation(const std::vector<Mat>& basis, const ObjectiveSpec& objective, const Mat& x0,
                            int samples, Rng& rng);

struct McEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

// Monte Carlo estimate of D(M) = E inf_{v in M} ||h - v||_2 where project
// realizes the inner infimum exactly.
McEstimate gaussian_distance(const std::function<Mat(const Mat&)>& project, int d1, int d2, int samples,
                             Rng& rng);

// D(alpha * subdifferential of ||x0||_kind): exact inner projection per
// Gaussian draw (support part pinned at alpha*e, off-support part projected
// onto the alpha-dual ball).
McEstimate dilated_subdiff_distance(norms::NormKind kind, const Mat& x0, double alpha, int samples, Rng& rng);

struct BoundReport {
    double m_low = 0.0;            // (1 - Dbar(C)) n kappa_min^2 / 100
    double m_low_weighted = 0.0;   // n (1 - Dbar(C)) (sum lambda_bar_i kappa_i)^2 / 100
    double m_low_constant_free = 0.0;  // (1 - Dbar(C)) n kappa_min^2, without the 1/100
    double m_up = 0.0;             // (sum lambda_bar_i D(alpha_i d||x0||_i))^2
    double kappa_min = 0.0;
    double dbar_cone = 0.0;
    std::vector<double> kappa;
    std::vector<double> lipschitz;
    std::vector<double> lambda_bar;
    std::vector<double> alpha;
    std::vector<double> dilated_distance;
};

BoundReport lower_bound(const Mat& x0, const ObjectiveSpec& objective);

// The section-5 recipe dilation for a norm at x0 (l1: sqrt(2 log(n/s));
// nuclear: 2 sqrt(max dimension)); kinds without a recipe fall back to a
// 30-point logarithmic grid search around a heuristic center.
double default_alpha(norms::NormKind kind, const Mat& x0);

BoundReport upper_bound(const Mat& x0, const ObjectiveSpec& objective, Rng& rng,
                        const std::vector<double>& alphas = {}, int samples = 2000,
                        bool grid_search = false);

// Closed-form S&L upper bound (sqrt(m_up) + t)^2 form: the d x d, k x k
// support, rank-r instance with lambda_l1 = beta sqrt(log(d/k)) and
// lambda_star = (1-beta) sqrt(d).
double slr_upper_closed_form(int d, int k, int r, double beta);

}  // namespace simrec::geometry
