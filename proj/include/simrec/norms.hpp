#pragma once

// The four structure-inducing norms (entrywise l1, column/row l1,2, nuclear)
// with duals, proximal operators, Euclidean ball projections and the
// decomposable-norm sign/support machinery.

#include <string>
#include <vector>

#include "simrec/matcore.hpp"

namespace simrec::norms {

enum class NormKind { L1, L12Cols, L12Rows, Nuclear };

std::string to_string(NormKind kind);
NormKind norm_kind_from_string(const std::string& name);

double eval(NormKind kind, const Mat& x);
double dual_eval(NormKind kind, const Mat& x);

// argmin_z 1/2 ||z - x||_F^2 + tau * ||z||_kind
Mat prox(NormKind kind, const Mat& x, double tau);

// Euclidean projection onto {z : ||z||_kind <= radius}; the sort-based
// simplex algorithm on absolute values / column norms / singular values.
Mat ball_project(NormKind kind, const Mat& x, double radius);

// Euclidean projection onto the dual-norm ball {z : ||z||_kind^* <= radius}.
Mat dual_ball_project(NormKind kind, const Mat& x, double radius);

// Sign vector e and support T of a decomposable norm at x. Entries, columns
// or singular values at or below 1e-9 of the largest count as zero.
struct SignedSupport {
    NormKind kind = NormKind::L1;
    Mat e;
    std::vector<std::uint8_t> mask;  // L1: per entry; L12Cols: per column; L12Rows: per row
    Mat u, v;                        // Nuclear: thin factors at numerical rank
    int rank = 0;                    // Nuclear rank, or support cardinality
    int d1 = 0, d2 = 0;

    Mat project_support(const Mat& z) const;    // P_T
    Mat project_cosupport(const Mat& z) const;  // P_{T^perp}
    double sign_l2_sq() const;                  // ||e||_2^2
    // Largest squared l2 mass of an element of {z in T^perp : ||z||^* <= 1};
    // counts off-support coordinates / zero columns / spare singular
    // directions. Feeds the closed-form correlation.
    double max_cosupport_l2_sq() const;
};

SignedSupport sign_support(NormKind kind, const Mat& x);

// A randomized subgradient: e plus an off-support element of the dual ball
// with magnitude uniform in [0,1] and extreme-point direction (full sign
// pattern / all-unit columns / orthogonal factor), so the sampled set reaches
// the l2-largest subgradients.
Mat subgrad_sample(NormKind kind, const Mat& x, Rng& rng);
Mat subgrad_sample(const SignedSupport& ss, Rng& rng);

struct NormProfile {
    NormKind kind = NormKind::L1;
    double value = 0.0;      // norm of the unit-Frobenius normalized signal
    double lipschitz = 0.0;  // global Lipschitz constant L
    double kappa = 0.0;      // value / lipschitz, in (0, 1]
};

double lipschitz_constant(NormKind kind, int d1, int d2);
NormProfile kappa_profile(NormKind kind, const Mat& x);

}  // namespace simrec::norms
