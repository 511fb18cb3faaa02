#pragma once

// Measurement ensembles (Gaussian / Rademacher / entry sampling / lifted
// quadratic) with apply/adjoint, spectral statistics and the deterministic
// failure certificates.

#include <optional>
#include <string>
#include <vector>

#include "simrec/geometry.hpp"
#include "simrec/matcore.hpp"

namespace simrec::measurements {

enum class EnsembleKind { Gaussian, Rademacher, EntrySampling, QuadraticLifted };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

struct DrawOptions {
    bool dedup = false;   // EntrySampling: drop duplicate rows
    bool sphere = false;  // QuadraticLifted: probes uniform on the radius-sqrt(d) sphere
};

// Desk scale keeps m*n small, so the realization is always an explicit dense
// matrix acting on the flattened signal; apply() is exactly a·vec(x).
struct MeasurementOperator {
    EnsembleKind kind = EnsembleKind::Gaussian;
    int m = 0;
    int d1 = 0, d2 = 0;
    Mat a;                           // m × (d1·d2)
    std::vector<int> entry_indices;  // EntrySampling: sampled flat indices
    Mat probes;                      // QuadraticLifted: m × d rows v_i
    bool dedup_applied = false;
    int m_requested = 0;
    std::uint64_t seed = 0;

    int n() const { return d1 * d2; }
};

MeasurementOperator draw(EnsembleKind kind, int m, int d1, int d2, Rng& rng, DrawOptions options = {});
// The entry-sampling operator with duplicate rows removed; identical null
// space, sigma_min exactly 1.
MeasurementOperator dedupe(const MeasurementOperator& op);

std::vector<double> apply(const MeasurementOperator& op, const Mat& x);
Mat adjoint(const MeasurementOperator& op, const std::vector<double>& y);

struct EnsembleStats {
    double sigma_min_adjoint = 0.0;
    double ax0_norm = 0.0;  // ||A xbar_0||_2
    double ratio = 0.0;     // ax0_norm^2 / sigma_min_adjoint^2
    std::optional<double> coherence;  // QuadraticLifted: max (v_i' v_j)^2 / d^2
};

EnsembleStats stats(const MeasurementOperator& op, const Mat& x0);

struct CertificateResult {
    bool certified = false;
    double rho_lower = 0.0;  // closed-form lower bound on rho(x0, df(x0))
    double rhs = 0.0;        // ||A xbar0|| / sigma_min(A^T)
    double sigma_min_adjoint = 0.0;
    double ax0_norm = 0.0;
};

// Deterministic failure test: certified means x0 provably is not a minimizer
// of the (cone-free) program for any admissible scalarization.
CertificateResult failure_certificate(const MeasurementOperator& op, const Mat& x0,
                                      const geometry::ObjectiveSpec& objective);

struct GeneralizedCertificateResult {
    bool certified = false;
    bool rank_argument = false;  // m < dim(R) forces failure outright
    double rho_lower = 0.0;
    double rhs = 0.0;
    double sigma_max_projected = 0.0;
    double sigma_cone = 0.0;          // sampled estimate of sigma_C(A^T)
    double sigma_cone_analytic = 0.0; // sqrt((1 - Dbar)/8) sound lower bound
    double sigma_min_adjoint = 0.0;
};

// Subspace-projected certificate; R is given as an orthonormal basis and must
// be orthogonal to {y : <x0,y> = 0, y in C*} (verified by sampling dual-cone
// directions).
GeneralizedCertificateResult generalized_certificate(const MeasurementOperator& op, const Mat& x0,
                                                     const geometry::ObjectiveSpec& objective,
                                                     const std::vector<Mat>& basis, Rng& rng);

void save_operator(const MeasurementOperator& op, const std::string& path);
MeasurementOperator load_operator(const std::string& path);

}  // namespace simrec::measurements
