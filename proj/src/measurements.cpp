#include "simrec/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace simrec::measurements {

std::string to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Gaussian: return "gaussian";
        case EnsembleKind::Rademacher: return "rademacher";
        case EnsembleKind::EntrySampling: return "entry_sampling";
        case EnsembleKind::QuadraticLifted: return "quadratic";
    }
    return "?";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
    if (name == "gaussian") return EnsembleKind::Gaussian;
    if (name == "rademacher") return EnsembleKind::Rademacher;
    if (name == "entry_sampling" || name == "entries") return EnsembleKind::EntrySampling;
    if (name == "quadratic" || name == "quadratic_lifted") return EnsembleKind::QuadraticLifted;
    throw ConfigError("unknown ensemble kind: " + name);
}

namespace {

Mat rows_from_indices(const std::vector<int>& idx, int n) {
    Mat a(static_cast<int>(idx.size()), n);
    for (std::size_t i = 0; i < idx.size(); ++i) a(static_cast<int>(i), idx[i]) = 1.0;
    return a;
}

}  // namespace

MeasurementOperator draw(EnsembleKind kind, int m, int d1, int d2, Rng& rng, DrawOptions options) {
    if (m < 1) throw SpecInvalidError("draw: need m >= 1");
    MeasurementOperator op;
    op.kind = kind;
    op.d1 = d1;
    op.d2 = d2;
    op.m = m;
    op.m_requested = m;
    op.seed = rng.seed();
    const int n = d1 * d2;
    switch (kind) {
        case EnsembleKind::Gaussian:
            op.a = gaussian(rng, m, n);
            break;
        case EnsembleKind::Rademacher:
            op.a = rademacher(rng, m, n);
            break;
        case EnsembleKind::EntrySampling: {
            op.entry_indices.resize(m);
            for (int i = 0; i < m; ++i) op.entry_indices[i] = rng.uniform_int(n);
            op.a = rows_from_indices(op.entry_indices, n);
            if (options.dedup) op = dedupe(op);
            break;
        }
        case EnsembleKind::QuadraticLifted: {
            if (d1 != d2) throw SpecInvalidError("quadratic ensemble needs a square signal");
            op.probes = gaussian(rng, m, d1);
            if (options.sphere) {
                const double radius = std::sqrt(static_cast<double>(d1));
                for (int i = 0; i < m; ++i) {
                    double* v = op.probes.row(i);
                    double nrm = 0.0;
                    for (int j = 0; j < d1; ++j) nrm += v[j] * v[j];
                    const double scale = radius / std::sqrt(nrm);
                    for (int j = 0; j < d1; ++j) v[j] *= scale;
                }
            }
            // row i of the realization is vec(v_i v_i^T)
            op.a = Mat(m, n);
            for (int i = 0; i < m; ++i) {
                const double* v = op.probes.row(i);
                double* ai = op.a.row(i);
                for (int p = 0; p < d1; ++p)
                    for (int q = 0; q < d2; ++q) ai[p * d2 + q] = v[p] * v[q];
            }
            break;
        }
    }
    return op;
}

MeasurementOperator dedupe(const MeasurementOperator& op) {
    if (op.kind != EnsembleKind::EntrySampling) return op;
    MeasurementOperator out = op;
    std::set<int> seen;
    out.entry_indices.clear();
    for (int idx : op.entry_indices)
        if (seen.insert(idx).second) out.entry_indices.push_back(idx);
    out.m = static_cast<int>(out.entry_indices.size());
    out.a = rows_from_indices(out.entry_indices, op.n());
    out.dedup_applied = true;
    return out;
}

std::vector<double> apply(const MeasurementOperator& op, const Mat& x) {
    if (x.rows() != op.d1 || x.cols() != op.d2) throw ShapeMismatchError("apply: signal shape mismatch");
    std::vector<double> flat(x.data(), x.data() + x.size());
    return matvec(op.a, flat);
}

Mat adjoint(const MeasurementOperator& op, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != op.m) throw ShapeMismatchError("adjoint: measurement size mismatch");
    std::vector<double> flat = matvec_t(op.a, y);
    Mat x(op.d1, op.d2);
    std::copy(flat.begin(), flat.end(), x.data());
    return x;
}

EnsembleStats stats(const MeasurementOperator& op, const Mat& x0) {
    const double fro = x0.frob();
    if (fro == 0.0) throw ZeroSignalError("stats: zero signal");
    EnsembleStats st;

    // singular values of A^T from the smaller Gram matrix
    const Mat& a = op.a;
    Mat gram = (a.rows() <= a.cols()) ? matmul_a_bt(a, a) : matmul_at_b(a, a);
    EigResult eig = sym_eig(gram);
    const double lam_max = std::max(eig.values.front(), 0.0);
    const double lam_min = std::max(eig.values.back(), 0.0);
    st.sigma_min_adjoint = std::sqrt(lam_min);

    Mat xbar = x0;
    xbar *= 1.0 / fro;
    st.ax0_norm = vec_norm(apply(op, xbar));

    if (lam_min <= 1e-24 * std::max(lam_max, 1e-300))
        throw DegenerateOperatorError("stats: sigma_min(A^T) = 0; dedup the operator first");
    st.ratio = st.ax0_norm * st.ax0_norm / lam_min;

    if (op.kind == EnsembleKind::QuadraticLifted) {
        const int d = op.d1;
        double coh = 0.0;
        for (int i = 0; i < op.m; ++i) {
            const double* vi = op.probes.row(i);
            for (int j = i + 1; j < op.m; ++j) {
                const double* vj = op.probes.row(j);
                double ip = 0.0;
                for (int k = 0; k < d; ++k) ip += vi[k] * vj[k];
                coh = std::max(coh, ip * ip / (static_cast<double>(d) * d));
            }
        }
        st.coherence = coh;
    }
    return st;
}

namespace {

double rho_lower_bound(const Mat& x0, const geometry::ObjectiveSpec& objective) {
    double kappa_min = 1.0;
    double lam_l_sum = 0.0;
    std::vector<double> kappas, lips;
    for (const auto& t : objective.terms) {
        const auto prof = norms::kappa_profile(t.kind, x0);
        kappas.push_back(prof.kappa);
        lips.push_back(prof.lipschitz);
        kappa_min = std::min(kappa_min, prof.kappa);
        lam_l_sum += t.weight * prof.lipschitz;
    }
    if (objective.mode == geometry::ObjectiveMode::WeightedSum && lam_l_sum > 0.0) {
        double mix = 0.0;
        for (std::size_t i = 0; i < kappas.size(); ++i)
            mix += objective.terms[i].weight * lips[i] / lam_l_sum * kappas[i];
        return mix;
    }
    return kappa_min;
}

}  // namespace

CertificateResult failure_certificate(const MeasurementOperator& op, const Mat& x0,
                                      const geometry::ObjectiveSpec& objective) {
    if (objective.cone != geometry::ConeKind::Full)
        throw SpecInvalidError("failure_certificate handles the unconstrained case; use generalized_certificate");
    const EnsembleStats st = stats(op, x0);
    CertificateResult res;
    res.sigma_min_adjoint = st.sigma_min_adjoint;
    res.ax0_norm = st.ax0_norm;
    res.rho_lower = rho_lower_bound(x0, objective);
    res.rhs = std::sqrt(st.ratio);
    res.certified = res.rho_lower > res.rhs;
    return res;
}

GeneralizedCertificateResult generalized_certificate(const MeasurementOperator& op, const Mat& x0,
                                                     const geometry::ObjectiveSpec& objective,
                                                     const std::vector<Mat>& basis, Rng& rng) {
    GeneralizedCertificateResult res;
    const int dim_r = static_cast<int>(basis.size());
    if (dim_r == 0) throw SpecInvalidError("generalized_certificate: empty subspace basis");

    // R must be orthogonal to {y : <x0,y> = 0, y in C*}; sample dual-cone
    // directions with the x0 component removed.
    const double x0_fro_sq = x0.frob_sq();
    if (objective.cone != geometry::ConeKind::Full) {
        const int d = x0.rows();
        for (int trial = 0; trial < 64; ++trial) {
            Mat y;
            if (objective.cone == geometry::ConeKind::Psd) {
                if (trial % 2 == 0) {
                    // PSD part of the dual cone, orthogonal to x0
                    Mat g = gaussian(rng, d, d);
                    Mat w = geometry::cone_project(geometry::ConeKind::Psd, g + g.transpose());
                    const double c = w.dot(x0) / x0_fro_sq;
                    y = w - x0 * c;
                    // keep only cases that are still (nearly) dual feasible
                    Mat back = geometry::cone_project(geometry::ConeKind::Psd, y);
                    if ((y - back).frob() > 1e-6 * std::max(1.0, y.frob())) continue;
                } else {
                    // skew-symmetric part of the dual cone
                    Mat g = gaussian(rng, d, d);
                    y = (g - g.transpose()) * 0.5;
                }
            } else {  // Symmetric cone: dual contains all skew matrices
                Mat g = gaussian(rng, d, d);
                y = (g - g.transpose()) * 0.5;
            }
            const double y_norm = y.frob();
            if (y_norm < 1e-12) continue;
            double proj_sq = 0.0;
            for (const Mat& b : basis) {
                const double c = b.dot(y);
                proj_sq += c * c;
            }
            if (std::sqrt(proj_sq) > 1e-6 * y_norm)
                throw SubspaceNotOrthogonalError("generalized_certificate: R not orthogonal to the dual-cone slice");
        }
    }

    if (op.m < dim_r) {
        res.certified = true;
        res.rank_argument = true;
        return res;
    }

    // sigma_max(P_R(A^T)) is exactly the largest singular value of B^T A^T;
    // entry (r, i) = <basis_r, A_i>
    Mat bt_at(dim_r, op.m);
    for (int r = 0; r < dim_r; ++r) {
        const Mat& b = basis[r];
        const double* bd = b.data();
        for (int i = 0; i < op.m; ++i) {
            const double* ai = op.a.row(i);
            double acc = 0.0;
            for (int k = 0; k < op.n(); ++k) acc += bd[k] * ai[k];
            bt_at(r, i) = acc;
        }
    }
    res.sigma_max_projected = max_singular(bt_at);

    const Mat& a = op.a;
    Mat gram = (a.rows() <= a.cols()) ? matmul_a_bt(a, a) : matmul_at_b(a, a);
    EigResult eig = sym_eig(gram);
    res.sigma_min_adjoint = std::sqrt(std::max(eig.values.back(), 0.0));
    if (res.sigma_min_adjoint <= 1e-12 * std::sqrt(std::max(eig.values.front(), 1e-300)))
        throw DegenerateOperatorError("generalized_certificate: sigma_min(A^T) = 0");

    // sigma_C(A^T): 1 for the full space; otherwise a sampled upper estimate
    // with local refinement, plus the sound analytic cone bound.
    if (objective.cone == geometry::ConeKind::Full) {
        res.sigma_cone = 1.0;
        res.sigma_cone_analytic = 1.0;
    } else {
        const int d = x0.rows();
        res.sigma_cone_analytic = std::sqrt((1.0 - geometry::cone_dbar(objective.cone, d)) / 8.0);
        double best = 1.0;
        std::vector<double> z_best;
        const int coarse = 10000;
        std::vector<double> z(op.m);
        for (int s = 0; s < coarse; ++s) {
            for (int i = 0; i < op.m; ++i) z[i] = rng.normal();
            Mat atz = adjoint(op, z);
            const double full = atz.frob();
            if (full < 1e-12) continue;
            const double proj = geometry::cone_project(objective.cone, atz).frob();
            const double val = proj / full;
            if (val < best) {
                best = val;
                z_best = z;
            }
        }
        for (int round = 0; round < 4 && !z_best.empty(); ++round) {
            const double step = 0.3 / (1 << round);
            for (int s = 0; s < 600; ++s) {
                z = z_best;
                for (int i = 0; i < op.m; ++i) z[i] += step * rng.normal();
                Mat atz = adjoint(op, z);
                const double full = atz.frob();
                if (full < 1e-12) continue;
                const double proj = geometry::cone_project(objective.cone, atz).frob();
                const double val = proj / full;
                if (val < best) {
                    best = val;
                    z_best = z;
                }
            }
        }
        res.sigma_cone = best;
    }

    // rho(R, df(x0)) lower bound via the sign vectors: (upsilon/sqrt(tau)) *
    // min_i rho(e_i, d||x0||_i)
    double upsilon = 1.0;
    double min_sign_corr = 1.0;
    for (const auto& t : objective.terms) {
        const auto ss = norms::sign_support(t.kind, x0);
        double proj_sq = 0.0;
        for (const Mat& b : basis) {
            const double c = b.dot(ss.e);
            proj_sq += c * c;
        }
        const double e_norm = std::sqrt(ss.sign_l2_sq());
        upsilon = std::min(upsilon, std::sqrt(proj_sq) / e_norm);
        min_sign_corr = std::min(min_sign_corr, geometry::sign_vector_correlation(ss));
    }
    res.rho_lower = upsilon / std::sqrt(static_cast<double>(objective.terms.size())) * min_sign_corr;

    // conservative certification path: the analytic cone bound
    const double sigma_cone_sound =
        (objective.cone == geometry::ConeKind::Full) ? 1.0 : res.sigma_cone_analytic;
    res.rhs = res.sigma_max_projected / (sigma_cone_sound * res.sigma_min_adjoint);
    res.certified = res.rho_lower > res.rhs;
    return res;
}

void save_operator(const MeasurementOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_operator: cannot open " + path);
    out << "kind,m,d1,d2,dedup,seed\n";
    out << to_string(op.kind) << "," << op.m << "," << op.d1 << "," << op.d2 << ","
        << (op.dedup_applied ? 1 : 0) << "," << op.seed << "\n";
    out.precision(17);
    if (op.kind == EnsembleKind::EntrySampling) {
        for (std::size_t i = 0; i < op.entry_indices.size(); ++i)
            out << op.entry_indices[i] << (i + 1 < op.entry_indices.size() ? ',' : '\n');
    } else if (op.kind == EnsembleKind::QuadraticLifted) {
        for (int i = 0; i < op.m; ++i) {
            for (int j = 0; j < op.d1; ++j) out << op.probes(i, j) << (j + 1 < op.d1 ? ',' : '\n');
        }
    } else {
        for (int i = 0; i < op.m; ++i) {
            for (int j = 0; j < op.n(); ++j) out << op.a(i, j) << (j + 1 < op.n() ? ',' : '\n');
        }
    }
}

MeasurementOperator load_operator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_operator: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    std::stringstream meta(line);
    std::string kind_str, cell;
    std::getline(meta, kind_str, ',');
    MeasurementOperator op;
    op.kind = ensemble_kind_from_string(kind_str);
    std::getline(meta, cell, ',');
    op.m = std::stoi(cell);
    op.m_requested = op.m;
    std::getline(meta, cell, ',');
    op.d1 = std::stoi(cell);
    std::getline(meta, cell, ',');
    op.d2 = std::stoi(cell);
    std::getline(meta, cell, ',');
    op.dedup_applied = (cell == "1");
    std::getline(meta, cell, ',');
    op.seed = std::stoull(cell);

    const int n = op.n();
    auto read_row = [&](int count, auto&& sink) {
        std::getline(in, line);
        std::stringstream row(line);
        for (int j = 0; j < count; ++j) {
            std::getline(row, cell, ',');
            sink(j, cell);
        }
    };
    if (op.kind == EnsembleKind::EntrySampling) {
        op.entry_indices.resize(op.m);
        read_row(op.m, [&](int j, const std::string& c) { op.entry_indices[j] = std::stoi(c); });
        op.a = Mat(op.m, n);
        for (int i = 0; i < op.m; ++i) op.a(i, op.entry_indices[i]) = 1.0;
    } else if (op.kind == EnsembleKind::QuadraticLifted) {
        op.probes = Mat(op.m, op.d1);
        for (int i = 0; i < op.m; ++i)
            read_row(op.d1, [&](int j, const std::string& c) { op.probes(i, j) = std::stod(c); });
        op.a = Mat(op.m, n);
        for (int i = 0; i < op.m; ++i) {
            const double* v = op.probes.row(i);
            double* ai = op.a.row(i);
            for (int p = 0; p < op.d1; ++p)
                for (int q = 0; q < op.d2; ++q) ai[p * op.d2 + q] = v[p] * v[q];
        }
    } else {
        op.a = Mat(op.m, n);
        for (int i = 0; i < op.m; ++i)
            read_row(n, [&](int j, const std::string& c) { op.a(i, j) = std::stod(c); });
    }
    return op;
}

}  // namespace simrec::measurements
