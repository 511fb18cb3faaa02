#include "simrec/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simrec::norms {

namespace {

constexpr double kSupportTol = 1e-9;  // relative; supports are treated as exact

std::vector<double> column_norms(const Mat& x) {
    std::vector<double> c(x.cols(), 0.0);
    for (int i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i);
        for (int j = 0; j < x.cols(); ++j) c[j] += xi[j] * xi[j];
    }
    for (double& v : c) v = std::sqrt(v);
    return c;
}

std::vector<double> row_norms(const Mat& x) {
    std::vector<double> r(x.rows(), 0.0);
    for (int i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i);
        double acc = 0.0;
        for (int j = 0; j < x.cols(); ++j) acc += xi[j] * xi[j];
        r[i] = std::sqrt(acc);
    }
    return r;
}

// Threshold theta such that sum_i max(v_i - theta, 0) = radius, for
// nonnegative v with sum > radius. Classic sort-based simplex step.
double l1_shrink_threshold(std::vector<double> v, double radius) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        cum += v[j];
        const double cand = (cum - radius) / static_cast<double>(j + 1);
        if (j + 1 == v.size() || v[j + 1] <= cand) {
            theta = cand;
            break;
        }
    }
    return std::max(theta, 0.0);
}

}  // namespace

std::string to_string(NormKind kind) {
    switch (kind) {
        case NormKind::L1: return "l1";
        case NormKind::L12Cols: return "l12";
        case NormKind::L12Rows: return "l12t";
        case NormKind::Nuclear: return "nuclear";
    }
    return "?";
}

NormKind norm_kind_from_string(const std::string& name) {
    if (name == "l1") return NormKind::L1;
    if (name == "l12" || name == "l12cols") return NormKind::L12Cols;
    if (name == "l12t" || name == "l12rows") return NormKind::L12Rows;
    if (name == "nuclear" || name == "trace") return NormKind::Nuclear;
    throw ConfigError("unknown norm kind: " + name);
}

double eval(NormKind kind, const Mat& x) {
    switch (kind) {
        case NormKind::L1: {
            double acc = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) acc += std::fabs(x[k]);
            return acc;
        }
        case NormKind::L12Cols: {
            const auto c = column_norms(x);
            return std::accumulate(c.begin(), c.end(), 0.0);
        }
        case NormKind::L12Rows: {
            const auto r = row_norms(x);
            return std::accumulate(r.begin(), r.end(), 0.0);
        }
        case NormKind::Nuclear: {
            const auto dec = svd(x);
            return std::accumulate(dec.s.begin(), dec.s.end(), 0.0);
        }
    }
    return 0.0;
}

double dual_eval(NormKind kind, const Mat& x) {
    switch (kind) {
        case NormKind::L1: return x.max_abs();
        case NormKind::L12Cols: {
            const auto c = column_norms(x);
            return c.empty() ? 0.0 : *std::max_element(c.begin(), c.end());
        }
        case NormKind::L12Rows: {
            const auto r = row_norms(x);
            return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
        }
        case NormKind::Nuclear: return max_singular(x);
    }
    return 0.0;
}

Mat prox(NormKind kind, const Mat& x, double tau) {
    switch (kind) {
        case NormKind::L1: {
            Mat z = x;
            for (std::size_t k = 0; k < z.size(); ++k) {
                const double v = z[k];
                z[k] = (v > tau) ? v - tau : (v < -tau ? v + tau : 0.0);
            }
            return z;
        }
        case NormKind::L12Cols: {
            Mat z = x;
            const auto c = column_norms(x);
            for (int j = 0; j < z.cols(); ++j) {
                const double scale = (c[j] > tau) ? 1.0 - tau / c[j] : 0.0;
                for (int i = 0; i < z.rows(); ++i) z(i, j) *= scale;
            }
            return z;
        }
        case NormKind::L12Rows: {
            Mat z = x;
            const auto r = row_norms(x);
            for (int i = 0; i < z.rows(); ++i) {
                const double scale = (r[i] > tau) ? 1.0 - tau / r[i] : 0.0;
                double* zi = z.row(i);
                for (int j = 0; j < z.cols(); ++j) zi[j] *= scale;
            }
            return z;
        }
        case NormKind::Nuclear: {
            const auto dec = svd(x);
            Mat z(x.rows(), x.cols());
            for (std::size_t i = 0; i < dec.s.size(); ++i) {
                const double sv = dec.s[i] - tau;
                if (sv <= 0.0) continue;
                for (int p = 0; p < x.rows(); ++p) {
                    const double upi = dec.u(p, static_cast<int>(i)) * sv;
                    if (upi == 0.0) continue;
                    double* zp = z.row(p);
                    const double* vti = dec.vt.row(static_cast<int>(i));
                    for (int q = 0; q < x.cols(); ++q) zp[q] += upi * vti[q];
                }
            }
            return z;
        }
    }
    return x;
}

Mat ball_project(NormKind kind, const Mat& x, double radius) {
    switch (kind) {
        case NormKind::L1: {
            if (eval(NormKind::L1, x) <= radius) return x;
            std::vector<double> mags(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) mags[k] = std::fabs(x[k]);
            const double theta = l1_shrink_threshold(std::move(mags), radius);
            return prox(NormKind::L1, x, theta);
        }
        case NormKind::L12Cols: {
            auto c = column_norms(x);
            if (std::accumulate(c.begin(), c.end(), 0.0) <= radius) return x;
            const double theta = l1_shrink_threshold(c, radius);
            return prox(NormKind::L12Cols, x, theta);
        }
        case NormKind::L12Rows: {
            auto r = row_norms(x);
            if (std::accumulate(r.begin(), r.end(), 0.0) <= radius) return x;
            const double theta = l1_shrink_threshold(r, radius);
            return prox(NormKind::L12Rows, x, theta);
        }
        case NormKind::Nuclear: {
            const auto dec = svd(x);
            const double total = std::accumulate(dec.s.begin(), dec.s.end(), 0.0);
            if (total <= radius) return x;
            const double theta = l1_shrink_threshold(dec.s, radius);
            return prox(NormKind::Nuclear, x, theta);
        }
    }
    return x;
}

Mat dual_ball_project(NormKind kind, const Mat& x, double radius) {
    switch (kind) {
        case NormKind::L1: {
            Mat z = x;
            for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::clamp(z[k], -radius, radius);
            return z;
        }
        case NormKind::L12Cols: {
            Mat z = x;
            const auto c = column_norms(x);
            for (int j = 0; j < z.cols(); ++j) {
                if (c[j] <= radius) continue;
                const double scale = radius / c[j];
                for (int i = 0; i < z.rows(); ++i) z(i, j) *= scale;
            }
            return z;
        }
        case NormKind::L12Rows: {
            Mat z = x;
            const auto r = row_norms(x);
            for (int i = 0; i < z.rows(); ++i) {
                if (r[i] <= radius) continue;
                const double scale = radius / r[i];
                double* zi = z.row(i);
                for (int j = 0; j < z.cols(); ++j) zi[j] *= scale;
            }
            return z;
        }
        case NormKind::Nuclear: {
            const auto dec = svd(x);
            Mat z(x.rows(), x.cols());
            for (std::size_t i = 0; i < dec.s.size(); ++i) {
                const double sv = std::min(dec.s[i], radius);
                if (sv <= 0.0) continue;
                for (int p = 0; p < x.rows(); ++p) {
                    const double upi = dec.u(p, static_cast<int>(i)) * sv;
                    if (upi == 0.0) continue;
                    double* zp = z.row(p);
                    const double* vti = dec.vt.row(static_cast<int>(i));
                    for (int q = 0; q < x.cols(); ++q) zp[q] += upi * vti[q];
                }
            }
            return z;
        }
    }
    return x;
}

SignedSupport sign_support(NormKind kind, const Mat& x) {
    if (x.frob() == 0.0) throw ZeroSignalError("sign_support: zero signal");
    SignedSupport ss;
    ss.kind = kind;
    ss.d1 = x.rows();
    ss.d2 = x.cols();
    switch (kind) {
        case NormKind::L1: {
            const double tol = kSupportTol * x.max_abs();
            ss.e = Mat(x.rows(), x.cols());
            ss.mask.assign(x.size(), 0);
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (std::fabs(x[k]) > tol) {
                    ss.mask[k] = 1;
                    ss.e[k] = (x[k] > 0.0) ? 1.0 : -1.0;
                    ++ss.rank;
                }
            }
            break;
        }
        case NormKind::L12Cols: {
            const auto c = column_norms(x);
            const double tol = kSupportTol * *std::max_element(c.begin(), c.end());
            ss.e = Mat(x.rows(), x.cols());
            ss.mask.assign(x.cols(), 0);
            for (int j = 0; j < x.cols(); ++j) {
                if (c[j] > tol) {
                    ss.mask[j] = 1;
                    ++ss.rank;
                    for (int i = 0; i < x.rows(); ++i) ss.e(i, j) = x(i, j) / c[j];
                }
                // zero columns stay zero in e
            }
            break;
        }
        case NormKind::L12Rows: {
            const auto r = row_norms(x);
            const double tol = kSupportTol * *std::max_element(r.begin(), r.end());
            ss.e = Mat(x.rows(), x.cols());
            ss.mask.assign(x.rows(), 0);
            for (int i = 0; i < x.rows(); ++i) {
                if (r[i] > tol) {
                    ss.mask[i] = 1;
                    ++ss.rank;
                    for (int j = 0; j < x.cols(); ++j) ss.e(i, j) = x(i, j) / r[i];
                }
            }
            break;
        }
        case NormKind::Nuclear: {
            const auto dec = svd(x);
            const double tol = kSupportTol * dec.s.front();
            int r = 0;
            for (double sv : dec.s)
                if (sv > tol) ++r;
            ss.rank = r;
            ss.u = Mat(x.rows(), r);
            ss.v = Mat(x.cols(), r);
            for (int i = 0; i < r; ++i) {
                for (int p = 0; p < x.rows(); ++p) ss.u(p, i) = dec.u(p, i);
                for (int q = 0; q < x.cols(); ++q) ss.v(q, i) = dec.vt(i, q);
            }
            ss.e = matmul_a_bt(ss.u, ss.v);
            break;
        }
    }
    return ss;
}

Mat SignedSupport::project_support(const Mat& z) const {
    switch (kind) {
        case NormKind::L1: {
            Mat p(z.rows(), z.cols());
            for (std::size_t k = 0; k < z.size(); ++k)
                if (mask[k]) p[k] = z[k];
            return p;
        }
        case NormKind::L12Cols: {
            Mat p(z.rows(), z.cols());
            for (int j = 0; j < z.cols(); ++j)
                if (mask[j])
                    for (int i = 0; i < z.rows(); ++i) p(i, j) = z(i, j);
            return p;
        }
        case NormKind::L12Rows: {
            Mat p(z.rows(), z.cols());
            for (int i = 0; i < z.rows(); ++i)
                if (mask[i])
                    for (int j = 0; j < z.cols(); ++j) p(i, j) = z(i, j);
            return p;
        }
        case NormKind::Nuclear: {
            // P_T(z) = z - (I - uuᵀ) z (I - vvᵀ)
            return z - project_cosupport(z);
        }
    }
    return z;
}

Mat SignedSupport::project_cosupport(const Mat& z) const {
    if (kind != NormKind::Nuclear) return z - project_support(z);
    // (I - uuᵀ) z (I - vvᵀ)
    Mat uz = matmul_at_b(u, z);          // r × d2
    Mat left = z - matmul(u, uz);        // (I - uuᵀ) z
    Mat lv = matmul(left, v);            // d1 × r
    return left - matmul_a_bt(lv, v);
}

double SignedSupport::sign_l2_sq() const { return e.frob_sq(); }

double SignedSupport::max_cosupport_l2_sq() const {
    switch (kind) {
        case NormKind::L1: return static_cast<double>(static_cast<int>(mask.size()) - rank);
        case NormKind::L12Cols: return static_cast<double>(d2 - rank);
        case NormKind::L12Rows: return static_cast<double>(d1 - rank);
        case NormKind::Nuclear: return static_cast<double>(std::min(d1, d2) - rank);
    }
    return 0.0;
}

Mat subgrad_sample(NormKind kind, const Mat& x, Rng& rng) {
    return subgrad_sample(sign_support(kind, x), rng);
}

Mat subgrad_sample(const SignedSupport& ss, Rng& rng) {
    const double t = rng.uniform();
    Mat g = ss.e;
    switch (ss.kind) {
        case NormKind::L1: {
            for (std::size_t k = 0; k < g.size(); ++k)
                if (!ss.mask[k]) g[k] = (rng.next_u64() & 1u) ? t : -t;
            return g;
        }
        case NormKind::L12Cols: {
            for (int j = 0; j < g.cols(); ++j) {
                if (ss.mask[j]) continue;
                double nrm_sq = 0.0;
                std::vector<double> dir(g.rows());
                for (int i = 0; i < g.rows(); ++i) {
                    dir[i] = rng.normal();
                    nrm_sq += dir[i] * dir[i];
                }
                const double scale = (nrm_sq > 0.0) ? t / std::sqrt(nrm_sq) : 0.0;
                for (int i = 0; i < g.rows(); ++i) g(i, j) = dir[i] * scale;
            }
            return g;
        }
        case NormKind::L12Rows: {
            for (int i = 0; i < g.rows(); ++i) {
                if (ss.mask[i]) continue;
                double nrm_sq = 0.0;
                std::vector<double> dir(g.cols());
                for (int j = 0; j < g.cols(); ++j) {
                    dir[j] = rng.normal();
                    nrm_sq += dir[j] * dir[j];
                }
                const double scale = (nrm_sq > 0.0) ? t / std::sqrt(nrm_sq) : 0.0;
                for (int j = 0; j < g.cols(); ++j) g(i, j) = dir[j] * scale;
            }
            return g;
        }
        case NormKind::Nuclear: {
            const int spare = std::min(ss.d1, ss.d2) - ss.rank;
            if (spare <= 0) return g;
            // random orthogonal element of T^perp with all singular values t
            Mat w = gaussian(rng, ss.d1, ss.d2);
            Mat uz = matmul_at_b(ss.u, w);
            w -= matmul(ss.u, uz);
            Mat wv = matmul(w, ss.v);
            w -= matmul_a_bt(wv, ss.v);
            const auto dec = svd(w);
            const double cutoff = 1e-10 * std::max(dec.s.front(), 1e-300);
            for (std::size_t i = 0; i < dec.s.size(); ++i) {
                if (dec.s[i] <= cutoff) continue;
                for (int p = 0; p < ss.d1; ++p) {
                    const double upi = dec.u(p, static_cast<int>(i)) * t;
                    double* gp = g.row(p);
                    const double* vti = dec.vt.row(static_cast<int>(i));
                    for (int q = 0; q < ss.d2; ++q) gp[q] += upi * vti[q];
                }
            }
            return g;
        }
    }
    return g;
}

double lipschitz_constant(NormKind kind, int d1, int d2) {
    switch (kind) {
        case NormKind::L1: return std::sqrt(static_cast<double>(d1) * d2);
        case NormKind::L12Cols: return std::sqrt(static_cast<double>(d2));
        case NormKind::L12Rows: return std::sqrt(static_cast<double>(d1));
        case NormKind::Nuclear: return std::sqrt(static_cast<double>(std::min(d1, d2)));
    }
    return 1.0;
}

NormProfile kappa_profile(NormKind kind, const Mat& x) {
    const double fro = x.frob();
    if (fro == 0.0) throw ZeroSignalError("kappa_profile: zero signal");
    NormProfile p;
    p.kind = kind;
    p.value = eval(kind, x) / fro;
    p.lipschitz = lipschitz_constant(kind, x.rows(), x.cols());
    p.kappa = p.value / p.lipschitz;
    return p;
}

}  // namespace simrec::norms
