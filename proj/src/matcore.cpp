#include "simrec/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace simrec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

Mat::Mat(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
        throw ShapeMismatchError("Mat: entry count does not match rows*cols");
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Mat m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw ShapeMismatchError("Mat::from_rows: ragged rows");
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Mat Mat::column(const std::vector<double>& v) {
    Mat m(static_cast<int>(v.size()), 1);
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
        const double* src = row(i);
        for (int j = 0; j < cols_; ++j) t(j, i) = src[j];
    }
    return t;
}

Mat& Mat::operator+=(const Mat& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Mat Mat::operator+(const Mat& other) const {
    Mat r = *this;
    r += other;
    return r;
}

Mat Mat::operator-(const Mat& other) const {
    Mat r = *this;
    r -= other;
    return r;
}

Mat Mat::operator*(double s) const {
    Mat r = *this;
    r *= s;
    return r;
}

Mat Mat::operator-() const { return *this * -1.0; }

double Mat::frob_sq() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return acc;
}

double Mat::frob() const { return std::sqrt(frob_sq()); }

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

double Mat::dot(const Mat& other) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) acc += data_[k] * other.data_[k];
    return acc;
}

bool Mat::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw ShapeMismatchError("matmul: inner dimensions differ");
    Mat c(a.rows(), b.cols());
    const int n = b.cols();
    for (int i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Mat matmul_at_b(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw ShapeMismatchError("matmul_at_b: row counts differ");
    Mat c(a.cols(), b.cols());
    const int n = b.cols();
    for (int k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (int i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row(i);
            for (int j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

Mat matmul_a_bt(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw ShapeMismatchError("matmul_a_bt: column counts differ");
    Mat c(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int j = 0; j < b.rows(); ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (int k = 0; k < a.cols(); ++k) acc += ai[k] * bj[k];
            ci[j] = acc;
        }
    }
    return c;
}

std::vector<double> matvec(const Mat& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size())) throw ShapeMismatchError("matvec: size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double acc = 0.0;
        for (int j = 0; j < a.cols(); ++j) acc += ai[j] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> matvec_t(const Mat& a, const std::vector<double>& y) {
    if (a.rows() != static_cast<int>(y.size())) throw ShapeMismatchError("matvec_t: size mismatch");
    std::vector<double> x(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        const double* ai = a.row(i);
        for (int j = 0; j < a.cols(); ++j) x[j] += yi * ai[j];
    }
    return x;
}

double vec_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

namespace {

double offdiag_frob_sq(const Mat& a) {
    double acc = 0.0;
    const int n = a.rows();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return acc;
}

// One cyclic-by-rows Jacobi pass over (a, q); a symmetric, q accumulates
// rotations as columns.
void jacobi_sweep(Mat& a, Mat& q, double small) {
    const int n = a.rows();
    for (int p = 0; p < n - 1; ++p) {
        for (int r = p + 1; r < n; ++r) {
            const double apr = a(p, r);
            if (std::fabs(apr) <= small) continue;
            const double app = a(p, p);
            const double arr = a(r, r);
            const double theta = (arr - app) / (2.0 * apr);
            double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
            if (theta < 0.0) t = -t;
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double s = t * c;

            for (int k = 0; k < n; ++k) {
                const double akp = a(k, p);
                const double akr = a(k, r);
                a(k, p) = c * akp - s * akr;
                a(k, r) = s * akp + c * akr;
            }
            for (int k = 0; k < n; ++k) {
                const double apk = a(p, k);
                const double ark = a(r, k);
                a(p, k) = c * apk - s * ark;
                a(r, k) = s * apk + c * ark;
            }
            for (int k = 0; k < n; ++k) {
                const double qkp = q(k, p);
                const double qkr = q(k, r);
                q(k, p) = c * qkp - s * qkr;
                q(k, r) = s * qkp + c * qkr;
            }
        }
    }
}

EigResult jacobi_eig(Mat a, Mat q) {
    const int n = a.rows();
    const double total = a.frob();
    const double tol_sq = 1e-24 * total * total;  // (1e-12 * ||a||_F)^2
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double off = offdiag_frob_sq(a);
        if (off <= tol_sq) break;
        jacobi_sweep(a, q, 1e-300);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

    EigResult res;
    res.values.resize(n);
    res.vectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        res.values[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) res.vectors(i, j) = q(i, order[j]);
    }
    return res;
}

void check_symmetric(const Mat& a) {
    if (a.rows() != a.cols()) throw NotSquareError("sym_eig: matrix is not square");
    const double scale = a.max_abs();
    const double tol = 1e-9 * std::max(scale, 1e-300);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j)
            if (std::fabs(a(i, j) - a(j, i)) > tol) throw NotSymmetricError("sym_eig: matrix is not symmetric");
}

}  // namespace

EigResult sym_eig(const Mat& a) {
    check_symmetric(a);
    Mat work = a;
    // exact symmetrization so rotations stay consistent
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (work(i, j) + work(j, i));
            work(i, j) = v;
            work(j, i) = v;
        }
    return jacobi_eig(std::move(work), Mat::identity(a.rows()));
}

EigResult sym_eig_warm(const Mat& a, const Mat& q0) {
    check_symmetric(a);
    Mat b = matmul_at_b(q0, matmul(a, q0));
    for (int i = 0; i < b.rows(); ++i)
        for (int j = i + 1; j < b.cols(); ++j) {
            const double v = 0.5 * (b(i, j) + b(j, i));
            b(i, j) = v;
            b(j, i) = v;
        }
    return jacobi_eig(std::move(b), q0);
}

SvdResult svd(const Mat& x) {
    if (!x.all_finite()) throw NonFiniteError("svd: input has non-finite entries");
    const int d1 = x.rows();
    const int d2 = x.cols();
    const int r_num = std::min(d1, d2);
    SvdResult res;
    res.s.assign(r_num, 0.0);
    if (r_num == 0) return res;

    const bool tall = d1 >= d2;
    // Gram matrix of the smaller side.
    Mat gram = tall ? matmul_at_b(x, x) : matmul_a_bt(x, x);
    EigResult eig = sym_eig(gram);

    for (int i = 0; i < r_num; ++i) res.s[i] = std::sqrt(std::max(eig.values[i], 0.0));
    const double s_max = res.s[0];
    const double cutoff = 1e-13 * std::max(s_max, 1e-300);

    // Back-substitute the other factor; columns with negligible singular
    // value get filled by orthonormal completion.
    if (tall) {
        res.vt = Mat(r_num, d2);
        for (int i = 0; i < r_num; ++i)
            for (int j = 0; j < d2; ++j) res.vt(i, j) = eig.vectors(j, i);
        res.u = Mat(d1, r_num);
        for (int i = 0; i < r_num; ++i) {
            if (res.s[i] > cutoff) {
                const double inv = 1.0 / res.s[i];
                for (int k = 0; k < d1; ++k) {
                    double acc = 0.0;
                    const double* xk = x.row(k);
                    for (int j = 0; j < d2; ++j) acc += xk[j] * res.vt(i, j);
                    res.u(k, i) = acc * inv;
                }
            }
        }
        // Gram-Schmidt cleanup + completion of the computed columns of u.
        for (int i = 0; i < r_num; ++i) {
            if (res.s[i] > cutoff) {
                for (int p = 0; p < i; ++p) {
                    double proj = 0.0;
                    for (int k = 0; k < d1; ++k) proj += res.u(k, p) * res.u(k, i);
                    for (int k = 0; k < d1; ++k) res.u(k, i) -= proj * res.u(k, p);
                }
                double nrm = 0.0;
                for (int k = 0; k < d1; ++k) nrm += res.u(k, i) * res.u(k, i);
                nrm = std::sqrt(nrm);
                if (nrm > 0.0)
                    for (int k = 0; k < d1; ++k) res.u(k, i) /= nrm;
            } else {
                // pick the basis vector least represented so far
                int best = 0;
                double best_res = -1.0;
                for (int cand = 0; cand < d1; ++cand) {
                    double rep = 0.0;
                    for (int p = 0; p < i; ++p) rep += res.u(cand, p) * res.u(cand, p);
                    const double residual = 1.0 - rep;
                    if (residual > best_res) {
                        best_res = residual;
                        best = cand;
                    }
                }
                for (int k = 0; k < d1; ++k) res.u(k, i) = (k == best) ? 1.0 : 0.0;
                for (int p = 0; p < i; ++p) {
                    double proj = 0.0;
                    for (int k = 0; k < d1; ++k) proj += res.u(k, p) * res.u(k, i);
                    for (int k = 0; k < d1; ++k) res.u(k, i) -= proj * res.u(k, p);
                }
                double nrm = 0.0;
                for (int k = 0; k < d1; ++k) nrm += res.u(k, i) * res.u(k, i);
                nrm = std::sqrt(nrm);
                for (int k = 0; k < d1; ++k) res.u(k, i) /= nrm;
            }
        }
    } else {
        res.u = Mat(d1, r_num);
        for (int i = 0; i < r_num; ++i)
            for (int k = 0; k < d1; ++k) res.u(k, i) = eig.vectors(k, i);
        res.vt = Mat(r_num, d2);
        for (int i = 0; i < r_num; ++i) {
            if (res.s[i] > cutoff) {
                const double inv = 1.0 / res.s[i];
                for (int j = 0; j < d2; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < d1; ++k) acc += x(k, j) * res.u(k, i);
                    res.vt(i, j) = acc * inv;
                }
            }
        }
        for (int i = 0; i < r_num; ++i) {
            if (res.s[i] > cutoff) {
                for (int p = 0; p < i; ++p) {
                    double proj = 0.0;
                    for (int j = 0; j < d2; ++j) proj += res.vt(p, j) * res.vt(i, j);
                    for (int j = 0; j < d2; ++j) res.vt(i, j) -= proj * res.vt(p, j);
                }
                double nrm = 0.0;
                for (int j = 0; j < d2; ++j) nrm += res.vt(i, j) * res.vt(i, j);
                nrm = std::sqrt(nrm);
                if (nrm > 0.0)
                    for (int j = 0; j < d2; ++j) res.vt(i, j) /= nrm;
            } else {
                int best = 0;
                double best_res = -1.0;
                for (int cand = 0; cand < d2; ++cand) {
                    double rep = 0.0;
                    for (int p = 0; p < i; ++p) rep += res.vt(p, cand) * res.vt(p, cand);
                    const double residual = 1.0 - rep;
                    if (residual > best_res) {
                        best_res = residual;
                        best = cand;
                    }
                }
                for (int j = 0; j < d2; ++j) res.vt(i, j) = (j == best) ? 1.0 : 0.0;
                for (int p = 0; p < i; ++p) {
                    double proj = 0.0;
                    for (int j = 0; j < d2; ++j) proj += res.vt(p, j) * res.vt(i, j);
                    for (int j = 0; j < d2; ++j) res.vt(i, j) -= proj * res.vt(p, j);
                }
                double nrm = 0.0;
                for (int j = 0; j < d2; ++j) nrm += res.vt(i, j) * res.vt(i, j);
                nrm = std::sqrt(nrm);
                for (int j = 0; j < d2; ++j) res.vt(i, j) /= nrm;
            }
        }
    }

    res.numerical_rank = 0;
    for (double sv : res.s)
        if (sv > 1e-12 * std::max(s_max, 1e-300)) ++res.numerical_rank;
    return res;
}

double min_singular(const Mat& a) {
    SvdResult r = svd(a);
    return r.s.empty() ? 0.0 : r.s.back();
}

double max_singular(const Mat& a) {
    SvdResult r = svd(a);
    return r.s.empty() ? 0.0 : r.s.front();
}

AffineProjector::AffineProjector(const Mat& a) : a_(&a) {
    Mat gram = matmul_a_bt(a, a);
    eig_ = sym_eig(gram);
    if (eig_.values.empty() || eig_.values.back() <= 1e-20 * std::max(eig_.values.front(), 1e-300))
        throw RankDeficientError("AffineProjector: a·aᵀ is numerically rank deficient");
}

std::vector<double> AffineProjector::solve_min_norm(const std::vector<double>& b) const {
    const int m = a_->rows();
    if (static_cast<int>(b.size()) != m) throw ShapeMismatchError("solve_min_norm: rhs size mismatch");
    std::vector<double> t(m, 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += eig_.vectors(i, j) * b[i];
        t[j] = acc / eig_.values[j];
    }
    std::vector<double> y(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += eig_.vectors(i, j) * t[j];
        y[i] = acc;
    }
    return matvec_t(*a_, y);
}

double AffineProjector::project_inplace(Mat& x, const std::vector<double>& b) const {
    const int m = a_->rows();
    const int n = a_->cols();
    if (static_cast<int>(x.size()) != n) throw ShapeMismatchError("project_inplace: shape mismatch");
    std::vector<double> r(m, 0.0);
    const double* xd = x.data();
    for (int i = 0; i < m; ++i) {
        const double* ai = a_->row(i);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += ai[j] * xd[j];
        r[i] = acc - b[i];
    }
    const double res_norm = vec_norm(r);
    std::vector<double> t(m, 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += eig_.vectors(i, j) * r[i];
        t[j] = acc / eig_.values[j];
    }
    std::vector<double> y(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += eig_.vectors(i, j) * t[j];
        y[i] = acc;
    }
    double* xm = x.data();
    for (int i = 0; i < m; ++i) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        const double* ai = a_->row(i);
        for (int j = 0; j < n; ++j) xm[j] -= yi * ai[j];
    }
    return res_norm;
}

std::vector<double> lstsq_min_norm(const Mat& a, const std::vector<double>& b) {
    AffineProjector proj(a);
    return proj.solve_min_norm(b);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), key_(mix64(seed ^ kGamma)) {}

std::uint64_t Rng::next_u64() { return mix64(key_ + kGamma * ++counter_); }

double Rng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::uniform_sym() { return 2.0 * uniform() - 1.0; }

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
}

int Rng::uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

Rng Rng::derive(std::initializer_list<std::uint64_t> path) const {
    return Rng(hash_combine(seed_, path));
}

std::uint64_t hash_combine(std::uint64_t seed, std::initializer_list<std::uint64_t> vals) {
    std::uint64_t h = mix64(seed ^ kGamma);
    for (std::uint64_t v : vals) h = mix64(h ^ (v + kGamma + (h << 6) + (h >> 2)));
    return h;
}

Mat gaussian(Rng& rng, int rows, int cols) {
    Mat m(rows, cols);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = rng.normal();
    return m;
}

Mat rademacher(Rng& rng, int rows, int cols) {
    Mat m(rows, cols);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    return m;
}

}  // namespace simrec
