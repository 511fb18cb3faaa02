#pragma once

// Self-contained dense linear algebra and seeded randomness for desk-scale
// problems (dimensions up to a few hundred). Everything is plain row-major
// double storage; no external BLAS/LAPACK.

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "simrec/errors.hpp"

namespace simrec {

class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}
    Mat(int rows, int cols, std::vector<double> entries);

    static Mat identity(int n);
    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Mat column(const std::vector<double>& v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

    Mat transpose() const;

    Mat& operator+=(const Mat& other);
    Mat& operator-=(const Mat& other);
    Mat& operator*=(double s);
    Mat operator+(const Mat& other) const;
    Mat operator-(const Mat& other) const;
    Mat operator*(double s) const;
    Mat operator-() const;

    double frob_sq() const;
    double frob() const;
    double max_abs() const;
    double dot(const Mat& other) const;  // Frobenius inner product
    bool all_finite() const;
    bool same_shape(const Mat& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);
// aᵀ·b and a·bᵀ without materializing the transpose.
Mat matmul_at_b(const Mat& a, const Mat& b);
Mat matmul_a_bt(const Mat& a, const Mat& b);
std::vector<double> matvec(const Mat& a, const std::vector<double>& x);
std::vector<double> matvec_t(const Mat& a, const std::vector<double>& y);  // aᵀ·y

double vec_norm(const std::vector<double>& v);
double vec_dot(const std::vector<double>& a, const std::vector<double>& b);

struct EigResult {
    std::vector<double> values;  // nonincreasing
    Mat vectors;                 // columns are eigenvectors, orthogonal
};

// Cyclic Jacobi; sweeps until the off-diagonal Frobenius mass drops below
// 1e-12 relative or 50 sweeps. Throws NotSquareError / NotSymmetricError.
EigResult sym_eig(const Mat& a);
// Same, but rotates into the basis q0 first. Useful when a is close to
// q0·diag·q0ᵀ (e.g. repeated projections of slowly-varying iterates).
EigResult sym_eig_warm(const Mat& a, const Mat& q0);

struct SvdResult {
    Mat u;                  // d1 × r_num
    std::vector<double> s;  // nonincreasing, length r_num = min(d1, d2)
    Mat vt;                 // r_num × d2
    int numerical_rank = 0; // count of s[i] > 1e-12 * s[0]
};

// Thin SVD via eigendecomposition of the smaller Gram matrix. Loses half the
// digits on tiny singular values; fine for tolerance checks at 1e-8 and up.
SvdResult svd(const Mat& x);
double min_singular(const Mat& a);
double max_singular(const Mat& a);

// Minimum-norm solution of a·x = b for full-row-rank a, via sym_eig of a·aᵀ.
// Throws RankDeficientError when the smallest eigenvalue of a·aᵀ falls below
// 1e-20 times the largest.
std::vector<double> lstsq_min_norm(const Mat& a, const std::vector<double>& b);

// Precomputed factorization of a·aᵀ for repeated min-norm solves and
// projections onto {x : a·vec(x) = b}.
class AffineProjector {
  public:
    explicit AffineProjector(const Mat& a);

    std::vector<double> solve_min_norm(const std::vector<double>& b) const;
    // x ← x − aᵀ(aaᵀ)⁻¹(a·vec(x) − b); returns ‖a·vec(x) − b‖ before the update.
    double project_inplace(Mat& x, const std::vector<double>& b) const;
    double smallest_gram_eig() const { return eig_.values.back(); }
    double largest_gram_eig() const { return eig_.values.front(); }

  private:
    const Mat* a_;
    EigResult eig_;  // of a·aᵀ
};

// Counter-based generator (splitmix-style): the k-th draw is a pure function
// of (key, k), so child streams derived by hashing never overlap in practice
// and identical seeds replay identical streams.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();       // (0, 1]
    double uniform_sym();   // [-1, 1]
    double normal();        // N(0,1), Box-Muller
    int uniform_int(int n); // {0, ..., n-1}

    // Child generator for an independent substream; derive({d, m, instance})
    // is how grid cells get their per-cell seeds.
    Rng derive(std::initializer_list<std::uint64_t> path) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t hash_combine(std::uint64_t seed, std::initializer_list<std::uint64_t> vals);

Mat gaussian(Rng& rng, int rows, int cols);
Mat rademacher(Rng& rng, int rows, int cols);

}  // namespace simrec
