#pragma once

// Instance generators: planted random S&L matrices, Hadamard-based maximal
// kappa constructions, and sparse phase-retrieval instances.

#include <string>
#include <vector>

#include "simrec/matcore.hpp"

namespace simrec::constructions {

struct SlrSpec {
    int d1 = 0, d2 = 0;
    int k1 = 0, k2 = 0;
    int r = 0;
    bool psd = false;
    enum class Placement { TopLeft, Random } placement = Placement::TopLeft;

    void validate() const;
};

struct StructuredSignal {
    Mat x;
    SlrSpec spec;
    std::vector<int> row_support;  // rows carrying the nonzero block
    std::vector<int> col_support;
};

// PSD case embeds G G^T for a k x r Gaussian G; the general case embeds
// G1 G2^T. Realized rank and support are verified before returning.
StructuredSignal planted_gaussian(const SlrSpec& spec, Rng& rng);

// Sylvester-doubling Hadamard matrix of size 2^p.
Mat hadamard(int p);

// The explicit k1 x k2 construction with recycled Hadamard rows, embedded
// top-left in d1 x d2 zeros; simultaneously near-maximal l1, l1,2 and nuclear
// norms after normalization (exact when k1 = 0 mod r and k2 a power of two).
StructuredSignal hadamard_slr(int k1, int k2, int r, int d1, int d2);

struct PhaseRetrievalInstance {
    Mat x0;        // d x d lifted signal a a^T
    Mat a;         // d x 1 k-sparse vector
    double abar_l1 = 0.0;  // ||a||_1 / ||a||_2, the failure-bound scale
    int k = 0;
};

// k-sparse a with +-1 (default) or Gaussian nonzeros on a random support.
PhaseRetrievalInstance phase_retrieval_instance(int d, int k, Rng& rng, bool gaussian_values = false);

void save_signal_csv(const Mat& x, const std::string& path);
void save_signal_sidecar(const SlrSpec& spec, std::uint64_t seed, const std::string& csv_path);
Mat load_signal_csv(const std::string& path);

}  // namespace simrec::constructions
