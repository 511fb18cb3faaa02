#include "simrec/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "simrec/norms.hpp"

namespace simrec::constructions {

void SlrSpec::validate() const {
    if (d1 < 1 || d2 < 1 || k1 < 1 || k2 < 1 || r < 1) throw SpecInvalidError("SlrSpec: positive sizes required");
    if (r > std::min(k1, k2)) throw SpecInvalidError("SlrSpec: rank exceeds the support block");
    if (k1 > d1 || k2 > d2) throw SpecInvalidError("SlrSpec: support exceeds the ambient dimensions");
    if (psd && (d1 != d2 || k1 != k2)) throw SpecInvalidError("SlrSpec: PSD model needs square shapes");
}

namespace {

std::vector<int> random_support(int d, int k, Rng& rng) {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = d - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return perm;
}

int realized_rank(const Mat& block) {
    return svd(block).numerical_rank;
}

}  // namespace

StructuredSignal planted_gaussian(const SlrSpec& spec, Rng& rng) {
    spec.validate();
    Mat block;
    for (int attempt = 0; attempt < 4; ++attempt) {
        if (spec.psd) {
            Mat g = gaussian(rng, spec.k1, spec.r);
            block = matmul_a_bt(g, g);
        } else {
            Mat g1 = gaussian(rng, spec.k1, spec.r);
            Mat g2 = gaussian(rng, spec.k2, spec.r);
            block = matmul_a_bt(g1, g2);
        }
        if (realized_rank(block) == spec.r) break;
        block = Mat();
    }
    if (block.empty()) throw SpecInvalidError("planted_gaussian: could not realize the requested rank");

    StructuredSignal sig;
    sig.spec = spec;
    if (spec.placement == SlrSpec::Placement::TopLeft) {
        sig.row_support.resize(spec.k1);
        sig.col_support.resize(spec.k2);
        std::iota(sig.row_support.begin(), sig.row_support.end(), 0);
        std::iota(sig.col_support.begin(), sig.col_support.end(), 0);
    } else if (spec.psd) {
        sig.row_support = random_support(spec.d1, spec.k1, rng);
        sig.col_support = sig.row_support;  // symmetric placement
    } else {
        sig.row_support = random_support(spec.d1, spec.k1, rng);
        sig.col_support = random_support(spec.d2, spec.k2, rng);
    }
    sig.x = Mat(spec.d1, spec.d2);
    for (int p = 0; p < spec.k1; ++p)
        for (int q = 0; q < spec.k2; ++q) sig.x(sig.row_support[p], sig.col_support[q]) = block(p, q);

    // support must be exactly k1 x k2: no zero row/column inside the block
    const auto rows = norms::sign_support(norms::NormKind::L12Rows, sig.x);
    const auto cols = norms::sign_support(norms::NormKind::L12Cols, sig.x);
    if (rows.rank != spec.k1 || cols.rank != spec.k2)
        throw SpecInvalidError("planted_gaussian: realized support degenerated");
    return sig;
}

Mat hadamard(int p) {
    int n = 1 << p;
    Mat h(n, n);
    h(0, 0) = 1.0;
    for (int sz = 1; sz < n; sz *= 2)
        for (int i = 0; i < sz; ++i)
            for (int j = 0; j < sz; ++j) {
                const double v = h(i, j);
                h(i, j + sz) = v;
                h(i + sz, j) = v;
                h(i + sz, j + sz) = -v;
            }
    return h;
}

StructuredSignal hadamard_slr(int k1, int k2, int r, int d1, int d2) {
    if (!(k2 >= k1 && k1 >= r && r >= 1)) throw SpecInvalidError("hadamard_slr: need k2 >= k1 >= r >= 1");
    if (d1 < k1 || d2 < k2) throw SpecInvalidError("hadamard_slr: ambient shape too small");
    const int p = static_cast<int>(std::floor(std::log2(static_cast<double>(k2))));
    const int h_size = 1 << p;
    Mat h = hadamard(p);

    StructuredSignal sig;
    sig.spec = SlrSpec{d1, d2, k1, k2, r, false, SlrSpec::Placement::TopLeft};
    sig.x = Mat(d1, d2);
    for (int i = 0; i < k1; ++i) {
        const int src = i % r;  // recycle the first r Hadamard rows
        for (int j = 0; j < h_size; ++j) sig.x(i, j) = h(src, j);
    }
    sig.row_support.resize(k1);
    sig.col_support.resize(h_size);
    std::iota(sig.row_support.begin(), sig.row_support.end(), 0);
    std::iota(sig.col_support.begin(), sig.col_support.end(), 0);
    return sig;
}

PhaseRetrievalInstance phase_retrieval_instance(int d, int k, Rng& rng, bool gaussian_values) {
    if (k > d || k < 1) throw SpecInvalidError("phase_retrieval_instance: need 1 <= k <= d");
    PhaseRetrievalInstance inst;
    inst.k = k;
    inst.a = Mat(d, 1);
    const auto support = random_support(d, k, rng);
    for (int idx : support) {
        inst.a(idx, 0) = gaussian_values ? rng.normal() : ((rng.next_u64() & 1u) ? 1.0 : -1.0);
    }
    const double a_norm = inst.a.frob();
    inst.abar_l1 = norms::eval(norms::NormKind::L1, inst.a) / a_norm;
    inst.x0 = matmul_a_bt(inst.a, inst.a);
    return inst;
}

void save_signal_csv(const Mat& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_signal_csv: cannot open " + path);
    out.precision(17);
    for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < x.cols(); ++j) out << x(i, j) << (j + 1 < x.cols() ? ',' : '\n');
    }
}

void save_signal_sidecar(const SlrSpec& spec, std::uint64_t seed, const std::string& csv_path) {
    std::ofstream out(csv_path + ".json");
    if (!out) throw Error("save_signal_sidecar: cannot open " + csv_path + ".json");
    out << "{\"d1\":" << spec.d1 << ",\"d2\":" << spec.d2 << ",\"k1\":" << spec.k1 << ",\"k2\":" << spec.k2
        << ",\"r\":" << spec.r << ",\"psd\":" << (spec.psd ? "true" : "false") << ",\"placement\":\""
        << (spec.placement == SlrSpec::Placement::TopLeft ? "top_left" : "random") << "\",\"seed\":" << seed
        << "}\n";
}

Mat load_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_signal_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("load_signal_csv: empty file " + path);
    Mat x(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw Error("load_signal_csv: ragged rows in " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return x;
}

}  // namespace simrec::constructions
