#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "simrec/constructions.hpp"
#include "simrec/norms.hpp"

using namespace simrec;
using norms::NormKind;

namespace {

double nbar_sq(NormKind kind, const Mat& x) {
    const double v = norms::eval(kind, x) / x.frob();
    return v * v;
}

}  // namespace

TEST_CASE("planted S&L signals round-trip their spec") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(hash_combine(1, {static_cast<std::uint64_t>(trial)}));
        const int d1 = 10 + rng.uniform_int(10);
        const int d2 = 10 + rng.uniform_int(10);
        const int k1 = 2 + rng.uniform_int(5);
        const int k2 = 2 + rng.uniform_int(5);
        const int r = 1 + rng.uniform_int(std::min(k1, k2));
        const bool random_place = trial % 2 == 0;
        constructions::SlrSpec spec{d1, d2, k1, k2, r, false,
                                    random_place ? constructions::SlrSpec::Placement::Random
                                                 : constructions::SlrSpec::Placement::TopLeft};
        auto sig = constructions::planted_gaussian(spec, rng);
        CHECK(norms::sign_support(NormKind::Nuclear, sig.x).rank == r);
        CHECK(norms::sign_support(NormKind::L12Cols, sig.x).rank == k2);
        CHECK(norms::sign_support(NormKind::L12Rows, sig.x).rank == k1);
    }
}

TEST_CASE("planted PSD S&L matrices are PSD with the right block") {
    Rng rng(2);
    constructions::SlrSpec spec{12, 12, 4, 4, 2, true, constructions::SlrSpec::Placement::Random};
    auto sig = constructions::planted_gaussian(spec, rng);
    auto eig = sym_eig(sig.x);
    CHECK(eig.values.back() >= -1e-10);
    CHECK(norms::sign_support(NormKind::Nuclear, sig.x).rank == 2);

    // nuclear norm of the normalized signal lies in [1, sqrt(r)]
    const double nuc = norms::eval(NormKind::Nuclear, sig.x) / sig.x.frob();
    CHECK(nuc >= 1.0 - 1e-12);
    CHECK(nuc <= std::sqrt(2.0) + 1e-12);
}

TEST_CASE("planted spec validation") {
    Rng rng(3);
    constructions::SlrSpec bad{8, 8, 4, 4, 5, false, constructions::SlrSpec::Placement::TopLeft};
    CHECK_THROWS_AS(constructions::planted_gaussian(bad, rng), SpecInvalidError);
    constructions::SlrSpec bad2{8, 8, 9, 4, 1, false, constructions::SlrSpec::Placement::TopLeft};
    CHECK_THROWS_AS(constructions::planted_gaussian(bad2, rng), SpecInvalidError);
    constructions::SlrSpec bad3{8, 9, 4, 4, 1, true, constructions::SlrSpec::Placement::TopLeft};
    CHECK_THROWS_AS(constructions::planted_gaussian(bad3, rng), SpecInvalidError);
}

TEST_CASE("Sylvester Hadamard matrices are orthogonal with +-1 entries") {
    Mat h = constructions::hadamard(3);
    CHECK(h.rows() == 8);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(std::fabs(h[k]) == 1.0);
    Mat gram = matmul_a_bt(h, h);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(gram(i, j) == doctest::Approx(i == j ? 8.0 : 0.0));
}

TEST_CASE("Hadamard S&L construction: exact case (4,8,2)") {
    auto sig = constructions::hadamard_slr(4, 8, 2, 16, 16);
    CHECK(nbar_sq(NormKind::L1, sig.x) == doctest::Approx(32.0).epsilon(1e-10));
    CHECK(nbar_sq(NormKind::Nuclear, sig.x) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(nbar_sq(NormKind::L12Cols, sig.x) == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(nbar_sq(NormKind::L12Rows, sig.x) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("Hadamard S&L construction: factor-1/2 lower bounds across shapes") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + rng.uniform_int(3);
        const int k1 = r + rng.uniform_int(5);
        const int k2 = std::max(k1, 2 + rng.uniform_int(12));
        auto sig = constructions::hadamard_slr(k1, k2, r, k1 + 4, k2 + 4);
        CHECK(nbar_sq(NormKind::L1, sig.x) >= 0.5 * k1 * k2 - 1e-9);
        CHECK(nbar_sq(NormKind::Nuclear, sig.x) >= 0.5 * r - 1e-9);
        CHECK(nbar_sq(NormKind::L12Cols, sig.x) >= 0.5 * k2 - 1e-9);
        CHECK(nbar_sq(NormKind::L12Rows, sig.x) == doctest::Approx(static_cast<double>(k1)).epsilon(1e-9));
    }
}

TEST_CASE("Hadamard S&L with square power-of-two shape is a scaled orthogonal block") {
    auto sig = constructions::hadamard_slr(4, 4, 4, 8, 8);
    auto dec = svd(sig.x);
    for (int i = 0; i < 4; ++i) CHECK(dec.s[i] == doctest::Approx(dec.s[0]).epsilon(1e-10));
    CHECK(dec.numerical_rank == 4);
}

TEST_CASE("Hadamard S&L with k2 not a power of two still meets the bounds") {
    auto sig = constructions::hadamard_slr(3, 6, 2, 10, 10);
    CHECK(nbar_sq(NormKind::L1, sig.x) >= 0.5 * 3 * 6 - 1e-9);
    CHECK(nbar_sq(NormKind::Nuclear, sig.x) >= 0.5 * 2 - 1e-9);
    CHECK(nbar_sq(NormKind::L12Cols, sig.x) >= 0.5 * 6 - 1e-9);
}

TEST_CASE("hadamard_slr input validation") {
    CHECK_THROWS_AS(constructions::hadamard_slr(8, 4, 2, 16, 16), SpecInvalidError);  // k1 > k2
    CHECK_THROWS_AS(constructions::hadamard_slr(4, 8, 2, 3, 16), SpecInvalidError);   // d1 < k1
}

TEST_CASE("phase retrieval instances") {
    Rng rng(5);
    auto inst = constructions::phase_retrieval_instance(12, 4, rng);
    CHECK(inst.abar_l1 * inst.abar_l1 == doctest::Approx(4.0).epsilon(1e-12));  // +-1 values
    CHECK(norms::sign_support(NormKind::L1, inst.a).rank == 4);
    // lifted signal is a a^T
    CHECK((inst.x0 - matmul_a_bt(inst.a, inst.a)).max_abs() == 0.0);

    auto single = constructions::phase_retrieval_instance(9, 1, rng);
    CHECK(norms::sign_support(NormKind::L1, single.x0).rank == 1);

    // spiky vector drives the failure-bound scale below k^2/4
    Mat spiky(5, 1);
    spiky(0, 0) = 1.0;
    for (int i = 1; i < 5; ++i) spiky(i, 0) = 1e-3;
    const double abar = norms::eval(NormKind::L1, spiky) / spiky.frob();
    CHECK(abar <= std::sqrt(5.0 / 2.0));
    CHECK(std::pow(abar, 4.0) < 25.0 / 4.0);
}

TEST_CASE("signal CSV round trip with sidecar") {
    Rng rng(6);
    Mat x = gaussian(rng, 5, 7);
    const std::string path = "signal_roundtrip_test.csv";
    constructions::save_signal_csv(x, path);
    constructions::SlrSpec spec{5, 7, 2, 3, 1, false, constructions::SlrSpec::Placement::TopLeft};
    constructions::save_signal_sidecar(spec, 42, path);
    Mat back = constructions::load_signal_csv(path);
    CHECK(back.rows() == 5);
    CHECK(back.cols() == 7);
    CHECK((back - x).max_abs() <= 1e-15);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}
