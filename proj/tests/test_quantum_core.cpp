#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "cvqds/error.hpp"
#include "cvqds/quantum_core.hpp"

using namespace cvqds;

TEST_CASE("coherent overlap has the Gaussian modulus") {
    const Complex a(0.3, -0.7);
    const Complex b(-1.1, 0.4);
    CHECK(std::abs(coherent_overlap(a, a)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(coherent_overlap(a, b)) == doctest::Approx(std::exp(-0.5 * std::norm(a - b))).epsilon(1e-14));
    const Complex ov = coherent_overlap(a, b);
    const Complex fock = oracle::coherent(a, 60).dot(oracle::coherent(b, 60));
    CHECK(std::abs(ov - fock) < 1e-13);
}

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS(CoherentMixture({}, {}), InvalidArgument);
    CHECK_THROWS_AS(CoherentMixture({1.0}, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(CoherentMixture({1.0, 2.0}, {0.6, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(CoherentMixture({1.0, 2.0}, {-0.1, 1.1}), InvalidArgument);
    CHECK_THROWS_AS(CoherentMixture({Complex(NAN, 0)}, {1.0}), InvalidArgument);
    CHECK_NOTHROW(CoherentMixture::uniform({1.0, -1.0, Complex(0, 1)}));
}

TEST_CASE("mixture entropy: identical states give zero, far-apart states give log2 K") {
    CHECK(mixture_entropy(CoherentMixture::uniform({0.5, 0.5, 0.5})) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mixture_entropy(CoherentMixture::uniform({-8.0, 8.0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mixture_entropy(CoherentMixture::uniform({10.0, -10.0, Complex(0, 10), Complex(0, -10)})) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two-state mixture entropy matches the closed form") {
    // Eigenvalues of (|a><a| + |-a><-a|)/2 are (1 +- e^{-2|a|^2})/2.
    for (double a : {0.1, 0.5, 1.0, 1.7}) {
        const double ov = std::exp(-2.0 * a * a);
        const double l1 = 0.5 * (1.0 + ov);
        const double l2 = 0.5 * (1.0 - ov);
        const double expected = -l1 * std::log2(l1) - (l2 > 0 ? l2 * std::log2(l2) : 0.0);
        CHECK(mixture_entropy(CoherentMixture::uniform({a, -a})) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("Gram entropy agrees with Fock-space entropy of the same mixture") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_real_distribution<double> wdist(0.1, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int k = 2 + rep % 5;
        std::vector<Complex> amps;
        std::vector<double> w;
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            amps.emplace_back(u(gen), u(gen));
            w.push_back(wdist(gen));
            total += w.back();
        }
        for (double& x : w) x /= total;
        double fix = 1.0;
        for (int i = 0; i + 1 < k; ++i) fix -= w[i];
        w.back() = fix;
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(50, 50);
        for (int i = 0; i < k; ++i) {
            const Eigen::VectorXcd v = oracle::coherent(amps[i], 50);
            rho += w[i] * v * v.adjoint();
        }
        CHECK(mixture_entropy(CoherentMixture(amps, w)) == doctest::Approx(oracle::entropy_bits(rho)).epsilon(1e-9));
    }
}

TEST_CASE("coherent Fock vector and truncation deficit") {
    const Complex a(1.2, 0.5);
    const FockVector v = coherent_fock_vector(a, 40);
    CHECK((v.coefficients() - oracle::coherent(a, 40)).norm() < 1e-14);
    CHECK(v.truncation_deficit() == doctest::Approx(1.0 - v.squared_norm()).epsilon(1e-12));

    // At small dim the deficit is the Poisson tail, resolved far below 1e-16.
    const FockVector small = coherent_fock_vector(0.1, 6, 1.0);
    double tail = 0.0;
    for (int n = 6; n < 30; ++n) tail += std::exp(-0.01) * std::pow(0.01, n) / std::tgamma(n + 1.0);
    CHECK(small.truncation_deficit() == doctest::Approx(tail).epsilon(1e-10));

    try {
        coherent_fock_vector(3.0, 5);
        FAIL("expected a truncation error");
    } catch (const TruncationError& e) {
        CHECK(e.suggested_dim() > 5);
        CHECK_NOTHROW(coherent_fock_vector(3.0, e.suggested_dim()));
    }
}

TEST_CASE("displaced number states match the matrix exponential") {
    for (Complex beta : {Complex(0.0, 0.0), Complex(0.7, -0.2), Complex(-1.3, 0.9)}) {
        const int dim = 30;
        const int cols = 6;
        const Eigen::MatrixXcd w = displaced_number_states(beta, dim, cols);
        const Eigen::MatrixXcd d = oracle::displacement(beta, dim);
        CHECK((w - d.leftCols(cols)).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("density matrix checks") {
    Eigen::MatrixXcd bad(2, 2);
    bad << 0.5, Complex(0, 0.1), 0.0, 0.5;
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidState);
    CHECK_THROWS_AS(DensityMatrix{Eigen::MatrixXcd(2, 3)}, InvalidState);
    const std::vector<double> pops{0.25, 0.25, 0.25, 0.25};
    CHECK(von_neumann_entropy(DensityMatrix::diagonal(pops)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(von_neumann_entropy(DensityMatrix::diagonal(std::vector<double>{0.5, 0.2})), InvalidState);
    CHECK(von_neumann_entropy(DensityMatrix::diagonal(std::vector<double>{0.5, 0.2}).normalized()) ==
          doctest::Approx(0.863120568566631).epsilon(1e-12));
    Eigen::VectorXcd v(3);
    v << 1.0, Complex(0, 2.0), -1.0;
    CHECK(von_neumann_entropy(DensityMatrix::pure(v)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("entropy of spectrum: cutoff, clamp and rejection") {
    const std::vector<double> clamped{1.0, -5e-11, 1e-16};
    CHECK(entropy_of_spectrum(clamped) == 0.0);
    const std::vector<double> negative{1.1, -1e-3};
    CHECK_THROWS_AS(entropy_of_spectrum(negative), InvalidState);
}

TEST_CASE("TMSV coefficients are normalized and the cutoff honours its tolerance") {
    for (double n_bar : {0.0, 1e-4, 0.08, 0.5, 2.0}) {
        const auto t = TmsvParams::from_mean_photons(n_bar);
        CHECK(std::sinh(t.squeezing()) * std::sinh(t.squeezing()) == doctest::Approx(n_bar).epsilon(1e-12));
        double total = 0.0;
        double mean = 0.0;
        for (int m = 0; m < 400; ++m) {
            const double g2 = t.coefficient(m) * t.coefficient(m);
            total += g2;
            mean += m * g2;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mean == doctest::Approx(n_bar).epsilon(1e-9));
        const int m_max = t.cutoff();
        double tail = 0.0;
        for (int m = m_max + 1; m < 400; ++m) tail += t.coefficient(m) * t.coefficient(m);
        CHECK(tail < 1e-12);
    }
    CHECK_THROWS_AS(TmsvParams::from_mean_photons(-1.0), InvalidArgument);
}


TEST_CASE("cloner conditional state matches the direct construction and the outcome density") {
    const double t = 0.6;
    const double n_bar = 0.3;
    const auto tmsv = TmsvParams::from_mean_photons(n_bar);
    const int dim = 30;
    for (double scale : {1.0, std::sqrt(0.5)}) {
        for (Complex c : {Complex(0.2, 0.1), Complex(-0.8, 1.1)}) {
            const Complex alpha(0.9, 0.3);
            const TwoModeVector s = cloner_conditional_state(alpha, t, tmsv, c, dim, scale);
            const Eigen::VectorXcd ref = oracle::cloner_state(alpha, t, n_bar, c, dim, s.dim_b2, scale);
            CHECK((s.coefficients - ref).cwiseAbs().maxCoeff() < 1e-10);
            const double var = 1.0 + (1.0 - t) * n_bar;
            const Complex d = c - scale * std::sqrt(t) * alpha;
            CHECK(s.weight == doctest::Approx(std::exp(-std::norm(d) / var) / (oracle::kPi * var)).epsilon(1e-9));
            CHECK(std::abs(s.truncation_deficit) < 1e-9);
        }
    }
    CHECK_THROWS_AS(cloner_conditional_state(3.0, 0.5, tmsv, 0.0, 3, 1.0), TruncationError);
}

TEST_CASE("cloner branch coefficients reproduce the binomial expansion norm") {
    // sum_j |coef(m, j)|^2 (m-j)! ... collapses to G_m^2 via the binomial theorem.
    const auto tmsv = TmsvParams::from_mean_photons(0.5);
    for (int m = 0; m < 8; ++m) {
        double s = 0.0;
        for (int j = 0; j <= m; ++j) {
            const double c = cloner_branch_coefficient(m, j, 0.3, tmsv);
            s += c * c * std::tgamma(m - j + 1.0);
        }
        CHECK(s == doctest::Approx(tmsv.coefficient(m) * tmsv.coefficient(m)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cloner_branch_coefficient(2, 3, 0.5, tmsv), InvalidArgument);
}
