#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "spinherald/dicke.hpp"

using namespace spinherald;

namespace {

// Independent oracle: dense matrix exponential of J_y in the symmetric
// subspace, via eigendecomposition of the Hermitian J_y matrix.
std::vector<double> rotated_marginal_matrix_exp(int n_atoms, int excitation,
                                                double angle) {
    const int dim = n_atoms + 1;
    const double J = 0.5 * n_atoms;
    Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double m = k - J;
        const double c = std::sqrt(J * (J + 1.0) - m * (m + 1.0));
        jy(k + 1, k) = std::complex<double>(0.0, -0.5 * c);
        jy(k, k + 1) = std::complex<double>(0.0, 0.5 * c);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jy);
    Eigen::VectorXcd init = Eigen::VectorXcd::Zero(dim);
    init(n_atoms - excitation) = 1.0;  // |J, m' = J - n>
    Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * init;
    for (int k = 0; k < dim; ++k)
        coeffs(k) *= std::exp(std::complex<double>(0.0, -angle * es.eigenvalues()(k)));
    Eigen::VectorXcd rotated = es.eigenvectors() * coeffs;
    std::vector<double> probs(dim);
    for (int k = 0; k < dim; ++k) probs[k] = std::norm(rotated(k));
    return probs;
}

double binomial_pmf(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0) - n * std::log(2.0));
}

}  // namespace

TEST_CASE("rotated distribution matches the matrix-exponential oracle") {
    for (auto [N, n] : {std::pair{10, 1}, {10, 3}, {40, 0}, {40, 2}, {7, 7}}) {
        const auto dist = rotated_dicke_distribution({N, n}, M_PI / 2.0);
        const auto oracle = rotated_marginal_matrix_exp(N, n, M_PI / 2.0);
        for (int k = 0; k <= N; ++k)
            CHECK(std::abs(dist.probabilities[k] - oracle[k]) < 1e-10);
    }
    // Off-angle check as well.
    const auto dist = rotated_dicke_distribution({12, 2}, 0.7);
    const auto oracle = rotated_marginal_matrix_exp(12, 2, 0.7);
    for (int k = 0; k <= 12; ++k)
        CHECK(std::abs(dist.probabilities[k] - oracle[k]) < 1e-10);
}

TEST_CASE("N=10 n=1 rotated variance is 28") {
    const auto dist = rotated_dicke_distribution({10, 1}, M_PI / 2.0);
    CHECK(jz_variance(dist) == doctest::Approx(28.0).epsilon(1e-12));
}

TEST_CASE("n=0 at pi/2 is the binomial marginal") {
    const int N = 64;
    const auto dist = rotated_dicke_distribution({N, 0}, M_PI / 2.0);
    for (int k = 0; k <= N; ++k)
        CHECK(std::abs(dist.probabilities[k] - binomial_pmf(N, k)) < 1e-10);
    CHECK(jz_variance(dist) == doctest::Approx(N).epsilon(1e-10));
}

TEST_CASE("identity rotation is a point mass at m = J - n") {
    const auto dist = rotated_dicke_distribution({4, 0}, 0.0);
    CHECK(dist.probabilities[4] == doctest::Approx(1.0));
    CHECK(jz_variance(dist) == doctest::Approx(0.0));
    const auto flipped = rotated_dicke_distribution({4, 1}, M_PI);
    CHECK(flipped.probabilities[1] == doctest::Approx(1.0));  // m = -1
}

TEST_CASE("distributions normalize and are symmetric at pi/2") {
    for (auto [N, n] : {std::pair{16, 0}, {16, 1}, {101, 2}, {1000, 1}}) {
        const auto dist = rotated_dicke_distribution({N, n}, M_PI / 2.0);
        double sum = 0.0;
        for (double p : dist.probabilities) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int k = 0; k <= N; ++k)
            CHECK(std::abs(dist.probabilities[k] - dist.probabilities[N - k]) < 1e-12);
        CHECK(std::abs(2.0 * dist.mean_jz()) < 1e-10);
    }
}

TEST_CASE("closed-form variance 2(J(J+1) - (J-n)^2) for n <= 2") {
    for (int N : {2, 10, 100, 1000}) {
        for (int n : {0, 1, 2}) {
            if (n > N) continue;
            const auto dist = rotated_dicke_distribution({N, n}, M_PI / 2.0);
            CHECK(std::abs(jz_variance(dist) - rotated_variance_closed_form(N, n)) <
                  1e-9 * std::max(1.0, rotated_variance_closed_form(N, n)));
        }
    }
}

TEST_CASE("Holstein-Primakoff convergence") {
    const auto table = hp_limit_check({10, 100, 1000}, 1);
    CHECK(table[0] == doctest::Approx(2.8).epsilon(1e-9));
    CHECK(table[1] == doctest::Approx(2.98).epsilon(1e-9));
    CHECK(table[2] == doctest::Approx(2.998).epsilon(1e-9));

    // n = 0 is exactly 1 for any N.
    for (double v : hp_limit_check({3, 17, 256}, 0))
        CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

    // Exact deviation from 2n+1 is 2 n^2 / N.
    for (int n : {1, 2, 3}) {
        for (int N : {50, 200, 800}) {
            const auto v = hp_limit_check({N}, n)[0];
            CHECK(std::abs(v - (2.0 * n + 1.0)) <=
                  2.0 * n * n / N + 1e-9);
        }
    }
    // n = 2, N = 100: 5 - 8/100.
    CHECK(hp_limit_check({100}, 2)[0] == doctest::Approx(4.92).epsilon(1e-9));
}

TEST_CASE("mixture variance") {
    MixtureSpec mix;
    mix.n_atoms = 100000;

    mix.weights = {{0, 0.0}, {1, 1.0}};
    mix.detection_efficiency = 1.0;
    CHECK(mixture_variance(mix) == doctest::Approx(3.0));

    mix.weights = {{0, 1.0}};
    CHECK(mixture_variance(mix) == doctest::Approx(1.0));

    mix.weights = {{0, 0.9}, {1, 0.1}};
    CHECK(mixture_variance(mix) == doctest::Approx(1.20));

    SUBCASE("affine in weights and efficiency") {
        mix.weights = {{0, 0.7}, {1, 0.2}, {2, 0.1}};
        mix.detection_efficiency = 0.5;
        const double base = mixture_variance(mix);
        // Finite difference in eta is constant (affine).
        MixtureSpec up = mix, dn = mix;
        up.detection_efficiency = 0.6;
        dn.detection_efficiency = 0.4;
        CHECK(mixture_variance(up) - base ==
              doctest::Approx(base - mixture_variance(dn)).epsilon(1e-12));
        // Moving weight between n=0 and n=2 changes the variance linearly.
        MixtureSpec shifted = mix;
        shifted.weights = {{0, 0.6}, {1, 0.2}, {2, 0.2}};
        MixtureSpec shifted2 = mix;
        shifted2.weights = {{0, 0.5}, {1, 0.2}, {2, 0.3}};
        const double d1 = mixture_variance(shifted) - base;
        const double d2 = mixture_variance(shifted2) - mixture_variance(shifted);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    }
}

TEST_CASE("validation and the exact-mode cap") {
    CHECK_THROWS_AS(rotated_dicke_distribution({5000, 0}, M_PI / 2.0),
                    std::invalid_argument);
    CHECK_NOTHROW(rotated_dicke_distribution({5000, 0}, M_PI / 2.0, 8192));
    CHECK_THROWS_AS(rotated_dicke_distribution({10, 11}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rotated_dicke_distribution({0, 0}, 0.0), std::invalid_argument);
    MixtureSpec bad;
    bad.weights = {{0, 0.5}};
    CHECK_THROWS_AS(mixture_variance(bad), std::invalid_argument);
}
