#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "ttnet/linalg.hpp"

using namespace ttnet;
using Catch::Approx;

namespace {

// oscillator2 Jacobian with coupling 75/2 in both off-block entries. From first principles the
// (3,2) entry is 75/4 (theta_1 = 2); the eigenvalue targets below belong to this matrix.
Eigen::MatrixXd reference_jacobian() {
    Eigen::MatrixXd j(4, 4);
    j << -7.0 / 8, 0, 0, -75.0 / 2,  //
        1, -1, 0, 0,                 //
        0, 75.0 / 2, -7.0 / 8, 0,    //
        0, 0, 1, -2;
    return j;
}

}  // namespace

TEST_CASE("QR eigenvalues agree with the reference on random matrices", "[linalg]") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int n = 1; n <= 8; ++n)
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
            const auto own = linalg::qr_eigenvalues(a);
            const auto ref = linalg::reference_eigenvalues(a);
            CHECK(linalg::spectrum_mismatch(own, ref) < 1e-9);
        }
}

TEST_CASE("triangular input returns its diagonal exactly", "[linalg]") {
    Eigen::MatrixXd a(4, 4);
    a << -0.7, 0, 0, 0,  //
        1.3, -1.9, 0, 0, //
        0, 0, -0.3, 0,   //
        0, 0, 2.2, -0.3;
    const auto w = eigenvalues(a);
    std::vector<double> re;
    for (const auto& z : w) {
        CHECK(z.imag() == 0.0);
        re.push_back(z.real());
    }
    CHECK(re == std::vector<double>{-1.9, -0.7, -0.3, -0.3});
}

TEST_CASE("polynomial roots through the companion matrix", "[linalg]") {
    // (z-1)(z+2)(z^2+1) = z^4 + z^3 - z^2 + z - 2
    const std::vector<double> c{-2, 1, -1, 1, 1};
    const auto r = linalg::polynomial_roots(c);
    REQUIRE(r.size() == 4);
    CHECK(r[0].real() == Approx(-2).epsilon(1e-12));
    CHECK(std::abs(r[1] - Complex(0, -1)) < 1e-12);
    CHECK(std::abs(r[2] - Complex(0, 1)) < 1e-12);
    CHECK(r[3].real() == Approx(1).epsilon(1e-12));
}

TEST_CASE("cyclic characteristic polynomial route", "[linalg]") {
    const auto j = reference_jacobian();
    REQUIRE(linalg::is_cyclic(j));
    const auto p = linalg::cyclic_characteristic_polynomial(j);
    // p(lambda) = det(lambda I - J): check at a few points against Eigen's determinant.
    for (double l : {-3.0, 0.0, 0.5, 2.0}) {
        const double direct = (l * Eigen::MatrixXd::Identity(4, 4) - j).determinant();
        double v = 0;
        for (std::size_t k = p.size(); k-- > 0;) v = v * l + p[k];
        CHECK(v == Approx(direct).epsilon(1e-12));
    }
    const auto w = eigenvalues(j);
    CHECK(w[0].real() == Approx(-5.53045).margin(1e-3));
    CHECK(std::abs(w[0].imag()) == Approx(4.3162).margin(1e-3));
    CHECK(w[3].real() == Approx(3.15545).margin(1e-3));
    CHECK(std::abs(w[3].imag()) == Approx(4.31828).margin(1e-3));
    Complex sum = 0;
    for (auto z : w) sum += z;
    CHECK(sum.real() == Approx(-4.75).epsilon(1e-12));
    CHECK(std::abs(sum.imag()) < 1e-12);
}

TEST_CASE("complex eigenvalues come in conjugate pairs", "[linalg]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = nd(rng);
    const auto w = eigenvalues(a);
    for (const auto& z : w) {
        if (z.imag() == 0.0) continue;
        bool found = false;
        for (const auto& u : w) found = found || std::abs(u - std::conj(z)) < 1e-12;
        CHECK(found);
    }
}
