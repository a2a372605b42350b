#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <Eigen/Dense>

#include "cospm/rotation.hpp"

using namespace cospm;

TEST_CASE("elementary rotations at reference angles") {
    CHECK(elementary_rotation(Axis::X, 0.0).isIdentity(0.0));
    const Vec3 turned = elementary_rotation(Axis::Z, pi / 2) * Vec3(1, 0, 0);
    CHECK((turned - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("R_y matches its closed form row for row") {
    const double a = 0.37;
    Mat3 expected;
    expected << std::cos(a), 0, std::sin(a),
                0, 1, 0,
                -std::sin(a), 0, std::cos(a);
    CHECK((elementary_rotation(Axis::Y, a) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotations are proper orthogonal") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        for (int k = 0; k < 50; ++k) {
            const Mat3 r = elementary_rotation(ax, u(rng));
            CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
            CHECK(r.determinant() == Catch::Approx(1.0).margin(1e-14));
        }
    }
}

TEST_CASE("rotation derivative matches finite differences") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double h = 1e-6;
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        const double a = u(rng);
        const Mat3 fd =
            (elementary_rotation(ax, a + h) - elementary_rotation(ax, a - h)) / (2.0 * h);
        CHECK((fd - elementary_rotation_derivative(ax, a)).cwiseAbs().maxCoeff() < 1e-9);
    }
}
