#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cospm/errors.hpp"
#include "cospm/transfer.hpp"

namespace cospm {

/// Discrete-time SISO state space x+ = A x + B u, y = C x + D u at a fixed
/// sample period.
struct DiscreteStateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;
    double Te = 0.0;
    Eigen::VectorXd state;

    void reset() { state.setZero(A.rows()); }

    /// Emits y[k] from the current state, then advances it with u[k].
    double step(double u) {
        const double y = C * state + D * u;
        state = A * state + B * u;
        return y;
    }

    double dc_gain() const {
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
        return (C * (I - A).partialPivLu().solve(B))(0) + D;
    }

    Complex eval(Complex z) const {
        const long n = A.rows();
        Eigen::MatrixXcd M = -A.cast<Complex>();
        M.diagonal().array() += z;
        const Eigen::VectorXcd x = M.partialPivLu().solve(B.cast<Complex>());
        return (C.cast<Complex>() * x)(0) + D;
    }
};

/// Zero-order-hold discretization: controllable canonical realization of the
/// transfer function, then the exact sampled transition via the augmented
/// matrix exponential exp([[A Te, B Te], [0, 0]]).
///
/// The companion matrix is diagonally rescaled before the exponential; the
/// returned realization keeps the rescaled coordinates (same input/output
/// map, far better conditioning for wide-spread coefficients).
inline DiscreteStateSpace discretize_zoh(const RationalTransferFunction& tf, double Te) {
    if (Te <= 0.0) throw Error("discretize_zoh: sample period must be positive");
    const int n = tf.den_degree();
    DiscreteStateSpace d;
    d.Te = Te;
    if (n == 0) {  // static gain
        d.A.resize(0, 0);
        d.B.resize(0);
        d.C.resize(0);
        d.D = tf.num[0] / tf.den[0];
        d.reset();
        return d;
    }

    std::vector<double> alpha(n);  // monic denominator tail
    for (int k = 0; k < n; ++k) alpha[k] = tf.den[k + 1] / tf.den[0];
    std::vector<double> numf(n + 1, 0.0);  // numerator padded to full length
    for (size_t i = 0; i < tf.num.size(); ++i)
        numf[n + 1 - tf.num.size() + i] = tf.num[i] / tf.den[0];

    // one-parameter balancing of the companion form
    double acc = 0.0;
    int cnt = 0;
    for (int k = 1; k <= n; ++k) {
        if (alpha[k - 1] != 0.0) {
            acc += std::log(std::abs(alpha[k - 1])) / k;
            ++cnt;
        }
    }
    const double rho = cnt ? std::exp(-acc / cnt) : 1.0;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) A(0, j) = -alpha[j] * std::pow(rho, j);
    for (int i = 1; i < n; ++i) A(i, i - 1) = 1.0 / rho;
    Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
    B(0) = 1.0;
    d.D = numf[0];
    d.C.resize(n);
    for (int j = 0; j < n; ++j) d.C(j) = (numf[j + 1] - d.D * alpha[j]) * std::pow(rho, j);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = A * Te;
    M.topRightCorner(n, 1) = B * Te;
    const Eigen::MatrixXd E = M.exp();
    d.A = E.topLeftCorner(n, n);
    d.B = E.topRightCorner(n, 1);
    d.reset();
    return d;
}

} // namespace cospm
