#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "cospm/angles.hpp"
#include "cospm/csv.hpp"
#include "cospm/errors.hpp"

namespace cospm {

using Complex = std::complex<double>;

namespace poly {

/// Coefficients in descending powers of s.
using Coeffs = std::vector<double>;

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
    Coeffs r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

template <typename Scalar>
inline Scalar eval(const Coeffs& c, Scalar s) {
    Scalar acc{};
    for (double ck : c) acc = acc * s + Scalar(ck);
    return acc;
}

} // namespace poly

/// Proper rational transfer function with real coefficients in descending
/// powers of s.
struct RationalTransferFunction {
    poly::Coeffs num, den;

    RationalTransferFunction(poly::Coeffs n, poly::Coeffs d)
        : num(std::move(n)), den(std::move(d)) {
        if (den.empty() || den[0] == 0.0)
            throw Error("transfer function: denominator leading coefficient must be nonzero");
        if (num.empty()) num = {0.0};
        if (num.size() > den.size())
            throw Error("transfer function: improper (numerator degree exceeds denominator)");
    }

    int num_degree() const { return static_cast<int>(num.size()) - 1; }
    int den_degree() const { return static_cast<int>(den.size()) - 1; }

    Complex eval(Complex s) const { return poly::eval(num, s) / poly::eval(den, s); }

    /// First order lag 1 / (1 + tau s).
    static RationalTransferFunction first_order_lag(double tau) {
        return RationalTransferFunction({1.0}, {tau, 1.0});
    }

    static RationalTransferFunction integrator() {
        return RationalTransferFunction({1.0}, {1.0, 0.0});
    }
};

/// Coefficient set of the stabilization controller K0(s). Defaults are the
/// tuned values used by the margin and simulation reference results.
struct ControllerCoefficients {
    double K0bar = 25884.0;
    double a1 = 4644.0, a2 = 628.3, a3 = 52.97;
    double b1 = 7356.0, b2 = 2.584e7;
    double c1 = 3.39e4, d1 = 2.943e8;
    double c2 = 2899.0, d2 = 2.169e7;
};

/// K0(s) = K0bar (s^2 + b1 s + b2)(s+a1)(s+a2)(s+a3) /
///         [s^2 (s^2 + c1 s + d1)(s^2 + c2 s + d2)], a 5/6 strictly proper
/// controller with a double integrator.
inline RationalTransferFunction k0_continuous(const ControllerCoefficients& c) {
    using poly::mul;
    poly::Coeffs num = mul(mul({1.0, c.b1, c.b2}, {1.0, c.a1}), mul({1.0, c.a2}, {1.0, c.a3}));
    for (double& v : num) v *= c.K0bar;
    poly::Coeffs den = mul(mul({1.0, 0.0, 0.0}, {1.0, c.c1, c.d1}), {1.0, c.c2, c.d2});
    return RationalTransferFunction(std::move(num), std::move(den));
}

/// Open loop K0(s) Hm(s) e^{-Te s} at s = j omega. The actuator lag tau_m and
/// the one-sample sensor delay Te close the speed loop of one axis.
inline Complex open_loop_response(const ControllerCoefficients& c, double tau_m, double Te,
                                  double omega) {
    const Complex s(0.0, omega);
    const Complex k0 = k0_continuous(c).eval(s);
    const Complex hm = 1.0 / (1.0 + tau_m * s);
    return k0 * hm * std::exp(-Te * s);
}

/// Disturbance transfer D(s) = e^{-Te s} / (1 + K0 Hm e^{-Te s}) at s = j omega.
inline Complex disturbance_transfer(const ControllerCoefficients& c, double tau_m, double Te,
                                    double omega) {
    const Complex s(0.0, omega);
    const Complex beta = std::exp(-Te * s);
    const Complex k0 = k0_continuous(c).eval(s);
    const Complex hm = 1.0 / (1.0 + tau_m * s);
    return beta / (1.0 + k0 * hm * beta);
}

struct Margins {
    double gain_margin_db = 0.0;
    double phase_margin_deg = 0.0;
    double gain_crossover_rad_s = 0.0;   // where |L| = 1
    double phase_crossover_rad_s = 0.0;  // where the phase crosses -180 deg
};

namespace detail {

struct MarginSearch {
    std::optional<double> gain_margin_db, phase_margin_deg;
    std::optional<double> gain_crossover, phase_crossover;
};

/// Classical margin search on a loop response: log-spaced seeds locate the
/// |L| = 1 and phase = -180 deg crossings, bisection refines them. The phase
/// is unwrapped along the seed grid, anchored at the lowest frequency.
inline MarginSearch margins_of(const std::function<Complex(double)>& loop, double w_lo = 1e-2,
                               double w_hi = 1e5, int seeds = 2000, double rel_tol = 1e-6) {
    std::vector<double> w(seeds), mag(seeds), ph(seeds);
    const double lr = std::log(w_hi / w_lo);
    for (int i = 0; i < seeds; ++i) {
        w[i] = w_lo * std::exp(lr * i / (seeds - 1));
        const Complex v = loop(w[i]);
        mag[i] = std::abs(v);
        ph[i] = std::arg(v);
    }
    for (int i = 1; i < seeds; ++i) {
        while (ph[i] - ph[i - 1] > pi) ph[i] -= 2.0 * pi;
        while (ph[i] - ph[i - 1] < -pi) ph[i] += 2.0 * pi;
    }

    auto unwrapped_phase_near = [&](double omega, double reference) {
        double p = std::arg(loop(omega));
        while (p - reference > pi) p -= 2.0 * pi;
        while (p - reference < -pi) p += 2.0 * pi;
        return p;
    };

    MarginSearch out;

    // phase margin at the last unit-magnitude crossing
    for (int i = seeds - 2; i >= 0; --i) {
        const double g0 = std::log(mag[i]), g1 = std::log(mag[i + 1]);
        if (g0 == 0.0 || (g0 > 0.0) != (g1 > 0.0)) {
            double lo = w[i], hi = w[i + 1];
            while ((hi - lo) / lo > rel_tol) {
                const double mid = std::sqrt(lo * hi);
                if ((std::log(std::abs(loop(mid))) > 0.0) == (g0 > 0.0)) lo = mid;
                else hi = mid;
            }
            const double wc = std::sqrt(lo * hi);
            out.gain_crossover = wc;
            out.phase_margin_deg = rad2deg(unwrapped_phase_near(wc, ph[i]) + pi);
            break;
        }
    }

    // gain margin at the first -180 deg crossing
    for (int i = 0; i + 1 < seeds; ++i) {
        const double p0 = ph[i] + pi, p1 = ph[i + 1] + pi;
        if (p0 == 0.0 || (p0 > 0.0) != (p1 > 0.0)) {
            double lo = w[i], hi = w[i + 1];
            double ref = ph[i];
            while ((hi - lo) / lo > rel_tol) {
                const double mid = std::sqrt(lo * hi);
                const double pm = unwrapped_phase_near(mid, ref);
                if ((pm + pi > 0.0) == (p0 > 0.0)) { lo = mid; ref = pm; }
                else hi = mid;
            }
            const double wp = std::sqrt(lo * hi);
            out.phase_crossover = wp;
            out.gain_margin_db = -20.0 * std::log10(std::abs(loop(wp)));
            break;
        }
    }
    return out;
}

} // namespace detail

/// Gain and phase margins of the speed open loop.
inline Margins margins(const ControllerCoefficients& c, double tau_m, double Te) {
    const auto search = detail::margins_of(
        [&](double w) { return open_loop_response(c, tau_m, Te, w); });
    if (!search.phase_margin_deg)
        throw NoCrossing("margins: no unit-gain crossing in the search band");
    if (!search.gain_margin_db)
        throw NoCrossing("margins: no -180 deg phase crossing in the search band");
    Margins m;
    m.gain_margin_db = *search.gain_margin_db;
    m.phase_margin_deg = *search.phase_margin_deg;
    m.gain_crossover_rad_s = *search.gain_crossover;
    m.phase_crossover_rad_s = *search.phase_crossover;
    return m;
}

/// Writes (omega, magnitude_dB, phase_deg) rows of a frequency response for
/// Bode or Nichols replots. The phase is unwrapped along the grid.
inline void write_frequency_csv(std::ostream& os, const std::function<Complex(double)>& response,
                                double w_lo, double w_hi, int n) {
    os << "omega,magnitude_db,phase_deg\n";
    const double lr = std::log(w_hi / w_lo);
    double prev_phase = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = n == 1 ? w_lo : w_lo * std::exp(lr * i / (n - 1));
        const Complex v = response(w);
        double ph = std::arg(v);
        if (i > 0) {
            while (ph - prev_phase > pi) ph -= 2.0 * pi;
            while (ph - prev_phase < -pi) ph += 2.0 * pi;
        }
        prev_phase = ph;
        os << format_full(w) << ',' << format_full(20.0 * std::log10(std::abs(v))) << ','
           << format_full(rad2deg(ph)) << '\n';
    }
}

} // namespace cospm
