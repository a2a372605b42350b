#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cospm/errors.hpp"

namespace cospm {

/// Closed interval with double endpoints. Every arithmetic result is widened
/// to the next representable doubles, so enclosures survive rounding.
struct Interval {
    double lo = 0.0, hi = 0.0;

    Interval() = default;
    Interval(double point) : lo(point), hi(point) {}
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}

    static Interval around(double center, double radius) {
        return Interval(center - radius, center + radius);
    }

    double width() const { return hi - lo; }
    double magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace iv {

inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline Interval outward(Interval a) { return Interval(down(a.lo), up(a.hi)); }

inline Interval add(Interval a, Interval b) { return outward({a.lo + b.lo, a.hi + b.hi}); }
inline Interval sub(Interval a, Interval b) { return outward({a.lo - b.hi, a.hi - b.lo}); }
inline Interval neg(Interval a) { return Interval(-a.hi, -a.lo); }

inline Interval mul(Interval a, Interval b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return outward({std::min(std::min(p1, p2), std::min(p3, p4)),
                    std::max(std::max(p1, p2), std::max(p3, p4))});
}

inline Interval scale(Interval a, double k) {
    return k >= 0.0 ? outward({k * a.lo, k * a.hi}) : outward({k * a.hi, k * a.lo});
}

/// Division by an interval of one sign.
inline Interval div(Interval a, Interval b) {
    if (b.contains(0.0)) throw Error("interval division by an interval containing zero");
    return mul(a, outward({1.0 / b.hi, 1.0 / b.lo}));
}

inline Interval atan(Interval a) { return outward({std::atan(a.lo), std::atan(a.hi)}); }

namespace detail {
inline constexpr double kPi = 3.14159265358979323846;
}

/// Enclosure of cos over the interval: endpoint values plus any interior
/// extremum at an integer multiple of pi. The test for interior multiples is
/// padded by one representable step on each side.
inline Interval cos(Interval a) {
    if (!(a.width() < 2.0 * detail::kPi)) return Interval(-1.0, 1.0);
    const double ca = std::cos(a.lo), cb = std::cos(a.hi);
    double lo = std::min(ca, cb), hi = std::max(ca, cb);
    const double klo = std::ceil(down(a.lo) / detail::kPi);
    const double khi = std::floor(up(a.hi) / detail::kPi);
    for (double k = klo; k <= khi; k += 1.0) {
        if (std::fmod(k, 2.0) == 0.0) hi = 1.0;
        else lo = -1.0;
    }
    Interval r = outward({lo, hi});
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

inline Interval sin(Interval a) {
    return cos(sub(Interval(detail::kPi / 2.0), a));
}

inline Interval hull(Interval a, Interval b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

} // namespace iv

inline Interval operator+(Interval a, Interval b) { return iv::add(a, b); }
inline Interval operator-(Interval a, Interval b) { return iv::sub(a, b); }
inline Interval operator-(Interval a) { return iv::neg(a); }
inline Interval operator*(Interval a, Interval b) { return iv::mul(a, b); }
inline Interval operator*(double k, Interval a) { return iv::scale(a, k); }

using IntervalVec3 = std::array<Interval, 3>;
using IntervalMat3 = std::array<std::array<Interval, 3>, 3>;

inline Interval dot(const IntervalVec3& a, const IntervalVec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline IntervalVec3 mat_vec(const IntervalMat3& m, const IntervalVec3& x) {
    IntervalVec3 y;
    for (int i = 0; i < 3; ++i) y[i] = m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2];
    return y;
}

inline IntervalMat3 mat_mul(const IntervalMat3& a, const IntervalMat3& b) {
    IntervalMat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return c;
}

inline IntervalMat3 interval_rot_x(Interval a) {
    const Interval c = iv::cos(a), s = iv::sin(a);
    return IntervalMat3{{{Interval(1.0), Interval(0.0), Interval(0.0)},
                         {Interval(0.0), c, -s},
                         {Interval(0.0), s, c}}};
}

inline IntervalMat3 interval_rot_y(Interval a) {
    const Interval c = iv::cos(a), s = iv::sin(a);
    return IntervalMat3{{{c, Interval(0.0), s},
                         {Interval(0.0), Interval(1.0), Interval(0.0)},
                         {-s, Interval(0.0), c}}};
}

inline IntervalMat3 interval_rot_z(Interval a) {
    const Interval c = iv::cos(a), s = iv::sin(a);
    return IntervalMat3{{{c, -s, Interval(0.0)},
                         {s, c, Interval(0.0)},
                         {Interval(0.0), Interval(0.0), Interval(1.0)}}};
}

} // namespace cospm
