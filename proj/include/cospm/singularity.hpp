#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <vector>

#include "cospm/angles.hpp"
#include "cospm/csv.hpp"
#include "cospm/design.hpp"
#include "cospm/errors.hpp"
#include "cospm/interval.hpp"
#include "cospm/kinematics.hpp"

namespace cospm {

/// Orientation-space box scanned for singularities. chi3 is pinned to one
/// representative value; the mechanism geometry is bearing-invariant.
struct WorkspaceBox {
    double chi1_lo = deg2rad(-10.0), chi1_hi = deg2rad(10.0);
    double chi2_lo = deg2rad(-50.0), chi2_hi = deg2rad(50.0);
    double chi3 = 0.0;

    /// Prescribed regular workspace: bank +-10 deg, elevation +-50 deg.
    static WorkspaceBox prescribed() { return WorkspaceBox{}; }

    static WorkspaceBox empty_box() {
        WorkspaceBox b;
        b.chi1_lo = 1.0; b.chi1_hi = -1.0;
        b.chi2_lo = 1.0; b.chi2_hi = -1.0;
        return b;
    }

    bool empty() const { return chi1_lo > chi1_hi || chi2_lo > chi2_hi; }
    bool contains(double c1, double c2) const {
        const double t = 1e-12;
        return c1 >= chi1_lo - t && c1 <= chi1_hi + t && c2 >= chi2_lo - t && c2 <= chi2_hi + t;
    }
};

/// Per-leg discriminants of the inverse geometric model quadratics. A zero
/// marks a fold (double root), the type-1 boundary.
inline Vec3 type1_discriminants(const DesignParameters& p, const Vec3& chi) {
    (void)tan_half_forward(chi);
    Vec3 d;
    for (int i = 0; i < 3; ++i) d[i] = leg_quadratic(p, i, chi).discriminant();
    return d;
}

// ---------------------------------------------------------------------------
// Kantorovich certification
// ---------------------------------------------------------------------------

/// Certificate for the Newton basin of the orientation solution around a
/// known estimate, in half-angle tangent coordinates.
///
/// eta bounds the first Newton step, B the inverse Jacobian, L the Jacobian
/// Lipschitz constant over the ball of the given radius (max norms). The
/// test passes when h = B*eta*L <= 1/2 and the convergence ball fits in the
/// probed radius.
struct KantorovichCertificate {
    Vec3 Theta0, X0;
    double radius = 0.0;
    double eta = 0.0, B = 0.0, L = 0.0, h = 0.0;
    double convergence_radius = 0.0;
    bool valid = false;
};

namespace detail {

struct PolySystem {
    const DesignParameters* p;
    Vec3 theta0;      // joint angles of the frozen half-tangent image
    Vec3 row_weight;  // 1 + Theta0_i^2

    static PolySystem at(const DesignParameters& p, const Vec3& Theta0) {
        PolySystem s;
        s.p = &p;
        s.theta0 = tan_half_inverse(Theta0);
        for (int i = 0; i < 3; ++i) s.row_weight[i] = 1.0 + Theta0[i] * Theta0[i];
        return s;
    }

    Vec3 value(const Vec3& X) const {
        const Vec3 f = closure(*p, theta0, tan_half_inverse(X));
        return f.cwiseProduct(row_weight);
    }

    Mat3 jacobian(const Vec3& X) const {
        const Vec3 chi = tan_half_inverse(X);
        Mat3 j1, j2;
        closure_jacobians_raw(*p, theta0, chi, j1, j2);
        Mat3 jx;
        for (int j = 0; j < 3; ++j) {
            const double col = 2.0 / (1.0 + X[j] * X[j]);
            for (int i = 0; i < 3; ++i) jx(i, j) = row_weight[i] * j1(i, j) * col;
        }
        return jx;
    }

    /// Interval enclosure of the system over a box of half-tangent values.
    IntervalVec3 value(const IntervalVec3& X) const {
        IntervalVec3 chi;
        for (int i = 0; i < 3; ++i) chi[i] = 2.0 * iv::atan(X[i]);
        const IntervalMat3 r = mat_mul(mat_mul(interval_rot_z(chi[2]), interval_rot_y(chi[1])),
                                       interval_rot_x(chi[0]));
        IntervalVec3 out;
        for (int i = 0; i < 3; ++i) {
            const Vec3 mloc = platform_axis_local(*p, i);
            const Vec3 w = leg_w(*p, i, theta0[i]);
            IntervalVec3 m{Interval(mloc[0]), Interval(mloc[1]), Interval(mloc[2])};
            IntervalVec3 wi{Interval(w[0]), Interval(w[1]), Interval(w[2])};
            const IntervalVec3 v = mat_vec(r, m);
            out[i] = row_weight[i] * (dot(wi, v) - Interval(std::cos(p->alpha2[i])));
        }
        return out;
    }
};

inline constexpr double kSecondPartialStep = 1e-4;

/// Row sums of interval bounds on the second partials over the ball, giving
/// a max-norm Lipschitz constant for the Jacobian. Second partials come from
/// nested central differences evaluated on the interval box, so truncation
/// and rounding are absorbed by the enclosure width.
inline double lipschitz_bound(const PolySystem& sys, const Vec3& X0, double radius) {
    const double h = kSecondPartialStep;
    auto box_at = [&](double s1, double s2, double s3) {
        IntervalVec3 b;
        const Vec3 shift(s1, s2, s3);
        for (int i = 0; i < 3; ++i) b[i] = Interval::around(X0[i] + shift[i], radius);
        return b;
    };
    auto shifted = [&](int j, double sj, int k, double sk) {
        Vec3 s = Vec3::Zero();
        s[j] += sj;
        s[k] += sk;
        return sys.value(box_at(s[0], s[1], s[2]));
    };
    double second_bound[3][3][3] = {};
    const IntervalVec3 center = sys.value(box_at(0, 0, 0));
    for (int j = 0; j < 3; ++j) {
        for (int k = j; k < 3; ++k) {
            IntervalVec3 second;
            if (j == k) {
                const IntervalVec3 fp = shifted(j, h, j, 0.0);
                const IntervalVec3 fm = shifted(j, -h, j, 0.0);
                for (int i = 0; i < 3; ++i)
                    second[i] = iv::scale(fp[i] - 2.0 * center[i] + fm[i], 1.0 / (h * h));
            } else {
                const IntervalVec3 fpp = shifted(j, h, k, h);
                const IntervalVec3 fpm = shifted(j, h, k, -h);
                const IntervalVec3 fmp = shifted(j, -h, k, h);
                const IntervalVec3 fmm = shifted(j, -h, k, -h);
                for (int i = 0; i < 3; ++i)
                    second[i] = iv::scale(fpp[i] - fpm[i] - fmp[i] + fmm[i], 1.0 / (4.0 * h * h));
            }
            for (int i = 0; i < 3; ++i)
                second_bound[i][j][k] = second_bound[i][k][j] = second[i].magnitude();
        }
    }
    double worst_row = 0.0;
    for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) row += second_bound[i][j][k];
        worst_row = std::max(worst_row, row);
    }
    return worst_row;
}

} // namespace detail

/// Kantorovich test for the orientation Newton scheme centered at
/// (Theta0, X0), probing the max-norm ball of the given radius.
inline KantorovichCertificate kantorovich_test(const DesignParameters& p, const Vec3& Theta0,
                                               const Vec3& X0, double radius) {
    KantorovichCertificate cert;
    cert.Theta0 = Theta0;
    cert.X0 = X0;
    cert.radius = radius;

    const auto sys = detail::PolySystem::at(p, Theta0);
    const Mat3 jx = sys.jacobian(X0);
    if (std::abs(jx.determinant()) < kSingularDetTol)
        throw SingularJacobianAtCenter("kantorovich_test: orientation Jacobian singular at X0");
    const Mat3 inv = jx.inverse();
    cert.eta = (inv * sys.value(X0)).cwiseAbs().maxCoeff();
    cert.B = inv.cwiseAbs().rowwise().sum().maxCoeff();
    cert.L = detail::lipschitz_bound(sys, X0, radius);
    cert.h = cert.B * cert.eta * cert.L;
    if (cert.h == 0.0 || cert.L == 0.0)
        cert.convergence_radius = cert.eta;
    else if (cert.h <= 0.5)
        cert.convergence_radius = (1.0 - std::sqrt(1.0 - 2.0 * cert.h)) / (cert.B * cert.L);
    else
        cert.convergence_radius = std::numeric_limits<double>::infinity();
    cert.valid = cert.h <= 0.5 && cert.convergence_radius <= radius;
    return cert;
}

// ---------------------------------------------------------------------------
// Workspace scans
// ---------------------------------------------------------------------------

struct ScanPoint {
    double chi1 = 0.0, chi2 = 0.0;
    Vec3 delta = Vec3::Zero();
    bool kantorovich_pass = false;
};

/// Dense evaluation of the discriminants (and optionally the Kantorovich
/// flag) over a grid; points are stored row-major, chi2 fastest.
struct ScanResult {
    WorkspaceBox box;
    int n1 = 0, n2 = 0;
    std::vector<ScanPoint> points;
    bool kantorovich_evaluated = false;

    double min_abs_delta_wstar = std::numeric_limits<double>::infinity();
    int loci_cells_wstar = 0;   // grid edges inside W* whose discriminant changes sign
    int loci_cells_total = 0;
    int failed_cells = 0;       // Kantorovich failures (igm failures included)

    const ScanPoint& at(int i1, int i2) const { return points[i1 * n2 + i2]; }
};

struct ScanOptions {
    bool kantorovich = false;
    double radius = 0.0;  // half-tangent units; 0 selects the grid step
    WorkspaceBox wstar = WorkspaceBox::prescribed();
    unsigned threads = 0; // 0 selects hardware concurrency
};

namespace detail {

template <typename Fn>
inline void parallel_rows(int rows, unsigned threads, Fn&& fn) {
    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max(rows, 1)));
    if (n <= 1) {
        for (int i = 0; i < rows; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
        pool.emplace_back([=, &fn] {
            for (int i = static_cast<int>(t); i < rows; i += static_cast<int>(n)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline bool kantorovich_pass_at(const DesignParameters& p, const Vec3& chi, double radius) {
    try {
        const Vec3 theta = igm(p, chi);
        const auto cert = kantorovich_test(p, tan_half_forward(theta), tan_half_forward(chi), radius);
        return cert.valid;
    } catch (const Error&) {
        return false;
    }
}

} // namespace detail

/// Evaluates the type-1 discriminants on an n1 x n2 point grid over the box
/// (endpoints included). Sign changes between neighboring points mark the
/// fold loci.
inline ScanResult scan_type1(const DesignParameters& p, const WorkspaceBox& box, int n1, int n2,
                             const ScanOptions& opts = {}) {
    if (n1 < 2 || n2 < 2) throw Error("scan_type1: grid needs at least 2 points per axis");
    ScanResult res;
    res.box = box;
    res.n1 = n1;
    res.n2 = n2;
    res.points.resize(static_cast<size_t>(n1) * n2);
    res.kantorovich_evaluated = opts.kantorovich;

    const double step1 = (box.chi1_hi - box.chi1_lo) / (n1 - 1);
    const double step2 = (box.chi2_hi - box.chi2_lo) / (n2 - 1);
    double radius = opts.radius > 0.0 ? opts.radius : std::max(step1, step2);

    detail::parallel_rows(n1, opts.threads, [&](int i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
            ScanPoint& pt = res.points[static_cast<size_t>(i1) * n2 + i2];
            pt.chi1 = box.chi1_lo + i1 * step1;
            pt.chi2 = box.chi2_lo + i2 * step2;
            const Vec3 chi(pt.chi1, pt.chi2, box.chi3);
            pt.delta = type1_discriminants(p, chi);
            if (opts.kantorovich)
                pt.kantorovich_pass = detail::kantorovich_pass_at(p, chi, radius);
        }
    });

    // summary pass, single threaded and order independent
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
            const ScanPoint& pt = res.at(i1, i2);
            const bool inside = opts.wstar.contains(pt.chi1, pt.chi2);
            if (inside)
                res.min_abs_delta_wstar =
                    std::min(res.min_abs_delta_wstar, pt.delta.cwiseAbs().minCoeff());
            if (opts.kantorovich && !pt.kantorovich_pass) ++res.failed_cells;
            for (auto [d1, d2] : {std::pair{1, 0}, std::pair{0, 1}}) {
                const int j1 = i1 + d1, j2 = i2 + d2;
                if (j1 >= n1 || j2 >= n2) continue;
                const ScanPoint& nb = res.at(j1, j2);
                bool change = false;
                for (int leg = 0; leg < 3; ++leg)
                    change = change || (pt.delta[leg] * nb.delta[leg] < 0.0);
                if (!change) continue;
                ++res.loci_cells_total;
                if (inside && opts.wstar.contains(nb.chi1, nb.chi2)) ++res.loci_cells_wstar;
            }
        }
    }
    return res;
}

inline void write_scan_csv(std::ostream& os, const ScanResult& res) {
    os << "chi1,chi2,delta1,delta2,delta3,kantorovich_pass\n";
    for (const ScanPoint& pt : res.points) {
        os << format_full(pt.chi1) << ',' << format_full(pt.chi2) << ','
           << format_full(pt.delta[0]) << ',' << format_full(pt.delta[1]) << ','
           << format_full(pt.delta[2]) << ',' << (pt.kantorovich_pass ? 1 : 0) << '\n';
    }
}

/// Result of scanning the workspace image through the inverse model with the
/// Kantorovich test at every grid orientation.
struct CertificationReport {
    bool all_pass = false;
    std::vector<Vec3> failures;
    int cells = 0;
    double step = 0.0;
    double radius = 0.0;
};

/// Certifies the box by gridding it at the given step (radians) and running
/// the Kantorovich test at each orientation. The probe radius (half-tangent
/// units) must be at least the step so neighboring balls overlap.
inline CertificationReport certify_workspace(const DesignParameters& p, const WorkspaceBox& box,
                                             double step, double radius = 0.0) {
    if (step <= 0.0) throw Error("certify_workspace: step must be positive");
    if (radius == 0.0) radius = step;
    if (radius < step) throw Error("certify_workspace: radius must be at least the step");

    CertificationReport rep;
    rep.step = step;
    rep.radius = radius;
    if (box.empty()) {
        rep.all_pass = true;
        return rep;
    }

    auto axis_points = [&](double lo, double hi) {
        const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / step - 1e-12)) + 1);
        std::vector<double> pts(n);
        for (int i = 0; i < n; ++i)
            pts[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        return pts;
    };
    const std::vector<double> c1 = axis_points(box.chi1_lo, box.chi1_hi);
    const std::vector<double> c2 = axis_points(box.chi2_lo, box.chi2_hi);
    rep.cells = static_cast<int>(c1.size() * c2.size());

    std::vector<std::vector<Vec3>> row_failures(c1.size());
    detail::parallel_rows(static_cast<int>(c1.size()), 0, [&](int i1) {
        for (double x2 : c2) {
            const Vec3 chi(c1[i1], x2, box.chi3);
            if (!detail::kantorovich_pass_at(p, chi, radius)) row_failures[i1].push_back(chi);
        }
    });
    for (auto& rf : row_failures)
        rep.failures.insert(rep.failures.end(), rf.begin(), rf.end());
    rep.all_pass = rep.failures.empty();
    return rep;
}

} // namespace cospm
