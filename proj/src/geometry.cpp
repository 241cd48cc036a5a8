#include "horolab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include "horolab/farey.hpp"

namespace hl {

long long slope_gcd(long long a, long long b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

void Slope::normalize() {
    if (p == 0 && q == 0) throw ValidationError("slope (0,0)");
    long long g = slope_gcd(p, q);
    p /= g;
    q /= g;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
}

FNPoint FNPoint::s11(double l, double tau, double boundary) {
    FNPoint X;
    X.surface = boundary > 0.0 ? SurfaceSig{1, 0, 1} : SurfaceSig{1, 1, 0};
    X.lengths = {l};
    X.twists = {tau};
    X.boundary_lengths = {boundary};
    X.validate();
    return X;
}

FNPoint FNPoint::s04(double l, double tau) {
    FNPoint X;
    X.surface = SurfaceSig{0, 4, 0};
    X.lengths = {l};
    X.twists = {tau};
    X.boundary_lengths = {0.0, 0.0, 0.0, 0.0};
    X.validate();
    return X;
}

void FNPoint::validate() const {
    if (static_cast<int>(lengths.size()) != surface.complexity() ||
        lengths.size() != twists.size())
        throw ValidationError("FN coordinate count != surface complexity");
    for (double l : lengths)
        if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("pants-curve length must be > 0");
    for (double t : twists)
        if (!std::isfinite(t)) throw ValidationError("twist must be finite");
    for (double b : boundary_lengths)
        if (b < 0.0 || b > 1000.0 || !std::isfinite(b))
            throw ValidationError("boundary length out of range [0, 1000]");
}

double TraceTriple::relation_residual(double rhs) const {
    return x * x + y * y + z * z - x * y * z - rhs;
}

// log(2 cosh(u)) for u >= 0, stable for all magnitudes
static double log_2cosh(double u) {
    u = std::fabs(u);
    return u + std::log1p(std::exp(-2.0 * u));
}

// torus trace engine at FN coordinates (l, tau) with boundary length b
static TraceEngine torus_engine(double l, double tau, double b) {
    if (l > 2000.0) throw NumericalInstability("FN length too large for trace engine");
    TraceEngine E;
    E.farey_c = 0.0;
    E.markov_rhs = 2.0 - 2.0 * std::cosh(b / 2.0);
    // bc = (2 + 2 cosh(b/2)) / (4 sinh^2(l/2)), a = sqrt(1+bc)
    double u = l / 2.0;
    double log_sinh = u + std::log1p(-std::exp(-2.0 * u)) - std::log(2.0); // log sinh(l/2)
    double bc = (2.0 + 2.0 * std::cosh(b / 2.0)) * std::exp(-2.0 * log_sinh) / 4.0;
    double a = std::sqrt(1.0 + bc);
    E.x = LogTrace{log_2cosh(l / 2.0), 1};
    E.y = LogTrace{std::log(a) + log_2cosh((tau - l / 2.0) / 2.0), 1};
    E.z = LogTrace{std::log(a) + log_2cosh((tau + l / 2.0) / 2.0), 1};
    return E;
}

TraceEngine make_engine(const FNPoint& X) {
    if (!X.geometry_supported())
        throw UnsupportedConfiguration("geometry only on S_{1,1}(b) and S_{0,4}");
    if (X.is_s11()) return torus_engine(X.lengths[0], X.twists[0], X.boundary());
    // S_{0,4}: slope curves are squares of torus slope words at half coordinates,
    // so t_S04 = t_T^2 - 2 and the Farey constant becomes 8.
    TraceEngine T = torus_engine(X.lengths[0] / 2.0, X.twists[0] / 2.0, 0.0);
    TraceEngine E;
    E.farey_c = 8.0;
    E.markov_rhs = 0.0; // unused; S_{0,4} has its own relation
    LogTrace two = LogTrace::from_double(2.0);
    E.x = LogTrace::sub(LogTrace::mul(T.x, T.x), two);
    E.y = LogTrace::sub(LogTrace::mul(T.y, T.y), two);
    E.z = LogTrace::sub(LogTrace::mul(T.z, T.z), two);
    return E;
}

static Mat2 matmul(const Mat2& a, const Mat2& b) {
    return Mat2{{{a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]},
                 {a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]}}};
}

static Mat2 matinv(const Mat2& a) { // det = 1
    return Mat2{{{a[1][1], -a[0][1]}, {-a[1][0], a[0][0]}}};
}

static double mtrace(const Mat2& a) { return a[0][0] + a[1][1]; }

static std::pair<Mat2, Mat2> torus_matrices(double l, double tau, double b) {
    if (l > 600.0) throw NumericalInstability("FN length too large for explicit matrices");
    double lam = std::exp(l / 2.0);
    Mat2 A{{{lam, 0.0}, {0.0, 1.0 / lam}}};
    double sh = std::sinh(l / 2.0);
    double bc = (2.0 + 2.0 * std::cosh(b / 2.0)) / (4.0 * sh * sh);
    double a = std::sqrt(1.0 + bc), s = std::sqrt(bc);
    double tt = (tau - l / 2.0) / 2.0;
    double e = std::exp(tt);
    Mat2 B{{{e * a, e * s}, {s / e, a / e}}};
    return {A, B};
}

Holonomy build_holonomy(const FNPoint& X) {
    if (!X.geometry_supported())
        throw UnsupportedConfiguration("geometry only on S_{1,1}(b) and S_{0,4}");
    Holonomy H;
    if (X.is_s11()) {
        auto [A, B] = torus_matrices(X.lengths[0], X.twists[0], X.boundary());
        H.A = A;
        H.B = B;
        H.traces = {mtrace(A), mtrace(B), mtrace(matmul(A, B))};
        double rhs = 2.0 - 2.0 * std::cosh(X.boundary() / 2.0);
        double scale = std::max(1.0, std::fabs(H.traces.x * H.traces.y * H.traces.z));
        H.residual = H.traces.relation_residual(rhs) / scale;
    } else {
        auto [A, B] = torus_matrices(X.lengths[0] / 2.0, X.twists[0] / 2.0, 0.0);
        H.A = A;
        H.B = B;
        Mat2 AB = matmul(A, B);
        double x = mtrace(matmul(A, A));
        double y = mtrace(matmul(B, B));
        double z = mtrace(matmul(AB, AB));
        H.traces = {x, y, z};
        // S_{0,4} relation (signs fixed by the positive-trace lift):
        // x^2+y^2+z^2 - xyz + 8(x+y+z) + 28 = 0
        double rel = x * x + y * y + z * z - x * y * z + 8.0 * (x + y + z) + 28.0;
        double scale = std::max(1.0, std::fabs(x * y * z));
        H.residual = rel / scale;
    }
    if (std::fabs(H.residual) > 1e-9)
        throw NumericalInstability("holonomy trace relation residual too large");
    return H;
}

Mat2 word_matrix(Slope c, const Mat2& A, const Mat2& B) {
    long long p = c.p, q = c.q;
    if (p == 0) return A;
    if (q == 0) return B;
    long long pl = 0, ql = 1, pr, qr;
    Mat2 Ml = A, Mr;
    if (p > 0) {
        pr = 1;
        qr = 0;
        Mr = B;
    } else {
        pr = -1;
        qr = 0;
        Mr = matinv(B);
    }
    for (int guard = 0; guard < 4000; ++guard) {
        long long pm = pl + pr, qm = ql + qr;
        Mat2 Mm = matmul(Ml, Mr);
        if (pm == p && qm == q) return Mm;
        long long det = pl * qr - ql * pr; // +-1
        double alpha = (double)(p * qr - q * pr) / (double)det;
        double beta = (double)(pl * q - ql * p) / (double)det;
        if (!(alpha > 0 && beta > 0))
            throw NumericalInstability("word_matrix cone descent failed");
        if (alpha > beta) {
            pr = pm;
            qr = qm;
            Mr = Mm;
        } else {
            pl = pm;
            ql = qm;
            Ml = Mm;
        }
    }
    throw BudgetExceeded("word_matrix descent too deep");
}

// Advance the affine three-term recurrence s_{j+1} = T s_j - s_{j-1} - c by j
// steps via binary powering of the companion matrix acting on (s_0, s_{-1}, 1).
// Returns (s_j, s_{j-1}).
static std::pair<LogTrace, LogTrace> trace_run(LogTrace T, LogTrace s0, LogTrace sm1,
                                               LogTrace c, long long j) {
    // closed form for long runs with hyperbolic T: writing sigma_j = s_j - k,
    // k = c/(T-2), sigma follows the homogeneous Chebyshev recurrence, so
    // s_j = alpha lam^j + beta lam^{-j} + k with lam + 1/lam = T.  This avoids
    // the catastrophic cancellation a long matrix-power chain would hit once
    // log-magnitudes outgrow double resolution.
    if (j > 32 && T.s != 0 && T.g > std::log(2.0) + 1e-6) {
        double gl = trace_to_length(T) / 2.0; // log |lam|
        LogTrace lam{gl, T.s}, lam_inv{-gl, T.s};
        LogTrace k{};
        if (c.s != 0) {
            LogTrace den = LogTrace::sub(T, LogTrace::from_double(2.0));
            k = LogTrace::mul(c, LogTrace{-den.g, den.s});
        }
        LogTrace sig0 = LogTrace::sub(s0, k);
        LogTrace sigm1 = LogTrace::sub(sm1, k);
        LogTrace dl = LogTrace::sub(lam, lam_inv);
        LogTrace alpha = LogTrace::mul(LogTrace::sub(LogTrace::mul(sig0, lam), sigm1),
                                       LogTrace{-dl.g, dl.s});
        LogTrace beta = LogTrace::sub(sig0, alpha);
        auto at = [&](long long m) {
            LogTrace lp{m * gl, (T.s > 0 || m % 2 == 0) ? 1 : -1};
            LogTrace ln{-m * gl, lp.s};
            return LogTrace::add(
                LogTrace::add(LogTrace::mul(alpha, lp), LogTrace::mul(beta, ln)), k);
        };
        return {at(j), at(j - 1)};
    }
    using M3 = std::array<std::array<LogTrace, 3>, 3>;
    auto mul3 = [](const M3& a, const M3& b) {
        M3 r;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                LogTrace acc;
                for (int m = 0; m < 3; ++m)
                    acc = LogTrace::add(acc, LogTrace::mul(a[i][m], b[m][k]));
                r[i][k] = acc;
            }
        return r;
    };
    LogTrace one = LogTrace::from_double(1.0);
    M3 step{{{T, LogTrace::neg(one), LogTrace::neg(c)},
             {one, LogTrace{}, LogTrace{}},
             {LogTrace{}, LogTrace{}, one}}};
    M3 acc{{{one, LogTrace{}, LogTrace{}},
            {LogTrace{}, one, LogTrace{}},
            {LogTrace{}, LogTrace{}, one}}};
    for (long long e = j; e > 0; e >>= 1) {
        if (e & 1) acc = mul3(acc, step);
        if (e > 1) step = mul3(step, step);
    }
    auto apply = [&](int row) {
        return LogTrace::add(LogTrace::add(LogTrace::mul(acc[row][0], s0),
                                           LogTrace::mul(acc[row][1], sm1)),
                             acc[row][2]);
    };
    return {apply(0), apply(1)};
}

LogTrace slope_trace(const TraceEngine& E, Slope c) {
    long long p = c.p, q = c.q;
    if (p == 0) return E.x;
    if (q == 0) return E.y;
    if (p == 1 && q == 1) return E.z;
    LogTrace kap = LogTrace::from_double(E.farey_c);
    long long pl = 0, ql = 1, pr, qr;
    LogTrace tl = E.x, tr, tprev;
    if (p > 0) {
        pr = 1;
        qr = 0;
        tr = E.y;
        tprev = LogTrace::sub(LogTrace::sub(LogTrace::mul(E.x, E.y), E.z), kap);
    } else {
        pr = -1;
        qr = 0;
        tr = E.y;
        tprev = E.z;
    }
    // descend one continued-fraction digit per iteration, so <= ~90 rounds;
    // the last digit finishes inside a single run (target = l + beta r or
    // r + alpha l), which keeps huge-magnitude traces inside the closed form
    for (int guard = 0; guard < 256; ++guard) {
        __int128 det = (__int128)pl * qr - (__int128)ql * pr; // +-1
        long long alpha = (long long)(((__int128)p * qr - (__int128)q * pr) / det);
        long long beta = (long long)(((__int128)pl * q - (__int128)ql * p) / det);
        if (alpha <= 0 || beta <= 0)
            throw NumericalInstability("slope_trace cone descent failed");
        if (alpha >= beta) {
            // replace R by L-side mediants: s_j = t(r + j l), T = tl
            if (beta == 1) return trace_run(tl, tr, tprev, kap, alpha).first;
            long long j = (alpha - 1) / beta;
            auto [sj, sjm1] = trace_run(tl, tr, tprev, kap, j);
            pr += j * pl;
            qr += j * ql;
            tr = sj;
            tprev = sjm1;
        } else {
            if (alpha == 1) return trace_run(tr, tl, tprev, kap, beta).first;
            long long j = (beta - 1) / alpha;
            auto [sj, sjm1] = trace_run(tr, tl, tprev, kap, j);
            pl += j * pr;
            ql += j * qr;
            tl = sj;
            tprev = sjm1;
        }
    }
    throw BudgetExceeded("slope_trace descent too deep");
}

// Extended-precision mirror of the descent.  At small systole the FN-curve
// trace is 2 + O(l^2); long recurrence runs then sit so close to the parabolic
// threshold that double arithmetic can push a hyperbolic trace below 2.
namespace {

using mp100 = boost::multiprecision::cpp_bin_float_100;

struct EngineMp {
    mp100 x, y, z, c;
};

EngineMp make_engine_mp(const FNPoint& X) {
    auto torus = [](mp100 l, mp100 tau, mp100 b) {
        mp100 sh = sinh(l / 2);
        mp100 a = sqrt(1 + (2 + 2 * cosh(b / 2)) / (4 * sh * sh));
        return std::array<mp100, 3>{2 * cosh(l / 2), 2 * a * cosh((tau - l / 2) / 2),
                                    2 * a * cosh((tau + l / 2) / 2)};
    };
    if (X.is_s11()) {
        auto t = torus(X.lengths[0], X.twists[0], X.boundary());
        return {t[0], t[1], t[2], 0};
    }
    if (X.is_s04()) {
        auto t = torus(mp100(X.lengths[0]) / 2, mp100(X.twists[0]) / 2, 0);
        return {t[0] * t[0] - 2, t[1] * t[1] - 2, t[2] * t[2] - 2, 8};
    }
    throw UnsupportedConfiguration("trace engine only on S_{1,1}(b) and S_{0,4}");
}

// (s_j, s_{j-1}) for s_{k+1} = T s_k - s_{k-1} - c via a 3x3 matrix power
std::pair<mp100, mp100> trace_run_mp(const mp100& T, const mp100& s0, const mp100& sm1,
                                     const mp100& c, long long j) {
    using M3 = std::array<std::array<mp100, 3>, 3>;
    auto mul3 = [](const M3& a, const M3& b) {
        M3 r;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                mp100 acc = 0;
                for (int m = 0; m < 3; ++m) acc += a[i][m] * b[m][k];
                r[i][k] = acc;
            }
        return r;
    };
    M3 acc{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    M3 base{{{T, -1, -c}, {1, 0, 0}, {0, 0, 1}}};
    for (long long e = j; e > 0; e >>= 1) {
        if (e & 1) acc = mul3(acc, base);
        if (e > 1) base = mul3(base, base);
    }
    mp100 sj = acc[0][0] * s0 + acc[0][1] * sm1 + acc[0][2];
    mp100 sjm1 = acc[1][0] * s0 + acc[1][1] * sm1 + acc[1][2];
    return {sj, sjm1};
}

mp100 slope_trace_mp(const FNPoint& X, Slope c) {
    EngineMp E = make_engine_mp(X);
    long long p = c.p, q = c.q;
    if (p == 0) return E.x;
    if (q == 0) return E.y;
    if (p == 1 && q == 1) return E.z;
    long long pl = 0, ql = 1, pr, qr;
    mp100 tl = E.x, tr, tprev;
    if (p > 0) {
        pr = 1;
        qr = 0;
        tr = E.y;
        tprev = E.x * E.y - E.z - E.c;
    } else {
        pr = -1;
        qr = 0;
        tr = E.y;
        tprev = E.z;
    }
    for (int guard = 0; guard < 256; ++guard) {
        __int128 det = (__int128)pl * qr - (__int128)ql * pr; // +-1
        long long alpha = (long long)(((__int128)p * qr - (__int128)q * pr) / det);
        long long beta = (long long)(((__int128)pl * q - (__int128)ql * p) / det);
        if (alpha <= 0 || beta <= 0)
            throw NumericalInstability("slope_trace cone descent failed");
        if (alpha >= beta) {
            if (beta == 1) return trace_run_mp(tl, tr, tprev, E.c, alpha).first;
            long long j = (alpha - 1) / beta;
            auto [sj, sjm1] = trace_run_mp(tl, tr, tprev, E.c, j);
            pr += j * pl;
            qr += j * ql;
            tr = sj;
            tprev = sjm1;
        } else {
            if (alpha == 1) return trace_run_mp(tr, tl, tprev, E.c, beta).first;
            long long j = (beta - 1) / alpha;
            auto [sj, sjm1] = trace_run_mp(tr, tl, tprev, E.c, j);
            pl += j * pr;
            ql += j * qr;
            tl = sj;
            tprev = sjm1;
        }
    }
    throw BudgetExceeded("slope_trace descent too deep");
}

} // namespace

double slope_length_stable(const FNPoint& X, const TraceEngine& E, Slope c) {
    if (c.p == 0) return X.lengths[0]; // FN curve: exact, and near-parabolic at small l
    LogTrace t = slope_trace(E, c);
    if (t.abs_log() > std::log(2.002)) return trace_to_length(t);
    mp100 tm = abs(slope_trace_mp(X, c));
    if (!(tm > 2))
        throw NumericalInstability("non-hyperbolic slope trace (extended precision)");
    return static_cast<double>(mp100(2 * acosh(tm / 2)));
}

double curve_length(const FNPoint& X, Slope c) {
    TraceEngine E = make_engine(X);
    LogTrace t = slope_trace(E, c);
    if (!trace_is_hyperbolic(t))
        throw NumericalInstability("slope trace magnitude <= 2");
    return trace_to_length(t);
}

double multicurve_length(const FNPoint& X, const MultiCurveConfig& cfg,
                         const std::vector<Slope>& realization) {
    if (realization.size() != cfg.weights.size())
        throw ValidationError("realization size != k");
    double total = 0.0;
    for (std::size_t i = 0; i < realization.size(); ++i)
        total += rational_to_double(cfg.weights[i]) * curve_length(X, realization[i]);
    return total;
}

FNPoint twist(const FNPoint& X, int i, double t) {
    if (i < 0 || i >= static_cast<int>(X.twists.size()))
        throw ValidationError("twist index out of range");
    FNPoint Y = X;
    Y.twists[i] += t;
    return Y;
}

FNPoint earthquake_unit(const FNPoint& X, const MultiCurveConfig& cfg,
                        const std::vector<Slope>& realization, double t) {
    // lambda = a.gamma / l_{a.gamma}(X); component i of the multicurve is the
    // i-th FN coordinate curve, so the unit earthquake twists coordinate i at
    // rate a_i / Lambda.  Lambda is twist-invariant, hence the exact semigroup
    // property.
    (void)realization;
    if (cfg.k != static_cast<int>(X.lengths.size()))
        throw UnsupportedConfiguration("earthquake realization must match FN coordinates");
    double Lambda = 0.0;
    for (int i = 0; i < cfg.k; ++i)
        Lambda += rational_to_double(cfg.weights[i]) * X.lengths[i];
    FNPoint Y = X;
    for (int i = 0; i < cfg.k; ++i)
        Y.twists[i] += t * rational_to_double(cfg.weights[i]) / Lambda;
    return Y;
}

// Gauss-style reduction on the torus model.  Deep points make the Farey trace
// recursion cancel catastrophically (error ~ 1e-16 * e^l), so the reduction
// uses only the closed-form triangle traces of the current frame: tau-reduce,
// then flip to the dual whenever it is shorter.  The frame matrix W maps
// reduced-frame slopes back to the original coordinates.
struct ReducedFrame {
    double l = 0, tau = 0;    // torus-model coordinates, tau in [0, l)
    long long w[2][2] = {{1, 0}, {0, 1}}; // original = W * reduced
};

template <class Real>
static ReducedFrame torus_reduce_t(Real l, Real tau, Real b) {
    using std::acosh;
    using std::atanh;
    using std::cosh;
    using std::fabs;
    using std::floor;
    using std::sinh;
    using std::sqrt;
    using std::tanh;
    ReducedFrame R;
    for (int iter = 0; iter < 256; ++iter) {
        Real k = floor(tau / l);
        if (k != 0) {
            if (fabs(k) > 4e15)
                throw NumericalInstability("twist reduction quotient overflow");
            long long kk = static_cast<long long>(k);
            tau -= k * l;
            if (tau < 0) tau = 0;
            if (tau >= l) tau = 0;
            // slope relabel (p,q) -> (p, q - k p); fold its inverse into W
            for (int r = 0; r < 2; ++r) {
                double nw = double(R.w[r][0]) - double(R.w[r][1]) * double(kk);
                if (std::fabs(nw) > 4e15)
                    throw NumericalInstability("reduction frame overflow");
                R.w[r][0] -= kk * R.w[r][1];
            }
        }
        Real sh = sinh(l / 2);
        Real a = sqrt(1 + (2 + 2 * cosh(b / 2)) / (4 * sh * sh));
        Real chy = a * cosh((tau - l / 2) / 2); // = cosh(ly / 2), always > 1
        Real chz = a * cosh((tau + l / 2) / 2); // = cosh(lz / 2)
        Real ly = 2 * acosh(chy);
        if (!(ly < l * (1 - Real(1e-15)))) {
            R.l = static_cast<double>(l);
            R.tau = static_cast<double>(tau);
            return R;
        }
        // flip to the dual: new triple (x', y', z') = (y, x, z); recover tau'
        // from cosh(lz/2) via tanh(tau'/2) tanh(ly/4) = (chz - chx) / (chz + chx)
        Real chx = cosh(l / 2);
        Real v = (chz - chx) / ((chz + chx) * tanh(ly / 4));
        if (v < -1) v = Real(std::nextafter(-1.0, 0.0));
        if (v > 1) v = Real(std::nextafter(1.0, 0.0));
        l = ly;
        tau = 2 * atanh(v);
        for (int r = 0; r < 2; ++r) std::swap(R.w[r][0], R.w[r][1]);
    }
    throw ConvergenceFailure("torus reduction did not terminate");
}

static ReducedFrame torus_reduce(double l, double tau, double b) {
    // the double path loses ~1e-16 * e^(3l/4) through the flip's tau recovery,
    // so deep frames go through extended precision
    if (l <= 16.0) return torus_reduce_t<double>(l, tau, b);
    using mp100 = boost::multiprecision::cpp_bin_float_100;
    return torus_reduce_t<mp100>(mp100(l), mp100(tau), mp100(b));
}

static ReducedFrame reduce_frame(const FNPoint& X) {
    if (X.is_s11()) return torus_reduce(X.lengths[0], X.twists[0], X.boundary());
    if (X.is_s04()) {
        ReducedFrame R = torus_reduce(X.lengths[0] / 2.0, X.twists[0] / 2.0, 0.0);
        R.l *= 2.0;
        R.tau *= 2.0;
        return R;
    }
    throw UnsupportedConfiguration("reduction only on S_{1,1}(b) and S_{0,4}");
}

SystoleResult systole(const FNPoint& X) {
    ReducedFrame R = reduce_frame(X);
    // reduced-frame FN curve (0,1) pulled back to the original coordinates
    return {Slope(R.w[0][1], R.w[1][1]), R.l};
}

bool in_thick_part(const FNPoint& X, double eps) { return systole(X).length >= eps; }

// walk all slopes of Stern-Brocot depth <= depth in both fans, calling f(tX, tY)
template <class F>
static void paired_depth_walk(const TraceEngine& EX, const TraceEngine& EY, int depth, F&& f) {
    struct Node {
        LogTrace xl, xr, xprev, yl, yr, yprev;
        int d;
    };
    LogTrace kx = LogTrace::from_double(EX.farey_c);
    LogTrace ky = LogTrace::from_double(EY.farey_c);
    f(EX.x, EY.x);
    f(EX.y, EY.y);
    std::vector<Node> stack;
    LogTrace txn = LogTrace::sub(LogTrace::sub(LogTrace::mul(EX.x, EX.y), EX.z), kx);
    LogTrace tyn = LogTrace::sub(LogTrace::sub(LogTrace::mul(EY.x, EY.y), EY.z), ky);
    stack.push_back({EX.x, EX.y, txn, EY.x, EY.y, tyn, 0});
    stack.push_back({EX.x, EX.y, EX.z, EY.x, EY.y, EY.z, 0}); // negative fan
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        LogTrace xm = LogTrace::sub(LogTrace::sub(LogTrace::mul(nd.xl, nd.xr), nd.xprev), kx);
        LogTrace ym = LogTrace::sub(LogTrace::sub(LogTrace::mul(nd.yl, nd.yr), nd.yprev), ky);
        f(xm, ym);
        if (nd.d + 1 < depth) {
            stack.push_back({nd.xl, xm, nd.xr, nd.yl, ym, nd.yr, nd.d + 1});
            stack.push_back({xm, nd.xr, nd.xl, ym, nd.yr, nd.yl, nd.d + 1});
        }
    }
}

std::pair<double, double> thurston_dist_bound(const FNPoint& X, const FNPoint& Y, int depth) {
    if (!(X.surface == Y.surface))
        throw ValidationError("thurston_dist_bound needs points on the same surface");
    TraceEngine EX = make_engine(X), EY = make_engine(Y);
    double lower = 0.0;
    paired_depth_walk(EX, EY, depth, [&](const LogTrace& tx, const LogTrace& ty) {
        double r = std::fabs(std::log(trace_to_length(ty) / trace_to_length(tx)));
        lower = std::max(lower, r);
    });
    double upper = lower * (1.0 + 4.0 * std::pow(2.0, -static_cast<double>(depth)));
    return {lower, upper};
}

double fd_length_cap(double boundary) {
    // solve cosh(l/2) = sqrt(1 + (2+2cosh(b/2))/(4 sinh^2(l/2))) * cosh(l/4):
    // beyond this l the dual curve is shorter than l for every twist, so the FN
    // curve cannot be the systole.
    auto h = [&](double l) {
        double sh = std::sinh(l / 2.0);
        double bc = (2.0 + 2.0 * std::cosh(boundary / 2.0)) / (4.0 * sh * sh);
        double a = std::sqrt(1.0 + bc);
        return std::log(std::cosh(l / 2.0)) - std::log(a * std::cosh(l / 4.0));
    };
    double lo = 1e-6, hi = 4.0;
    while (h(hi) < 0.0 && hi < 2000.0) hi *= 1.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi + 1e-9;
}

FNPoint moduli_reduce(const FNPoint& X) {
    ReducedFrame R = reduce_frame(X);
    if (X.is_s04()) return FNPoint::s04(R.l, R.tau);
    return FNPoint::s11(R.l, R.tau, X.boundary());
}

} // namespace hl
