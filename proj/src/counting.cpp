#include "horolab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <json.hpp>
#include "horolab/farey.hpp"

namespace hl {

std::vector<std::pair<Slope, double>> enumerate_simple_curves(const FNPoint& X, double L,
                                                              const CountBudget& budget) {
    if (!(L > 0)) throw ValidationError("enumerate_simple_curves needs L > 0");
    TraceEngine E = make_engine(X);
    FareyBudget fb;
    fb.node_cap = budget.cap;
    std::vector<std::pair<Slope, double>> out;
    farey_enumerate(E, L, fb, [&](Slope s, const LogTrace&, double len) {
        if (out.size() >= budget.cap) throw BudgetExceeded("curve list cap");
        out.emplace_back(s, len);
        return true;
    });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return out;
}

// On S_{0,4} with labeled punctures, mapping classes preserve the slope
// residue mod 2; the FN-curve orbit is the (0,1) class.
static bool in_fn_orbit(const FNPoint& X, Slope s) {
    if (X.is_s11()) return true;
    return ((s.p % 2 + 2) % 2) == 0 && ((s.q % 2 + 2) % 2) == 1;
}

CountResult count_s(const FNPoint& X, const MultiCurveConfig& cfg, double b1, double L,
                    const CountBudget& budget) {
    if (cfg.k != 1) throw UnsupportedConfiguration("counting only for k = 1 configurations");
    if (!(b1 > 0) || !(L >= 0)) throw ValidationError("count_s needs b1 > 0, L >= 0");
    CountResult r;
    r.L = L;
    if (L > 0) {
        TraceEngine E = make_engine(X);
        FareyBudget fb;
        fb.node_cap = budget.cap;
        std::uint64_t n = 0;
        farey_enumerate(E, b1 * L, fb, [&](Slope s, const LogTrace&, double) {
            if (in_fn_orbit(X, s)) ++n;
            return true;
        });
        r.count = n;
    }
    int d = X.surface.dim();
    r.normalized = L > 0 ? static_cast<double>(r.count) / std::pow(L, d) : 0.0;
    return r;
}

CountResult count_m(const FNPoint& X, const MultiCurveConfig& cfg, double L,
                    const CountBudget& budget) {
    return count_s(X, cfg, 1.0, L, budget);
}

CountResult count_integral_multicurves(const FNPoint& X, double L, const CountBudget& budget) {
    if (!(L >= 0)) throw ValidationError("count_integral_multicurves needs L >= 0");
    CountResult r;
    r.L = L;
    if (L > 0) {
        TraceEngine E = make_engine(X);
        FareyBudget fb;
        fb.node_cap = budget.cap;
        std::uint64_t n = 0;
        farey_enumerate(E, L, fb, [&](Slope, const LogTrace&, double len) {
            n += static_cast<std::uint64_t>(std::floor(L / len));
            return true;
        });
        r.count = n;
    }
    r.normalized = L > 0 ? static_cast<double>(r.count) / (L * L) : 0.0;
    return r;
}

std::pair<double, double> estimate_B(const FNPoint& X, double L_max, const CountBudget& budget) {
    if (!(L_max >= 40)) throw ValidationError("estimate_B needs L_max >= 40");
    double full = count_integral_multicurves(X, L_max, budget).normalized;
    double half = count_integral_multicurves(X, L_max / 2.0, budget).normalized;
    return {full, std::fabs(full - half) / full};
}

double intersection_number(double w1, Slope c1, double w2, Slope c2) {
    if (w1 < 0 || w2 < 0) throw ValidationError("weights must be non-negative");
    return w1 * w2 * std::fabs(static_cast<double>(c1.p) * c2.q -
                               static_cast<double>(c1.q) * c2.p);
}

LaminationLengthResult lamination_length_full(const FNPoint& X, const LaminationCoord& lam,
                                              int max_depth, double tol) {
    TraceEngine E = make_engine(X);
    double u = lam.u, v = lam.v;
    // axis directions are exact weighted slopes
    if (v == 0.0) return {u * trace_to_length(E.x), 0.0};
    if (u == 0.0) return {v * trace_to_length(E.y), 0.0};
    // continued-fraction convergents of the slope value t = v/u; the weighted
    // slope w*(p/q) sits at w*(q,p), so project (u,v) on each convergent
    double t = v / u;
    long long p0 = 1, q0 = 0; // h_{-1}
    long long p1 = static_cast<long long>(std::floor(t)), q1 = 1;
    double rem = t - std::floor(t);
    double prev = 0.0, cur = 0.0, err = 0.0;
    for (int k = 0; k < max_depth; ++k) {
        double w = (u * q1 + v * p1) / (static_cast<double>(q1) * q1 + static_cast<double>(p1) * p1);
        double len = slope_length_stable(X, E, Slope(p1, q1));
        cur = std::fabs(w) * len;
        err = std::fabs(cur - prev);
        if (k > 0 && err <= tol * std::fabs(cur)) return {cur, err};
        if (rem <= 1e-15) return {cur, 0.0}; // direction is (numerically) rational
        double inv = 1.0 / rem;
        double digit = std::floor(inv);
        if (digit > 1e15) return {cur, err};
        rem = inv - digit;
        long long a = static_cast<long long>(digit);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (q1 > (1LL << 60)) return {cur, err};
        prev = cur;
    }
    if (err > 1e-6 * std::fabs(cur))
        throw ConvergenceFailure("lamination_length convergents not Cauchy at max depth");
    return {cur, err};
}

double lamination_length(const FNPoint& X, const LaminationCoord& lam) {
    return lamination_length_full(X, lam).value;
}

std::vector<NormBallSegment> norm_ball_segments(const FNPoint& X, int intervals,
                                                double rel_tol) {
    if (intervals < 8 || intervals % 2 != 0)
        throw ValidationError("norm_ball_area needs an even interval count >= 8");
    // full-plane area of {F <= 1} = integral over [0, pi) of r(theta)^2 dtheta;
    // the per-direction length only needs to resolve somewhat below the
    // quadrature target, which saves most of the convergent iterations
    double lam_tol = std::clamp(rel_tol * 1e-2, 1e-12, 1e-6);
    auto r2 = [&](double theta) {
        double c = std::cos(theta), s = std::sin(theta);
        if (std::fabs(s) < 1e-15) {
            s = 0.0;
            c = 1.0;
        }
        double F = lamination_length_full(X, LaminationCoord(c, s), 60, lam_tol).value;
        return 1.0 / (F * F);
    };
    // The ball degenerates into a sliver as the systole shrinks: r^2 spikes by
    // a factor ~ 1/l^2 over a window of width ~ l around the short direction,
    // so a fixed grid is hopeless.  Refine greedily, always splitting the
    // segment with the largest Simpson error estimate, so the budget goes to
    // the spike instead of being burnt on quadrature noise in the flat part.
    double h = PI / intervals;
    auto simpson = [&](double fa, double fm, double fb, double width) {
        return (fa + 4.0 * fm + fb) * width / 6.0;
    };
    std::vector<double> fg(intervals + 1);
    for (int i = 0; i <= intervals; ++i) fg[i] = r2(std::min(i * h, PI - 1e-14));
    struct Seg {
        double err, a, fa, m, fm, b, fb, S;
        int depth;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    auto make_seg = [&](double a, double fa, double b, double fb, int depth) {
        double m = 0.5 * (a + b);
        double fm = r2(m);
        double S = simpson(fa, fm, fb, b - a);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double S2 = simpson(fa, r2(lm), fm, m - a) + simpson(fm, r2(rm), fb, b - m);
        return Seg{std::fabs(S2 - S), a, fa, m, fm, b, fb, S2, depth};
    };
    std::priority_queue<Seg> heap;
    std::vector<NormBallSegment> done;
    double total = 0.0, esum = 0.0;
    for (int i = 0; i < intervals; ++i) {
        Seg s = make_seg(i * h, fg[i], (i + 1) * h, fg[i + 1], 0);
        total += s.S;
        esum += s.err;
        heap.push(s);
    }
    long splits = 0;
    const long split_budget = 40L * intervals;
    while (esum > rel_tol * std::fabs(total) && splits < split_budget && !heap.empty()) {
        Seg s = heap.top();
        heap.pop();
        esum -= s.err;
        if (s.depth >= 48) { // below quadrature noise, keep its estimate
            done.push_back({s.a, s.b, s.fa, s.fm, s.fb, s.S});
            continue;
        }
        total -= s.S;
        Seg l = make_seg(s.a, s.fa, s.m, s.fm, s.depth + 1);
        Seg r = make_seg(s.m, s.fm, s.b, s.fb, s.depth + 1);
        total += l.S + r.S;
        esum += l.err + r.err;
        heap.push(l);
        heap.push(r);
        ++splits;
    }
    while (!heap.empty()) {
        const Seg& s = heap.top();
        done.push_back({s.a, s.b, s.fa, s.fm, s.fb, s.S});
        heap.pop();
    }
    std::sort(done.begin(), done.end(),
              [](const NormBallSegment& x, const NormBallSegment& y) { return x.a < y.a; });
    return done;
}

double norm_ball_area(const FNPoint& X, int intervals, double rel_tol) {
    double total = 0.0;
    for (const NormBallSegment& s : norm_ball_segments(X, intervals, rel_tol)) total += s.mass;
    return total;
}

double thurston_kappa() {
    static double kappa = [] {
        std::ifstream in(std::string(HOROLAB_DATA_DIR) + "/derived_constants.json");
        if (!in) throw ValidationError("cannot open derived_constants.json");
        nlohmann::json j = nlohmann::json::parse(in);
        return j.at("thurston_kappa").at("value").get<double>();
    }();
    return kappa;
}

double mirzakhani_B(const FNPoint& X, int intervals, double rel_tol) {
    return thurston_kappa() * norm_ball_area(X, intervals, rel_tol);
}

} // namespace hl
