#pragma once

#include <cstdint>
#include <utility>
#include <vector>
#include "horolab/geometry.hpp"

namespace hl {

// Measured lamination on a complexity-1 surface as a planar coordinate pair:
// a weighted slope w*(p/q) sits at (u,v) = w*(q,p).
struct LaminationCoord {
    double u = 0, v = 0;

    LaminationCoord() = default;
    LaminationCoord(double u_, double v_) : u(u_), v(v_) {
        if (u == 0 && v == 0) throw ValidationError("lamination coordinate (0,0)");
        if (v < 0 || (v == 0 && u < 0)) {
            u = -u;
            v = -v;
        }
    }
};

struct CountResult {
    double L = 0;
    std::uint64_t count = 0;
    double normalized = 0; // count / L^{6g-6+2n}
    bool capped = false;
};

struct CountBudget {
    std::uint64_t cap = 100000000ULL; // lazy enumeration cap (default 1e8)
};

std::vector<std::pair<Slope, double>> enumerate_simple_curves(const FNPoint& X, double L,
                                                              const CountBudget& budget = {});

CountResult count_s(const FNPoint& X, const MultiCurveConfig& cfg, double b1, double L,
                    const CountBudget& budget = {});
CountResult count_m(const FNPoint& X, const MultiCurveConfig& cfg, double L,
                    const CountBudget& budget = {});
CountResult count_integral_multicurves(const FNPoint& X, double L,
                                       const CountBudget& budget = {});

// (estimate, drift): normalized integral-multicurve count at L_max and its
// relative change from L_max/2
std::pair<double, double> estimate_B(const FNPoint& X, double L_max,
                                     const CountBudget& budget = {});

struct LaminationLengthResult {
    double value = 0;
    double error = 0; // last convergent increment (reported error bound)
};
LaminationLengthResult lamination_length_full(const FNPoint& X, const LaminationCoord& lam,
                                              int max_depth = 60, double tol = 1e-12);
double lamination_length(const FNPoint& X, const LaminationCoord& lam);

double intersection_number(double w1, Slope c1, double w2, Slope c2);

// adaptive partition of [0, pi) with r(theta)^2 = 1/F(theta)^2 samples and the
// per-segment integral; the cone measure on the ball boundary has theta-density
// proportional to r^2, so the segments double as a sampling table
struct NormBallSegment {
    double a = 0, b = 0;          // theta range
    double fa = 0, fm = 0, fb = 0; // r^2 at the endpoints and midpoint
    double mass = 0;              // integral of r^2 over [a, b]
};
std::vector<NormBallSegment> norm_ball_segments(const FNPoint& X, int intervals = 256,
                                                double rel_tol = 1e-9);

// full-plane Lebesgue area of the unit length ball {F_X <= 1} in (u,v);
// rel_tol steers the adaptive refinement (values below the quadrature noise
// floor just cost more without improving the answer)
double norm_ball_area(const FNPoint& X, int intervals = 256, double rel_tol = 1e-9);

// Thurston-normalization constant relating planar area to the counting limit,
// derived empirically and frozen in data/derived_constants.json
double thurston_kappa();

// B(X) = kappa * norm_ball_area(X)  (Mirzakhani function via the norm-ball route)
double mirzakhani_B(const FNPoint& X, int intervals = 256, double rel_tol = 1e-9);

} // namespace hl
