#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>
#include "horolab/common.hpp"
#include "horolab/topology.hpp"
#include "horolab/trace.hpp"

namespace hl {

// Simple closed curves on the complexity-1 surfaces are indexed by slopes:
// (0,1) is the Fenchel-Nielsen pants curve, (1,0) its dual.
struct Slope {
    long long p = 0;
    long long q = 1;

    Slope() = default;
    Slope(long long p_, long long q_) : p(p_), q(q_) { normalize(); }
    void normalize();
    bool operator==(const Slope& o) const { return p == o.p && q == o.q; }
    bool operator<(const Slope& o) const { return p != o.p ? p < o.p : q < o.q; }
};

long long slope_gcd(long long a, long long b);

struct FNPoint {
    SurfaceSig surface;
    std::vector<double> lengths;          // l_i > 0, size = complexity
    std::vector<double> twists;           // tau_i, size = complexity
    std::vector<double> boundary_lengths; // 0 encodes a cusp (surface.b entries; or
                                          // 1 entry for the one-holed torus model)

    static FNPoint s11(double l, double tau, double boundary = 0.0);
    static FNPoint s04(double l, double tau);
    void validate() const;
    bool is_s11() const { return surface.g == 1 && surface.n + surface.b >= 1 && surface.complexity() == 1; }
    bool is_s04() const { return surface.g == 0 && surface.n == 4 && surface.b == 0; }
    bool geometry_supported() const { return is_s11() || is_s04(); }
    double boundary() const { return boundary_lengths.empty() ? 0.0 : boundary_lengths[0]; }
};

struct TraceTriple {
    double x = 0, y = 0, z = 0;
    // Markov-type relation residual: x^2+y^2+z^2-xyz - rhs
    double relation_residual(double rhs) const;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

struct Holonomy {
    Mat2 A, B;          // generators (torus model; for S_{0,4} the slope curves are
                        // the squares of torus words in the index-4 subgroup picture)
    TraceTriple traces; // traces of slopes (0,1), (1,0), (1,1) on the surface itself
    double residual;    // trace-relation residual
};

// Surface-level trace engine. For the torus the Farey recursion constant is 0;
// for S_{0,4} (traces t = t_torus^2 - 2 at half coordinates) it is 8:
//   t(a+b) + t(a-b) = t(a) t(b) - farey_c
struct TraceEngine {
    LogTrace x, y, z; // traces of (0,1), (1,0), (1,1)
    double farey_c = 0.0;
    double markov_rhs = 0.0; // x^2+y^2+z^2-xyz for the torus case (0 when cusped)
};

TraceEngine make_engine(const FNPoint& X);

Holonomy build_holonomy(const FNPoint& X);
Mat2 word_matrix(Slope c, const Mat2& A, const Mat2& B); // Stern-Brocot word oracle

LogTrace slope_trace(const TraceEngine& E, Slope c);
double curve_length(const FNPoint& X, Slope c);
// like trace_to_length(slope_trace(...)), but near-parabolic traces (which
// double precision cannot resolve at small systole) are recomputed in
// extended precision instead of misreporting or throwing
double slope_length_stable(const FNPoint& X, const TraceEngine& E, Slope c);
double multicurve_length(const FNPoint& X, const MultiCurveConfig& cfg,
                         const std::vector<Slope>& realization);

FNPoint twist(const FNPoint& X, int i, double t);
FNPoint earthquake_unit(const FNPoint& X, const MultiCurveConfig& cfg,
                        const std::vector<Slope>& realization, double t);

struct SystoleResult {
    Slope slope;
    double length = 0;
};
SystoleResult systole(const FNPoint& X);

std::pair<double, double> thurston_dist_bound(const FNPoint& X, const FNPoint& Y, int depth);
bool in_thick_part(const FNPoint& X, double eps);

// Canonical fundamental-domain representative of the underlying moduli point:
// remarks so the systole becomes the FN curve and tau lands in [0, l).
FNPoint moduli_reduce(const FNPoint& X);

// Largest l for which the FN curve can still be the systole (given boundary b);
// used as the Bers-type cap for fundamental-domain rejection sampling.
double fd_length_cap(double boundary);

} // namespace hl
