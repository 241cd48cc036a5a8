#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>
#include "horolab/geometry.hpp"

namespace hl {

// Depth-first walk of the two Farey fans (p >= 0 and p <= 0), carrying traces
// through t(a+b) = t(a) t(b) - t(a-b) - farey_c.
//
// Every slope whose length is <= Lmax is emitted exactly once, including the
// base slopes (0,1) and (1,0). Termination is certified by the collar box
// (|p| <= Pmax, q <= Qmax): mediant coordinates grow monotonically inside a
// fan, so the box prune is subtree-safe. A monotone-regime trace prune (all
// triangle traces >= 2.5 in magnitude, far neighbor dominated, mediant already
// too long) is layered on top for speed; it is certified by
// |t1 t2 - t3 - c| >= |t1||t2| - |t3| - c.
//
// Visitor: bool visit(Slope, const LogTrace&, double length) for emitted
// slopes (length <= Lmax); return false to abort the walk.

struct FareyBudget {
    std::uint64_t node_cap = 100000000ULL;
    std::uint64_t nodes = 0;
};

namespace detail {

template <class Visit>
bool farey_fan(const TraceEngine& E, double Lmax, double Pmax, double Qmax,
               long long pl0, long long ql0, LogTrace tl0,
               long long pr0, long long qr0, LogTrace tr0, LogTrace tprev0,
               FareyBudget& budget, Visit&& visit) {
    struct Node {
        long long pl, ql, pr, qr;
        LogTrace tl, tr, tprev;
    };
    std::vector<Node> stack;
    stack.push_back({pl0, ql0, pr0, qr0, tl0, tr0, tprev0});
    // log(2 cosh(Lmax/2)), stable for any Lmax
    const double log_cap = Lmax / 2.0 + std::log1p(std::exp(-Lmax));
    while (!stack.empty()) {
        if (++budget.nodes > budget.node_cap)
            throw BudgetExceeded("Farey enumeration node cap hit");
        Node nd = stack.back();
        stack.pop_back();
        long long pm = nd.pl + nd.pr, qm = nd.ql + nd.qr;
        LogTrace tm = LogTrace::sub(LogTrace::sub(LogTrace::mul(nd.tl, nd.tr), nd.tprev),
                                    LogTrace::from_double(E.farey_c));
        bool within = false;
        if (tm.abs_log() <= log_cap + 1e-9) {
            if (!trace_is_hyperbolic(tm)) {
#ifdef HOROLAB_FAREY_DEBUG
                std::fprintf(stderr,
                             "farey fail: pm=%lld qm=%lld tm(g=%.17g,s=%d) tl(g=%.17g) "
                             "tr(g=%.17g) tprev(g=%.17g) pl=%lld ql=%lld pr=%lld qr=%lld\n",
                             pm, qm, tm.g, tm.s, nd.tl.g, nd.tr.g, nd.tprev.g, nd.pl,
                             nd.ql, nd.pr, nd.qr);
#endif
                throw NumericalInstability("non-hyperbolic slope trace in enumeration");
            }
            double len = trace_to_length(tm);
            if (len <= Lmax) {
                within = true;
                if (!visit(Slope(pm, qm), tm, len)) return false;
            }
        }
        // monotone-regime prune: every descendant trace dominates |tm|
        if (!within) {
            double lo = std::log(2.5);
            bool regime = nd.tl.abs_log() >= lo && nd.tr.abs_log() >= lo &&
                          tm.abs_ge(nd.tl) && tm.abs_ge(nd.tr) &&
                          tm.abs_ge(std::max(2.5, 2.0 * E.farey_c));
            if (regime) continue;
        }
        // collar box prune, subtree-safe (coordinates grow along a fan)
        if ((double)std::llabs(nd.pl + pm) <= Pmax && (double)(nd.ql + qm) <= Qmax)
            stack.push_back({nd.pl, nd.ql, pm, qm, nd.tl, tm, nd.tr});
        if ((double)std::llabs(pm + nd.pr) <= Pmax && (double)(qm + nd.qr) <= Qmax)
            stack.push_back({pm, qm, nd.pr, nd.qr, tm, nd.tr, nd.tl});
    }
    return true;
}

} // namespace detail

// collar half-width of a geodesic of length m
inline double collar_halfwidth(double m) {
    if (m > 1400.0) return 2.0 * std::exp(-m / 2.0); // asinh(1/sinh) tail
    return std::asinh(1.0 / std::sinh(m / 2.0));
}

template <class Visit>
void farey_enumerate(const TraceEngine& E, double Lmax, FareyBudget& budget, Visit&& visit) {
    if (Lmax <= 0) return;
    double la = trace_to_length(E.x);
    double lb = trace_to_length(E.y);
    double Pmax = Lmax / (2.0 * collar_halfwidth(la));
    double Qmax = Lmax / (2.0 * collar_halfwidth(lb));
    if (la <= Lmax) {
        if (!visit(Slope(0, 1), E.x, la)) return;
    }
    if (lb <= Lmax) {
        if (!visit(Slope(1, 0), E.y, lb)) return;
    }
    // t(-1,1) = x y - z - c
    LogTrace tneg = LogTrace::sub(LogTrace::sub(LogTrace::mul(E.x, E.y), E.z),
                                  LogTrace::from_double(E.farey_c));
    if (!detail::farey_fan(E, Lmax, Pmax, Qmax, 0, 1, E.x, 1, 0, E.y, tneg, budget, visit))
        return;
    detail::farey_fan(E, Lmax, Pmax, Qmax, 0, 1, E.x, -1, 0, E.y, E.z, budget, visit);
}

} // namespace hl
