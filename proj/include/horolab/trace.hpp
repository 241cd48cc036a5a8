#pragma once

#include <cmath>
#include <limits>
#include "horolab/common.hpp"

namespace hl {

// Holonomy traces are propagated through the Farey recursion either as plain
// doubles (fast path, safe while magnitudes stay far from overflow) or in
// (log|t|, sign) form, which supports geodesic lengths far beyond the ~1418
// where 2cosh(l/2) leaves double range.

struct DoubleTrace {
    double t = 0.0;

    static DoubleTrace from_double(double v) { return {v}; }
    static DoubleTrace mul(DoubleTrace a, DoubleTrace b) { return {a.t * b.t}; }
    static DoubleTrace sub(DoubleTrace a, DoubleTrace b) { return {a.t - b.t}; }
    double abs_log() const { return std::log(std::fabs(t)); }
    double abs_value() const { return std::fabs(t); }
    bool abs_ge(double v) const { return std::fabs(t) >= v; }
    bool abs_ge(DoubleTrace o) const { return std::fabs(t) >= std::fabs(o.t); }
};

struct LogTrace {
    double g = -std::numeric_limits<double>::infinity(); // log |t|
    int s = 0;                                           // sign of t

    static LogTrace from_double(double v) {
        if (v == 0.0) return {};
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }
    static LogTrace mul(LogTrace a, LogTrace b) {
        if (a.s == 0 || b.s == 0) return {};
        return {a.g + b.g, a.s * b.s};
    }
    static LogTrace neg(LogTrace a) { return {a.g, -a.s}; }
    static LogTrace add(LogTrace a, LogTrace b) { return sub(a, neg(b)); }
    static LogTrace sub(LogTrace a, LogTrace b) {
        if (b.s == 0) return a;
        if (a.s == 0) return {b.g, -b.s};
        if (a.g < 40.0 && b.g < 40.0) {
            return from_double(a.s * std::exp(a.g) - b.s * std::exp(b.g));
        }
        // arrange |a| >= |b|
        bool flip = false;
        if (b.g > a.g) { std::swap(a, b); flip = true; }
        double d = b.g - a.g; // <= 0
        int rel = a.s * b.s;  // +1: cancellation, -1: reinforcement
        double f = (rel > 0) ? -std::expm1(d) : 1.0 + std::exp(d);
        LogTrace r;
        if (f <= 0.0) {
            r = LogTrace{}; // exact cancellation
        } else {
            r = LogTrace{a.g + std::log(f), a.s};
        }
        if (flip) r.s = -r.s;
        return r;
    }
    double abs_log() const { return g; }
    double abs_value() const { return std::exp(g); }
    bool abs_ge(double v) const { return s != 0 && g >= std::log(v); }
    bool abs_ge(LogTrace o) const { return o.s == 0 || (s != 0 && g >= o.g); }
};

// length of the geodesic with |trace| = 2cosh(len/2); requires |trace| > 2
template <class T>
inline double trace_to_length(const T& t) {
    double g = t.abs_log(); // log|t|
    if (!(g > std::log(2.0))) {
        throw NumericalInstability("trace magnitude <= 2, no geodesic length");
    }
    if (g < 300.0) {
        double half = t.abs_value() * 0.5;
        return 2.0 * std::acosh(half);
    }
    // 2*arccosh(e^g / 2) = 2*(g - log 2 + log1p(sqrt(1 - 4 e^{-2g})))
    double e = std::exp(-2.0 * (g - std::log(2.0)));
    return 2.0 * (g - std::log(2.0) + std::log1p(std::sqrt(1.0 - e)));
}

template <class T>
inline bool trace_is_hyperbolic(const T& t, double tol = 1e-12) {
    if (t.abs_log() >= 2.0) return true;
    return t.abs_value() > 2.0 + tol;
}

} // namespace hl
