#include "horolab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace hl {

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("ks_distance on empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                                  static_cast<double>(j) / b.size()));
    }
    return d;
}

double ks_distance(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw ValidationError("ks_distance on empty sample");
    std::sort(a.begin(), a.end());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double c = cdf(a[i]);
        d = std::max(d, std::fabs(c - static_cast<double>(i) / a.size()));
        d = std::max(d, std::fabs(c - static_cast<double>(i + 1) / a.size()));
    }
    return d;
}

double ks_distance_weighted(std::vector<std::pair<double, double>> a,
                            std::vector<std::pair<double, double>> b) {
    if (a.empty() || b.empty()) throw ValidationError("ks_distance on empty sample");
    auto norm = [](std::vector<std::pair<double, double>>& v) {
        double tot = 0.0;
        for (auto& [x, w] : v) {
            if (!(w > 0)) throw ValidationError("weights must be positive");
            tot += w;
        }
        std::sort(v.begin(), v.end());
        for (auto& [x, w] : v) w /= tot;
    };
    norm(a);
    norm(b);
    std::size_t i = 0, j = 0;
    double ca = 0.0, cb = 0.0, d = 0.0;
    while (i < a.size() || j < b.size()) {
        double xa = i < a.size() ? a[i].first : std::numeric_limits<double>::infinity();
        double xb = j < b.size() ? b[j].first : std::numeric_limits<double>::infinity();
        if (xa <= xb)
            ca += a[i++].second;
        else
            cb += b[j++].second;
        d = std::max(d, std::fabs(ca - cb));
    }
    return d;
}

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("linear_fit needs n >= 2");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw ValidationError("linear_fit with constant x");
    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (r.intercept + r.slope * x[i]);
        sse += e * e;
    }
    r.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    r.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return r;
}

FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw ValidationError("loglog_fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly);
}

double chi_square_uniform(const std::vector<std::size_t>& counts) {
    if (counts.empty()) throw ValidationError("chi_square_uniform on empty bins");
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    double expect = total / counts.size();
    if (!(expect > 0)) throw ValidationError("chi_square_uniform needs observations");
    double chi = 0;
    for (auto c : counts) {
        double d = static_cast<double>(c) - expect;
        chi += d * d / expect;
    }
    return chi;
}

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("mean_stderr on empty sample");
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    double se = v.size() > 1 ? std::sqrt(s2 / (v.size() - 1.0) / v.size()) : 0.0;
    return {m, se};
}

} // namespace hl
