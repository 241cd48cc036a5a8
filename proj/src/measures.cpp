#include "horolab/measures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>
#include "horolab/counting.hpp"

namespace hl {

void SamplerConfig::validate() const {
    if (sample_count < 1) throw ValidationError("sample_count must be >= 1");
    if (rejection_cap < 1) throw ValidationError("rejection_cap must be >= 1");
    if (threads < 1) throw ValidationError("threads must be >= 1");
}

// deterministic parallel map over sample indices: every index owns its RNG
// substream, so the result is independent of the thread partition
template <class Fn>
static void parallel_for(std::uint64_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        try {
            for (;;) {
                std::uint64_t i = next.fetch_add(64);
                if (i >= n) return;
                std::uint64_t hi = std::min(n, i + 64);
                for (; i < hi; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(err_mu);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// fundamental domain

FdDomain FdDomain::s11(double boundary) {
    if (boundary < 0) throw ValidationError("negative boundary length");
    FdDomain d;
    d.surface = boundary > 0 ? SurfaceSig{1, 0, 1} : SurfaceSig{1, 1, 0};
    d.boundary = boundary;
    return d;
}

FdDomain FdDomain::s04() {
    FdDomain d;
    d.surface = SurfaceSig{0, 4, 0};
    return d;
}

double FdDomain::cap() const {
    if (surface.g == 0) return 2.0 * fd_length_cap(0.0); // S_{0,4} doubles the torus
    return fd_length_cap(boundary);
}

FNPoint FdDomain::make(double l, double tau) const {
    if (surface.g == 0) return FNPoint::s04(l, tau);
    return FNPoint::s11(l, tau, boundary);
}

// ---------------------------------------------------------------------------
// samplers

std::vector<FNPoint> sample_wp_cell(const FNPoint& shape,
                                    const std::vector<std::pair<double, double>>& length_ranges,
                                    const std::vector<std::pair<double, double>>& twist_ranges,
                                    const SamplerConfig& cfg) {
    cfg.validate();
    if (length_ranges.size() != shape.lengths.size() ||
        twist_ranges.size() != shape.twists.size())
        throw ValidationError("sample_wp_cell range arity mismatch");
    for (const auto& [lo, hi] : length_ranges)
        if (!(0 < lo && lo < hi)) throw ValidationError("length range must be 0 < lo < hi");
    for (const auto& [lo, hi] : twist_ranges)
        if (!(lo < hi)) throw ValidationError("twist range must be lo < hi");
    CounterRng rng(cfg.seed, /*stream=*/11);
    std::vector<FNPoint> out(cfg.sample_count, shape);
    parallel_for(cfg.sample_count, cfg.threads, [&](std::uint64_t i) {
        FNPoint& X = out[i];
        std::uint64_t slot = 0;
        for (std::size_t d = 0; d < length_ranges.size(); ++d)
            X.lengths[d] = rng.uniform(i, slot++, length_ranges[d].first, length_ranges[d].second);
        for (std::size_t d = 0; d < twist_ranges.size(); ++d)
            X.twists[d] = rng.uniform(i, slot++, twist_ranges[d].first, twist_ranges[d].second);
    });
    return out;
}

FdRun sample_moduli_fd(const FdDomain& dom, const SamplerConfig& cfg) {
    cfg.validate();
    double cap = dom.cap();
    double tau_hi = cfg.fd_convention == FdConvention::full_cell ? cap : cap / 2.0;
    CounterRng rng(cfg.seed, /*stream=*/21);
    FdRun run;
    run.box_area = cap * tau_hi;
    run.samples.resize(cfg.sample_count);
    std::vector<std::uint64_t> attempts(cfg.sample_count, 0);
    parallel_for(cfg.sample_count, cfg.threads, [&](std::uint64_t i) {
        for (std::uint64_t j = 0; j < cfg.rejection_cap; ++j) {
            ++attempts[i];
            double l = cap * (1.0 - rng.u01(i, 2 * j));
            double tau = tau_hi * rng.u01(i, 2 * j + 1);
            double tmax = cfg.fd_convention == FdConvention::full_cell ? l : l / 2.0;
            if (tau >= tmax) continue;
            FNPoint X = dom.make(l, tau);
            if (!(systole(X).slope == Slope(0, 1))) continue;
            run.samples[i] = {X, 1.0, "wp_fd", {}};
            return;
        }
        throw RejectionCapExceeded("fundamental-domain sampler exhausted its attempts");
    });
    for (auto a : attempts) run.attempts += a;
    return run;
}

static std::vector<double> weight_support_hi(const WeightFunction& f) {
    switch (f.kind) {
        case WeightFunction::Kind::box: return f.box_hi;
        case WeightFunction::Kind::callable: return f.support_hi;
        case WeightFunction::Kind::piecewise: {
            std::vector<double> hi;
            for (const auto& p : f.pw) hi.push_back(p.knots.back());
            return hi;
        }
    }
    return {};
}

// envelope for rejection sampling of a density g on a box (g >= 0)
template <class G>
static double density_envelope(const G& g, const std::vector<double>& hi, bool monotone) {
    if (monotone) return g(hi) * (1.0 + 1e-12);
    int k = static_cast<int>(hi.size());
    int n = k == 1 ? 512 : (k == 2 ? 64 : 24);
    std::vector<double> x(k);
    double best = 0.0;
    std::vector<int> idx(k, 0);
    for (;;) {
        for (int d = 0; d < k; ++d) x[d] = hi[d] * (idx[d] + 0.5) / n;
        best = std::max(best, g(x));
        int d = 0;
        while (d < k && ++idx[d] == n) idx[d++] = 0;
        if (d == k) break;
    }
    if (!(best > 0)) throw ValidationError("weight function vanishes on its support box");
    return best * 1.5;
}

static void check_sampler_pieces(const CutData& cut) {
    for (const auto& p : cut.pieces) {
        bool pants = p.g == 0 && p.n + p.b == 3;
        bool torus = p.g == 1 && p.n == 0 && p.b == 1;
        if (!pants && !torus)
            throw UnsupportedConfiguration("sampler pieces must be pants or one-holed tori");
    }
}

static FNPoint adapted_point(const SurfaceSig& base, std::vector<double> lengths,
                             std::vector<double> twists) {
    if (base.g == 1 && base.n == 1 && base.b == 0)
        return FNPoint::s11(lengths[0], twists[0]);
    if (base.g == 0 && base.n == 4 && base.b == 0) return FNPoint::s04(lengths[0], twists[0]);
    FNPoint X;
    X.surface = base;
    X.lengths = std::move(lengths);
    X.twists = std::move(twists);
    return X;
}

// draw the moduli of the non-pants pieces and the twists, then assemble
static SurfaceSample finish_sample(const MultiCurveConfig& cfg, const CutData& cut,
                                   const std::vector<double>& phys_l, std::uint64_t i,
                                   const SamplerConfig& scfg, const char* provenance) {
    CounterRng twist_rng(scfg.seed, /*stream=*/31);
    int k = cfg.k;
    std::vector<double> twists(k);
    for (int c = 0; c < k; ++c) twists[c] = phys_l[c] * twist_rng.u01(i, c);
    SurfaceSample s;
    s.point = adapted_point(cfg.base, phys_l, twists);
    s.weight = 1.0;
    s.provenance = provenance;
    for (std::size_t jp = 0; jp < cut.pieces.size(); ++jp) {
        const SurfaceSig& pc = cut.pieces[jp];
        if (!(pc.g == 1 && pc.n == 0 && pc.b == 1)) continue;
        FdDomain dom = FdDomain::s11(phys_l[cut.boundary_map[jp][0]]);
        double cap = dom.cap();
        double tau_hi = scfg.fd_convention == FdConvention::full_cell ? cap : cap / 2.0;
        CounterRng prng(scfg.seed, /*stream=*/41 + jp);
        bool done = false;
        for (std::uint64_t j = 0; j < scfg.rejection_cap && !done; ++j) {
            double l = cap * (1.0 - prng.u01(i, 2 * j));
            double tau = tau_hi * prng.u01(i, 2 * j + 1);
            double tmax = scfg.fd_convention == FdConvention::full_cell ? l : l / 2.0;
            if (tau >= tmax) continue;
            FNPoint P = dom.make(l, tau);
            if (!(systole(P).slope == Slope(0, 1))) continue;
            s.pieces.push_back(P);
            done = true;
        }
        if (!done) throw RejectionCapExceeded("piece moduli sampler exhausted its attempts");
    }
    return s;
}

std::vector<SurfaceSample> sample_horoball(const MultiCurveConfig& cfg, const WeightFunction& f,
                                           double L, const SamplerConfig& scfg) {
    scfg.validate();
    if (f.dims() != cfg.k) throw ValidationError("weight arity != configuration k");
    if (!(L > 0)) throw ValidationError("sample_horoball needs L > 0");
    const CutData& cut = ConfigTable::instance().cut(cfg.key);
    check_sampler_pieces(cut);
    GradedPoly V = assemble_V(cfg);
    int k = cfg.k;
    std::vector<double> hi = weight_support_hi(f);
    auto density = [&](const std::vector<double>& x) {
        double fx = f(x);
        if (fx <= 0.0) return 0.0;
        std::vector<double> lx(x);
        for (double& v : lx) v *= L;
        return fx * poly_eval(V, lx);
    };
    double M = density_envelope(density, hi, f.kind == WeightFunction::Kind::box);
    CounterRng rng(scfg.seed, /*stream=*/51);
    std::vector<SurfaceSample> out(scfg.sample_count);
    parallel_for(scfg.sample_count, scfg.threads, [&](std::uint64_t i) {
        std::vector<double> x(k);
        for (std::uint64_t j = 0; j < scfg.rejection_cap; ++j) {
            std::uint64_t base_slot = j * (k + 1);
            for (int d = 0; d < k; ++d) x[d] = hi[d] * rng.u01(i, base_slot + d);
            double g = density(x);
            if (g > M)
                throw NumericalInstability("horoball rejection envelope exceeded");
            if (rng.u01(i, base_slot + k) * M >= g) continue;
            std::vector<double> phys(k);
            for (int d = 0; d < k; ++d) phys[d] = L * x[d];
            out[i] = finish_sample(cfg, cut, phys, i, scfg, "horoball");
            return;
        }
        throw RejectionCapExceeded("horoball sampler exhausted its attempts");
    });
    return out;
}

std::vector<SurfaceSample> sample_horosphere(const MultiCurveConfig& cfg,
                                             const std::vector<double>& a,
                                             const WeightFunction& f, double L,
                                             const SamplerConfig& scfg) {
    scfg.validate();
    if (f.dims() != cfg.k) throw ValidationError("weight arity != configuration k");
    if (static_cast<int>(a.size()) != cfg.k)
        throw ValidationError("weight vector arity != configuration k");
    for (double ai : a)
        if (!(ai > 0)) throw ValidationError("weight vector must be positive");
    if (!(L > 0)) throw ValidationError("sample_horosphere needs L > 0");
    const CutData& cut = ConfigTable::instance().cut(cfg.key);
    check_sampler_pieces(cut);
    int k = cfg.k;
    if (k == 1) {
        std::vector<SurfaceSample> out(scfg.sample_count);
        double x1 = 1.0 / a[0];
        if (f({x1}) <= 0.0)
            throw ValidationError("weight vanishes at the simplex point 1/a1");
        parallel_for(scfg.sample_count, scfg.threads, [&](std::uint64_t i) {
            out[i] = finish_sample(cfg, cut, {L * x1}, i, scfg, "horosphere");
        });
        return out;
    }
    GradedPoly V = assemble_V(cfg);
    std::vector<double> fhi = weight_support_hi(f);
    std::vector<double> hi(k - 1);
    for (int d = 0; d < k - 1; ++d) hi[d] = std::min(1.0 / a[d], fhi[d]);
    std::vector<double> xfull(k);
    auto density = [&](const std::vector<double>& xp) {
        double rest = 1.0;
        std::vector<double> x(k);
        for (int d = 0; d < k - 1; ++d) {
            x[d] = xp[d];
            rest -= a[d] * xp[d];
        }
        if (rest <= 0.0) return 0.0;
        x[k - 1] = rest / a[k - 1];
        double fx = f(x);
        if (fx <= 0.0) return 0.0;
        std::vector<double> lx(x);
        for (double& v : lx) v *= L;
        return fx * poly_eval(V, lx);
    };
    double M = density_envelope(density, hi, false);
    CounterRng rng(scfg.seed, /*stream=*/61);
    std::vector<SurfaceSample> out(scfg.sample_count);
    parallel_for(scfg.sample_count, scfg.threads, [&](std::uint64_t i) {
        std::vector<double> xp(k - 1);
        for (std::uint64_t j = 0; j < scfg.rejection_cap; ++j) {
            std::uint64_t base_slot = j * k;
            for (int d = 0; d < k - 1; ++d) xp[d] = hi[d] * rng.u01(i, base_slot + d);
            double g = density(xp);
            if (g > M) throw NumericalInstability("horosphere rejection envelope exceeded");
            if (rng.u01(i, base_slot + k - 1) * M >= g) continue;
            std::vector<double> phys(k);
            double rest = 1.0;
            for (int d = 0; d < k - 1; ++d) {
                phys[d] = L * xp[d];
                rest -= a[d] * xp[d];
            }
            phys[k - 1] = L * rest / a[k - 1];
            out[i] = finish_sample(cfg, cut, phys, i, scfg, "horosphere");
            return;
        }
        throw RejectionCapExceeded("horosphere sampler exhausted its attempts");
    });
    return out;
}

TargetRun sample_target_mirzakhani(const FdDomain& dom, const SamplerConfig& cfg) {
    cfg.validate();
    // B(X) ~ 1 / (l log(1/l)) near the cusp, so its tau-marginal B * tmax is
    // nearly flat in l.  Draw l uniformly on [l_lo, cap] and tau inside the
    // cell; the importance weight B * tmax * (cap - l_lo) then only varies by
    // the slow log factor, keeping the effective sample size near N.  The
    // slice below l_lo carries B-mass ~ l_lo / cap relative and is dropped;
    // it is well below the Monte Carlo resolution at feasible N.
    double cap = dom.cap();
    double l_lo = cap * 2e-3;
    CounterRng rng(cfg.seed, /*stream=*/81);
    TargetRun run;
    run.box_area = 1.0; // weights are absolute: integral estimate = sum(w) / attempts
    run.samples.resize(cfg.sample_count);
    std::vector<std::uint64_t> attempts(cfg.sample_count, 0);
    parallel_for(cfg.sample_count, cfg.threads, [&](std::uint64_t i) {
        for (std::uint64_t j = 0; j < cfg.rejection_cap; ++j) {
            ++attempts[i];
            double l = l_lo + (cap - l_lo) * rng.u01(i, 2 * j);
            double tmax = cfg.fd_convention == FdConvention::full_cell ? l : l / 2.0;
            double tau = tmax * rng.u01(i, 2 * j + 1);
            FNPoint X = dom.make(l, tau);
            if (!(systole(X).slope == Slope(0, 1))) continue;
            double B = mirzakhani_B(X, 64, 1e-5);
            if (!(B > 0)) throw NumericalInstability("non-positive B weight");
            run.samples[i] = {X, B * tmax * (cap - l_lo), "mirzakhani_target", {}};
            return;
        }
        throw RejectionCapExceeded("target sampler exhausted its attempts");
    });
    for (auto a : attempts) run.attempts += a;
    return run;
}

std::pair<double, double> estimate_bgn(const FdDomain& dom, const SamplerConfig& cfg) {
    TargetRun run = sample_target_mirzakhani(dom, cfg);
    double sb = 0, sb2 = 0;
    for (const auto& s : run.samples) {
        sb += s.weight;
        sb2 += s.weight * s.weight;
    }
    double n = static_cast<double>(run.attempts);
    double mean = sb / n;
    double var = std::max(0.0, sb2 / n - mean * mean);
    return {run.box_area * mean, run.box_area * std::sqrt(var / n)};
}

std::pair<double, double> estimate_fd_volume(const FdDomain& dom, const SamplerConfig& cfg,
                                             const std::function<bool(const FNPoint&)>& keep) {
    FdRun run = sample_moduli_fd(dom, cfg);
    double kept = 0;
    for (const auto& s : run.samples)
        if (!keep || keep(s.point)) kept += 1.0;
    double n = static_cast<double>(run.attempts);
    double p = kept / n;
    return {run.box_area * p, run.box_area * std::sqrt(std::max(0.0, p * (1 - p)) / n)};
}

BallMassBracket estimate_horosphere_ball_mass(const MultiCurveConfig& cfg,
                                              const std::vector<double>& a, double L,
                                              const FNPoint& X, double eps, int grid,
                                              int depth) {
    if (cfg.k != 1) throw UnsupportedConfiguration("ball mass implemented for k = 1");
    if (a.size() != 1 || !(a[0] > 0)) throw ValidationError("need one positive weight");
    if (!(eps > 0 && eps < 0.5)) throw ValidationError("eps must lie in (0, 0.5)");
    if (!(L > 0)) throw ValidationError("level must be positive");
    if (grid < 16) throw ValidationError("grid too coarse");
    if (!X.is_s11()) throw UnsupportedConfiguration("ball mass implemented on S_{1,1}");
    double lp = L / a[0]; // FN length on the horosphere
    auto bounds_at = [&](double tau) {
        FNPoint Y = FNPoint::s11(lp, tau, X.boundary());
        return thurston_dist_bound(X, Y, depth);
    };
    std::vector<std::pair<double, double>> cache(grid);
    double h = lp / grid;
    for (int j = 0; j < grid; ++j) cache[j] = bounds_at((j + 0.5) * h);
    // measure of {tau : bound(tau) < eps} with bisection-refined boundaries
    auto measure_of = [&](bool use_upper) {
        auto inside = [&](int j) {
            return (use_upper ? cache[j].second : cache[j].first) < eps;
        };
        auto inside_tau = [&](double tau) {
            auto b = bounds_at(tau);
            return (use_upper ? b.second : b.first) < eps;
        };
        double total = 0.0;
        for (int j = 0; j < grid; ++j) {
            if (!inside(j)) continue;
            double lo = (j + 0.5) * h - 0.5 * h, hhi = (j + 0.5) * h + 0.5 * h;
            // refine the left edge if the neighbor is outside
            int prev = j - 1, next = j + 1;
            bool left_out = prev < 0 ? true : !inside(prev);
            bool right_out = next >= grid ? true : !inside(next);
            if (prev < 0) left_out = !inside_tau(1e-12);
            if (next >= grid) right_out = !inside_tau(lp - 1e-12);
            if (left_out) {
                double a0 = std::max(0.0, lo), b0 = (j + 0.5) * h;
                for (int it = 0; it < 40; ++it) {
                    double m = 0.5 * (a0 + b0);
                    (inside_tau(m) ? b0 : a0) = m;
                }
                lo = 0.5 * (a0 + b0);
            }
            if (right_out) {
                double a0 = (j + 0.5) * h, b0 = std::min(lp, hhi);
                for (int it = 0; it < 40; ++it) {
                    double m = 0.5 * (a0 + b0);
                    (inside_tau(m) ? a0 : b0) = m;
                }
                hhi = 0.5 * (a0 + b0);
            }
            total += std::max(0.0, hhi - lo);
        }
        return total;
    };
    BallMassBracket out;
    out.inner = measure_of(true) / a[0];
    out.outer = measure_of(false) / a[0];
    return out;
}

} // namespace hl
