#include "horolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <json.hpp>
#include "horolab/counting.hpp"
#include "horolab/measures.hpp"
#include "horolab/stats.hpp"

namespace hl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// report plumbing

bool ExperimentReport::passed() const {
    for (const auto& [k, v] : checks)
        if (!v) return false;
    return !checks.empty();
}

static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string ExperimentReport::slug() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08llx",
                  static_cast<unsigned long long>(mix64(seed) >> 32));
    return name + "-" + buf;
}

static std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> ExperimentReport::write(const std::string& out_dir) const {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["params"] = params;
    j["scalars"] = json::object();
    for (const auto& [k, v] : scalars) j["scalars"][k] = fmt17(v);
    j["checks"] = checks;
    j["passed"] = passed();
    json jt = json::array();
    for (const auto& t : tables) {
        std::string csv = slug() + "-" + t.name + ".csv";
        jt.push_back({{"name", t.name}, {"file", csv}});
        std::ofstream out(out_dir + "/" + csv, std::ios::binary);
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << fmt17(row[c]);
            out << "\n";
        }
        paths.push_back(out_dir + "/" + csv);
    }
    j["tables"] = jt;
    std::string jpath = out_dir + "/" + slug() + ".json";
    std::ofstream out(jpath, std::ios::binary);
    out << j.dump(2) << "\n";
    paths.insert(paths.begin(), jpath);
    return paths;
}

// deterministic parallel map: per-index work, preallocated outputs
template <class Fn>
static void par_for(std::uint64_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        try {
            for (;;) {
                std::uint64_t i = next.fetch_add(16);
                if (i >= n) return;
                std::uint64_t hi = std::min(n, i + 16);
                for (; i < hi; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(mu);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// half-cell canonical representative; the tau-reflection permutes slopes
// (p,q) -> (-p,q), so folded ensembles are comparable across samplers
static FNPoint canonical_rep(const FNPoint& X) {
    FNPoint Y = moduli_reduce(X);
    if (Y.twists[0] > Y.lengths[0] / 2.0) Y.twists[0] = Y.lengths[0] - Y.twists[0];
    return Y;
}

// ---------------------------------------------------------------------------
// equidistribution

namespace {
constexpr int kStatCount = 6;
const char* kStatNames[kStatCount] = {"systole",  "len_1_0", "len_1_1",
                                      "len_2_1",  "mirz_B",  "bundle"};
} // namespace

// geometric intersection of a unit-norm lamination (u,v) with a slope
static double lam_slope_intersection(double u, double v, Slope s) {
    return std::fabs(v * static_cast<double>(s.q) - u * static_cast<double>(s.p));
}

// Quadrature discretization of the target systole distribution: on the
// fundamental domain the systole is the FN length, so the marginal is
// g(l) = int_0^{tau*(l)} B(l, tau) dtau with tau*(l) the half-cell membership
// boundary (the dual length decreases in tau, so membership is an interval).
// This removes the target-side Monte Carlo noise from the systole KS, which
// otherwise drowns the small finite-L bias of the horoball pushforward.
static std::vector<std::pair<double, double>> systole_marginal_atoms(int threads) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    double cap = fd_length_cap(0.0);
    double lo = cap * 2e-4, knee = cap * 0.1;
    const int ng = 16, nu = 80;
    std::vector<double> edges;
    for (int i = 0; i <= ng; ++i) edges.push_back(lo * std::pow(knee / lo, double(i) / ng));
    for (int i = 1; i <= nu; ++i) edges.push_back(knee + (cap - knee) * double(i) / nu);
    std::vector<std::pair<double, double>> nodes; // (l, panel weight)
    for (std::size_t p = 0; p + 1 < edges.size(); ++p)
        for (int j = 0; j < 4; ++j)
            nodes.push_back({0.5 * (edges[p] + edges[p + 1]) +
                                 0.5 * (edges[p + 1] - edges[p]) * gx[j],
                             0.5 * (edges[p + 1] - edges[p]) * gw[j]});
    std::vector<std::pair<double, double>> atoms(nodes.size());
    par_for(nodes.size(), threads, [&](std::uint64_t i) {
        double l = nodes[i].first;
        auto in_fd = [&](double tau) {
            return systole(FNPoint::s11(l, tau)).slope == Slope(0, 1);
        };
        double ts = l / 2.0;
        if (!in_fd(ts)) {
            double a = 0, b = ts;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                (in_fd(m) ? a : b) = m;
            }
            ts = a;
        }
        double g = 0;
        for (int j = 0; j < 4; ++j) {
            double tau = 0.5 * ts * (1.0 + gx[j]);
            g += 0.5 * ts * gw[j] * mirzakhani_B(FNPoint::s11(l, tau), 48, 1e-4);
        }
        atoms[i] = {l, nodes[i].second * g};
    });
    return atoms;
}

ExperimentReport run_equidistribution(const EquidistributionParams& p) {
    if (p.kind != "horoball" && p.kind != "horosphere")
        throw ValidationError("equidistribution kind must be horoball or horosphere");
    if (p.L_schedule.size() < 2) throw ValidationError("need an L-schedule");
    ExperimentReport rep;
    rep.name = "equidistribution-" + p.kind;
    rep.seed = p.seed;
    if (p.replicates < 1) throw ValidationError("need replicates >= 1");
    rep.params = {{"samples", double(p.samples)},
                  {"replicates", double(p.replicates)},
                  {"a", p.a},
                  {"ks_threshold", p.ks_threshold},
                  {"threads", double(p.threads)}};
    for (std::size_t i = 0; i < p.L_schedule.size(); ++i)
        rep.params["L" + std::to_string(i)] = p.L_schedule[i];

    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});
    auto f = WeightFunction::box_indicator({p.a});
    SamplerConfig sc;
    sc.seed = p.seed;
    sc.sample_count = p.samples;
    sc.threads = p.threads;

    // target ensemble: B(X)-weighted fundamental-domain points, bundle fiber
    // sampled from the cone measure on the unit Thurston-norm ball
    std::vector<std::pair<double, double>> marg = systole_marginal_atoms(p.threads);
    TargetRun target = sample_target_mirzakhani(FdDomain::s11(), sc);
    std::vector<std::array<double, kStatCount>> tstats(target.samples.size());
    CounterRng cone_rng(p.seed, 71);
    par_for(target.samples.size(), p.threads, [&](std::uint64_t i) {
        const SurfaceSample& s = target.samples[i];
        const FNPoint& X = s.point;
        auto& st = tstats[i];
        st[0] = X.lengths[0];
        st[1] = curve_length(X, Slope(1, 0));
        st[2] = curve_length(X, Slope(1, 1));
        st[3] = curve_length(X, Slope(2, 1));
        // cone measure on the ball boundary has theta-density r^2(theta), so
        // draw theta from the adaptive quadrature segments (a bounding-box
        // rejection would have vanishing acceptance on near-cusp slivers)
        auto segs = norm_ball_segments(X, 48, 1e-4);
        double area = 0.0;
        for (const auto& sg : segs) area += sg.mass;
        st[4] = thurston_kappa() * area; // same evaluation as the sampler side
        double pick = cone_rng.u01(i, 0) * area;
        std::size_t si = 0;
        for (; si + 1 < segs.size() && pick > segs[si].mass; ++si) pick -= segs[si].mass;
        const auto& sg = segs[si];
        double u = 0, v = 0;
        for (std::uint64_t j = 1;; ++j) {
            if (j >= 10000) throw RejectionCapExceeded("cone-measure fiber draw");
            double env = 4.0 * std::max({sg.fa, sg.fm, sg.fb});
            double th = cone_rng.uniform(i, 2 * j, sg.a, sg.b);
            double F = lamination_length(X, LaminationCoord(std::cos(th), std::sin(th)));
            double r2 = 1.0 / (F * F);
            if (r2 > env) throw NumericalInstability("cone-measure envelope exceeded");
            if (cone_rng.u01(i, 2 * j + 1) * env >= r2) continue;
            u = std::cos(th) / F;
            v = std::sin(th) / F;
            break;
        }
        st[5] = lam_slope_intersection(u, v, Slope(0, 1)); // fd systole slope
    });

    ExperimentTable tab{"ks", {"L", "stat", "ks"}, {}};
    std::vector<std::array<double, kStatCount>> ks_by_L(p.L_schedule.size());
    // The gated statistics (systole, bundle) average the N-sample KS over
    // independent replicate ensembles: near L = 100 the finite-L bias is of
    // the same order as the single-ensemble KS noise (~0.003 at N = 1e4), so
    // a single draw decides the monotonicity check by luck.  The replicates
    // reuse the target ensemble and the quadrature marginal, so they only add
    // cheap sampler-side passes.
    for (std::size_t li = 0; li < p.L_schedule.size(); ++li) {
        double L = p.L_schedule[li];
        std::array<double, kStatCount> acc{};
        std::array<int, kStatCount> cnt{};
        for (std::uint64_t r = 0; r < p.replicates; ++r) {
            SamplerConfig scl = sc;
            scl.seed = mix64(p.seed ^ (0xe9d1ULL + 977 * li + r));
            std::vector<SurfaceSample> samples =
                p.kind == "horoball" ? sample_horoball(cfg, f, L, scl)
                                     : sample_horosphere(cfg, {p.a}, f, L, scl);
            std::vector<std::array<double, kStatCount>> sstats(samples.size());
            bool full = r == 0; // diagnostic stats only on the first replicate
            par_for(samples.size(), p.threads, [&](std::uint64_t i) {
                const FNPoint& raw = samples[i].point;
                FNPoint X = canonical_rep(raw);
                auto& st = sstats[i];
                st[0] = X.lengths[0];
                if (full) {
                    st[1] = curve_length(X, Slope(1, 0));
                    st[2] = curve_length(X, Slope(1, 1));
                    st[3] = curve_length(X, Slope(2, 1));
                    st[4] = mirzakhani_B(X, 48, 1e-4);
                }
                // bundle fiber of the sampler: the sampled curve itself, norm 1
                Slope s = systole(raw).slope;
                st[5] = lam_slope_intersection(1.0 / raw.lengths[0], 0.0, s);
            });
            for (int k = 0; k < kStatCount; ++k) {
                if (!full && k != 0 && k != 5) continue;
                std::vector<std::pair<double, double>> a, b;
                a.reserve(sstats.size());
                for (const auto& st : sstats) a.push_back({st[k], 1.0});
                if (k == 0) { // systole: noise-free quadrature marginal
                    b = marg;
                } else {
                    b.reserve(tstats.size());
                    for (std::size_t i = 0; i < tstats.size(); ++i)
                        b.push_back({tstats[i][k], target.samples[i].weight});
                }
                acc[k] += ks_distance_weighted(a, b);
                ++cnt[k];
            }
        }
        for (int k = 0; k < kStatCount; ++k) {
            ks_by_L[li][k] = acc[k] / cnt[k];
            tab.rows.push_back({L, double(k), ks_by_L[li][k]});
        }
    }
    rep.tables.push_back(std::move(tab));

    std::size_t last = p.L_schedule.size() - 1;
    for (int k : {0, 5}) { // systole and bundle gate the acceptance
        std::string nm = kStatNames[k];
        rep.scalars["ks_final_" + nm] = ks_by_L[last][k];
        rep.checks["ks_final_" + nm + "_below_threshold"] =
            ks_by_L[last][k] < p.ks_threshold;
        bool dec = true;
        for (std::size_t li = 1; li < p.L_schedule.size(); ++li)
            if (!(ks_by_L[li][k] < ks_by_L[li - 1][k])) dec = false;
        rep.checks["ks_decreasing_" + nm] = dec;
    }
    for (int k = 0; k < kStatCount; ++k)
        rep.scalars[std::string("ks_final_all_") + kStatNames[k]] = ks_by_L[last][k];
    return rep;
}

// ---------------------------------------------------------------------------
// counting

ExperimentReport run_counting(const CountingParams& p) {
    if (p.L_schedule.size() < 2) throw ValidationError("need an L-schedule");
    ExperimentReport rep;
    rep.name = "counting";
    rep.seed = p.seed;
    rep.params = {{"b1", p.b1},
                  {"mc_samples", double(p.mc_samples)},
                  {"drift_threshold", p.drift_threshold},
                  {"systematic", p.systematic}};
    double lm = 2.0 * std::acosh(1.5);
    FNPoint X = FNPoint::s11(lm, 0.0);
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});

    ExperimentTable tab{"counts", {"L", "count", "normalized"}, {}};
    std::vector<double> norm;
    for (double L : p.L_schedule) {
        auto r = count_s(X, cfg, p.b1, L);
        tab.rows.push_back({L, double(r.count), r.normalized});
        norm.push_back(r.normalized);
    }
    rep.tables.push_back(std::move(tab));

    std::size_t n = norm.size();
    double drift = std::fabs(norm[n - 1] - norm[n - 2]) / norm[n - 2];
    rep.scalars["drift"] = drift;
    rep.checks["drift_below_threshold"] = drift < p.drift_threshold;

    double B = mirzakhani_B(X, 256);
    SamplerConfig sc;
    sc.seed = p.seed;
    sc.sample_count = p.mc_samples;
    sc.threads = p.threads;
    auto [b, bse] = estimate_bgn(FdDomain::s11(), sc);
    auto f = WeightFunction::box_indicator({p.b1});
    double intW = asymptotic_mass_limit(cfg, f);
    double pred = B / b * intW;
    double ratio = norm[n - 1] / pred;
    double tol = 3.0 * bse / b + p.systematic;
    rep.scalars["B"] = B;
    rep.scalars["b_est"] = b;
    rep.scalars["b_stderr"] = bse;
    rep.scalars["intW"] = intW;
    rep.scalars["prediction"] = pred;
    rep.scalars["ratio"] = ratio;
    rep.checks["ratio_within_tolerance"] = std::fabs(ratio - 1.0) < tol;

    // b1-scaling: count(b1=2, L) must equal count(b1=1, 2L) exactly
    double Ls = p.L_schedule[0];
    auto c2 = count_s(X, cfg, 2.0 * p.b1, Ls);
    auto c1 = count_s(X, cfg, p.b1, 2.0 * Ls);
    rep.checks["b1_scaling_exact"] = c2.count == c1.count;
    return rep;
}

// ---------------------------------------------------------------------------
// Mirzakhani ball-mass bound

ExperimentReport run_mirzakhani_bound(const MirzakhaniBoundParams& p) {
    if (p.eps_grid.size() < 3 || p.L_grid.size() < 3)
        throw ValidationError("need eps and L grids of size >= 3");
    ExperimentReport rep;
    rep.name = "mirzakhani-bound";
    rep.seed = p.seed;
    double lc = p.center_l > 0 ? p.center_l : 2.0 * std::acosh(1.5);
    rep.params = {{"center_l", lc},
                  {"center_tau", p.center_tau},
                  {"tau_grid", double(p.tau_grid)},
                  {"depth", double(p.depth)}};
    FNPoint X = FNPoint::s11(lc, p.center_tau);
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});

    std::size_t ne = p.eps_grid.size(), nl = p.L_grid.size();
    std::vector<BallMassBracket> mass(ne * nl);
    par_for(ne * nl, p.threads, [&](std::uint64_t idx) {
        double eps = p.eps_grid[idx % ne];
        double L = p.L_grid[idx / ne];
        mass[idx] = estimate_horosphere_ball_mass(cfg, {L / lc}, L, X, eps,
                                                  p.tau_grid, p.depth);
    });
    ExperimentTable tab{"mass", {"L", "eps", "inner", "outer", "value"}, {}};
    for (std::size_t li = 0; li < nl; ++li)
        for (std::size_t ei = 0; ei < ne; ++ei) {
            const auto& m = mass[li * ne + ei];
            tab.rows.push_back({p.L_grid[li], p.eps_grid[ei], m.inner, m.outer,
                                m.value()});
        }
    rep.tables.push_back(std::move(tab));

    double eps_slope_min = 1e300;
    bool monotone = true;
    for (std::size_t li = 0; li < nl; ++li) {
        std::vector<double> xs, ys;
        for (std::size_t ei = 0; ei < ne; ++ei) {
            double v = mass[li * ne + ei].value();
            if (!(v > 0)) throw ConvergenceFailure("zero ball mass in the eps scan");
            xs.push_back(p.eps_grid[ei]);
            ys.push_back(v);
            if (ei && !(ys[ei] >= ys[ei - 1])) monotone = false;
        }
        eps_slope_min = std::min(eps_slope_min, loglog_fit(xs, ys).slope);
    }
    double L_slope_sum = 0;
    for (std::size_t ei = 0; ei < ne; ++ei) {
        std::vector<double> xs, ys;
        for (std::size_t li = 0; li < nl; ++li) {
            xs.push_back(p.L_grid[li]);
            ys.push_back(mass[li * ne + ei].value());
        }
        L_slope_sum += loglog_fit(xs, ys).slope;
    }
    double L_slope = L_slope_sum / ne;

    double L0 = p.L_grid[0], e0 = p.eps_grid.back();
    auto m1 = estimate_horosphere_ball_mass(cfg, {L0 / lc}, L0, X, e0, p.tau_grid,
                                            p.depth);
    auto m2 = estimate_horosphere_ball_mass(cfg, {L0 / lc / L0}, 1.0, X, e0,
                                            p.tau_grid, p.depth);
    double lemma_rel = std::fabs(L0 * m1.value() - m2.value()) / m2.value();

    rep.scalars["eps_exponent"] = eps_slope_min;
    rep.scalars["L_exponent"] = L_slope;
    rep.scalars["lemma_scaling_rel_err"] = lemma_rel;
    rep.checks["eps_exponent_ge_0.85"] = eps_slope_min >= 0.85;
    rep.checks["L_exponent_in_band"] = L_slope > -1.2 && L_slope < -0.8;
    rep.checks["lemma_scaling_1e-6"] = lemma_rel < 1e-6;
    rep.checks["mass_monotone_in_eps"] = monotone;
    return rep;
}

// ---------------------------------------------------------------------------
// twist recurrence

ExperimentReport run_twist_recurrence(const TwistRecurrenceParams& p) {
    ExperimentReport rep;
    rep.name = "twist-recurrence";
    rep.seed = p.seed;
    rep.params = {{"points", double(p.points)},
                  {"delta", p.delta},
                  {"twist_grid", double(p.twist_grid)},
                  {"flow_T", p.flow_T},
                  {"flow_grid", double(p.flow_grid)}};
    auto cfg = ConfigTable::instance().make_config("s11_nonsep", {});
    SamplerConfig sc;
    sc.seed = p.seed;
    sc.sample_count = p.points;
    sc.threads = p.threads;
    FdRun run = sample_moduli_fd(FdDomain::s11(), sc);

    ExperimentTable tab{"failure", {"eps", "thick_points", "thin_points",
                                    "max_twist_failure", "max_flow_failure",
                                    "thin_persist_ok"}, {}};
    std::vector<double> prev_max(1, 1e300);
    double eps_star = -1, star_twist = -1, star_flow = -1;
    bool monotone = true, thin_all_ok = true;
    std::vector<Slope> gamma{Slope(0, 1)};
    for (double eps : p.eps_grid) {
        std::vector<double> twist_frac(p.points, 0.0), flow_frac(p.points, 0.0);
        std::vector<int> kindv(p.points, 0); // 1 thick, 2 thin-ok, 3 thin-violated
        par_for(p.points, p.threads, [&](std::uint64_t i) {
            const FNPoint& X = run.samples[i].point;
            double l = X.lengths[0];
            if (l < eps) {
                // condition (2): the thin FN curve persists for every twist
                bool ok = true;
                for (int g = 0; g < p.twist_grid; ++g) {
                    FNPoint Y = twist(X, 0, l * g / p.twist_grid);
                    if (!(systole(Y).length < eps)) ok = false;
                }
                kindv[i] = ok ? 2 : 3;
                return;
            }
            kindv[i] = 1;
            int bad = 0;
            for (int g = 0; g < p.twist_grid; ++g) {
                FNPoint Y = twist(X, 0, l * g / p.twist_grid);
                if (!in_thick_part(Y, eps)) ++bad;
            }
            twist_frac[i] = double(bad) / p.twist_grid;
            bad = 0;
            for (int g = 0; g < p.flow_grid; ++g) {
                FNPoint Y = earthquake_unit(X, cfg, gamma, p.flow_T * g / p.flow_grid);
                if (!in_thick_part(Y, eps)) ++bad;
            }
            flow_frac[i] = double(bad) / p.flow_grid;
        });
        double mx_t = 0, mx_f = 0;
        std::uint64_t thick = 0, thin = 0;
        bool persist = true;
        for (std::uint64_t i = 0; i < p.points; ++i) {
            if (kindv[i] == 1) {
                ++thick;
                mx_t = std::max(mx_t, twist_frac[i]);
                mx_f = std::max(mx_f, flow_frac[i]);
            } else {
                ++thin;
                if (kindv[i] == 3) persist = false;
            }
        }
        if (!persist) thin_all_ok = false;
        if (mx_t > prev_max.back() + 1e-12) monotone = false;
        prev_max.push_back(mx_t);
        if (eps_star < 0 && mx_t < p.delta && mx_f < p.delta) {
            eps_star = eps;
            star_twist = mx_t;
            star_flow = mx_f;
        }
        tab.rows.push_back({eps, double(thick), double(thin), mx_t, mx_f,
                            persist ? 1.0 : 0.0});
    }
    rep.tables.push_back(std::move(tab));
    rep.scalars["eps_star"] = eps_star;
    rep.scalars["max_twist_failure_at_eps_star"] = star_twist;
    rep.scalars["max_flow_failure_at_eps_star"] = star_flow;
    rep.checks["pilot_eps_exists"] = eps_star > 0;
    rep.checks["failure_below_delta"] = eps_star > 0 && star_twist < p.delta;
    rep.checks["failure_monotone_in_eps"] = monotone;
    rep.checks["thin_curve_persists"] = thin_all_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// thin-part volume scaling

ExperimentReport run_thin_volume(const ThinVolumeParams& p) {
    if (p.eps_grid.size() < 3) throw ValidationError("need an eps grid of size >= 3");
    ExperimentReport rep;
    rep.name = "thin-volume";
    rep.seed = p.seed;
    rep.params = {{"samples", double(p.samples)}};
    ExperimentTable tab{"volumes", {"boundary", "eps", "kept", "volume", "stderr"}, {}};
    bool in_band = true, monotone = true;
    for (std::size_t bi = 0; bi < p.boundaries.size(); ++bi) {
        double b = p.boundaries[bi];
        SamplerConfig sc;
        sc.seed = mix64(p.seed ^ (0x7f3aULL + bi));
        sc.sample_count = p.samples;
        sc.threads = p.threads;
        FdRun run = sample_moduli_fd(FdDomain::s11(b), sc);
        std::vector<double> xs, ys;
        double prev = -1;
        for (double eps : p.eps_grid) {
            std::uint64_t kept = 0;
            for (const auto& s : run.samples)
                if (s.point.lengths[0] < eps) ++kept;
            double q = double(kept) / double(run.attempts);
            double vol = run.box_area * q;
            double se = run.box_area * std::sqrt(q * (1 - q) / double(run.attempts));
            tab.rows.push_back({b, eps, double(kept), vol, se});
            if (!(vol > 0))
                throw ConvergenceFailure("no thin-part hits; enlarge samples or eps");
            if (vol < prev) monotone = false;
            prev = vol;
            xs.push_back(eps);
            ys.push_back(vol);
        }
        double slope = loglog_fit(xs, ys).slope;
        rep.scalars["eps_exponent_b" + std::to_string(int(b))] = slope;
        if (!(slope > 1.7 && slope < 2.3)) in_band = false;
    }
    rep.tables.push_back(std::move(tab));
    rep.checks["eps_exponent_in_band"] = in_band;
    rep.checks["volume_monotone_in_eps"] = monotone;
    return rep;
}

// ---------------------------------------------------------------------------
// mass-consistency oracle

// pushforward mass of the level-L horoball via fundamental-domain draws with
// curve multiplicity; chunked partial sums keep the reduction deterministic
static std::pair<double, double> mc_pushforward_mass(const FdDomain& dom, bool full_cell,
                                                     double aL, std::uint64_t attempts,
                                                     std::uint64_t seed, int threads) {
    double cap = dom.cap();
    double tau_hi = full_cell ? cap : cap / 2.0;
    double box = cap * tau_hi;
    CounterRng rng(seed, 91);
    std::uint64_t chunks = (attempts + 4095) / 4096;
    std::vector<double> s1(chunks, 0.0), s2(chunks, 0.0);
    par_for(chunks, threads, [&](std::uint64_t c) {
        double a1 = 0, a2 = 0;
        std::uint64_t lo = c * 4096, hi = std::min(attempts, lo + 4096);
        for (std::uint64_t i = lo; i < hi; ++i) {
            double l = cap * (1.0 - rng.u01(i, 0));
            double tau = tau_hi * rng.u01(i, 1);
            if (tau >= (full_cell ? l : l / 2.0)) continue;
            FNPoint X = dom.make(l, tau);
            if (!(systole(X).slope == Slope(0, 1))) continue;
            double w = double(enumerate_simple_curves(X, aL).size());
            a1 += w;
            a2 += w * w;
        }
        s1[c] = a1;
        s2[c] = a2;
    });
    double t1 = 0, t2 = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        t1 += s1[c];
        t2 += s2[c];
    }
    double n = double(attempts);
    double mean = t1 / n, var = std::max(0.0, t2 / n - mean * mean);
    return {box * mean, box * std::sqrt(var / n)};
}

ExperimentReport run_mass_consistency(const MassConsistencyParams& p) {
    ExperimentReport rep;
    rep.name = "mass-consistency";
    rep.seed = p.seed;
    rep.params = {{"a", p.a}, {"attempts", double(p.attempts)}};
    // the grids omit c = 1: (c, full_cell) and (c/2, half_cell) are related by
    // the exact factor-2 cover identity, so admitting both gauge partners would
    // always yield two consistent tuples
    const std::vector<double> c_grid{0.25, 0.5, 2.0};
    auto f = WeightFunction::box_indicator({p.a});
    ExperimentTable tab{"mass", {"config", "full_cell", "L", "mc_mass", "mc_stderr",
                                 "closed_form_unit"}, {}};
    bool all_unique = true, all_match_frozen = true, exponents_ok = true;
    int cfg_index = 0;
    for (const auto& key : p.configs) {
        auto cfg = ConfigTable::instance().make_config(key, {});
        const CutData& cut = ConfigTable::instance().cut(key);
        double c_frozen = rational_to_double(cut.sigma) /
                          double(1ULL << cut.rho) / double(cut.stab_index);
        FdDomain dom = cfg.base.g == 0 ? FdDomain::s04() : FdDomain::s11();
        std::vector<double> m_unit(p.L_grid.size());
        for (std::size_t li = 0; li < p.L_grid.size(); ++li)
            m_unit[li] = horoball_mass(cfg, f, p.L_grid[li]) / c_frozen;

        std::vector<std::vector<std::pair<double, double>>> mc(2);
        for (int conv = 0; conv < 2; ++conv) {
            bool full = conv == 1;
            for (std::size_t li = 0; li < p.L_grid.size(); ++li) {
                auto [m, se] = mc_pushforward_mass(
                    dom, full, p.a * p.L_grid[li], p.attempts,
                    mix64(p.seed ^ (cfg_index * 16 + conv * 8 + li)), p.threads);
                mc[conv].push_back({m, se});
                tab.rows.push_back({double(cfg_index), double(full), p.L_grid[li],
                                    m, se, m_unit[li]});
            }
        }
        int matches = 0;
        double matched_c = 0;
        bool matched_full = false;
        for (int conv = 0; conv < 2; ++conv)
            for (double c : c_grid) {
                bool ok = true;
                for (std::size_t li = 0; li < p.L_grid.size(); ++li) {
                    auto [m, se] = mc[conv][li];
                    if (std::fabs(m - c * m_unit[li]) > 3.0 * se) ok = false;
                }
                if (ok) {
                    ++matches;
                    matched_c = c;
                    matched_full = conv == 1;
                }
            }
        if (matches == 0)
            throw NoConsistentConvention(key + ": no (convention, prefactor) tuple " +
                                         "within 3 sigma at the configured N");
        if (matches != 1) all_unique = false;
        if (!(matched_c == c_frozen && !matched_full)) all_match_frozen = false;
        rep.scalars["matched_c_" + key] = matched_c;
        rep.scalars["matched_full_cell_" + key] = matched_full ? 1.0 : 0.0;

        std::vector<double> xs(p.L_grid), ys;
        for (const auto& [m, se] : mc[0]) ys.push_back(m);
        double slope = loglog_fit(xs, ys).slope;
        rep.scalars["L_exponent_" + key] = slope;
        if (std::fabs(slope - 2.0) > 0.1) exponents_ok = false;
        ++cfg_index;
    }
    rep.tables.push_back(std::move(tab));
    rep.checks["unique_tuple_per_config"] = all_unique;
    rep.checks["matched_tuple_is_frozen"] = all_match_frozen;
    rep.checks["L_exponent_2_pm_0.1"] = exponents_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// dispatch

std::vector<std::string> experiment_names() {
    return {"equidistribution-horoball", "equidistribution-horosphere", "counting",
            "mirzakhani-bound", "twist-recurrence", "thin-volume",
            "mass-consistency"};
}

ExperimentReport run_experiment(const std::string& name, std::uint64_t seed,
                                int threads) {
    if (name == "equidistribution-horoball" || name == "equidistribution-horosphere") {
        EquidistributionParams p;
        p.kind = name.substr(std::string("equidistribution-").size());
        p.seed = seed;
        p.threads = threads;
        return run_equidistribution(p);
    }
    if (name == "counting") {
        CountingParams p;
        p.seed = seed;
        p.threads = threads;
        return run_counting(p);
    }
    if (name == "mirzakhani-bound") {
        MirzakhaniBoundParams p;
        p.seed = seed;
        p.threads = threads;
        return run_mirzakhani_bound(p);
    }
    if (name == "twist-recurrence") {
        TwistRecurrenceParams p;
        p.seed = seed;
        p.threads = threads;
        return run_twist_recurrence(p);
    }
    if (name == "thin-volume") {
        ThinVolumeParams p;
        p.seed = seed;
        p.threads = threads;
        return run_thin_volume(p);
    }
    if (name == "mass-consistency") {
        MassConsistencyParams p;
        p.seed = seed;
        p.threads = threads;
        return run_mass_consistency(p);
    }
    throw ValidationError("unknown experiment: " + name);
}

} // namespace hl
