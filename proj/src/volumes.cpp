#include "horolab/volumes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <json.hpp>

namespace hl {

GradedPoly GradedPoly::constant(int nvars, const Rational& q, int m) {
    GradedPoly p(nvars);
    if (q != 0) p.terms[std::vector<int>(nvars, 0)][m] = q;
    return p;
}

void GradedPoly::add_term(std::vector<int> alpha, int m, const Rational& q) {
    if (static_cast<int>(alpha.size()) != nvars)
        throw ValidationError("GradedPoly term arity mismatch");
    for (int e : alpha)
        if (e < 0) throw ValidationError("negative exponent");
    auto& slot = terms[std::move(alpha)][m];
    slot += q;
    // drop cancelled coefficients to keep degree/pretty-printing honest
    if (slot == 0) {
        // find the entry again (alpha was moved; re-walk)
        for (auto it = terms.begin(); it != terms.end(); ++it) {
            for (auto jt = it->second.begin(); jt != it->second.end();) {
                if (jt->second == 0)
                    jt = it->second.erase(jt);
                else
                    ++jt;
            }
        }
        for (auto it = terms.begin(); it != terms.end();) {
            if (it->second.empty())
                it = terms.erase(it);
            else
                ++it;
        }
    }
}

bool GradedPoly::is_zero() const { return terms.empty(); }

int GradedPoly::total_degree() const {
    int deg = -1;
    for (const auto& [alpha, _] : terms)
        deg = std::max(deg, std::accumulate(alpha.begin(), alpha.end(), 0));
    return deg;
}

GradedPoly GradedPoly::scaled(const Rational& c) const {
    GradedPoly r(nvars);
    if (c == 0) return r;
    for (const auto& [alpha, ms] : terms)
        for (const auto& [m, q] : ms) r.terms[alpha][m] = q * c;
    return r;
}

std::string GradedPoly::str() const {
    if (terms.empty()) return "0";
    // graded lex: higher total degree first, then lexicographically larger
    // exponent vector first
    std::vector<std::pair<std::vector<int>, const std::map<int, Rational>*>> order;
    for (const auto& [alpha, ms] : terms) order.emplace_back(alpha, &ms);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        int da = std::accumulate(a.first.begin(), a.first.end(), 0);
        int db = std::accumulate(b.first.begin(), b.first.end(), 0);
        if (da != db) return da > db;
        return a.first > b.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [alpha, ms] : order) {
        for (auto it = ms->rbegin(); it != ms->rend(); ++it) {
            const auto& [m, q] = *it;
            if (!first) os << (q < 0 ? " - " : " + ");
            else if (q < 0)
                os << "-";
            first = false;
            Rational aq = q < 0 ? Rational(-q) : q;
            bool any_factor =
                m != 0 || std::accumulate(alpha.begin(), alpha.end(), 0) != 0;
            if (aq != 1 || !any_factor) os << aq;
            bool star = aq != 1 && any_factor;
            if (m != 0) {
                if (star) os << "*";
                os << "pi^" << 2 * m;
                star = true;
            }
            for (int i = 0; i < nvars; ++i) {
                if (alpha[i] == 0) continue;
                if (star) os << "*";
                os << "l" << (i + 1);
                if (alpha[i] > 1) os << "^" << alpha[i];
                star = true;
            }
        }
    }
    return os.str();
}

GradedPoly poly_mul(const GradedPoly& a, const GradedPoly& b) {
    if (a.nvars != b.nvars) throw ValidationError("poly_mul arity mismatch");
    GradedPoly r(a.nvars);
    for (const auto& [aa, ams] : a.terms)
        for (const auto& [ba, bms] : b.terms) {
            std::vector<int> alpha(a.nvars);
            for (int i = 0; i < a.nvars; ++i) alpha[i] = aa[i] + ba[i];
            for (const auto& [am, aq] : ams)
                for (const auto& [bm, bq] : bms) {
                    auto& slot = r.terms[alpha][am + bm];
                    slot += aq * bq;
                    if (slot == 0) r.terms[alpha].erase(am + bm);
                }
            if (r.terms.count(alpha) && r.terms[alpha].empty()) r.terms.erase(alpha);
        }
    return r;
}

GradedPoly poly_embed(const GradedPoly& p, int nvars, const std::vector<int>& var_map) {
    if (static_cast<int>(var_map.size()) != p.nvars)
        throw ValidationError("poly_embed map arity mismatch");
    for (int v : var_map)
        if (v < 0 || v >= nvars) throw ValidationError("poly_embed target out of range");
    GradedPoly r(nvars);
    for (const auto& [alpha, ms] : p.terms) {
        std::vector<int> beta(nvars, 0);
        for (int j = 0; j < p.nvars; ++j) beta[var_map[j]] += alpha[j];
        for (const auto& [m, q] : ms) {
            auto& slot = r.terms[beta][m];
            slot += q;
            if (slot == 0) r.terms[beta].erase(m);
        }
        if (r.terms.count(beta) && r.terms[beta].empty()) r.terms.erase(beta);
    }
    return r;
}

double poly_eval(const GradedPoly& p, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != p.nvars)
        throw ValidationError("poly_eval point arity mismatch");
    double acc = 0.0;
    for (const auto& [alpha, ms] : p.terms) {
        double mono = 1.0;
        for (int i = 0; i < p.nvars; ++i)
            if (alpha[i] != 0) mono *= std::pow(x[i], alpha[i]);
        double coeff = 0.0;
        for (const auto& [m, q] : ms)
            coeff += rational_to_double(q) * std::pow(PI * PI, m);
        acc += coeff * mono;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// volume table

static std::array<int, 3> sig_key(int g, int n, int b) { return {g, n, b}; }

const VolumeTable& VolumeTable::instance() {
    static VolumeTable t = load(std::string(HOROLAB_DATA_DIR) + "/volume_table.json");
    return t;
}

VolumeTable VolumeTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open volume table: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("volume table parse error: ") + e.what());
    }
    VolumeTable t;
    for (const auto& e : j.at("entries")) {
        int g = e.at("g").get<int>();
        int n = e.at("n").get<int>();
        int b = e.at("b").get<int>();
        if (g < 0 || n < 0 || b < 0) throw ValidationError("negative signature");
        GradedPoly p(b);
        for (const auto& tm : e.at("terms")) {
            std::vector<int> alpha = tm.at("alpha").get<std::vector<int>>();
            int m = tm.at("m").get<int>();
            Rational q(tm.at("q").get<std::string>());
            if (q <= 0) throw ValidationError("volume table coefficient must be positive");
            int asum = std::accumulate(alpha.begin(), alpha.end(), 0);
            for (int a : alpha)
                if (a % 2 != 0) throw ValidationError("volume table exponents must be even");
            if (2 * m != 6 * g - 6 + 2 * n + 2 * b - asum)
                throw ValidationError("volume table pi-grading violated");
            p.add_term(std::move(alpha), m, q);
        }
        if (g == 0 && n + b == 3) {
            if (p.terms.size() != 1 || p.total_degree() != 0 ||
                p.terms.begin()->second != std::map<int, Rational>{{0, Rational(1)}})
                throw ValidationError("pants volume must be the constant 1");
        }
        t.entries_[sig_key(g, n, b)] = std::move(p);
        t.provenance_[sig_key(g, n, b)] = e.value("provenance", "");
    }
    return t;
}

bool VolumeTable::has(int g, int n, int b) const { return entries_.count(sig_key(g, n, b)) > 0; }

const GradedPoly& VolumeTable::entry(int g, int n, int b) const {
    auto it = entries_.find(sig_key(g, n, b));
    if (it == entries_.end()) {
        std::ostringstream os;
        os << "no volume table entry for (" << g << "," << n << "," << b << ")";
        throw MissingTableEntry(os.str());
    }
    return it->second;
}

const std::string& VolumeTable::provenance(int g, int n, int b) const {
    auto it = provenance_.find(sig_key(g, n, b));
    if (it == provenance_.end()) throw MissingTableEntry("no provenance entry");
    return it->second;
}

// ---------------------------------------------------------------------------
// assembly

GradedPoly assemble_V(const MultiCurveConfig& cfg, const VolumeTable& table) {
    const CutData& cut = ConfigTable::instance().cut(cfg.key);
    int k = cfg.k;
    Rational pref = cut.sigma / Rational(1LL << cut.rho) / cut.stab_index;
    GradedPoly acc = GradedPoly::constant(k, pref);
    for (std::size_t jp = 0; jp < cut.pieces.size(); ++jp) {
        const SurfaceSig& pc = cut.pieces[jp];
        const GradedPoly& vp = table.entry(pc.g, pc.n, pc.b);
        std::vector<int> var_map(cut.boundary_map[jp].begin(), cut.boundary_map[jp].end());
        acc = poly_mul(acc, poly_embed(vp, k, var_map));
    }
    // times l_1 ... l_k
    GradedPoly lin = GradedPoly::constant(k, Rational(1));
    {
        GradedPoly shifted(k);
        for (const auto& [alpha, ms] : acc.terms) {
            std::vector<int> beta = alpha;
            for (int i = 0; i < k; ++i) beta[i] += 1;
            shifted.terms[beta] = ms;
        }
        acc = std::move(shifted);
    }
    int want = 6 * cfg.base.g - 6 + 2 * cfg.base.n - k;
    if (acc.total_degree() != want)
        throw ValidationError("assembled volume degree mismatch for " + cfg.key);
    return acc;
}

GradedPoly leading_W(const GradedPoly& v) {
    GradedPoly r(v.nvars);
    int top = v.total_degree();
    for (const auto& [alpha, ms] : v.terms)
        if (std::accumulate(alpha.begin(), alpha.end(), 0) == top) r.terms[alpha] = ms;
    return r;
}

// ---------------------------------------------------------------------------
// weight functions

WeightFunction WeightFunction::box_indicator(std::vector<double> hi) {
    for (double h : hi)
        if (!(h > 0)) throw ValidationError("box indicator needs positive bounds");
    WeightFunction f;
    f.kind = Kind::box;
    f.box_hi = std::move(hi);
    return f;
}

WeightFunction WeightFunction::product_piecewise(std::vector<Piece1D> pieces) {
    for (const auto& p : pieces) {
        if (p.knots.size() < 2 || p.coeffs.size() + 1 != p.knots.size())
            throw ValidationError("piecewise weight: knots/cells mismatch");
        if (!(p.knots.front() >= 0)) throw ValidationError("piecewise weight on [0, inf)");
        for (std::size_t i = 1; i < p.knots.size(); ++i)
            if (!(p.knots[i] > p.knots[i - 1]))
                throw ValidationError("piecewise weight knots must ascend");
    }
    WeightFunction f;
    f.kind = Kind::piecewise;
    f.pw = std::move(pieces);
    return f;
}

WeightFunction WeightFunction::from_callable(
    std::function<double(const std::vector<double>&)> fcn, std::vector<double> support_hi) {
    for (double h : support_hi)
        if (!(h > 0)) throw ValidationError("callable weight needs a positive support box");
    WeightFunction f;
    f.kind = Kind::callable;
    f.fn = std::move(fcn);
    f.support_hi = std::move(support_hi);
    return f;
}

int WeightFunction::dims() const {
    switch (kind) {
        case Kind::box: return static_cast<int>(box_hi.size());
        case Kind::piecewise: return static_cast<int>(pw.size());
        case Kind::callable: return static_cast<int>(support_hi.size());
    }
    return 0;
}

static double eval_cell_poly(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
    return v;
}

double WeightFunction::operator()(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dims())
        throw ValidationError("weight evaluation arity mismatch");
    switch (kind) {
        case Kind::box:
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] < 0.0 || x[i] > box_hi[i]) return 0.0;
            return 1.0;
        case Kind::piecewise: {
            double v = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const Piece1D& p = pw[i];
                if (x[i] < p.knots.front() || x[i] >= p.knots.back()) return 0.0;
                auto it = std::upper_bound(p.knots.begin(), p.knots.end(), x[i]);
                std::size_t cell = static_cast<std::size_t>(it - p.knots.begin()) - 1;
                v *= eval_cell_poly(p.coeffs[cell], x[i]);
            }
            return v;
        }
        case Kind::callable:
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] < 0.0 || x[i] > support_hi[i]) return 0.0;
            return fn(x);
    }
    return 0.0;
}

// exact int_0^inf f_d(x) x^e dx for the separable weight kinds
static double weight_moment_1d(const WeightFunction& f, int dim, int e) {
    if (f.kind == WeightFunction::Kind::box) {
        double h = f.box_hi[dim];
        return std::pow(h, e + 1) / (e + 1);
    }
    const WeightFunction::Piece1D& p = f.pw[dim];
    double acc = 0.0;
    for (std::size_t c = 0; c < p.coeffs.size(); ++c) {
        double x0 = p.knots[c], x1 = p.knots[c + 1];
        for (std::size_t j = 0; j < p.coeffs[c].size(); ++j) {
            int d = static_cast<int>(j) + e + 1;
            acc += p.coeffs[c][j] * (std::pow(x1, d) - std::pow(x0, d)) / d;
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// quadrature

namespace {

struct Quad {
    const std::function<double(double)>& g;
    double rel_tol;
    int evals = 0;

    double simpson(double a, double b, double fa, double fm, double fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }
    double run(double a, double b) {
        double m = 0.5 * (a + b);
        double fa = g(a), fm = g(m), fb = g(b);
        evals += 3;
        return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 0);
    }
    double rec(double a, double b, double fa, double fm, double fb, double whole, int depth) {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = g(lm), frm = g(rm);
        evals += 2;
        double left = simpson(a, m, fa, flm, fm);
        double right = simpson(m, b, fm, frm, fb);
        double err = left + right - whole;
        double scale = std::max(1e-300, std::fabs(left + right));
        if (std::fabs(err) <= 15.0 * rel_tol * scale || std::fabs(b - a) < 1e-14)
            return left + right + err / 15.0;
        if (depth >= 48) throw QuadratureFailure("adaptive quadrature depth exhausted");
        return rec(a, m, fa, flm, fm, left, depth + 1) +
               rec(m, b, fm, frm, fb, right, depth + 1);
    }
};

double integrate_1d(const std::function<double(double)>& g, double a, double b,
                    double rel_tol = 1e-9) {
    if (!(b > a)) return 0.0;
    Quad q{g, rel_tol};
    return q.run(a, b);
}

// nested adaptive integration of fn over prod_i [0, hi[i]]
double integrate_nd(const std::vector<double>& hi,
                    const std::function<double(const std::vector<double>&)>& fn,
                    double rel_tol = 1e-9) {
    std::vector<double> x(hi.size(), 0.0);
    std::function<double(std::size_t)> level = [&](std::size_t d) -> double {
        if (d == hi.size()) return fn(x);
        return integrate_1d(
            [&](double v) {
                x[d] = v;
                return level(d + 1);
            },
            0.0, hi[d], rel_tol);
    };
    return level(0);
}

} // namespace

// ---------------------------------------------------------------------------
// masses

static void check_arity(const MultiCurveConfig& cfg, const WeightFunction& f) {
    if (f.dims() != cfg.k) throw ValidationError("weight arity != configuration k");
}

double horoball_mass(const MultiCurveConfig& cfg, const WeightFunction& f, double L,
                     const VolumeTable& table) {
    check_arity(cfg, f);
    if (!(L > 0)) throw ValidationError("horoball_mass needs L > 0");
    GradedPoly V = assemble_V(cfg, table);
    int k = cfg.k;
    if (f.kind != WeightFunction::Kind::callable) {
        // exact: m = sum_terms q pi^{2m} L^{|alpha|+k} prod_d moment_d(alpha_d)
        double acc = 0.0;
        for (const auto& [alpha, ms] : V.terms) {
            int asum = std::accumulate(alpha.begin(), alpha.end(), 0);
            double coeff = 0.0;
            for (const auto& [m, q] : ms)
                coeff += rational_to_double(q) * std::pow(PI * PI, m);
            double mom = 1.0;
            for (int d = 0; d < k; ++d) mom *= weight_moment_1d(f, d, alpha[d]);
            acc += coeff * std::pow(L, asum + k) * mom;
        }
        return acc;
    }
    double Lk = std::pow(L, k);
    return integrate_nd(f.support_hi, [&](const std::vector<double>& x) {
        double fx = f.fn(x);
        if (fx == 0.0) return 0.0;
        std::vector<double> lx(x);
        for (double& v : lx) v *= L;
        return fx * poly_eval(V, lx) * Lk;
    });
}

// horosphere mass in normalized coordinates x on {a . x = 1}; `physical`
// switches both the constraint level and f's argument to actual lengths
static double level_set_mass(const MultiCurveConfig& cfg, const std::vector<double>& a,
                             const WeightFunction& f, double L, bool physical,
                             const GradedPoly& V) {
    check_arity(cfg, f);
    if (static_cast<int>(a.size()) != cfg.k)
        throw ValidationError("weight vector arity != configuration k");
    for (double ai : a)
        if (!(ai > 0)) throw ValidationError("weight vector must be positive");
    if (!(L > 0)) throw ValidationError("level must be positive");
    int k = cfg.k;
    double level = physical ? L : 1.0;  // a . x = level
    double Lpow = physical ? 1.0 : std::pow(L, k - 1);
    auto integrand_point = [&](const std::vector<double>& x) {
        double fx = f(x);
        if (fx == 0.0) return 0.0;
        std::vector<double> lx(x);
        if (!physical)
            for (double& v : lx) v *= L;
        return fx * poly_eval(V, lx) * Lpow;
    };
    if (k == 1) return integrand_point({level / a[0]}) / a[0];
    // contraction along the last axis: (1/a_k) dx_1 ... dx_{k-1} over the
    // projected region {x' >= 0 : a' . x' <= level}
    std::vector<double> hi(k - 1);
    for (int i = 0; i < k - 1; ++i) hi[i] = level / a[i];
    std::vector<double> x(k, 0.0);
    auto fn = [&](const std::vector<double>& xp) {
        double rest = level;
        for (int i = 0; i < k - 1; ++i) {
            x[i] = xp[i];
            rest -= a[i] * xp[i];
        }
        if (rest < 0.0) return 0.0;
        x[k - 1] = rest / a[k - 1];
        return integrand_point(x) / a[k - 1];
    };
    return integrate_nd(hi, fn);
}

double horosphere_mass(const MultiCurveConfig& cfg, const std::vector<double>& a,
                       const WeightFunction& f, double L, const VolumeTable& table) {
    GradedPoly V = assemble_V(cfg, table);
    return level_set_mass(cfg, a, f, L, false, V);
}

double horosphere_mass_physical(const MultiCurveConfig& cfg, const std::vector<double>& a,
                                const WeightFunction& f, double L, const VolumeTable& table) {
    GradedPoly V = assemble_V(cfg, table);
    return level_set_mass(cfg, a, f, L, true, V);
}

double asymptotic_mass_limit(const MultiCurveConfig& cfg, const WeightFunction& f,
                             const VolumeTable& table) {
    check_arity(cfg, f);
    GradedPoly W = leading_W(assemble_V(cfg, table));
    int k = cfg.k;
    if (f.kind != WeightFunction::Kind::callable) {
        double acc = 0.0;
        for (const auto& [alpha, ms] : W.terms) {
            double coeff = 0.0;
            for (const auto& [m, q] : ms)
                coeff += rational_to_double(q) * std::pow(PI * PI, m);
            double mom = 1.0;
            for (int d = 0; d < k; ++d) mom *= weight_moment_1d(f, d, alpha[d]);
            acc += coeff * mom;
        }
        return acc;
    }
    return integrate_nd(f.support_hi, [&](const std::vector<double>& x) {
        double fx = f.fn(x);
        return fx == 0.0 ? 0.0 : fx * poly_eval(W, x);
    });
}

double asymptotic_mass_limit(const MultiCurveConfig& cfg, const std::vector<double>& a,
                             const WeightFunction& f, const VolumeTable& table) {
    GradedPoly W = leading_W(assemble_V(cfg, table));
    return level_set_mass(cfg, a, f, 1.0, true, W);
}

} // namespace hl
