#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>
#include "horolab/topology.hpp"

namespace hl {

// Polynomial in length variables l_1..l_k with coefficients q * pi^{2m},
// q rational. Exponents are in the plain length variables; moduli-volume
// table entries only use even exponents and satisfy the grading constraint
// 2m = 6g - 6 + 2n + 2b - |alpha|.
struct GradedPoly {
    int nvars = 0;
    // exponent vector -> (m -> q), term q * pi^{2m} * l^alpha
    std::map<std::vector<int>, std::map<int, Rational>> terms;

    GradedPoly() = default;
    explicit GradedPoly(int nvars_) : nvars(nvars_) {}

    static GradedPoly constant(int nvars, const Rational& q, int m = 0);
    void add_term(std::vector<int> alpha, int m, const Rational& q);
    bool is_zero() const;
    int total_degree() const; // -1 for the zero polynomial
    GradedPoly scaled(const Rational& c) const;
    std::string str() const; // graded-lex, most significant first
};

GradedPoly poly_mul(const GradedPoly& a, const GradedPoly& b);
// reinterpret p's variables inside an nvars-variable ring: variable j of p
// becomes variable var_map[j]
GradedPoly poly_embed(const GradedPoly& p, int nvars, const std::vector<int>& var_map);
double poly_eval(const GradedPoly& p, const std::vector<double>& x);

// moduli volumes of the cut pieces, keyed by (genus, cusps, boundaries);
// polynomial variables are the boundary lengths
class VolumeTable {
  public:
    static const VolumeTable& instance();
    static VolumeTable load(const std::string& path);

    bool has(int g, int n, int b) const;
    const GradedPoly& entry(int g, int n, int b) const; // MissingTableEntry
    const std::string& provenance(int g, int n, int b) const;

  private:
    std::map<std::array<int, 3>, GradedPoly> entries_;
    std::map<std::array<int, 3>, std::string> provenance_;
};

// V(gamma, L) = sigma * 2^{-rho} / stab * prod_j V_j(boundary lengths) * l_1...l_k,
// a polynomial of total degree 6g - 6 + 2n - k in the component lengths
GradedPoly assemble_V(const MultiCurveConfig& cfg,
                      const VolumeTable& table = VolumeTable::instance());

// sum of the top-total-degree monomials
GradedPoly leading_W(const GradedPoly& v);

// Non-negative weight f on component-length vectors: an exact box indicator,
// a product of 1-D piecewise polynomials, or an opaque callable (integrated
// by adaptive quadrature over its declared support box).
struct WeightFunction {
    enum class Kind { box, piecewise, callable };

    struct Piece1D {
        std::vector<double> knots;                // ascending, size c+1 for c cells
        std::vector<std::vector<double>> coeffs;  // per cell, ascending powers
    };

    Kind kind = Kind::box;
    std::vector<double> box_hi;     // box: indicator of prod [0, hi_i]
    std::vector<Piece1D> pw;        // piecewise: product over dimensions
    std::function<double(const std::vector<double>&)> fn;
    std::vector<double> support_hi; // callable: integration box [0, hi_i]

    static WeightFunction box_indicator(std::vector<double> hi);
    static WeightFunction product_piecewise(std::vector<Piece1D> pieces);
    static WeightFunction from_callable(std::function<double(const std::vector<double>&)> f,
                                        std::vector<double> support_hi);

    int dims() const;
    double operator()(const std::vector<double>& x) const;
};

// m = int f(bL) V(gamma, L bL) L^k dbL over bL in R_+^k
double horoball_mass(const MultiCurveConfig& cfg, const WeightFunction& f, double L,
                     const VolumeTable& table = VolumeTable::instance());

// n = int_{simplex a.x = 1} f(x) V(gamma, L x) L^{k-1} d eta_a, where eta_a is
// the contraction measure (1/a_k) dx_1...dx_{k-1} on the solution simplex
double horosphere_mass(const MultiCurveConfig& cfg, const std::vector<double>& a,
                       const WeightFunction& f, double L,
                       const VolumeTable& table = VolumeTable::instance());

// same level-set mass in physical length coordinates: integral over
// {sum a_i l_i = L} of f(l) V(l) with contraction weight 1/a_k; satisfies
// mass_physical(a/L, 1, f) = L * mass_physical(a, L, f) exactly
double horosphere_mass_physical(const MultiCurveConfig& cfg, const std::vector<double>& a,
                                const WeightFunction& f, double L,
                                const VolumeTable& table = VolumeTable::instance());

// L -> infinity limits: int f W dbL, resp. the simplex integral of f W
double asymptotic_mass_limit(const MultiCurveConfig& cfg, const WeightFunction& f,
                             const VolumeTable& table = VolumeTable::instance());
double asymptotic_mass_limit(const MultiCurveConfig& cfg, const std::vector<double>& a,
                             const WeightFunction& f,
                             const VolumeTable& table = VolumeTable::instance());

} // namespace hl
