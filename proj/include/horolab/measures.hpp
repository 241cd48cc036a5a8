#pragma once

#include <cstdint>
#include <string>
#include <vector>
#include "horolab/geometry.hpp"
#include "horolab/rng.hpp"
#include "horolab/volumes.hpp"

namespace hl {

enum class FdConvention { half_cell, full_cell };

struct SamplerConfig {
    std::uint64_t seed = 1;
    std::uint64_t sample_count = 1;
    std::uint64_t rejection_cap = 100000; // attempts per emitted sample
    FdConvention fd_convention = FdConvention::half_cell; // pinned by the
                                                          // mass-consistency oracle
    int threads = 1;

    void validate() const;
};

struct SurfaceSample {
    FNPoint point;               // gamma-adapted FN coordinates (full FN coordinates
                                 // on the geometry-supported surfaces)
    double weight = 1.0;         // importance weight
    std::string provenance;
    std::vector<FNPoint> pieces; // sampled moduli of non-pants cut pieces
};

// rejection-sampling domain for a moduli fundamental domain
struct FdDomain {
    SurfaceSig surface;   // (1,1,0), (1,0,1) or (0,4,0)
    double boundary = 0;  // boundary length for the one-holed torus

    static FdDomain s11(double boundary = 0.0);
    static FdDomain s04();

    double cap() const; // Bers-type cap on the FN length
    FNPoint make(double l, double tau) const;
};

// uniform samples in an FN coordinate box (this is the WP measure on the cell)
std::vector<FNPoint> sample_wp_cell(const FNPoint& shape,
                                    const std::vector<std::pair<double, double>>& length_ranges,
                                    const std::vector<std::pair<double, double>>& twist_ranges,
                                    const SamplerConfig& cfg);

struct FdRun {
    std::vector<SurfaceSample> samples;
    std::uint64_t attempts = 0; // total rejection attempts (box draws)
    double box_area = 0;        // Lebesgue area of the rejection box
};

// fundamental-domain representatives of WP-random moduli points: the FN curve
// is the systole and tau lies in [0, l) (full cell) or [0, l/2) (half cell)
FdRun sample_moduli_fd(const FdDomain& dom, const SamplerConfig& cfg);

// horoball sampler: bL ~ f * fiber-volume density, piece moduli WP-random,
// twists uniform in [0, l_i)
std::vector<SurfaceSample> sample_horoball(const MultiCurveConfig& cfg, const WeightFunction& f,
                                           double L, const SamplerConfig& scfg);

// horosphere sampler: bL on the simplex {a . x = 1} with density f * V * eta_a;
// emitted points satisfy sum a_i l_i = L
std::vector<SurfaceSample> sample_horosphere(const MultiCurveConfig& cfg,
                                             const std::vector<double>& a,
                                             const WeightFunction& f, double L,
                                             const SamplerConfig& scfg);

struct TargetRun {
    // weight = full importance weight of B(X) dWP against the uniform cell
    // proposal; absolute, so integral estimates use sum(w) / attempts
    std::vector<SurfaceSample> samples;
    std::uint64_t attempts = 0;
    double box_area = 1.0;
};

// importance sampling of B(X) dWP / b_{g,n}
TargetRun sample_target_mirzakhani(const FdDomain& dom, const SamplerConfig& cfg);

// Monte Carlo integral of B over the fundamental domain: (value, stderr)
std::pair<double, double> estimate_bgn(const FdDomain& dom, const SamplerConfig& cfg);

// Monte Carlo moduli volume of the fundamental domain restricted by an
// acceptance predicate on the emitted point (pass nullptr for the whole fd)
std::pair<double, double> estimate_fd_volume(const FdDomain& dom, const SamplerConfig& cfg,
                                             const std::function<bool(const FNPoint&)>& keep);

struct BallMassBracket {
    double inner = 0; // mass of {upper dist bound < eps}
    double outer = 0; // mass of {lower dist bound < eps}
    double value() const { return 0.5 * (inner + outer); }
};

// horosphere measure (contraction weight 1/a_1 in the tau coordinate) of the
// symmetric-Thurston ball of radius eps around X, bracketed via the
// lower/upper distance bounds; k = 1 on S_{1,1}
BallMassBracket estimate_horosphere_ball_mass(const MultiCurveConfig& cfg,
                                              const std::vector<double>& a, double L,
                                              const FNPoint& X, double eps,
                                              int grid = 2048, int depth = 10);

} // namespace hl
