#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>
#include "horolab/common.hpp"

namespace hl {

struct ExperimentTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Every number is either in scalars (exact or with a *_stderr sibling) or in a
// table; reports are pure functions of (params, seed) and carry no wall-time
// inside the serialized artifacts (timing goes to stderr only).
struct ExperimentReport {
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;
    std::map<std::string, double> scalars;
    std::map<std::string, bool> checks;
    std::vector<ExperimentTable> tables;

    bool passed() const;
    std::string slug() const; // {name}-{seedhash}
    // writes {slug}.json and one {slug}-{table}.csv per table; returns paths
    std::vector<std::string> write(const std::string& out_dir) const;
};

struct EquidistributionParams {
    std::string kind = "horoball"; // or "horosphere"
    std::vector<double> L_schedule{10, 30, 100};
    std::uint64_t samples = 10000;
    std::uint64_t replicates = 8; // KS averaged over independent ensembles
    double a = 1.0;           // box-weight top / simplex weight
    double ks_threshold = 0.05;
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_equidistribution(const EquidistributionParams& p);

struct CountingParams {
    std::vector<double> L_schedule{50, 100, 200, 400};
    double b1 = 1.0;
    std::uint64_t mc_samples = 20000; // for the b_{1,1} estimate
    double drift_threshold = 0.03;
    double systematic = 0.10;
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_counting(const CountingParams& p);

struct MirzakhaniBoundParams {
    std::vector<double> eps_grid{0.02, 0.035, 0.06, 0.11, 0.2};
    std::vector<double> L_grid{10, 20, 40, 80};
    double center_l = 0, center_tau = 0.3; // 0 -> modular length
    int tau_grid = 2048;
    int depth = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_mirzakhani_bound(const MirzakhaniBoundParams& p);

struct TwistRecurrenceParams {
    std::uint64_t points = 1000;
    std::vector<double> eps_grid{0.3, 0.2, 0.1}; // pilot sweep, largest first
    double delta = 0.1;
    int twist_grid = 64;
    double flow_T = 20.0;
    int flow_grid = 64;
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_twist_recurrence(const TwistRecurrenceParams& p);

struct ThinVolumeParams {
    std::vector<double> boundaries{4, 6};
    std::vector<double> eps_grid{0.08, 0.15, 0.3, 0.6};
    std::uint64_t samples = 30000;
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_thin_volume(const ThinVolumeParams& p);

struct MassConsistencyParams {
    std::vector<std::string> configs{"s11_nonsep", "s04_sep"};
    std::vector<double> L_grid{5, 10, 20};
    double a = 1.0;
    std::uint64_t attempts = 1000000; // box draws per (convention, L)
    std::uint64_t seed = 1;
    int threads = 1;
};
ExperimentReport run_mass_consistency(const MassConsistencyParams& p);

// dispatch by name with default parameters; seed/threads threaded through
ExperimentReport run_experiment(const std::string& name, std::uint64_t seed, int threads);
std::vector<std::string> experiment_names();

} // namespace hl
