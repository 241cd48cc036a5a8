#pragma once

#include <string>
#include <utility>
#include <vector>
#include "horolab/common.hpp"

namespace hl {

struct SurfaceSig {
    int g = 0; // genus
    int n = 0; // punctures
    int b = 0; // labeled boundary components

    int euler() const { return 2 - 2 * g - n - b; }
    int complexity() const { return 3 * g - 3 + n + b; }
    int dim() const { return 6 * g - 6 + 2 * n; } // base surfaces, b = 0
    bool valid() const { return g >= 0 && n >= 0 && b >= 0 && euler() < 0; }

    bool operator==(const SurfaceSig& o) const { return g == o.g && n == o.n && b == o.b; }
    std::string str() const {
        return "(" + std::to_string(g) + "," + std::to_string(n) + "," + std::to_string(b) + ")";
    }
};

struct MultiCurveConfig {
    std::string key; // entry key in the configuration table
    SurfaceSig base;
    int k = 1;
    std::vector<std::string> components;
    std::vector<Rational> weights; // the vector a, all > 0
};

struct CutData {
    std::vector<SurfaceSig> pieces;
    // boundary_map[j][i] = index of the multicurve component that piece j's
    // i-th boundary circle came from
    std::vector<std::vector<int>> boundary_map;
    int rho = 0;
    Rational sigma = 1;
    int stab_index = 1;
    std::string provenance;
};

class ConfigTable {
public:
    static const ConfigTable& instance(); // loads data/configurations.json once
    static ConfigTable load(const std::string& path);

    bool has(const std::string& key) const;
    std::vector<std::string> keys() const;
    const CutData& cut(const std::string& key) const; // cut_surface
    std::pair<Rational, int> symmetry_constants(const std::string& key) const;
    MultiCurveConfig make_config(const std::string& key,
                                 std::vector<Rational> weights = {}) const;

private:
    struct Entry {
        SurfaceSig base;
        int k;
        CutData cut;
    };
    std::vector<std::pair<std::string, Entry>> entries_;
    const Entry& find(const std::string& key) const;
};

// rho recomputed from the pieces (number of gamma-components adjacent to at
// least one (1,0,1) piece)
int recompute_rho(const CutData& cd);

} // namespace hl
