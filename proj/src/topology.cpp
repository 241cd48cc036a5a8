#include "horolab/topology.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

namespace hl {

using nlohmann::json;

static SurfaceSig sig_from_json(const json& j) {
    SurfaceSig s;
    s.g = j.at("g").get<int>();
    s.n = j.at("n").get<int>();
    s.b = j.at("b").get<int>();
    return s;
}

int recompute_rho(const CutData& cd) {
    // a gamma-component counts (once) if it is adjacent to any (1,0,1) piece
    std::vector<int> touched;
    for (std::size_t j = 0; j < cd.pieces.size(); ++j) {
        const SurfaceSig& p = cd.pieces[j];
        if (p.g == 1 && p.n == 0 && p.b == 1) {
            for (int comp : cd.boundary_map[j]) touched.push_back(comp);
        }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    return static_cast<int>(touched.size());
}

ConfigTable ConfigTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open configuration table: " + path);
    json doc = json::parse(in);

    ConfigTable table;
    for (const auto& e : doc.at("entries")) {
        Entry ent;
        ent.base = sig_from_json(e.at("base"));
        ent.k = e.at("k").get<int>();
        CutData cd;
        for (const auto& p : e.at("pieces")) cd.pieces.push_back(sig_from_json(p));
        for (const auto& bm : e.at("boundary_map"))
            cd.boundary_map.push_back(bm.get<std::vector<int>>());
        cd.rho = e.at("rho").get<int>();
        cd.sigma = Rational(e.at("sigma").get<std::string>());
        cd.stab_index = e.at("stab_index").get<int>();
        cd.provenance = e.at("provenance").get<std::string>();

        // structural invariants of the cut
        if (!ent.base.valid()) throw ValidationError("invalid base signature");
        int chi = 0;
        for (const auto& p : cd.pieces) chi += p.euler();
        if (chi != 2 - 2 * ent.base.g - ent.base.n)
            throw ValidationError("Euler characteristic mismatch for " + e.at("key").get<std::string>());
        std::vector<int> slots(ent.k, 0);
        for (const auto& bm : cd.boundary_map)
            for (int c : bm) {
                if (c < 0 || c >= ent.k) throw ValidationError("boundary_map index out of range");
                slots[c]++;
            }
        for (int c = 0; c < ent.k; ++c)
            if (slots[c] != 2) throw ValidationError("component does not fill exactly 2 boundary slots");
        if (recompute_rho(cd) != cd.rho) throw ValidationError("stored rho disagrees with pieces");
        if (cd.sigma <= 0 || cd.stab_index <= 0) throw ValidationError("sigma/stab must be positive");

        ent.cut = std::move(cd);
        table.entries_.emplace_back(e.at("key").get<std::string>(), std::move(ent));
    }
    return table;
}

const ConfigTable& ConfigTable::instance() {
    static ConfigTable table = load(std::string(HOROLAB_DATA_DIR) + "/configurations.json");
    return table;
}

const ConfigTable::Entry& ConfigTable::find(const std::string& key) const {
    for (const auto& [k, e] : entries_)
        if (k == key) return e;
    throw UnsupportedConfiguration(key);
}

bool ConfigTable::has(const std::string& key) const {
    for (const auto& [k, e] : entries_)
        if (k == key) return true;
    return false;
}

std::vector<std::string> ConfigTable::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) out.push_back(k);
    return out;
}

const CutData& ConfigTable::cut(const std::string& key) const { return find(key).cut; }

std::pair<Rational, int> ConfigTable::symmetry_constants(const std::string& key) const {
    const CutData& cd = find(key).cut;
    return {cd.sigma, cd.stab_index};
}

MultiCurveConfig ConfigTable::make_config(const std::string& key,
                                          std::vector<Rational> weights) const {
    const Entry& e = find(key);
    MultiCurveConfig cfg;
    cfg.key = key;
    cfg.base = e.base;
    cfg.k = e.k;
    cfg.components.assign(static_cast<std::size_t>(e.k), "component");
    if (weights.empty()) weights.assign(static_cast<std::size_t>(e.k), Rational(1));
    if (static_cast<int>(weights.size()) != e.k)
        throw ValidationError("weight vector length != k for " + key);
    for (const auto& w : weights)
        if (w <= 0) throw ValidationError("weights must be positive");
    cfg.weights = std::move(weights);
    return cfg;
}

} // namespace hl
