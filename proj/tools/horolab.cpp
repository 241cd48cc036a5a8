// command-line front end: thin dispatch over the library, JSON config in,
// CSV/JSON artifacts out.  All floating-point output uses %.17g so files
// round-trip; wall time goes to stderr so artifacts stay byte-identical
// across runs and thread counts.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "horolab/counting.hpp"
#include "horolab/experiments.hpp"
#include "horolab/measures.hpp"
#include "horolab/volumes.hpp"

using nlohmann::json;
using namespace hl;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void config_error(const std::string& what) {
    throw ValidationError("runconfig: " + what + " (schema: data/runconfig.schema.json)");
}

struct RunConfig {
    json j;

    bool has(const std::string& key) const { return j.contains(key); }

    double num(const std::string& key, double fallback) const {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number()) config_error(key + " must be a number");
        return j.at(key).get<double>();
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_string()) config_error(key + " must be a string");
        return j.at(key).get<std::string>();
    }

    std::vector<double> nums(const std::string& key, std::vector<double> fallback) const {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_array()) config_error(key + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& v : j.at(key)) {
            if (!v.is_number()) config_error(key + " must be an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
};

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) {
        cfg.j = json::object();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) config_error("cannot open " + path);
    try {
        cfg.j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(path + ": " + e.what());
    }
    if (!cfg.j.is_object()) config_error("top level must be an object");
    if (cfg.j.contains("version") && cfg.j.at("version").get<int>() != 1)
        config_error("unsupported version");
    return cfg;
}

FNPoint surface_from(const RunConfig& cfg) {
    json s = cfg.j.value("surface", json::object());
    if (!s.is_object()) config_error("surface must be an object");
    std::string model = s.value("model", "s11");
    double l = s.value("l", 2.0 * std::acosh(1.5)); // modular torus by default
    double tau = s.value("tau", 0.0);
    double boundary = s.value("boundary", 0.0);
    if (!(l > 0)) config_error("surface.l must be > 0");
    if (model == "s11") return FNPoint::s11(l, tau, boundary);
    if (model == "s04") return FNPoint::s04(l, tau);
    config_error("surface.model must be \"s11\" or \"s04\"");
}

MultiCurveConfig curve_from(const RunConfig& cfg) {
    std::string key = cfg.str("curve", "s11_nonsep");
    std::vector<Rational> w;
    if (cfg.has("weights")) {
        const json& jw = cfg.j.at("weights");
        if (!jw.is_array()) config_error("weights must be an array");
        for (const auto& v : jw) {
            if (v.is_number_integer())
                w.emplace_back(v.get<long long>());
            else if (v.is_string())
                w.emplace_back(Rational(v.get<std::string>()));
            else
                config_error("weights entries must be integers or \"p/q\" strings");
        }
    }
    return ConfigTable::instance().make_config(key, std::move(w));
}

WeightFunction weight_from(const RunConfig& cfg, int dims) {
    if (!cfg.has("f")) return WeightFunction::box_indicator(std::vector<double>(dims, 1.0));
    const json& f = cfg.j.at("f");
    if (!f.is_object()) config_error("f must be an object");
    std::string kind = f.value("kind", "box");
    if (kind == "box") {
        std::vector<double> hi = f.value("hi", std::vector<double>(dims, 1.0));
        return WeightFunction::box_indicator(std::move(hi));
    }
    if (kind == "piecewise") {
        if (!f.contains("dims") || !f.at("dims").is_array())
            config_error("f.dims must be an array of 1-D pieces");
        std::vector<WeightFunction::Piece1D> pieces;
        for (const auto& d : f.at("dims")) {
            WeightFunction::Piece1D p;
            p.knots = d.value("knots", std::vector<double>{});
            for (const auto& c : d.value("coeffs", json::array()))
                p.coeffs.push_back(c.get<std::vector<double>>());
            pieces.push_back(std::move(p));
        }
        return WeightFunction::product_piecewise(std::move(pieces));
    }
    config_error("f.kind must be \"box\" or \"piecewise\"");
}

FdDomain domain_from(const RunConfig& cfg) {
    json s = cfg.j.value("surface", json::object());
    std::string model = s.is_object() ? s.value("model", "s11") : "s11";
    if (model == "s04") return FdDomain::s04();
    if (model == "s11") return FdDomain::s11(s.is_object() ? s.value("boundary", 0.0) : 0.0);
    config_error("surface.model must be \"s11\" or \"s04\"");
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << body;
    std::cout << path << "\n";
}

std::string sample_csv(const std::vector<SurfaceSample>& samples, std::uint64_t seed) {
    if (samples.empty()) throw ValidationError("no samples to dump");
    std::ostringstream csv;
    std::size_t nl = samples[0].point.lengths.size();
    std::size_t nt = samples[0].point.twists.size();
    csv << "seed,index";
    for (std::size_t d = 0; d < nl; ++d) csv << ",l" << d + 1;
    for (std::size_t d = 0; d < nt; ++d) csv << ",tau" << d + 1;
    csv << ",weight,provenance\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SurfaceSample& s = samples[i];
        csv << seed << "," << i;
        for (double v : s.point.lengths) csv << "," << fmt17(v);
        for (double v : s.point.twists) csv << "," << fmt17(v);
        csv << "," << fmt17(s.weight) << "," << s.provenance << "\n";
    }
    return csv.str();
}

struct Cli {
    std::string config_path;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    bool seed_set = false, threads_set = false;

    RunConfig cfg;

    void finalize() {
        cfg = load_config(config_path);
        // flags override the config file
        if (!seed_set && cfg.has("seed")) seed = cfg.j.at("seed").get<std::uint64_t>();
        if (!threads_set && cfg.has("threads")) threads = cfg.j.at("threads").get<int>();
        if (out_dir == "." && cfg.has("out")) out_dir = cfg.str("out", ".");
        if (threads < 1) config_error("threads must be >= 1");
    }

    SamplerConfig sampler(std::uint64_t default_n) const {
        SamplerConfig s;
        s.seed = seed;
        s.threads = threads;
        s.sample_count =
            static_cast<std::uint64_t>(cfg.num("sample_count", static_cast<double>(default_n)));
        return s;
    }
};

int cmd_curves_enumerate(const Cli& c) {
    FNPoint X = surface_from(c.cfg);
    double L = c.cfg.num("L", 10.0);
    auto curves = enumerate_simple_curves(X, L);
    std::ostringstream csv;
    csv << "p,q,length\n";
    for (const auto& [s, len] : curves)
        csv << s.p << "," << s.q << "," << fmt17(len) << "\n";
    write_file(c.out_dir + "/curves.csv", csv.str());
    return 0;
}

int cmd_curves_count(const Cli& c) {
    FNPoint X = surface_from(c.cfg);
    MultiCurveConfig mc = curve_from(c.cfg);
    double b1 = c.cfg.num("b1", 1.0);
    std::vector<double> schedule = c.cfg.nums("L_schedule", {c.cfg.num("L", 100.0)});
    std::ostringstream csv;
    csv << "L,count,normalized\n";
    for (double L : schedule) {
        CountResult r = count_s(X, mc, b1, L);
        csv << fmt17(L) << "," << r.count << "," << fmt17(r.normalized) << "\n";
    }
    write_file(c.out_dir + "/counts.csv", csv.str());
    return 0;
}

int cmd_volumes_eval(const Cli& c, const std::string& curve_key, double L) {
    RunConfig cfg = c.cfg;
    if (!curve_key.empty()) cfg.j["curve"] = curve_key;
    MultiCurveConfig mc = curve_from(cfg);
    GradedPoly V = assemble_V(mc);
    std::vector<double> x(static_cast<std::size_t>(mc.k), L);
    std::cout << "V = " << V.str() << "\n";
    std::cout << "V(" << fmt17(L) << ") = " << fmt17(poly_eval(V, x)) << "\n";
    return 0;
}

int cmd_mass(const Cli& c, bool horosphere) {
    MultiCurveConfig mc = curve_from(c.cfg);
    WeightFunction f = weight_from(c.cfg, mc.k);
    double L = c.cfg.num("L", 10.0);
    double value;
    json out{{"command", horosphere ? "mass horosphere" : "mass horoball"},
             {"curve", mc.key},
             {"L", L}};
    if (horosphere) {
        std::vector<double> a = c.cfg.nums("a", std::vector<double>(mc.k, 1.0));
        value = horosphere_mass(mc, a, f, L);
        out["a"] = a;
    } else {
        value = horoball_mass(mc, f, L);
    }
    out["value"] = value;
    std::cout << fmt17(value) << "\n";
    write_file(c.out_dir + "/mass.json", out.dump(2) + "\n");
    return 0;
}

int cmd_sample(const Cli& c, const std::string& which) {
    SamplerConfig scfg = c.sampler(1000);
    scfg.threads = c.threads;
    std::vector<SurfaceSample> samples;
    if (which == "target") {
        samples = sample_target_mirzakhani(domain_from(c.cfg), scfg).samples;
    } else {
        MultiCurveConfig mc = curve_from(c.cfg);
        WeightFunction f = weight_from(c.cfg, mc.k);
        double L = c.cfg.num("L", 10.0);
        if (which == "horoball") {
            samples = sample_horoball(mc, f, L, scfg);
        } else {
            std::vector<double> a = c.cfg.nums("a", std::vector<double>(mc.k, 1.0));
            samples = sample_horosphere(mc, a, f, L, scfg);
        }
    }
    write_file(c.out_dir + "/samples-" + which + ".csv", sample_csv(samples, scfg.seed));
    return 0;
}

int cmd_experiment_run(const Cli& c, const std::string& name) {
    ExperimentReport r = run_experiment(name, c.seed, c.threads);
    for (const std::string& p : r.write(c.out_dir)) std::cout << p << "\n";
    std::cout << (r.passed() ? "passed" : "failed") << "\n";
    return 0;
}

int cmd_oracle_mass_consistency(const Cli& c) {
    MassConsistencyParams p;
    p.seed = c.seed;
    p.threads = c.threads;
    ExperimentReport r = run_mass_consistency(p);
    for (const std::string& path : r.write(c.out_dir)) std::cout << path << "\n";
    std::cout << (r.passed() ? "passed" : "failed") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    auto t0 = std::chrono::steady_clock::now();
    Cli c;
    CLI::App app{"moduli-space curve counting and horoball/horosphere measures"};
    app.require_subcommand(1);
    app.add_option("--config", c.config_path, "JSON run configuration");
    app.add_option("--seed", c.seed, "RNG seed")->each([&](const std::string&) { c.seed_set = true; });
    app.add_option("--threads", c.threads, "worker threads")
        ->each([&](const std::string&) { c.threads_set = true; });
    app.add_option("--out", c.out_dir, "output directory");

    // callbacks only record the action; config loading and dispatch happen
    // after the full command line is parsed
    std::function<int()> action;
    auto* curves = app.add_subcommand("curves", "simple-curve spectra");
    curves->add_subcommand("enumerate", "dump (p, q, length) up to L")
        ->callback([&] { action = [&] { return cmd_curves_enumerate(c); }; });
    curves->add_subcommand("count", "counting function along an L-schedule")
        ->callback([&] { action = [&] { return cmd_curves_count(c); }; });

    std::string vol_curve;
    double vol_L = 1.0;
    auto* volumes = app.add_subcommand("volumes", "moduli volume polynomials");
    auto* vol_eval = volumes->add_subcommand("eval", "print V and evaluate at l_i = L");
    vol_eval->add_option("--curve", vol_curve, "configuration key");
    vol_eval->add_option("--L", vol_L, "evaluation length");
    vol_eval->callback([&] { action = [&] { return cmd_volumes_eval(c, vol_curve, vol_L); }; });

    auto* mass = app.add_subcommand("mass", "horoball / horosphere masses");
    mass->add_subcommand("horoball")->callback([&] { action = [&] { return cmd_mass(c, false); }; });
    mass->add_subcommand("horosphere")->callback([&] { action = [&] { return cmd_mass(c, true); }; });

    auto* sample = app.add_subcommand("sample", "measure samplers (CSV dump)");
    for (const char* w : {"horoball", "horosphere", "target"})
        sample->add_subcommand(w)->callback([&, w] { action = [&, w] { return cmd_sample(c, w); }; });

    std::string exp_name;
    auto* experiment = app.add_subcommand("experiment", "named experiments");
    auto* exp_run = experiment->add_subcommand("run");
    exp_run->add_option("name", exp_name, "experiment name")->required();
    exp_run->callback([&] { action = [&] { return cmd_experiment_run(c, exp_name); }; });

    auto* oracle = app.add_subcommand("oracle", "convention-pinning oracles");
    oracle->add_subcommand("mass-consistency")
        ->callback([&] { action = [&] { return cmd_oracle_mass_consistency(c); }; });

    // let --seed/--threads/--out/--config appear after the subcommand
    for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
        s->fallthrough();
        for (CLI::App* ss : s->get_subcommands([](const CLI::App*) { return true; }))
            ss->fallthrough();
    }

    int rc = 0;
    try {
        app.parse(argc, argv);
        if (!action) {
            std::cerr << "missing subcommand\n";
            return 2;
        }
        c.finalize();
        rc = action();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const UnsupportedConfiguration& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const MissingTableEntry& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) { // numerical / budget / convention failures
        std::cerr << e.what() << "\n";
        return 3;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "wall_time_s=%.3f\n", secs);
    return rc;
}
