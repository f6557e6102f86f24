#include "pexider/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "pexider/errors.hpp"
#include "pexider/serialize.hpp"
#include "pexider/shapes.hpp"

namespace pexider::cli {

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kConfigSchema = "pexider-config/1";
constexpr const char* kArtifactSchema = "pexider-artifact/1";
constexpr const char* kReportSchema = "pexider-report/1";

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("PEXIDER_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[pexider] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[pexider:debug] " << msg << "\n";
}

struct Options {
    std::string config_path;
    std::string out_path;
    int n = -1;
    double tol = -1.0;
    long long seed = -1;
};

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw SchemaError("cannot parse '" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.flush();
    if (!out.good()) throw std::ios_base::failure("cannot write '" + path + "'");
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw SchemaError("unknown key '" + it.key() + "' in " + ctx);
    }
}

Json load_config(const Options& opt) {
    if (opt.config_path.empty()) throw SchemaError("--config is required");
    Json cfg = load_json(opt.config_path);
    if (!cfg.is_object() || cfg.value("schema", "") != kConfigSchema)
        throw SchemaError("config must carry \"schema\": \"" + std::string(kConfigSchema) + "\"");
    return cfg;
}

double get_num(const Json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw SchemaError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

struct GridSpec {
    int n;
    double margin;
    bool stratified = false;
};

GridSpec grid_spec(const Json& cfg, const Options& opt, int dflt_n, double dflt_margin) {
    GridSpec g{dflt_n, dflt_margin, false};
    if (cfg.contains("grid")) {
        const Json& gj = cfg.at("grid");
        check_keys(gj, {"n", "margin", "stratified"}, "grid");
        g.n = static_cast<int>(get_num(gj, "n", dflt_n));
        g.margin = get_num(gj, "margin", dflt_margin);
        if (gj.contains("stratified")) g.stratified = gj.at("stratified").get<bool>();
    }
    if (opt.n > 0) g.n = opt.n;
    return g;
}

ResidualReport run_residual(const SolutionTuple& s, const GridSpec& g, long long seed) {
    return g.stratified ? residual_main(s, g.n, g.margin, static_cast<unsigned long long>(seed))
                        : residual_main(s, g.n, g.margin);
}

// ---------------------------------------------------------------------------
// shape specs
// ---------------------------------------------------------------------------

Fn1D shape_from_json(const Json& j, const OpenInterval& I) {
    if (!j.is_object() || !j.contains("shape")) throw SchemaError("shape record needs 'shape'");
    const std::string kind = j.at("shape").get<std::string>();
    if (kind == "identity") {
        check_keys(j, {"shape"}, "shape");
        return shapes::identity(I);
    }
    if (kind == "affine") {
        check_keys(j, {"shape", "slope", "intercept"}, "shape");
        return shapes::affine(I, get_num(j, "slope", 1.0), get_num(j, "intercept", 0.0));
    }
    if (kind == "poly") {
        check_keys(j, {"shape", "coeffs"}, "shape");
        return shapes::poly(I, j.at("coeffs").get<std::vector<double>>());
    }
    if (kind == "exp") {
        check_keys(j, {"shape", "scale", "amplitude", "offset"}, "shape");
        return shapes::exponential(I, get_num(j, "scale", 1.0), get_num(j, "amplitude", 1.0),
                                   get_num(j, "offset", 0.0));
    }
    if (kind == "log") {
        check_keys(j, {"shape", "shift", "scale"}, "shape");
        return shapes::log_shifted(I, get_num(j, "shift", 1.0), get_num(j, "scale", 1.0));
    }
    throw SchemaError("unknown shape '" + kind + "'");
}

// ---------------------------------------------------------------------------
// families from config
// ---------------------------------------------------------------------------

double family_bound(const std::string& family, const std::string& kase) {
    if (family == "profiles") {
        if (kase == "trig" || kase == "hyperbolic" || kase == "trig-zero" ||
            kase == "hyperbolic-zero")
            return 1e-6;
        return 1e-7;
    }
    return 1e-12;  // closed-form families are exact
}

AuxCase aux_case_from_name(const std::string& name) {
    for (AuxCase c : {AuxCase::TrigFraction, AuxCase::LinearFraction, AuxCase::HyperbolicFraction,
                      AuxCase::ConstantPair, AuxCase::TrigFractionZero,
                      AuxCase::LinearFractionZero, AuxCase::HyperbolicFractionZero})
        if (aux_case_name(c) == name) return c;
    throw SchemaError("unknown profile case '" + name + "'");
}

struct BuildResult {
    SolutionTuple tuple;
    Json params;
    std::string family;
    std::string kase;  // profiles only
};

BuildResult build_from_config(const Json& cfg, const Options& opt) {
    const std::string family = cfg.value("family", "");
    if (family == "paper-example") {
        return {paper_example(), Json::object(), family, ""};
    }
    if (family == "affine") {
        const OpenInterval I = ser::to_interval(cfg.at("interval"));
        const Json& c = cfg.at("constants");
        check_keys(c, {"A", "alpha", "B", "beta1", "beta2"}, "constants");
        AffineParams p{I,
                       get_num(c, "A", 0.0),
                       get_num(c, "alpha", 0.0),
                       get_num(c, "B", 0.0),
                       get_num(c, "beta1", 0.0),
                       get_num(c, "beta2", 0.0),
                       shape_from_json(cfg.at("g1"), I),
                       shape_from_json(cfg.at("g2"), I)};
        Json params{{"constants", c}, {"g1", cfg.at("g1")}, {"g2", cfg.at("g2")}};
        return {build_affine(p), std::move(params), family, ""};
    }
    if (family == "partial") {
        const OpenInterval I = ser::to_interval(cfg.at("interval"));
        const Json& kj = cfg.at("K");
        const Json& c = cfg.at("constants");
        check_keys(c,
                   {"A", "B", "alpha", "beta1", "beta2", "C_minus", "C_plus", "D_minus", "D_plus",
                    "gamma1_minus", "gamma2_minus", "gamma1_plus", "gamma2_plus", "delta1_minus",
                    "delta2_minus", "delta1_plus", "delta2_plus"},
                   "constants");
        PartiallyAffineParams p{I, kj.at("lo").get<double>(), kj.at("hi").get<double>()};
        p.A = get_num(c, "A", 0.0);
        p.B = get_num(c, "B", 0.0);
        p.alpha = get_num(c, "alpha", 0.0);
        p.beta1 = get_num(c, "beta1", 0.0);
        p.beta2 = get_num(c, "beta2", 0.0);
        p.C_minus = get_num(c, "C_minus", 0.0);
        p.C_plus = get_num(c, "C_plus", 0.0);
        p.D_minus = get_num(c, "D_minus", 1.0);
        p.D_plus = get_num(c, "D_plus", 1.0);
        p.gamma1_minus = get_num(c, "gamma1_minus", 0.0);
        p.gamma2_minus = get_num(c, "gamma2_minus", 0.0);
        p.gamma1_plus = get_num(c, "gamma1_plus", 0.0);
        p.gamma2_plus = get_num(c, "gamma2_plus", 0.0);
        p.delta1_minus = get_num(c, "delta1_minus", 0.0);
        p.delta2_minus = get_num(c, "delta2_minus", 0.0);
        p.delta1_plus = get_num(c, "delta1_plus", 0.0);
        p.delta2_plus = get_num(c, "delta2_plus", 0.0);
        Json params{{"K", kj}, {"constants", c}};
        return {build_partially_affine(p), std::move(params), family, ""};
    }
    if (family == "profiles") {
        const OpenInterval I = ser::to_interval(cfg.at("interval"));
        const std::string kase = cfg.at("case").get<std::string>();
        const Json& c = cfg.at("constants");
        check_keys(c, {"a", "b", "c", "d", "gamma", "lambda", "nu"}, "constants");
        std::optional<Fn1D> phi;
        if (cfg.contains("phi")) phi = shape_from_json(cfg.at("phi"), I);
        AuxProfiles prof = aux_profiles(
            aux_case_from_name(kase), get_num(c, "a", 0.0), get_num(c, "b", 0.0),
            get_num(c, "c", 0.0), get_num(c, "d", 0.0), get_num(c, "gamma", 0.0),
            get_num(c, "lambda", 0.0), get_num(c, "nu", 0.0), I, phi);
        Anchors an = default_anchors(I);
        if (cfg.contains("anchors")) {
            const Json& aj = cfg.at("anchors");
            check_keys(aj, {"x0", "F0", "f10", "f20", "g10", "g20"}, "anchors");
            an.x0 = get_num(aj, "x0", an.x0);
            an.F0 = get_num(aj, "F0", 0.0);
            an.f10 = get_num(aj, "f10", 0.0);
            an.f20 = get_num(aj, "f20", 0.0);
            an.g10 = get_num(aj, "g10", 0.0);
            an.g20 = get_num(aj, "g20", 0.0);
        }
        double tol = get_num(cfg, "tol", 1e-10);
        if (opt.tol > 0) tol = opt.tol;
        Json params{{"case", kase},
                    {"constants", c},
                    {"anchors", Json{{"x0", an.x0},
                                     {"F0", an.F0},
                                     {"f10", an.f10},
                                     {"f20", an.f20},
                                     {"g10", an.g10},
                                     {"g20", an.g20}}},
                    {"tol", tol}};
        if (cfg.contains("phi")) params["phi"] = cfg.at("phi");
        return {assemble_nowhere_affine(prof, an, tol), std::move(params), family, kase};
    }
    throw SchemaError("unknown family '" + family + "' (expected paper-example | affine | "
                      "partial | profiles)");
}

Json functions_json(const SolutionTuple& s) {
    return Json{{"F", ser::fn(s.F)},   {"f1", ser::fn(s.f1)}, {"f2", ser::fn(s.f2)},
                {"g1", ser::fn(s.g1)}, {"g2", ser::fn(s.g2)}, {"G", ser::fn(s.G)}};
}

SolutionTuple tuple_from_artifact(const Json& art) {
    if (art.value("schema", "") != kArtifactSchema)
        throw SchemaError("artifact must carry \"schema\": \"" + std::string(kArtifactSchema) +
                          "\"");
    const Json& f = art.at("functions");
    Regime regime = Regime::PartiallyAffine;
    const std::string rn = art.value("regime", "");
    if (rn == regime_name(Regime::Affine)) regime = Regime::Affine;
    if (rn == regime_name(Regime::NowhereAffine)) regime = Regime::NowhereAffine;
    return SolutionTuple{ser::to_interval(art.at("interval")),
                         ser::to_fn(f.at("F")),
                         ser::to_fn(f.at("f1")),
                         ser::to_fn(f.at("f2")),
                         ser::to_fn(f.at("g1")),
                         ser::to_fn(f.at("g2")),
                         ser::to_interval(art.at("g_domain")),
                         ser::to_fn(f.at("G")),
                         regime};
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_build(const Options& opt) {
    Json cfg = load_config(opt);
    check_keys(cfg,
               {"schema", "family", "interval", "K", "case", "constants", "g1", "g2", "phi",
                "anchors", "tol", "grid", "seed", "out"},
               "config");
    BuildResult br = build_from_config(cfg, opt);
    const GridSpec grid = grid_spec(cfg, opt, 100, 1e-3);
    const double bound = family_bound(br.family, br.kase);
    const long long seed = opt.seed >= 0 ? opt.seed : static_cast<long long>(get_num(cfg, "seed", 0));
    const ResidualReport rep = run_residual(br.tuple, grid, seed);
    log_debug("build residual max_abs " + std::to_string(rep.max_abs) + " at (" +
              std::to_string(rep.worst.first) + ", " + std::to_string(rep.worst.second) + ")");
    Json art{{"schema", kArtifactSchema},
             {"family", br.family},
             {"regime", regime_name(br.tuple.regime)},
             {"interval", ser::interval(br.tuple.I)},
             {"g_domain", ser::interval(br.tuple.g_domain)},
             {"params", br.params},
             {"functions", functions_json(br.tuple)},
             {"residual", ser::residual(rep)},
             {"bound", bound},
             {"provenance",
              Json{{"tool", "pexider-kit"}, {"version", kToolVersion}, {"seed", seed},
                   {"config", cfg}}}};
    const std::string out = !opt.out_path.empty() ? opt.out_path
                            : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                  : "artifact.json";
    write_text(out, art.dump(2) + "\n");
    std::cout << "family: " << br.family << "\n"
              << "regime: " << regime_name(br.tuple.regime) << "\n"
              << "residual max_abs: " << rep.max_abs << " (bound " << bound << ") on " << grid.n
              << "x" << grid.n << " grid, margin " << grid.margin << "\n"
              << "artifact: " << out << "\n";
    return rep.max_abs < bound ? 0 : 1;
}

int cmd_verify(const Options& opt) {
    Json cfg = load_config(opt);
    check_keys(cfg, {"schema", "artifact", "grid", "out", "seed"}, "config");
    if (!cfg.contains("artifact")) throw SchemaError("verify config needs 'artifact'");
    Json art = load_json(cfg.at("artifact").get<std::string>());
    SolutionTuple s = tuple_from_artifact(art);
    const GridSpec grid = grid_spec(cfg, opt, 100, 1e-3);
    const double bound = art.value("bound", 1e-12);
    const long long seed = opt.seed >= 0 ? opt.seed : static_cast<long long>(get_num(cfg, "seed", 0));
    const ResidualReport rep = run_residual(s, grid, seed);
    bool pass = rep.max_abs <= bound;

    Json report{{"schema", kReportSchema},
                {"kind", "verify"},
                {"family", art.value("family", "")},
                {"residual", ser::residual(rep)},
                {"bound", bound},
                {"pass", pass}};

    // profile artifacts also carry their derivative-system description
    if (art.value("family", "") == "profiles") {
        const Json& prm = art.at("params");
        std::optional<Fn1D> phi;
        if (prm.contains("phi")) phi = shape_from_json(prm.at("phi"), s.I);
        const Json& c = prm.at("constants");
        AuxProfiles prof = aux_profiles(
            aux_case_from_name(prm.at("case").get<std::string>()), get_num(c, "a", 0.0),
            get_num(c, "b", 0.0), get_num(c, "c", 0.0), get_num(c, "d", 0.0),
            get_num(c, "gamma", 0.0), get_num(c, "lambda", 0.0), get_num(c, "nu", 0.0), s.I, phi);
        auto [r1, r2] = residual_system(prof, grid.n, grid.margin);
        report["system_residual"] = Json{{"eq1", ser::residual(r1)}, {"eq2", ser::residual(r2)}};
        pass = pass && r1.max_abs < 1e-12 && r2.max_abs < 1e-12;
        report["pass"] = pass;
    }

    const std::string out = !opt.out_path.empty() ? opt.out_path
                            : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                  : "";
    if (!out.empty()) write_text(out, report.dump(2) + "\n");
    std::cout << "residual max_abs: " << rep.max_abs << " (bound " << bound << ")"
              << (pass ? " PASS" : " FAIL") << "\n";
    if (!pass)
        std::cout << "worst point: (" << rep.worst.first << ", " << rep.worst.second << ")\n";
    return pass ? 0 : 1;
}

int cmd_classify(const Options& opt) {
    Json cfg = load_config(opt);
    check_keys(cfg, {"schema", "artifact", "tol", "n", "out", "seed"}, "config");
    if (!cfg.contains("artifact")) throw SchemaError("classify config needs 'artifact'");
    Json art = load_json(cfg.at("artifact").get<std::string>());
    SolutionTuple s = tuple_from_artifact(art);
    double tol = get_num(cfg, "tol", 1e-6);
    if (opt.tol > 0) tol = opt.tol;
    int n = static_cast<int>(get_num(cfg, "n", 4096));
    if (opt.n > 0) n = opt.n;
    const AffinityReport rep = classify_affine_intervals(s.F, tol, n);

    const int code = rep.verdict == Regime::Affine            ? 0
                     : rep.verdict == Regime::PartiallyAffine ? 10
                                                              : 20;
    Json out_json{{"schema", kReportSchema}, {"kind", "classify"},
                  {"report", ser::affinity(rep)}, {"exit", code}};
    const std::string out = !opt.out_path.empty() ? opt.out_path
                            : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                  : "";
    if (!out.empty()) write_text(out, out_json.dump(2) + "\n");
    std::cout << "verdict: " << regime_name(rep.verdict) << "\n";
    for (const auto& w : rep.intervals)
        std::cout << "  window ]" << w.window.lo << "," << w.window.hi << "[ slope " << w.slope
                  << " intercept " << w.intercept << "\n";
    return code;
}

int cmd_export(const Options& opt) {
    Json cfg = load_config(opt);
    check_keys(cfg, {"schema", "artifact", "n", "out", "seed"}, "config");
    if (!cfg.contains("artifact")) throw SchemaError("export config needs 'artifact'");
    Json art = load_json(cfg.at("artifact").get<std::string>());
    SolutionTuple s = tuple_from_artifact(art);
    int n = static_cast<int>(get_num(cfg, "n", 129));
    if (opt.n > 0) n = opt.n;
    if (n < 2) throw SchemaError("export needs n >= 2");

    const OpenInterval xbox = s.I.shrunk(s.F.default_margin());
    const OpenInterval ubox = s.g_domain.shrunk(s.G.default_margin());
    std::ostringstream csv;
    csv << "x,F,f1,f2,g1,g2,u,G\n";
    char buf[32];
    const auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        csv << buf << sep;
    };
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        const double x = xbox.lo * (1.0 - t) + xbox.hi * t;
        const double u = ubox.lo * (1.0 - t) + ubox.hi * t;
        put(x, ',');
        put(s.F.eval_inner(x), ',');
        put(s.f1.eval_inner(x), ',');
        put(s.f2.eval_inner(x), ',');
        put(s.g1.eval_inner(x), ',');
        put(s.g2.eval_inner(x), ',');
        put(u, ',');
        put(s.G.eval_inner(u), '\n');
    }
    const std::string out = !opt.out_path.empty() ? opt.out_path
                            : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                  : "export.csv";
    write_text(out, csv.str());
    std::cout << "wrote " << n << " rows to " << out << "\n";
    return 0;
}

int cmd_geometry(const Options& opt) {
    Json cfg = load_config(opt);
    check_keys(cfg, {"schema", "geometry", "out", "seed"}, "config");
    if (!cfg.contains("geometry")) throw SchemaError("geometry config needs 'geometry'");
    const Json& gj = cfg.at("geometry");
    check_keys(gj, {"op", "I", "H", "J1", "J2", "g1", "g2", "x", "k"}, "geometry");
    const std::string op = gj.at("op").get<std::string>();
    const OpenInterval I = ser::to_interval(gj.at("I"));
    const auto g1 = gj.contains("g1") ? shape_from_json(gj.at("g1"), I) : shapes::identity(I);
    const auto g2 = gj.contains("g2") ? shape_from_json(gj.at("g2"), I) : shapes::identity(I);

    Json result;
    if (op == "sumset") {
        const OpenInterval J1 = gj.contains("J1") ? ser::to_interval(gj.at("J1")) : I;
        const OpenInterval J2 = gj.contains("J2") ? ser::to_interval(gj.at("J2")) : I;
        result = Json{{"sumset", ser::interval(sumset_image(g1, g2, J1, J2))}};
    } else if (op == "sides") {
        auto [lo, hi] = side_sets(ser::to_interval(gj.at("H")), I);
        result = Json{{"side_minus", lo ? ser::interval(*lo) : Json(nullptr)},
                      {"side_plus", hi ? ser::interval(*hi) : Json(nullptr)}};
    } else if (op == "reflection") {
        result = Json{{"ref", ser::interval(reflection_set(ser::to_interval(gj.at("H")), I))}};
    } else if (op == "preimage") {
        auto r = restricted_preimage(ser::to_interval(gj.at("H")), gj.at("x").get<double>(),
                                     static_cast<int>(get_num(gj, "k", 1)), g1, g2, I);
        result = Json{{"preimage", r ? ser::interval(*r) : Json(nullptr)}};
    } else if (op == "extension") {
        result =
            Json{{"ext", ser::interval(extension_set(ser::to_interval(gj.at("H")), g1, g2, I))}};
    } else if (op == "report") {
        result = ser::set_report(interval_report(ser::to_interval(gj.at("H")), g1, g2, I));
    } else {
        throw SchemaError("unknown geometry op '" + op + "'");
    }
    const std::string text = result.dump(2) + "\n";
    std::cout << text;
    const std::string out = !opt.out_path.empty() ? opt.out_path
                            : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                                  : "";
    if (!out.empty()) write_text(out, text);
    return 0;
}

int cmd_selftest(const Options& opt) {
    const unsigned long long seed = opt.seed >= 0 ? static_cast<unsigned long long>(opt.seed) : 7;
    std::mt19937_64 rng(seed);
    int failures = 0;
    const auto outcome = [&](const char* name, bool ok) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    // set extensions strictly contain proper subintervals
    bool geo_ok = true;
    for (int it = 0; it < 20 && geo_ok; ++it) {
        const OpenInterval I = shapes::random_interval(rng);
        const int dir = (it % 2 == 0) ? 1 : -1;
        const Fn1D g1 = shapes::random_monotone(rng, I, dir);
        const Fn1D g2 = shapes::random_monotone(rng, I, dir);
        const OpenInterval H = shapes::random_subinterval(rng, I);
        const OpenInterval ext = extension_set(H, g1, g2, I);
        const OpenInterval ref = reflection_set(H, I);
        geo_ok = ext.contains_interval(H, 1e-9) && ref.contains_interval(H, 1e-9);
        if (!H.same_as(I))
            geo_ok = geo_ok && (ext.length() > H.length() + 1e-9 || ref.length() > H.length() + 1e-9);
    }
    outcome("interval geometry suite", geo_ok);

    // canonical kernel triples give exactly zero residual
    bool aux_ok = true;
    {
        AuxTripleSpec s1;
        s1.I1 = OpenInterval(0, 2);
        s1.I2 = OpenInterval(1, 3);
        AuxTriple t = aux_triple(s1);
        aux_ok = residual_aux(t.phi, t.psi1, t.psi2, t.I1, t.I2, 60, 1e-3).max_abs == 0.0;
        AuxTripleSpec s2;
        s2.kase = 2;
        s2.I1 = OpenInterval(0, 4);
        s2.I2 = OpenInterval(0, 4);
        s2.a1 = 1;
        s2.b1 = 2;
        s2.a2 = 1.5;
        s2.b2 = 2.5;
        s2.D = 3;
        s2.E = 5;
        t = aux_triple(s2);
        aux_ok =
            aux_ok && residual_aux(t.phi, t.psi1, t.psi2, t.I1, t.I2, 60, 1e-3).max_abs == 0.0;
        AuxTripleSpec s3;
        s3.kase = 3;
        s3.I1 = OpenInterval(0, 4);
        s3.I2 = OpenInterval(0, 4);
        s3.j = 1;
        s3.D = 5;
        s3.windows = {OpenInterval(0, 1)};
        t = aux_triple(s3);
        aux_ok =
            aux_ok && residual_aux(t.phi, t.psi1, t.psi2, t.I1, t.I2, 60, 1e-3).max_abs == 0.0;
    }
    outcome("kernel triple constructions", aux_ok);

    // diagonal solve covers the sumset and rejects points outside it
    bool diag_ok = true;
    for (int it = 0; it < 10 && diag_ok; ++it) {
        const OpenInterval I = shapes::random_interval(rng);
        const int dir = (it % 2 == 0) ? 1 : -1;
        const Fn1D g1 = shapes::random_monotone(rng, I, dir);
        const Fn1D g2 = shapes::random_monotone(rng, I, dir);
        const OpenInterval sum = sumset_image(g1, g2, I, I);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 100 && diag_ok; ++k) {
            const double uu = sum.lo + (1e-6 + (1.0 - 2e-6) * u(rng)) * sum.length();
            const double t = diagonal_solve(g1, g2, uu, 1e-10);
            diag_ok = std::fabs(g1.eval_inner(t) + g2.eval_inner(t) - uu) <= 1e-10;
        }
        try {
            diagonal_solve(g1, g2, sum.hi + 0.5 * sum.length(), 1e-10);
            diag_ok = false;
        } catch (const RangeError&) {
        }
    }
    outcome("diagonal coverage", diag_ok);

    std::cout << (failures == 0 ? "selftest OK" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"solution families, verification and classification for the composite "
                 "mean-type functional equation F((x+y)/2)+f1(x)+f2(y)=G(g1(x)+g2(y))"};
    app.name("pexider-kit");
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* o = sub->add_option("--config", opt.config_path, "config JSON path");
        if (config_required) o->required();
        sub->add_option("--out", opt.out_path, "output path override");
        sub->add_option("--n", opt.n, "grid/export size override");
        sub->add_option("--tol", opt.tol, "tolerance override");
        sub->add_option("--seed", opt.seed, "seed override");
    };
    add_common(app.add_subcommand("build", "build a solution tuple and write an artifact"), true);
    add_common(app.add_subcommand("verify", "re-check an artifact's residuals"), true);
    add_common(app.add_subcommand("classify", "affinity classification of an artifact's F"),
               true);
    add_common(app.add_subcommand("export", "sample an artifact to CSV"), true);
    add_common(app.add_subcommand("geometry", "interval set constructions"), true);
    add_common(app.add_subcommand("selftest", "run the built-in property suites"), false);

    std::vector<const char*> argv;
    argv.push_back("pexider-kit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 4;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    log_info("running " + sub);
    try {
        if (sub == "build") return cmd_build(opt);
        if (sub == "verify") return cmd_verify(opt);
        if (sub == "classify") return cmd_classify(opt);
        if (sub == "export") return cmd_export(opt);
        if (sub == "geometry") return cmd_geometry(opt);
        if (sub == "selftest") return cmd_selftest(opt);
        return 4;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 4;
    } catch (const ConstraintError& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "write error: " << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const Json::exception& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace pexider::cli
