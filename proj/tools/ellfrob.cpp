#include "ellfrob/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace ellfrob;

namespace {

constexpr const char* kSchema = "ellfrob/1";

struct RunConfig {
    std::string type;
    std::optional<int> rank;
    std::string r = "0";
    int qOrder = 20;
    int jetBound = 0;
    int precision = mantissa_bits();
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string out;
    bool json = false;
    // subcommand specific
    bool raw = false;
    bool noStability = false;
    std::string input;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(Real x)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<Real>::max_digits10) << x;
    return os.str();
}

json cnum(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

json rvec(const RVec& v)
{
    json a = json::array();
    for (auto& x : v) a.push_back(to_string(x));
    return a;
}

json qmatrix(const QMatrix& m)
{
    json a = json::array();
    for (size_t i = 0; i < m.rows(); ++i) a.push_back(rvec(m.row(i)));
    return a;
}

json series(const QSeries& f)
{
    json j;
    j["lead"] = to_string(f.lead());
    j["step"] = "1/" + std::to_string(f.den());
    j["precision"] = f.precision() ? json(to_string(*f.precision())) : json(nullptr);
    json c = json::array();
    for (auto z : f.coeffs()) c.push_back(cnum(z));
    j["coeffs"] = std::move(c);
    return j;
}

json xpoly(const XPoly& p)
{
    json a = json::array();
    for (const auto& [m, f] : p) {
        if (f.coeffs().empty()) continue;
        a.push_back({{"monomial", m}, {"series", series(f)}});
    }
    return a;
}

CartanType checked_type(const RunConfig& c)
{
    try {
        return parse_type(c.type, c.rank);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

SettingOptions setting_options(const RunConfig& c)
{
    SettingOptions o;
    try {
        o.r = parse_rational(c.r);
    } catch (const std::exception&) {
        throw ConfigError("--r: not a rational number: " + c.r);
    }
    o.qOrder = c.qOrder;
    o.jetWeight = c.jetBound;
    o.tol = c.tol;
    o.seed = c.seed;
    return o;
}

void validate(const RunConfig& c)
{
    checked_type(c);
    if (c.qOrder < 8) throw ConfigError("--q-order must be at least 8");
    if (!(c.tol > 0)) throw ConfigError("--tol must be positive");
    if (c.jetBound < 0) throw ConfigError("--jet-bound must be non-negative");
    if (c.precision <= 0) throw ConfigError("--precision must be positive");
    if (c.precision > mantissa_bits())
        throw ConfigError("--precision " + std::to_string(c.precision) + " exceeds the compiled mantissa (" +
                          std::to_string(mantissa_bits()) + " bits); rebuild with -DELLFROB_LONG_DOUBLE=ON");
    setting_options(c);
}

json config_json(const RunConfig& c)
{
    return {{"type", checked_type(c).label()}, {"r", c.r},           {"q_order", c.qOrder}, {"jet_bound", c.jetBound},
            {"precision", c.precision},       {"tolerance", c.tol}, {"seed", c.seed}};
}

// ---- subcommands -------------------------------------------------------

json cmd_describe(const RunConfig& c)
{
    auto sys = build(checked_type(c));
    auto ax = axioms_check(sys);
    json j;
    j["l"] = sys.l;
    j["n"] = sys.n;
    j["basis"] = "alpha_1..alpha_l, a, delta, Lambda_0";
    j["gram"] = qmatrix(sys.gram);
    j["marks"] = sys.marks;
    j["highest_root"] = sys.highestRoot;
    j["finite_roots"] = sys.finiteRoots.size();
    j["c0"] = to_string(sys.c0);
    j["c0_root_lattice"] = to_string(sys.c0RootLattice);
    j["axioms"] = {{"full_lattice", ax.fullLattice},         {"integrality", ax.integrality},
                   {"reflection_closed", ax.reflectionClosed}, {"irreducible", ax.irreducible},
                   {"radical_is_a", ax.radicalIsA},           {"lambda_pairing", ax.lambdaPairing},
                   {"signature", ax.signature.str()},         {"violations", ax.violations}};
    j["ok"] = ax.ok();
    return j;
}

json cmd_coxeter(const RunConfig& c)
{
    auto sys = build(checked_type(c));
    auto d = hyperbolic_coxeter(sys);
    sys = with_degrees(sys, d);
    auto eig = eigen_structure_check(sys, d.cF, d.dn);
    json j;
    j["ordering"] = d.ordering;
    j["dn"] = d.dn;
    j["degrees"] = d.degrees;
    j["codim"] = d.codim;
    j["zeta"] = "exp(2 pi i " + std::to_string(d.zetaExponent) + "/" + std::to_string(d.dn) + ")";
    j["eigen_multiplicity"] = eig.eigenMultiplicity;
    j["unip_shift"] = to_string(d.unipShift);
    j["kz_shift"] = to_string(d.kzShift);
    j["lambda"] = rvec(d.lambda);
    j["coxeter_matrix"] = qmatrix(d.c.matrix());
    j["checks"] = {{"semisimple_order_dn", eig.ok()},
                   {"root_avoidance", root_avoidance_check(sys, d)},
                   {"lambda_shift", lambda_shift_check(sys, d)}};
    return j;
}

json cmd_triplet(const RunConfig& c)
{
    auto sys = build(checked_type(c));
    auto d = hyperbolic_coxeter(sys);
    sys = with_degrees(sys, d);
    auto opt = setting_options(c);
    auto z = regular_point(sys, d, opt.seed);
    auto t = build_L(sys, d, z, opt.r);
    auto adm = check_admissible(sys, t);
    json j;
    j["r"] = to_string(t.r);
    j["signature"] = t.signature.str();
    j["signature_type"] = to_string(t.sigType);
    j["admissible"] = {{"splitting", adm.splitting}, {"root_free", adm.rootFree},     {"zeta_primitive", adm.zetaPrimitive},
                       {"g_stable", adm.gStable},    {"eigenvalues", adm.eigenvalues}, {"ok", adm.ok()}};
    json L = json::array();
    for (auto& v : t.L) L.push_back(rvec(v));
    j["L"] = std::move(L);
    j["lambda_r"] = rvec(t.lambdaR);
    j["regular_point"] = {{"u", rvec(z.u)}, {"v", rvec(z.v)}, {"attempts", z.attempts}};
    if (d.codim == 1 && sgn(t.r) == 0) {
        auto tn = dual_normalize(sys, d, t);
        auto G = z_gram(sys, tn);
        json g = json::array();
        for (auto& row : G) {
            json r = json::array();
            for (auto v : row) r.push_back(cnum(v));
            g.push_back(std::move(r));
        }
        j["dual_normalized_gram"] = std::move(g);
    }
    return j;
}

std::string exchange_text(const Setting& s, const BasicInvariantSet& xs, bool good)
{
    std::vector<ExchangeBlock> blocks;
    for (size_t a = 0; a < xs.n(); ++a) blocks.push_back({xs.degrees[a], good ? xs.jets[a] : xs.rawJets[a]});
    std::ostringstream os;
    write_exchange(os, exchange_header(s, good), blocks);
    return os.str();
}

json cmd_invariants(const RunConfig& c, std::string& text)
{
    auto type = checked_type(c);
    Setting s = make_setting(type, setting_options(c));
    auto raw = select_basic(s);
    auto pts = sample_points(s, 5, c.seed + 100);
    json j;
    j["degrees"] = s.degrees();
    j["jet_weight"] = s.jetWeight;
    json orb = json::array();
    for (size_t a = 0; a < raw.n(); ++a) {
        auto inv = invariance_check(s, raw.raw[a], pts);
        orb.push_back({{"weight", raw.rawWeights[a]},
                       {"degree", raw.raw[a].degree},
                       {"terms", raw.raw[a].size()},
                       {"invariance", num(inv.worstReflection)},
                       {"unipotent", num(inv.worstUnip)}});
    }
    j["orbit_sums"] = std::move(orb);
    if (c.raw) {
        text = exchange_text(s, raw, false);
        return j;
    }
    auto xs = make_good(s, raw);
    auto gr = check_good(s, xs);
    j["good"] = {{"goodness", num(gr.goodness)},
                 {"compatibility", num(gr.compatibility)},
                 {"delta_property", num(gr.deltaProperty)},
                 {"z0_property", num(gr.z0Property)},
                 {"psi_identity", num(gr.psiIdentity)}};
    MultiIndex zero(xs.n(), 0);
    j["top_restriction"] = series(xs.jets.back().coeff(zero));
    text = exchange_text(s, xs, true);
    return j;
}

json cmd_frobenius(const RunConfig& c)
{
    auto type = checked_type(c);
    Setting s = make_setting(type, setting_options(c));
    if (s.data.codim != 1 || !s.triplet.dualNormalized)
        throw std::runtime_error("frobenius: needs a codimension-1 type and r = 0 (codim " +
                                 std::to_string(s.data.codim) + ")");
    auto xs = make_good(s, select_basic(s));
    auto t = metric_and_constants(s, xs, default_scaling(s));
    auto rep = verify_frobenius(s, t, chart_samples(s, 5, c.seed + 200));
    auto flat = flatness_equivalences(s, xs, &t);
    int n = s.n();
    json j;
    j["degrees"] = t.degrees;
    j["scaling_c"] = cnum(t.c);
    j["unit"] = "d/dx^" + std::to_string(n);
    json g = json::array();
    for (auto& row : t.gLower) {
        json r = json::array();
        for (auto v : row) r.push_back(cnum(v));
        g.push_back(std::move(r));
    }
    j["metric"] = std::move(g);
    json C = json::array();
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            for (int k = 0; k <= n; ++k) {
                auto p = xpoly(t.C[a][b][k]);
                if (p.empty()) continue;
                C.push_back({{"alpha", a}, {"beta", b}, {"gamma", k}, {"poly", std::move(p)}});
            }
    j["structure_constants"] = std::move(C);
    json v;
    for (auto& [k, x] : rep.items()) v[k] = num(x);
    j["verification"] = std::move(v);
    j["flatness"] = {{"v_membership", num(flat.vMembership)},
                     {"unit_condition", num(flat.unitCondition)},
                     {"restriction", num(flat.restriction)},
                     {"constant_restriction", num(flat.constantRestriction)},
                     {"agree", flat.agree()},
                     {"isometry", num(flat.isometry)}};
    j["ok"] = rep.worst() < std::max(1e-7, c.tol);
    return j;
}

json cmd_verify(const RunConfig& c, bool& ok)
{
    SuiteOptions o;
    o.setting = setting_options(c);
    o.stability = !c.noStability;
    auto rep = verify_suite(checked_type(c), o);
    ok = rep.ok();
    json a = json::array();
    for (auto& r : rep.checks)
        a.push_back({{"check", r.name}, {"value", num(r.value)}, {"tol", num(r.tol)}, {"pass", r.pass}, {"detail", r.detail}});
    return {{"checks", std::move(a)}, {"ok", ok}};
}

json cmd_expand(const RunConfig& c)
{
    std::ifstream in(c.input);
    if (!in) throw ConfigError("expand: cannot open " + c.input);
    ExchangeFile f;
    try {
        f = read_exchange(in);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    auto opt = setting_options(c);
    opt.r = f.header.r;
    opt.seed = f.header.seed;
    opt.qOrder = f.header.qOrder;
    opt.jetWeight = f.header.jetWeight;
    Setting s = make_setting(parse_type(f.header.type), opt);
    if (s.degrees() != f.header.degrees) throw std::runtime_error("expand: degrees in file do not match the setting");
    auto xs = make_good(s, select_basic(s));
    json out = json::array();
    for (size_t i = 0; i < f.blocks.size(); ++i) {
        auto e = expand(s, xs, f.blocks[i].jet, f.blocks[i].degree);
        out.push_back({{"invariant", i + 1}, {"degree", e.degree}, {"residual", num(e.residual)}, {"coeffs", xpoly(e.coeffs)}});
    }
    return {{"type", f.header.type}, {"expansions", std::move(out)}};
}

void print_text(const std::string& name, const json& j)
{
    if (name == "verify") {
        for (auto& r : j["checks"])
            std::cout << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["check"].get<std::string>() << "  "
                      << r["value"].get<std::string>() << " (tol " << r["tol"].get<std::string>() << ")"
                      << (r["detail"].get<std::string>().empty() ? "" : "  " + r["detail"].get<std::string>()) << "\n";
        std::cout << (j["ok"].get<bool>() ? "all checks passed" : "verification FAILED") << "\n";
        return;
    }
    std::cout << j.dump(2) << "\n";
}

// on-disk cache keyed by a hash of the configuration
std::optional<std::filesystem::path> cache_path(const std::string& key)
{
    const char* dir = std::getenv("ELLFROB_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    std::ostringstream os;
    os << std::hex << std::hash<std::string>{}(key);
    return std::filesystem::path(dir) / (os.str() + ".json");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Elliptic root systems, flat invariants and Frobenius structures"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto common = [&](CLI::App* sc) {
        sc->add_option("--type", cfg.type, "Cartan type, e.g. G2, D4 (or a letter with --rank)")->required();
        sc->add_option("--rank", cfg.rank, "rank when --type is a bare letter");
        sc->add_option("--r", cfg.r, "triplet signature parameter (rational)");
        sc->add_option("--q-order", cfg.qOrder, "q-expansion order N (>= 8)");
        sc->add_option("--jet-bound", cfg.jetBound, "weighted degree of stored jets (0: 3 d_n)");
        sc->add_option("--precision", cfg.precision, "mantissa bits (at most the compiled type)");
        sc->add_option("--tol", cfg.tol, "tolerance (> 0)");
        sc->add_option("--seed", cfg.seed, "random seed");
        sc->add_option("--out", cfg.out, "output path");
        sc->add_flag("--json", cfg.json, "emit JSON");
    };
    auto* describe = app.add_subcommand("describe", "root system and axioms");
    auto* coxeter = app.add_subcommand("coxeter", "hyperbolic Coxeter element, degrees, Jordan decomposition");
    auto* triplet = app.add_subcommand("triplet", "admissible triplet and regular point");
    auto* invariants = app.add_subcommand("invariants", "orbit sums and good basic invariants");
    auto* frobenius = app.add_subcommand("frobenius", "metric and structure constants");
    auto* verify = app.add_subcommand("verify", "full property suite");
    auto* expandc = app.add_subcommand("expand", "expand invariants from an exchange file in the good basis");
    for (auto* sc : {describe, coxeter, triplet, invariants, frobenius, verify}) common(sc);
    invariants->add_flag("--raw", cfg.raw, "emit orbit sums instead of good invariants");
    verify->add_flag("--no-stability", cfg.noStability, "skip the q-order + 5 rerun");
    expandc->add_option("--in", cfg.input, "invariant exchange file")->required();
    expandc->add_option("--tol", cfg.tol, "tolerance (> 0)");
    expandc->add_option("--out", cfg.out, "output path");
    expandc->add_flag("--json", cfg.json, "emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto* sc = app.get_subcommands().front();
    std::string name = sc->get_name();
    try {
        if (name != "expand") validate(cfg);
        else if (!(cfg.tol > 0)) throw ConfigError("--tol must be positive");
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        json result;
        std::string text;
        bool ok = true;
        std::string key = name + "|" + (name == "expand" ? cfg.input : config_json(cfg).dump()) + (cfg.raw ? "|raw" : "");
        auto cached = (name == "verify" || name == "expand") ? std::nullopt : cache_path(key);
        if (cached && std::filesystem::exists(*cached)) {
            std::ifstream in(*cached);
            json stored = json::parse(in);
            result = stored["result"];
            text = stored.value("text", "");
        } else {
            if (name == "describe") result = cmd_describe(cfg);
            else if (name == "coxeter") result = cmd_coxeter(cfg);
            else if (name == "triplet") result = cmd_triplet(cfg);
            else if (name == "invariants") result = cmd_invariants(cfg, text);
            else if (name == "frobenius") result = cmd_frobenius(cfg);
            else if (name == "verify") result = cmd_verify(cfg, ok);
            else result = cmd_expand(cfg);
            if (cached) {
                std::filesystem::create_directories(cached->parent_path());
                std::ofstream os(*cached);
                os << json{{"result", result}, {"text", text}}.dump();
            }
        }
        if (result.contains("ok") && result["ok"].is_boolean()) ok = ok && result["ok"].get<bool>();

        json doc = {{"schema", kSchema}, {"command", name}};
        if (name != "expand") doc["config"] = config_json(cfg);
        doc["result"] = result;

        if (!cfg.out.empty()) {
            std::ofstream os(cfg.out);
            if (!os) throw std::runtime_error("cannot write " + cfg.out);
            // invariants write the exchange format; everything else writes JSON
            if (!text.empty()) os << text;
            else os << doc.dump(2) << "\n";
        }
        if (cfg.json)
            std::cout << doc.dump(2) << "\n";
        else
            print_text(name, result);
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
