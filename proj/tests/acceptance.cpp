// Acceptance run: one PASS/FAIL line per criterion.
#include "ellfrob/suite.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace ellfrob;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
    void residual(const std::string& what, Real v, Real tol)
    {
        require(v < tol, what + " = " + fmt(v));
        worst = std::max(worst, v);
    }
    static std::string fmt(Real v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2e", static_cast<double>(v));
        return buf;
    }
    Real worst = 0;
};

// everything the tolerance-based criteria need for one type at one q-order
struct Pipeline {
    Setting s;
    BasicInvariantSet raw, good;
    FrobeniusTable table;
    bool goodOk = false;
    std::string goodError;
    double seconds = 0;
};

Pipeline run_pipeline(const char* type, int qOrder)
{
    auto t0 = Clock::now();
    Pipeline p;
    SettingOptions o;
    o.qOrder = qOrder;
    p.s = make_setting(parse_type(type), o);
    p.raw = select_basic(p.s);
    try {
        p.good = make_good(p.s, p.raw);
        p.goodOk = true;
        p.table = metric_and_constants(p.s, p.good, default_scaling(p.s));
    } catch (const std::exception& e) {
        p.goodError = e.what();
    }
    p.seconds = seconds_since(t0);
    return p;
}

const char* kExactTypes[] = {"A1", "G2", "D4", "F4"};
const char* kFrobTypes[] = {"G2", "D4"};

struct Exact {
    MarkedEllipticRootSystem sys;
    CoxeterData data;
};

std::map<std::string, Exact> exact_cache;

Exact& exact(const char* t)
{
    auto it = exact_cache.find(t);
    if (it != exact_cache.end()) return it->second;
    Exact e;
    e.sys = build(parse_type(t));
    e.data = hyperbolic_coxeter(e.sys);
    e.sys = with_degrees(e.sys, e.data);
    return exact_cache.emplace(t, std::move(e)).first->second;
}

void criterion1(Outcome& o)
{
    for (const char* t : kExactTypes) {
        auto t0 = Clock::now();
        auto sys = build(parse_type(t));
        auto ax = axioms_check(sys);
        auto rad = kernel(sys.gram);
        bool radA = rad.size() == 1;
        if (radA)
            for (size_t i = 0; i < sys.dim(); ++i)
                if ((i == sys.ia()) != (sgn(rad[0][i]) != 0)) radA = false;
        double sec = seconds_since(t0);
        o.require(ax.fullLattice && ax.integrality && ax.reflectionClosed && ax.irreducible, std::string(t) + " axioms");
        o.require(signature(sys.gram) == Signature{sys.n, 1, 1}, std::string(t) + " signature");
        o.require(radA, std::string(t) + " radical");
        o.require(sec < 1.0, std::string(t) + " runtime " + std::to_string(sec) + " s");
    }
}

void criterion2(Outcome& o)
{
    for (const char* t : kExactTypes) {
        auto t0 = Clock::now();
        exact_cache.erase(t);
        auto& e = exact(t);
        double sec = seconds_since(t0);
        auto es = eigen_structure_check(e.sys, e.data.cF, e.data.dn);
        o.require(es.ok(), std::string(t) + " semisimple of order d_n");
        o.require(es.degrees == e.data.degrees, std::string(t) + " eigenvalue multiset");
        int ones = es.eigenMultiplicity.empty() ? 0 : es.eigenMultiplicity[0];
        o.require(ones == e.data.codim + 1, std::string(t) + " one extra eigenvalue 1");
        o.require(root_avoidance_check(e.sys, e.data), std::string(t) + " roots avoid the image");
        o.require(lambda_shift_check(e.sys, e.data), std::string(t) + " membership and K_Z generator");
        o.require(abs(e.data.kzShift) == 1, std::string(t) + " c^{d_n} shift");
        if (std::string(t) == "D4") o.require(sec < 10.0, "D4 runtime " + std::to_string(sec) + " s");
    }
}

void criterion3(Outcome& o)
{
    for (const char* t : kExactTypes) {
        auto& e = exact(t);
        const QMatrix& c = e.data.c.matrix();
        o.require(e.data.ss.matrix() * e.data.unip.matrix() == c, std::string(t) + " ss·unip");
        o.require(e.data.unip.matrix() * e.data.ss.matrix() == c, std::string(t) + " unip·ss");
        o.require(abs(e.data.unipShift * e.data.dn) == 1, std::string(t) + " d_n·s");
        int dn = e.data.dn;
        CMatrix ss = embed(e.data.ss.matrix(), dn);
        std::vector<int> want(static_cast<size_t>(dn), 0);
        for (int d : e.data.degrees) ++want[static_cast<size_t>((d * e.data.zetaExponent) % dn)];
        want[0] += 2;
        for (int k = 0; k < dn; ++k)
            o.require(static_cast<int>(eigenspace(ss, Cyclotomic::zeta_power(dn, k)).size()) == want[static_cast<size_t>(k)],
                      std::string(t) + " ss eigenvalue ζ^" + std::to_string(k));
    }
}

void criterion4(Outcome& o)
{
    for (const char* t : kExactTypes) {
        auto& e = exact(t);
        auto z = regular_point(e.sys, e.data, 1);
        for (int r : {-1, 0, 1}) {
            auto tr = build_L(e.sys, e.data, z, Rational(r));
            int n = e.sys.n;
            Signature want = r > 0 ? Signature{n, 0, 0} : r == 0 ? Signature{n - 1, 1, 0} : Signature{n - 1, 0, 1};
            std::string tag = std::string(t) + " r=" + std::to_string(r);
            o.require(check_admissible(e.sys, tr).ok(), tag + " admissible");
            o.require(tr.signature == want, tag + " signature " + tr.signature.str());
            o.require(!root_in_subspace(e.sys, tr.L), tag + " L ∩ R");
        }
    }
}

void criterion5(Outcome& o)
{
    for (const char* t : {"A1", "G2", "D4"}) {
        auto& e = exact(t);
        for (int m = 1; m <= std::max(3, e.data.dn); ++m) {
            int alc = static_cast<int>(alcove_weights(e.sys, m).size());
            o.require(alc == monomial_count(e.data.degrees, m), std::string(t) + " level " + std::to_string(m));
        }
    }
}

void criterion6(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& p = P.at(t);
        auto pts = sample_points(p.s, 5, 1001);
        for (const auto& f : p.raw.raw) {
            auto inv = invariance_check(p.s, f, pts);
            o.residual(std::string(t) + " reflections", inv.worstReflection, 1e-8);
            o.residual(std::string(t) + " unipotent", inv.worstUnip, 1e-8);
        }
    }
}

void criterion7(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& p = P.at(t);
        o.require(p.goodOk, std::string(t) + " good invariants: " + p.goodError);
        if (!p.goodOk) continue;
        for (int m = 1; m <= 2 * p.s.dn(); ++m) {
            bool inv = true;
            try {
                auto pm = psi_matrix(p.good, m);
                QMatrixS I(pm.rows.size(), std::vector<QSeries>(pm.rows.size()));
                for (size_t i = 0; i < I.size(); ++i) I[i][i] = QSeries::constant(1);
                qsolve(pm.M, I);
            } catch (const std::exception&) {
                inv = false;
            }
            o.require(inv, std::string(t) + " ψ degree " + std::to_string(m));
        }
        auto gr = check_good(p.s, p.good);
        o.residual(std::string(t) + " goodness", gr.goodness, 1e-8);
        o.residual(std::string(t) + " compatibility", gr.compatibility, 1e-8);
        o.residual(std::string(t) + " δ-property", gr.deltaProperty, 1e-8);
        o.residual(std::string(t) + " z^0-property", gr.z0Property, 1e-8);
    }
}

void criterion8(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& p = P.at(t);
        if (!p.goodOk) {
            o.require(false, std::string(t) + " no good invariants");
            continue;
        }
        MultiIndex zero(p.good.n(), 0);
        Complex want = -kTwoPiI / Real(p.s.dn());
        o.residual(std::string(t) + " x^n restriction",
                   weighted_distance(p.good.jets.back().coeff(zero), QSeries::constant(want)) / std::abs(want), 1e-8);
        auto fl = flatness_equivalences(p.s, p.good, &p.table);
        o.require(fl.agree() && fl.holds[0] && fl.holds[1] && fl.holds[2] && fl.holds[3], std::string(t) + " flatness");
    }
}

void criterion9(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& p = P.at(t);
        if (!p.goodOk) {
            o.require(false, std::string(t) + " no good invariants");
            continue;
        }
        auto t0 = Clock::now();
        Real worst = 0;
        for (int a = 0; a <= p.s.n(); ++a)
            for (int b = 0; b <= p.s.n(); ++b) {
                auto e = expand(p.s, p.good, intersection_jet(p.s, p.good, a, b), degree_of(p.s, a) + degree_of(p.s, b));
                worst = std::max(worst, expansion_distance(e.coeffs, intersection_taylor_formula(p.s, p.good, a, b).coeffs));
            }
        o.residual(std::string(t) + " identity", worst, 1e-7);
        double sec = seconds_since(t0) + p.seconds;
        o.require(sec < 600, std::string(t) + " runtime " + std::to_string(sec) + " s");
    }
}

void criterion10(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& p = P.at(t);
        if (!p.goodOk) {
            o.require(false, std::string(t) + " no good invariants");
            continue;
        }
        auto pts = chart_samples(p.s, 5, 2002);
        auto fr = verify_frobenius(p.s, p.table, pts);
        o.residual(std::string(t) + " metric", fr.metricAntiDiagonal, 1e-8);
        for (auto& [k, v] : fr.items())
            if (k != "metric_antidiagonal") o.residual(std::string(t) + " " + k, v, 1e-7);
        o.residual(std::string(t) + " scaled structure", verify_frobenius(p.s, rescaled(p.table, 2), pts).worst(), 1e-7);
    }
}

void criterion11(Outcome& o, std::map<std::string, Pipeline>& P)
{
    for (const char* t : kFrobTypes) {
        const auto& a = P.at(t);
        auto b = run_pipeline(t, a.s.qOrder + 5);
        if (!a.goodOk || !b.goodOk) {
            o.require(false, std::string(t) + " no good invariants");
            continue;
        }
        auto st = compare_truncations(a.s, a.good, &a.table, b.s, b.good, &b.table);
        o.residual(std::string(t) + " invariant jets", st.goodJets, 1e-8);
        o.residual(std::string(t) + " restriction", st.restriction, 1e-8);
        o.residual(std::string(t) + " structure constants", st.structureConstants, 1e-8);
        o.residual(std::string(t) + " metric", st.metric, 1e-8);
        // expansions of the intersection form, relative to the largest expansion
        Real scale = 1, drift = 0;
        size_t N = a.table.cI.size();
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) scale = std::max(scale, xpoly_norm(a.table.cI[i][j]));
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) drift = std::max(drift, expansion_difference(a.table.cI[i][j], b.table.cI[i][j]) / scale);
        o.residual(std::string(t) + " intersection expansions", drift, 1e-7);
    }
}

}  // namespace

int main()
{
    std::map<std::string, Pipeline> P;
    struct Row {
        int id;
        const char* name;
        std::function<void(Outcome&)> run;
    };
    auto needP = [&] {
        if (P.empty())
            for (const char* t : kFrobTypes) P.emplace(t, run_pipeline(t, 20));
    };
    std::vector<Row> rows = {
        {1, "exact axioms, signature (n,1,1), radical span(a) for A1 G2 D4 F4", criterion1},
        {2, "hyperbolic Coxeter element: eigenvalues, root avoidance, Λ0 shift", criterion2},
        {3, "Jordan decomposition and ss eigenvalues over the cyclotomic field", criterion3},
        {4, "admissible triplets for r = -1, 0, 1", criterion4},
        {5, "alcove counts equal monomial counts for A1 G2 D4", criterion5},
        {6, "W-invariance and unipotent action (G2, D4)", [&](Outcome& o) { needP(); criterion6(o, P); }},
        {7, "ψ invertible and good invariants (G2, D4)", [&](Outcome& o) { needP(); criterion7(o, P); }},
        {8, "x^n restriction and flatness conditions (G2, D4)", [&](Outcome& o) { needP(); criterion8(o, P); }},
        {9, "intersection form equals the closed-form expansion (G2, D4)", [&](Outcome& o) { needP(); criterion9(o, P); }},
        {10, "Frobenius axioms and scaling covariance (G2, D4)", [&](Outcome& o) { needP(); criterion10(o, P); }},
        {11, "stability between q-orders 20 and 25 (G2, D4)", [&](Outcome& o) { needP(); criterion11(o, P); }},
    };
    int failed = 0;
    for (auto& r : rows) {
        Outcome o;
        auto t0 = Clock::now();
        try {
            r.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double sec = seconds_since(t0);
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name;
        if (o.worst > 0) std::cout << " (worst residual " << Outcome::fmt(o.worst) << ")";
        std::cout << " [" << Outcome::fmt(sec) << " s]" << o.detail.str() << std::endl;
    }
    return failed ? 1 : 0;
}
