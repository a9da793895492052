#include "ellfrob/suite.hpp"

#include <algorithm>
#include <sstream>

namespace ellfrob {

bool SuiteReport::ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void SuiteReport::add(std::string name, Real value, Real tol, std::string detail)
{
    checks.push_back({std::move(name), value, tol, value < tol, std::move(detail)});
}

void SuiteReport::exact(std::string name, bool pass, std::string detail)
{
    checks.push_back({std::move(name), pass ? Real(0) : Real(1), Real(1), pass, std::move(detail)});
}

namespace {

Real jet_drift(const QJet& a, const QJet& b)
{
    Real scale = std::max({weighted_norm(a), weighted_norm(b), Real(1e-300)});
    return weighted_distance(a, b) / scale;
}

}  // namespace

StabilityReport compare_truncations(const Setting& a, const BasicInvariantSet& xa, const FrobeniusTable* ta,
                                    const Setting& b, const BasicInvariantSet& xb, const FrobeniusTable* tb)
{
    (void)a;
    (void)b;
    StabilityReport r;
    MultiIndex zero(xa.n(), 0);
    for (size_t k = 0; k < xa.n(); ++k) {
        r.goodJets = std::max(r.goodJets, jet_drift(xa.jets[k], xb.jets[k]));
        QSeries fa = xa.jets[k].coeff(zero), fb = xb.jets[k].coeff(zero);
        Real sc = std::max({weighted_norm(fa), weighted_norm(fb), Real(1)});
        r.restriction = std::max(r.restriction, weighted_distance(fa, fb) / sc);
    }
    if (ta && tb) {
        // relative to the whole table: entries that vanish identically carry only roundoff
        size_t N = ta->C.size();
        Real scale = 1;
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j)
                for (size_t k = 0; k < N; ++k)
                    scale = std::max({scale, xpoly_norm(ta->C[i][j][k]), xpoly_norm(tb->C[i][j][k])});
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) {
                r.metric = std::max(r.metric, std::abs(ta->gLower[i][j] - tb->gLower[i][j]));
                for (size_t k = 0; k < N; ++k)
                    r.structureConstants =
                        std::max(r.structureConstants, expansion_difference(ta->C[i][j][k], tb->C[i][j][k]) / scale);
            }
    }
    return r;
}

SuiteReport verify_suite(const CartanType& type, const SuiteOptions& opt)
{
    SuiteReport rep;
    Real tol = opt.setting.tol;
    Real tolFrob = std::max<Real>(tol, 1e-7);

    auto sys = build(type);
    auto ax = axioms_check(sys);
    std::ostringstream ad;
    for (auto& v : ax.violations) ad << v << "; ";
    rep.exact("root system axioms", ax.ok(), ax.ok() ? "signature " + ax.signature.str() : ad.str());

    auto data = hyperbolic_coxeter(sys);
    sys = with_degrees(sys, data);
    rep.exact("hyperbolic Coxeter element: semisimple of order d_n on F",
              eigen_structure_check(sys, data.cF, data.dn).ok());
    rep.exact("roots avoid the image of c̃ − id", root_avoidance_check(sys, data));
    rep.exact("Λ0 shift and K_ℤ generator", lambda_shift_check(sys, data));
    const QMatrix& c = data.c.matrix();
    bool jordanOk = data.ss.matrix() * data.unip.matrix() == c && data.unip.matrix() * data.ss.matrix() == c &&
                    abs(data.unipShift * data.dn) == 1;
    rep.exact("Jordan decomposition c̃ = ss·unip, d_n·s = ±1", jordanOk, "s = " + to_string(data.unipShift));

    auto z = regular_point(sys, data, opt.setting.seed);
    for (int r : {-1, 0, 1}) {
        auto t = build_L(sys, data, z, Rational(r));
        auto adm = check_admissible(sys, t);
        SignatureType want = r < 0 ? SignatureType::Negative : r == 0 ? SignatureType::Zero : SignatureType::Positive;
        rep.exact("admissible triplet r = " + std::to_string(r), adm.ok() && t.sigType == want,
                  adm.ok() ? "signature " + t.signature.str() : adm.failures());
    }

    for (int m = 1; m <= std::max(3, data.dn); ++m) {
        bool eq = true;
        std::string why;
        try {
            span_dimension(sys, data.degrees, m);
        } catch (const std::exception& e) {
            eq = false;
            why = e.what();
        }
        rep.exact("alcove count = monomial count at level " + std::to_string(m), eq, why);
    }

    Setting s = make_setting(type, opt.setting);
    auto raw = select_basic(s);
    auto pts = sample_points(s, opt.samples, opt.setting.seed + 100);
    Real worstRefl = 0, worstUnip = 0;
    for (const auto& f : raw.raw) {
        auto inv = invariance_check(s, f, pts);
        worstRefl = std::max(worstRefl, inv.worstReflection);
        worstUnip = std::max(worstUnip, inv.worstUnip);
    }
    rep.add("W-invariance of orbit sums", worstRefl, tol);
    rep.add("unipotent part acts by ζ^{-m}", worstUnip, tol);

    BasicInvariantSet xs;
    try {
        xs = make_good(s, raw);
    } catch (const std::exception& e) {
        rep.exact("good basic invariants", false, e.what());
        return rep;
    }
    for (int m = 1; m <= 2 * s.dn(); ++m) {
        bool inv = true;
        try {
            auto pm = psi_matrix(xs, m);
            QMatrixS I(pm.rows.size(), std::vector<QSeries>(pm.rows.size()));
            for (size_t i = 0; i < I.size(); ++i) I[i][i] = QSeries::constant(1);
            qsolve(pm.M, I);
        } catch (const std::exception&) {
            inv = false;
        }
        rep.exact("ψ invertible in degree " + std::to_string(m), inv);
    }
    auto gr = check_good(s, xs);
    rep.add("goodness", gr.goodness, tol);
    rep.add("compatibility (unit Jacobian)", gr.compatibility, tol);
    rep.add("δ-property", gr.deltaProperty, tol);
    rep.add("z^0-property", gr.z0Property, tol);
    rep.add("ψ(x^α) = z^α", gr.psiIdentity, tol);

    if (data.codim != 1 || !s.triplet.dualNormalized) {
        rep.checks.push_back({"Frobenius structure", 0, 1, true, "skipped: needs codimension 1 and r = 0"});
        return rep;
    }

    int n = s.n();
    MultiIndex zero(static_cast<size_t>(n), 0);
    QSeries top = xs.jets[static_cast<size_t>(n - 1)].coeff(zero);
    Complex want = -kTwoPiI / Real(s.dn());
    rep.add("x^n on L^⊥ = −2π√−1/d_n", weighted_distance(top, QSeries::constant(want)) / std::abs(want), tol);

    auto table = metric_and_constants(s, xs, default_scaling(s));
    auto flat = flatness_equivalences(s, xs, &table);
    rep.exact("flatness conditions hold and agree", flat.agree() && flat.holds[0]);
    rep.add("ψ is an isometry onto (L, Ĩ)", flat.isometry, tol);
    auto pflat = flatness_equivalences(s, perturb_top(xs));
    rep.exact("perturbed x^n: flatness conditions fail together", pflat.agree() && !pflat.holds[0]);

    Real fit = 0, ident = 0, pointwise = 0;
    std::vector<PointEval> pes;
    for (auto& p : pts) pes.push_back(evaluate_generators(s, xs, p));
    for (int a = 0; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
            auto e = expand(s, xs, intersection_jet(s, xs, a, b), degree_of(s, a) + degree_of(s, b));
            fit = std::max(fit, e.residual);
            ident = std::max(ident, expansion_distance(e.coeffs, intersection_taylor_formula(s, xs, a, b).coeffs));
            for (auto& pe : pes) {
                Complex v = intersection_at(s, xs, pe, a, b);
                pointwise = std::max(pointwise, std::abs(v - xpoly_eval_at(s, xs, e.coeffs, pe)) / std::max<Real>(1, std::abs(v)));
            }
        }
    rep.add("expansion fit residual", fit, tol);
    rep.add("expansion reproduces Ĩ(dx^α, dx^β) at sample points", pointwise, tol);
    rep.add("intersection form = closed-form Taylor expansion", ident, tolFrob);

    auto cpts = chart_samples(s, opt.samples, opt.setting.seed + 200);
    auto fr = verify_frobenius(s, table, cpts);
    rep.add("g_{αβ} = δ_{α+β,n}", fr.metricAntiDiagonal, tol);
    rep.add("g^{αβ} constant", fr.metricConstant, tol);
    for (auto& [k, v] : fr.items()) {
        if (k == "metric_antidiagonal" || k == "metric_constant") continue;
        rep.add("Frobenius " + k, v, tolFrob);
    }
    auto fr2 = verify_frobenius(s, rescaled(table, 2), cpts);
    rep.add("scaled structure (C/2, 2e, g/2) for the same intersection form", fr2.worst(), tolFrob);
    auto t2 = metric_and_constants(s, xs, Real(2) * default_scaling(s));
    Real dC = 0, dg = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) {
            dg = std::max(dg, std::abs(t2.gLower[a][b] - table.gLower[a][b] / Real(2)));
            for (int g = 0; g <= n; ++g) dC = std::max(dC, expansion_distance(t2.C[a][b][g], table.C[a][b][g]));
        }
    rep.add("rebuild at 2c gives (C, e, g/2)", std::max(dC, dg), tol);

    if (opt.stability) {
        SettingOptions o2 = opt.setting;
        o2.qOrder += 5;
        Setting s2 = make_setting(type, o2);
        auto xs2 = make_good(s2, select_basic(s2));
        auto t2b = metric_and_constants(s2, xs2, default_scaling(s2));
        auto st = compare_truncations(s, xs, &table, s2, xs2, &t2b);
        rep.add("q-order " + std::to_string(s.qOrder) + " vs " + std::to_string(s2.qOrder) + " drift", st.worst(), tol);
    }
    return rep;
}

}  // namespace ellfrob
