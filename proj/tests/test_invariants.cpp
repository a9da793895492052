#include "helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace ellfrob;
using namespace testing;

namespace {

// dominant weights Σ n_i ω_i with ⟨λ, θ^∨⟩ ≤ m, where ⟨ω_i, θ^∨⟩ = θ_i·|α_i|²/|θ|²
int oracle_alcove_count(const MarkedEllipticRootSystem& sys, int m)
{
    RVec th;
    for (long x : sys.highestRoot) th.push_back(Rational(x));
    Rational t2 = bilinear(sys.gramFin, th, th);
    std::vector<Rational> w;
    for (int i = 0; i < sys.l; ++i) w.push_back(th[static_cast<size_t>(i)] * sys.gramFin(i, i) / t2);
    int count = 0;
    std::vector<int> n(static_cast<size_t>(sys.l), 0);
    while (true) {
        Rational lv = 0;
        for (int i = 0; i < sys.l; ++i) lv += n[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
        if (lv <= m) ++count;
        size_t k = 0;
        while (k < n.size() && ++n[k] > m) n[k++] = 0;
        if (k == n.size()) break;
    }
    return count;
}

BasicInvariantSet with_top(const Setting& s, const BasicInvariantSet& xs, const InvPoly& inX, size_t alpha)
{
    BasicInvariantSet out = xs;
    out.x[alpha] = compose(xs, inX);
    out.jets[alpha] = poly_jet(xs, out.x[alpha], s.jetWeight);
    return out;
}

// ψ(x^α) lies in span{z^β : d_β = d_α}
Real psi_nonlinearity(const BasicInvariantSet& xs)
{
    Real worst = 0;
    for (size_t a = 0; a < xs.n(); ++a) {
        QJet p = psi(xs, unit_index(xs.n(), a));
        Real scale = std::max<Real>(1, weighted_norm(p));
        for (auto& [b, f] : p.terms())
            if (total_degree(b) >= 2) worst = std::max(worst, weighted_norm(f) / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("orbit of the zero weight is the constant 1")
{
    const auto& s = g2().s;
    auto f = orbit_theta(s, std::vector<int>(static_cast<size_t>(s.sys.l), 0), 0, 20);
    CHECK(f.size() == 1);
    for (const auto& p : sample_points(s, 3, 5)) CHECK(std::abs(f.eval(p) - Complex(1)) < 1e-15);
    QJet j = taylor_jet(s, f, 4);
    CHECK(distance(j, QJet::one(s.degrees(), 4)) < 1e-15);
}

TEST_CASE("A1 level-1 orbit sum: invariance and Euler degree")
{
    Setting s = make_setting(parse_type("A1"));
    for (std::vector<int> lam : {std::vector<int>{0}, std::vector<int>{1}}) {
        auto f = orbit_theta(s, lam, 1, 20);
        for (const auto& t : f.terms) CHECK(t.mu[s.sys.iLambda()] == 1);
        auto pts = sample_points(s, 5, 77);
        auto inv = invariance_check(s, f, pts);
        CHECK(inv.worstReflection < 1e-8);
        CHECK(inv.worstUnip < 1e-8);
        // direct evaluation of both sides under each generator
        for (const auto& g : weyl_generators(s.sys))
            for (const auto& p : pts) CHECK(std::abs(f.eval(act(g, p)) - f.eval(p)) < 1e-8 * std::max<Real>(1, std::abs(f.eval(p))));
    }
}

TEST_CASE("alcove counts against an independent enumeration")
{
    for (const char* t : {"A1", "A2", "B3", "C3", "D4", "G2", "F4"}) {
        CAPTURE(t);
        auto sys = build(parse_type(t));
        auto d = hyperbolic_coxeter(sys);
        CHECK(span_dimension(sys, d.degrees, 0) == 1);
        for (int m = 1; m <= std::max(3, d.dn); ++m) {
            CAPTURE(m);
            int oracle = oracle_alcove_count(sys, m);
            CHECK(static_cast<int>(alcove_weights(sys, m).size()) == oracle);
            CHECK(span_dimension(sys, d.degrees, m) == oracle);
            CHECK(monomial_count(d.degrees, m) == oracle);
        }
    }
    // D4 at level d_n: exactly one generator beyond products of lower ones
    auto sys = build(parse_type("D4"));
    auto d = hyperbolic_coxeter(sys);
    std::vector<int> lower(d.degrees.begin(), d.degrees.end() - 1);
    CHECK(monomial_count(d.degrees, d.dn) - monomial_count(lower, d.dn) == d.codim);
    CHECK(d.codim == 1);
}

TEST_CASE("orbit sums of G2 are invariant and the unipotent part acts by ζ^{-m}")
{
    const auto& fx = g2();
    auto pts = sample_points(fx.s, 5, 101);
    for (const auto& f : fx.raw.raw) {
        auto inv = invariance_check(fx.s, f, pts);
        CHECK(inv.worstReflection < 1e-8);
        CHECK(inv.worstUnip < 1e-8);
    }
}

TEST_CASE("Taylor jets: vanishing pattern and the z^n derivative")
{
    const auto& fx = g2();
    const auto& s = fx.s;
    for (size_t k = 0; k < fx.raw.raw.size(); ++k) {
        const QJet& j = fx.raw.rawJets[k];
        int m = fx.raw.raw[k].degree;
        Real scale = std::max<Real>(1, weighted_norm(j));
        for (auto& [b, f] : j.terms())
            if ((weight(b, s.degrees()) - m) % s.dn() != 0) CHECK(weighted_norm(f) / scale < 1e-10);
        CHECK(euler_jet_residual(s, j, m) < 1e-8);
    }
}

TEST_CASE("basic invariants of G2: count, restriction and Jacobian blocks")
{
    const auto& fx = g2();
    const auto& xs = fx.raw;
    const auto& d = fx.s.degrees();
    CHECK(xs.n() == static_cast<size_t>(fx.s.sys.l + 1));
    MultiIndex zero(xs.n(), 0);
    for (size_t a = 0; a < xs.n(); ++a)
        if (d[a] < fx.s.dn()) CHECK(weighted_norm(xs.jets[a].coeff(zero)) < 1e-10 * std::max<Real>(1, weighted_norm(xs.jets[a])));
    auto J = jacobian(xs);
    for (size_t a = 0; a < xs.n(); ++a)
        for (size_t b = 0; b < xs.n(); ++b)
            if (d[a] != d[b]) CHECK(weighted_norm(J[a][b]) < 1e-10 * std::max<Real>(1, weighted_norm(xs.jets[a])));
    // the Jacobian is a unit
    QMatrixS I(xs.n(), std::vector<QSeries>(xs.n()));
    for (size_t i = 0; i < xs.n(); ++i) I[i][i] = QSeries::constant(1);
    CHECK_NOTHROW(qsolve(J, I));
}

TEST_CASE("φ: unit, support and multiplicativity")
{
    const auto& fx = g2();
    const auto& xs = fx.raw;
    int W = 2 * fx.s.dn();
    CHECK(distance(phi(xs, MultiIndex(xs.n(), 0), W), QJet::one(xs.degrees, W)) == 0);
    for (auto& a : multi_indices(xs.degrees, W)) {
        QJet p = phi(xs, a, W);
        Real scale = std::max<Real>(1, weighted_norm(p));
        int da = weight(a, xs.degrees);
        for (auto& [b, f] : p.terms())
            if ((weight(b, xs.degrees) - da) % fx.s.dn() != 0) CHECK(weighted_norm(f) / scale < 1e-10);
    }
    MultiIndex a{1, 0, 0}, b{0, 1, 1};
    MultiIndex ab{1, 1, 1};
    QJet lhs = jet_product(phi(xs, a, W), phi(xs, b, W));
    QJet rhs = phi(xs, ab, W);
    CHECK(weighted_distance(lhs, rhs) / std::max<Real>(1, weighted_norm(rhs)) < 1e-12);
}

TEST_CASE("ψ: unit, grading and invertibility")
{
    const auto& fx = g2();
    const auto& xs = fx.raw;
    CHECK(distance(psi(xs, MultiIndex(xs.n(), 0)), QJet::one(xs.degrees, 0)) == 0);
    for (auto& a : multi_indices(xs.degrees, 2 * fx.s.dn())) {
        int da = weight(a, xs.degrees);
        QJet p = psi(xs, a);
        for (auto& [b, f] : p.terms()) CHECK(weight(b, xs.degrees) == da);
    }
    auto pm = psi_matrix(xs, xs.degrees[0]);
    QSeries det = qdet(pm.M);
    auto v = det.valuation(1e-10 * std::max<Real>(1, det.max_abs()));
    REQUIRE(v);
    CHECK(std::abs(det.coeff(*v)) > 1e-6);
    for (int m = 1; m <= 2 * fx.s.dn(); ++m) {
        auto p = psi_matrix(xs, m);
        QMatrixS I(p.rows.size(), std::vector<QSeries>(p.rows.size()));
        for (size_t i = 0; i < I.size(); ++i) I[i][i] = QSeries::constant(1);
        CHECK_NOTHROW(qsolve(p.M, I));
    }
}

TEST_CASE("good invariants of G2")
{
    const auto& fx = g2();
    const auto& xs = fx.good;
    CHECK(xs.good);
    CHECK(xs.compatible);
    auto rep = check_good(fx.s, xs);
    CHECK(rep.goodness < 1e-8);
    CHECK(rep.compatibility < 1e-8);
    CHECK(rep.deltaProperty < 1e-8);
    CHECK(rep.z0Property < 1e-8);
    CHECK(rep.psiIdentity < 1e-8);
    // ψ(x^α) = z^α, checked coefficient by coefficient
    for (size_t a = 0; a < xs.n(); ++a) {
        QJet p = psi(xs, unit_index(xs.n(), a));
        for (auto& [b, f] : p.terms()) {
            QSeries want = QSeries::constant(b == unit_index(xs.n(), a) ? 1 : 0);
            CHECK(weighted_distance(f, want) < 1e-8);
        }
    }
    // x^n restricted to the chart is −2π√−1/d_n
    MultiIndex zero(xs.n(), 0);
    Complex want = -kTwoPiI / Real(fx.s.dn());
    CHECK(weighted_distance(xs.jets.back().coeff(zero), QSeries::constant(want)) / std::abs(want) < 1e-8);
    // jets re-expand to single monomials
    for (auto& a : multi_indices(xs.degrees, 2 * fx.s.dn())) {
        if (total_degree(a) == 0) continue;
        int m = weight(a, xs.degrees);
        auto e = expand(fx.s, xs, monomial_jet(xs, a, fx.s.jetWeight), m);
        for (auto& [b, f] : e.coeffs) CHECK(weighted_distance(f, QSeries::constant(b == a ? 1 : 0)) < 1e-8);
    }
}

TEST_CASE("goodness at doubled truncation, recomputed from the jets")
{
    SettingOptions o;
    o.qOrder = 40;
    Setting s = make_setting(parse_type("G2"), o);
    auto xs = make_good(s, select_basic(s));
    Real worst = 0;
    for (size_t a = 0; a < xs.n(); ++a) {
        QJet piece = xs.jets[a].piece(xs.degrees[a]);
        Real scale = std::max<Real>(1, weighted_norm(piece));
        for (auto& b : multi_indices(xs.degrees, xs.degrees[a], true))
            if (total_degree(b) >= 2) worst = std::max(worst, weighted_norm(xs.jets[a].coeff(b)) / scale);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("goodness by ψ-linearity and by coefficient vanishing agree on recombinations")
{
    const auto& fx = g2();
    const auto& s = fx.s;
    const auto& xs = fx.good;
    size_t n = xs.n();
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int it = 0; it < 4; ++it) {
        Complex c(u(rng), u(rng));
        // same-degree linear recombination keeps goodness
        InvPoly lin{{unit_index(n, 0), QSeries::constant(1)}, {unit_index(n, 1), QSeries::constant(c)}};
        auto a = with_top(s, xs, lin, 0);
        // adding a product of lower invariants to x^n destroys it
        MultiIndex prod(n, 0);
        prod[0] = 1;
        prod[1] = 1;
        InvPoly nl{{unit_index(n, n - 1), QSeries::constant(1)}, {prod, QSeries::constant(c)}};
        auto b = with_top(s, xs, nl, n - 1);
        for (auto* set : {&a, &b}) {
            bool byPsi = psi_nonlinearity(*set) < 1e-8;
            bool byCoeff = check_good(s, *set).goodness < 1e-8;
            CHECK(byPsi == byCoeff);
        }
        CHECK(check_good(s, a).goodness < 1e-8);
        CHECK(check_good(s, b).goodness > 1e-3);
    }
}

TEST_CASE("exchange file round trip")
{
    const auto& fx = g2();
    std::vector<ExchangeBlock> blocks;
    for (size_t a = 0; a < fx.good.n(); ++a) blocks.push_back({fx.good.degrees[a], fx.good.jets[a]});
    std::stringstream ss;
    write_exchange(ss, exchange_header(fx.s, true), blocks);
    auto f = read_exchange(ss);
    CHECK(f.header.type == "G2");
    CHECK(f.header.degrees == fx.s.degrees());
    CHECK(f.header.good);
    REQUIRE(f.blocks.size() == blocks.size());
    for (size_t a = 0; a < blocks.size(); ++a) {
        CHECK(f.blocks[a].degree == blocks[a].degree);
        CHECK(distance(f.blocks[a].jet, blocks[a].jet) == 0);
    }
    std::stringstream bad("not an exchange file\n");
    CHECK_THROWS(read_exchange(bad));
}
