#include "helpers.hpp"

#include <doctest.h>

using namespace ellfrob;
using namespace testing;

namespace {

struct Base {
    MarkedEllipticRootSystem sys;
    CoxeterData data;
    RegularPoint z;
};

Base base(const char* t, std::uint64_t seed = 1)
{
    Base b;
    b.sys = build(parse_type(t));
    b.data = hyperbolic_coxeter(b.sys);
    b.sys = with_degrees(b.sys, b.data);
    b.z = regular_point(b.sys, b.data, seed);
    return b;
}

}  // namespace

TEST_CASE("regular point: normalization and non-vanishing on roots")
{
    for (const char* t : {"A1", "B3", "D4", "G2", "F4"}) {
        for (std::uint64_t seed : {1u, 7u, 42u}) {
            CAPTURE(t);
            CAPTURE(seed);
            auto b = base(t, seed);
            CHECK(b.z.pairing(b.sys, b.data, b.sys.basis_vector(b.sys.ia())) == std::pair<Rational, Rational>{1, 0});
            CHECK(b.z.pairing(b.sys, b.data, b.sys.basis_vector(b.sys.idelta())) ==
                  std::pair<Rational, Rational>{0, 1});
            CHECK(is_regular(b.sys, b.data, b.z));
            // every translate α + m·a + k·δ pairs to −2π√−1((p + m) + (q + k)τ) ≠ 0
            for (const auto& r : b.sys.finiteRoots) {
                auto [p, q] = b.z.pairing(b.sys, b.data, b.sys.embed(r));
                CHECK_FALSE((p.get_den() == 1 && q.get_den() == 1));
            }
            // z is orthogonal to the image of c − id
            for (const auto& f : b.data.Fne1) CHECK(b.z.pairing(b.sys, b.data, f) == std::pair<Rational, Rational>{0, 0});
        }
    }
}

TEST_CASE("regular point is deterministic in the seed")
{
    auto a = base("G2", 5), b = base("G2", 5);
    CHECK(a.z.u == b.z.u);
    CHECK(a.z.v == b.z.v);
}

TEST_CASE("admissible triplets for r = −1, 0, 1")
{
    for (const char* t : {"A1", "A2", "B3", "C3", "D4", "G2", "F4"}) {
        CAPTURE(t);
        auto b = base(t);
        for (int r : {-1, 0, 1}) {
            CAPTURE(r);
            auto tr = build_L(b.sys, b.data, b.z, Rational(r));
            CHECK(tr.admissibility.ok());
            CHECK(tr.admissibility.splitting);
            CHECK(tr.admissibility.rootFree);
            CHECK(tr.admissibility.eigenvalues);
            CHECK_FALSE(root_in_subspace(b.sys, tr.L));
            int n = b.sys.n;
            Signature want = r > 0 ? Signature{n, 0, 0} : r == 0 ? Signature{n - 1, 1, 0} : Signature{n - 1, 0, 1};
            CHECK(tr.signature == want);
            CHECK(tr.sigType == (r > 0 ? SignatureType::Positive : r == 0 ? SignatureType::Zero : SignatureType::Negative));
            CHECK(b.sys.form(tr.lambdaR, tr.lambdaR) == r);
            // F̃ = L ⊕ rad Ĩ
            std::vector<RVec> all = tr.L;
            all.push_back(b.sys.basis_vector(b.sys.ia()));
            all.push_back(b.sys.basis_vector(b.sys.idelta()));
            CHECK(span_rank(all) == b.sys.dim());
            // eigenvectors: g z^α = ζ^{d_α} z^α exactly
            CMatrix g = embed(tr.g.matrix(), tr.dn);
            for (size_t k = 0; k < tr.zExact.size(); ++k) {
                auto lhs = g * tr.zExact[k];
                Cyclotomic ev = tr.zeta_power(tr.degrees[k]);
                for (size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == ev * tr.zExact[k][i]);
            }
            auto rep = check_admissible(b.sys, tr);
            CHECK(rep.ok());
        }
    }
}

TEST_CASE("the positive part plus its orthogonal complement fills the space")
{
    for (const char* t : {"B3", "D4", "G2"}) {
        auto b = base(t);
        auto tr = build_L(b.sys, b.data, b.z, Rational(0));
        std::vector<RVec> pos(tr.L.begin(), tr.L.begin() + static_cast<long>(tr.nFne1 + tr.nL0));
        QMatrix rows(pos.size(), b.sys.dim());
        for (size_t i = 0; i < pos.size(); ++i)
            for (size_t j = 0; j < b.sys.dim(); ++j) rows(i, j) = (b.sys.gram * pos[i])[j];
        auto perp = kernel(rows);
        std::vector<RVec> all = pos;
        all.insert(all.end(), perp.begin(), perp.end());
        CHECK(span_rank(all) == b.sys.dim());
    }
}

TEST_CASE("admissibility detects a subspace containing a root")
{
    auto b = base("G2");
    auto tr = build_L(b.sys, b.data, b.z, Rational(0));
    auto bad = tr;
    bad.L[0] = b.sys.basis_vector(0);
    bad.split = make_splitting(b.sys, bad.L);
    auto rep = check_admissible(b.sys, bad);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.rootFree);
}

TEST_CASE("dual normalization in codimension one")
{
    for (const char* t : {"G2", "D4", "F4"}) {
        CAPTURE(t);
        auto b = base(t);
        auto tr = dual_normalize(b.sys, b.data, build_L(b.sys, b.data, b.z, Rational(0)));
        CHECK(tr.dualNormalized);
        int n = tr.n();
        auto G = z_gram(b.sys, tr);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) CHECK(std::abs(G[i][j] - Complex(i + j == n ? 1 : 0)) < 1e-12);
        for (int a = 1; a < n; ++a) CHECK(tr.degrees[a - 1] + tr.degrees[n - a - 1] == tr.dn);
        // g fixes z^n: eigenvalue 1 on the orthogonal complement of L ∩ F
        const CVec& zn = tr.z[static_cast<size_t>(n - 1)];
        CVec gz(zn.size(), 0);
        for (size_t i = 0; i < zn.size(); ++i)
            for (size_t j = 0; j < zn.size(); ++j) gz[i] += to_real(tr.g.matrix()(i, j)) * zn[j];
        for (size_t i = 0; i < zn.size(); ++i) CHECK(std::abs(gz[i] - zn[i]) < 1e-12);
        // the other z^α are eigenvectors with eigenvalue ζ^{d_α}
        for (int a = 0; a + 1 < n; ++a) {
            Complex ev = to_complex(tr.zeta_power(tr.degrees[static_cast<size_t>(a)]));
            const CVec& v = tr.z[static_cast<size_t>(a)];
            for (size_t i = 0; i < v.size(); ++i) {
                Complex s = 0;
                for (size_t j = 0; j < v.size(); ++j) s += to_real(tr.g.matrix()(i, j)) * v[j];
                CHECK(std::abs(s - ev * v[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("dual normalization preconditions")
{
    auto g2 = base("G2");
    CHECK_THROWS(dual_normalize(g2.sys, g2.data, build_L(g2.sys, g2.data, g2.z, Rational(1))));
    auto a2 = base("A2");
    CHECK_THROWS(dual_normalize(a2.sys, a2.data, build_L(a2.sys, a2.data, a2.z, Rational(0))));
}

TEST_CASE("chart of the orthogonal complement of L")
{
    for (const char* t : {"G2", "D4"}) {
        auto b = base(t);
        auto tr = dual_normalize(b.sys, b.data, build_L(b.sys, b.data, b.z, Rational(0)));
        auto chart = lperp_chart(b.sys, tr);
        CHECK(chart.g_fixes_exactly());
        for (Complex tau : {Complex(0.1, 0.7), Complex(-0.3, 1.2), Complex(0.45, 0.5)}) {
            YPoint x = chart.point(tau);
            for (const auto& z : tr.z) CHECK(std::abs(x.pair(z)) < 1e-12);
            CHECK(std::abs(x.pair(b.sys.basis_vector(b.sys.idelta())) / (-kTwoPiI) - tau) < 1e-12);
            CHECK(std::abs(x.pair(b.sys.basis_vector(b.sys.ia())) + kTwoPiI) < 1e-12);
            // g·x = x
            YPoint gx = act(tr.g.matrix(), x);
            for (size_t i = 0; i < b.sys.dim(); ++i) CHECK(std::abs(gx.values[i] - x.values[i]) < 1e-10);
            CHECK(chart.regular_at(tau));
        }
    }
}
