#include "helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace ellfrob;
using namespace testing;

namespace {

QSeries random_series(std::mt19937_64& rng, int N, bool unit)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Complex> c;
    for (int k = 0; k <= N; ++k) c.push_back({u(rng), u(rng)});
    if (unit) c[0] = Complex(2 + u(rng), u(rng));
    return QSeries::from_grid(Rational(0), 1, c, Rational(N + 1));
}

// Σ c_k q^{e_k} summed directly from the stored grid
Complex direct_eval(const QSeries& f, Complex tau)
{
    Complex s = 0;
    for (size_t k = 0; k < f.coeffs().size(); ++k)
        s += f.coeffs()[k] * std::exp(Complex(0, 2 * kPi) * tau * Real(f.exponent(k).get_d()));
    return s;
}

QJet random_jet(std::mt19937_64& rng, const std::vector<int>& w, int W)
{
    QJet j(w, W);
    for (auto& b : multi_indices(w, W)) j.set(b, random_series(rng, 6, false));
    return j;
}

}  // namespace

TEST_CASE("geometric series times (1 − q) is 1 to the truncation order")
{
    const int N = 20;
    QSeries geo = QSeries::from_grid(Rational(0), 1, std::vector<Complex>(N + 1, 1), Rational(N + 1));
    QSeries oneMinusQ = QSeries::from_terms({{Rational(0), 1}, {Rational(1), -1}}, std::nullopt);
    QSeries p = geo * oneMinusQ;
    CHECK(*p.precision() == N + 1);
    CHECK(distance(p, QSeries::constant(1)) < 1e-15);
    CHECK(p.order() == N + 1);
}

TEST_CASE("truncation: result precision is the minimum")
{
    QSeries a = QSeries::from_grid(Rational(0), 1, {1, 1, 1}, Rational(3));
    QSeries b = QSeries::from_grid(Rational(0), 1, {1, 2, 3, 4, 5, 6}, Rational(6));
    CHECK(*(a + b).precision() == 3);
    CHECK(*(a * b).precision() == 3);
    // q^{1/2} shifts the product precision
    QSeries h = QSeries::monomial(1, make_rational(1, 2));
    CHECK(*(a * h).precision() == make_rational(7, 2));
    CHECK((a * h).lead() == make_rational(1, 2));
}

TEST_CASE("mixed exponent grids align")
{
    QSeries a = QSeries::from_terms({{make_rational(1, 3), 1}, {make_rational(4, 3), 2}}, Rational(5));
    QSeries b = QSeries::from_terms({{make_rational(1, 2), 3}}, Rational(5));
    QSeries s = a + b;
    CHECK(s.coeff(make_rational(1, 3)) == Complex(1));
    CHECK(s.coeff(make_rational(1, 2)) == Complex(3));
    CHECK(s.coeff(make_rational(4, 3)) == Complex(2));
    Complex tau(0.2, 0.9);
    CHECK(std::abs(s.eval(tau) - a.eval(tau) - b.eval(tau)) < 1e-15);
}

TEST_CASE("inverse is multiplicative")
{
    std::mt19937_64 rng(31);
    for (int it = 0; it < 10; ++it) {
        QSeries f = random_series(rng, 20, true), g = random_series(rng, 20, true);
        QSeries lhs = (f * g).inverse(1e-12);
        QSeries rhs = f.inverse(1e-12) * g.inverse(1e-12);
        CHECK(weighted_distance(lhs, rhs) < 1e-12);
        CHECK(weighted_distance(f * f.inverse(1e-12), QSeries::constant(1)) < 1e-12);
    }
    CHECK_THROWS_AS(QSeries::zero(Rational(5)).inverse(1e-12), NonUnitPivot);
}

TEST_CASE("inverse of a series with positive valuation has a negative leading exponent")
{
    QSeries f = QSeries::from_terms({{Rational(2), 1}, {Rational(3), 1}}, Rational(12));
    QSeries g = f.inverse(1e-12);
    CHECK(g.lead() == -2);
    CHECK(weighted_distance(f * g, QSeries::constant(1)) < 1e-14);
}

TEST_CASE("q-derivative")
{
    QSeries f = QSeries::from_terms({{Rational(0), 5}, {make_rational(3, 2), 2}}, Rational(4));
    QSeries d = f.q_derivative();
    CHECK(d.coeff(Rational(0)) == Complex(0));
    CHECK(std::abs(d.coeff(make_rational(3, 2)) - Complex(3)) < 1e-15);
}

TEST_CASE("random 3×3 unit-pivot system solved to 1e−10 at order 20")
{
    std::mt19937_64 rng(32);
    const int N = 20;
    for (int it = 0; it < 5; ++it) {
        QMatrixS M(3, std::vector<QSeries>(3));
        std::vector<QSeries> v(3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) M[i][j] = random_series(rng, N, i == j);
            v[i] = random_series(rng, N, false);
        }
        // diagonal dominance of the constant terms keeps every pivot a unit
        for (int i = 0; i < 3; ++i) M[i][i] = M[i][i] + QSeries::constant(6);
        auto x = qsolve(M, v);
        for (Complex tau : {Complex(0.1, 1.0), Complex(-0.2, 0.8), Complex(0.4, 1.3), Complex(0, 0.9), Complex(0.3, 1.1)}) {
            for (int i = 0; i < 3; ++i) {
                Complex lhs = 0;
                for (int j = 0; j < 3; ++j) lhs += direct_eval(M[i][j], tau) * direct_eval(x[j], tau);
                CHECK(std::abs(lhs - direct_eval(v[i], tau)) < 1e-10);
            }
        }
    }
}

TEST_CASE("series solve with a singular leading matrix")
{
    // M = [[1, q], [1, q + q^2]]: constant terms are singular, M is invertible over the series field
    QSeries one = QSeries::constant(1);
    QSeries q = QSeries::monomial(1, Rational(1), Rational(30));
    QSeries q2 = QSeries::monomial(1, Rational(2), Rational(30));
    QMatrixS M{{one, q}, {one, q + q2}};
    std::vector<QSeries> v{QSeries::constant(3), QSeries::constant(3) + q2};
    auto x = qsolve(M, v);
    // x = (3 − q, 1)
    CHECK(weighted_distance(x[1], one) < 1e-12);
    CHECK(weighted_distance(x[0], QSeries::constant(3) - q) < 1e-12);
}

TEST_CASE("determinant leading coefficient")
{
    QSeries one = QSeries::constant(1);
    QSeries q = QSeries::monomial(1, Rational(1), Rational(20));
    QMatrixS M{{one * Complex(2), q}, {q, one * Complex(3)}};
    QSeries d = qdet(M);
    CHECK(std::abs(d.coeff(Rational(0)) - Complex(6)) < 1e-15);
    CHECK(std::abs(d.coeff(Rational(2)) + Complex(1)) < 1e-15);
}

TEST_CASE("multi-indices and factorials")
{
    std::vector<int> d{1, 1, 2};
    auto all = multi_indices(d, 2);
    CHECK(all.size() == 7);  // 1, z1, z2, z3, z1², z1z2, z2²
    CHECK(multi_indices(d, 2, true).size() == 4);
    CHECK(weight({1, 2, 1}, d) == 5);
    CHECK(total_degree({1, 2, 1}) == 4);
    CHECK(factorial({2, 3, 0}) == doctest::Approx(12));
}

TEST_CASE("jet of a variable squared")
{
    std::vector<int> w{1, 1, 2};
    QJet z1 = QJet::variable(w, 6, 0);
    QJet sq = jet_product(z1, z1);
    REQUIRE(sq.terms().size() == 1);
    CHECK(sq.terms().begin()->first == MultiIndex{2, 0, 0});
    CHECK(std::abs(sq.coeff({2, 0, 0}).coeff(Rational(0)) - Complex(1)) < 1e-15);
    // products beyond the weight bound are dropped
    QJet z3 = QJet::variable(w, 3, 2);
    CHECK(jet_product(z3, z3).terms().empty());
}

TEST_CASE("graded pieces distribute over the product")
{
    std::mt19937_64 rng(33);
    std::vector<int> w{1, 2, 3};
    const int W = 6;
    QJet a = random_jet(rng, w, W), b = random_jet(rng, w, W);
    QJet ab = jet_product(a, b);
    for (int j = 0; j <= W; ++j) {
        QJet sum(w, W);
        for (int i = 0; i <= j; ++i) sum += jet_product(a.piece(i), b.piece(j - i));
        QJet pj = ab.piece(j);
        CHECK(weighted_distance(pj, sum) < 1e-13);
        for (auto& [bi, f] : pj.terms()) CHECK(weight(bi, w) == j);
    }
}

TEST_CASE("jets of orbit sums and their product match pointwise values")
{
    const auto& fx = g2();
    const auto& s = fx.s;
    const auto& xs = fx.raw;
    for (Complex tau : {Complex(0.1, 0.6), Complex(-0.25, 0.7)}) {
        CVec w(static_cast<size_t>(s.n()), Complex(0.004, -0.003));
        YPoint x = point_from_coords(s.sys, s.triplet, tau, w);
        for (size_t i = 0; i < xs.raw.size(); ++i) {
            Complex direct = xs.raw[i].eval(x);
            Complex fromJet = xs.rawJets[i].eval(tau, w);
            CHECK(std::abs(direct - fromJet) < 1e-9 * std::max<Real>(1, std::abs(direct)));
        }
        QJet p = jet_product(xs.rawJets[0], xs.rawJets[2]);
        Complex direct = xs.raw[0].eval(x) * xs.raw[2].eval(x);
        CHECK(std::abs(p.eval(tau, w) - direct) < 1e-9 * std::max<Real>(1, std::abs(direct)));
    }
}

TEST_CASE("jet text rows round trip")
{
    std::mt19937_64 rng(34);
    std::vector<int> w{1, 1, 2};
    QJet a = random_jet(rng, w, 4);
    std::stringstream ss;
    write_rows(ss, a);
    QJet b = read_rows(ss, w, 4);
    CHECK(distance(a, b) == 0);
    CHECK(a.terms().size() == b.terms().size());
}
