#pragma once

#include "ellfrob/frobenius.hpp"

#include <random>

namespace testing {

using namespace ellfrob;

// Independent rank by fraction-free elimination over rationals.
inline size_t oracle_rank(std::vector<std::vector<Rational>> a)
{
    size_t r = 0;
    size_t cols = a.empty() ? 0 : a[0].size();
    for (size_t c = 0; c < cols && r < a.size(); ++c) {
        size_t p = r;
        while (p < a.size() && sgn(a[p][c]) == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[r]);
        for (size_t i = r + 1; i < a.size(); ++i) {
            Rational f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

inline std::vector<std::vector<Rational>> rows_of(const QMatrix& m)
{
    std::vector<std::vector<Rational>> r;
    for (size_t i = 0; i < m.rows(); ++i) r.push_back(m.row(i));
    return r;
}

inline Rational random_rational(std::mt19937_64& rng, int span = 9, int maxDen = 7)
{
    std::uniform_int_distribution<int> num(-span, span), den(1, maxDen);
    return make_rational(num(rng), den(rng));
}

inline QMatrix random_qmatrix(std::mt19937_64& rng, size_t r, size_t c)
{
    QMatrix m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m(i, j) = random_rational(rng);
    return m;
}

// Shared G2 setting with good invariants and Frobenius table, built once.
struct G2Fixture {
    Setting s;
    BasicInvariantSet raw, good;
    FrobeniusTable table;
};

inline const G2Fixture& g2()
{
    static const G2Fixture f = [] {
        G2Fixture x;
        x.s = make_setting(parse_type("G2"));
        x.raw = select_basic(x.s);
        x.good = make_good(x.s, x.raw);
        x.table = metric_and_constants(x.s, x.good, default_scaling(x.s));
        return x;
    }();
    return f;
}

inline MultiIndex unit_index(size_t n, size_t k, int power = 1)
{
    MultiIndex b(n, 0);
    b[k] = power;
    return b;
}

}  // namespace testing
