#include "ellfrob/matrix.hpp"

#include <sstream>

namespace ellfrob {

CMatrix embed(const QMatrix& m, int order)
{
    CMatrix r(m.rows(), m.cols(), Cyclotomic(order));
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) r(i, j) = Cyclotomic(order, m(i, j));
    return r;
}

std::vector<Cyclotomic> embed(const RVec& v, int order)
{
    std::vector<Cyclotomic> r;
    r.reserve(v.size());
    for (const auto& x : v) r.emplace_back(order, x);
    return r;
}

std::string Signature::str() const
{
    return "(" + std::to_string(positive) + "," + std::to_string(zero) + "," + std::to_string(negative) + ")";
}

Signature signature(const QMatrix& gram)
{
    if (!gram.symmetric()) throw std::invalid_argument("signature: Gram matrix is not symmetric");
    QMatrix a = gram;
    size_t n = a.rows();
    Signature s;
    for (size_t k = 0; k < n; ++k) {
        // find a nonzero diagonal entry in the trailing block
        size_t p = k;
        while (p < n && sgn(a(p, p)) == 0) ++p;
        if (p == n) {
            // all diagonal zero: use an off-diagonal pair (i, j), add row/col j to i
            size_t pi = n, pj = n;
            for (size_t i = k; i < n && pi == n; ++i)
                for (size_t j = i + 1; j < n; ++j)
                    if (sgn(a(i, j)) != 0) {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi == n) {
                s.zero += static_cast<int>(n - k);
                return s;
            }
            for (size_t c = 0; c < n; ++c) a(pi, c) += a(pj, c);
            for (size_t r = 0; r < n; ++r) a(r, pi) += a(r, pj);
            p = pi;
        }
        // symmetric swap p <-> k
        if (p != k) {
            for (size_t c = 0; c < n; ++c) std::swap(a(p, c), a(k, c));
            for (size_t r = 0; r < n; ++r) std::swap(a(r, p), a(r, k));
        }
        Rational d = a(k, k);
        for (size_t i = k + 1; i < n; ++i) {
            if (sgn(a(i, k)) == 0) continue;
            Rational f = a(i, k) / d;
            for (size_t c = k; c < n; ++c) a(i, c) -= f * a(k, c);
            for (size_t r = k; r < n; ++r) a(r, i) -= f * a(r, k);
        }
        if (sgn(d) > 0)
            ++s.positive;
        else
            ++s.negative;
    }
    return s;
}

std::vector<std::vector<Cyclotomic>> eigenspace(const CMatrix& m, const Cyclotomic& eigenvalue)
{
    if (!m.square()) throw std::invalid_argument("eigenspace of non-square matrix");
    CMatrix a = m;
    for (size_t i = 0; i < a.rows(); ++i) a(i, i) -= eigenvalue;
    return kernel(a);
}

Rational bilinear(const QMatrix& form, const RVec& x, const RVec& y)
{
    Rational s = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (sgn(x[i]) == 0) continue;
        for (size_t j = 0; j < y.size(); ++j)
            if (sgn(y[j]) != 0) s += x[i] * form(i, j) * y[j];
    }
    return s;
}

QMatrix gram_of(const QMatrix& form, const std::vector<RVec>& basis)
{
    QMatrix g(basis.size(), basis.size());
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) g(i, j) = bilinear(form, basis[i], basis[j]);
    return g;
}

size_t span_rank(const std::vector<RVec>& vecs)
{
    if (vecs.empty()) return 0;
    return rank(QMatrix::from_rows(vecs));
}

std::string to_string(const QMatrix& m)
{
    std::ostringstream os;
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << to_string(m(i, j));
        os << "\n";
    }
    return os.str();
}

}  // namespace ellfrob
