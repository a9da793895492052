#pragma once

#include "ellfrob/cyclotomic.hpp"
#include "ellfrob/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ellfrob {

// Dense exact matrix over Rational or Cyclotomic, row-major.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(size_t rows, size_t cols) : Matrix(rows, cols, T()) {}

    static Matrix identity(size_t n, const T& like = T())
    {
        Matrix m(n, n, zero_like(like));
        for (size_t i = 0; i < n; ++i) m(i, i) = one_like(like);
        return m;
    }

    // columns given as vectors
    static Matrix from_columns(const std::vector<std::vector<T>>& cols)
    {
        if (cols.empty()) return {};
        Matrix m(cols[0].size(), cols.size());
        for (size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m.rows_) throw std::invalid_argument("ragged columns");
            for (size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    static Matrix from_rows(const std::vector<std::vector<T>>& rows)
    {
        if (rows.empty()) return {};
        Matrix m(rows.size(), rows[0].size());
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged rows");
            for (size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> row(size_t i) const { return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_}; }
    std::vector<T> col(size_t j) const
    {
        std::vector<T> c(rows_);
        for (size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix& operator+=(const Matrix& o)
    {
        check_same(o);
        for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        check_same(o);
        for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
        T zero = a.data_.empty() ? T() : zero_like(a.data_[0]);
        Matrix r(a.rows_, b.cols_, zero);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) {
                const T& x = a(i, k);
                if (is_zero(x)) continue;
                for (size_t j = 0; j < b.cols_; ++j) r(i, j) += x * b(k, j);
            }
        return r;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v)
    {
        if (a.cols_ != v.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
        std::vector<T> r(a.rows_, a.data_.empty() ? T() : zero_like(a.data_[0]));
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) r[i] += a(i, k) * v[k];
        return r;
    }

    friend Matrix operator*(const T& s, Matrix m)
    {
        for (auto& x : m.data_) x = s * x;
        return m;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    bool is_zero_matrix() const
    {
        for (const auto& x : data_)
            if (!is_zero(x)) return false;
        return true;
    }

    bool symmetric() const
    {
        if (!square()) return false;
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < i; ++j)
                if (!((*this)(i, j) == (*this)(j, i))) return false;
        return true;
    }

    Matrix block(size_t r0, size_t c0, size_t nr, size_t nc) const
    {
        Matrix b(nr, nc);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    const std::vector<T>& data() const { return data_; }

private:
    void check_same(const Matrix& o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
    }

    size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;
using CMatrix = Matrix<Cyclotomic>;

// Reduced row echelon form in place; returns pivot columns.
template <class T>
std::vector<size_t> rref(Matrix<T>& m)
{
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        size_t p = r;
        while (p < m.rows() && is_zero(m(p, c))) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        T inv = one_like(m(r, c)) / m(r, c);
        for (size_t j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == r || is_zero(m(i, c))) continue;
            T f = m(i, c);
            for (size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class T>
size_t rank(Matrix<T> m)
{
    return rref(m).size();
}

// Basis of {x : m x = 0}; empty iff m is injective.
template <class T>
std::vector<std::vector<T>> kernel(Matrix<T> m)
{
    auto piv = rref(m);
    std::vector<bool> is_piv(m.cols(), false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<T>> basis;
    if (m.cols() == 0) return basis;
    T zero = m.rows() ? zero_like(m(0, 0)) : T();
    for (size_t f = 0; f < m.cols(); ++f) {
        if (is_piv[f]) continue;
        std::vector<T> v(m.cols(), zero);
        v[f] = one_like(zero);
        for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m(k, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Some x with m x = b, or nullopt when inconsistent.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& m, const std::vector<T>& b)
{
    if (b.size() != m.rows()) throw std::invalid_argument("solve: rhs size mismatch");
    Matrix<T> aug(m.rows(), m.cols() + 1);
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
    T zero = b.empty() ? T() : zero_like(b[0]);
    std::vector<T> x(m.cols(), zero);
    for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = aug(k, m.cols());
    return x;
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& m)
{
    if (!m.square()) throw std::invalid_argument("inverse of non-square matrix");
    size_t n = m.rows();
    if (n == 0) return m;
    Matrix<T> aug(n, 2 * n, zero_like(m(0, 0)));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = one_like(m(0, 0));
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    return aug.block(0, n, n, n);
}

template <class T>
Matrix<T> power(const Matrix<T>& m, unsigned k)
{
    Matrix<T> r = Matrix<T>::identity(m.rows(), m.rows() ? m(0, 0) : T());
    Matrix<T> b = m;
    while (k) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

CMatrix embed(const QMatrix& m, int order);
std::vector<Cyclotomic> embed(const RVec& v, int order);

// counts of positive, zero, negative eigenvalues by congruence diagonalization
struct Signature {
    int positive = 0, zero = 0, negative = 0;
    friend bool operator==(const Signature&, const Signature&) = default;
    std::string str() const;
};
Signature signature(const QMatrix& gram);

// kernel of (m - eigenvalue·id); empty when eigenvalue is not an eigenvalue
std::vector<std::vector<Cyclotomic>> eigenspace(const CMatrix& m, const Cyclotomic& eigenvalue);

// Gram matrix of the columns of basis under form: basisᵀ·form·basis
QMatrix gram_of(const QMatrix& form, const std::vector<RVec>& basis);
Rational bilinear(const QMatrix& form, const RVec& x, const RVec& y);

// columns span of vectors (rank of stacked columns)
size_t span_rank(const std::vector<RVec>& vecs);

std::string to_string(const QMatrix& m);

}  // namespace ellfrob
