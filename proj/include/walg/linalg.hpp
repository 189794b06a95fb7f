#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace walg {

// Small dense exact linear algebra over a field type T
// (T needs +,-,*,/ and is_zero(); T(0l)/T(1l) constructible).

template <class T> using Mat = std::vector<std::vector<T>>;

template <class T> Mat<T> mat_identity(size_t n) {
    Mat<T> m(n, std::vector<T>(n, T(0l)));
    for (size_t i = 0; i < n; ++i)
        m[i][i] = T(1l);
    return m;
}

template <class T> Mat<T> mat_mul(const Mat<T> &a, const Mat<T> &b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Mat<T> c(n, std::vector<T>(m, T(0l)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero())
                continue;
            for (size_t j = 0; j < m; ++j)
                c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

template <class T> std::vector<T> mat_vec(const Mat<T> &a, const std::vector<T> &v) {
    std::vector<T> r(a.size(), T(0l));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_zero() && !v[j].is_zero())
                r[i] += a[i][j] * v[j];
    return r;
}

template <class T> Mat<T> mat_pow(Mat<T> a, unsigned long e) {
    Mat<T> r = mat_identity<T>(a.size());
    while (e) {
        if (e & 1)
            r = mat_mul(r, a);
        a = mat_mul(a, a);
        e >>= 1;
    }
    return r;
}

template <class T> Mat<T> mat_inverse(Mat<T> a) {
    size_t n = a.size();
    Mat<T> inv = mat_identity<T>(n);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col].is_zero())
            ++piv;
        if (piv == n)
            throw std::domain_error("matrix not invertible");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        T d = a[col][col];
        for (size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col].is_zero())
                continue;
            T f = a[i][col];
            for (size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// Basis of the null space of a (rows x cols) matrix.
template <class T> std::vector<std::vector<T>> kernel_basis(Mat<T> a, size_t cols) {
    size_t rows = a.size();
    std::vector<long> pivot_of_col(cols, -1);
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c].is_zero())
            ++piv;
        if (piv == rows)
            continue;
        std::swap(a[piv], a[r]);
        T d = a[r][c];
        for (size_t j = 0; j < cols; ++j)
            a[r][j] = a[r][j] / d;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero())
                continue;
            T f = a[i][c];
            for (size_t j = 0; j < cols; ++j)
                a[i][j] -= f * a[r][j];
        }
        pivot_of_col[c] = (long)r;
        ++r;
    }
    std::vector<std::vector<T>> basis;
    for (size_t c = 0; c < cols; ++c) {
        if (pivot_of_col[c] >= 0)
            continue;
        std::vector<T> v(cols, T(0l));
        v[c] = T(1l);
        for (size_t c2 = 0; c2 < cols; ++c2)
            if (pivot_of_col[c2] >= 0)
                v[c2] = -a[(size_t)pivot_of_col[c2]][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace walg
