#pragma once

#include "rational.hpp"

#include <cassert>
#include <optional>
#include <vector>

namespace midform {

/// Column vector with exact rational entries.
using Vec = std::vector<Rational>;

inline Vec zero_vec(int d) { return Vec(static_cast<std::size_t>(d)); }

inline Vec unit_vec(int d, int i) {
    Vec v(static_cast<std::size_t>(d));
    v[static_cast<std::size_t>(i)] = 1;
    return v;
}

inline bool is_zero(const Vec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

inline Vec add(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Rational& c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline Rational dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Dense rational matrix, row major.
struct RatMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> a;

    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    Rational& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Rational& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    /// Builds the matrix whose rows are the given vectors.
    static RatMatrix from_rows(const std::vector<Vec>& rows_in) {
        if (rows_in.empty()) return RatMatrix(0, 0);
        RatMatrix m(static_cast<int>(rows_in.size()), static_cast<int>(rows_in[0].size()));
        for (int i = 0; i < m.rows; ++i) {
            assert(static_cast<int>(rows_in[i].size()) == m.cols);
            for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows_in[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return m;
    }

    static RatMatrix from_cols(const std::vector<Vec>& cols_in) {
        if (cols_in.empty()) return RatMatrix(0, 0);
        RatMatrix m(static_cast<int>(cols_in[0].size()), static_cast<int>(cols_in.size()));
        for (int j = 0; j < m.cols; ++j) {
            assert(static_cast<int>(cols_in[j].size()) == m.rows);
            for (int i = 0; i < m.rows; ++i) m.at(i, j) = cols_in[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
        return m;
    }

    Vec row(int i) const {
        Vec v(static_cast<std::size_t>(cols));
        for (int j = 0; j < cols; ++j) v[static_cast<std::size_t>(j)] = at(i, j);
        return v;
    }

    Vec col(int j) const {
        Vec v(static_cast<std::size_t>(rows));
        for (int i = 0; i < rows; ++i) v[static_cast<std::size_t>(i)] = at(i, j);
        return v;
    }

    bool operator==(const RatMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

inline Vec mat_vec(const RatMatrix& m, const Vec& v) {
    assert(static_cast<int>(v.size()) == m.cols);
    Vec r(static_cast<std::size_t>(m.rows));
    for (int i = 0; i < m.rows; ++i) {
        Rational s = 0;
        for (int j = 0; j < m.cols; ++j) {
            const Rational& x = v[static_cast<std::size_t>(j)];
            if (x != 0) s += m.at(i, j) * x;
        }
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

inline RatMatrix mat_mul(const RatMatrix& x, const RatMatrix& y) {
    assert(x.cols == y.rows);
    RatMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rational& v = x.at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.cols; ++j)
                if (y.at(k, j) != 0) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

inline RatMatrix transpose(const RatMatrix& m) {
    RatMatrix r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
    return r;
}

/// Reduces `m` in place to reduced row echelon form.  Returns the pivot
/// columns; the rank is their count.  Deterministic: first nonzero entry in
/// scan order pivots, pivots normalized to 1, pivot columns fully cleared.
inline std::vector<int> rref_inplace(RatMatrix& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(r, j));
        const Rational inv = Rational(1) / m.at(r, c);
        for (int j = c; j < m.cols; ++j) m.at(r, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            const Rational f = m.at(i, c);
            for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline int rank(RatMatrix m) { return static_cast<int>(rref_inplace(m).size()); }

/// Canonical basis of { x : m x = 0 }.  One vector per free column, with a 1
/// in that column; deterministic given the matrix.
inline std::vector<Vec> nullspace(RatMatrix m) {
    const std::vector<int> pivots = rref_inplace(m);
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols), false);
    for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<Vec> basis;
    for (int f = 0; f < m.cols; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        Vec v(static_cast<std::size_t>(m.cols));
        v[static_cast<std::size_t>(f)] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i)
            v[static_cast<std::size_t>(pivots[i])] = -m.at(static_cast<int>(i), f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of m x = b, or std::nullopt if the system is inconsistent.
/// Free variables are set to zero, so the result is deterministic.
inline std::optional<Vec> solve(const RatMatrix& m, const Vec& b) {
    assert(static_cast<int>(b.size()) == m.rows);
    RatMatrix aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols) = b[static_cast<std::size_t>(i)];
    }
    const std::vector<int> pivots = rref_inplace(aug);
    if (!pivots.empty() && pivots.back() == m.cols) return std::nullopt;
    Vec x(static_cast<std::size_t>(m.cols));
    for (std::size_t i = 0; i < pivots.size(); ++i)
        x[static_cast<std::size_t>(pivots[i])] = aug.at(static_cast<int>(i), m.cols);
    return x;
}

/// Inverse of a square matrix, or std::nullopt if singular.
inline std::optional<RatMatrix> inverse(const RatMatrix& m) {
    assert(m.rows == m.cols);
    const int n = m.rows;
    RatMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    const std::vector<int> pivots = rref_inplace(aug);
    if (static_cast<int>(pivots.size()) != n || pivots[static_cast<std::size_t>(n) - 1] != n - 1)
        return std::nullopt;
    RatMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
    return inv;
}

inline Rational determinant(RatMatrix m) {
    assert(m.rows == m.cols);
    Rational det = 1;
    for (int c = 0; c < m.cols; ++c) {
        int p = -1;
        for (int i = c; i < m.rows; ++i)
            if (m.at(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) return 0;
        if (p != c) {
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(c, j));
            det = -det;
        }
        det *= m.at(c, c);
        const Rational inv = Rational(1) / m.at(c, c);
        for (int i = c + 1; i < m.rows; ++i) {
            if (m.at(i, c) == 0) continue;
            const Rational f = m.at(i, c) * inv;
            for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(c, j);
        }
    }
    return det;
}

}  // namespace midform
