#pragma once

#include "linalg.hpp"

#include <stdexcept>
#include <vector>

namespace midform {

/// Linear subspace of Q^d or of its dual, held in a canonical reduced row
/// echelon basis so that equal subspaces compare equal member-wise.
class Subspace {
public:
    Subspace() = default;

    static Subspace span(int ambient, std::vector<Vec> vectors, bool dual = false) {
        Subspace s;
        s.ambient_ = ambient;
        s.dual_ = dual;
        for (const auto& v : vectors)
            if (static_cast<int>(v.size()) != ambient)
                throw std::invalid_argument("subspace vector has wrong dimension");
        if (!vectors.empty()) {
            RatMatrix m = RatMatrix::from_rows(vectors);
            const auto pivots = rref_inplace(m);
            for (std::size_t i = 0; i < pivots.size(); ++i) s.basis_.push_back(m.row(static_cast<int>(i)));
        }
        return s;
    }

    static Subspace zero(int ambient, bool dual = false) { return span(ambient, {}, dual); }

    static Subspace full(int ambient, bool dual = false) {
        std::vector<Vec> rows;
        for (int i = 0; i < ambient; ++i) rows.push_back(unit_vec(ambient, i));
        return span(ambient, rows, dual);
    }

    static Subspace coordinate_span(int ambient, const std::vector<int>& indices_1based, bool dual = false) {
        std::vector<Vec> rows;
        for (int i : indices_1based) {
            if (i < 1 || i > ambient) throw std::out_of_range("coordinate index outside 1..ambient");
            rows.push_back(unit_vec(ambient, i - 1));
        }
        return span(ambient, rows, dual);
    }

    int ambient() const { return ambient_; }
    bool dual() const { return dual_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<Vec>& basis() const { return basis_; }

    bool contains(Vec v) const {
        if (static_cast<int>(v.size()) != ambient_)
            throw std::invalid_argument("contains: vector dimension mismatch");
        reduce(v);
        return is_zero(v);
    }

    bool contains(const Subspace& other) const {
        if (other.ambient_ != ambient_ || other.dual_ != dual_) return false;
        for (const auto& v : other.basis_)
            if (!contains(v)) return false;
        return true;
    }

    /// Reduces v modulo this subspace (subtracts the echelon projection).
    void reduce(Vec& v) const {
        for (const auto& row : basis_) {
            int p = pivot_of(row);
            const Rational& c = v[static_cast<std::size_t>(p)];
            if (c != 0) {
                const Rational f = c;  // pivot entries are 1
                for (std::size_t j = static_cast<std::size_t>(p); j < v.size(); ++j)
                    if (row[j] != 0) v[j] -= f * row[j];
            }
        }
    }

    bool operator==(const Subspace& o) const {
        return ambient_ == o.ambient_ && dual_ == o.dual_ && basis_ == o.basis_;
    }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

private:
    static int pivot_of(const Vec& row) {
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) return static_cast<int>(j);
        return -1;
    }

    int ambient_ = 0;
    bool dual_ = false;
    std::vector<Vec> basis_;
};

inline Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient() || a.dual() != b.dual())
        throw std::invalid_argument("sum: subspaces live in different spaces");
    std::vector<Vec> rows = a.basis();
    rows.insert(rows.end(), b.basis().begin(), b.basis().end());
    return Subspace::span(a.ambient(), rows, a.dual());
}

/// Annihilator { f : f(v) = 0 for all v in S }, living in the opposite space.
/// dim S + dim ann(S) = ambient, and ann(ann(S)) = S.
inline Subspace annihilator(const Subspace& s) {
    if (s.dim() == 0) return Subspace::full(s.ambient(), !s.dual());
    RatMatrix m = RatMatrix::from_rows(s.basis());
    return Subspace::span(s.ambient(), nullspace(m), !s.dual());
}

inline Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient() || a.dual() != b.dual())
        throw std::invalid_argument("intersect: subspaces live in different spaces");
    return annihilator(sum(annihilator(a), annihilator(b)));
}

/// Greedily extends the (independent) rows with standard basis vectors, in
/// index order, to a full basis of the ambient space.
inline std::vector<Vec> extend_to_basis(std::vector<Vec> vectors, int ambient) {
    Subspace s = Subspace::span(ambient, vectors);
    if (static_cast<int>(vectors.size()) != s.dim())
        throw std::invalid_argument("extend_to_basis: input vectors are dependent");
    for (int i = 0; i < ambient && s.dim() < ambient; ++i) {
        Vec e = unit_vec(ambient, i);
        if (!s.contains(e)) {
            vectors.push_back(e);
            s = Subspace::span(ambient, vectors);
        }
    }
    return vectors;
}

/// Canonical complement spanned by the standard basis vectors at the
/// non-pivot coordinates of s.
inline Subspace standard_complement(const Subspace& s) {
    std::vector<bool> pivot(static_cast<std::size_t>(s.ambient()), false);
    for (const auto& row : s.basis())
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) {
                pivot[j] = true;
                break;
            }
    std::vector<Vec> rows;
    for (int j = 0; j < s.ambient(); ++j)
        if (!pivot[static_cast<std::size_t>(j)]) rows.push_back(unit_vec(s.ambient(), j));
    return Subspace::span(s.ambient(), rows, s.dual());
}

}  // namespace midform
