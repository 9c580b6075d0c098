#pragma once

#include "form.hpp"
#include "random.hpp"
#include "subspace.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace midform {

/// Lexicographic coordinatization of degree-k forms on Q^d.
struct CombIndex {
    int d = 0, k = 0;
    std::vector<IndexTuple> tuples;
    std::map<IndexTuple, int> pos;

    CombIndex(int d_, int k_) : d(d_), k(k_) {
        tuples = all_tuples(d, k);
        for (std::size_t i = 0; i < tuples.size(); ++i) pos[tuples[i]] = static_cast<int>(i);
    }

    Vec coords(const AlternatingForm& a) const {
        Vec v(tuples.size());
        for (const auto& [t, c] : a.terms()) v[static_cast<std::size_t>(pos.at(t))] = c;
        return v;
    }

    AlternatingForm form(const Vec& v) const {
        AlternatingForm a(d, k);
        for (std::size_t i = 0; i < tuples.size(); ++i)
            if (v[i] != 0) a.add_term(tuples[i], v[i]);
        return a;
    }
};

/// Kernel { v : i_v w = 0 }, the exact nullspace of the contraction map.
inline Subspace kernel(const AlternatingForm& w) {
    if (w.degree() < 1) throw std::invalid_argument("kernel: needs degree >= 1");
    if (w.is_zero()) return Subspace::full(w.dimension());
    const CombIndex ci(w.dimension(), w.degree() - 1);
    RatMatrix m(static_cast<int>(ci.tuples.size()), w.dimension());
    for (int j = 0; j < w.dimension(); ++j) {
        const Vec col = ci.coords(contract(unit_vec(w.dimension(), j), w));
        for (int i = 0; i < m.rows; ++i) m.at(i, j) = col[static_cast<std::size_t>(i)];
    }
    return Subspace::span(w.dimension(), nullspace(m));
}

/// Support S = ann(ker w), the smallest dual subspace with w in its exterior
/// algebra.  The zero form reports the zero subspace.
inline Subspace support(const AlternatingForm& w) {
    if (w.is_zero()) return Subspace::zero(w.dimension(), true);
    return annihilator(kernel(w));
}

struct DecompositionResult {
    bool decomposable = false;
    /// When decomposable and the form is nonzero: dual 1-forms whose wedge
    /// reproduces the form exactly (empty for the zero form).
    std::vector<Vec> factors;
};

/// A k-form is decomposable iff dim support == k; the factorization is read
/// off the support basis with one exact scalar correction.
inline DecompositionResult is_decomposable(const AlternatingForm& b) {
    DecompositionResult r;
    if (b.is_zero()) {
        r.decomposable = true;
        return r;
    }
    if (b.degree() == 0) {
        r.decomposable = true;
        return r;
    }
    const Subspace s = support(b);
    if (s.dim() != b.degree()) return r;

    AlternatingForm prod(b.dimension(), 0);
    prod.add_term({}, 1);
    for (const auto& f : s.basis()) {
        AlternatingForm oneform(b.dimension(), 1);
        for (int i = 0; i < b.dimension(); ++i)
            if (f[static_cast<std::size_t>(i)] != 0) oneform.add_term({i + 1}, f[static_cast<std::size_t>(i)]);
        prod = wedge(prod, oneform);
    }
    const auto& lead = *b.terms().begin();
    const Rational pc = prod.coefficient(lead.first);
    if (pc == 0) return r;  // cannot happen for a genuine support basis
    const Rational c = lead.second / pc;
    if (form_sub(b, form_scale(c, prod)) != AlternatingForm(b.dimension(), b.degree())) return r;
    r.decomposable = true;
    r.factors = s.basis();
    r.factors[0] = scale(c, r.factors[0]);
    return r;
}

/// Antisymmetric coefficient matrix of a 2-form; its rank is twice the
/// minimal number of decomposable summands.
inline RatMatrix skew_matrix(const AlternatingForm& b) {
    if (b.degree() != 2) throw std::invalid_argument("skew_matrix: needs a 2-form");
    RatMatrix m(b.dimension(), b.dimension());
    for (const auto& [t, c] : b.terms()) {
        m.at(t[0] - 1, t[1] - 1) = c;
        m.at(t[1] - 1, t[0] - 1) = -c;
    }
    return m;
}

/// Splits a 2-form into rank/2 decomposable summands a_r ^ g_r by repeated
/// hyperbolic-pair elimination; the 2r returned 1-forms are independent.
inline std::vector<std::pair<Vec, Vec>> skew_reduce(const AlternatingForm& b) {
    std::vector<std::pair<Vec, Vec>> pairs;
    AlternatingForm rest = b;
    const int d = b.dimension();
    const CombIndex ci(d, 1);
    while (!rest.is_zero()) {
        const auto& lead = *rest.terms().begin();
        const Vec u = unit_vec(d, lead.first[0] - 1);
        const Vec v = scale(Rational(1) / lead.second, unit_vec(d, lead.first[1] - 1));
        const Vec alpha = ci.coords(contract(u, rest));
        const Vec gamma = ci.coords(contract(v, rest));
        AlternatingForm summand(d, 2);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const Rational c = alpha[static_cast<std::size_t>(i)] * gamma[static_cast<std::size_t>(j)];
                if (c != 0 && i != j) summand.add_term({i + 1, j + 1}, c);
            }
        rest = form_sub(rest, summand);
        pairs.emplace_back(alpha, gamma);
    }
    return pairs;
}

struct LengthBounds {
    int lower = 0;
    int upper = 0;
    bool certified = false;
    std::string method;
    /// Rows of a dual basis realizing `upper` monomials, when one is known.
    std::vector<Vec> witness_dual_basis;
};

namespace detail {

/// Number of monomials of b expressed in the primal basis given by the
/// columns of bmat.
inline int term_count_in_basis(const AlternatingForm& b, const RatMatrix& bmat) {
    return static_cast<int>(pullback(bmat, b).terms().size());
}

inline std::vector<Vec> dual_rows_of_primal(const RatMatrix& bmat) {
    const auto inv = inverse(bmat);
    std::vector<Vec> rows;
    for (int i = 0; i < inv->rows; ++i) rows.push_back(inv->row(i));
    return rows;
}

}  // namespace detail

/// Exact lower bounds plus a budgeted upper-bound search over bases.
/// certified == true means lower == upper, i.e. the minimal number of basis
/// monomials over all bases is pinned exactly.
inline LengthBounds length_bounds(const AlternatingForm& b, int random_bases = 200,
                                  std::uint64_t seed = 1, int coeff_bound = 2) {
    LengthBounds r;
    if (b.is_zero()) {
        r.method = "zero";
        r.certified = true;
        return r;
    }
    const int d = b.dimension();
    const int deg = b.degree();
    const Subspace s = support(b);

    r.lower = static_cast<int>((s.dim() + deg - 1) / deg);
    if (r.lower < 1) r.lower = 1;

    if (deg == 2) {
        const int rk = rank(skew_matrix(b));
        const int half = rk / 2;
        if (half > r.lower) r.lower = half;
        const auto pairs = skew_reduce(b);
        std::vector<Vec> duals;
        for (const auto& [a, g] : pairs) {
            duals.push_back(a);
            duals.push_back(g);
        }
        r.upper = static_cast<int>(pairs.size());
        r.certified = (r.upper == r.lower);
        r.method = "skew_reduction";
        r.witness_dual_basis = extend_to_basis(duals, d);
        return r;
    }

    const auto dec = is_decomposable(b);
    if (dec.decomposable) {
        r.lower = 1;
        r.upper = 1;
        r.certified = true;
        r.method = "decomposable";
        r.witness_dual_basis = extend_to_basis(dec.factors, d);
        return r;
    }

    // budgeted search: standard basis, then shear improvements, then random
    // unimodular bases
    RatMatrix best_basis = RatMatrix::identity(d);
    int best = detail::term_count_in_basis(b, best_basis);
    bool improved = true;
    int passes = 0;
    while (improved && passes < 8) {
        improved = false;
        ++passes;
        for (int i = 0; i < d && !improved; ++i)
            for (int j = 0; j < d && !improved; ++j) {
                if (i == j) continue;
                for (int c = -coeff_bound; c <= coeff_bound && !improved; ++c) {
                    if (c == 0) continue;
                    RatMatrix cand = best_basis;
                    for (int t = 0; t < d; ++t) cand.at(t, i) += Rational(c) * cand.at(t, j);
                    const int n = detail::term_count_in_basis(b, cand);
                    if (n < best) {
                        best = n;
                        best_basis = cand;
                        improved = true;
                    }
                }
            }
    }
    SearchRng rng(seed);
    for (int t = 0; t < random_bases; ++t) {
        const RatMatrix cand = transpose(rng.unimodular(d, 2 * d));
        const int n = detail::term_count_in_basis(b, cand);
        if (n < best) {
            best = n;
            best_basis = cand;
        }
    }
    r.upper = best;
    r.certified = (r.lower == r.upper);
    r.method = "search";
    r.witness_dual_basis = detail::dual_rows_of_primal(best_basis);
    return r;
}

/// L^{w,k} = { v : i_v i_{w1} ... i_{wk} w = 0 for all wi in L }.
/// k = 0 gives ker w.
inline Subspace k_orthogonal(const Subspace& l, const AlternatingForm& w, int k) {
    if (l.ambient() != w.dimension() || l.dual())
        throw std::invalid_argument("k_orthogonal: subspace must live in the form's base space");
    if (k < 0) throw std::invalid_argument("k_orthogonal: negative k");
    if (k >= w.degree()) return Subspace::full(w.dimension());  // contracting k+1 > degree vectors gives 0
    if (k == 0) return kernel(w);
    if (l.dim() < k) return Subspace::full(w.dimension());  // no k-tuples to constrain with

    const int d = w.dimension();
    const CombIndex ci(d, w.degree() - k - 1);
    std::vector<Vec> rows;
    for_each_tuple(l.dim(), k, [&](const IndexTuple& t) {
        std::vector<Vec> vs;
        for (int ti : t) vs.push_back(l.basis()[static_cast<std::size_t>(ti - 1)]);
        const AlternatingForm g = multi_contract(vs, w);
        if (g.is_zero()) return;
        // one block of rows per tuple: v -> coords of i_v g
        RatMatrix block(static_cast<int>(ci.tuples.size()), d);
        for (int j = 0; j < d; ++j) {
            const Vec col = ci.coords(contract(unit_vec(d, j), g));
            for (int i = 0; i < block.rows; ++i) block.at(i, j) = col[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < block.rows; ++i) {
            Vec row = block.row(i);
            if (!is_zero(row)) rows.push_back(std::move(row));
        }
    });
    if (rows.empty()) return Subspace::full(d);
    return Subspace::span(d, nullspace(RatMatrix::from_rows(rows)));
}

struct IsotropyReport {
    int k = 0;
    bool k_isotropic = false;
    bool strict = false;
    bool maximal = false;
    bool kernel_contained = false;  // ker w inside L; meaningful when maximal
    Subspace orthogonal;            // L^{w,k}
};

/// Classifies L at level k.  Maximality is the linear condition L == L^{w,k}:
/// enlarging a k-isotropic L by any u keeps k-isotropy iff u lies in L^{w,k},
/// so no enlargement search is needed.
inline IsotropyReport classify_isotropy(const Subspace& l, const AlternatingForm& w, int k) {
    IsotropyReport rep;
    rep.k = k;
    rep.orthogonal = k_orthogonal(l, w, k);
    rep.k_isotropic = rep.orthogonal.contains(l);
    if (k == 0) {
        rep.strict = rep.k_isotropic;
    } else {
        rep.strict = rep.k_isotropic && !k_orthogonal(l, w, k - 1).contains(l);
    }
    rep.maximal = rep.k_isotropic && (rep.orthogonal == l);
    if (rep.maximal) {
        rep.kernel_contained = l.contains(kernel(w));
        if (!rep.kernel_contained)
            throw std::logic_error("classify_isotropy: maximal subspace missing the kernel");
    }
    return rep;
}

/// A vector is decomposable for w when i_v w is a decomposable n-form.
inline DecompositionResult decomposable_vector(const Vec& v, const AlternatingForm& w) {
    return is_decomposable(contract(v, w));
}

/// Searches for a basis of L consisting of decomposable vectors: the
/// canonical basis first, then integer combinations with coefficients bounded
/// by coeff_bound (shell order, deduplicated), then seeded random combos.
/// Semi-decision: std::nullopt only means nothing was found within budget.
inline std::optional<std::vector<Vec>> decomposable_basis_search(const Subspace& l,
                                                                 const AlternatingForm& w,
                                                                 int coeff_bound = 2,
                                                                 std::uint64_t seed = 1,
                                                                 int budget = 20000) {
    if (l.dual() || l.ambient() != w.dimension())
        throw std::invalid_argument("decomposable_basis_search: bad subspace");
    const int m = l.dim();
    if (m == 0) return std::vector<Vec>{};

    auto combo = [&](const std::vector<int>& c) {
        Vec v = zero_vec(l.ambient());
        for (int i = 0; i < m; ++i)
            if (c[static_cast<std::size_t>(i)] != 0)
                v = add(v, scale(Rational(c[static_cast<std::size_t>(i)]), l.basis()[static_cast<std::size_t>(i)]));
        return v;
    };

    std::vector<Vec> found;
    Subspace span_found = Subspace::zero(l.ambient());
    auto consider = [&](const Vec& v) {
        if (is_zero(v) || span_found.contains(v)) return false;
        if (!decomposable_vector(v, w).decomposable) return false;
        found.push_back(v);
        std::vector<Vec> rows = found;
        span_found = Subspace::span(l.ambient(), rows);
        return span_found.dim() == m;
    };

    for (const auto& b : l.basis())
        if (consider(b)) return found;

    // integer combinations in shells of growing sup-norm; skip scalar multiples
    // by requiring the first nonzero coefficient positive and gcd 1
    int used = 0;
    for (int shell = 1; shell <= coeff_bound && used < budget; ++shell) {
        std::vector<int> c(static_cast<std::size_t>(m), -shell);
        while (used < budget) {
            bool on_shell = false, lead_pos = false, seen_nonzero = false;
            int g = 0;
            for (int i = 0; i < m; ++i) {
                const int ci = c[static_cast<std::size_t>(i)];
                if (std::abs(ci) == shell) on_shell = true;
                if (!seen_nonzero && ci != 0) {
                    seen_nonzero = true;
                    lead_pos = ci > 0;
                }
                g = std::gcd(g, std::abs(ci));
            }
            if (on_shell && seen_nonzero && lead_pos && g == 1) {
                ++used;
                if (consider(combo(c))) return found;
            }
            int i = m - 1;
            while (i >= 0 && c[static_cast<std::size_t>(i)] == shell) {
                c[static_cast<std::size_t>(i)] = -shell;
                --i;
            }
            if (i < 0) break;
            ++c[static_cast<std::size_t>(i)];
        }
    }

    SearchRng rng(seed);
    for (int t = 0; t < budget; ++t) {
        std::vector<int> c(static_cast<std::size_t>(m));
        for (auto& ci : c) ci = rng.int_in(-5, 5);
        if (consider(combo(c))) return found;
    }
    return std::nullopt;
}

}  // namespace midform
