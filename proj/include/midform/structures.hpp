#pragma once

#include "analysis.hpp"
#include "random.hpp"

#include <algorithm>
#include <cstdint>
#ifdef MIDFORM_TRACE
#include <chrono>
#include <cstdio>
#endif
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace midform {

namespace detail {

inline AlternatingForm one_form(const Vec& row) {
    AlternatingForm a(static_cast<int>(row.size()), 1);
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] != 0) a.add_term({static_cast<int>(i) + 1}, row[i]);
    return a;
}

inline AlternatingForm wedge_rows(const std::vector<Vec>& rows, int dimension) {
    AlternatingForm p(dimension, 0);
    p.add_term({}, 1);
    for (const auto& r : rows) p = wedge(p, one_form(r));
    return p;
}

/// Coordinates of x with respect to the rows of `basis` (must be consistent).
inline Vec coords_in(const std::vector<Vec>& basis, const Vec& x) {
    RatMatrix m = transpose(RatMatrix::from_rows(basis));
    auto sol = solve(m, x);
    if (!sol) throw std::logic_error("coords_in: vector outside the spanned subspace");
    return *sol;
}

/// Dual basis rows: row a evaluates to delta_ab on primal basis row b.
inline std::vector<Vec> dual_basis_rows(const std::vector<Vec>& primal) {
    RatMatrix m = RatMatrix::from_rows(primal);
    auto inv = inverse(m);
    if (!inv) throw std::logic_error("dual_basis_rows: basis is singular");
    std::vector<Vec> out;
    for (int a = 0; a < m.rows; ++a) out.push_back(inv->col(a));
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tuple counts over a complement basis
// ---------------------------------------------------------------------------

/// The n-subsets of `basis` (1-based positions) whose full contraction into w
/// is nonzero.  Contractions are built incrementally so a vanishing prefix
/// prunes the whole subtree.
inline std::vector<IndexTuple> index_count(const AlternatingForm& w, const std::vector<Vec>& basis) {
    const int n = w.degree() - 1;
    std::vector<IndexTuple> found;
    if (n == 0) {
        if (!w.is_zero()) found.push_back({});
        return found;
    }
    const int m = static_cast<int>(basis.size());
    IndexTuple pick;
    auto rec = [&](auto&& self, int start, const AlternatingForm& cur) -> void {
        const int depth = static_cast<int>(pick.size());
        if (depth == n) {
            if (!cur.is_zero()) found.push_back(pick);
            return;
        }
        for (int i = start; i <= m - (n - depth); ++i) {
            AlternatingForm next = contract(basis[static_cast<std::size_t>(i)], cur);
            if (next.is_zero() && depth + 1 < n) continue;
            pick.push_back(i + 1);
            self(self, i + 1, next);
            pick.pop_back();
        }
    };
    rec(rec, 0, w);
    return found;
}

struct NLParams {
    int local_coeff_bound = 2;
    int local_passes = 8;
    int random_bases = 200;
    std::uint64_t seed = 1;
};

struct NLResult {
    int best_count = 0;
    int floor_count = 0;  // dim l - dim ker w, a proven lower bound for every basis
    int gap = 0;          // best_count - floor_count; the reported value
    bool certified = false;
    std::vector<Vec> best_basis;
    std::vector<IndexTuple> best_tuples;
    std::uint64_t bases_examined = 0;
};

/// Minimizes the number of nonzero n-fold contraction tuples over bases of f,
/// starting from the canonical basis, then local unimodular moves
/// (first-improvement), then seeded random unimodular changes of basis.
/// The result is exact when the floor is met; otherwise it is an upper bound.
inline NLResult frak_N_L(const AlternatingForm& w, const Subspace& l, const Subspace& f,
                         const NLParams& params = {}) {
    if (l.ambient() != w.dimension() || f.ambient() != w.dimension() || l.dual() || f.dual())
        throw std::invalid_argument("frak_N_L: subspaces must live in the form's base space");
    if (intersect(l, f).dim() != 0 || l.dim() + f.dim() != w.dimension())
        throw std::invalid_argument("frak_N_L: f must be a linear complement of l");

    NLResult res;
    res.floor_count = l.dim() - kernel(w).dim();

    std::vector<Vec> basis = f.basis();
    const int m = static_cast<int>(basis.size());
    auto tuples = index_count(w, basis);
    res.best_count = static_cast<int>(tuples.size());
    res.best_basis = basis;
    res.best_tuples = std::move(tuples);
    res.bases_examined = 1;

    if (res.best_count < res.floor_count)
        throw std::logic_error("frak_N_L: count below the proven floor");

    auto try_basis = [&](const std::vector<Vec>& cand) {
        ++res.bases_examined;
        auto t = index_count(w, cand);
        if (static_cast<int>(t.size()) < res.floor_count)
            throw std::logic_error("frak_N_L: count below the proven floor");
        if (static_cast<int>(t.size()) < res.best_count) {
            res.best_count = static_cast<int>(t.size());
            res.best_basis = cand;
            res.best_tuples = std::move(t);
            return true;
        }
        return false;
    };

    bool done = res.best_count == res.floor_count;

    // local first-improvement moves f_i <- f_i + c f_j
    for (int pass = 0; pass < params.local_passes && !done; ++pass) {
        bool improved = false;
        std::vector<Vec> cur = res.best_basis;
        for (int i = 0; i < m && !done; ++i)
            for (int j = 0; j < m && !done; ++j) {
                if (i == j) continue;
                for (int c = 1; c <= params.local_coeff_bound && !done; ++c)
                    for (int s = -1; s <= 1; s += 2) {
                        std::vector<Vec> cand = cur;
                        Rational coeff = c * s;
                        cand[static_cast<std::size_t>(i)] =
                            add(cand[static_cast<std::size_t>(i)], scale(coeff, cand[static_cast<std::size_t>(j)]));
                        if (try_basis(cand)) {
                            cur = res.best_basis;
                            improved = true;
                            done = res.best_count == res.floor_count;
                            if (done) break;
                        }
                    }
            }
        if (!improved) break;
    }

    // seeded random unimodular changes of basis
    SearchRng rng(params.seed);
    for (int t = 0; t < params.random_bases && !done; ++t) {
        RatMatrix u = rng.unimodular(m, 2 * m);
        std::vector<Vec> cand(static_cast<std::size_t>(m), zero_vec(w.dimension()));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Rational uij = u.at(i, j);
                if (uij != 0)
                    cand[static_cast<std::size_t>(i)] =
                        add(cand[static_cast<std::size_t>(i)], scale(uij, basis[static_cast<std::size_t>(j)]));
            }
        if (try_basis(cand)) done = res.best_count == res.floor_count;
    }

    res.gap = res.best_count - res.floor_count;
    res.certified = (res.gap == 0);
    return res;
}

// ---------------------------------------------------------------------------
// Dual frames
// ---------------------------------------------------------------------------

struct DualFrame {
    Vec v;                      // normalized decomposable vector of l
    std::vector<Vec> frame;     // the given f_1..f_n
    std::vector<Vec> coframe;   // f^1..f^n with i_v w == f^1 ^ ... ^ f^n exactly
};

/// Given f_1..f_n whose full contraction phi = i_{f_n}...i_{f_1} w does not
/// annihilate l, produces v in l with w(v, f_1..f_n) = 1 and the unique
/// coframe dual to the frame along ker(i_v w); then i_v w is exactly the
/// wedge of the coframe.
inline DualFrame dual_frame(const AlternatingForm& w, const Subspace& l, const std::vector<Vec>& frame) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    if (static_cast<int>(frame.size()) != n)
        throw std::invalid_argument("dual_frame: need exactly degree-1 frame vectors");

    AlternatingForm phi = multi_contract(frame, w);
    auto dec = decomposable_basis_search(l, w);
    if (!dec) throw std::invalid_argument("dual_frame: no decomposable basis certified for l");

    DualFrame out;
    out.frame = frame;
    bool got = false;
    for (const auto& cand : *dec) {
        Rational val = eval(phi, {cand});  // = w(f_1..f_n, cand)
        if (val == 0) continue;
        Rational norm = val;               // w(cand, f_1..f_n) = (-1)^n val
        if (n % 2) norm = -norm;
        out.v = scale(Rational(1) / norm, cand);
        got = true;
        break;
    }
    if (!got) throw std::invalid_argument("dual_frame: contraction annihilates the subspace");

    AlternatingForm ivw = contract(out.v, w);
    Subspace kv = kernel(ivw);
    if (kv.dim() + n != d)
        throw std::logic_error("dual_frame: kernel of the contraction has unexpected dimension");

    std::vector<Vec> rows = frame;
    for (const auto& k : kv.basis()) rows.push_back(k);
    RatMatrix m = RatMatrix::from_rows(rows);
    auto inv = inverse(m);
    if (!inv) throw std::logic_error("dual_frame: frame does not complement the contraction kernel");
    for (int a = 0; a < n; ++a) out.coframe.push_back(inv->col(a));

    AlternatingForm product = detail::wedge_rows(out.coframe, d);
    if (form_sub(ivw, product) != AlternatingForm(d, n))
        throw std::logic_error("dual_frame: normalized contraction is not the coframe product");
    return out;
}

// ---------------------------------------------------------------------------
// Canonical representation
// ---------------------------------------------------------------------------

struct CanonicalRep {
    std::vector<Vec> frame;              // basis f_1..f_m of the complement
    std::vector<IndexTuple> tuples;      // nonzero contraction tuples (1-based into frame)
    std::vector<Vec> hat_forms;          // 1-form rows, one per tuple
    std::vector<Vec> coframe;            // e^1..e^m, vanishing on l
    int sign = 1;                        // (-1)^n
    int length = 0;                      // = tuples.size() = dim l - dim ker w
    std::vector<Vec> length_witness;     // dual basis exhibiting `length` monomials
};

/// Writes w as sign * sum over tuples of hat_{i} ^ e^{i_1} ^ ... ^ e^{i_n}
/// where hat_{i} is the full contraction of w with the tuple's frame vectors
/// and e^a is the coframe dual to the frame along l.  Requires a certified
/// zero-gap count; the reconstruction is verified exactly and the expression
/// doubles as a minimal-length certificate.
inline CanonicalRep canonical_representation(const AlternatingForm& w, const Subspace& l,
                                             const NLResult& nl) {
    if (!nl.certified)
        throw std::invalid_argument("canonical_representation: needs a certified zero-gap count");
    const int d = w.dimension();
    const int n = w.degree() - 1;
    const int m = static_cast<int>(nl.best_basis.size());
    if (l.dim() + m != d)
        throw std::invalid_argument("canonical_representation: frame does not complement l");

    CanonicalRep rep;
    rep.frame = nl.best_basis;
    rep.tuples = nl.best_tuples;
    rep.sign = (n % 2) ? -1 : 1;
    rep.length = nl.best_count;

    std::vector<Vec> rows = rep.frame;
    for (const auto& b : l.basis()) rows.push_back(b);
    auto duals = detail::dual_basis_rows(rows);  // first m entries vanish on l
    rep.coframe.assign(duals.begin(), duals.begin() + m);

    AlternatingForm recon(d, n + 1);
    for (const auto& t : rep.tuples) {
        std::vector<Vec> args;
        for (int pos : t) args.push_back(rep.frame[static_cast<std::size_t>(pos - 1)]);
        AlternatingForm hat = multi_contract(args, w);
        if (hat.degree() != 1 || hat.is_zero())
            throw std::logic_error("canonical_representation: tuple contraction is not a nonzero 1-form");
        Vec hatrow = zero_vec(d);
        for (const auto& [idx, c] : hat.terms()) hatrow[static_cast<std::size_t>(idx[0] - 1)] = c;
        rep.hat_forms.push_back(hatrow);

        std::vector<Vec> factors{hatrow};
        for (int pos : t) factors.push_back(rep.coframe[static_cast<std::size_t>(pos - 1)]);
        AlternatingForm term = detail::wedge_rows(factors, d);
        Rational s = rep.sign;
        recon = form_add(recon, form_scale(s, term));
    }
    if (form_sub(w, recon) != AlternatingForm(d, n + 1))
        throw std::logic_error("canonical_representation: reconstruction mismatch");

    // the hats together with the coframe are independent, so extending them to
    // a dual basis rewrites w with exactly `length` monomials
    std::vector<Vec> witness = rep.hat_forms;
    for (const auto& c : rep.coframe) witness.push_back(c);
    witness = extend_to_basis(witness, d);
    rep.length_witness = witness;

    RatMatrix wm = RatMatrix::from_rows(witness);
    auto winv = inverse(wm);
    if (!winv) throw std::logic_error("canonical_representation: witness basis is singular");
    RatMatrix primal(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) primal.at(i, j) = winv->at(i, j);
    AlternatingForm in_witness = pullback(primal, w);
    if (static_cast<int>(in_witness.terms().size()) != rep.length)
        throw std::logic_error("canonical_representation: witness basis does not realize the length");
    return rep;
}

/// True when w1 and w2 have the same contractions along l, i.e. their
/// difference annihilates every vector of l.
inline bool principal_class_check(const AlternatingForm& w1, const AlternatingForm& w2,
                                  const Subspace& l) {
    if (w1.dimension() != w2.dimension() || w1.degree() != w2.degree())
        throw std::invalid_argument("principal_class_check: shape mismatch");
    AlternatingForm diff = form_sub(w1, w2);
    for (const auto& v : l.basis())
        if (!contract(v, diff).is_zero()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Structure relations
// ---------------------------------------------------------------------------

struct MaxDimReport {
    int dim_l = 0;
    int dim_kernel = 0;
    int codim = 0;
    bool dim_relation = false;    // dim l == dim ker + C(codim, n)
    bool image_equality = false;  // contraction image of l fills the n-forms on ann(l)
};

/// Compares the contraction image {i_v w : v in l} with the full space of
/// n-forms supported on the annihilator of l.  The two characterizations
/// (dimension count and subspace equality) are computed independently and
/// must agree.
inline MaxDimReport check_max_dim_relation(const AlternatingForm& w, const Subspace& l) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    auto rep = classify_isotropy(l, w, 1);
    if (!rep.k_isotropic)
        throw std::invalid_argument("check_max_dim_relation: subspace is not 1-isotropic");

    MaxDimReport out;
    out.dim_l = l.dim();
    out.dim_kernel = kernel(w).dim();
    out.codim = d - l.dim();
    out.dim_relation =
        static_cast<std::uint64_t>(out.dim_l) ==
        static_cast<std::uint64_t>(out.dim_kernel) + binomial(out.codim, n);

    CombIndex ci(d, n);
    std::vector<Vec> img_rows;
    for (const auto& v : l.basis()) img_rows.push_back(ci.coords(contract(v, w)));
    Subspace img = Subspace::span(static_cast<int>(ci.tuples.size()), img_rows);

    std::vector<Vec> lam_rows;
    const auto ann_basis = annihilator(l).basis();
    for_each_tuple(static_cast<int>(ann_basis.size()), n, [&](const IndexTuple& t) {
        std::vector<Vec> rows;
        for (int i : t) rows.push_back(ann_basis[static_cast<std::size_t>(i - 1)]);
        lam_rows.push_back(ci.coords(detail::wedge_rows(rows, d)));
    });
    Subspace lam = Subspace::span(static_cast<int>(ci.tuples.size()), lam_rows);
    if (!lam.contains(img))
        throw std::logic_error("check_max_dim_relation: image leaves the annihilator algebra");
    out.image_equality = (img == lam);

    if (out.image_equality != out.dim_relation)
        throw std::logic_error("check_max_dim_relation: characterizations disagree");
    return out;
}

struct CanonicalRelReport {
    int computed_dim = 0;   // dim of {gamma : i_l gamma = 0, r-fold v-contraction 0}
    int formula_dim = 0;    // sum over s < r of C(dim v/l, s) C(d - dim v, n - s)
    bool contains_image = false;
    bool image_equality = false;
};

/// The n-forms annihilating l whose r-fold contractions with v vanish form a
/// space of dimension given by a closed formula; the contraction image of l
/// is checked against that space.
inline CanonicalRelReport check_canonical_relation(const AlternatingForm& w, const Subspace& l,
                                                   const Subspace& v, int r) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    if (!v.contains(l))
        throw std::invalid_argument("check_canonical_relation: l must be contained in v");
    if (r < 1) throw std::invalid_argument("check_canonical_relation: r must be >= 1");

    CombIndex cn(d, n);
    const int ncols = static_cast<int>(cn.tuples.size());
    std::vector<Vec> rows;

    auto add_contraction_rows = [&](const std::vector<Vec>& vecs) {
        // rows for the constraint: full contraction of gamma with vecs == 0
        const int kres = n - static_cast<int>(vecs.size());
        if (kres < 0) return;
        CombIndex cres(d, kres);
        std::vector<Vec> block(cres.tuples.size(), zero_vec(ncols));
        for (int col = 0; col < ncols; ++col) {
            AlternatingForm basis_form = cn.form(unit_vec(ncols, col));
            AlternatingForm image = multi_contract(vecs, basis_form);
            Vec coords = cres.coords(image);
            for (std::size_t rr = 0; rr < coords.size(); ++rr)
                if (coords[rr] != 0) block[rr][static_cast<std::size_t>(col)] = coords[rr];
        }
        for (auto& b : block)
            if (!is_zero(b)) rows.push_back(std::move(b));
    };

    for (const auto& u : l.basis()) add_contraction_rows({u});
    if (r <= n) {
        const auto vb = v.basis();
        for_each_tuple(static_cast<int>(vb.size()), r, [&](const IndexTuple& t) {
            std::vector<Vec> vecs;
            for (int i : t) vecs.push_back(vb[static_cast<std::size_t>(i - 1)]);
            add_contraction_rows(vecs);
        });
    }

    CanonicalRelReport out;
    if (rows.empty()) {
        out.computed_dim = ncols;
    } else {
        RatMatrix m = RatMatrix::from_rows(rows);
        out.computed_dim = ncols - rank(m);
    }

    const int nprime = v.dim() - l.dim();
    const int mprime = d - v.dim();
    std::uint64_t total = 0;
    for (int s = 0; s < r && s <= n; ++s) {
        if (s > nprime || n - s > mprime) continue;
        total += binomial(nprime, s) * binomial(mprime, n - s);
    }
    out.formula_dim = static_cast<int>(total);
    if (out.computed_dim != out.formula_dim)
        throw std::logic_error("check_canonical_relation: computed dimension contradicts the formula");

    out.contains_image = true;
    const auto vb = v.basis();
    for (const auto& u : l.basis()) {
        AlternatingForm gamma = contract(u, w);
        for (const auto& u2 : l.basis())
            if (!contract(u2, gamma).is_zero()) out.contains_image = false;
        if (r <= n) {
            for_each_tuple(static_cast<int>(vb.size()), r, [&](const IndexTuple& t) {
                std::vector<Vec> vecs;
                for (int i : t) vecs.push_back(vb[static_cast<std::size_t>(i - 1)]);
                if (!multi_contract(vecs, gamma).is_zero()) out.contains_image = false;
            });
        }
    }
    out.image_equality =
        out.contains_image && (l.dim() - kernel(w).dim() == out.computed_dim);
    return out;
}

// ---------------------------------------------------------------------------
// n-isotropic complements
// ---------------------------------------------------------------------------

struct ComplementResult {
    Subspace f;        // n-isotropic complement of l
    Subspace f_cap_v;  // (r-1)-isotropic intersection with v
    bool verified = false;
};

namespace detail {

/// One nondegenerate reduction step; throws if any exactness check fails so
/// the caller can retry with a different pivot vector or dual-form gauge.
struct ReductionStep {
    Vec v0;
    Vec alpha0;                 // dual 1-form row: alpha0(v0) = 1, vanishes on the rest of l
    std::vector<Vec> new_f;     // kernel directions of w1 transverse to v0
    std::vector<Vec> w1_basis;  // basis of the cut subspace
    AlternatingForm w1;         // ambient form after removing the pivot block
};

/// Primitive integer vector with the same direction as x (first nonzero
/// entry positive).  Search vectors are only meaningful up to scale, and
/// integer entries keep the exact elimination chains they feed cheap.
inline Vec primitive(const Vec& x) {
    Integer den = 1;
    for (const auto& c : x)
        if (c != 0) den = boost::multiprecision::lcm(den, denominator(c));
    Integer num = 0;
    for (const auto& c : x)
        if (c != 0) num = boost::multiprecision::gcd(num, Integer(numerator(c) * (den / denominator(c))));
    if (num == 0) return x;
    Rational s(den, num);
    for (const auto& c : x) {
        if (c == 0) continue;
        if (c < 0) s = -s;
        break;
    }
    return scale(s, x);
}

/// Dual 1-form row of the leading vector of `lrows` against an ambient basis
/// adapted to v: it is 1 on that vector, 0 on the other rows, 0 on a
/// complement of their span inside v, and 0 on a complement of v.
inline Vec adapted_pivot_dual(int d, const std::vector<Vec>& lrows, const Subspace& v) {
    std::vector<Vec> arows = lrows;
    int cur = rank(RatMatrix::from_rows(arows));
    for (const auto& cand : v.basis()) {
        std::vector<Vec> trial = arows;
        trial.push_back(cand);
        if (rank(RatMatrix::from_rows(trial)) > cur) {
            arows.push_back(cand);
            ++cur;
        }
    }
    const Subspace vcomp = standard_complement(v);
    for (const auto& cand : vcomp.basis()) {
        std::vector<Vec> trial = arows;
        trial.push_back(cand);
        if (rank(RatMatrix::from_rows(trial)) > cur) {
            arows.push_back(cand);
            ++cur;
        }
    }
    if (cur != d) throw std::logic_error("adapted_pivot_dual: ambient basis completion failed");
    return dual_basis_rows(arows)[0];
}

/// Gauges of the pivot dual that force a new kernel direction of the cut
/// form.  For a fixed direction u, membership of u plus some vector of l in
/// the kernel of w - alpha0 ^ i_{v0} w is linear in the free part of alpha0,
/// so suitable gauges are solved for exactly instead of sampled.
inline std::vector<Vec> kernel_targeting_gauges(const AlternatingForm& w, const Subspace& l,
                                                const std::vector<Vec>& dec_basis,
                                                std::size_t pivot, const Vec& alpha_star,
                                                const AlternatingForm& phi) {
    const int d = w.dimension();
    std::vector<Vec> out;
    const Subspace annl = annihilator(l);
    std::vector<Vec> arows;
    for (const auto& a : annl.basis()) arows.push_back(primitive(a));
    if (arows.empty()) return out;

    std::vector<AlternatingForm> lcols;
    for (std::size_t i = 0; i < dec_basis.size(); ++i)
        if (i != pivot) lcols.push_back(contract(dec_basis[i], w));

    const Subspace comp = standard_complement(l);
    std::vector<Vec> pool;
    for (const auto& b : comp.basis()) pool.push_back(primitive(b));
    const std::size_t singles = pool.size();
    for (std::size_t i = 0; i < singles; ++i)
        for (std::size_t j = i + 1; j < singles; ++j) {
            pool.push_back(add(pool[i], pool[j]));
            pool.push_back(sub(pool[i], pool[j]));
        }

    for (const auto& u : pool) {
        const AlternatingForm iu_w = contract(u, w);
        const AlternatingForm iu_phi = contract(u, phi);
        AlternatingForm base = form_add(iu_w, wedge(one_form(alpha_star), iu_phi));
        base = form_sub(base, form_scale(dot(alpha_star, u), phi));

        std::vector<AlternatingForm> cols;
        for (const auto& a : arows)
            cols.push_back(form_sub(wedge(one_form(a), iu_phi), form_scale(dot(a, u), phi)));
        for (const auto& h : lcols) cols.push_back(h);

        std::set<IndexTuple> mono;
        for (const auto& [t, c] : base.terms()) mono.insert(t);
        for (const auto& g : cols)
            for (const auto& [t, c] : g.terms()) mono.insert(t);
        if (mono.empty()) continue;

        RatMatrix m(static_cast<int>(mono.size()), static_cast<int>(cols.size()));
        Vec rhs;
        rhs.reserve(mono.size());
        int ri = 0;
        for (const auto& t : mono) {
            for (std::size_t j = 0; j < cols.size(); ++j)
                m.at(ri, static_cast<int>(j)) = cols[j].coefficient(t);
            rhs.push_back(-base.coefficient(t));
            ++ri;
        }
        const auto sol = solve(m, rhs);
        if (!sol) continue;
        Vec g = zero_vec(d);
        for (std::size_t j = 0; j < arows.size(); ++j) {
            const Rational c = (*sol)[j];
            if (c != 0) g = add(g, scale(c, arows[j]));
        }
        bool trivial = true;
        for (const auto& c : g)
            if (c != 0) {
                trivial = false;
                break;
            }
        if (trivial) continue;
        bool dup = false;
        for (const auto& prev : out)
            if (prev == g) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(g));
        if (out.size() >= 32) break;
    }
    return out;
}

/// Gauge-independent part of one reduction step: the pivot dual's base value
/// and the exact factorization of the pivot contraction.
struct PivotPrep {
    Vec v0;
    Vec alpha_star;             // adapted dual row of v0; gauges are added to it
    AlternatingForm phi;        // i_{v0} w
    std::vector<Vec> factors;   // rows with wedge_rows(factors) == phi exactly
};

inline PivotPrep prepare_pivot(const AlternatingForm& w, const Subspace& l, const Subspace& v,
                               int r, const std::vector<Vec>& dec_basis, std::size_t pivot) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    PivotPrep prep;
    prep.v0 = dec_basis[pivot];

    std::vector<Vec> lrows;
    lrows.push_back(prep.v0);
    for (std::size_t i = 0; i < dec_basis.size(); ++i)
        if (i != pivot) lrows.push_back(dec_basis[i]);
    prep.alpha_star = adapted_pivot_dual(d, lrows, v);

    prep.phi = contract(prep.v0, w);
    Subspace s = support(prep.phi);
    if (s.dim() != n) throw std::logic_error("pivot cut: pivot contraction is not decomposable");

    // support basis adapted to v: factors annihilating v come first
    Subspace horizontal = intersect(s, annihilator(v));
    prep.factors = horizontal.basis();
    if (static_cast<int>(prep.factors.size()) < n - (r - 1))
        throw std::logic_error("pivot cut: not enough factors annihilate v");
    {
        int cur = prep.factors.empty() ? 0 : rank(RatMatrix::from_rows(prep.factors));
        for (const auto& cand : s.basis()) {
            if (cur == n) break;
            std::vector<Vec> trial = prep.factors;
            trial.push_back(cand);
            if (rank(RatMatrix::from_rows(trial)) > cur) {
                prep.factors.push_back(cand);
                ++cur;
            }
        }
        if (cur != n) throw std::logic_error("pivot cut: support basis extension failed");
    }
    {
        AlternatingForm prod = wedge_rows(prep.factors, d);
        const auto& lead = *prep.phi.terms().begin();
        Rational pc = prod.coefficient(lead.first);
        if (pc == 0) throw std::logic_error("pivot cut: support product misses the leading term");
        Rational c = lead.second / pc;
        prep.factors[0] = scale(c, prep.factors[0]);
        prod = wedge_rows(prep.factors, d);
        if (form_sub(prep.phi, prod) != AlternatingForm(d, n))
            throw std::logic_error("pivot cut: factorization of the pivot contraction failed");
    }
    return prep;
}

inline ReductionStep reduce_with(const AlternatingForm& w, const Subspace& l,
                                 const PivotPrep& prep, const Vec& gauge) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    ReductionStep st;
    st.v0 = prep.v0;
    st.alpha0 = add(prep.alpha_star, gauge);
    const std::vector<Vec>& factors = prep.factors;

    std::vector<Vec> block = factors;
    block.insert(block.begin(), st.alpha0);
    st.w1 = form_sub(w, wedge_rows(block, d));
    if (!contract(st.v0, st.w1).is_zero())
        throw std::logic_error("pivot cut: pivot did not drop into the kernel");

    Subspace k1 = kernel(st.w1);
    Subspace alpha_ker = annihilator(Subspace::span(d, {st.alpha0}, true));
    Subspace u_space = intersect(k1, alpha_ker);
    const int sdim = u_space.dim();
    if (k1.dim() != sdim + 1)
        throw std::logic_error("pivot cut: kernel did not split along the pivot");
    for (const auto& x : u_space.basis()) st.new_f.push_back(primitive(x));

    std::vector<Vec> cut_rows{st.alpha0};
    if (sdim > 0) {
        // Extend the kernel directions to a full transversal u_1..u_n inside
        // ker alpha0: the factor pairing must stay invertible and each partial
        // contraction of w1 by the added vectors must keep a nonzero
        // contraction with l (otherwise the cut loses the maximality of the
        // reduced subspace).  The cut covectors are the factor rows
        // re-normalized against the completed transversal.
        auto pairing_rank = [&](const std::vector<Vec>& us) {
            RatMatrix p(static_cast<int>(us.size()), n);
            for (std::size_t i = 0; i < us.size(); ++i)
                for (int j = 0; j < n; ++j)
                    p.at(static_cast<int>(i), j) = dot(factors[static_cast<std::size_t>(j)], us[i]);
            return rank(p);
        };
        std::vector<Vec> transversal = st.new_f;
        if (pairing_rank(transversal) != sdim)
            throw std::logic_error("pivot cut: kernel pairing is degenerate");
        const Subspace alpha_ann = annihilator(Subspace::span(d, {st.alpha0}, true));
        std::vector<Vec> pool;
        for (const auto& b : alpha_ann.basis()) pool.push_back(primitive(b));
        AlternatingForm partial = st.w1;
        while (static_cast<int>(transversal.size()) < n) {
            bool advanced = false;
            for (const auto& cand : pool) {
                std::vector<Vec> trial = transversal;
                trial.push_back(cand);
                if (rank(RatMatrix::from_rows(trial)) != static_cast<int>(trial.size())) continue;
                if (pairing_rank(trial) != static_cast<int>(trial.size())) continue;
                AlternatingForm next = contract(cand, partial);
                bool meets_l = false;
                for (const auto& lv : l.basis())
                    if (!contract(lv, next).is_zero()) {
                        meets_l = true;
                        break;
                    }
                if (!meets_l) continue;
                transversal = std::move(trial);
                partial = std::move(next);
                advanced = true;
                break;
            }
            if (!advanced) throw std::logic_error("pivot cut: transversal extension stalled");
        }
        RatMatrix pairing(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                pairing.at(j, i) = dot(factors[static_cast<std::size_t>(j)], transversal[static_cast<std::size_t>(i)]);
        auto pinv = inverse(pairing);
        if (!pinv) throw std::logic_error("pivot cut: transversal pairing not invertible");
        for (int a = 0; a < sdim; ++a) {
            Vec row = zero_vec(d);
            for (int j = 0; j < n; ++j) {
                Rational c = pinv->at(a, j);
                if (c != 0) row = add(row, scale(c, factors[static_cast<std::size_t>(j)]));
            }
            cut_rows.push_back(std::move(row));
        }
    }
    Subspace w1_space = annihilator(Subspace::span(d, cut_rows, true));
    if (w1_space.dim() != d - sdim - 1)
        throw std::logic_error("pivot cut: cut subspace has unexpected dimension");
    for (const auto& x : w1_space.basis()) st.w1_basis.push_back(primitive(x));
    return st;
}

inline std::vector<Vec> complement_worker(const AlternatingForm& w, const Subspace& l,
                                          const Subspace& v, int r, int& budget,
                                          const std::vector<Vec>* known_dec = nullptr) {
    const int d = w.dimension();
    if (d == 0) return {};

    auto rep = classify_isotropy(l, w, 1);
    if (!rep.k_isotropic || !rep.maximal)
        throw std::invalid_argument("complement_n_isotropic: subspace is not maximal 1-isotropic");
    if (l.dim() == d) return {};

    Subspace k = kernel(w);
    if (k.dim() > 0) {
        Subspace c = standard_complement(k);
        const auto cb = c.basis();
        RatMatrix incl = transpose(RatMatrix::from_rows(cb));
        AlternatingForm wc = pullback(incl, w);
        auto down = [&](const Subspace& s) {
            const Subspace cut = intersect(s, c);
            std::vector<Vec> rows;
            for (const auto& x : cut.basis()) rows.push_back(coords_in(cb, x));
            return Subspace::span(c.dim(), rows);
        };
        auto sub = complement_worker(wc, down(l), down(v), r, budget);
        std::vector<Vec> out;
        for (const auto& x : sub) out.push_back(mat_vec(incl, x));
        return out;
    }

    // A caller-provided decomposable basis (transported from an already
    // certified one) skips the search; every pivot actually used is still
    // re-verified by the factorization step.
    std::optional<std::vector<Vec>> dec;
    if (known_dec && static_cast<int>(known_dec->size()) == l.dim() &&
        rank(RatMatrix::from_rows(*known_dec)) == l.dim()) {
        bool inside = true;
        for (const auto& x : *known_dec)
            if (!l.contains(x)) {
                inside = false;
                break;
            }
        if (inside) dec = *known_dec;
    }
    if (!dec) dec = decomposable_basis_search(l, w);
    if (!dec)
        throw std::invalid_argument("complement_n_isotropic: no decomposable basis certified");
    for (auto& x : *dec) x = primitive(x);  // contraction support is scale-invariant

    // The dual form of the pivot is only pinned on l; its free part (a gauge
    // from the annihilator of l) controls which directions the cut collects
    // into the kernel.  Try each pivot plain first, then gauges solved to
    // force a new kernel direction, then a bounded blind sweep.
    std::string last_error = "no reduction attempted";
    const std::size_t tries = dec->size();

    // gauge-independent data per pivot, built at most once per level
    std::vector<std::optional<PivotPrep>> preps(tries);
    std::vector<bool> prep_failed(tries, false);
    auto prep_for = [&](std::size_t pivot) -> const PivotPrep* {
        if (prep_failed[pivot]) return nullptr;
        if (!preps[pivot]) {
            try {
                preps[pivot] = prepare_pivot(w, l, v, r, *dec, pivot);
            } catch (const std::logic_error& e) {
                last_error = e.what();
                prep_failed[pivot] = true;
                return nullptr;
            }
        }
        return &*preps[pivot];
    };

    std::vector<Vec> found;
    auto attempt = [&](std::size_t pivot, const Vec& gauge) -> bool {
        const PivotPrep* prep = prep_for(pivot);
        if (!prep) return false;
        if (budget <= 0)
            throw std::logic_error("complement_n_isotropic: search budget exhausted (" + last_error + ")");
        --budget;
        try {
            ReductionStep st = reduce_with(w, l, *prep, gauge);
            if (st.w1_basis.empty()) {
                if (dec->size() > 1)
                    throw std::logic_error("complement_n_isotropic: cut dropped remaining subspace vectors");
                found = st.new_f;
                return true;
            }
            RatMatrix incl = transpose(RatMatrix::from_rows(st.w1_basis));
            AlternatingForm w1c = pullback(incl, st.w1);
            Subspace w1_space = Subspace::span(d, st.w1_basis);

            std::vector<Vec> l1rows;
            for (std::size_t i = 0; i < dec->size(); ++i) {
                if (i == pivot) continue;
                l1rows.push_back(coords_in(st.w1_basis, (*dec)[i]));  // throws if outside the cut
            }
            Subspace l1 = Subspace::span(w1_space.dim(), l1rows);
            const Subspace v_cut = intersect(v, w1_space);
            std::vector<Vec> v1rows;
            for (const auto& x : v_cut.basis())
                v1rows.push_back(coords_in(st.w1_basis, x));
            Subspace v1 = Subspace::span(w1_space.dim(), v1rows);

            auto sub = complement_worker(w1c, l1, v1, r, budget);
            found = st.new_f;
            for (const auto& x : sub) found.push_back(mat_vec(incl, x));
            return true;
        } catch (const std::logic_error& e) {
            last_error = e.what();
            return false;
        }
    };

    // Harvest-positive candidates first: the complement is collected from
    // kernel directions of the cut forms, and the total harvest over a full
    // descent is forced to dim(w) - dim(l), so descents that harvest early
    // stay short and avoid subtrees starved of kernel directions.
    for (std::size_t pivot = 0; pivot < tries; ++pivot) {
        const PivotPrep* prep = prep_for(pivot);
        if (!prep) continue;
        for (const auto& gauge :
             kernel_targeting_gauges(w, l, *dec, pivot, prep->alpha_star, prep->phi))
            if (attempt(pivot, gauge)) return found;
    }

    for (std::size_t pivot = 0; pivot < tries; ++pivot)
        if (attempt(pivot, zero_vec(d))) return found;

    std::vector<Vec> gauges;
    const Subspace annl = annihilator(l);
    std::vector<Vec> ann_rows;
    for (const auto& a : annl.basis()) ann_rows.push_back(primitive(a));
    for (const auto& row : ann_rows) {
        gauges.push_back(row);
        gauges.push_back(scale(-1, row));
    }
    for (std::size_t i = 0; i < ann_rows.size(); ++i)
        for (std::size_t j = i + 1; j < ann_rows.size(); ++j)
            gauges.push_back(add(ann_rows[i], ann_rows[j]));
    for (const auto& gauge : gauges)
        for (std::size_t pivot = 0; pivot < tries; ++pivot)
            if (attempt(pivot, gauge)) return found;

    throw std::logic_error("complement_n_isotropic: all pivots failed (" + last_error + ")");
}

}  // namespace detail

/// Builds a complement f of l such that every full contraction of w with
/// degree-many f-vectors vanishes, and f meets v in an (r-1)-isotropic
/// subspace.  Requires l maximal 1-isotropic with a certified decomposable
/// basis, l <= v, and v r-isotropic.  All postconditions are re-verified
/// exactly before returning.
inline ComplementResult complement_n_isotropic(const AlternatingForm& w, const Subspace& l,
                                               const Subspace& v, int r) {
    const int d = w.dimension();
    const int n = w.degree() - 1;
    if (l.ambient() != d || v.ambient() != d || l.dual() || v.dual())
        throw std::invalid_argument("complement_n_isotropic: subspaces must live in the form's base space");
    if (!v.contains(l))
        throw std::invalid_argument("complement_n_isotropic: l must be contained in v");
    if (r < 1) throw std::invalid_argument("complement_n_isotropic: r must be >= 1");
    if (!classify_isotropy(v, w, r).k_isotropic)
        throw std::invalid_argument("complement_n_isotropic: v is not r-isotropic");
    {
        auto rep = classify_isotropy(l, w, 1);
        if (!rep.k_isotropic || !rep.maximal)
            throw std::invalid_argument("complement_n_isotropic: subspace is not maximal 1-isotropic");
    }

    // The search portfolio: the instance itself plus a few seeded
    // re-coordinatizations (every internal choice — pivot order,
    // factorization, cut — is basis-dependent, and a change of basis re-rolls
    // all of them at once; results map back exactly).  The candidate tree is
    // explored depth-first under an attempt budget, and budgets grow in
    // interleaved rungs so one doomed deep subtree cannot starve cheaper
    // tickets.  The decomposable basis is certified once and transported to
    // each ticket: contractions transform naturally, so decomposability is
    // preserved exactly.
#ifdef MIDFORM_TRACE
    std::fprintf(stderr, "[wrap] enter, dec0 search...\n");
#endif
    const auto dec0 = decomposable_basis_search(l, w);
#ifdef MIDFORM_TRACE
    std::fprintf(stderr, "[wrap] dec0 %s\n", dec0 ? "found" : "MISSING");
#endif
    struct Ticket {
        AlternatingForm w;
        Subspace l, v;
        std::optional<RatMatrix> back;  // maps the ticket's vectors to the caller's space
        std::vector<Vec> dec;
        bool dead = false;
    };
    std::vector<Ticket> tickets;
    tickets.push_back({w, l, v, std::nullopt, dec0 ? *dec0 : std::vector<Vec>{}, false});
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        SearchRng rng(seed);
        const RatMatrix t = rng.unimodular(d, d);
        const auto tinv = inverse(t);
        if (!tinv) continue;
        Ticket tk;
        tk.w = pullback(t, w);
        auto move_space = [&](const Subspace& s) {
            std::vector<Vec> rows;
            for (const auto& b : s.basis()) rows.push_back(detail::primitive(mat_vec(*tinv, b)));
            return Subspace::span(d, rows);
        };
        tk.l = move_space(l);
        tk.v = move_space(v);
        tk.back = t;
        if (dec0)
            for (const auto& x : *dec0) tk.dec.push_back(detail::primitive(mat_vec(*tinv, x)));
        tickets.push_back(std::move(tk));
    }
#ifdef MIDFORM_TRACE
    std::fprintf(stderr, "[wrap] %zu tickets built\n", tickets.size());
#endif

    // Schedule: the original coordinates get the lion's share of the budget
    // (re-coordinatized instances carry much larger integer entries, so their
    // per-candidate cost dwarfs the original's); the reseeded tickets are a
    // rescue lane that only runs once the direct search is exhausted.
    std::vector<std::pair<std::size_t, int>> schedule = {{0, 60}, {0, 4800}};
    for (std::size_t i = 1; i < tickets.size(); ++i) schedule.emplace_back(i, 60);
    for (std::size_t i = 1; i < tickets.size(); ++i) schedule.emplace_back(i, 600);

    std::vector<Vec> vecs;
    bool done = false;
    std::string last;
    for (const auto& [ti, rung] : schedule) {
        auto& tk = tickets[ti];
        if (tk.dead) continue;
#ifdef MIDFORM_TRACE
        std::fprintf(stderr, "[wrap] rung=%d ticket=%zu start\n", rung, ti);
        const auto tr0 = std::chrono::steady_clock::now();
#endif
        try {
            int budget = rung;
            auto got = detail::complement_worker(tk.w, tk.l, tk.v, r, budget,
                                                 tk.dec.empty() ? nullptr : &tk.dec);
            vecs.clear();
            vecs.reserve(got.size());
            for (const auto& x : got)
                vecs.push_back(tk.back ? mat_vec(*tk.back, x) : x);
            done = true;
        } catch (const std::logic_error& e) {
            last = e.what();
            // a search that failed without running out of budget was
            // complete: deeper retries cannot change its outcome
            if (last.find("budget exhausted") == std::string::npos) tk.dead = true;
        }
#ifdef MIDFORM_TRACE
        std::fprintf(stderr, "[wrap] rung=%d ticket=%zu %s %.2fs\n", rung, ti,
                     done ? "SUCCESS" : "fail",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - tr0).count());
#endif
        if (done) break;
    }
    if (!done) throw std::logic_error("complement_n_isotropic: search exhausted (" + last + ")");
    ComplementResult res;
    res.f = Subspace::span(d, vecs);
    res.f_cap_v = intersect(res.f, v);

    bool ok = (res.f.dim() == d - l.dim());
    ok = ok && intersect(res.f, l).dim() == 0;
    ok = ok && sum(res.f, l).dim() == d;
    ok = ok && classify_isotropy(res.f, w, n).k_isotropic;
    if (r == 1) {
        ok = ok && kernel(w).contains(res.f_cap_v);
    } else {
        ok = ok && classify_isotropy(res.f_cap_v, w, r - 1).k_isotropic;
    }
    ok = ok && sum(res.f_cap_v, l) == v;
    res.verified = ok;
    if (!ok) throw std::logic_error("complement_n_isotropic: postcondition verification failed");
    return res;
}

}  // namespace midform
