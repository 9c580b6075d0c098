#pragma once

#include "analysis.hpp"
#include "form.hpp"
#include "subspace.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace midform {

/// A ready-made form together with its designated structure subspaces.
/// Nothing here is trusted by the analyzers: tests and reports re-verify the
/// advertised properties from scratch.
struct CatalogEntry {
    std::string name;
    AlternatingForm form;
    std::vector<std::string> coordinate_names;
    Subspace l;                  // designated maximal isotropic decomposable subspace
    Subspace v;                  // designated envelope, r-isotropic with l <= v
    int v_isotropy = 1;          // the r of v
    Subspace f;                  // designated complement of l
    std::vector<int> x_indices;  // base/horizontal coordinates (1-based)

    int degree() const { return form.degree(); }
    int n() const { return form.degree() - 1; }
};

/// Multisymplectic prototype on n base coordinates, N fields and their
/// momenta: sum_{i,mu} dq^i ^ dp_i^mu ^ d^n x_mu  -  dp ^ d^n x, on dimension
/// n + N + 1 + nN with coordinates ordered (x^1..x^n, q^1..q^N, p, p_i^mu).
/// d^n x_mu denotes the contraction of d^n x with the mu-th base direction.
inline CatalogEntry omega0(int n, int N) {
    if (n < 1 || N < 1) throw std::invalid_argument("omega0: needs n, N >= 1");
    const int d = n + N + 1 + n * N;
    CatalogEntry e;
    e.name = "omega0(" + std::to_string(n) + "," + std::to_string(N) + ")";

    auto xpos = [&](int mu) { return mu; };                              // 1..n
    auto qpos = [&](int i) { return n + i; };                            // 1..N
    const int ppos = n + N + 1;
    auto pmu = [&](int i, int mu) { return n + N + 1 + (i - 1) * n + mu; };

    for (int mu = 1; mu <= n; ++mu) e.coordinate_names.push_back("x^" + std::to_string(mu));
    for (int i = 1; i <= N; ++i) e.coordinate_names.push_back("q^" + std::to_string(i));
    e.coordinate_names.push_back("p");
    for (int i = 1; i <= N; ++i)
        for (int mu = 1; mu <= n; ++mu)
            e.coordinate_names.push_back("p_" + std::to_string(i) + "^" + std::to_string(mu));

    AlternatingForm w(d, n + 1);
    for (int i = 1; i <= N; ++i)
        for (int mu = 1; mu <= n; ++mu) {
            IndexTuple t{qpos(i), pmu(i, mu)};
            for (int nu = 1; nu <= n; ++nu)
                if (nu != mu) t.push_back(xpos(nu));
            w.add_term(t, (mu % 2) ? 1 : -1);  // sign of contracting d^n x with the mu-th slot
        }
    IndexTuple vol{ppos};
    for (int nu = 1; nu <= n; ++nu) vol.push_back(xpos(nu));
    w.add_term(vol, -1);
    e.form = std::move(w);

    std::vector<int> lidx{ppos}, qidx, xidx;
    for (int i = 1; i <= N; ++i)
        for (int mu = 1; mu <= n; ++mu) lidx.push_back(pmu(i, mu));
    for (int i = 1; i <= N; ++i) qidx.push_back(qpos(i));
    for (int mu = 1; mu <= n; ++mu) xidx.push_back(xpos(mu));

    e.l = Subspace::coordinate_span(d, lidx);
    std::vector<int> vidx = lidx;
    vidx.insert(vidx.end(), qidx.begin(), qidx.end());
    e.v = Subspace::coordinate_span(d, vidx);
    e.v_isotropy = 2;
    std::vector<int> fidx = qidx;
    fidx.insert(fidx.end(), xidx.begin(), xidx.end());
    e.f = Subspace::coordinate_span(d, fidx);
    e.x_indices = xidx;
    return e;
}

/// omega0 with only the momentum terms listed in `kept` (pairs (i, mu)); the
/// volume term is always present.  Dropped directions join the kernel, so the
/// designated subspace is enlarged by the fully dropped field directions.
inline CatalogEntry omega0_constrained(int n, int N, const std::set<std::pair<int, int>>& kept) {
    CatalogEntry base = omega0(n, N);
    const int d = base.form.dimension();
    auto qpos = [&](int i) { return n + i; };
    const int ppos = n + N + 1;
    auto pmu = [&](int i, int mu) { return n + N + 1 + (i - 1) * n + mu; };

    AlternatingForm w(d, n + 1);
    for (const auto& [i, mu] : kept) {
        if (i < 1 || i > N || mu < 1 || mu > n)
            throw std::invalid_argument("omega0_constrained: index pair out of range");
        IndexTuple t{qpos(i), pmu(i, mu)};
        for (int nu = 1; nu <= n; ++nu)
            if (nu != mu) t.push_back(nu);
        w.add_term(t, (mu % 2) ? 1 : -1);
    }
    IndexTuple vol{ppos};
    for (int nu = 1; nu <= n; ++nu) vol.push_back(nu);
    w.add_term(vol, -1);

    CatalogEntry e;
    e.name = "omega0_constrained(" + std::to_string(n) + "," + std::to_string(N) + ")";
    e.form = std::move(w);
    e.coordinate_names = base.coordinate_names;
    e.x_indices = base.x_indices;

    std::vector<int> lidx{ppos};
    for (int i = 1; i <= N; ++i)
        for (int mu = 1; mu <= n; ++mu) lidx.push_back(pmu(i, mu));
    std::vector<int> live_q, dead_q;
    for (int i = 1; i <= N; ++i) {
        bool live = false;
        for (int mu = 1; mu <= n; ++mu)
            if (kept.count({i, mu})) live = true;
        (live ? live_q : dead_q).push_back(qpos(i));
    }
    // fully dropped field directions are kernel directions, hence belong to l
    lidx.insert(lidx.end(), dead_q.begin(), dead_q.end());
    e.l = Subspace::coordinate_span(d, lidx);
    std::vector<int> vidx = lidx;
    vidx.insert(vidx.end(), live_q.begin(), live_q.end());
    e.v = Subspace::coordinate_span(d, vidx);
    e.v_isotropy = 2;
    std::vector<int> fidx = live_q;
    fidx.insert(fidx.end(), e.x_indices.begin(), e.x_indices.end());
    e.f = Subspace::coordinate_span(d, fidx);
    return e;
}

/// 4-form on Q^11 whose minimal basis length (4) exceeds the dimension of its
/// maximal isotropic decomposable subspaces (3):
///   dp1^dq1^dx11^dx21 + dp2^dq2^dx12^dx22 + dp3^(dq1+dq2)^dx13^dx23
/// with coordinates (p1,p2,p3,q1,q2,x11,x21,x12,x22,x13,x23).
inline CatalogEntry example_r11() {
    CatalogEntry e;
    e.name = "r11";
    e.coordinate_names = {"p_1", "p_2", "p_3", "q^1", "q^2", "x_1^1", "x_2^1", "x_1^2", "x_2^2", "x_1^3", "x_2^3"};
    AlternatingForm w(11, 4);
    w.add_term({1, 4, 6, 7}, 1);
    w.add_term({2, 5, 8, 9}, 1);
    w.add_term({3, 4, 10, 11}, 1);
    w.add_term({3, 5, 10, 11}, 1);
    e.form = std::move(w);
    e.l = Subspace::coordinate_span(11, {1, 2, 3});
    e.v = Subspace::coordinate_span(11, {1, 2, 3, 4, 5});
    e.v_isotropy = 2;
    e.f = Subspace::coordinate_span(11, {4, 5, 6, 7, 8, 9, 10, 11});
    e.x_indices = {6, 7, 8, 9, 10, 11};
    return e;
}

/// One momentum per n-tuple of the N+n field coordinates:
///   sum_{i1<...<in} dp_{(i1..in)} ^ dq^{i1} ^ ... ^ dq^{in}
/// on dimension (N+n) + C(N+n, n), the maximal-dimension situation where the
/// contraction image of the momentum span fills the whole n-form algebra of
/// its annihilator.
inline CatalogEntry max_dim_example(int n, int N) {
    const int K = N + n;
    const auto tuples = all_tuples(K, n);
    const int d = K + static_cast<int>(tuples.size());
    CatalogEntry e;
    e.name = "max_dim(" + std::to_string(n) + "," + std::to_string(N) + ")";
    for (int i = 1; i <= K; ++i) e.coordinate_names.push_back("q^" + std::to_string(i));
    for (const auto& t : tuples) {
        std::string nm = "p_(";
        for (std::size_t j = 0; j < t.size(); ++j) nm += (j ? "," : "") + std::to_string(t[j]);
        e.coordinate_names.push_back(nm + ")");
    }
    AlternatingForm w(d, n + 1);
    std::vector<int> lidx;
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        IndexTuple term{K + static_cast<int>(r) + 1};
        for (int qi : tuples[r]) term.push_back(qi);
        w.add_term(term, 1);
        lidx.push_back(K + static_cast<int>(r) + 1);
    }
    e.form = std::move(w);
    e.l = Subspace::coordinate_span(d, lidx);
    e.v = e.l;
    e.v_isotropy = 1;
    std::vector<int> fidx;
    for (int i = 1; i <= K; ++i) fidx.push_back(i);
    e.f = Subspace::coordinate_span(d, fidx);
    e.x_indices = {};
    return e;
}

/// Block sum: both forms embedded on disjoint coordinate blocks and added.
/// Designated subspaces are the block sums of the factors'.
inline CatalogEntry direct_sum(const CatalogEntry& a, const CatalogEntry& b) {
    if (a.form.degree() != b.form.degree())
        throw std::invalid_argument("direct_sum: degrees differ");
    const int d1 = a.form.dimension(), d2 = b.form.dimension();
    const int d = d1 + d2;
    CatalogEntry e;
    e.name = a.name + " (+) " + b.name;
    for (const auto& nm : a.coordinate_names) e.coordinate_names.push_back("a:" + nm);
    for (const auto& nm : b.coordinate_names) e.coordinate_names.push_back("b:" + nm);

    RatMatrix proj1(d1, d), proj2(d2, d);
    for (int i = 0; i < d1; ++i) proj1.at(i, i) = 1;
    for (int i = 0; i < d2; ++i) proj2.at(i, d1 + i) = 1;
    e.form = form_add(pullback(proj1, a.form), pullback(proj2, b.form));

    auto embed = [&](const Subspace& s, int offset) {
        std::vector<Vec> rows;
        for (const auto& v : s.basis()) {
            Vec w = zero_vec(d);
            for (int i = 0; i < s.ambient(); ++i) w[static_cast<std::size_t>(offset + i)] = v[static_cast<std::size_t>(i)];
            rows.push_back(std::move(w));
        }
        return rows;
    };
    auto combine = [&](const Subspace& s1, const Subspace& s2) {
        std::vector<Vec> rows = embed(s1, 0);
        auto r2 = embed(s2, d1);
        rows.insert(rows.end(), r2.begin(), r2.end());
        return Subspace::span(d, rows);
    };
    e.l = combine(a.l, b.l);
    e.v = combine(a.v, b.v);
    e.v_isotropy = std::max(a.v_isotropy, b.v_isotropy);
    e.f = combine(a.f, b.f);
    e.x_indices = a.x_indices;
    for (int i : b.x_indices) e.x_indices.push_back(d1 + i);
    return e;
}

/// Adds a horizontal perturbation supported on the base coordinates only.
/// Throws if eta touches any non-base direction; the result keeps the same
/// designated subspaces (callers re-verify the classification).
inline CatalogEntry add_horizontal(const CatalogEntry& entry, const AlternatingForm& eta) {
    if (eta.dimension() != entry.form.dimension() || eta.degree() != entry.form.degree())
        throw std::invalid_argument("add_horizontal: shape mismatch");
    const Subspace xspan = Subspace::coordinate_span(eta.dimension(), entry.x_indices, true);
    if (!eta.is_zero() && !xspan.contains(support(eta)))
        throw std::invalid_argument("add_horizontal: perturbation is not horizontal");
    CatalogEntry e = entry;
    e.name = entry.name + " + horizontal";
    e.form = form_add(entry.form, eta);
    return e;
}

/// The standard fixture list served by the command line tool.
inline std::vector<CatalogEntry> catalog_all() {
    std::vector<CatalogEntry> v;
    v.push_back(omega0(1, 1));
    v.push_back(omega0(2, 1));
    v.push_back(omega0(2, 2));
    v.push_back(omega0(3, 2));
    v.push_back(example_r11());
    v.push_back(max_dim_example(1, 1));
    v.push_back(max_dim_example(2, 1));
    v.push_back(omega0_constrained(2, 2, {{1, 1}}));
    v.push_back(direct_sum(omega0(1, 1), omega0(1, 1)));
    return v;
}

}  // namespace midform
