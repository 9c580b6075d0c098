#include "midform/analysis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace midform;

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    Rational rational(int lo = -4, int hi = 4) {
        std::uniform_int_distribution<int> num(lo, hi), den(1, 2);
        return Rational(num(gen), den(gen));
    }

    Vec vec(int d) {
        Vec v(static_cast<std::size_t>(d));
        for (auto& x : v) x = rational();
        return v;
    }

    AlternatingForm form(int d, int k, int nterms) {
        AlternatingForm f(d, k);
        std::uniform_int_distribution<int> coord(1, d);
        for (int t = 0; t < nterms; ++t) {
            IndexTuple tup;
            while (static_cast<int>(tup.size()) < k) {
                int c = coord(gen);
                if (tuple_find(tup, c) < 0) tuple_insert(tup, c);
            }
            f.add_term(tup, rational());
        }
        return f;
    }

    /// wedge of k random 1-forms: decomposable by construction
    AlternatingForm decomposable_form(int d, int k) {
        AlternatingForm acc(d, 0);
        acc.add_term({}, 1);
        for (int i = 0; i < k; ++i) {
            AlternatingForm oneform(d, 1);
            for (int j = 1; j <= d; ++j) oneform.add_term({j}, rational());
            acc = wedge(acc, oneform);
        }
        return acc;
    }
};

/// Independent decomposability oracle: the Pluecker criterion.  A nonzero
/// k-form b is decomposable iff (i_X b) ^ b = 0 for every (k-1)-fold basis
/// contraction X.
bool pluecker_decomposable(const AlternatingForm& b) {
    if (b.is_zero()) return true;
    const int d = b.dimension(), k = b.degree();
    if (k <= 1) return true;
    bool ok = true;
    for_each_tuple(d, k - 1, [&](const IndexTuple& t) {
        if (!ok) return;
        std::vector<Vec> vs;
        for (int i : t) vs.push_back(unit_vec(d, i - 1));
        if (!wedge(multi_contract(vs, b), b).is_zero()) ok = false;
    });
    return ok;
}

/// Independent rank computation by plain fraction-free-ish elimination,
/// sharing no code with the library RREF.
int oracle_rank(std::vector<std::vector<Rational>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    int rk = 0;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < rows; ++c) {
        std::size_t p = row;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[row]);
        for (std::size_t i = row + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            const Rational f = m[i][c] / m[row][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        ++row;
        ++rk;
    }
    return rk;
}

AlternatingForm wedge_of_factors(int d, const std::vector<Vec>& factors) {
    AlternatingForm acc(d, 0);
    acc.add_term({}, 1);
    for (const auto& f : factors) {
        AlternatingForm oneform(d, 1);
        for (int i = 0; i < d; ++i)
            if (f[static_cast<std::size_t>(i)] != 0) oneform.add_term({i + 1}, f[static_cast<std::size_t>(i)]);
        acc = wedge(acc, oneform);
    }
    return acc;
}

/// number of monomials of b in the dual basis given by `rows`
int count_in_dual_basis(const AlternatingForm& b, const std::vector<Vec>& rows) {
    const RatMatrix f = RatMatrix::from_rows(rows);
    const auto binv = inverse(f);
    REQUIRE(binv.has_value());
    return static_cast<int>(pullback(*binv, b).terms().size());
}

}  // namespace

TEST_CASE("kernel and support on a fixed 2-form") {
    // dq ^ dp on coordinates (q, p, x): kernel is the x-axis
    AlternatingForm w(3, 2);
    w.add_term({1, 2}, 1);
    const Subspace k = kernel(w);
    CHECK(k.dim() == 1);
    CHECK(k.contains(unit_vec(3, 2)));
    const Subspace s = support(w);
    CHECK(s.dim() == 2);
    CHECK(s.dual());
    CHECK(s.contains(unit_vec(3, 0)));
    CHECK(s.contains(unit_vec(3, 1)));

    const AlternatingForm zero(3, 2);
    CHECK(kernel(zero) == Subspace::full(3));
    CHECK(support(zero).dim() == 0);
}

TEST_CASE("support and kernel are dual on random forms") {
    constexpr int kRounds = 200;
    Rng rng(0x1001);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 4 + static_cast<int>(rng.gen() % 3);
        const int k = 2 + static_cast<int>(rng.gen() % 2);
        const AlternatingForm w = rng.form(d, k, 3);
        const Subspace ker = kernel(w);
        const Subspace sup = support(w);
        if (w.is_zero()) continue;
        CHECK(sup.dim() + ker.dim() == d);
        CHECK(annihilator(sup) == ker);
        for (const auto& v : ker.basis()) CHECK(contract(v, w).is_zero());
    }
}

TEST_CASE("decomposability matches the Pluecker oracle") {
    SECTION("fixed examples") {
        AlternatingForm nd(4, 2);
        nd.add_term({1, 2}, 1);
        nd.add_term({3, 4}, 1);
        CHECK_FALSE(is_decomposable(nd).decomposable);

        AlternatingForm dec(4, 2);  // (e1 + e2) ^ e3
        dec.add_term({1, 3}, 1);
        dec.add_term({2, 3}, 1);
        const auto r = is_decomposable(dec);
        REQUIRE(r.decomposable);
        REQUIRE(r.factors.size() == 2);
        CHECK(wedge_of_factors(4, r.factors) == dec);
    }

    SECTION("random forms, both constructions") {
        constexpr int kRounds = 150;
        Rng rng(0x2002);
        for (int round = 0; round < kRounds; ++round) {
            const int d = 4 + static_cast<int>(rng.gen() % 3);
            const int k = 2 + static_cast<int>(rng.gen() % 2);
            const AlternatingForm sparse = rng.form(d, k, 2 + static_cast<int>(rng.gen() % 3));
            const auto res = is_decomposable(sparse);
            CHECK(res.decomposable == pluecker_decomposable(sparse));
            if (res.decomposable && !sparse.is_zero())
                CHECK(wedge_of_factors(d, res.factors) == sparse);

            const AlternatingForm built = rng.decomposable_form(d, k);
            const auto res2 = is_decomposable(built);
            CHECK(res2.decomposable);
            if (!built.is_zero()) CHECK(wedge_of_factors(d, res2.factors) == built);
        }
    }
}

TEST_CASE("degree-2 length is certified at skew-rank over two") {
    constexpr int kRounds = 100;
    Rng rng(0x3003);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 4 + static_cast<int>(rng.gen() % 5);  // 4..8
        const AlternatingForm b = rng.form(d, 2, 1 + static_cast<int>(rng.gen() % 5));
        if (b.is_zero()) continue;

        std::vector<std::vector<Rational>> skew(static_cast<std::size_t>(d),
                                                std::vector<Rational>(static_cast<std::size_t>(d)));
        for (const auto& [t, c] : b.terms()) {
            skew[static_cast<std::size_t>(t[0] - 1)][static_cast<std::size_t>(t[1] - 1)] = c;
            skew[static_cast<std::size_t>(t[1] - 1)][static_cast<std::size_t>(t[0] - 1)] = -c;
        }
        const int expected = oracle_rank(skew) / 2;

        const LengthBounds lb = length_bounds(b);
        CHECK(lb.certified);
        CHECK(lb.lower == expected);
        CHECK(lb.upper == expected);
        REQUIRE(static_cast<int>(lb.witness_dual_basis.size()) == d);
        CHECK(count_in_dual_basis(b, lb.witness_dual_basis) == lb.upper);
    }
}

TEST_CASE("length of decomposable and zero forms") {
    Rng rng(0x4004);
    const AlternatingForm zero(5, 3);
    const LengthBounds z = length_bounds(zero);
    CHECK(z.certified);
    CHECK(z.upper == 0);

    for (int round = 0; round < 30; ++round) {
        const AlternatingForm dec = rng.decomposable_form(5, 3);
        if (dec.is_zero()) continue;
        const LengthBounds lb = length_bounds(dec);
        CHECK(lb.certified);
        CHECK(lb.upper == 1);
        CHECK(count_in_dual_basis(dec, lb.witness_dual_basis) == 1);
    }
}

TEST_CASE("k-orthogonal subspaces") {
    // symplectic form on Q^4
    AlternatingForm w(4, 2);
    w.add_term({1, 3}, 1);
    w.add_term({2, 4}, 1);

    SECTION("line in a symplectic space") {
        const Subspace l = Subspace::span(4, {unit_vec(4, 0)});
        const Subspace orth = k_orthogonal(l, w, 1);
        // i_{e1} w = e^3, so the condition is v_3 = 0
        CHECK(orth.dim() == 3);
        CHECK(orth.contains(unit_vec(4, 0)));
        CHECK(orth.contains(unit_vec(4, 1)));
        CHECK(orth.contains(unit_vec(4, 3)));
        CHECK_FALSE(orth.contains(unit_vec(4, 2)));
    }

    SECTION("k = 0 gives the kernel") {
        const Subspace l = Subspace::span(4, {unit_vec(4, 0)});
        CHECK(k_orthogonal(l, w, 0) == kernel(w));
    }

    SECTION("kernel always sits inside the orthogonal") {
        Rng rng(0x5005);
        for (int round = 0; round < 50; ++round) {
            const int d = 5;
            const AlternatingForm f = rng.form(d, 3, 2);
            if (f.is_zero()) continue;
            const Subspace l = Subspace::span(d, {rng.vec(d), rng.vec(d)});
            for (int k = 0; k <= 2; ++k) CHECK(k_orthogonal(l, f, k).contains(kernel(f)));
        }
    }

    SECTION("membership is definitionally honest") {
        Rng rng(0x6006);
        for (int round = 0; round < 30; ++round) {
            const int d = 5;
            const AlternatingForm f = rng.form(d, 3, 3);
            const Subspace l = Subspace::span(d, {rng.vec(d), rng.vec(d)});
            const int k = 1;
            if (l.dim() < k) continue;
            const Subspace orth = k_orthogonal(l, f, k);
            for (const auto& v : orth.basis())
                for (const auto& u : l.basis()) CHECK(contract(v, contract(u, f)).is_zero());
        }
    }
}

TEST_CASE("isotropy classification") {
    SECTION("Lagrangian plane of a symplectic form is maximal") {
        AlternatingForm w(4, 2);
        w.add_term({1, 3}, 1);
        w.add_term({2, 4}, 1);
        const Subspace lag = Subspace::span(4, {unit_vec(4, 0), unit_vec(4, 1)});
        const IsotropyReport rep = classify_isotropy(lag, w, 1);
        CHECK(rep.k_isotropic);
        CHECK(rep.maximal);
        CHECK(rep.strict);  // not inside the (trivial) kernel
        CHECK(rep.kernel_contained);

        const Subspace line = Subspace::span(4, {unit_vec(4, 0)});
        const IsotropyReport rep2 = classify_isotropy(line, w, 1);
        CHECK(rep2.k_isotropic);
        CHECK_FALSE(rep2.maximal);
    }

    SECTION("volume form on Q^3") {
        AlternatingForm vol(3, 3);
        vol.add_term({1, 2, 3}, 1);
        const Subspace l = Subspace::span(3, {unit_vec(3, 0)});
        const IsotropyReport rep = classify_isotropy(l, vol, 1);
        CHECK(rep.k_isotropic);
        CHECK(rep.maximal);
        const Subspace plane = Subspace::span(3, {unit_vec(3, 0), unit_vec(3, 1)});
        const IsotropyReport rep2 = classify_isotropy(plane, vol, 2);
        CHECK(rep2.k_isotropic);
        CHECK(rep2.strict);
    }
}

TEST_CASE("decomposable vectors and basis search") {
    // block sum of two volume 3-forms on Q^6
    AlternatingForm w(6, 3);
    w.add_term({1, 2, 3}, 1);
    w.add_term({4, 5, 6}, 1);

    SECTION("vector decomposability") {
        CHECK(decomposable_vector(unit_vec(6, 0), w).decomposable);
        CHECK(decomposable_vector(unit_vec(6, 3), w).decomposable);
        Vec mixed = add(unit_vec(6, 0), unit_vec(6, 3));
        CHECK_FALSE(decomposable_vector(mixed, w).decomposable);
    }

    SECTION("canonical basis path") {
        const Subspace l = Subspace::span(6, {add(unit_vec(6, 0), unit_vec(6, 3)),
                                              sub(unit_vec(6, 0), unit_vec(6, 3))});
        // the canonical echelon basis of this span is {e1, e4}, which is
        // already decomposable
        const auto basis = decomposable_basis_search(l, w, 2, 7);
        REQUIRE(basis.has_value());
        CHECK(Subspace::span(6, *basis) == l);
        for (const auto& v : *basis) CHECK(decomposable_vector(v, w).decomposable);
    }

    SECTION("honest failure when no decomposable basis exists") {
        // in span(e1, e2 + e4) only multiples of e1 are decomposable
        const Subspace l = Subspace::span(6, {unit_vec(6, 0), add(unit_vec(6, 1), unit_vec(6, 3))});
        CHECK_FALSE(decomposable_basis_search(l, w, 2, 7, 2000).has_value());
    }

    SECTION("integer combinations recover a sheared basis") {
        // transport w through the unimodular shear S: e1 -> e1 + e2,
        // e4 -> e4 + e2.  The decomposable directions of the transported form
        // are S e1 and S e4; the echelon basis of their span mixes them, so
        // the search has to walk the integer-combination shells.
        RatMatrix s = RatMatrix::identity(6);
        s.at(1, 0) = 1;
        s.at(1, 3) = 1;
        const auto t = inverse(s);
        REQUIRE(t.has_value());
        const AlternatingForm wt = pullback(*t, w);
        const Subspace l = Subspace::span(6, {s.col(0), s.col(3)});
        // sanity: the echelon basis itself is not fully decomposable
        bool all_canonical = true;
        for (const auto& v : l.basis())
            if (!decomposable_vector(v, wt).decomposable) all_canonical = false;
        CHECK_FALSE(all_canonical);

        const auto basis = decomposable_basis_search(l, wt, 2, 11);
        REQUIRE(basis.has_value());
        CHECK(Subspace::span(6, *basis) == l);
        for (const auto& v : *basis) CHECK(decomposable_vector(v, wt).decomposable);
    }
}
