#include "midform/form.hpp"
#include "midform/subspace.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace midform;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle: evaluate a form on vectors straight from the definition,
// via permutation expansion of the k x k determinants.  No library code path
// beyond coefficient storage is involved.
// ---------------------------------------------------------------------------

Rational naive_det(const std::vector<std::vector<Rational>>& m) {
    const std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rational det = 0;
    do {
        int sign = 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Rational prod = 1;
        for (std::size_t i = 0; i < n; ++i) prod *= m[i][perm[i]];
        det += sign > 0 ? prod : -prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

Rational oracle_eval(const AlternatingForm& a, const std::vector<Vec>& vs) {
    REQUIRE(static_cast<int>(vs.size()) == a.degree());
    Rational total = 0;
    for (const auto& [t, c] : a.terms()) {
        std::vector<std::vector<Rational>> m(t.size(), std::vector<Rational>(t.size()));
        for (std::size_t r = 0; r < t.size(); ++r)
            for (std::size_t s = 0; s < t.size(); ++s)
                m[r][s] = vs[s][static_cast<std::size_t>(t[r] - 1)];
        total += c * naive_det(m);
    }
    return total;
}

// shuffle-sum evaluation of (a ^ b)(vs) using only oracle_eval
Rational oracle_wedge_eval(const AlternatingForm& a, const AlternatingForm& b, const std::vector<Vec>& vs) {
    const int p = a.degree(), q = b.degree();
    REQUIRE(static_cast<int>(vs.size()) == p + q);
    std::vector<int> pick(static_cast<std::size_t>(p + q), 0);
    std::fill(pick.begin(), pick.begin() + p, 1);
    std::sort(pick.begin(), pick.end());
    Rational total = 0;
    // iterate over all p-subsets as positions handed to a (the rest go to b)
    do {
        std::vector<Vec> va, vb;
        std::vector<int> idx_a, idx_b;
        for (int i = 0; i < p + q; ++i)
            (pick[static_cast<std::size_t>(i)] ? (va.push_back(vs[static_cast<std::size_t>(i)]), idx_a.push_back(i))
                                               : (vb.push_back(vs[static_cast<std::size_t>(i)]), idx_b.push_back(i)));
        std::vector<int> concat = idx_a;
        concat.insert(concat.end(), idx_b.begin(), idx_b.end());
        int sign = 1;
        for (std::size_t i = 0; i < concat.size(); ++i)
            for (std::size_t j = i + 1; j < concat.size(); ++j)
                if (concat[i] > concat[j]) sign = -sign;
        const Rational v = oracle_eval(a, va) * oracle_eval(b, vb);
        total += sign > 0 ? v : -v;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return total;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    Rational rational() {
        std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
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

    RatMatrix matrix(int r, int c) {
        RatMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m.at(i, j) = rational();
        return m;
    }
};

}  // namespace

TEST_CASE("rational parsing and formatting") {
    CHECK(to_string(rat(3, 6)) == "1/2");
    CHECK(to_string(rat(-8, 2)) == "-4");
    CHECK(parse_rational("22/7").value() == rat(22, 7));
    CHECK(parse_rational("-5").value() == rat(-5));
    CHECK(parse_rational("0") == Rational(0));
    CHECK_FALSE(parse_rational("1/0").has_value());
    CHECK_FALSE(parse_rational("a/b").has_value());
    CHECK_FALSE(parse_rational("1.5").has_value());
    CHECK_FALSE(parse_rational("").has_value());
    CHECK(parse_rational("12/8").value() == rat(3, 2));
}

TEST_CASE("index tuples") {
    IndexTuple t{3, 1, 2};
    CHECK(sort_with_sign(t) == 1);
    CHECK(t == IndexTuple{1, 2, 3});
    IndexTuple u{2, 1, 3};
    CHECK(sort_with_sign(u) == -1);
    IndexTuple dup{2, 2};
    CHECK(sort_with_sign(dup) == 0);
    CHECK(all_tuples(4, 2).size() == 6);
    CHECK(all_tuples(5, 0).size() == 1);
    CHECK(binomial(11, 4) == 330);
}

TEST_CASE("form construction canonicalizes") {
    AlternatingForm f(4, 2);
    f.add_term({2, 1}, rat(1));
    CHECK(f.coefficient({1, 2}) == rat(-1));
    f.add_term({1, 2}, rat(1));
    CHECK(f.is_zero());
    f.add_term({3, 3}, rat(5));  // repeated index contributes nothing
    CHECK(f.is_zero());
}

TEST_CASE("multi-contraction convention") {
    // the fixed convention: multi_contract({v1,...,vk}, a) plugs v1 into the
    // first slot, so full contraction of e^1 ^ e^2 with (e1, e2) gives +1
    AlternatingForm f(2, 2);
    f.add_term({1, 2}, rat(1));
    CHECK(eval(f, {unit_vec(2, 0), unit_vec(2, 1)}) == rat(1));
    CHECK(eval(f, {unit_vec(2, 1), unit_vec(2, 0)}) == rat(-1));
}

TEST_CASE("wedge and contraction agree with the naive oracle") {
    constexpr int kRounds = 200;
    Rng rng(0xfeedbeef);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 3 + static_cast<int>(rng.gen() % 3);  // 3..5
        const int p = 1 + static_cast<int>(rng.gen() % 2);
        const int q = 1 + static_cast<int>(rng.gen() % 2);
        const AlternatingForm a = rng.form(d, p, 3);
        const AlternatingForm b = rng.form(d, q, 3);

        if (p + q <= d) {
            std::vector<Vec> vs;
            for (int i = 0; i < p + q; ++i) vs.push_back(rng.vec(d));
            CHECK(oracle_eval(wedge(a, b), vs) == oracle_wedge_eval(a, b, vs));
        }

        const Vec v = rng.vec(d);
        if (p + 1 <= d) {
            std::vector<Vec> ws;
            for (int i = 0; i < p - 1; ++i) ws.push_back(rng.vec(d));
            std::vector<Vec> all{v};
            all.insert(all.end(), ws.begin(), ws.end());
            CHECK(oracle_eval(contract(v, a), ws) == oracle_eval(a, all));
        }
    }
}

TEST_CASE("pullback matches composition with the map") {
    constexpr int kRounds = 100;
    Rng rng(0x5eed);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 4, dnew = 3, k = 2;
        const AlternatingForm a = rng.form(d, k, 3);
        const RatMatrix m = rng.matrix(d, dnew);
        std::vector<Vec> ws, mws;
        for (int i = 0; i < k; ++i) {
            ws.push_back(rng.vec(dnew));
            mws.push_back(mat_vec(m, ws.back()));
        }
        CHECK(oracle_eval(pullback(m, a), ws) == oracle_eval(a, mws));
    }

    SECTION("functoriality") {
        Rng rng2(0xc0ffee);
        const AlternatingForm a = rng2.form(5, 2, 4);
        const RatMatrix m = rng2.matrix(5, 4);  // map Q^4 -> Q^5
        const RatMatrix n = rng2.matrix(4, 3);  // map Q^3 -> Q^4
        CHECK(pullback(n, pullback(m, a)) == pullback(mat_mul(m, n), a));
    }
}

TEST_CASE("algebra identities") {
    constexpr int kRounds = 150;
    Rng rng(0xabcdef);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 4 + static_cast<int>(rng.gen() % 2);
        const int p = 1 + static_cast<int>(rng.gen() % 2);
        const int q = 1 + static_cast<int>(rng.gen() % 2);
        const AlternatingForm a = rng.form(d, p, 3);
        const AlternatingForm b = rng.form(d, q, 3);
        const Vec v = rng.vec(d);

        // graded anticommutativity
        const int sign = (p * q) % 2 ? -1 : 1;
        CHECK(wedge(a, b) == form_scale(sign, wedge(b, a)));

        // contraction is an antiderivation
        const AlternatingForm lhs = contract(v, wedge(a, b));
        AlternatingForm rhs = wedge(contract(v, a), b);
        rhs = form_add(rhs, form_scale(p % 2 ? -1 : 1, wedge(a, contract(v, b))));
        CHECK(lhs == rhs);

        // i_v of i_v vanishes
        if (p >= 2) CHECK(contract(v, contract(v, a)).is_zero());
    }
}

TEST_CASE("exact linear algebra") {
    Rng rng(0x11223344);

    SECTION("nullspace vectors solve m x = 0") {
        for (int round = 0; round < 50; ++round) {
            RatMatrix m = rng.matrix(4, 6);
            const auto ns = nullspace(m);
            CHECK(static_cast<int>(ns.size()) == 6 - rank(m));
            for (const auto& v : ns) CHECK(is_zero(mat_vec(m, v)));
        }
    }

    SECTION("solve finds consistent solutions and flags inconsistent ones") {
        for (int round = 0; round < 50; ++round) {
            RatMatrix m = rng.matrix(5, 3);
            const Vec x = rng.vec(3);
            const Vec b = mat_vec(m, x);
            const auto sol = solve(m, b);
            REQUIRE(sol.has_value());
            CHECK(mat_vec(m, *sol) == b);
        }
        RatMatrix m(2, 1);
        m.at(0, 0) = 1;
        m.at(1, 0) = 1;
        CHECK_FALSE(solve(m, Vec{Rational(1), Rational(2)}).has_value());
    }

    SECTION("inverse") {
        RatMatrix m = rng.matrix(4, 4);
        while (rank(m) < 4) m = rng.matrix(4, 4);
        const auto inv = inverse(m);
        REQUIRE(inv.has_value());
        CHECK(mat_mul(m, *inv) == RatMatrix::identity(4));
        CHECK(determinant(m) * determinant(*inv) == Rational(1));
        RatMatrix singular(2, 2);
        singular.at(0, 0) = 1;
        singular.at(1, 0) = 2;
        CHECK_FALSE(inverse(singular).has_value());
        CHECK(determinant(singular) == Rational(0));
    }
}

TEST_CASE("subspace lattice") {
    constexpr int kRounds = 100;
    Rng rng(0x77777777);
    for (int round = 0; round < kRounds; ++round) {
        const int d = 5;
        std::vector<Vec> va, vb;
        for (int i = 0; i < 2; ++i) va.push_back(rng.vec(d));
        for (int i = 0; i < 3; ++i) vb.push_back(rng.vec(d));
        const Subspace a = Subspace::span(d, va);
        const Subspace b = Subspace::span(d, vb);

        // dim(a + b) + dim(a ^ b) = dim a + dim b
        CHECK(sum(a, b).dim() + intersect(a, b).dim() == a.dim() + b.dim());
        CHECK(sum(a, b).contains(a));
        CHECK(a.contains(intersect(a, b)));

        // annihilator: dimension count and involution
        const Subspace ann = annihilator(a);
        CHECK(ann.dim() == d - a.dim());
        CHECK(annihilator(ann) == a);
        for (const auto& f : ann.basis())
            for (const auto& v : a.basis()) CHECK(dot(f, v) == Rational(0));
    }

    SECTION("canonical representation makes equality structural") {
        const int d = 4;
        const Subspace s1 = Subspace::span(d, {Vec{rat(1), rat(1), rat(0), rat(0)}, Vec{rat(0), rat(2), rat(0), rat(0)}});
        const Subspace s2 = Subspace::span(d, {Vec{rat(3), rat(7), rat(0), rat(0)}, Vec{rat(1), rat(0), rat(0), rat(0)}});
        CHECK(s1 == s2);
        CHECK(s1.basis() == s2.basis());
    }

    SECTION("standard complement and basis extension") {
        const Subspace s = Subspace::span(4, {Vec{rat(1), rat(2), rat(0), rat(5)}});
        const Subspace c = standard_complement(s);
        CHECK(c.dim() == 3);
        CHECK(intersect(s, c).dim() == 0);
        CHECK(sum(s, c).dim() == 4);
        const auto full = extend_to_basis(s.basis(), 4);
        CHECK(static_cast<int>(full.size()) == 4);
        CHECK(Subspace::span(4, full) == Subspace::full(4));
    }
}
