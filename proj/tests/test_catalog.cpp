#include <catch2/catch_amalgamated.hpp>

#include "midform/analysis.hpp"
#include "midform/catalog.hpp"

#include <vector>

using namespace midform;

namespace {

// Independent evaluation: expand each term as a k x k determinant of the
// argument coordinates, computed by permutation expansion.
Rational naive_det(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rational det = 0;
    do {
        int inv = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inv;
        Rational prod = 1;
        for (std::size_t i = 0; i < n; ++i) prod *= m[i][perm[i]];
        if (inv % 2) prod = -prod;
        det += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

Rational oracle_eval(const AlternatingForm& a, const std::vector<Vec>& args) {
    Rational total = 0;
    for (const auto& [idx, c] : a.terms()) {
        std::vector<std::vector<Rational>> m(idx.size(), std::vector<Rational>(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t s = 0; s < idx.size(); ++s)
                m[r][s] = args[r][static_cast<std::size_t>(idx[s] - 1)];
        total += c * naive_det(std::move(m));
    }
    return total;
}

int oracle_rank(std::vector<std::vector<Rational>> m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t piv = row;
        while (piv < m.size() && m[piv][col] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[row]);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == row || m[i][col] == 0) continue;
            Rational f = m[i][col] / m[row][col];
            for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

// kernel dimension from scratch: v is in the kernel iff the form vanishes on
// (v, e_J) for every (k-1)-subset J of coordinate directions.
int oracle_kernel_dim(const AlternatingForm& w) {
    const int d = w.dimension();
    std::vector<std::vector<Rational>> rows;
    for_each_tuple(d, w.degree() - 1, [&](const IndexTuple& j) {
        std::vector<Rational> row(static_cast<std::size_t>(d));
        for (int i = 1; i <= d; ++i) {
            std::vector<Vec> args{unit_vec(d, i - 1)};
            for (int jj : j) args.push_back(unit_vec(d, jj - 1));
            row[static_cast<std::size_t>(i - 1)] = oracle_eval(w, args);
        }
        rows.push_back(std::move(row));
    });
    return d - oracle_rank(std::move(rows));
}

void check_designated_structure(const CatalogEntry& e) {
    CAPTURE(e.name);
    const int n = e.n();
    REQUIRE(e.form.degree() == n + 1);
    REQUIRE(e.l.dim() + e.f.dim() == e.form.dimension());
    REQUIRE(intersect(e.l, e.f).dim() == 0);
    REQUIRE(e.v.contains(e.l));

    auto lrep = classify_isotropy(e.l, e.form, 1);
    CHECK(lrep.k_isotropic);
    CHECK(lrep.maximal);
    auto basis = decomposable_basis_search(e.l, e.form);
    REQUIRE(basis.has_value());
    for (const auto& v : *basis) CHECK(decomposable_vector(v, e.form).decomposable);

    auto vrep = classify_isotropy(e.v, e.form, e.v_isotropy);
    CHECK(vrep.k_isotropic);
}

}  // namespace

TEST_CASE("omega0(1,1) is the symplectic plane pairing") {
    auto e = omega0(1, 1);
    REQUIRE(e.form.dimension() == 4);
    REQUIRE(e.form.degree() == 2);
    // coordinates (x, q, p, p_1^1)
    AlternatingForm expect(4, 2);
    expect.add_term({1, 3}, 1);
    expect.add_term({2, 4}, 1);
    CHECK(e.form == expect);
    CHECK(e.l == Subspace::coordinate_span(4, {3, 4}));
    CHECK(kernel(e.form).dim() == 0);
    CHECK(oracle_kernel_dim(e.form) == 0);
    check_designated_structure(e);
}

TEST_CASE("omega0(2,1) matches the hand expansion") {
    auto e = omega0(2, 1);
    REQUIRE(e.form.dimension() == 6);
    // coordinates (x^1, x^2, q, p, p_1^1, p_1^2)
    AlternatingForm expect(6, 3);
    expect.add_term({2, 3, 5}, 1);
    expect.add_term({1, 3, 6}, -1);
    expect.add_term({1, 2, 4}, -1);
    CHECK(e.form == expect);
    CHECK(kernel(e.form).dim() == 0);
    CHECK(oracle_kernel_dim(e.form) == 0);
    check_designated_structure(e);

    auto vrep = classify_isotropy(e.v, e.form, 2);
    CHECK(vrep.strict);
}

TEST_CASE("omega0 family has the advertised shape") {
    for (auto [n, N] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
        auto e = omega0(n, N);
        CAPTURE(n, N);
        REQUIRE(e.form.dimension() == n + N + 1 + n * N);
        CHECK(static_cast<int>(e.form.terms().size()) == n * N + 1);
        CHECK(e.l.dim() == n * N + 1);
        CHECK(kernel(e.form).dim() == 0);
        check_designated_structure(e);
        auto vrep = classify_isotropy(e.v, e.form, 2);
        CHECK(vrep.strict);
    }
}

TEST_CASE("r11 example: three maximal spans, trivial kernel") {
    auto e = example_r11();
    REQUIRE(e.form.dimension() == 11);
    AlternatingForm expect(11, 4);
    expect.add_term({1, 4, 6, 7}, 1);
    expect.add_term({2, 5, 8, 9}, 1);
    expect.add_term({3, 4, 10, 11}, 1);
    expect.add_term({3, 5, 10, 11}, 1);
    CHECK(e.form == expect);
    CHECK(kernel(e.form).dim() == 0);
    CHECK(oracle_kernel_dim(e.form) == 0);
    check_designated_structure(e);

    for (auto idx : std::vector<std::vector<int>>{{1, 2, 3}, {6, 8, 10}, {7, 9, 11}}) {
        auto span = Subspace::coordinate_span(11, idx);
        CAPTURE(idx);
        auto rep = classify_isotropy(span, e.form, 1);
        CHECK(rep.k_isotropic);
        CHECK(rep.maximal);
        auto basis = decomposable_basis_search(span, e.form);
        REQUIRE(basis.has_value());
    }
}

TEST_CASE("constrained omega0(2,2) keeping only (1,1)") {
    auto e = omega0_constrained(2, 2, {{1, 1}});
    REQUIRE(e.form.dimension() == 9);
    // coordinates (x^1, x^2, q^1, q^2, p, p_1^1, p_1^2, p_2^1, p_2^2)
    AlternatingForm expect(9, 3);
    expect.add_term({2, 3, 6}, 1);
    expect.add_term({1, 2, 5}, -1);
    CHECK(e.form == expect);

    auto ker = kernel(e.form);
    CHECK(ker.dim() == 4);
    CHECK(oracle_kernel_dim(e.form) == 4);
    CHECK(ker == Subspace::coordinate_span(9, {4, 7, 8, 9}));
    CHECK(e.l.contains(ker));
    check_designated_structure(e);
    auto vrep = classify_isotropy(e.v, e.form, 2);
    CHECK(vrep.strict);
}

TEST_CASE("max_dim examples") {
    SECTION("n=1, N=1") {
        auto e = max_dim_example(1, 1);
        REQUIRE(e.form.dimension() == 4);
        AlternatingForm expect(4, 2);
        expect.add_term({1, 3}, -1);
        expect.add_term({2, 4}, -1);
        CHECK(e.form == expect);
        CHECK(e.l.dim() == 2);
        CHECK(kernel(e.form).dim() == 0);
        check_designated_structure(e);
    }
    SECTION("n=2, N=1") {
        auto e = max_dim_example(2, 1);
        REQUIRE(e.form.dimension() == 6);
        AlternatingForm expect(6, 3);
        expect.add_term({1, 2, 4}, 1);
        expect.add_term({1, 3, 5}, 1);
        expect.add_term({2, 3, 6}, 1);
        CHECK(e.form == expect);
        CHECK(e.l.dim() == 3);
        CHECK(kernel(e.form).dim() == 0);
        CHECK(oracle_kernel_dim(e.form) == 0);
        check_designated_structure(e);
    }
    SECTION("dimension bookkeeping for larger sizes") {
        auto e = max_dim_example(2, 2);
        CHECK(e.form.dimension() == 4 + 6);
        CHECK(e.l.dim() == 6);
        CHECK(static_cast<int>(e.form.terms().size()) == 6);
        check_designated_structure(e);
    }
}

TEST_CASE("direct sum of two symplectic planes") {
    auto e = direct_sum(omega0(1, 1), omega0(1, 1));
    REQUIRE(e.form.dimension() == 8);
    AlternatingForm expect(8, 2);
    expect.add_term({1, 3}, 1);
    expect.add_term({2, 4}, 1);
    expect.add_term({5, 7}, 1);
    expect.add_term({6, 8}, 1);
    CHECK(e.form == expect);
    CHECK(e.l == Subspace::coordinate_span(8, {3, 4, 7, 8}));
    CHECK(kernel(e.form).dim() == 0);
    check_designated_structure(e);

    auto lb = length_bounds(e.form);
    CHECK(lb.certified);
    CHECK(lb.lower == 4);
}

TEST_CASE("horizontal perturbations") {
    auto e = example_r11();

    SECTION("pure base term is accepted and re-verifies") {
        AlternatingForm eta(11, 4);
        eta.add_term({6, 7, 8, 9}, 3);
        auto pert = add_horizontal(e, eta);
        CHECK(pert.form.coefficient({6, 7, 8, 9}) == 3);
        check_designated_structure(pert);
    }

    SECTION("terms touching non-base directions are rejected") {
        AlternatingForm eta(11, 4);
        eta.add_term({1, 6, 7, 8}, 1);
        CHECK_THROWS_AS(add_horizontal(e, eta), std::invalid_argument);
    }

    SECTION("direct sum of planes admits no horizontal 2-form on one base pair") {
        auto ds = direct_sum(omega0(1, 1), omega0(1, 1));
        AlternatingForm eta(8, 2);
        eta.add_term({1, 5}, 1);
        auto pert = add_horizontal(ds, eta);
        check_designated_structure(pert);
    }
}
