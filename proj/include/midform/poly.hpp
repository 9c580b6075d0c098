#pragma once

#include "form.hpp"
#include "index_tuple.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace midform {

/// Sparse multivariate polynomial with exact rational coefficients.
/// Monomials are exponent vectors of fixed length (one slot per variable).
class Polynomial {
public:
    explicit Polynomial(int vars) : vars_(vars) {
        if (vars < 0) throw std::invalid_argument("Polynomial: negative variable count");
    }

    static Polynomial constant(int vars, const Rational& c) {
        Polynomial p(vars);
        p.add_monomial(std::vector<int>(static_cast<std::size_t>(vars), 0), c);
        return p;
    }

    static Polynomial variable(int vars, int idx) {
        if (idx < 1 || idx > vars) throw std::invalid_argument("Polynomial: variable index out of range");
        Polynomial p(vars);
        std::vector<int> e(static_cast<std::size_t>(vars), 0);
        e[static_cast<std::size_t>(idx - 1)] = 1;
        p.add_monomial(std::move(e), 1);
        return p;
    }

    int vars() const { return vars_; }
    bool is_zero() const { return monomials_.empty(); }
    const std::map<std::vector<int>, Rational>& monomials() const { return monomials_; }

    void add_monomial(std::vector<int> exps, const Rational& c) {
        if (static_cast<int>(exps.size()) != vars_)
            throw std::invalid_argument("Polynomial: exponent vector has wrong arity");
        for (int e : exps)
            if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
        if (c == 0) return;
        auto it = monomials_.find(exps);
        if (it == monomials_.end()) {
            monomials_.emplace(std::move(exps), c);
        } else {
            it->second += c;
            if (it->second == 0) monomials_.erase(it);
        }
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [e, c] : monomials_) {
            int t = 0;
            for (int x : e) t += x;
            deg = std::max(deg, t);
        }
        return deg;
    }

    Rational eval(const std::vector<Rational>& pt) const {
        if (static_cast<int>(pt.size()) != vars_)
            throw std::invalid_argument("Polynomial: evaluation point has wrong arity");
        Rational total = 0;
        for (const auto& [e, c] : monomials_) {
            Rational m = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) m *= pt[i];
            total += m;
        }
        return total;
    }

    double eval_double(const std::vector<double>& pt) const {
        double total = 0;
        for (const auto& [e, c] : monomials_) {
            double m = to_double(c);
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) m *= std::pow(pt[i], e[i]);
            total += m;
        }
        return total;
    }

    bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && monomials_ == o.monomials_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

private:
    int vars_;
    std::map<std::vector<int>, Rational> monomials_;
};

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    if (a.vars() != b.vars()) throw std::invalid_argument("poly_add: arity mismatch");
    Polynomial r = a;
    for (const auto& [e, c] : b.monomials()) r.add_monomial(e, c);
    return r;
}

inline Polynomial poly_scale(const Rational& c, const Polynomial& p) {
    Polynomial r(p.vars());
    for (const auto& [e, k] : p.monomials()) {
        Rational ck = c * k;
        r.add_monomial(e, ck);
    }
    return r;
}

inline Polynomial poly_sub(const Polynomial& a, const Polynomial& b) {
    return poly_add(a, poly_scale(-1, b));
}

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.vars() != b.vars()) throw std::invalid_argument("poly_mul: arity mismatch");
    Polynomial r(a.vars());
    for (const auto& [ea, ca] : a.monomials())
        for (const auto& [eb, cb] : b.monomials()) {
            std::vector<int> e = ea;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            Rational c = ca * cb;
            r.add_monomial(std::move(e), c);
        }
    return r;
}

/// Partial derivative with respect to variable `var` (1-based).
inline Polynomial derivative(const Polynomial& p, int var) {
    if (var < 1 || var > p.vars()) throw std::invalid_argument("derivative: variable out of range");
    Polynomial r(p.vars());
    const std::size_t i = static_cast<std::size_t>(var - 1);
    for (const auto& [e, c] : p.monomials()) {
        if (e[i] == 0) continue;
        std::vector<int> ne = e;
        ne[i] -= 1;
        Rational nc = c * e[i];
        r.add_monomial(std::move(ne), nc);
    }
    return r;
}

/// Antiderivative in variable `var` with zero constant term.
inline Polynomial antiderivative(const Polynomial& p, int var) {
    if (var < 1 || var > p.vars()) throw std::invalid_argument("antiderivative: variable out of range");
    Polynomial r(p.vars());
    const std::size_t i = static_cast<std::size_t>(var - 1);
    for (const auto& [e, c] : p.monomials()) {
        std::vector<int> ne = e;
        ne[i] += 1;
        Rational nc = c / ne[i];
        r.add_monomial(std::move(ne), nc);
    }
    return r;
}

/// Substitutes comps[i] for variable i+1; all comps share a variable count.
inline Polynomial subst(const Polynomial& p, const std::vector<Polynomial>& comps) {
    if (static_cast<int>(comps.size()) != p.vars())
        throw std::invalid_argument("subst: wrong number of substituted components");
    const int nv = comps.empty() ? 0 : comps[0].vars();
    for (const auto& c : comps)
        if (c.vars() != nv) throw std::invalid_argument("subst: components disagree on arity");
    Polynomial r(nv);
    for (const auto& [e, c] : p.monomials()) {
        Polynomial m = Polynomial::constant(nv, c);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) m = poly_mul(m, comps[i]);
        r = poly_add(r, m);
    }
    return r;
}

// ---------------------------------------------------------------------------

/// Differential form with polynomial coefficients on coordinate space.
class PolyForm {
public:
    PolyForm(int dimension, int degree) : dimension_(dimension), degree_(degree) {
        if (dimension < 0 || degree < 0)
            throw std::invalid_argument("PolyForm: bad shape");
    }

    int dimension() const { return dimension_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<IndexTuple, Polynomial>& terms() const { return terms_; }

    void add_term(IndexTuple idx, const Polynomial& p) {
        if (static_cast<int>(idx.size()) != degree_)
            throw std::invalid_argument("PolyForm: tuple arity mismatch");
        for (int i : idx)
            if (i < 1 || i > dimension_) throw std::invalid_argument("PolyForm: index out of range");
        if (p.vars() != dimension_) throw std::invalid_argument("PolyForm: coefficient arity mismatch");
        if (p.is_zero()) return;
        int sign = sort_with_sign(idx);
        if (sign == 0) return;
        Polynomial q = (sign < 0) ? poly_scale(-1, p) : p;
        auto it = terms_.find(idx);
        if (it == terms_.end()) {
            terms_.emplace(std::move(idx), std::move(q));
        } else {
            it->second = poly_add(it->second, q);
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Polynomial coefficient(const IndexTuple& idx) const {
        auto it = terms_.find(idx);
        return it == terms_.end() ? Polynomial(dimension_) : it->second;
    }

    bool operator==(const PolyForm& o) const {
        return dimension_ == o.dimension_ && degree_ == o.degree_ && terms_ == o.terms_;
    }
    bool operator!=(const PolyForm& o) const { return !(*this == o); }

private:
    int dimension_, degree_;
    std::map<IndexTuple, Polynomial> terms_;
};

inline PolyForm pf_add(const PolyForm& a, const PolyForm& b) {
    if (a.dimension() != b.dimension() || a.degree() != b.degree())
        throw std::invalid_argument("pf_add: shape mismatch");
    PolyForm r = a;
    for (const auto& [idx, p] : b.terms()) r.add_term(idx, p);
    return r;
}

inline PolyForm pf_scale(const Rational& c, const PolyForm& a) {
    PolyForm r(a.dimension(), a.degree());
    for (const auto& [idx, p] : a.terms()) r.add_term(idx, poly_scale(c, p));
    return r;
}

inline PolyForm pf_sub(const PolyForm& a, const PolyForm& b) { return pf_add(a, pf_scale(-1, b)); }

inline PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("wedge: dimension mismatch");
    PolyForm r(a.dimension(), a.degree() + b.degree());
    for (const auto& [ia, pa] : a.terms())
        for (const auto& [ib, pb] : b.terms()) {
            IndexTuple idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.add_term(std::move(idx), poly_mul(pa, pb));
        }
    return r;
}

inline PolyForm exterior_derivative(const PolyForm& a) {
    PolyForm r(a.dimension(), a.degree() + 1);
    for (const auto& [idx, p] : a.terms())
        for (int j = 1; j <= a.dimension(); ++j) {
            Polynomial dp = derivative(p, j);
            if (dp.is_zero()) continue;
            IndexTuple t{j};
            t.insert(t.end(), idx.begin(), idx.end());
            r.add_term(std::move(t), dp);
        }
    return r;
}

/// Exact evaluation at a rational point.
inline AlternatingForm eval_at(const PolyForm& a, const std::vector<Rational>& pt) {
    AlternatingForm r(a.dimension(), a.degree());
    for (const auto& [idx, p] : a.terms()) {
        Rational c = p.eval(pt);
        if (c != 0) r.add_term(idx, c);
    }
    return r;
}

/// Constant-coefficient polynomial form with the values of the given form.
inline PolyForm constant_spread(const AlternatingForm& a) {
    PolyForm r(a.dimension(), a.degree());
    for (const auto& [idx, c] : a.terms()) r.add_term(idx, Polynomial::constant(a.dimension(), c));
    return r;
}

/// Pullback along the polynomial map whose i-th old coordinate is comps[i-1]
/// (a polynomial in the new variables).
inline PolyForm poly_pullback(const std::vector<Polynomial>& comps, const PolyForm& a) {
    if (static_cast<int>(comps.size()) != a.dimension())
        throw std::invalid_argument("poly_pullback: component count mismatch");
    const int nv = comps.empty() ? 0 : comps[0].vars();
    std::vector<PolyForm> diffs;  // d(comps[i]) as degree-1 forms in the new variables
    for (const auto& c : comps) {
        PolyForm dc(nv, 1);
        for (int j = 1; j <= nv; ++j) {
            Polynomial dj = derivative(c, j);
            if (!dj.is_zero()) dc.add_term({j}, dj);
        }
        diffs.push_back(std::move(dc));
    }
    PolyForm r(nv, a.degree());
    for (const auto& [idx, p] : a.terms()) {
        PolyForm term(nv, 0);
        term.add_term({}, subst(p, comps));
        for (int i : idx) term = wedge(term, diffs[static_cast<std::size_t>(i - 1)]);
        r = pf_add(r, term);
    }
    return r;
}

// ---------------------------------------------------------------------------

/// Disjoint partition of the coordinates into leaf (x) and fiber (y) blocks.
struct CoordinateSplit {
    std::vector<int> x_indices;
    std::vector<int> y_indices;

    void validate(int dimension) const {
        std::vector<bool> seen(static_cast<std::size_t>(dimension), false);
        int count = 0;
        auto mark = [&](const std::vector<int>& v) {
            for (int i : v) {
                if (i < 1 || i > dimension) throw std::invalid_argument("CoordinateSplit: index out of range");
                if (seen[static_cast<std::size_t>(i - 1)])
                    throw std::invalid_argument("CoordinateSplit: duplicate index");
                seen[static_cast<std::size_t>(i - 1)] = true;
                ++count;
            }
        };
        mark(x_indices);
        mark(y_indices);
        if (count != dimension) throw std::invalid_argument("CoordinateSplit: indices do not cover the space");
    }

    bool is_y(int idx) const {
        return std::find(y_indices.begin(), y_indices.end(), idx) != y_indices.end();
    }
};

/// Splits off the terms supported entirely on the leaf coordinates:
/// returns (a - leaf_part, leaf_part).  The first component contracts
/// nontrivially only through fiber directions.
inline std::pair<PolyForm, PolyForm> restrict_split(const PolyForm& a, const CoordinateSplit& s) {
    s.validate(a.dimension());
    PolyForm leaf(a.dimension(), a.degree());
    PolyForm rest(a.dimension(), a.degree());
    for (const auto& [idx, p] : a.terms()) {
        bool pure_x = true;
        for (int i : idx)
            if (s.is_y(i)) pure_x = false;
        (pure_x ? leaf : rest).add_term(idx, p);
    }
    return {std::move(rest), std::move(leaf)};
}

/// Fiberwise primitive: integrates the radial homotopy along the y-block in
/// closed rational form, monomial by monomial.  Requires the form to be
/// closed and to have no term supported purely on the leaf coordinates; the
/// identity d(theta) = a is then verified symbolically before returning.
inline PolyForm poincare_homotopy(const PolyForm& a, const CoordinateSplit& s) {
    s.validate(a.dimension());
    if (!exterior_derivative(a).is_zero())
        throw std::invalid_argument("poincare_homotopy: form is not closed");
    auto [rest, leaf] = restrict_split(a, s);
    if (!leaf.is_zero())
        throw std::invalid_argument("poincare_homotopy: form has terms supported on the leaf");
    (void)rest;

    const int d = a.dimension();
    PolyForm theta(d, a.degree() - 1);
    for (const auto& [idx, p] : a.terms()) {
        int q = 0;
        for (int i : idx)
            if (s.is_y(i)) ++q;
        for (const auto& [exps, c] : p.monomials()) {
            int beta = 0;
            for (int yi : s.y_indices) beta += exps[static_cast<std::size_t>(yi - 1)];
            const Rational den = beta + q;
            for (std::size_t pos = 0; pos < idx.size(); ++pos) {
                const int j = idx[pos];
                if (!s.is_y(j)) continue;
                std::vector<int> ne = exps;
                ne[static_cast<std::size_t>(j - 1)] += 1;
                Rational nc = c / den;
                if (pos % 2) nc = -nc;
                Polynomial mono(d);
                mono.add_monomial(std::move(ne), nc);
                IndexTuple rest_idx;
                for (std::size_t t = 0; t < idx.size(); ++t)
                    if (t != pos) rest_idx.push_back(idx[t]);
                theta.add_term(std::move(rest_idx), mono);
            }
        }
    }
    if (!pf_sub(exterior_derivative(theta), a).is_zero())
        throw std::logic_error("poincare_homotopy: primitive verification failed");
    return theta;
}

}  // namespace midform
