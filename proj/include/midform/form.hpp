#pragma once

#include "index_tuple.hpp"
#include "linalg.hpp"
#include "rational.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace midform {

/// Alternating k-form on a d-dimensional rational vector space, stored as a
/// sparse map from strictly increasing basis tuples to exact coefficients.
/// Zero coefficients are deleted eagerly, so equality is map equality.
class AlternatingForm {
public:
    AlternatingForm() = default;
    AlternatingForm(int dimension, int degree) : dim_(dimension), deg_(degree) {
        if (dimension < 0 || degree < 0)
            throw std::invalid_argument("form with negative dimension or degree");
    }

    int dimension() const { return dim_; }
    int degree() const { return deg_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<IndexTuple, Rational>& terms() const { return terms_; }

    /// Adds c * e^{t}; `t` need not be sorted.  Repeated indices contribute
    /// nothing, and cancellations delete the entry.
    void add_term(IndexTuple t, const Rational& c) {
        if (c == 0) return;
        if (static_cast<int>(t.size()) != deg_)
            throw std::invalid_argument("term arity does not match form degree");
        const int sign = sort_with_sign(t);
        if (sign == 0) return;
        if (!t.empty() && (t.front() < 1 || t.back() > dim_))
            throw std::out_of_range("term index outside 1..dimension");
        auto it = terms_.find(t);
        if (it == terms_.end()) {
            terms_.emplace(std::move(t), sign > 0 ? c : -c);
        } else {
            it->second += sign > 0 ? c : -c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Rational coefficient(const IndexTuple& t) const {
        auto it = terms_.find(t);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Coordinate indices that appear in some term.
    std::set<int> used_indices() const {
        std::set<int> s;
        for (const auto& [t, c] : terms_)
            for (int i : t) s.insert(i);
        return s;
    }

    bool operator==(const AlternatingForm& o) const {
        return dim_ == o.dim_ && deg_ == o.deg_ && terms_ == o.terms_;
    }
    bool operator!=(const AlternatingForm& o) const { return !(*this == o); }

private:
    int dim_ = 0;
    int deg_ = 0;
    std::map<IndexTuple, Rational> terms_;
};

inline AlternatingForm form_add(const AlternatingForm& a, const AlternatingForm& b) {
    if (a.dimension() != b.dimension() || a.degree() != b.degree())
        throw std::invalid_argument("form_add: dimension/degree mismatch");
    AlternatingForm out(a.dimension(), a.degree());
    for (const auto& [t, c] : a.terms()) out.add_term(t, c);
    for (const auto& [t, c] : b.terms()) out.add_term(t, c);
    return out;
}

inline AlternatingForm form_sub(const AlternatingForm& a, const AlternatingForm& b) {
    if (a.dimension() != b.dimension() || a.degree() != b.degree())
        throw std::invalid_argument("form_sub: dimension/degree mismatch");
    AlternatingForm out(a.dimension(), a.degree());
    for (const auto& [t, c] : a.terms()) out.add_term(t, c);
    for (const auto& [t, c] : b.terms()) out.add_term(t, -c);
    return out;
}

inline AlternatingForm form_scale(const Rational& c, const AlternatingForm& a) {
    AlternatingForm out(a.dimension(), a.degree());
    if (c == 0) return out;
    for (const auto& [t, x] : a.terms()) out.add_term(t, c * x);
    return out;
}

inline AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("wedge: dimension mismatch");
    AlternatingForm out(a.dimension(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.dimension()) return out;
    for (const auto& [ta, ca] : a.terms())
        for (const auto& [tb, cb] : b.terms()) {
            IndexTuple t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            out.add_term(std::move(t), ca * cb);
        }
    return out;
}

/// Interior product i_v a, i.e. v plugged into the first slot.
inline AlternatingForm contract(const Vec& v, const AlternatingForm& a) {
    if (static_cast<int>(v.size()) != a.dimension())
        throw std::invalid_argument("contract: vector dimension mismatch");
    if (a.degree() == 0) throw std::invalid_argument("contract: degree-0 form");
    AlternatingForm out(a.dimension(), a.degree() - 1);
    for (const auto& [t, c] : a.terms()) {
        int sign = 1;
        for (std::size_t m = 0; m < t.size(); ++m) {
            const Rational& vi = v[static_cast<std::size_t>(t[m] - 1)];
            if (vi != 0) {
                Rational cv = c * vi;
                if (sign < 0) cv = -cv;
                out.add_term(tuple_erase(t, static_cast<int>(m)), cv);
            }
            sign = -sign;
        }
    }
    return out;
}

/// Contraction with the decomposable multivector v1 ^ ... ^ vk, read as the
/// composition i_{vk} after ... after i_{v1}: the vi fill the first k slots
/// in order, so multi_contract({v1,...,vk}, a) evaluated on (w...) is
/// a(v1,...,vk,w...).
inline AlternatingForm multi_contract(const std::vector<Vec>& vs, const AlternatingForm& a) {
    if (static_cast<int>(vs.size()) > a.degree())
        throw std::invalid_argument("multi_contract: more vectors than form degree");
    AlternatingForm r = a;
    for (const auto& v : vs) r = contract(v, r);
    return r;
}

/// Full evaluation a(v1,...,vk) as an exact scalar.
inline Rational eval(const AlternatingForm& a, const std::vector<Vec>& vs) {
    if (static_cast<int>(vs.size()) != a.degree())
        throw std::invalid_argument("eval: wrong number of vectors");
    const AlternatingForm r = multi_contract(vs, a);
    return r.coefficient({});
}

/// Pullback along the linear map with matrix m (rows = a.dimension, one
/// column per coordinate of the new space): (m* a)(w1,...,wk) = a(m w1,...,m wk).
inline AlternatingForm pullback(const RatMatrix& m, const AlternatingForm& a) {
    if (m.rows != a.dimension())
        throw std::invalid_argument("pullback: matrix rows must match form dimension");
    const int dnew = m.cols;
    AlternatingForm out(dnew, a.degree());
    if (a.degree() > dnew) return out;
    for (const auto& [t, c] : a.terms()) {
        // wedge together the pulled-back covectors of this monomial
        AlternatingForm acc(dnew, 0);
        acc.add_term({}, c);
        for (int idx : t) {
            AlternatingForm oneform(dnew, 1);
            for (int j = 0; j < dnew; ++j) {
                const Rational& mij = m.at(idx - 1, j);
                if (mij != 0) oneform.add_term({j + 1}, mij);
            }
            acc = wedge(acc, oneform);
            if (acc.is_zero()) break;
        }
        for (const auto& [tt, cc] : acc.terms()) out.add_term(tt, cc);
    }
    return out;
}

inline std::string to_string(const AlternatingForm& a) {
    if (a.is_zero()) return "0";
    std::string s;
    for (const auto& [t, c] : a.terms()) {
        if (!s.empty()) s += " + ";
        s += to_string(c);
        s += "*e[";
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(t[i]);
        }
        s += "]";
    }
    return s;
}

}  // namespace midform
