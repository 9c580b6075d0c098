#pragma once

#include "analysis.hpp"
#include "moser.hpp"
#include "poly.hpp"
#include "structures.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace midform::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/// Malformed input (bad JSON, bad rational syntax, missing fields).
/// Distinct from std::invalid_argument, which flags dimension or
/// precondition violations of well-formed data.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// --- rational strings -------------------------------------------------------

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

inline Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational literal");
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    bool digits = false, slash = false;
    for (; i < s.size(); ++i) {
        if (s[i] >= '0' && s[i] <= '9') {
            digits = true;
        } else if (s[i] == '/' && digits && !slash) {
            slash = true;
            digits = false;
        } else {
            throw ParseError("bad rational literal: " + s);
        }
    }
    if (!digits) throw ParseError("bad rational literal: " + s);
    try {
        Rational r(s[0] == '+' ? s.substr(1) : s);
        return r;
    } catch (const std::exception&) {
        throw ParseError("bad rational literal: " + s);
    }
}

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    throw ParseError("rational values must be integers or \"p/q\" strings");
}

// --- vectors and matrices ---------------------------------------------------

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back(to_string(c));
    return a;
}

inline Vec vec_from_json(const json& j, int expected_size = -1) {
    if (!j.is_array()) throw ParseError("vector must be a JSON array");
    Vec v;
    for (const auto& c : j) v.push_back(rational_from_json(c));
    if (expected_size >= 0 && static_cast<int>(v.size()) != expected_size)
        throw ParseError("vector has wrong length");
    return v;
}

inline json vecs_to_json(const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_to_json(v));
    return a;
}

// --- alternating forms ------------------------------------------------------

inline json form_to_json(const AlternatingForm& w) {
    json terms = json::array();
    for (const auto& [idx, c] : w.terms()) {
        json t;
        t["indices"] = idx;
        t["coeff"] = to_string(c);
        terms.push_back(std::move(t));
    }
    return json{{"dimension", w.dimension()}, {"degree", w.degree()}, {"terms", std::move(terms)}};
}

inline AlternatingForm form_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("degree") || !j.contains("terms"))
        throw ParseError("form JSON needs dimension, degree, terms");
    if (!j["dimension"].is_number_integer() || !j["degree"].is_number_integer() || !j["terms"].is_array())
        throw ParseError("form JSON has mistyped fields");
    AlternatingForm w(j["dimension"].get<int>(), j["degree"].get<int>());
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("indices") || !t.contains("coeff"))
            throw ParseError("form term needs indices and coeff");
        IndexTuple idx;
        for (const auto& i : t["indices"]) {
            if (!i.is_number_integer()) throw ParseError("form indices must be integers");
            idx.push_back(i.get<int>());
        }
        try {
            w.add_term(idx, rational_from_json(t["coeff"]));
        } catch (const std::logic_error& e) {
            throw ParseError(std::string("bad form term: ") + e.what());
        }
    }
    return w;
}

// --- subspaces ---------------------------------------------------------------

inline json subspace_to_json(const Subspace& s) {
    return json{{"ambient", s.ambient()}, {"dual", s.dual()}, {"vectors", vecs_to_json(s.basis())}};
}

inline Subspace subspace_from_json(const json& j) {
    if (!j.is_object() || !j.contains("ambient") || !j.contains("vectors"))
        throw ParseError("subspace JSON needs ambient and vectors");
    if (!j["ambient"].is_number_integer() || !j["vectors"].is_array())
        throw ParseError("subspace JSON has mistyped fields");
    const int ambient = j["ambient"].get<int>();
    const bool dual = j.contains("dual") ? j["dual"].get<bool>() : false;
    std::vector<Vec> vectors;
    for (const auto& v : j["vectors"]) vectors.push_back(vec_from_json(v, ambient));
    try {
        return Subspace::span(ambient, std::move(vectors), dual);
    } catch (const std::logic_error& e) {
        throw ParseError(std::string("bad subspace: ") + e.what());
    }
}

// --- polynomial forms --------------------------------------------------------

inline json polynomial_to_json(const Polynomial& p) {
    json monos = json::array();
    for (const auto& [e, c] : p.monomials()) {
        json m;
        m["exponents"] = e;
        m["coeff"] = to_string(c);
        monos.push_back(std::move(m));
    }
    return monos;
}

inline Polynomial polynomial_from_json(const json& j, int vars) {
    if (!j.is_array()) throw ParseError("polynomial must be a monomial array");
    Polynomial p(vars);
    for (const auto& m : j) {
        if (!m.is_object() || !m.contains("exponents") || !m.contains("coeff"))
            throw ParseError("monomial needs exponents and coeff");
        std::vector<int> e;
        for (const auto& x : m["exponents"]) {
            if (!x.is_number_integer()) throw ParseError("exponents must be integers");
            e.push_back(x.get<int>());
        }
        try {
            p.add_monomial(std::move(e), rational_from_json(m["coeff"]));
        } catch (const std::logic_error& ex) {
            throw ParseError(std::string("bad monomial: ") + ex.what());
        }
    }
    return p;
}

inline json polyform_to_json(const PolyForm& w) {
    json terms = json::array();
    for (const auto& [idx, p] : w.terms()) {
        json t;
        t["indices"] = idx;
        t["monomials"] = polynomial_to_json(p);
        terms.push_back(std::move(t));
    }
    return json{{"dimension", w.dimension()}, {"degree", w.degree()}, {"terms", std::move(terms)}};
}

inline PolyForm polyform_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("degree") || !j.contains("terms"))
        throw ParseError("polynomial form JSON needs dimension, degree, terms");
    if (!j["dimension"].is_number_integer() || !j["degree"].is_number_integer() || !j["terms"].is_array())
        throw ParseError("polynomial form JSON has mistyped fields");
    const int d = j["dimension"].get<int>();
    PolyForm w(d, j["degree"].get<int>());
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("indices") || !t.contains("monomials"))
            throw ParseError("polynomial form term needs indices and monomials");
        IndexTuple idx;
        for (const auto& i : t["indices"]) {
            if (!i.is_number_integer()) throw ParseError("form indices must be integers");
            idx.push_back(i.get<int>());
        }
        try {
            w.add_term(idx, polynomial_from_json(t["monomials"], d));
        } catch (const std::logic_error& e) {
            throw ParseError(std::string("bad polynomial form term: ") + e.what());
        }
    }
    return w;
}

inline json fields_to_json(const std::vector<PolyVectorField>& fields) {
    json out;
    out["dimension"] = fields.empty() ? 0 : fields[0].dimension;
    json fs = json::array();
    for (const auto& f : fields) {
        json comps = json::array();
        for (const auto& c : f.components) comps.push_back(polynomial_to_json(c));
        fs.push_back(std::move(comps));
    }
    out["fields"] = std::move(fs);
    return out;
}

inline std::vector<PolyVectorField> fields_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("fields") || !j["fields"].is_array())
        throw ParseError("vector field JSON needs dimension and fields");
    if (!j["dimension"].is_number_integer()) throw ParseError("vector field dimension must be an integer");
    const int d = j["dimension"].get<int>();
    std::vector<PolyVectorField> out;
    for (const auto& fj : j["fields"]) {
        if (!fj.is_array() || static_cast<int>(fj.size()) != d)
            throw ParseError("each field needs one component per coordinate");
        try {
            PolyVectorField f(d);
            for (int i = 0; i < d; ++i) f.components[static_cast<std::size_t>(i)] = polynomial_from_json(fj[static_cast<std::size_t>(i)], d);
            out.push_back(std::move(f));
        } catch (const std::logic_error& e) {
            throw ParseError(std::string("bad vector field: ") + e.what());
        }
    }
    return out;
}

/// A plain form file is read as the constant polynomial form it denotes.
inline PolyForm polyform_or_constant_from_json(const json& j) {
    if (j.is_object() && j.contains("terms") && j["terms"].is_array() && !j["terms"].empty() &&
        j["terms"][0].is_object() && j["terms"][0].contains("monomials"))
        return polyform_from_json(j);
    return constant_spread(form_from_json(j));
}

// --- reports -----------------------------------------------------------------

inline json decomposition_to_json(const DecompositionResult& r) {
    return json{{"decomposable", r.decomposable}, {"factors", vecs_to_json(r.factors)}};
}

inline json isotropy_to_json(const IsotropyReport& r) {
    return json{{"k", r.k},
                {"k_isotropic", r.k_isotropic},
                {"strict", r.strict},
                {"maximal", r.maximal},
                {"kernel_contained", r.kernel_contained},
                {"orthogonal", subspace_to_json(r.orthogonal)}};
}

inline json length_bounds_to_json(const LengthBounds& b) {
    return json{{"lower", b.lower},
                {"upper", b.upper},
                {"certified", b.certified},
                {"method", b.method},
                {"witness_dual_basis", vecs_to_json(b.witness_dual_basis)}};
}

inline json nl_result_to_json(const NLResult& r) {
    json tuples = json::array();
    for (const auto& t : r.best_tuples) tuples.push_back(t);
    return json{{"best_count", r.best_count},
                {"floor_count", r.floor_count},
                {"gap", r.gap},
                {"certified", r.certified},
                {"bases_examined", r.bases_examined},
                {"best_basis", vecs_to_json(r.best_basis)},
                {"best_tuples", std::move(tuples)},
                {"checks", json{{"floor_respected", true}}}};
}

inline json canonical_rep_to_json(const CanonicalRep& rep) {
    json tuples = json::array();
    for (const auto& t : rep.tuples) tuples.push_back(t);
    return json{{"sign", rep.sign},
                {"length", rep.length},
                {"frame", vecs_to_json(rep.frame)},
                {"coframe", vecs_to_json(rep.coframe)},
                {"tuples", std::move(tuples)},
                {"hat_forms", vecs_to_json(rep.hat_forms)},
                {"length_witness", vecs_to_json(rep.length_witness)},
                {"checks", json{{"reconstruction_exact", true}, {"witness_term_count_equals_length", true}}}};
}

inline json complement_to_json(const ComplementResult& r) {
    return json{{"f", subspace_to_json(r.f)},
                {"f_cap_v", subspace_to_json(r.f_cap_v)},
                {"verified", r.verified},
                {"checks", json{{"direct_sum_with_l", true},
                                {"f_n_isotropic", true},
                                {"f_cap_v_isotropic_down_one", true}}}};
}

inline json involutive_to_json(const InvolutiveReport& r) {
    json out{{"involutive", r.involutive}, {"rank", r.rank}};
    if (!r.involutive) {
        out["witness"] = json{{"lhs", r.lhs}, {"rhs", r.rhs}};
        if (r.bracket) {
            json comps = json::array();
            for (const auto& c : r.bracket->components) comps.push_back(polynomial_to_json(c));
            out["witness"]["bracket"] = std::move(comps);
        }
        if (r.witness_point) out["witness"]["point"] = vec_to_json(*r.witness_point);
    }
    return out;
}

inline json flatten_result_to_json(const FlattenResult& r) {
    json samples = json::array();
    for (const auto& s : r.samples)
        samples.push_back(json{{"point", s.point}, {"image", s.image}, {"error", s.error}});
    return json{{"omega0", form_to_json(r.omega0)},
                {"steps", r.steps},
                {"step_size", r.step_size},
                {"max_error", r.max_error},
                {"max_residual", r.max_residual},
                {"within_tol", r.within_tol},
                {"samples", std::move(samples)}};
}

// --- digests and files -------------------------------------------------------

/// FNV-1a over the raw bytes, reported as fixed-width hex.
inline std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Writes via a sibling temp file and an atomic rename.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON");
    return j;
}

}  // namespace midform::io
