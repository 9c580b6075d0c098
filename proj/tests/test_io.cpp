#include <catch2/catch_amalgamated.hpp>

#include "midform/catalog.hpp"
#include "midform/io.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

using namespace midform;
using io::json;

TEST_CASE("rational literals") {
    SECTION("round trip") {
        for (const char* s : {"3/4", "-5", "0", "12345678901234567890/7"}) {
            Rational r = io::rational_from_string(s);
            CHECK(io::to_string(r) == s);
        }
        CHECK(io::rational_from_string("+2") == Rational(2));
        CHECK(io::rational_from_string("4/6") == Rational(2, 3));  // normalized on parse
    }

    SECTION("rejects malformed literals") {
        for (const char* s : {"", "a", "3/4/5", "3/", "/4", "1.5", "2 ", "--3", "3/0"})
            CHECK_THROWS_AS(io::rational_from_string(s), io::ParseError);
    }

    SECTION("json rationals accept plain integers") {
        CHECK(io::rational_from_json(json(7)) == Rational(7));
        CHECK(io::rational_from_json(json("-7/2")) == Rational(-7, 2));
        CHECK_THROWS_AS(io::rational_from_json(json(1.5)), io::ParseError);
    }
}

TEST_CASE("form serialization") {
    SECTION("round trip preserves the catalog forms exactly") {
        for (const auto& e : catalog_all()) {
            json j = io::form_to_json(e.form);
            CHECK(io::form_from_json(j) == e.form);
        }
    }

    SECTION("unsorted indices are canonicalized with the alternating sign") {
        json j{{"dimension", 3},
               {"degree", 2},
               {"terms", json::array({json{{"indices", json::array({3, 1})}, {"coeff", "2"}}})}};
        AlternatingForm w = io::form_from_json(j);
        CHECK(w.coefficient({1, 3}) == Rational(-2));
    }

    SECTION("rejects malformed form JSON") {
        CHECK_THROWS_AS(io::form_from_json(json::array()), io::ParseError);
        CHECK_THROWS_AS(io::form_from_json(json{{"dimension", 2}, {"degree", 1}}), io::ParseError);
        json bad{{"dimension", 2}, {"degree", 1}, {"terms", json::array({json{{"coeff", "1"}}})}};
        CHECK_THROWS_AS(io::form_from_json(bad), io::ParseError);
        json out_of_range{{"dimension", 2},
                          {"degree", 1},
                          {"terms", json::array({json{{"indices", json::array({5})}, {"coeff", "1"}}})}};
        CHECK_THROWS_AS(io::form_from_json(out_of_range), io::ParseError);
        json wrong_arity{{"dimension", 3},
                         {"degree", 2},
                         {"terms", json::array({json{{"indices", json::array({1})}, {"coeff", "1"}}})}};
        CHECK_THROWS_AS(io::form_from_json(wrong_arity), io::ParseError);
    }
}

TEST_CASE("subspace serialization") {
    SECTION("round trip lands on the canonical basis") {
        Subspace s = Subspace::span(3, {Vec{2, 0, 2}, Vec{0, 3, 3}});
        Subspace back = io::subspace_from_json(io::subspace_to_json(s));
        CHECK(back == s);
        CHECK(back.basis()[0] == Vec{1, 0, 1});  // reduced rows
    }

    SECTION("dual flag survives") {
        Subspace s = Subspace::span(2, {Vec{1, 1}}, true);
        CHECK(io::subspace_from_json(io::subspace_to_json(s)).dual());
    }

    SECTION("rejects malformed subspace JSON") {
        CHECK_THROWS_AS(io::subspace_from_json(json{{"vectors", json::array()}}), io::ParseError);
        json wrong_len{{"ambient", 3}, {"vectors", json::array({json::array({"1", "2"})})}};
        CHECK_THROWS_AS(io::subspace_from_json(wrong_len), io::ParseError);
    }
}

TEST_CASE("polynomial form serialization") {
    const CatalogEntry e = omega0(1, 1);
    const PolyForm base = constant_spread(e.form);
    auto var = [&](int i) { return Polynomial::variable(4, i); };
    std::vector<Polynomial> comps{var(1), var(2), poly_add(var(3), poly_mul(var(1), var(1))),
                                  poly_add(var(4), poly_mul(var(2), var(2)))};
    const PolyForm shifted = poly_pullback(comps, base);

    SECTION("round trip is exact") {
        json j = io::polyform_to_json(shifted);
        CHECK(io::polyform_from_json(j) == shifted);
    }

    SECTION("a plain form file reads as its constant spread") {
        json j = io::form_to_json(e.form);
        CHECK(io::polyform_or_constant_from_json(j) == base);
        json jp = io::polyform_to_json(shifted);
        CHECK(io::polyform_or_constant_from_json(jp) == shifted);
    }

    SECTION("rejects malformed polynomial terms") {
        json j = io::polyform_to_json(shifted);
        j["terms"][0]["monomials"][0].erase("coeff");
        CHECK_THROWS_AS(io::polyform_from_json(j), io::ParseError);
        json k = io::polyform_to_json(shifted);
        k["terms"][0]["monomials"][0]["exponents"] = json::array({1, 0});  // wrong arity
        CHECK_THROWS_AS(io::polyform_from_json(k), io::ParseError);
    }
}

TEST_CASE("report serializers expose the decision fields") {
    const CatalogEntry e = omega0(2, 1);

    SECTION("isotropy") {
        json j = io::isotropy_to_json(classify_isotropy(e.l, e.form, 1));
        CHECK(j["k"] == 1);
        CHECK(j["k_isotropic"] == true);
        CHECK(j["maximal"] == true);
    }

    SECTION("counting and canonical representation") {
        NLResult nl = frak_N_L(e.form, e.l, e.f, NLParams{});
        json jn = io::nl_result_to_json(nl);
        CHECK(jn["best_count"] == 3);
        CHECK(jn["certified"] == true);
        CHECK(jn["checks"]["floor_respected"] == true);

        CanonicalRep rep = canonical_representation(e.form, e.l, nl);
        json jc = io::canonical_rep_to_json(rep);
        CHECK(jc["sign"] == 1);
        CHECK(jc["length"] == 3);
        CHECK(jc["tuples"].size() == 3);
        CHECK(jc["checks"]["reconstruction_exact"] == true);
    }

    SECTION("complement") {
        ComplementResult c = complement_n_isotropic(e.form, e.l, e.v, e.v_isotropy);
        json j = io::complement_to_json(c);
        CHECK(j["verified"] == true);
        CHECK(io::subspace_from_json(j["f"]) == c.f);
    }

    SECTION("involutivity witness") {
        PolyVectorField g1(2);
        g1.components[0] = Polynomial::constant(2, 1);
        PolyVectorField g2(2);
        g2.components[1] = Polynomial::variable(2, 1);
        json j = io::involutive_to_json(involutive({g1, g2}, 5, 3));
        CHECK(j["involutive"] == false);
        CHECK(j["witness"]["lhs"] == 1);
        CHECK(j["witness"]["rhs"] == 2);
        CHECK(j["witness"].contains("bracket"));
    }

    SECTION("flatten result") {
        PolyForm w = constant_spread(omega0(1, 1).form);
        FlattenParams p;
        p.steps = 10;
        p.sample_count = 3;
        json j = io::flatten_result_to_json(moser_flatten(w, CoordinateSplit{{1, 2}, {3, 4}}, p));
        CHECK(j["within_tol"] == true);
        CHECK(j["steps"] == 10);
        CHECK(j["samples"].size() == 3);
        CHECK(io::form_from_json(j["omega0"]) == omega0(1, 1).form);
    }
}

TEST_CASE("digests and file handling") {
    SECTION("fnv-1a reference vectors") {
        CHECK(io::digest_hex("") == "cbf29ce484222325");
        CHECK(io::digest_hex("abc") == "e71fa2190541574b");
    }

    SECTION("atomic write and read round trip") {
        const std::string dir = std::filesystem::temp_directory_path().string();
        const std::string path = dir + "/midform_io_test.json";
        io::write_file_atomic(path, "{\"x\": 1}\n");
        CHECK(io::read_file(path) == "{\"x\": 1}\n");
        CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
        std::filesystem::remove(path);
        CHECK_THROWS_AS(io::read_file(path), io::ParseError);
    }

    SECTION("json parsing failure is a parse error") {
        CHECK_THROWS_AS(io::parse_json("{nope"), io::ParseError);
        CHECK(io::parse_json("[1, 2]").is_array());
    }
}
