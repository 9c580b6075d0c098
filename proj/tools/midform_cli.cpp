#include "midform/catalog.hpp"
#include "midform/io.hpp"
#include "midform/moser.hpp"
#include "midform/structures.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace midform;
using io::json;

namespace {

struct Input {
    std::string path;
    std::string digest;
    json parsed;
};

Input load_input(const std::string& path) {
    const std::string bytes = io::read_file(path);
    return {path, io::digest_hex(bytes), io::parse_json(bytes)};
}

void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump(2);
    text.push_back('\n');
    if (out_path.empty())
        std::cout << text;
    else
        io::write_file_atomic(out_path, text);
}

json base_report(const std::vector<std::pair<std::string, const Input*>>& inputs) {
    json rep;
    rep["version"] = io::kVersion;
    json in;
    for (const auto& [name, rec] : inputs) in[name] = json{{"path", rec->path}, {"digest", rec->digest}};
    rep["inputs"] = std::move(in);
    return rep;
}

void check_isotropy_level(int k, const AlternatingForm& w) {
    if (k < 1 || k >= w.degree()) {
        std::ostringstream os;
        os << "isotropy level k = " << k << " must lie in 1.." << w.degree() - 1;
        throw std::invalid_argument(os.str());
    }
}

std::vector<int> parse_index_csv(const std::string& csv) {
    std::vector<int> out;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw io::ParseError("bad index list: " + csv);
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw io::ParseError("empty index list");
    return out;
}

CoordinateSplit parse_split(const std::vector<std::string>& tokens) {
    CoordinateSplit s;
    bool have_x = false, have_y = false;
    for (const auto& t : tokens) {
        if (t.rfind("x=", 0) == 0) {
            s.x_indices = parse_index_csv(t.substr(2));
            have_x = true;
        } else if (t.rfind("y=", 0) == 0) {
            s.y_indices = parse_index_csv(t.substr(2));
            have_y = true;
        } else {
            throw io::ParseError("split tokens must look like x=1,2 or y=3,4");
        }
    }
    if (!have_x || !have_y) throw io::ParseError("--split needs both an x= and a y= token");
    return s;
}

struct TimingScope {
    bool enabled;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    void finish(json& rep) const {
        if (!enabled) return;
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        rep["timings"] = json{{"total_ms", ms.count()}};
    }
};

// --- subcommand drivers ------------------------------------------------------

struct AnalyzeOpts {
    std::string form_file, f_file, out;
    std::vector<std::string> l_files;
    std::vector<int> ks;
    std::uint64_t seed = 0;
    int random_bases = 200, coeff_bound = 2, passes = 8;
    bool timings = false;
};

int run_analyze(const AnalyzeOpts& o) {
    TimingScope timer{o.timings};
    const Input form_in = load_input(o.form_file);
    const AlternatingForm w = io::form_from_json(form_in.parsed);

    std::vector<Input> l_inputs;
    for (const auto& path : o.l_files) l_inputs.push_back(load_input(path));
    if (!o.ks.empty() && o.ks.size() != l_inputs.size())
        throw std::invalid_argument("analyze: need one --k per --L");

    std::vector<std::pair<std::string, const Input*>> named{{"form", &form_in}};
    for (std::size_t i = 0; i < l_inputs.size(); ++i)
        named.push_back({"L" + std::to_string(i + 1), &l_inputs[i]});
    std::optional<Input> f_in;
    if (!o.f_file.empty()) {
        f_in = load_input(o.f_file);
        named.push_back({"F", &*f_in});
    }
    json rep = base_report(named);
    rep["seed"] = o.seed;
    rep["dimension"] = w.dimension();
    rep["degree"] = w.degree();
    rep["degenerate"] = w.is_zero();

    const Subspace ker = kernel(w);
    rep["kernel_dim"] = ker.dim();
    rep["kernel"] = io::subspace_to_json(ker);
    rep["support_dim"] = support(w).dim();
    rep["decomposition"] = io::decomposition_to_json(is_decomposable(w));
    rep["length"] = io::length_bounds_to_json(length_bounds(w, o.random_bases, o.seed, o.coeff_bound));

    json isotropy = json::array();
    std::vector<Subspace> ls;
    for (std::size_t i = 0; i < l_inputs.size(); ++i) {
        const Subspace l = io::subspace_from_json(l_inputs[i].parsed);
        ls.push_back(l);
        const int k = o.ks.empty() ? 1 : o.ks[i];
        check_isotropy_level(k, w);
        json entry = io::isotropy_to_json(classify_isotropy(l, w, k));
        entry["subspace"] = l_inputs[i].path;
        isotropy.push_back(std::move(entry));
    }
    rep["isotropy"] = std::move(isotropy);

    if (f_in) {
        if (ls.empty()) throw std::invalid_argument("analyze: --F needs an --L to count against");
        const Subspace f = io::subspace_from_json(f_in->parsed);
        NLParams params{o.coeff_bound, o.passes, o.random_bases, o.seed};
        const NLResult nl = frak_N_L(w, ls.front(), f, params);
        rep["nl"] = io::nl_result_to_json(nl);
        if (nl.certified) rep["canonical"] = io::canonical_rep_to_json(canonical_representation(w, ls.front(), nl));
    }
    timer.finish(rep);
    emit(rep, o.out);
    return 0;
}

struct TwoFileOpts {
    std::string form_file, sub_file, out;
    int k = 1;
    bool timings = false;
};

int run_isotropy(const TwoFileOpts& o) {
    TimingScope timer{o.timings};
    const Input form_in = load_input(o.form_file), sub_in = load_input(o.sub_file);
    const AlternatingForm w = io::form_from_json(form_in.parsed);
    const Subspace l = io::subspace_from_json(sub_in.parsed);
    check_isotropy_level(o.k, w);
    json rep = base_report({{"form", &form_in}, {"subspace", &sub_in}});
    rep["report"] = io::isotropy_to_json(classify_isotropy(l, w, o.k));
    timer.finish(rep);
    emit(rep, o.out);
    return 0;
}

struct ComplementOpts {
    std::string form_file, l_file, v_file, out;
    int r = 1;
    bool timings = false;
};

int run_complement(const ComplementOpts& o) {
    TimingScope timer{o.timings};
    const Input form_in = load_input(o.form_file), l_in = load_input(o.l_file), v_in = load_input(o.v_file);
    const AlternatingForm w = io::form_from_json(form_in.parsed);
    const Subspace l = io::subspace_from_json(l_in.parsed);
    const Subspace v = io::subspace_from_json(v_in.parsed);
    json rep = base_report({{"form", &form_in}, {"L", &l_in}, {"V", &v_in}});
    rep["r"] = o.r;
    rep["complement"] = io::complement_to_json(complement_n_isotropic(w, l, v, o.r));
    timer.finish(rep);
    emit(rep, o.out);
    return 0;
}

struct NlOpts {
    std::string form_file, l_file, f_file, out;
    std::uint64_t seed = 0;
    int coeff_bound = 2, passes = 8, random_bases = 200;
    bool timings = false;
};

int run_nl(const NlOpts& o, bool canonical) {
    TimingScope timer{o.timings};
    const Input form_in = load_input(o.form_file), l_in = load_input(o.l_file), f_in = load_input(o.f_file);
    const AlternatingForm w = io::form_from_json(form_in.parsed);
    const Subspace l = io::subspace_from_json(l_in.parsed);
    const Subspace f = io::subspace_from_json(f_in.parsed);
    json rep = base_report({{"form", &form_in}, {"L", &l_in}, {"F", &f_in}});
    rep["seed"] = o.seed;
    NLParams params{o.coeff_bound, o.passes, o.random_bases, o.seed};
    const NLResult nl = frak_N_L(w, l, f, params);
    rep["nl"] = io::nl_result_to_json(nl);
    if (canonical) rep["canonical"] = io::canonical_rep_to_json(canonical_representation(w, l, nl));
    timer.finish(rep);
    emit(rep, o.out);
    return 0;
}

struct FlattenOpts {
    std::string form_file, out;
    std::vector<std::string> split;
    int steps = 100, samples = 50;
    double tol = 1e-6;
    std::uint64_t seed = 7;
    bool timings = false;
};

int run_flatten(const FlattenOpts& o) {
    TimingScope timer{o.timings};
    const Input form_in = load_input(o.form_file);
    const PolyForm w = io::polyform_or_constant_from_json(form_in.parsed);
    const CoordinateSplit s = parse_split(o.split);
    FlattenParams params;
    params.steps = o.steps;
    params.sample_count = o.samples;
    params.tol = o.tol;
    params.seed = o.seed;
    const FlattenResult r = moser_flatten(w, s, params);
    json rep = base_report({{"form", &form_in}});
    rep["seed"] = o.seed;
    rep["flatten"] = io::flatten_result_to_json(r);
    timer.finish(rep);
    emit(rep, o.out);
    if (!r.within_tol) {
        json err{{"error", "max_error exceeds tolerance"},
                 {"kind", "tolerance"},
                 {"max_error", r.max_error},
                 {"tol", o.tol}};
        std::cerr << err.dump() << "\n";
        return 5;
    }
    return 0;
}

struct CatalogOpts {
    std::string name, out, meta;
    int n = 1, N = 1;
    std::string kept;
};

int run_catalog(const CatalogOpts& o) {
    if (o.name == "list") {
        json names = json::array({"omega0", "constrained", "r11", "maxdim"});
        for (const auto& e : catalog_all()) names.push_back(e.name);
        emit(json{{"version", io::kVersion}, {"entries", std::move(names)}}, o.out);
        return 0;
    }
    std::optional<CatalogEntry> entry;
    if (o.name == "omega0") {
        entry = omega0(o.n, o.N);
    } else if (o.name == "r11") {
        entry = example_r11();
    } else if (o.name == "maxdim") {
        entry = max_dim_example(o.n, o.N);
    } else if (o.name == "constrained") {
        if (o.kept.empty()) throw io::ParseError("constrained needs --kept i,mu;i,mu;...");
        std::set<std::pair<int, int>> kept;
        std::istringstream is(o.kept);
        std::string pair_tok;
        while (std::getline(is, pair_tok, ';')) {
            const std::vector<int> pair = parse_index_csv(pair_tok);
            if (pair.size() != 2) throw io::ParseError("kept pairs need exactly two indices");
            kept.insert({pair[0], pair[1]});
        }
        entry = omega0_constrained(o.n, o.N, kept);
    } else {
        for (const auto& e : catalog_all())
            if (e.name == o.name) entry = e;
        if (!entry) throw io::ParseError("unknown catalog entry: " + o.name);
    }
    emit(io::form_to_json(entry->form), o.out);
    if (!o.meta.empty()) {
        json meta{{"version", io::kVersion},
                  {"name", entry->name},
                  {"dimension", entry->form.dimension()},
                  {"degree", entry->form.degree()},
                  {"coordinates", entry->coordinate_names},
                  {"l", io::subspace_to_json(entry->l)},
                  {"v", io::subspace_to_json(entry->v)},
                  {"v_isotropy", entry->v_isotropy},
                  {"f", io::subspace_to_json(entry->f)},
                  {"x_indices", entry->x_indices}};
        emit(meta, o.meta);
    }
    return 0;
}

struct InvolutiveOpts {
    std::string fields_file, out;
    int probes = 6;
    std::uint64_t seed = 0;
    bool timings = false;
};

int run_involutive(const InvolutiveOpts& o) {
    TimingScope timer{o.timings};
    const Input in = load_input(o.fields_file);
    const std::vector<PolyVectorField> fields = io::fields_from_json(in.parsed);
    json rep = base_report({{"fields", &in}});
    rep["seed"] = o.seed;
    rep["probe_points"] = o.probes;
    rep["report"] = io::involutive_to_json(involutive(fields, o.probes, o.seed));
    timer.finish(rep);
    emit(rep, o.out);
    return 0;
}

int fail(const std::string& kind, const std::string& what, int code) {
    std::cerr << json{{"error", what}, {"kind", kind}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact analysis of alternating forms: isotropic structure, canonical representations, flattening"};
    app.require_subcommand(1);

    AnalyzeOpts an;
    CLI::App* analyze = app.add_subcommand("analyze", "kernel, support, decomposability, length, and optional subspace reports");
    analyze->add_option("--form", an.form_file, "form JSON file")->required();
    analyze->add_option("--seed", an.seed, "search seed")->required();
    analyze->add_option("--L", an.l_files, "subspace JSON files to classify");
    analyze->add_option("--k", an.ks, "isotropy level per --L (default 1)");
    analyze->add_option("--F", an.f_file, "complement subspace for tuple counting against the first --L");
    analyze->add_option("--random-bases", an.random_bases, "random bases budget");
    analyze->add_option("--coeff-bound", an.coeff_bound, "local move coefficient bound");
    analyze->add_option("--passes", an.passes, "local improvement passes");
    analyze->add_flag("--timings", an.timings, "include wall-clock timings");
    analyze->add_option("-o,--output", an.out, "write the report here (atomic)");

    TwoFileOpts iso;
    CLI::App* isotropy = app.add_subcommand("isotropy", "classify a subspace at isotropy level k");
    isotropy->add_option("--form", iso.form_file)->required();
    isotropy->add_option("--subspace", iso.sub_file)->required();
    isotropy->add_option("--k", iso.k)->required();
    isotropy->add_flag("--timings", iso.timings);
    isotropy->add_option("-o,--output", iso.out);

    ComplementOpts comp;
    CLI::App* complement = app.add_subcommand("complement", "isotropic complement construction");
    complement->add_option("--form", comp.form_file)->required();
    complement->add_option("--L", comp.l_file)->required();
    complement->add_option("--V", comp.v_file)->required();
    complement->add_option("--r", comp.r, "isotropy level of V (default 1)");
    complement->add_flag("--timings", comp.timings);
    complement->add_option("-o,--output", comp.out);

    NlOpts nlo;
    CLI::App* nl = app.add_subcommand("nl", "minimize nonzero contraction tuples over bases of F");
    nl->add_option("--form", nlo.form_file)->required();
    nl->add_option("--L", nlo.l_file)->required();
    nl->add_option("--F", nlo.f_file)->required();
    nl->add_option("--seed", nlo.seed)->required();
    nl->add_option("--coeff-bound", nlo.coeff_bound);
    nl->add_option("--passes", nlo.passes);
    nl->add_option("--random-bases", nlo.random_bases);
    nl->add_flag("--timings", nlo.timings);
    nl->add_option("-o,--output", nlo.out);

    NlOpts cano;
    CLI::App* canonical = app.add_subcommand("canonical", "certified canonical representation of the form");
    canonical->add_option("--form", cano.form_file)->required();
    canonical->add_option("--L", cano.l_file)->required();
    canonical->add_option("--F", cano.f_file)->required();
    canonical->add_option("--seed", cano.seed)->required();
    canonical->add_option("--coeff-bound", cano.coeff_bound);
    canonical->add_option("--passes", cano.passes);
    canonical->add_option("--random-bases", cano.random_bases);
    canonical->add_flag("--timings", cano.timings);
    canonical->add_option("-o,--output", cano.out);

    FlattenOpts fl;
    CLI::App* flatten = app.add_subcommand("flatten", "deform a closed polynomial form to its constant part");
    flatten->add_option("--form", fl.form_file, "polynomial (or constant) form JSON")->required();
    flatten->add_option("--split", fl.split, "coordinate split, e.g. x=1,2 y=3,4")->required()->expected(2);
    flatten->add_option("--steps", fl.steps, "integrator steps");
    flatten->add_option("--samples", fl.samples, "verification sample count");
    flatten->add_option("--tol", fl.tol, "max coefficient error tolerance");
    flatten->add_option("--seed", fl.seed, "probe and sample seed")->required();
    flatten->add_flag("--timings", fl.timings);
    flatten->add_option("-o,--output", fl.out);

    CatalogOpts cat;
    CLI::App* catalog = app.add_subcommand("catalog", "emit a reference form (with optional metadata)");
    catalog->add_option("name", cat.name, "omega0 | constrained | r11 | maxdim | list | <full name>")->required();
    catalog->add_option("--n", cat.n, "leaf block size");
    catalog->add_option("--N", cat.N, "fiber family size");
    catalog->add_option("--kept", cat.kept, "kept (i,mu) pairs for constrained, e.g. 1,1;2,1");
    catalog->add_option("-o,--output", cat.out, "form JSON destination");
    catalog->add_option("--meta", cat.meta, "metadata JSON destination");

    InvolutiveOpts inv;
    CLI::App* involutive_cmd = app.add_subcommand("involutive", "bracket-closure test for a polynomial distribution");
    involutive_cmd->add_option("--fields", inv.fields_file, "vector fields JSON")->required();
    involutive_cmd->add_option("--probes", inv.probes, "probe point count");
    involutive_cmd->add_option("--seed", inv.seed)->required();
    involutive_cmd->add_flag("--timings", inv.timings);
    involutive_cmd->add_option("-o,--output", inv.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return fail("parse", e.what(), 2);
    }

    try {
        if (analyze->parsed()) return run_analyze(an);
        if (isotropy->parsed()) return run_isotropy(iso);
        if (complement->parsed()) return run_complement(comp);
        if (nl->parsed()) return run_nl(nlo, false);
        if (canonical->parsed()) return run_nl(cano, true);
        if (flatten->parsed()) return run_flatten(fl);
        if (catalog->parsed()) return run_catalog(cat);
        if (involutive_cmd->parsed()) return run_involutive(inv);
    } catch (const io::ParseError& e) {
        return fail("parse", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return fail("precondition", e.what(), 3);
    } catch (const std::out_of_range& e) {
        return fail("precondition", e.what(), 3);
    } catch (const std::domain_error& e) {
        return fail("precondition", e.what(), 3);
    } catch (const std::logic_error& e) {
        return fail("verification", e.what(), 4);
    } catch (const std::runtime_error& e) {
        return fail("precondition", e.what(), 3);
    }
    return 0;
}
