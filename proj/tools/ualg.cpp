// Command-line front end: congruence lattices, commutators, the bow-tie
// diagram, lifting search and catalog generation. JSON on stdout.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ualg.hpp"

namespace fs = std::filesystem;
using namespace ualg;

namespace {

enum Exit : int { ok = 0, failed = 1, truncated = 2, cap_exceeded = 3, usage = 64 };

struct UsageError : Error {
    using Error::Error;
};

struct Options {
    unsigned jobs = 1;
    std::size_t con_cap = default_con_cap;
};

std::size_t env_con_cap() {
    if (const char* v = std::getenv("UALG_CON_CAP")) {
        try {
            std::size_t pos = 0;
            auto n = std::stoull(v, &pos);
            if (pos == std::string(v).size() && n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("UALG_CON_CAP must be a positive integer, got '") + v + "'");
    }
    return default_con_cap;
}

void require_file(const std::string& p) {
    if (!fs::is_regular_file(p)) {
        throw UsageError("no such file: " + p);
    }
}

FiniteAlgebra load_input(const std::string& p) {
    require_file(p);
    return load_algebra(p);
}

// "0" and "1" are the trivial congruences; otherwise blocks separated by
// '|' with elements separated by spaces or commas: "0 2|1 3".
Congruence parse_blocks(const FiniteAlgebra& a, const std::string& text) {
    if (text == "0") {
        return Congruence::identity(a.size());
    }
    if (text == "1") {
        return Congruence::total(a.size());
    }
    std::vector<std::vector<Element>> blocks;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '|')) {
        for (auto& ch : part) {
            if (ch == ',') {
                ch = ' ';
            }
        }
        std::stringstream es(part);
        std::vector<Element> block;
        std::string tok;
        while (es >> tok) {
            std::size_t pos = 0;
            unsigned long v = 0;
            try {
                v = std::stoul(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size()) {
                throw UsageError("bad element '" + tok + "' in partition '" + text + "'");
            }
            block.push_back(static_cast<Element>(v));
        }
        blocks.push_back(std::move(block));
    }
    try {
        return Congruence::from_blocks(a.size(), blocks);
    } catch (const ValidationError& e) {
        throw UsageError(std::string("invalid partition '") + text + "': " + e.what());
    }
}

std::string render(const Congruence& c) {
    if (c.is_total()) {
        return "1";
    }
    if (c.is_identity()) {
        return "0";
    }
    return c.to_string();
}

int print(const json& j) {
    std::cout << j.dump(2) << "\n";
    return ok;
}

// con -----------------------------------------------------------------------

int cmd_con(const Options& o, const std::string& file, const std::string& format, bool properties) {
    auto a = load_input(file);
    auto con = con_lattice(a, {o.con_cap, o.jobs});
    if (format == "dot") {
        std::cout << to_dot(con);
        return ok;
    }
    json j = to_json(con);
    j["size"] = con.size();
    if (properties) {
        auto l = con.lattice();
        json props;
        for (auto p : {LatticeProperty::distributive, LatticeProperty::modular, LatticeProperty::sd_join,
                       LatticeProperty::sd_meet}) {
            auto v = lattice_property(l, p);
            props[to_string(p)] = v.holds;
        }
        j["properties"] = props;
        if (auto w = find_m3_01(l)) {
            json atoms = json::array();
            for (auto i : w->atoms) {
                atoms.push_back(to_json(con[i]));
            }
            j["m3"] = {{"atoms", atoms}, {"checks", w->checks}};
        } else {
            j["m3"] = nullptr;
        }
    }
    if (format == "text") {
        std::cout << con.size() << " congruences\n";
        for (std::size_t i = 0; i < con.size(); ++i) {
            std::cout << "  " << i << ": " << render(con[i]) << "\n";
        }
        if (properties) {
            for (auto& [k, v] : j["properties"].items()) {
                std::cout << k << ": " << (v.get<bool>() ? "yes" : "no") << "\n";
            }
            std::cout << "m3: " << (j["m3"].is_null() ? "none" : j["m3"]["atoms"].dump()) << "\n";
        }
        return ok;
    }
    return print(j);
}

// commutator ----------------------------------------------------------------

int cmd_commutator(const Options& o, const std::string& file, const std::string& alpha_s, const std::string& beta_s,
                   bool want_centralizer, bool want_abelian) {
    auto a = load_input(file);
    auto alpha = parse_blocks(a, alpha_s);
    auto beta = parse_blocks(a, beta_s);
    for (auto* c : {&alpha, &beta}) {
        if (auto v = find_incompatibility(a, *c)) {
            print({{"error", "not a congruence"}, {"partition", to_json(*c)}, {"witness", v->message(a.signature())}});
            return failed;
        }
    }
    json j{{"alpha", to_json(alpha)}, {"beta", to_json(beta)}, {"commutator", to_json(commutator(a, alpha, beta))}};
    if (want_centralizer) {
        auto con = con_lattice(a, {o.con_cap, o.jobs});
        j["centralizer"] = to_json(centralizer(con, Congruence::identity(a.size()), beta));
    }
    if (want_abelian) {
        j["abelian"] = is_abelian(a);
    }
    return print(j);
}

// bowtie --------------------------------------------------------------------

int cmd_bowtie(const std::string& emit) {
    auto d = build_bowtie();
    if (emit == "json") {
        return print(to_json(d));
    }
    if (emit == "dot") {
        std::cout << to_dot(d, "bowtie");
        return ok;
    }
    auto f = verify_functorial(d);
    json arrows = json::array();
    bool flags_ok = true;
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        const auto& a = d.arrow(k);
        const bool from_a = a.source == 0;
        const bool good = a.map.embedding() && a.map.unit_preserving() && a.map.meet_preserving() == from_a;
        flags_ok = flags_ok && good;
        arrows.push_back({{"arrow", d.name(a.source) + "->" + d.name(a.target)},
                          {"embedding", a.map.embedding()},
                          {"unit_preserving", a.map.unit_preserving()},
                          {"meet_preserving", a.map.meet_preserving()}});
    }
    auto im = image_intersection_m3(bowtie_maps::u(0), bowtie_maps::u(1), bowtie_maps::u(2));
    json common = json::array(), agree = json::array();
    for (auto s : im.common_image) {
        common.push_back(subset_to_json(s));
    }
    for (auto s : im.agreement) {
        agree.push_back(subset_to_json(s));
    }
    const bool all = f.holds && flags_ok && im.verdict();
    print({{"functorial", f.holds},
           {"pairs_checked", f.pairs_checked},
           {"paths_checked", f.paths_checked},
           {"arrows", arrows},
           {"arrow_flags_ok", flags_ok},
           {"image_intersection", {{"common_image", common}, {"agreement", agree}, {"m3", im.verdict()}}},
           {"ok", all}});
    return all ? ok : failed;
}

// lift ----------------------------------------------------------------------

int cmd_lift(const Options& o, const std::string& diagram_file, const std::string& catalog_dir, std::size_t budget,
             std::size_t max_results, std::size_t time_ms) {
    require_file(diagram_file);
    if (!fs::is_directory(catalog_dir)) {
        throw UsageError("catalog directory not found: " + catalog_dir);
    }
    auto d = load_diagram(diagram_file);
    auto cat = load(catalog_dir);
    auto algs = cat.algebras();
    SearchBounds b;
    b.hom_budget = budget;
    b.max_results = max_results;
    b.time_budget = std::chrono::milliseconds(time_ms);
    b.jobs = o.jobs;
    b.con = {o.con_cap, o.jobs};
    auto r = lift_search(d, algs, b);
    json out = to_json(d, r.report, r.liftings.size());
    bool bowtie = d.vertex_count() == 8 && d.arrow_count() == 15;
    try {
        bowtie_roles(d);
    } catch (const ValidationError&) {
        bowtie = false;
    }
    json ls = json::array();
    for (std::size_t i = 0; i < r.liftings.size(); ++i) {
        std::vector<std::optional<std::string>> refs;
        for (auto idx : r.catalog_indices[i]) {
            refs.push_back(catalog_file_name(idx));
        }
        json item{{"candidate", to_json(d, r.liftings[i], refs)}};
        if (bowtie) {
            auto m = verify_m3_extraction(d, r.liftings[i], b.con);
            json v{{"lifting_validated", m.lifting_validated}};
            if (m.witness) {
                json atoms = json::array();
                for (const auto& c : m.witness->atoms()) {
                    atoms.push_back(to_json(c));
                }
                v["m3_witness"] = atoms;
            }
            if (m.refutation_code) {
                v["refutation"] = {{"code", *m.refutation_code}, {"detail", m.refutation}};
            }
            item["m3_extraction"] = v;
        }
        ls.push_back(item);
    }
    out["results"] = ls;
    print(out);
    return r.report.truncated ? truncated : ok;
}

// catalog -------------------------------------------------------------------

Signature parse_signature(const std::string& text) {
    std::vector<OperationSymbol> ops;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto slash = item.find('/');
        if (slash == std::string::npos || slash == 0) {
            throw UsageError("operation '" + item + "' must look like name/arity");
        }
        try {
            ops.push_back({item.substr(0, slash), std::stoul(item.substr(slash + 1))});
        } catch (const std::exception&) {
            throw UsageError("bad arity in '" + item + "'");
        }
    }
    return Signature(ops);
}

AlgebraFilter parse_filter(const std::string& f) {
    if (f == "any") {
        return filters::any();
    }
    if (f == "idempotent") {
        return filters::idempotent();
    }
    if (f == "simple") {
        return filters::simple();
    }
    if (f == "semilattice") {
        return filters::semilattice();
    }
    throw UsageError("unknown filter '" + f + "'");
}

int cmd_catalog_gen(const std::string& kind, std::size_t max_size, const std::string& out_dir, const std::string& ops,
                    const std::string& filter) {
    if (max_size == 0) {
        throw UsageError("--max-size must be positive");
    }
    if (fs::exists(out_dir) && !(fs::is_directory(out_dir) && fs::is_empty(out_dir))) {
        throw UsageError("output directory exists and is not empty: " + out_dir);
    }
    Catalog cat;
    if (kind == "lattice") {
        cat = gen_lattices(max_size);
    } else {
        cat = gen_algebras(parse_signature(ops), max_size, parse_filter(filter));
    }
    save(cat, out_dir);
    json counts = json::array();
    for (std::size_t n = 1; n <= max_size; ++n) {
        counts.push_back(cat.count_of_size(n));
    }
    return print({{"kind", kind}, {"counts", counts}, {"total", cat.size()}, {"out", out_dir}});
}

// random --------------------------------------------------------------------

int cmd_random(std::uint64_t seed, std::size_t size, const std::string& ops) {
    if (size == 0) {
        throw UsageError("--size must be positive");
    }
    auto sig = parse_signature(ops);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Element> d(0, static_cast<Element>(size - 1));
    std::vector<std::vector<Element>> tables;
    for (const auto& op : sig.operations()) {
        auto len = checked_power(size, op.arity);
        if (!len || *len > (std::size_t{1} << 24)) {
            throw CapExceeded("operation table too large", std::size_t{1} << 24);
        }
        std::vector<Element> t(*len);
        for (auto& x : t) {
            x = d(rng);
        }
        tables.push_back(std::move(t));
    }
    return print(to_json(FiniteAlgebra::create(size, sig, std::move(tables))));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite algebra toolkit: congruences, commutators, diagram liftings"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--jobs", o.jobs, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

    std::string file, format = "json", alpha = "1", beta = "1", emit, diagram, catalog_dir, out_dir, kind = "lattice",
                      ops = "f/2", filter = "any";
    bool properties = false, want_centralizer = false, want_abelian = false, verify = false;
    std::size_t cap = 0, budget = 0, max_results = 0, time_ms = 0, max_size = 0, size = 3;
    std::uint64_t seed = 0;

    auto* con = app.add_subcommand("con", "Congruence lattice of an algebra");
    con->add_option("algebra", file, "Algebra JSON file")->required();
    con->add_option("--format", format, "json, dot or text")->check(CLI::IsMember({"json", "dot", "text"}));
    con->add_flag("--properties", properties, "Distributivity, modularity, SD and M3 check");
    con->add_option("--cap", cap, "Maximum number of congruences")->check(CLI::PositiveNumber);

    auto* com = app.add_subcommand("commutator", "Commutator of two congruences");
    com->add_option("algebra", file, "Algebra JSON file")->required();
    com->add_option("--alpha", alpha, "Blocks like \"0 2|1 3\", or 0 / 1");
    com->add_option("--beta", beta, "Blocks like \"0 2|1 3\", or 0 / 1");
    com->add_flag("--centralizer", want_centralizer, "Also print (0 : beta)");
    com->add_flag("--abelian", want_abelian, "Also print whether [1,1] = 0");

    auto* bow = app.add_subcommand("bowtie", "The bow-tie diagram of powerset semilattices");
    auto* emit_opt = bow->add_option("--emit", emit, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    bow->add_flag("--verify", verify, "Check functoriality, arrow flags and the M3 image (default)")
        ->excludes(emit_opt);

    auto* lift = app.add_subcommand("lift", "Search a catalog for liftings of a diagram");
    lift->add_option("diagram", diagram, "Diagram JSON file")->required();
    lift->add_option("--catalog", catalog_dir, "Catalog directory")->required();
    lift->add_option("--budget", budget, "Homomorphism search budget per algebra pair (0: none)");
    lift->add_option("--max-results", max_results, "Stop after this many liftings (0: none)");
    lift->add_option("--time-ms", time_ms, "Wall-clock budget (0: none)");

    auto* cat = app.add_subcommand("catalog", "Catalog tools");
    cat->require_subcommand(1);
    auto* gen = cat->add_subcommand("gen", "Enumerate algebras up to isomorphism and save them");
    gen->add_option("--kind", kind, "lattice or algebra")->check(CLI::IsMember({"lattice", "algebra"}));
    gen->add_option("--max-size", max_size, "Largest size")->required();
    gen->add_option("--out", out_dir, "Output directory (must be new or empty)")->required();
    gen->add_option("--ops", ops, "Signature for --kind algebra, e.g. f/2,g/1");
    gen->add_option("--filter", filter, "any, idempotent, simple or semilattice");

    auto* rnd = app.add_subcommand("random", "Random algebra from a seed");
    rnd->add_option("--seed", seed, "Seed")->required();
    rnd->add_option("--size", size, "Number of elements");
    rnd->add_option("--ops", ops, "Signature, e.g. f/2,g/1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        o.con_cap = cap ? cap : env_con_cap();
        if (*con) {
            return cmd_con(o, file, format, properties);
        }
        if (*com) {
            return cmd_commutator(o, file, alpha, beta, want_centralizer, want_abelian);
        }
        if (*bow) {
            return cmd_bowtie(emit);
        }
        if (*lift) {
            return cmd_lift(o, diagram, catalog_dir, budget, max_results, time_ms);
        }
        if (*gen) {
            return cmd_catalog_gen(kind, max_size, out_dir, ops, filter);
        }
        if (*rnd) {
            return cmd_random(seed, size, ops);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cap_exceeded;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const SignatureMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failed;
    }
    return usage;
}
