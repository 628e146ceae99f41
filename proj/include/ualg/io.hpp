#ifndef UALG_IO_HPP
#define UALG_IO_HPP

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "algebra.hpp"
#include "con_lattice.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "powerset.hpp"

namespace ualg {

using json = nlohmann::json;

/// Algebra file: {"size": n, "ops": [{"name", "arity", "table": [...]}]}.
/// Any other top-level keys ("name", "elements", ...) are metadata and
/// ignored. The first violated invariant is reported with its location.
inline FiniteAlgebra algebra_from_json(const json& j) {
    if (!j.is_object()) {
        throw ValidationError("algebra: expected a JSON object");
    }
    if (!j.contains("size") || !j["size"].is_number_integer() || j["size"].get<long long>() < 1) {
        throw ValidationError("algebra: 'size' must be a positive integer");
    }
    const auto n = j["size"].get<std::size_t>();
    if (!j.contains("ops") || !j["ops"].is_array()) {
        throw ValidationError("algebra: 'ops' must be an array");
    }
    std::vector<OperationSymbol> syms;
    std::vector<std::vector<Element>> tables;
    for (std::size_t i = 0; i < j["ops"].size(); ++i) {
        const auto& op = j["ops"][i];
        const std::string where = "algebra: ops[" + std::to_string(i) + "]";
        if (!op.is_object() || !op.contains("name") || !op["name"].is_string()) {
            throw ValidationError(where + " needs a string 'name'");
        }
        if (!op.contains("arity") || !op["arity"].is_number_integer() || op["arity"].get<long long>() < 0) {
            throw ValidationError(where + " needs a nonnegative integer 'arity'");
        }
        if (!op.contains("table") || !op["table"].is_array()) {
            throw ValidationError(where + " needs an array 'table'");
        }
        std::vector<Element> t;
        t.reserve(op["table"].size());
        for (std::size_t k = 0; k < op["table"].size(); ++k) {
            const auto& v = op["table"][k];
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<unsigned long long>() >= n) {
                throw ValidationError(where + ".table[" + std::to_string(k) + "] is not an element of [0," +
                                      std::to_string(n) + ")");
            }
            t.push_back(v.get<Element>());
        }
        syms.push_back({op["name"].get<std::string>(), op["arity"].get<std::size_t>()});
        tables.push_back(std::move(t));
    }
    return FiniteAlgebra::create(n, Signature(std::move(syms)), std::move(tables));
}

inline json to_json(const FiniteAlgebra& a) {
    json ops = json::array();
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        auto t = a.table(op);
        ops.push_back({{"name", a.signature()[op].name},
                       {"arity", a.arity(op)},
                       {"table", std::vector<Element>(t.begin(), t.end())}});
    }
    return {{"size", a.size()}, {"ops", std::move(ops)}};
}

inline json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw ValidationError("cannot open " + p.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + p.string());
    }
    out << text;
}

inline FiniteAlgebra load_algebra(const std::filesystem::path& p) {
    try {
        return algebra_from_json(read_json_file(p));
    } catch (const ValidationError& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

/// Congruence as its block list, least element first.
inline json to_json(const Congruence& c) { return c.blocks(); }

inline Congruence congruence_from_json(std::size_t n, const json& j) {
    if (!j.is_array()) {
        throw ValidationError("congruence: expected an array of blocks");
    }
    std::vector<std::vector<Element>> blocks;
    for (const auto& b : j) {
        if (!b.is_array()) {
            throw ValidationError("congruence: each block must be an array");
        }
        std::vector<Element> block;
        for (const auto& x : b) {
            if (!x.is_number_integer() || x.get<long long>() < 0) {
                throw ValidationError("congruence: block entries must be elements");
            }
            block.push_back(x.get<Element>());
        }
        blocks.push_back(std::move(block));
    }
    return Congruence::from_blocks(n, blocks);
}

/// {"algebra_size", "elements": [blocks...], "covers": [[i, j], ...],
///  "bottom", "top"}.
inline json to_json(const ConLattice& l) {
    json elems = json::array();
    for (const auto& c : l.elements()) {
        elems.push_back(to_json(c));
    }
    json covers = json::array();
    for (auto [i, j] : l.covers()) {
        covers.push_back({i, j});
    }
    return {{"algebra_size", l.algebra().size()},
            {"elements", std::move(elems)},
            {"covers", std::move(covers)},
            {"bottom", l.bottom()},
            {"top", l.top()}};
}

/// Hasse diagram, edges drawn upward from each lower cover. Nodes appear in
/// lattice index order and are labeled by their nontrivial blocks.
inline std::string to_dot(const ConLattice& l, const std::string& name = "con") {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=BT;\n  node [shape=box];\n";
    for (std::size_t i = 0; i < l.size(); ++i) {
        std::string label;
        for (const auto& b : l[i].blocks()) {
            if (b.size() < 2) {
                continue;
            }
            label += '{';
            for (std::size_t k = 0; k < b.size(); ++k) {
                label += (k ? "," : "") + std::to_string(b[k]);
            }
            label += '}';
        }
        if (label.empty()) {
            label = "0";
        }
        out << "  n" << i << " [label=\"" << label << "\"];\n";
    }
    for (auto [i, j] : l.covers()) {
        out << "  n" << i << " -> n" << j << ";\n";
    }
    out << "}\n";
    return out.str();
}

inline json subset_to_json(Subset s) {
    json out = json::array();
    for (std::size_t i = 0; i < 64; ++i) {
        if (s >> i & 1) {
            out.push_back(i);
        }
    }
    return out;
}

inline Subset subset_from_json(const json& j, std::size_t ground, const std::string& where) {
    if (!j.is_array()) {
        throw ValidationError(where + ": expected an array of elements");
    }
    Subset s = 0;
    for (const auto& e : j) {
        if (!e.is_number_unsigned() || e.get<std::size_t>() >= ground) {
            throw ValidationError(where + ": element out of range");
        }
        s |= Subset{1} << e.get<std::size_t>();
    }
    return s;
}

/// {"poset": {"elements": [names], "covers": [[s, t], ...]},
///  "vertices": [ground sizes], "arrows": [{"source", "target", "atoms"}]}.
/// "atoms" lists the image of each atom as an element array.
inline json to_json(const PosetDiagram& d) {
    json covers = json::array();
    json arrows = json::array();
    for (const auto& a : d.arrows()) {
        covers.push_back({a.source, a.target});
        json atoms = json::array();
        for (auto s : a.map.atom_images()) {
            atoms.push_back(subset_to_json(s));
        }
        arrows.push_back({{"source", a.source}, {"target", a.target}, {"atoms", std::move(atoms)}});
    }
    return {{"poset", {{"elements", d.names()}, {"covers", std::move(covers)}}},
            {"vertices", d.grounds()},
            {"arrows", std::move(arrows)}};
}

inline PosetDiagram diagram_from_json(const json& j) {
    try {
        auto names = j.at("poset").at("elements").get<std::vector<std::string>>();
        auto grounds = j.at("vertices").get<std::vector<std::size_t>>();
        if (grounds.size() != names.size()) {
            throw ValidationError("vertices: expected one ground size per poset element");
        }
        std::vector<std::pair<std::size_t, std::size_t>> covers;
        for (const auto& c : j.at("poset").at("covers")) {
            covers.emplace_back(c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>());
        }
        std::vector<PosetDiagram::Arrow> arrows;
        const auto& ja = j.at("arrows");
        for (std::size_t k = 0; k < ja.size(); ++k) {
            const std::string where = "arrows[" + std::to_string(k) + "]";
            auto s = ja[k].at("source").get<std::size_t>();
            auto t = ja[k].at("target").get<std::size_t>();
            if (s >= names.size() || t >= names.size()) {
                throw ValidationError(where + ": vertex out of range");
            }
            std::vector<Subset> atoms;
            for (const auto& x : ja[k].at("atoms")) {
                atoms.push_back(subset_from_json(x, grounds[t], where + ".atoms"));
            }
            arrows.push_back({s, t, SemilatticeMap(grounds[s], grounds[t], std::move(atoms))});
        }
        std::vector<std::pair<std::size_t, std::size_t>> from_arrows;
        for (const auto& a : arrows) {
            from_arrows.emplace_back(a.source, a.target);
        }
        auto sorted = [](auto v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        if (sorted(covers) != sorted(from_arrows)) {
            throw ValidationError("poset covers and arrows disagree");
        }
        return PosetDiagram(std::move(names), std::move(grounds), std::move(arrows));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed diagram: ") + e.what());
    }
}

inline PosetDiagram load_diagram(const std::filesystem::path& p) { return diagram_from_json(read_json_file(p)); }

/// Vertices labeled "name: P(k)", arrows labeled by their atom images.
inline std::string to_dot(const PosetDiagram& d, const std::string& name = "diagram") {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=BT;\n";
    for (std::size_t v = 0; v < d.vertex_count(); ++v) {
        out << "  v" << v << " [label=\"" << d.name(v) << ": P(" << d.ground(v) << ")\"];\n";
    }
    for (const auto& a : d.arrows()) {
        out << "  v" << a.source << " -> v" << a.target << " [label=\"";
        for (std::size_t i = 0; i < a.map.source_ground(); ++i) {
            out << (i ? " " : "") << i << ":" << subset_to_string(a.map.atom_images()[i]);
        }
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace ualg

#endif
