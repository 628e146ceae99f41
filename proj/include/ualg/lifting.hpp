#ifndef UALG_LIFTING_HPP
#define UALG_LIFTING_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "con_lattice.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "homomorphism.hpp"
#include "io.hpp"
#include "powerset.hpp"

namespace ualg {

/// An algebra-valued diagram over the same poset as a PosetDiagram, with
/// isomorphisms eps[v] : P(ground v) -> Con algebras[v] given pointwise
/// (indexed by subset bitmask) and one map per diagram arrow.
struct LiftingCandidate {
    std::vector<FiniteAlgebra> algebras;
    std::vector<std::vector<Congruence>> epsilon;
    std::vector<std::vector<Element>> maps;
    /// After normalization: element i of vertex v is carriers[v][i] in the
    /// top algebra. Empty otherwise.
    std::vector<std::vector<Element>> carriers;

    bool operator==(const LiftingCandidate&) const = default;
};

enum class LiftingIssueKind { homomorphism, commutativity, epsilon, naturality };

inline const char* to_string(LiftingIssueKind k) {
    switch (k) {
    case LiftingIssueKind::homomorphism: return "homomorphism";
    case LiftingIssueKind::commutativity: return "commutativity";
    case LiftingIssueKind::epsilon: return "epsilon";
    case LiftingIssueKind::naturality: return "naturality";
    }
    return "?";
}

struct LiftingIssue {
    LiftingIssueKind kind;
    std::string message;
};

struct LiftingReport {
    std::vector<LiftingIssue> issues;
    bool accepted() const noexcept { return issues.empty(); }
    bool has(LiftingIssueKind k) const {
        return std::any_of(issues.begin(), issues.end(), [k](const auto& i) { return i.kind == k; });
    }
};

namespace detail {

/// 0 and 1 by name, anything else by its blocks.
inline std::string render(const Congruence& c) {
    if (c.is_total()) {
        return "1";
    }
    if (c.is_identity()) {
        return "0";
    }
    return c.to_string();
}

inline std::string arrow_name(const PosetDiagram& d, std::size_t k) {
    return d.name(d.arrow(k).source) + "->" + d.name(d.arrow(k).target);
}

inline std::vector<Element> compose_maps(std::span<const Element> g, std::span<const Element> f) {
    std::vector<Element> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = g[f[i]];
    }
    return out;
}

inline std::vector<Element> path_map(const LiftingCandidate& c,
                                     std::span<const std::size_t> path, std::size_t s) {
    std::vector<Element> m = c.algebras[s].universe();
    for (auto k : path) {
        m = compose_maps(c.maps[k], m);
    }
    return m;
}

inline void require_shape(const PosetDiagram& d, const LiftingCandidate& c) {
    const std::size_t v = d.vertex_count();
    if (c.algebras.size() != v || c.epsilon.size() != v) {
        throw ValidationError("candidate needs one algebra and one epsilon table per vertex");
    }
    if (c.maps.size() != d.arrow_count()) {
        throw ValidationError("candidate needs one map per diagram arrow");
    }
    for (std::size_t x = 0; x < v; ++x) {
        if (c.epsilon[x].size() != (std::size_t{1} << d.ground(x))) {
            throw ValidationError("epsilon table of " + d.name(x) + " has the wrong length");
        }
        for (const auto& e : c.epsilon[x]) {
            if (e.size() != c.algebras[x].size()) {
                throw ValidationError("epsilon table of " + d.name(x) + " holds a partition of the wrong set");
            }
        }
        if (x > 0) {
            require_same_signature(c.algebras[0], c.algebras[x]);
        }
    }
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        const auto& a = d.arrow(k);
        if (c.maps[k].size() != c.algebras[a.source].size()) {
            throw ValidationError("map on arrow " + arrow_name(d, k) + " has the wrong length");
        }
        for (auto y : c.maps[k]) {
            if (y >= c.algebras[a.target].size()) {
                throw ValidationError("map on arrow " + arrow_name(d, k) + " leaves the target universe");
            }
        }
    }
}

} // namespace detail

/// Checks every lifting condition and collects all failures. Shape and
/// signature problems throw; everything else is reported.
inline LiftingReport check_lifting(const PosetDiagram& d, const LiftingCandidate& c, ConLatticeOptions opts = {}) {
    detail::require_shape(d, c);
    LiftingReport r;
    auto issue = [&](LiftingIssueKind k, std::string m) { r.issues.push_back({k, std::move(m)}); };

    std::vector<std::optional<Homomorphism>> homs(d.arrow_count());
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        const auto& a = d.arrow(k);
        auto h = check_homomorphism(c.algebras[a.source], c.algebras[a.target], c.maps[k]);
        if (!h) {
            issue(LiftingIssueKind::homomorphism,
                  "map on arrow " + detail::arrow_name(d, k) + " is not a homomorphism: " + h.violation->message());
        } else {
            homs[k] = std::move(h.homomorphism);
        }
    }

    for (std::size_t s = 0; s < d.vertex_count(); ++s) {
        for (std::size_t t = 0; t < d.vertex_count(); ++t) {
            if (s == t || !d.leq(s, t)) {
                continue;
            }
            auto ps = d.paths(s, t);
            const auto first = detail::path_map(c, ps.front(), s);
            for (std::size_t i = 1; i < ps.size(); ++i) {
                auto other = detail::path_map(c, ps[i], s);
                if (other == first) {
                    continue;
                }
                std::size_t x = 0;
                while (other[x] == first[x]) {
                    ++x;
                }
                auto path_str = [&](const std::vector<std::size_t>& p) {
                    std::string out = d.name(s);
                    for (auto k : p) {
                        out += "->" + d.name(d.arrow(k).target);
                    }
                    return out;
                };
                issue(LiftingIssueKind::commutativity,
                      "square " + path_str(ps.front()) + " vs " + path_str(ps[i]) + " fails at element " +
                          std::to_string(x) + ": " + std::to_string(first[x]) + " vs " + std::to_string(other[x]));
            }
        }
    }

    // eps_ok: eps is an isomorphism; eps_cong: it at least lands in Con,
    // which is all naturality needs to be stated.
    std::vector<bool> eps_ok(d.vertex_count(), true), eps_cong(d.vertex_count(), true);
    for (std::size_t x = 0; x < d.vertex_count(); ++x) {
        const auto& eps = c.epsilon[x];
        const auto& alg = c.algebras[x];
        const std::string who = "eps_" + d.name(x);
        for (std::size_t s = 0; s < eps.size(); ++s) {
            if (auto v = find_incompatibility(alg, eps[s])) {
                issue(LiftingIssueKind::epsilon,
                      who + "(" + subset_to_string(s) + ") is not a congruence: " + v->message(alg.signature()));
                eps_ok[x] = false;
                eps_cong[x] = false;
            }
        }
        if (!eps_ok[x]) {
            continue;
        }
        for (std::size_t s = 0; s < eps.size() && eps_ok[x]; ++s) {
            for (std::size_t t = 0; t < eps.size(); ++t) {
                const bool sub = (s & ~t) == 0;
                if (sub != eps[s].leq(eps[t])) {
                    issue(LiftingIssueKind::epsilon, who + " is not an order isomorphism: " + subset_to_string(s) +
                                                         (sub ? " <= " : " !<= ") + subset_to_string(t) + " but " +
                                                         detail::render(eps[s]) + (sub ? " !<= " : " <= ") +
                                                         detail::render(eps[t]));
                    eps_ok[x] = false;
                    break;
                }
            }
        }
        if (!eps_ok[x]) {
            continue;
        }
        // Order-embedding, so injective; onto iff Con has the same size.
        auto con = con_lattice(alg, opts);
        if (con.size() != eps.size()) {
            issue(LiftingIssueKind::epsilon, who + " is not onto: Con " + d.name(x) + " has " +
                                                 std::to_string(con.size()) + " elements, P(" +
                                                 std::to_string(d.ground(x)) + ") has " + std::to_string(eps.size()));
            eps_ok[x] = false;
        }
    }

    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        const auto& a = d.arrow(k);
        if (!homs[k] || !eps_cong[a.source] || !eps_cong[a.target]) {
            continue;
        }
        const auto& ex = c.epsilon[a.source];
        const auto& ey = c.epsilon[a.target];
        for (Subset s = 0; s < ex.size(); ++s) {
            auto lhs = image_congruence(*homs[k], ex[s]);
            const Subset hs = a.map(s);
            if (lhs != ey[hs]) {
                issue(LiftingIssueKind::naturality,
                      "naturality fails on arrow " + detail::arrow_name(d, k) + " at " + subset_to_string(s) +
                          ": Con f(" + detail::render(ex[s]) + ") = " + detail::render(lhs) + " but eps_" +
                          d.name(a.target) + "(" + subset_to_string(hs) + ") = " + detail::render(ey[hs]));
            }
        }
    }
    return r;
}

/// Raised when a candidate or a mock input refutes a pipeline step.
class PipelineRefutation : public Error {
public:
    PipelineRefutation(std::string code, const std::string& detail)
        : Error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Replaces every vertex by its image in the top algebra, so that all
/// maps become inclusions. Requires a top vertex and injective maps.
inline LiftingCandidate normalize_to_inclusions(const PosetDiagram& d, const LiftingCandidate& c) {
    detail::require_shape(d, c);
    auto top = d.top();
    if (!top) {
        throw ValidationError("normalization needs a diagram with a top vertex");
    }
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        auto sorted = c.maps[k];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw PipelineRefutation("non-injective", "map on arrow " + detail::arrow_name(d, k) +
                                                          " identifies two elements");
        }
    }
    const std::size_t v = d.vertex_count();
    std::vector<std::vector<Element>> into_top(v);
    for (std::size_t x = 0; x < v; ++x) {
        into_top[x] = detail::path_map(c, d.paths(x, *top).front(), x);
    }
    const FiniteAlgebra& b = c.algebras[*top];
    LiftingCandidate out;
    out.carriers.resize(v);
    for (std::size_t x = 0; x < v; ++x) {
        auto carrier = into_top[x];
        std::sort(carrier.begin(), carrier.end());
        out.algebras.push_back(induced_subalgebra(b, carrier));
        // position of each old element in the new (sorted) carrier
        std::vector<Element> pos(carrier.size());
        for (std::size_t i = 0; i < carrier.size(); ++i) {
            pos[i] = static_cast<Element>(std::lower_bound(carrier.begin(), carrier.end(), into_top[x][i]) -
                                          carrier.begin());
        }
        std::vector<std::vector<Element>> eps;
        for (const auto& e : c.epsilon[x]) {
            std::vector<Element> ids(carrier.size());
            for (std::size_t i = 0; i < carrier.size(); ++i) {
                ids[pos[i]] = e.label(static_cast<Element>(i));
            }
            eps.push_back(std::move(ids));
        }
        std::vector<Congruence> transported;
        for (const auto& ids : eps) {
            transported.push_back(Congruence::from_classes(ids));
        }
        out.epsilon.push_back(std::move(transported));
        out.carriers[x] = std::move(carrier);
    }
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        const auto& a = d.arrow(k);
        const auto& cs = out.carriers[a.source];
        const auto& ct = out.carriers[a.target];
        std::vector<Element> m(cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i) {
            m[i] = static_cast<Element>(std::lower_bound(ct.begin(), ct.end(), cs[i]) - ct.begin());
        }
        out.maps.push_back(std::move(m));
    }
    return out;
}

/// Which vertex plays which part in the bow-tie pipeline.
struct BowtieRoles {
    std::size_t a = 0;
    std::array<std::size_t, 3> ai{}, bj{};
    std::size_t b = 0;
};

/// Looks the roles up by the vertex names A, A0..A2, B0..B2, B.
inline BowtieRoles bowtie_roles(const PosetDiagram& d) {
    auto get = [&](const std::string& n) {
        auto v = d.find(n);
        if (!v) {
            throw ValidationError("diagram has no vertex named " + n);
        }
        return *v;
    };
    BowtieRoles r;
    r.a = get("A");
    r.b = get("B");
    for (std::size_t i = 0; i < 3; ++i) {
        r.ai[i] = get("A" + std::to_string(i));
        r.bj[i] = get("B" + std::to_string(i));
    }
    return r;
}

/// Subuniverses of B standing for A, A_i, B_j after normalization.
struct BowtieCarriers {
    FiniteAlgebra b;
    std::vector<Element> a;
    std::array<std::vector<Element>, 3> ai, bj;
};

inline BowtieCarriers bowtie_carriers(const PosetDiagram& d, const LiftingCandidate& normalized) {
    if (normalized.carriers.empty()) {
        throw ValidationError("candidate is not normalized");
    }
    auto roles = bowtie_roles(d);
    BowtieCarriers c{normalized.algebras[roles.b], normalized.carriers[roles.a], {}, {}};
    for (std::size_t i = 0; i < 3; ++i) {
        c.ai[i] = normalized.carriers[roles.ai[i]];
        c.bj[i] = normalized.carriers[roles.bj[i]];
    }
    return c;
}

/// U with the inclusions A -> U, A_i -> U, U -> B_j, U -> B.
struct UExtraction {
    std::vector<Element> carrier;
    FiniteAlgebra u;
    std::vector<Homomorphism> from_a;  // one map: A -> U
    std::vector<Homomorphism> from_ai; // A_i -> U
    std::vector<Homomorphism> to_bj;   // U -> B_j
    std::vector<Homomorphism> to_b;    // one map: U -> B
};

namespace detail {

inline Homomorphism inclusion(const FiniteAlgebra& dom, std::span<const Element> dom_carrier,
                              const FiniteAlgebra& cod, std::span<const Element> cod_carrier, const std::string& what) {
    std::vector<Element> m;
    for (auto x : dom_carrier) {
        auto it = std::lower_bound(cod_carrier.begin(), cod_carrier.end(), x);
        if (it == cod_carrier.end() || *it != x) {
            throw PipelineRefutation("not-contained", what + " is not contained in its target (element " +
                                                          std::to_string(x) + ")");
        }
        m.push_back(static_cast<Element>(it - cod_carrier.begin()));
    }
    auto h = check_homomorphism(dom, cod, m);
    if (!h) {
        throw PipelineRefutation("inclusion-not-homomorphism", what + ": " + h.violation->message());
    }
    return std::move(*h.homomorphism);
}

} // namespace detail

/// U is the subalgebra of B generated by A0 ∪ A1 ∪ A2; it must lie inside
/// every B_j. Carriers are sorted subuniverses of B.
inline UExtraction extract_u(const BowtieCarriers& c) {
    std::vector<Element> gens;
    for (const auto& s : c.ai) {
        gens.insert(gens.end(), s.begin(), s.end());
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    auto carrier = subalgebra_generated(c.b, gens);
    for (std::size_t j = 0; j < 3; ++j) {
        if (!std::includes(c.bj[j].begin(), c.bj[j].end(), carrier.begin(), carrier.end())) {
            throw PipelineRefutation("u-not-in-bj", "U is not contained in B" + std::to_string(j));
        }
    }
    auto u = induced_subalgebra(c.b, carrier);
    std::vector<Element> all = c.b.universe();
    UExtraction e{carrier, u, {}, {}, {}, {}};
    e.from_a.push_back(detail::inclusion(induced_subalgebra(c.b, c.a), c.a, u, carrier, "A"));
    for (std::size_t i = 0; i < 3; ++i) {
        e.from_ai.push_back(
            detail::inclusion(induced_subalgebra(c.b, c.ai[i]), c.ai[i], u, carrier, "A" + std::to_string(i)));
    }
    for (std::size_t j = 0; j < 3; ++j) {
        e.to_bj.push_back(
            detail::inclusion(u, carrier, induced_subalgebra(c.b, c.bj[j]), c.bj[j], "U in B" + std::to_string(j)));
    }
    e.to_b.push_back(detail::inclusion(u, carrier, c.b, all, "U in B"));
    return e;
}

inline UExtraction extract_u(const PosetDiagram& d, const LiftingCandidate& normalized) {
    return extract_u(bowtie_carriers(d, normalized));
}

/// Whether Con of each inclusion A -> U, A_i -> U sends 1 to 1_U; entry 0
/// is A, entries 1..3 are A0..A2.
struct OnePreservation {
    std::array<bool, 4> holds{};
    bool all() const { return std::all_of(holds.begin(), holds.end(), [](bool b) { return b; }); }
};

inline OnePreservation check_one_preservation(const UExtraction& e) {
    OnePreservation r;
    auto sends_one_to_one = [](const Homomorphism& f) {
        return image_congruence(f, Congruence::total(f.domain().size())).is_total();
    };
    r.holds[0] = sends_one_to_one(e.from_a.at(0));
    for (std::size_t i = 0; i < 3; ++i) {
        r.holds[i + 1] = sends_one_to_one(e.from_ai.at(i));
    }
    return r;
}

/// μ is indexed 01, 02, 12.
struct XiMu {
    FiniteAlgebra u;
    std::array<std::array<Congruence, 2>, 3> xi;
    std::array<Congruence, 3> mu;
};

inline constexpr std::array<std::pair<std::size_t, std::size_t>, 3> mu_pairs{{{0, 1}, {0, 2}, {1, 2}}};

/// From a ξ table: checks ξ_{i,0} ∨ ξ_{i,1} = 1 for each row, then
/// μ01 = ξ00 ∨ ξ10, μ02 = ξ01 ∨ ξ20, μ12 = ξ11 ∨ ξ21.
inline XiMu mu_from_xi(const FiniteAlgebra& u, const std::array<std::array<Congruence, 2>, 3>& xi) {
    for (std::size_t i = 0; i < 3; ++i) {
        for (const auto& x : xi[i]) {
            detail::require_size(u, x);
        }
        if (!join(u, xi[i][0], xi[i][1]).is_total()) {
            throw PipelineRefutation("xi-join-not-one", "row " + std::to_string(i) + ": " +
                                                            detail::render(xi[i][0]) + " v " +
                                                            detail::render(xi[i][1]) + " is not 1");
        }
    }
    return {u, xi, {join(u, xi[0][0], xi[1][0]), join(u, xi[0][1], xi[2][0]), join(u, xi[1][1], xi[2][1])}};
}

/// ξ_{i,j} is Con of the inclusion A_i -> U applied to eps_{A_i}({j}).
inline XiMu compute_xi_mu(const UExtraction& e, const std::array<std::vector<Congruence>, 3>& eps_ai) {
    std::array<std::array<Congruence, 2>, 3> xi;
    for (std::size_t i = 0; i < 3; ++i) {
        if (eps_ai[i].size() != 4) {
            throw ValidationError("eps_A" + std::to_string(i) + " must be indexed by the subsets of {0,1}");
        }
        for (std::size_t j = 0; j < 2; ++j) {
            xi[i][j] = image_congruence(e.from_ai.at(i), eps_ai[i][Subset{1} << j]);
        }
    }
    return mu_from_xi(e.u, xi);
}

/// Three congruences of U that generate a 0,1-sublattice isomorphic to M3.
/// Only make_m3_witness creates one, after checking all six equations.
class CongruenceM3Witness {
public:
    const FiniteAlgebra& algebra() const noexcept { return u_; }
    const std::array<Congruence, 3>& atoms() const noexcept { return atoms_; }

private:
    CongruenceM3Witness(FiniteAlgebra u, std::array<Congruence, 3> atoms) : u_(std::move(u)), atoms_(std::move(atoms)) {}
    friend CongruenceM3Witness make_m3_witness(const FiniteAlgebra&, const std::array<Congruence, 3>&);

    FiniteAlgebra u_;
    std::array<Congruence, 3> atoms_;
};

/// Pairwise meets 0 and pairwise joins 1, checked from the partitions.
inline CongruenceM3Witness make_m3_witness(const FiniteAlgebra& u, const std::array<Congruence, 3>& mu) {
    static const std::array<std::string, 3> names{"01", "02", "12"};
    for (std::size_t p = 0; p < 3; ++p) {
        detail::require_size(u, mu[p]);
        if (!is_congruence(u, mu[p])) {
            throw PipelineRefutation("not-a-congruence", "mu" + names[p]);
        }
    }
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t q = p + 1; q < 3; ++q) {
            if (!meet(mu[p], mu[q]).is_identity()) {
                throw PipelineRefutation("m3-meet-not-zero", "mu" + names[p] + " ^ mu" + names[q]);
            }
        }
    }
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t q = p + 1; q < 3; ++q) {
            if (!join(u, mu[p], mu[q]).is_total()) {
                throw PipelineRefutation("m3-join-not-one", "mu" + names[p] + " v mu" + names[q]);
            }
        }
    }
    return CongruenceM3Witness(u, mu);
}

struct M3Extraction {
    bool lifting_validated = false;
    std::optional<XiMu> xi_mu;
    std::optional<CongruenceM3Witness> witness;
    std::optional<std::string> refutation_code;
    std::string refutation;
};

/// The whole pipeline on a bow-tie shaped candidate: check_lifting,
/// normalization, U, one-preservation, ξ and μ, the identities
/// Con(U -> B_k)(μ_ij) = eps_{B_k}({i,j}), and the six M3 equations.
/// A refutation of a validated lifting is a bug and throws logic_error.
inline M3Extraction verify_m3_extraction(const PosetDiagram& d, const LiftingCandidate& c,
                                         ConLatticeOptions opts = {}) {
    M3Extraction out;
    auto report = check_lifting(d, c, opts);
    if (!report.accepted()) {
        out.refutation_code = "not-a-lifting";
        out.refutation = report.issues.front().message;
        return out;
    }
    out.lifting_validated = true;
    try {
        auto roles = bowtie_roles(d);
        auto n = normalize_to_inclusions(d, c);
        auto e = extract_u(d, n);
        auto one = check_one_preservation(e);
        if (!one.all()) {
            throw PipelineRefutation("one-not-preserved", "Con of an inclusion into U does not preserve 1");
        }
        std::array<std::vector<Congruence>, 3> eps_ai;
        for (std::size_t i = 0; i < 3; ++i) {
            eps_ai[i] = n.epsilon[roles.ai[i]];
        }
        auto xm = compute_xi_mu(e, eps_ai);
        out.xi_mu = xm;
        for (std::size_t p = 0; p < 3; ++p) {
            const Subset ij = (Subset{1} << mu_pairs[p].first) | (Subset{1} << mu_pairs[p].second);
            for (std::size_t k = 0; k < 3; ++k) {
                auto lhs = image_congruence(e.to_bj.at(k), xm.mu[p]);
                if (lhs != n.epsilon[roles.bj[k]][ij]) {
                    throw PipelineRefutation("mu-image-mismatch", "Con(U->B" + std::to_string(k) + ")(mu" +
                                                                      std::to_string(mu_pairs[p].first) +
                                                                      std::to_string(mu_pairs[p].second) + ")");
                }
            }
        }
        out.witness = make_m3_witness(xm.u, xm.mu);
    } catch (const PipelineRefutation& r) {
        throw std::logic_error(std::string("validated lifting refuted: ") + r.what());
    }
    return out;
}

/// Limits for lift_search. Zero means unlimited for the counts.
struct SearchBounds {
    std::size_t per_vertex_cap = 0;
    std::size_t hom_budget = 0;
    std::chrono::milliseconds time_budget{0};
    std::size_t max_results = 0;
    std::size_t jobs = 1;
    ConLatticeOptions con{};
};

struct VertexStats {
    std::size_t algebras = 0;   // catalog entries with Con ≅ P(ground)
    std::size_t candidates = 0; // (algebra, eps) pairs
};

struct SearchReport {
    std::vector<VertexStats> vertices;
    std::size_t catalog_size = 0;
    std::size_t con_cap_skipped = 0;
    std::size_t homomorphisms_examined = 0;
    std::size_t naturality_pruned = 0;
    std::size_t commutativity_pruned = 0;
    std::size_t nodes = 0;
    bool truncated = false;
    std::string truncation_reason;
    bool exhaustive() const noexcept { return !truncated; }
};

struct SearchResult {
    std::vector<LiftingCandidate> liftings;
    /// For each lifting, the catalog index of each vertex algebra.
    std::vector<std::vector<std::size_t>> catalog_indices;
    SearchReport report;
};

namespace detail {

/// All isomorphisms P(k) -> Con A when Con A is Boolean of rank k, one per
/// bijection between the atoms of P(k) and those of Con A.
inline std::vector<std::vector<Congruence>> boolean_isomorphisms(const ConLattice& con, std::size_t k) {
    if (con.size() != (std::size_t{1} << k)) {
        return {};
    }
    std::vector<std::size_t> atoms;
    for (auto [lo, hi] : con.covers()) {
        if (lo == con.bottom()) {
            atoms.push_back(hi);
        }
    }
    std::sort(atoms.begin(), atoms.end());
    if (atoms.size() != k) {
        return {};
    }
    std::vector<std::vector<Congruence>> out;
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<std::size_t> idx(std::size_t{1} << k, con.bottom());
        for (Subset s = 1; s < idx.size(); ++s) {
            const auto low = static_cast<std::size_t>(std::countr_zero(s));
            idx[s] = con.join(idx[s & (s - 1)], atoms[perm[low]]);
        }
        bool iso = true;
        for (Subset s = 0; s < idx.size() && iso; ++s) {
            for (Subset t = 0; t < idx.size() && iso; ++t) {
                iso = ((s & ~t) == 0) == con.leq(idx[s], idx[t]);
            }
        }
        if (!iso) {
            return {};
        }
        std::vector<Congruence> eps;
        for (auto i : idx) {
            eps.push_back(con[i]);
        }
        out.push_back(std::move(eps));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

struct VertexChoice {
    std::size_t algebra;
    std::size_t eps;
};

class LiftSearch {
public:
    LiftSearch(const PosetDiagram& d, std::span<const FiniteAlgebra> catalog, const SearchBounds& bounds)
        : d_(d), catalog_(catalog.begin(), catalog.end()), bounds_(bounds) {
        start_ = std::chrono::steady_clock::now();
        report_.catalog_size = catalog_.size();
        for (std::size_t i = 1; i < catalog_.size(); ++i) {
            require_same_signature(catalog_[0], catalog_[i]);
        }
        const std::size_t v = d.vertex_count();
        report_.vertices.resize(v);
        // Boolean congruence lattices by rank.
        std::map<std::size_t, std::vector<std::size_t>> by_rank;
        eps_.resize(catalog_.size());
        std::vector<std::size_t> ranks;
        for (std::size_t g : d.grounds()) {
            ranks.push_back(g);
        }
        std::sort(ranks.begin(), ranks.end());
        ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
        for (std::size_t a = 0; a < catalog_.size(); ++a) {
            std::optional<ConLattice> con;
            try {
                con.emplace(con_lattice(catalog_[a], bounds.con));
            } catch (const CapExceeded&) {
                ++report_.con_cap_skipped;
                truncate("congruence lattice cap exceeded");
                continue;
            }
            for (auto k : ranks) {
                auto isos = boolean_isomorphisms(*con, k);
                if (!isos.empty()) {
                    eps_[a] = std::move(isos);
                    by_rank[k].push_back(a);
                    break;
                }
            }
        }
        choices_.resize(v);
        for (std::size_t x = 0; x < v; ++x) {
            for (auto a : by_rank[d.ground(x)]) {
                ++report_.vertices[x].algebras;
                for (std::size_t e = 0; e < eps_[a].size(); ++e) {
                    if (bounds.per_vertex_cap && choices_[x].size() >= bounds.per_vertex_cap) {
                        truncate("per-vertex candidate cap reached at " + d.name(x));
                        break;
                    }
                    choices_[x].push_back({a, e});
                }
            }
            report_.vertices[x].candidates = choices_[x].size();
        }
        // Homomorphisms for every pair of algebras that can sit on an arrow.
        for (std::size_t k = 0; k < d.arrow_count(); ++k) {
            const auto& arrow = d.arrow(k);
            for (const auto& cs : choices_[arrow.source]) {
                for (const auto& ct : choices_[arrow.target]) {
                    auto key = std::make_pair(cs.algebra, ct.algebra);
                    if (homs_.contains(key)) {
                        continue;
                    }
                    const std::size_t budget = bounds.hom_budget ? bounds.hom_budget : SIZE_MAX;
                    auto en = enumerate_homomorphisms(catalog_[cs.algebra], catalog_[ct.algebra], budget);
                    report_.homomorphisms_examined += en.homomorphisms.size();
                    if (en.truncated) {
                        truncate("homomorphism budget exhausted");
                    }
                    homs_.emplace(key, std::move(en.homomorphisms));
                }
            }
        }
        incoming_.resize(v);
        for (std::size_t x = 0; x < v; ++x) {
            incoming_[x] = d.incoming(x);
        }
    }

    SearchResult run() {
        const std::size_t v = d_.vertex_count();
        SearchResult out;
        if (v == 0) {
            out.report = report_;
            return out;
        }
        const auto& roots = choices_[0];
        const std::size_t jobs = std::max<std::size_t>(1, std::min(bounds_.jobs, roots.size()));
        std::vector<Branch> branches(roots.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < roots.size(); i = next++) {
                branches[i].state.assign(v);
                explore_root(branches[i], i);
            }
        };
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t j = 0; j < jobs; ++j) {
                pool.emplace_back(worker);
            }
        }
        out.report = report_;
        for (auto& b : branches) {
            out.report.nodes += b.nodes;
            out.report.naturality_pruned += b.naturality_pruned;
            out.report.commutativity_pruned += b.commutativity_pruned;
            if (b.truncated && !out.report.truncated) {
                out.report.truncated = true;
                out.report.truncation_reason = b.reason;
            }
            for (std::size_t i = 0; i < b.found.size(); ++i) {
                if (bounds_.max_results && out.liftings.size() >= bounds_.max_results) {
                    break;
                }
                out.liftings.push_back(std::move(b.found[i]));
                out.catalog_indices.push_back(std::move(b.found_indices[i]));
            }
        }
        // Reaching the limit means the rest of the space was not searched.
        if (bounds_.max_results && out.liftings.size() >= bounds_.max_results && !out.report.truncated) {
            out.report.truncated = true;
            out.report.truncation_reason = "result limit reached";
        }
        return out;
    }

private:
    struct State {
        std::vector<VertexChoice> chosen;
        std::vector<const Homomorphism*> arrow_maps;
        /// composite[s][t]: the map from vertex s to vertex t, once fixed.
        std::vector<std::vector<std::optional<std::vector<Element>>>> composite;
        void assign(std::size_t v) {
            chosen.assign(v, {});
            composite.assign(v, std::vector<std::optional<std::vector<Element>>>(v));
        }
    };

    struct Branch {
        State state;
        std::vector<LiftingCandidate> found;
        std::vector<std::vector<std::size_t>> found_indices;
        std::size_t nodes = 0, naturality_pruned = 0, commutativity_pruned = 0;
        bool truncated = false;
        std::string reason;
    };

    void truncate(std::string why) {
        if (!report_.truncated) {
            report_.truncated = true;
            report_.truncation_reason = std::move(why);
        }
    }

    bool out_of_time(Branch& b) const {
        if (bounds_.time_budget.count() > 0 && std::chrono::steady_clock::now() - start_ > bounds_.time_budget) {
            if (!b.truncated) {
                b.truncated = true;
                b.reason = "time budget exhausted";
            }
            return true;
        }
        return b.truncated && b.reason == "time budget exhausted";
    }

    bool enough(const Branch& b) const { return bounds_.max_results && b.found.size() >= bounds_.max_results; }

    void explore_root(Branch& b, std::size_t root_choice) {
        b.state.arrow_maps.assign(d_.arrow_count(), nullptr);
        place(b, 0, root_choice);
    }

    void place(Branch& b, std::size_t x, std::size_t choice) {
        ++b.nodes;
        b.state.chosen[x] = choices_[x][choice];
        b.state.composite[x][x] = catalog_[b.state.chosen[x].algebra].universe();
        fill_arrow(b, x, 0);
        for (std::size_t s = 0; s < d_.vertex_count(); ++s) {
            b.state.composite[s][x].reset();
        }
    }

    void next_vertex(Branch& b, std::size_t x) {
        if (x + 1 == d_.vertex_count()) {
            record(b);
            return;
        }
        for (std::size_t c = 0; c < choices_[x + 1].size(); ++c) {
            if (out_of_time(b) || enough(b)) {
                return;
            }
            place(b, x + 1, c);
        }
    }

    /// Chooses a map for the i-th incoming arrow of x.
    void fill_arrow(Branch& b, std::size_t x, std::size_t i) {
        if (i == incoming_[x].size()) {
            next_vertex(b, x);
            return;
        }
        const std::size_t k = incoming_[x][i];
        const auto& arrow = d_.arrow(k);
        const auto src = b.state.chosen[arrow.source];
        const auto tgt = b.state.chosen[x];
        const auto& eps_s = eps_[src.algebra][src.eps];
        const auto& eps_t = eps_[tgt.algebra][tgt.eps];
        for (const auto& h : homs_.at({src.algebra, tgt.algebra})) {
            if (out_of_time(b) || enough(b)) {
                return;
            }
            bool natural = true;
            for (std::size_t j = 0; j < arrow.map.source_ground() && natural; ++j) {
                natural = image_congruence(h, eps_s[Subset{1} << j]) == eps_t[arrow.map.atom_images()[j]];
            }
            if (!natural) {
                ++b.naturality_pruned;
                continue;
            }
            // Every vertex below the source now reaches x along this arrow.
            std::vector<std::size_t> set_here;
            bool commutes = true;
            for (std::size_t r = 0; r < d_.vertex_count() && commutes; ++r) {
                const auto& via = b.state.composite[r][arrow.source];
                if (!via) {
                    continue;
                }
                auto m = compose_maps(h.map(), *via);
                auto& slot = b.state.composite[r][x];
                if (slot) {
                    commutes = *slot == m;
                } else {
                    slot = std::move(m);
                    set_here.push_back(r);
                }
            }
            if (commutes) {
                b.state.arrow_maps[k] = &h;
                fill_arrow(b, x, i + 1);
                b.state.arrow_maps[k] = nullptr;
            } else {
                ++b.commutativity_pruned;
            }
            for (auto r : set_here) {
                b.state.composite[r][x].reset();
            }
        }
    }

    void record(Branch& b) {
        LiftingCandidate c;
        std::vector<std::size_t> idx;
        for (const auto& ch : b.state.chosen) {
            c.algebras.push_back(catalog_[ch.algebra]);
            c.epsilon.push_back(eps_[ch.algebra][ch.eps]);
            idx.push_back(ch.algebra);
        }
        for (const auto* h : b.state.arrow_maps) {
            c.maps.emplace_back(h->map().begin(), h->map().end());
        }
        if (!check_lifting(d_, c, bounds_.con).accepted()) {
            throw std::logic_error("lift_search produced a candidate that fails check_lifting");
        }
        b.found.push_back(std::move(c));
        b.found_indices.push_back(std::move(idx));
    }

    const PosetDiagram& d_;
    std::vector<FiniteAlgebra> catalog_;
    SearchBounds bounds_;
    std::chrono::steady_clock::time_point start_;
    SearchReport report_;
    std::vector<std::vector<std::vector<Congruence>>> eps_;
    std::vector<std::vector<VertexChoice>> choices_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Homomorphism>> homs_;
    std::vector<std::vector<std::size_t>> incoming_;
};

} // namespace detail

/// Backtracking over vertices in index order. Each vertex takes a catalog
/// algebra whose Con is Boolean of the right rank together with one of the
/// isomorphisms eps; each arrow takes a homomorphism that satisfies
/// naturality on atoms and keeps every square commuting. Complete
/// assignments are re-validated with check_lifting.
inline SearchResult lift_search(const PosetDiagram& d, std::span<const FiniteAlgebra> catalog,
                                const SearchBounds& bounds = {}) {
    return detail::LiftSearch(d, catalog, bounds).run();
}

/// Candidate file: {"vertices": [{"name", "algebra" | "ref", "epsilon"}],
/// "arrows": [{"source", "target", "map"}]}. "ref" names an algebra file
/// relative to a base directory; "epsilon" lists the blocks of eps(S) for
/// every subset S in bitmask order.
inline json to_json(const PosetDiagram& d, const LiftingCandidate& c,
                    const std::vector<std::optional<std::string>>& refs = {}) {
    detail::require_shape(d, c);
    json vertices = json::array();
    for (std::size_t x = 0; x < d.vertex_count(); ++x) {
        json v{{"name", d.name(x)}};
        if (x < refs.size() && refs[x]) {
            v["ref"] = *refs[x];
        } else {
            v["algebra"] = to_json(c.algebras[x]);
        }
        json eps = json::array();
        for (const auto& e : c.epsilon[x]) {
            eps.push_back(to_json(e));
        }
        v["epsilon"] = std::move(eps);
        vertices.push_back(std::move(v));
    }
    json arrows = json::array();
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        arrows.push_back({{"source", d.name(d.arrow(k).source)},
                          {"target", d.name(d.arrow(k).target)},
                          {"map", c.maps[k]}});
    }
    return {{"vertices", std::move(vertices)}, {"arrows", std::move(arrows)}};
}

inline LiftingCandidate candidate_from_json(const PosetDiagram& d, const json& j,
                                            const std::filesystem::path& base = {}) {
    try {
        LiftingCandidate c;
        const auto& vs = j.at("vertices");
        if (vs.size() != d.vertex_count()) {
            throw ValidationError("candidate has " + std::to_string(vs.size()) + " vertices, diagram has " +
                                  std::to_string(d.vertex_count()));
        }
        for (std::size_t x = 0; x < vs.size(); ++x) {
            if (vs[x].at("name").get<std::string>() != d.name(x)) {
                throw ValidationError("candidate vertex " + std::to_string(x) + " is not " + d.name(x));
            }
            c.algebras.push_back(vs[x].contains("ref") ? load_algebra(base / vs[x]["ref"].get<std::string>())
                                                       : algebra_from_json(vs[x].at("algebra")));
            std::vector<Congruence> eps;
            for (const auto& e : vs[x].at("epsilon")) {
                eps.push_back(congruence_from_json(c.algebras.back().size(), e));
            }
            c.epsilon.push_back(std::move(eps));
        }
        const auto& as = j.at("arrows");
        if (as.size() != d.arrow_count()) {
            throw ValidationError("candidate arrow count does not match the diagram");
        }
        for (std::size_t k = 0; k < as.size(); ++k) {
            if (as[k].at("source").get<std::string>() != d.name(d.arrow(k).source) ||
                as[k].at("target").get<std::string>() != d.name(d.arrow(k).target)) {
                throw ValidationError("candidate arrow " + std::to_string(k) + " does not match the diagram");
            }
            c.maps.push_back(as[k].at("map").get<std::vector<Element>>());
        }
        detail::require_shape(d, c);
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed candidate: ") + e.what());
    }
}

inline json to_json(const PosetDiagram& d, const SearchReport& r, std::size_t liftings) {
    json vertices = json::array();
    for (std::size_t x = 0; x < d.vertex_count(); ++x) {
        vertices.push_back({{"name", d.name(x)},
                            {"ground", d.ground(x)},
                            {"algebras", r.vertices[x].algebras},
                            {"candidates", r.vertices[x].candidates}});
    }
    json out{{"catalog_size", r.catalog_size},
             {"vertices", std::move(vertices)},
             {"stats",
              {{"nodes", r.nodes},
               {"homomorphisms", r.homomorphisms_examined},
               {"naturality_pruned", r.naturality_pruned},
               {"commutativity_pruned", r.commutativity_pruned},
               {"con_cap_skipped", r.con_cap_skipped}}},
             {"liftings", liftings},
             {"exhaustive", r.exhaustive()}};
    if (r.truncated) {
        out["truncation_reason"] = r.truncation_reason;
    }
    return out;
}

} // namespace ualg

#endif
