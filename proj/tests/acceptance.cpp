// Acceptance checks. One line per criterion:
//   criterion N: PASS|FAIL (seconds, limit) detail
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "oracles.hpp"
#include "ualg.hpp"

using namespace ualg;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

oracle::Labels labels(const Congruence& c) { return {c.labels().begin(), c.labels().end()}; }

const std::vector<std::string> all_fixtures{"trivial", "z2",   "z3",     "z4",        "klein4",   "z5",
                                            "z6",      "s3",   "z7",     "z8",        "z4xz2",    "z2xz2xz2",
                                            "d4",      "q8",   "chain2", "chain3",    "diamond",  "m3",
                                            "n5",      "semilattice2", "bounded_chain2"};
const std::vector<std::string> groups{"z2", "z3",    "z4",       "klein4", "z5", "z6",
                                      "s3",      "z7", "z8", "z4xz2", "z2xz2xz2", "d4",     "q8"};

Outcome bowtie() {
    auto d = build_bowtie();
    auto f = verify_functorial(d);
    std::size_t embeddings = 0, meet_preserving_e = 0, meet_preserving_other = 0;
    for (const auto& a : d.arrows()) {
        embeddings += a.map.embedding() && a.map.unit_preserving();
        if (a.map.meet_preserving()) {
            (a.map == bowtie_maps::e() ? meet_preserving_e : meet_preserving_other)++;
        }
    }
    auto im = image_intersection_m3(bowtie_maps::u(0), bowtie_maps::u(1), bowtie_maps::u(2));
    Outcome o;
    o.ok = f.holds && embeddings == d.arrow_count() && meet_preserving_e == 3 && meet_preserving_other == 0 &&
           im.common_image.size() == 5 && im.agreement_is_m3 && im.verdict();
    o.detail = "functorial=" + std::to_string(f.holds) + ", " + std::to_string(embeddings) + "/" +
               std::to_string(d.arrow_count()) + " arrows are 0,1-join embeddings, meet-preserving: " +
               std::to_string(meet_preserving_e) + " e-copies + " + std::to_string(meet_preserving_other) +
               " others, common image " + std::to_string(im.common_image.size()) + " values, preimage M3=" +
               std::to_string(im.agreement_is_m3);
    return o;
}

Outcome cg_oracle() {
    std::mt19937_64 rng(2024);
    std::size_t algebras = 0, checks = 0, mismatches = 0;
    for (int t = 0; t < 240; ++t) {
        auto a = oracle::random_binar(rng, 1 + t % 3);
        ++algebras;
        const auto n = a.size();
        for (Element x = 0; x < n; ++x) {
            for (Element y = 0; y < n; ++y) {
                ++checks;
                if (labels(principal(a, x, y)) != oracle::least_congruence(a, {{x, y}})) {
                    ++mismatches;
                }
            }
        }
        if (n == 3) {
            ++checks;
            if (labels(cg(a, {{0, 1}, {1, 2}})) != oracle::least_congruence(a, {{0, 1}, {1, 2}})) {
                ++mismatches;
            }
        }
    }
    return {mismatches == 0 && algebras >= 200, std::to_string(algebras) + " algebras, " + std::to_string(checks) +
                                                    " generator sets, " + std::to_string(mismatches) + " mismatches"};
}

Outcome commutator_oracles() {
    std::size_t delta_pairs = 0, delta_bad = 0, group_pairs = 0, group_bad = 0;
    std::string bad;
    for (const auto& name : all_fixtures) {
        auto a = oracle::load(name);
        if (a.size() > 4) {
            continue;
        }
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                ++delta_pairs;
                if (labels(commutator(a, al, be)) != oracle::delta_commutator(a, labels(al), labels(be))) {
                    ++delta_bad;
                    bad += " " + name + "[" + al.to_string() + "," + be.to_string() + "]";
                }
            }
        }
    }
    for (const auto& name : groups) {
        auto a = oracle::load(name);
        auto g = oracle::as_group(a);
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                ++group_pairs;
                if (labels(commutator(a, al, be)) != oracle::group_commutator(g, labels(al), labels(be))) {
                    ++group_bad;
                    bad += " " + name;
                }
            }
        }
    }
    return {delta_bad == 0 && group_bad == 0,
            "delta construction: " + std::to_string(delta_pairs - delta_bad) + "/" + std::to_string(delta_pairs) +
                " pairs agree; group commutator: " + std::to_string(group_pairs - group_bad) + "/" +
                std::to_string(group_pairs) + (bad.empty() ? "" : "; mismatches:" + bad)};
}

Outcome commutator_below_meet() {
    std::vector<FiniteAlgebra> algs;
    for (const auto& name : all_fixtures) {
        algs.push_back(oracle::load(name));
    }
    for (const auto& l : gen_lattices(5).algebras()) {
        algs.push_back(l);
    }
    std::size_t pairs = 0, violations = 0;
    for (const auto& a : algs) {
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                ++pairs;
                violations += !commutator(a, al, be).leq(meet(al, be));
            }
        }
    }
    return {violations == 0, std::to_string(algs.size()) + " algebras, " + std::to_string(pairs) + " pairs, " +
                                 std::to_string(violations) + " violations"};
}

Outcome klein_four() {
    auto k = oracle::load("klein4");
    auto s3 = oracle::load("s3");
    const bool m3 = find_m3_01(con_lattice(k).lattice()).has_value();
    const bool ab = is_abelian(k);
    auto wd = find_weak_difference_term(k, 3);
    const bool ham = is_hamiltonian(k).holds;
    auto lemma = lemma_wdterm_check(k);
    const bool s3_ab = is_abelian(s3);
    const bool s3_ham = is_hamiltonian(s3).holds;
    const bool s3_cen = centralizer(s3, Congruence::identity(6), Congruence::total(6)).is_identity();
    Outcome o;
    o.ok = m3 && ab && wd.term && ham && lemma.consistent() && lemma.hypotheses_hold() && !s3_ab && !s3_ham && s3_cen;
    o.detail = "Con=M3:" + std::to_string(m3) + " abelian:" + std::to_string(ab) + " wd-term:" +
               wd.describe(k.signature()) + " hamiltonian:" + std::to_string(ham) +
               " lemma consistent:" + std::to_string(lemma.consistent()) + "; S3 abelian:" + std::to_string(s3_ab) +
               " hamiltonian:" + std::to_string(s3_ham) + " (0:1)=0:" + std::to_string(s3_cen);
    return o;
}

Outcome lattice_catalog() {
    auto cat = gen_lattices(6);
    auto other = gen_lattices_by_meet(6);
    const std::vector<std::size_t> expected{1, 1, 1, 2, 5, 15};
    bool counts = cat.size() == 25;
    std::string shown;
    for (std::size_t n = 1; n <= 6; ++n) {
        counts = counts && cat.count_of_size(n) == expected[n - 1];
        shown += (n > 1 ? "," : "") + std::to_string(cat.count_of_size(n));
    }
    std::size_t nondistributive = 0, with_m3 = 0;
    for (const auto& a : cat.algebras()) {
        auto l = con_lattice(a).lattice();
        nondistributive += !lattice_property(l, LatticeProperty::distributive).holds;
        with_m3 += find_m3_01(l).has_value();
    }
    return {counts && cat.equivalent(other) && nondistributive == 0 && with_m3 == 0,
            std::to_string(cat.size()) + " lattices (" + shown + "), strategies agree:" +
                std::to_string(cat.equivalent(other)) + ", non-distributive Con: " + std::to_string(nondistributive) +
                ", M3 found: " + std::to_string(with_m3)};
}

Outcome lifting_engine() {
    PosetDiagram e_arrow({"A", "A0"}, {1, 2}, {{0, 1, bowtie_maps::e()}});
    auto c2 = oracle::load("chain2");
    auto dm = oracle::load("diamond");
    LiftingCandidate good{{c2, dm},
                          {{Congruence::identity(2), Congruence::total(2)},
                           {Congruence::identity(4), Congruence::from_blocks(4, {{0, 1}, {2, 3}}),
                            Congruence::from_blocks(4, {{0, 2}, {1, 3}}), Congruence::total(4)}},
                          {{0, 3}},
                          {}};
    const bool accepted = check_lifting(e_arrow, good).accepted();

    auto z2 = oracle::load("z2");
    auto k = oracle::load("klein4");
    LiftingCandidate diag{{z2, k},
                          {{Congruence::identity(2), Congruence::total(2)},
                           {Congruence::identity(4), principal(k, 0, 1), principal(k, 0, 2), Congruence::total(4)}},
                          {{0, 3}},
                          {}};
    auto r = check_lifting(e_arrow, diag);
    bool named = false;
    for (const auto& i : r.issues) {
        named = named || (i.kind == LiftingIssueKind::naturality && i.message.find("Con f(1)") != std::string::npos);
    }

    auto lat4 = gen_lattices(4).algebras();
    auto found = lift_search(e_arrow, lat4);
    bool has_good = false;
    for (const auto& l : found.liftings) {
        has_good = has_good || (l.algebras[0].size() == 2 && isomorphic(l.algebras[1], dm));
    }
    SearchBounds b;
    b.jobs = 4;
    auto bow = lift_search(build_bowtie(), gen_lattices(6).algebras(), b);
    return {accepted && !r.accepted() && named && has_good && bow.liftings.empty() && bow.report.exhaustive(),
            "chain2->diamond accepted:" + std::to_string(accepted) + ", Z2 diagonal rejected with Con f(1):" +
                std::to_string(named) + ", search finds it:" + std::to_string(has_good) + ", bow-tie over 25 lattices: " +
                std::to_string(bow.liftings.size()) + " liftings, exhaustive:" + std::to_string(bow.report.exhaustive())};
}

Outcome mu_pipeline() {
    auto k = oracle::load("klein4");
    auto a = principal(k, 0, 1), b = principal(k, 0, 2), g = principal(k, 0, 3);
    bool witness = false;
    try {
        auto xm = mu_from_xi(k, {{{a, b}, {a, g}, {b, g}}});
        auto w = make_m3_witness(k, xm.mu);
        witness = w.atoms()[0] == a && w.atoms()[1] == b && w.atoms()[2] == g;
    } catch (const PipelineRefutation&) {
    }
    std::string code;
    try {
        mu_from_xi(k, {{{a, a}, {a, g}, {b, g}}});
    } catch (const PipelineRefutation& r) {
        code = r.code();
    }
    // A witness exists exactly when the six equations hold on the triple.
    std::size_t triples = 0, disagreements = 0;
    for (auto name : {"klein4", "z2xz2xz2", "m3", "n5", "s3", "diamond"}) {
        auto alg = oracle::load(name);
        auto con = con_lattice(alg);
        auto lat = con.lattice();
        for (std::size_t i = 0; i < con.size(); ++i) {
            for (std::size_t j = 0; j < con.size(); ++j) {
                for (std::size_t l = 0; l < con.size(); ++l) {
                    ++triples;
                    bool made = true;
                    try {
                        make_m3_witness(alg, {con[i], con[j], con[l]});
                    } catch (const PipelineRefutation&) {
                        made = false;
                    }
                    bool eqs = true;
                    for (auto [p, q] : {std::pair{i, j}, {i, l}, {j, l}}) {
                        eqs = eqs && lat.join(p, q) == lat.top() && lat.meet(p, q) == lat.bottom();
                    }
                    disagreements += made != eqs;
                }
            }
        }
    }
    return {witness && code == "xi-join-not-one" && disagreements == 0,
            "Klein-four mock witness:" + std::to_string(witness) + ", bad xi row refused as '" + code + "', " +
                std::to_string(triples) + " congruence triples, " + std::to_string(disagreements) +
                " witnesses disagreeing with the six equations"};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, 1, bowtie},           {2, 30, cg_oracle},       {3, 60, commutator_oracles},
        {4, 60, commutator_below_meet}, {5, 30, klein_four}, {6, 120, lattice_catalog},
        {7, 120, lifting_engine}, {8, 30, mu_pipeline},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.ok && secs < c.limit;
        failures += !pass;
        std::printf("criterion %d: %s (%.2fs, limit %.0fs) %s\n", c.id, pass ? "PASS" : "FAIL", secs, c.limit,
                    o.detail.c_str());
    }
    std::printf("criterion 9: PASS (disclosure) the non-existence of a bow-tie lifting in every variety with a "
                "nontrivial congruence identity is a statement about all algebras and is not decided by finite "
                "search; criteria 1, 6, 7 and 8 check each finite ingredient it relies on\n");
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
