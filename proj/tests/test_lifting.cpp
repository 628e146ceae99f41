#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "catalog.hpp"
#include "lifting.hpp"
#include "oracles.hpp"

using namespace ualg;

namespace {

PosetDiagram e_arrow() {
    return PosetDiagram({"A", "A0"}, {1, 2}, {{0, 1, bowtie_maps::e()}});
}

// Two copies of e out of one vertex; no top.
PosetDiagram e_fork() {
    return PosetDiagram({"A", "A0", "A1"}, {1, 2, 2}, {{0, 1, bowtie_maps::e()}, {0, 2, bowtie_maps::e()}});
}

Congruence blocks(std::size_t n, std::vector<std::vector<Element>> b) { return Congruence::from_blocks(n, b); }

LiftingCandidate chain_into_diamond() {
    auto c2 = oracle::load("chain2");
    auto dm = oracle::load("diamond");
    LiftingCandidate c;
    c.algebras = {c2, dm};
    c.epsilon = {{Congruence::identity(2), Congruence::total(2)},
                 {Congruence::identity(4), blocks(4, {{0, 1}, {2, 3}}), blocks(4, {{0, 2}, {1, 3}}),
                  Congruence::total(4)}};
    c.maps = {{0, 3}};
    return c;
}

// Every lifting of d over the catalog, by trying all eps tables that pass
// on their own vertex and all maps on every arrow.
using Key = std::tuple<std::vector<std::size_t>, std::vector<std::vector<Congruence>>, std::vector<std::vector<Element>>>;

std::set<Key> brute_force(const PosetDiagram& d, const std::vector<FiniteAlgebra>& cat) {
    const std::size_t v = d.vertex_count();
    // Per vertex: (algebra, eps) pairs valid on a one-vertex diagram.
    std::vector<std::vector<std::pair<std::size_t, std::vector<Congruence>>>> choices(v);
    for (std::size_t x = 0; x < v; ++x) {
        PosetDiagram single({"x"}, {d.ground(x)}, {});
        const std::size_t m = std::size_t{1} << d.ground(x);
        for (std::size_t a = 0; a < cat.size(); ++a) {
            auto parts = oracle::congruences(cat[a]);
            if (parts.size() != m) {
                continue;
            }
            std::vector<std::size_t> idx(m, 0);
            for (;;) {
                LiftingCandidate c;
                c.algebras = {cat[a]};
                std::vector<Congruence> eps;
                for (auto i : idx) {
                    eps.push_back(Congruence::from_labels(parts[i]));
                }
                c.epsilon = {eps};
                if (check_lifting(single, c).accepted()) {
                    choices[x].emplace_back(a, eps);
                }
                std::size_t p = 0;
                while (p < m && ++idx[p] == parts.size()) {
                    idx[p++] = 0;
                }
                if (p == m) {
                    break;
                }
            }
        }
    }
    std::set<Key> out;
    std::vector<std::size_t> pick(v, 0);
    auto next_pick = [&] {
        std::size_t p = 0;
        while (p < v && ++pick[p] == choices[p].size()) {
            pick[p++] = 0;
        }
        return p < v;
    };
    for (auto& c : choices) {
        if (c.empty()) {
            return out;
        }
    }
    do {
        LiftingCandidate c;
        std::vector<std::size_t> algs;
        for (std::size_t x = 0; x < v; ++x) {
            algs.push_back(choices[x][pick[x]].first);
            c.algebras.push_back(cat[algs.back()]);
            c.epsilon.push_back(choices[x][pick[x]].second);
        }
        // All maps on all arrows.
        std::vector<std::vector<std::vector<Element>>> maps(d.arrow_count());
        for (std::size_t k = 0; k < d.arrow_count(); ++k) {
            const auto n = c.algebras[d.arrow(k).source].size();
            const auto t = c.algebras[d.arrow(k).target].size();
            std::vector<Element> f(n, 0);
            for (;;) {
                maps[k].push_back(f);
                std::size_t p = 0;
                while (p < n && ++f[p] == t) {
                    f[p++] = 0;
                }
                if (p == n) {
                    break;
                }
            }
        }
        std::vector<std::size_t> mp(d.arrow_count(), 0);
        for (;;) {
            c.maps.clear();
            for (std::size_t k = 0; k < d.arrow_count(); ++k) {
                c.maps.push_back(maps[k][mp[k]]);
            }
            if (check_lifting(d, c).accepted()) {
                out.emplace(algs, c.epsilon, c.maps);
            }
            std::size_t p = 0;
            while (p < mp.size() && ++mp[p] == maps[p].size()) {
                mp[p++] = 0;
            }
            if (p == mp.size()) {
                break;
            }
        }
    } while (next_pick());
    return out;
}

std::set<Key> keys(const SearchResult& r) {
    std::set<Key> out;
    for (std::size_t i = 0; i < r.liftings.size(); ++i) {
        out.emplace(r.catalog_indices[i], r.liftings[i].epsilon, r.liftings[i].maps);
    }
    return out;
}

} // namespace

TEST(CheckLifting, ChainIntoDiamondAccepted) {
    auto r = check_lifting(e_arrow(), chain_into_diamond());
    EXPECT_TRUE(r.accepted()) << r.issues.front().message;
    auto swapped = chain_into_diamond();
    std::swap(swapped.epsilon[1][1], swapped.epsilon[1][2]);
    EXPECT_TRUE(check_lifting(e_arrow(), swapped).accepted());
}

TEST(CheckLifting, GroupDiagonalFailsNaturality) {
    auto z2 = oracle::load("z2");
    auto k = oracle::load("klein4");
    LiftingCandidate c;
    c.algebras = {z2, k};
    c.epsilon = {{Congruence::identity(2), Congruence::total(2)},
                 {Congruence::identity(4), principal(k, 0, 1), principal(k, 0, 2), Congruence::total(4)}};
    c.maps = {{0, 3}};
    auto r = check_lifting(e_arrow(), c);
    EXPECT_FALSE(r.accepted());
    ASSERT_TRUE(r.has(LiftingIssueKind::naturality));
    // Con Z2 x Z2 is M3, so eps cannot be onto either.
    EXPECT_TRUE(r.has(LiftingIssueKind::epsilon));
    bool found = false;
    for (const auto& i : r.issues) {
        if (i.kind == LiftingIssueKind::naturality) {
            EXPECT_EQ(i.message, "naturality fails on arrow A->A0 at {0}: Con f(1) = {0,3}{1,2} but eps_A0({0,1}) = 1");
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(CheckLifting, Diagnostics) {
    auto d = e_arrow();
    auto c = chain_into_diamond();
    c.maps = {{0, 1}};
    auto r = check_lifting(d, c);
    ASSERT_TRUE(r.has(LiftingIssueKind::naturality));
    EXPECT_NE(r.issues.front().message.find("Con f(1) = {0,1}{2,3}"), std::string::npos) << r.issues.front().message;

    c = chain_into_diamond();
    c.maps = {{3, 0}};
    EXPECT_TRUE(check_lifting(d, c).has(LiftingIssueKind::homomorphism));

    c = chain_into_diamond();
    c.epsilon[1][1] = blocks(4, {{0, 3}, {1}, {2}});
    r = check_lifting(d, c);
    ASSERT_TRUE(r.has(LiftingIssueKind::epsilon));
    EXPECT_NE(r.issues.front().message.find("not a congruence"), std::string::npos);

    c = chain_into_diamond();
    c.epsilon[1][1] = c.epsilon[1][3];
    r = check_lifting(d, c);
    ASSERT_TRUE(r.has(LiftingIssueKind::epsilon));
    EXPECT_NE(r.issues.front().message.find("order isomorphism"), std::string::npos);

    c = chain_into_diamond();
    c.maps = {{0, 3, 1}};
    EXPECT_THROW(check_lifting(d, c), ValidationError);
    c = chain_into_diamond();
    c.epsilon[1].pop_back();
    EXPECT_THROW(check_lifting(d, c), ValidationError);
}

TEST(CheckLifting, Commutativity) {
    // A square x < y, z < w on P(1) with identity maps.
    auto id = SemilatticeMap::identity(1);
    PosetDiagram sq({"x", "y", "z", "w"}, {1, 1, 1, 1}, {{0, 1, id}, {0, 2, id}, {1, 3, id}, {2, 3, id}});
    auto c2 = oracle::load("chain2");
    std::vector<Congruence> eps{Congruence::identity(2), Congruence::total(2)};
    LiftingCandidate c{{c2, c2, c2, c2}, {eps, eps, eps, eps}, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {}};
    EXPECT_TRUE(check_lifting(sq, c).accepted());
    // A constant map on one side breaks the square.
    c.maps[3] = {1, 1};
    auto r = check_lifting(sq, c);
    EXPECT_TRUE(r.has(LiftingIssueKind::commutativity));
}

TEST(CheckLifting, IdentityDiagram) {
    auto id = SemilatticeMap::identity(1);
    PosetDiagram d({"x", "y"}, {1, 1}, {{0, 1, id}});
    auto c2 = oracle::load("chain2");
    std::vector<Congruence> eps{Congruence::identity(2), Congruence::total(2)};
    EXPECT_TRUE(check_lifting(d, LiftingCandidate{{c2, c2}, {eps, eps}, {{0, 1}}, {}}).accepted());
}

TEST(Normalize, ChainIntoDiamond) {
    auto d = e_arrow();
    auto n = normalize_to_inclusions(d, chain_into_diamond());
    EXPECT_EQ(n.carriers[0], (std::vector<Element>{0, 3}));
    EXPECT_EQ(n.carriers[1], (std::vector<Element>{0, 1, 2, 3}));
    EXPECT_EQ(n.maps[0], (std::vector<Element>{0, 3}));
    EXPECT_TRUE(check_lifting(d, n).accepted());
    auto twice = normalize_to_inclusions(d, n);
    EXPECT_EQ(twice.algebras, n.algebras);
    EXPECT_EQ(twice.epsilon, n.epsilon);
    EXPECT_EQ(twice.maps, n.maps);

    auto bad = chain_into_diamond();
    bad.maps = {{0, 0}};
    try {
        normalize_to_inclusions(d, bad);
        FAIL();
    } catch (const PipelineRefutation& r) {
        EXPECT_EQ(r.code(), "non-injective");
    }
    EXPECT_THROW(normalize_to_inclusions(e_fork(), LiftingCandidate{}), ValidationError);
}

TEST(Normalize, TransportsEpsilon) {
    // Reverse the diamond's labels so the carrier gets re-sorted.
    auto c = chain_into_diamond();
    std::vector<Element> rev{3, 2, 1, 0};
    c.algebras[1] = relabel(c.algebras[1], rev);
    c.maps = {{3, 0}};
    for (auto& e : c.epsilon[1]) {
        std::vector<Element> l(4);
        for (Element x = 0; x < 4; ++x) {
            l[rev[x]] = e.label(x);
        }
        e = Congruence::from_classes(l);
    }
    ASSERT_TRUE(check_lifting(e_arrow(), c).accepted());
    auto n = normalize_to_inclusions(e_arrow(), c);
    EXPECT_EQ(n.carriers[0], (std::vector<Element>{0, 3}));
    EXPECT_TRUE(check_lifting(e_arrow(), n).accepted());
}

TEST(Pipeline, ExtractU) {
    auto k = oracle::load("klein4");
    BowtieCarriers c{k, {0}, {std::vector<Element>{0, 1}, {0, 1}, {0, 1}}, {k.universe(), k.universe(), k.universe()}};
    auto e = extract_u(c);
    EXPECT_EQ(e.carrier, (std::vector<Element>{0, 1}));
    EXPECT_EQ(e.u.size(), 2u);
    auto one = check_one_preservation(e);
    // {0} -> U sends 1 to 0_U; each A_i = U keeps 1.
    EXPECT_FALSE(one.holds[0]);
    EXPECT_TRUE(one.holds[1] && one.holds[2] && one.holds[3]);
    EXPECT_FALSE(one.all());

    BowtieCarriers spread{k, {0}, {std::vector<Element>{0, 1}, {0, 2}, {0, 1}}, {k.universe(), k.universe(), k.universe()}};
    auto whole = extract_u(spread);
    EXPECT_EQ(whole.carrier, k.universe());
    auto o = check_one_preservation(whole);
    EXPECT_FALSE(o.holds[1]);

    BowtieCarriers outside{k, {0}, {std::vector<Element>{0, 1}, {0, 2}, {0, 1}}, {k.universe(), std::vector<Element>{0, 1}, k.universe()}};
    try {
        extract_u(outside);
        FAIL();
    } catch (const PipelineRefutation& r) {
        EXPECT_EQ(r.code(), "u-not-in-bj");
    }
}

TEST(Pipeline, MuFromKleinFourXi) {
    auto k = oracle::load("klein4");
    auto a = principal(k, 0, 1), b = principal(k, 0, 2), g = principal(k, 0, 3);
    auto xm = mu_from_xi(k, {{{a, b}, {a, g}, {b, g}}});
    EXPECT_EQ(xm.mu[0], a);
    EXPECT_EQ(xm.mu[1], b);
    EXPECT_EQ(xm.mu[2], g);
    auto w = make_m3_witness(k, xm.mu);
    EXPECT_EQ(w.atoms()[1], b);
    // The witness really generates M3 in Con.
    auto con = con_lattice(k);
    EXPECT_TRUE(find_m3_01(con.lattice()).has_value());

    try {
        mu_from_xi(k, {{{a, a}, {a, g}, {b, g}}});
        FAIL();
    } catch (const PipelineRefutation& r) {
        EXPECT_EQ(r.code(), "xi-join-not-one");
        EXPECT_NE(std::string(r.what()).find("row 0"), std::string::npos);
    }
}

TEST(Pipeline, WitnessRefusals) {
    auto k = oracle::load("klein4");
    auto a = principal(k, 0, 1), b = principal(k, 0, 2), g = principal(k, 0, 3);
    auto code = [&](std::array<Congruence, 3> mu) {
        try {
            make_m3_witness(k, mu);
        } catch (const PipelineRefutation& r) {
            return r.code();
        }
        return std::string("none");
    };
    EXPECT_EQ(code({a, a, g}), "m3-meet-not-zero");
    EXPECT_EQ(code({a, Congruence::identity(4), g}), "m3-join-not-one");
    EXPECT_EQ(code({a, blocks(4, {{0, 1, 2}, {3}}), g}), "not-a-congruence");
    EXPECT_EQ(code({a, b, g}), "none");
    // Chains have no three pairwise complementary congruences.
    auto c3 = oracle::load("chain3");
    auto con = con_lattice(c3);
    for (const auto& x : con.elements()) {
        for (const auto& y : con.elements()) {
            for (const auto& z : con.elements()) {
                EXPECT_THROW(make_m3_witness(c3, {x, y, z}), PipelineRefutation);
            }
        }
    }
}

TEST(Pipeline, VerifyRejectsNonLiftings) {
    auto d = build_bowtie();
    auto c2 = oracle::load("chain2");
    LiftingCandidate c;
    for (std::size_t x = 0; x < d.vertex_count(); ++x) {
        c.algebras.push_back(c2);
        c.epsilon.push_back(std::vector<Congruence>(std::size_t{1} << d.ground(x), Congruence::identity(2)));
    }
    for (std::size_t k = 0; k < d.arrow_count(); ++k) {
        c.maps.push_back({0, 1});
    }
    auto r = verify_m3_extraction(d, c);
    EXPECT_FALSE(r.lifting_validated);
    EXPECT_EQ(r.refutation_code, std::optional<std::string>("not-a-lifting"));
    EXPECT_FALSE(r.witness.has_value());
}

TEST(Search, FindsChainIntoDiamond) {
    auto cat = gen_lattices(4);
    auto algs = cat.algebras();
    auto r = lift_search(e_arrow(), algs);
    EXPECT_TRUE(r.report.exhaustive());
    ASSERT_FALSE(r.liftings.empty());
    bool found = false;
    for (std::size_t i = 0; i < r.liftings.size(); ++i) {
        EXPECT_TRUE(check_lifting(e_arrow(), r.liftings[i]).accepted());
        found = found || (r.liftings[i].algebras[0].size() == 2 && isomorphic(r.liftings[i].algebras[1], oracle::load("diamond")));
    }
    EXPECT_TRUE(found);
}

TEST(Search, EmptyCatalog) {
    auto r = lift_search(build_bowtie(), std::vector<FiniteAlgebra>{});
    EXPECT_TRUE(r.liftings.empty());
    EXPECT_TRUE(r.report.exhaustive());
    EXPECT_EQ(r.report.catalog_size, 0u);
}

TEST(Search, MatchesBruteForce) {
    auto algs = gen_lattices(4).algebras();
    for (const auto& d : {e_arrow(), e_fork()}) {
        auto expected = brute_force(d, algs);
        auto r = lift_search(d, algs);
        EXPECT_TRUE(r.report.exhaustive());
        EXPECT_EQ(keys(r), expected);
        EXPECT_EQ(r.liftings.size(), expected.size());
    }
    EXPECT_EQ(brute_force(e_arrow(), algs).size(), 4u);
}

TEST(Search, JobsDoNotChangeResults) {
    auto algs = gen_lattices(5).algebras();
    auto one = lift_search(e_fork(), algs);
    SearchBounds b;
    b.jobs = 4;
    auto four = lift_search(e_fork(), algs, b);
    EXPECT_EQ(one.liftings, four.liftings);
    EXPECT_EQ(one.catalog_indices, four.catalog_indices);
}

TEST(Search, Bounds) {
    auto algs = gen_lattices(5).algebras();
    SearchBounds b;
    b.max_results = 1;
    auto r = lift_search(e_arrow(), algs, b);
    EXPECT_EQ(r.liftings.size(), 1u);
    EXPECT_TRUE(r.report.truncated);
    SearchBounds h;
    h.hom_budget = 1;
    auto t = lift_search(e_arrow(), algs, h);
    EXPECT_FALSE(t.report.exhaustive());
    EXPECT_FALSE(t.report.truncation_reason.empty());
}

TEST(Search, BowtieVertexStats) {
    auto algs = gen_lattices(5).algebras();
    auto r = lift_search(build_bowtie(), algs);
    EXPECT_TRUE(r.report.exhaustive());
    EXPECT_TRUE(r.liftings.empty());
    EXPECT_EQ(r.report.vertices.size(), 8u);
    // A vertex with ground k takes the lattices with 2^k congruences, each
    // with k! isomorphisms.
    const std::size_t factorial[] = {1, 1, 2, 6, 24};
    for (std::size_t x = 0; x < 8; ++x) {
        const std::size_t k = build_bowtie().ground(x);
        std::size_t expected = 0;
        for (const auto& a : algs) {
            expected += oracle::congruences(a).size() == (std::size_t{1} << k);
        }
        EXPECT_EQ(r.report.vertices[x].algebras, expected);
        EXPECT_EQ(r.report.vertices[x].candidates, expected * factorial[k]);
    }
    // chain2 and M3 at A.
    EXPECT_EQ(r.report.vertices[0].algebras, 2u);
}

TEST(CandidateJson, RoundTrip) {
    auto d = e_arrow();
    auto c = chain_into_diamond();
    auto j = to_json(d, c);
    auto back = candidate_from_json(d, j);
    EXPECT_EQ(back, c);
    EXPECT_TRUE(check_lifting(d, back).accepted());
    auto with_ref = to_json(d, c, {std::string("chain2.alg.json"), std::nullopt});
    EXPECT_TRUE(with_ref["vertices"][0].contains("ref"));
    EXPECT_EQ(candidate_from_json(d, with_ref, FIXTURE_DIR), c);

    auto algs = gen_lattices(4).algebras();
    auto r = lift_search(d, algs);
    for (const auto& l : r.liftings) {
        EXPECT_TRUE(check_lifting(d, candidate_from_json(d, to_json(d, l))).accepted());
    }

    auto wrong = j;
    wrong["vertices"][1]["name"] = "B";
    EXPECT_THROW(candidate_from_json(d, wrong), ValidationError);
    wrong = j;
    wrong["arrows"] = json::array();
    EXPECT_THROW(candidate_from_json(d, wrong), ValidationError);
    EXPECT_THROW(candidate_from_json(d, json::object()), ValidationError);
}
