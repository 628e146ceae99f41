#include <gtest/gtest.h>

#include <random>

#include "commutator.hpp"
#include "oracles.hpp"

using namespace ualg;

namespace {

Term x(std::size_t i) { return Term::variable(i); }

oracle::Labels labels(const Congruence& c) { return {c.labels().begin(), c.labels().end()}; }

// Group term x0 * inv(x1) * x2 in the mul/inv/e signature.
Term group_difference() { return Term::apply(0, {Term::apply(0, {x(0), Term::apply(1, {x(1)})}), x(2)}); }

// Adds one random operation of the given arity. The reduct keeps its
// Mal'cev or majority term, so the result stays congruence modular.
FiniteAlgebra expand(const FiniteAlgebra& a, std::size_t arity, std::mt19937_64& rng) {
    std::vector<OperationSymbol> ops = a.signature().operations();
    ops.push_back({"r", arity});
    auto tables = a.tables();
    std::uniform_int_distribution<Element> d(0, static_cast<Element>(a.size() - 1));
    std::vector<Element> t(*checked_power(a.size(), arity));
    for (auto& v : t) {
        v = d(rng);
    }
    tables.push_back(t);
    return FiniteAlgebra::create(a.size(), Signature(ops), tables);
}

const std::vector<std::string> groups_to_8{"z2", "z3", "z4", "klein4", "z5", "z6", "s3",
                                           "z7", "z8", "z4xz2", "z2xz2xz2", "d4", "q8"};

} // namespace

TEST(MatrixSubalgebra, GeneratorsPresent) {
    auto z4 = oracle::load("z4");
    auto one = Congruence::total(4);
    auto m = MatrixSubalgebra::generate(z4, one, Congruence::identity(4));
    for (const auto& t : m.matrices()) {
        EXPECT_EQ(t[0], t[1]);  // β = 0 makes every column constant
        EXPECT_EQ(t[2], t[3]);
    }
    auto full = MatrixSubalgebra::generate(z4, one, one);
    // Matrices of Z4: (a, a+p, a+q... ) determined by three free entries.
    EXPECT_EQ(full.size(), 64u);
}

TEST(Centralizes, TrivialCases) {
    for (auto name : {"s3", "n5", "klein4", "semilattice2"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                EXPECT_TRUE(centralizes(a, al, be, Congruence::total(a.size())).holds);
                EXPECT_TRUE(centralizes(a, Congruence::identity(a.size()), be, al).holds);
            }
        }
    }
    auto s3 = oracle::load("s3");
    auto c = centralizes(s3, Congruence::total(6), Congruence::total(6), Congruence::identity(6));
    EXPECT_FALSE(c.holds);
    ASSERT_TRUE(c.counterexample.has_value());
    auto t = *c.counterexample;
    EXPECT_EQ(t[0], t[1]);
    EXPECT_NE(t[2], t[3]);
}

TEST(Centralizes, AntitoneInAlphaMonotoneInDelta) {
    for (auto name : {"s3", "z4", "n5", "semilattice2", "chain3"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        const auto& e = con.elements();
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::size_t j = 0; j < e.size(); ++j) {
                for (std::size_t k = 0; k < e.size(); ++k) {
                    if (!centralizes(a, e[i], e[j], e[k]).holds) {
                        continue;
                    }
                    for (std::size_t l = 0; l < e.size(); ++l) {
                        if (con.leq(l, i)) {
                            EXPECT_TRUE(centralizes(a, e[l], e[j], e[k]).holds) << name;
                        }
                        if (con.leq(k, l)) {
                            EXPECT_TRUE(centralizes(a, e[i], e[j], e[l]).holds) << name;
                        }
                    }
                }
            }
        }
    }
}

TEST(Commutator, Examples) {
    auto k = oracle::load("klein4");
    auto one = Congruence::total(4);
    EXPECT_TRUE(commutator(k, one, one).is_identity());
    auto s3 = oracle::load("s3");
    auto c = commutator(s3, Congruence::total(6), Congruence::total(6));
    // A3 = {id, (0 1 2), (0 2 1)} at indices 0, 3, 4.
    EXPECT_EQ(c.to_string(), "{0,3,4}{1,2,5}");
    auto z4 = oracle::load("z4");
    EXPECT_TRUE(commutator(z4, Congruence::total(4), Congruence::total(4)).is_identity());
    for (auto name : {"s3", "n5", "semilattice2"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        for (const auto& b : con.elements()) {
            EXPECT_TRUE(commutator(a, Congruence::identity(a.size()), b).is_identity());
        }
    }
}

TEST(Commutator, BelowMeetAndMonotone) {
    for (auto name : {"s3", "d4", "q8", "n5", "m3", "diamond", "semilattice2", "z4xz2", "chain3"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        const auto& e = con.elements();
        std::vector<std::vector<Congruence>> table(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::size_t j = 0; j < e.size(); ++j) {
                table[i].push_back(commutator(a, e[i], e[j]));
                EXPECT_TRUE(table[i][j].leq(meet(e[i], e[j]))) << name;
                EXPECT_TRUE(is_congruence(a, table[i][j]));
            }
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::size_t j = 0; j < e.size(); ++j) {
                for (std::size_t k = 0; k < e.size(); ++k) {
                    if (con.leq(i, k)) {
                        EXPECT_TRUE(table[i][j].leq(table[k][j])) << name;
                        EXPECT_TRUE(table[j][i].leq(table[j][k])) << name;
                    }
                }
            }
        }
    }
}

TEST(Commutator, MatchesGroupCommutatorSubgroup) {
    for (const auto& name : groups_to_8) {
        auto a = oracle::load(name);
        auto g = oracle::as_group(a);
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                EXPECT_EQ(labels(commutator(a, al, be)), oracle::group_commutator(g, labels(al), labels(be)))
                    << name << " " << al.to_string() << " " << be.to_string();
            }
        }
    }
}

TEST(Commutator, MatchesDeltaConstructionOnModularExpansions) {
    std::mt19937_64 rng(31);
    const std::vector<std::string> bases{"z2", "z3", "z4", "klein4", "chain2", "chain3", "diamond"};
    for (int trial = 0; trial < 40; ++trial) {
        auto base = oracle::load(bases[trial % bases.size()]);
        auto a = expand(base, 1 + trial % 2, rng);
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                EXPECT_EQ(labels(commutator(a, al, be)), oracle::delta_commutator(a, labels(al), labels(be)));
            }
        }
    }
}

TEST(Commutator, LatticesGiveMeets) {
    for (auto name : {"chain2", "chain3", "diamond", "m3", "n5", "bounded_chain2"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        for (const auto& al : con.elements()) {
            for (const auto& be : con.elements()) {
                EXPECT_EQ(commutator(a, al, be), meet(al, be)) << name;
            }
        }
    }
}

TEST(Centralizer, Examples) {
    auto k = oracle::load("klein4");
    EXPECT_TRUE(centralizer(k, Congruence::identity(4), Congruence::total(4)).is_total());
    auto s3 = oracle::load("s3");
    EXPECT_TRUE(centralizer(s3, Congruence::identity(6), Congruence::total(6)).is_identity());
    for (auto name : {"s3", "n5", "d4"}) {
        auto a = oracle::load(name);
        auto con = con_lattice(a);
        for (const auto& d : con.elements()) {
            EXPECT_TRUE(centralizer(a, d, Congruence::identity(a.size())).is_total()) << name;
        }
    }
    // Center of D4 is {e, r^2}; its congruence is (0 : 1).
    auto d4 = oracle::load("d4");
    auto z = centralizer(d4, Congruence::identity(8), Congruence::total(8));
    EXPECT_EQ(z.block_count(), 4u);
}

TEST(Abelian, Fixtures) {
    for (auto name : {"trivial", "z2", "z4", "klein4", "z6", "z4xz2", "z2xz2xz2"}) {
        EXPECT_TRUE(is_abelian(oracle::load(name))) << name;
    }
    for (auto name : {"s3", "d4", "q8", "chain2", "n5", "semilattice2"}) {
        EXPECT_FALSE(is_abelian(oracle::load(name))) << name;
    }
}

TEST(WeakDifference, Check) {
    auto z2 = oracle::load("z2");
    auto sum = Term::apply(0, {Term::apply(0, {x(0), x(1)}), x(2)});
    EXPECT_FALSE(check_weak_difference(z2, sum).has_value());
    EXPECT_FALSE(check_weak_difference(oracle::load("s3"), group_difference()).has_value());
    // A projection fails on Z2 with θ = 1, where [θ,θ] = 0.
    auto f = check_weak_difference(z2, x(0));
    ASSERT_TRUE(f.has_value());
    EXPECT_TRUE(f->theta.is_total());
    EXPECT_FALSE(f->first_equation);
    // On the 2-element semilattice [1,1] = 1, so every term passes.
    auto sl = oracle::load("semilattice2");
    auto j = Term::apply(0, {Term::apply(0, {x(0), x(1)}), x(2)});
    EXPECT_FALSE(check_weak_difference(sl, j).has_value());
    EXPECT_TRUE(commutator(sl, Congruence::total(2), Congruence::total(2)).is_total());
}

TEST(WeakDifference, Search) {
    auto k = oracle::load("klein4");
    auto r = find_weak_difference_term(k, 3);
    ASSERT_TRUE(r.term.has_value());
    EXPECT_LE(r.term->depth(), 3u);
    EXPECT_EQ(term_table(k, *r.term, 3), term_table(k, group_difference(), 3));
    auto t = find_weak_difference_term(oracle::load("trivial"), 0);
    ASSERT_TRUE(t.term.has_value());
    EXPECT_EQ(t.term->to_string(Signature{}), "x0");
    // Z2 with no term found at depth 0.
    auto none = find_weak_difference_term(oracle::load("z2"), 0);
    EXPECT_FALSE(none.term.has_value());
    EXPECT_EQ(none.describe(k.signature()), "none found up to depth 0");
}

TEST(Hamiltonian, Examples) {
    EXPECT_TRUE(is_hamiltonian(oracle::load("z4")).holds);
    EXPECT_TRUE(is_hamiltonian(oracle::load("klein4")).holds);
    EXPECT_TRUE(is_hamiltonian(oracle::load("q8")).holds);
    EXPECT_TRUE(is_hamiltonian(oracle::load("semilattice2")).holds);
    auto s3 = is_hamiltonian(oracle::load("s3"));
    EXPECT_FALSE(s3.holds);
    ASSERT_TRUE(s3.counterexample.has_value());
    EXPECT_EQ(s3.counterexample->size(), 2u);
    EXPECT_FALSE(is_hamiltonian(oracle::load("d4")).holds);
    EXPECT_THROW(is_hamiltonian(oracle::load("d4"), 4), CapExceeded);
}

TEST(Affine, Witnesses) {
    auto z4 = oracle::load("z4");
    auto w = check_affine_witness(z4, group_difference(), 0);
    ASSERT_TRUE(w) << w.failure;
    EXPECT_EQ(w.witness->plus[1 * 4 + 3], 0u);
    EXPECT_EQ(w.witness->negation[1], 3u);
    auto k = oracle::load("klein4");
    auto sum = Term::apply(0, {Term::apply(0, {x(0), x(1)}), x(2)});
    EXPECT_TRUE(check_affine_witness(k, sum, 0));
    auto c = oracle::load("chain2");
    auto j = Term::apply(0, {x(0), x(2)});
    auto bad = check_affine_witness(c, j, 0);
    EXPECT_FALSE(bad);
    EXPECT_NE(bad.failure.find("Mal'cev"), std::string::npos) << bad.failure;
    // S3 has a Mal'cev term but it is not a homomorphism.
    EXPECT_FALSE(check_affine_witness(oracle::load("s3"), group_difference(), 0));
}

TEST(WeakDifferenceLemma, Reports) {
    auto k = lemma_wdterm_check(oracle::load("klein4"));
    EXPECT_TRUE(k.hypotheses_hold());
    EXPECT_TRUE(k.abelian);
    EXPECT_TRUE(k.consistent());
    auto s = lemma_wdterm_check(oracle::load("s3"));
    EXPECT_FALSE(s.m3.has_value());
    EXPECT_TRUE(s.vacuous());
    auto t = lemma_wdterm_check(oracle::load("trivial"));
    EXPECT_TRUE(t.vacuous());
    EXPECT_TRUE(t.consistent());
}
