#ifndef UALG_COMMUTATOR_HPP
#define UALG_COMMUTATOR_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "con_lattice.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "homomorphism.hpp"
#include "lattice.hpp"
#include "term.hpp"

namespace ualg {

/// A 2x2 matrix (t11, t12, t21, t22) over A.
using Matrix = std::array<Element, 4>;

/// The subalgebra M(α, β) of A^4 generated by the α-rows (a, a, b, b),
/// a α b, and the β-columns (p, q, p, q), p β q. A matrix in M(α, β) is
/// exactly a choice of t(a, p), t(a, q), t(b, p), t(b, q) for some term t
/// with a ≡α b and p ≡β q, so quantifying over it decides the term
/// condition on a finite algebra.
class MatrixSubalgebra {
public:
    static MatrixSubalgebra generate(const FiniteAlgebra& a, const Congruence& alpha, const Congruence& beta) {
        detail::require_size(a, alpha);
        detail::require_size(a, beta);
        const std::uint64_t n = a.size();
        auto encode = [n](std::uint64_t w, std::uint64_t x, std::uint64_t y, std::uint64_t z) {
            return ((w * n + x) * n + y) * n + z;
        };
        std::vector<std::uint64_t> seeds;
        for (Element x = 0; x < n; ++x) {
            for (Element y = 0; y < n; ++y) {
                if (alpha.related(x, y)) {
                    seeds.push_back(encode(x, x, y, y));
                }
                if (beta.related(x, y)) {
                    seeds.push_back(encode(x, y, x, y));
                }
            }
        }
        auto arities = a.signature().arities();
        std::vector<Element> col;
        auto members = close_under(arities, n * n * n * n, seeds,
                                   [&](std::size_t op, std::span<const std::uint64_t> args) -> std::uint64_t {
                                       std::uint64_t out = 0;
                                       col.resize(args.size());
                                       for (int c = 3; c >= 0; --c) {
                                           std::uint64_t shift = 1;
                                           for (int s = 0; s < 3 - c; ++s) {
                                               shift *= n;
                                           }
                                           for (std::size_t p = 0; p < args.size(); ++p) {
                                               col[p] = static_cast<Element>((args[p] / shift) % n);
                                           }
                                           out += shift * a.apply(op, std::span<const Element>(col));
                                       }
                                       return out;
                                   });
        MatrixSubalgebra m;
        m.matrices_.reserve(members.size());
        for (auto code : members) {
            Matrix t{};
            for (int c = 3; c >= 0; --c) {
                t[c] = static_cast<Element>(code % n);
                code /= n;
            }
            m.matrices_.push_back(t);
        }
        return m;
    }

    std::size_t size() const noexcept { return matrices_.size(); }
    const std::vector<Matrix>& matrices() const noexcept { return matrices_; }

private:
    std::vector<Matrix> matrices_;
};

struct Centralization {
    bool holds = true;
    /// A matrix with t11 δ t12 but not t21 δ t22.
    std::optional<Matrix> counterexample;
};

inline Centralization centralizes(const MatrixSubalgebra& m, const Congruence& delta) {
    for (const auto& t : m.matrices()) {
        if (delta.related(t[0], t[1]) && !delta.related(t[2], t[3])) {
            return {false, t};
        }
    }
    return {};
}

/// C(α, β; δ): α centralizes β modulo δ.
inline Centralization centralizes(const FiniteAlgebra& a, const Congruence& alpha, const Congruence& beta,
                                  const Congruence& delta) {
    detail::require_size(a, delta);
    return centralizes(MatrixSubalgebra::generate(a, alpha, beta), delta);
}

/// [α, β]: least δ with C(α, β; δ). Starting from 0, every matrix whose top
/// row is δ-related forces its bottom row into δ; iterate to the fixed point.
inline Congruence commutator(const FiniteAlgebra& a, const Congruence& alpha, const Congruence& beta) {
    const auto m = MatrixSubalgebra::generate(a, alpha, beta);
    Congruence delta = Congruence::identity(a.size());
    for (;;) {
        std::vector<ElementPair> forced = delta.generating_pairs();
        bool grew = false;
        for (const auto& t : m.matrices()) {
            if (delta.related(t[0], t[1]) && !delta.related(t[2], t[3])) {
                forced.emplace_back(t[2], t[3]);
                grew = true;
            }
        }
        if (!grew) {
            return delta;
        }
        delta = cg(a, forced);
    }
}

/// (δ : β): largest α with C(α, β; δ), the join of all such α in Con A.
inline Congruence centralizer(const ConLattice& con, const Congruence& delta, const Congruence& beta) {
    const FiniteAlgebra& a = con.algebra();
    Congruence result = Congruence::identity(a.size());
    for (const auto& alpha : con.elements()) {
        if (centralizes(a, alpha, beta, delta).holds) {
            result = join(a, result, alpha);
        }
    }
    if (!centralizes(a, result, beta, delta).holds) {
        throw std::logic_error("centralizer does not centralize");
    }
    return result;
}

inline Congruence centralizer(const FiniteAlgebra& a, const Congruence& delta, const Congruence& beta) {
    return centralizer(con_lattice(a), delta, beta);
}

inline bool is_abelian(const FiniteAlgebra& a) {
    return commutator(a, Congruence::total(a.size()), Congruence::total(a.size())).is_identity();
}

struct WeakDifferenceFailure {
    Congruence theta;
    Element x = 0, y = 0;
    /// true: d(x,y,y) ≢ x; false: d(y,y,x) ≢ x (modulo [θ,θ]).
    bool first_equation = true;
};

/// Decides whether a ternary term or polynomial d is a weak difference
/// polynomial of A: d(x,y,y) ≡ x ≡ d(y,y,x) modulo [θ,θ] for all θ ∈ Con A
/// and x θ y. The self-commutators are computed once up front.
class WeakDifferenceChecker {
public:
    explicit WeakDifferenceChecker(const FiniteAlgebra& a, ConLatticeOptions opts = {})
        : WeakDifferenceChecker(con_lattice(a, opts)) {}

    explicit WeakDifferenceChecker(const ConLattice& con) : algebra_(con.algebra()), thetas_(con.elements()) {
        for (const auto& t : thetas_) {
            self_commutators_.push_back(commutator(algebra_, t, t));
        }
    }

    const FiniteAlgebra& algebra() const noexcept { return algebra_; }
    const std::vector<Congruence>& thetas() const noexcept { return thetas_; }
    const std::vector<Congruence>& self_commutators() const noexcept { return self_commutators_; }

    std::optional<WeakDifferenceFailure> check(const Term& d) const {
        if (d.variable_bound() > 3) {
            throw ValidationError("weak difference candidate must be ternary");
        }
        const auto table = term_table(algebra_, d, 3);
        const std::size_t n = algebra_.size();
        auto at = [&](std::size_t x, std::size_t y, std::size_t z) { return table[(x * n + y) * n + z]; };
        for (std::size_t i = 0; i < thetas_.size(); ++i) {
            const auto& theta = thetas_[i];
            const auto& mod = self_commutators_[i];
            for (Element x = 0; x < n; ++x) {
                for (Element y = 0; y < n; ++y) {
                    if (!theta.related(x, y)) {
                        continue;
                    }
                    if (!mod.related(at(x, y, y), x)) {
                        return WeakDifferenceFailure{theta, x, y, true};
                    }
                    if (!mod.related(at(y, y, x), x)) {
                        return WeakDifferenceFailure{theta, x, y, false};
                    }
                }
            }
        }
        return std::nullopt;
    }

private:
    FiniteAlgebra algebra_;
    std::vector<Congruence> thetas_;
    std::vector<Congruence> self_commutators_;
};

inline std::optional<WeakDifferenceFailure> check_weak_difference(const FiniteAlgebra& a, const Term& d) {
    return WeakDifferenceChecker(a).check(d);
}

/// Outcome of a depth-bounded term search. An empty `term` means none was
/// found up to `depth_bound`, not that none exists.
struct TermSearchResult {
    std::optional<Term> term;
    std::size_t depth_bound = 0;
    std::size_t examined = 0;

    std::string describe(const Signature& sig) const {
        if (term) {
            return term->to_string(sig);
        }
        return "none found up to depth " + std::to_string(depth_bound);
    }
};

/// First ternary term (or polynomial, when `polynomials` is set) in
/// enumeration order that is a weak difference term of A. Terms inducing
/// an operation already tried are skipped.
inline TermSearchResult find_weak_difference_term(const FiniteAlgebra& a, std::size_t max_depth,
                                                  bool polynomials = false) {
    WeakDifferenceChecker checker(a);
    TermEnumerator en(a.signature(), TermEnumerationOptions{3, max_depth, a, polynomials});
    TermSearchResult r;
    r.depth_bound = max_depth;
    while (auto t = en.next()) {
        ++r.examined;
        if (!checker.check(*t)) {
            r.term = std::move(t);
            break;
        }
    }
    return r;
}

inline constexpr std::size_t default_hamiltonian_cap = 10;

struct HamiltonianResult {
    bool holds = true;
    /// A subuniverse that is not a block of any congruence.
    std::optional<std::vector<Element>> counterexample;
    std::size_t subuniverses = 0;
};

/// Every nonempty subuniverse S must be a block of some congruence, which
/// happens iff S is a block of cg(S × S). Subuniverses are enumerated as
/// closures of all generator subsets.
inline HamiltonianResult is_hamiltonian(const FiniteAlgebra& a, std::size_t max_size = default_hamiltonian_cap) {
    const std::size_t n = a.size();
    if (n > max_size || n > 20) {
        throw CapExceeded("subuniverse enumeration refused for size " + std::to_string(n), max_size);
    }
    std::set<std::vector<Element>> subs;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<Element> gens;
        for (Element x = 0; x < n; ++x) {
            if (mask >> x & 1) {
                gens.push_back(x);
            }
        }
        subs.insert(subalgebra_generated(a, gens));
    }
    if (a.signature().has_constants()) {
        subs.insert(subalgebra_generated(a, std::span<const Element>{}));
    }
    HamiltonianResult r;
    r.subuniverses = subs.size();
    for (const auto& s : subs) {
        std::vector<ElementPair> pairs;
        for (auto x : s) {
            pairs.emplace_back(s.front(), x);
        }
        auto c = cg(a, pairs);
        std::size_t block = 0;
        for (Element x = 0; x < n; ++x) {
            block += c.related(x, s.front());
        }
        if (block != s.size()) {
            r.holds = false;
            r.counterexample = s;
            return r;
        }
    }
    return r;
}

/// A verified difference operation: t(x,y,z) = x - y + z for the Abelian
/// group x + y := t(x, 0, y), -x := t(0, x, 0), and t is a homomorphism
/// A^3 -> A.
struct AffineWitness {
    Term t;
    Element zero = 0;
    std::vector<Element> plus;      // n*n, row-major
    std::vector<Element> negation;  // n
};

struct AffineCheck {
    std::optional<AffineWitness> witness;
    std::string failure;

    explicit operator bool() const noexcept { return witness.has_value(); }
};

inline AffineCheck check_affine_witness(const FiniteAlgebra& a, const Term& t, Element zero) {
    if (t.variable_bound() > 3) {
        throw ValidationError("difference term must be ternary");
    }
    if (zero >= a.size()) {
        throw ValidationError("zero is not an element");
    }
    const std::size_t n = a.size();
    const auto table = term_table(a, t, 3);
    auto T = [&](std::size_t x, std::size_t y, std::size_t z) { return table[(x * n + y) * n + z]; };
    auto fail = [](std::string why) { return AffineCheck{std::nullopt, std::move(why)}; };
    auto el = [](std::size_t x) { return std::to_string(x); };

    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (T(x, y, y) != x) {
                return fail("Mal'cev equation t(x,y,y) = x fails at x=" + el(x) + ", y=" + el(y));
            }
            if (T(y, y, x) != x) {
                return fail("Mal'cev equation t(y,y,x) = x fails at x=" + el(x) + ", y=" + el(y));
            }
        }
    }
    AffineWitness w{t, zero, std::vector<Element>(n * n), std::vector<Element>(n)};
    for (std::size_t x = 0; x < n; ++x) {
        w.negation[x] = T(zero, x, zero);
        for (std::size_t y = 0; y < n; ++y) {
            w.plus[x * n + y] = T(x, zero, y);
        }
    }
    auto add = [&](std::size_t x, std::size_t y) { return w.plus[x * n + y]; };
    for (std::size_t x = 0; x < n; ++x) {
        if (add(x, zero) != x || add(zero, x) != x) {
            return fail("zero is not neutral for " + el(x));
        }
        if (add(x, w.negation[x]) != zero) {
            return fail("x + (-x) != 0 for x=" + el(x));
        }
        for (std::size_t y = 0; y < n; ++y) {
            if (add(x, y) != add(y, x)) {
                return fail("derived addition not commutative at " + el(x) + "," + el(y));
            }
            for (std::size_t z = 0; z < n; ++z) {
                if (add(add(x, y), z) != add(x, add(y, z))) {
                    return fail("derived addition not associative at " + el(x) + "," + el(y) + "," + el(z));
                }
                if (T(x, y, z) != add(add(x, w.negation[y]), z)) {
                    return fail("t(x,y,z) != x - y + z at " + el(x) + "," + el(y) + "," + el(z));
                }
            }
        }
    }
    // t as a map A^3 -> A, with ((x, y), z) encoded as (x*n + y)*n + z.
    const auto cube = product(product(a, a), a);
    auto hom = check_homomorphism(cube, a, std::span<const Element>(table));
    if (!hom) {
        return fail("t is not a homomorphism A^3 -> A: " + hom.violation->message());
    }
    return {std::move(w), {}};
}

/// Executable instance of: a weak difference polynomial plus a 0,1-copy of
/// M3 in Con A force A to be Abelian.
struct WeakDifferenceLemmaReport {
    std::optional<M3Witness> m3;                 // first hypothesis
    TermSearchResult weak_difference;            // second hypothesis (polynomials)
    bool abelian = false;

    bool hypotheses_hold() const { return m3.has_value() && weak_difference.term.has_value(); }
    bool vacuous() const { return !hypotheses_hold(); }
    bool consistent() const { return vacuous() || abelian; }
};

inline WeakDifferenceLemmaReport lemma_wdterm_check(const FiniteAlgebra& a, std::size_t max_depth = 3) {
    WeakDifferenceLemmaReport r;
    const auto con = con_lattice(a);
    r.m3 = find_m3_01(con.lattice());
    r.weak_difference = find_weak_difference_term(a, max_depth, true);
    r.abelian = is_abelian(a);
    if (!r.consistent()) {
        throw std::logic_error("weak difference lemma contradicted: hypotheses hold but A is not Abelian");
    }
    return r;
}

} // namespace ualg

#endif
