#ifndef UALG_HOMOMORPHISM_HPP
#define UALG_HOMOMORPHISM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "error.hpp"

namespace ualg {

class Homomorphism;

struct HomomorphismViolation {
    std::size_t operation = 0;
    std::string operation_name;
    std::vector<Element> arguments;
    Element image_of_result = 0;   // f(g(args))
    Element result_of_images = 0;  // g(f(args))

    std::string message() const {
        std::string s = "'" + operation_name + "' not preserved at (";
        for (std::size_t i = 0; i < arguments.size(); ++i) {
            s += (i ? "," : "") + std::to_string(arguments[i]);
        }
        return s + "): f(g(a)) = " + std::to_string(image_of_result) +
               " but g(f(a)) = " + std::to_string(result_of_images);
    }
};

namespace detail {
inline std::optional<HomomorphismViolation> first_violation(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                                            std::span<const Element> map);
}

/// A validated operation-preserving map. Only obtainable through
/// check_homomorphism / make_homomorphism / compose.
class Homomorphism {
public:
    const FiniteAlgebra& domain() const noexcept { return dom_; }
    const FiniteAlgebra& codomain() const noexcept { return cod_; }
    std::span<const Element> map() const noexcept { return map_; }
    Element operator()(Element x) const { return map_.at(x); }
    bool injective() const noexcept { return injective_; }

    bool operator==(const Homomorphism& o) const {
        return map_ == o.map_ && dom_ == o.dom_ && cod_ == o.cod_;
    }

private:
    friend struct HomomorphismAccess;
    Homomorphism(FiniteAlgebra dom, FiniteAlgebra cod, std::vector<Element> map)
        : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(map)) {
        std::vector<char> hit(cod_.size(), 0);
        injective_ = true;
        for (auto y : map_) {
            if (hit[y]) {
                injective_ = false;
            }
            hit[y] = 1;
        }
    }

    FiniteAlgebra dom_;
    FiniteAlgebra cod_;
    std::vector<Element> map_;
    bool injective_ = false;
};

struct HomomorphismAccess {
    static Homomorphism make(FiniteAlgebra dom, FiniteAlgebra cod, std::vector<Element> map) {
        return Homomorphism(std::move(dom), std::move(cod), std::move(map));
    }
};

struct HomomorphismCheck {
    std::optional<Homomorphism> homomorphism;
    std::optional<HomomorphismViolation> violation;

    explicit operator bool() const noexcept { return homomorphism.has_value(); }
};

namespace detail {

inline void validate_map(const FiniteAlgebra& dom, const FiniteAlgebra& cod, std::span<const Element> map) {
    require_same_signature(dom, cod);
    if (map.size() != dom.size()) {
        throw ValidationError("map has length " + std::to_string(map.size()) + ", domain has size " +
                              std::to_string(dom.size()));
    }
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] >= cod.size()) {
            throw ValidationError("map entry " + std::to_string(i) + " out of codomain range");
        }
    }
}

inline std::optional<HomomorphismViolation> first_violation(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                                            std::span<const Element> map) {
    std::optional<HomomorphismViolation> bad;
    std::vector<Element> image_args;
    for (std::size_t op = 0; op < dom.operation_count() && !bad; ++op) {
        const std::size_t k = dom.arity(op);
        image_args.resize(k);
        for_each_tuple<Element>(dom.size(), k, [&](std::span<const Element> args) {
            if (bad) {
                return;
            }
            for (std::size_t p = 0; p < k; ++p) {
                image_args[p] = map[args[p]];
            }
            Element lhs = map[dom.apply(op, args)];
            Element rhs = cod.apply(op, std::span<const Element>(image_args));
            if (lhs != rhs) {
                bad = HomomorphismViolation{op, dom.signature()[op].name,
                                            std::vector<Element>(args.begin(), args.end()), lhs, rhs};
            }
        });
    }
    return bad;
}

} // namespace detail

/// Accepts map iff it preserves every operation; otherwise reports the
/// first violated operation and argument tuple (table order).
inline HomomorphismCheck check_homomorphism(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                            std::span<const Element> map) {
    detail::validate_map(dom, cod, map);
    if (auto v = detail::first_violation(dom, cod, map)) {
        return {std::nullopt, std::move(v)};
    }
    return {HomomorphismAccess::make(dom, cod, std::vector<Element>(map.begin(), map.end())), std::nullopt};
}

/// As check_homomorphism, but throws ValidationError on a violation.
inline Homomorphism make_homomorphism(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                      std::span<const Element> map) {
    auto r = check_homomorphism(dom, cod, map);
    if (!r) {
        throw ValidationError("not a homomorphism: " + r.violation->message());
    }
    return std::move(*r.homomorphism);
}

inline Homomorphism make_homomorphism(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                      std::initializer_list<Element> map) {
    return make_homomorphism(dom, cod, std::span<const Element>(map.begin(), map.size()));
}

inline Homomorphism identity_homomorphism(const FiniteAlgebra& a) {
    return HomomorphismAccess::make(a, a, a.universe());
}

/// g after f.
inline Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
    if (!(f.codomain() == g.domain())) {
        throw ValidationError("composition of non-matching homomorphisms");
    }
    std::vector<Element> m(f.domain().size());
    for (std::size_t x = 0; x < m.size(); ++x) {
        m[x] = g(f(static_cast<Element>(x)));
    }
    return HomomorphismAccess::make(f.domain(), g.codomain(), std::move(m));
}

struct HomomorphismEnumeration {
    std::vector<Homomorphism> homomorphisms;
    /// Set when the budget ran out before the search space was exhausted.
    bool truncated = false;
    /// Candidate images tried at branch points.
    std::size_t examined = 0;
};

/// Visits every homomorphism dom -> cod. Backtracks over domain elements in
/// index order; each assignment is propagated through the operation tables
/// so elements generated by already-mapped ones are never branched on.
/// visit returns false to stop early. budget caps the number of candidate
/// images tried. Returns the enumeration statistics (homomorphisms left
/// empty).
template <class Visit>
HomomorphismEnumeration for_each_homomorphism(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                              std::size_t budget, Visit&& visit) {
    require_same_signature(dom, cod);
    HomomorphismEnumeration stats;
    const std::size_t n = dom.size();
    std::vector<std::int64_t> map(n, -1);
    std::vector<Element> assigned;  // domain elements in assignment order
    std::vector<Element> args, image_args;

    // Assign x -> v and propagate. Returns false on a conflict; in every
    // case the new assignments are recorded in `assigned`.
    auto assign = [&](Element x, Element v) -> bool {
        std::vector<Element> queue;
        if (map[x] >= 0) {
            return map[x] == static_cast<std::int64_t>(v);
        }
        map[x] = v;
        assigned.push_back(x);
        queue.push_back(x);
        while (!queue.empty()) {
            Element e = queue.back();
            queue.pop_back();
            for (std::size_t op = 0; op < dom.operation_count(); ++op) {
                const std::size_t k = dom.arity(op);
                if (k == 0) {
                    continue;
                }
                args.resize(k);
                image_args.resize(k);
                const std::size_t m = assigned.size();
                for (std::size_t slot = 0; slot < k; ++slot) {
                    bool conflict = false;
                    for_each_tuple<std::size_t>(m, k - 1, [&](std::span<const std::size_t> other) {
                        if (conflict) {
                            return;
                        }
                        for (std::size_t p = 0, q = 0; p < k; ++p) {
                            args[p] = (p == slot) ? e : assigned[other[q++]];
                            image_args[p] = static_cast<Element>(map[args[p]]);
                        }
                        Element r = dom.apply(op, std::span<const Element>(args));
                        Element img = cod.apply(op, std::span<const Element>(image_args));
                        if (map[r] < 0) {
                            map[r] = img;
                            assigned.push_back(r);
                            queue.push_back(r);
                        } else if (map[r] != static_cast<std::int64_t>(img)) {
                            conflict = true;
                        }
                    });
                    if (conflict) {
                        return false;
                    }
                }
            }
        }
        return true;
    };

    auto undo_to = [&](std::size_t mark) {
        while (assigned.size() > mark) {
            map[assigned.back()] = -1;
            assigned.pop_back();
        }
    };

    for (std::size_t op = 0; op < dom.operation_count(); ++op) {
        if (dom.arity(op) == 0) {
            Element c = dom.apply(op, std::span<const Element>{});
            Element d = cod.apply(op, std::span<const Element>{});
            if (!assign(c, d)) {
                return stats;
            }
        }
    }

    bool stop = false;
    std::function<void(Element)> search = [&](Element from) {
        Element x = from;
        while (x < n && map[x] >= 0) {
            ++x;
        }
        if (x == n) {
            std::vector<Element> m(n);
            for (std::size_t i = 0; i < n; ++i) {
                m[i] = static_cast<Element>(map[i]);
            }
            if (!visit(HomomorphismAccess::make(dom, cod, std::move(m)))) {
                stop = true;
            }
            return;
        }
        for (Element v = 0; v < cod.size() && !stop; ++v) {
            if (stats.examined >= budget) {
                stats.truncated = true;
                stop = true;
                return;
            }
            ++stats.examined;
            const std::size_t mark = assigned.size();
            if (assign(x, v)) {
                search(x + 1);
            }
            undo_to(mark);
        }
    };
    search(0);
    return stats;
}

inline HomomorphismEnumeration enumerate_homomorphisms(const FiniteAlgebra& dom, const FiniteAlgebra& cod,
                                                       std::size_t budget = SIZE_MAX) {
    std::vector<Homomorphism> out;
    auto stats = for_each_homomorphism(dom, cod, budget, [&](Homomorphism h) {
        out.push_back(std::move(h));
        return true;
    });
    stats.homomorphisms = std::move(out);
    return stats;
}

} // namespace ualg

#endif
