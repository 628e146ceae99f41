#ifndef UALG_ALGEBRA_HPP
#define UALG_ALGEBRA_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "tuples.hpp"

namespace ualg {

/// Elements of a finite algebra of size n are always 0..n-1.
using Element = std::uint32_t;
using ElementPair = std::pair<Element, Element>;

struct OperationSymbol {
    std::string name;
    std::size_t arity = 0;

    bool operator==(const OperationSymbol&) const = default;
};

class Signature {
public:
    Signature() = default;

    explicit Signature(std::vector<OperationSymbol> ops) : ops_(std::move(ops)) {
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            if (ops_[i].name.empty()) {
                throw ValidationError("operation " + std::to_string(i) + " has an empty name");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (ops_[j].name == ops_[i].name) {
                    throw ValidationError("duplicate operation name '" + ops_[i].name + "'");
                }
            }
        }
    }

    Signature(std::initializer_list<OperationSymbol> ops)
        : Signature(std::vector<OperationSymbol>(ops)) {}

    const std::vector<OperationSymbol>& operations() const noexcept { return ops_; }
    std::size_t size() const noexcept { return ops_.size(); }
    const OperationSymbol& operator[](std::size_t i) const { return ops_.at(i); }

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            if (ops_[i].name == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    bool has_constants() const {
        return std::any_of(ops_.begin(), ops_.end(), [](const auto& o) { return o.arity == 0; });
    }

    std::vector<std::size_t> arities() const {
        std::vector<std::size_t> a;
        a.reserve(ops_.size());
        for (const auto& o : ops_) {
            a.push_back(o.arity);
        }
        return a;
    }

    bool operator==(const Signature&) const = default;

private:
    std::vector<OperationSymbol> ops_;
};

/// An immutable finite algebra. Operation tables are row-major: the entry
/// for (a_0, ..., a_{k-1}) sits at index a_0*n^{k-1} + ... + a_{k-1}.
/// Copies share the underlying tables.
class FiniteAlgebra {
public:
    /// The one-element algebra with the empty signature.
    FiniteAlgebra() : FiniteAlgebra(create(1, Signature{}, {})) {}

    static FiniteAlgebra create(std::size_t size, Signature sig,
                                std::vector<std::vector<Element>> tables) {
        if (size == 0) {
            throw ValidationError("algebra size must be at least 1");
        }
        if (tables.size() != sig.size()) {
            throw ValidationError("expected " + std::to_string(sig.size()) + " tables, got " +
                                  std::to_string(tables.size()));
        }
        for (std::size_t op = 0; op < sig.size(); ++op) {
            auto expected = checked_power(size, sig[op].arity);
            if (!expected || *expected > (std::uint64_t{1} << 32)) {
                throw ValidationError("table of '" + sig[op].name + "' is too large");
            }
            if (tables[op].size() != *expected) {
                throw ValidationError("table of '" + sig[op].name + "' has length " +
                                      std::to_string(tables[op].size()) + ", expected " +
                                      std::to_string(*expected));
            }
            for (std::size_t i = 0; i < tables[op].size(); ++i) {
                if (tables[op][i] >= size) {
                    throw ValidationError("table of '" + sig[op].name + "' entry " + std::to_string(i) +
                                          " is " + std::to_string(tables[op][i]) + ", out of range [0," +
                                          std::to_string(size) + ")");
                }
            }
        }
        FiniteAlgebra a(Tag{});
        a.data_ = std::make_shared<const Data>(Data{size, std::move(sig), std::move(tables)});
        return a;
    }

    std::size_t size() const noexcept { return data_->size; }
    const Signature& signature() const noexcept { return data_->sig; }
    std::size_t operation_count() const noexcept { return data_->sig.size(); }
    std::size_t arity(std::size_t op) const { return data_->sig[op].arity; }
    std::span<const Element> table(std::size_t op) const { return data_->tables.at(op); }
    const std::vector<std::vector<Element>>& tables() const noexcept { return data_->tables; }

    template <class T>
    std::size_t index_of(std::span<const T> args) const {
        std::size_t idx = 0;
        for (auto a : args) {
            idx = idx * data_->size + static_cast<std::size_t>(a);
        }
        return idx;
    }

    template <class T>
    Element apply(std::size_t op, std::span<const T> args) const {
        return data_->tables[op][index_of(args)];
    }

    Element apply(std::size_t op, std::initializer_list<Element> args) const {
        return apply(op, std::span<const Element>(args.begin(), args.size()));
    }

    std::vector<Element> universe() const {
        std::vector<Element> u(size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = static_cast<Element>(i);
        }
        return u;
    }

    bool operator==(const FiniteAlgebra& o) const {
        return data_ == o.data_ ||
               (data_->size == o.data_->size && data_->sig == o.data_->sig && data_->tables == o.data_->tables);
    }

private:
    struct Tag {};
    explicit FiniteAlgebra(Tag) {}

    struct Data {
        std::size_t size;
        Signature sig;
        std::vector<std::vector<Element>> tables;
    };
    std::shared_ptr<const Data> data_;
};

inline void require_same_signature(const FiniteAlgebra& a, const FiniteAlgebra& b) {
    if (!(a.signature() == b.signature())) {
        throw SignatureMismatch("algebras have different signatures");
    }
}

/// Least subset of {0..universe-1} containing the seeds and closed under
/// the given operations. apply(op, args) evaluates operation op on a span
/// of encoded elements. Semi-naive: each argument tuple is visited once.
template <class Apply>
std::vector<std::uint64_t> close_under(std::span<const std::size_t> arities, std::uint64_t universe,
                                       std::span<const std::uint64_t> seeds, Apply&& apply) {
    std::vector<std::uint64_t> members;
    std::vector<char> dense;
    std::unordered_set<std::uint64_t> sparse;
    const bool use_dense = universe <= (std::uint64_t{1} << 26);
    if (use_dense) {
        dense.assign(universe, 0);
    }
    auto insert = [&](std::uint64_t x) {
        if (use_dense) {
            if (!dense[x]) {
                dense[x] = 1;
                members.push_back(x);
            }
        } else if (sparse.insert(x).second) {
            members.push_back(x);
        }
    };
    for (auto s : seeds) {
        insert(s);
    }
    std::vector<std::uint64_t> args;
    for (std::size_t op = 0; op < arities.size(); ++op) {
        if (arities[op] == 0) {
            insert(apply(op, std::span<const std::uint64_t>{}));
        }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t op = 0; op < arities.size(); ++op) {
            const std::size_t k = arities[op];
            if (k == 0) {
                continue;
            }
            args.resize(k);
            for_each_tuple_with_max(i, k, [&](std::span<const std::size_t> idx) {
                for (std::size_t p = 0; p < k; ++p) {
                    args[p] = members[idx[p]];
                }
                insert(apply(op, std::span<const std::uint64_t>(args)));
            });
        }
    }
    return members;
}

/// The subuniverse of A generated by S, sorted ascending.
inline std::vector<Element> subalgebra_generated(const FiniteAlgebra& a, std::span<const Element> generators) {
    if (generators.empty() && !a.signature().has_constants()) {
        throw ValidationError("empty generating set over a signature without constants");
    }
    std::vector<std::uint64_t> seeds;
    for (auto g : generators) {
        if (g >= a.size()) {
            throw ValidationError("generator " + std::to_string(g) + " out of range");
        }
        seeds.push_back(g);
    }
    auto arities = a.signature().arities();
    auto members = close_under(arities, a.size(), seeds,
                               [&](std::size_t op, std::span<const std::uint64_t> args) -> std::uint64_t {
                                   return a.apply(op, args);
                               });
    std::vector<Element> out(members.begin(), members.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Element> subalgebra_generated(const FiniteAlgebra& a, std::initializer_list<Element> gens) {
    return subalgebra_generated(a, std::span<const Element>(gens.begin(), gens.size()));
}

/// True iff S is closed under every operation (and nonempty).
inline bool is_subuniverse(const FiniteAlgebra& a, std::span<const Element> s) {
    if (s.empty()) {
        return false;
    }
    std::vector<char> in(a.size(), 0);
    for (auto x : s) {
        in.at(x) = 1;
    }
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        bool closed = true;
        for_each_tuple<Element>(s.size(), a.arity(op), [&](std::span<const Element> idx) {
            if (!closed) {
                return;
            }
            std::vector<Element> args(idx.size());
            for (std::size_t p = 0; p < idx.size(); ++p) {
                args[p] = s[idx[p]];
            }
            closed = in[a.apply(op, std::span<const Element>(args))] != 0;
        });
        if (!closed) {
            return false;
        }
    }
    return true;
}

/// The algebra induced on a subuniverse; element i of the result is
/// carrier[i]. carrier must be sorted, duplicate-free and closed.
inline FiniteAlgebra induced_subalgebra(const FiniteAlgebra& a, std::span<const Element> carrier) {
    if (!std::is_sorted(carrier.begin(), carrier.end()) ||
        std::adjacent_find(carrier.begin(), carrier.end()) != carrier.end()) {
        throw ValidationError("carrier must be sorted without duplicates");
    }
    std::vector<std::int64_t> position(a.size(), -1);
    for (std::size_t i = 0; i < carrier.size(); ++i) {
        position.at(carrier[i]) = static_cast<std::int64_t>(i);
    }
    std::vector<std::vector<Element>> tables;
    std::vector<Element> args;
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        std::vector<Element> t;
        const std::size_t k = a.arity(op);
        args.resize(k);
        for_each_tuple<Element>(carrier.size(), k, [&](std::span<const Element> idx) {
            for (std::size_t p = 0; p < k; ++p) {
                args[p] = carrier[idx[p]];
            }
            auto r = position[a.apply(op, std::span<const Element>(args))];
            if (r < 0) {
                throw ValidationError("carrier is not closed under '" + a.signature()[op].name + "'");
            }
            t.push_back(static_cast<Element>(r));
        });
        tables.push_back(std::move(t));
    }
    return FiniteAlgebra::create(carrier.size(), a.signature(), std::move(tables));
}

/// Direct product. The pair (a, b) is element a*|B| + b.
inline FiniteAlgebra product(const FiniteAlgebra& a, const FiniteAlgebra& b) {
    require_same_signature(a, b);
    const std::size_t nb = b.size();
    const std::size_t n = a.size() * nb;
    std::vector<std::vector<Element>> tables;
    std::vector<Element> left, right;
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        const std::size_t k = a.arity(op);
        std::vector<Element> t;
        left.resize(k);
        right.resize(k);
        for_each_tuple<Element>(n, k, [&](std::span<const Element> args) {
            for (std::size_t p = 0; p < k; ++p) {
                left[p] = static_cast<Element>(args[p] / nb);
                right[p] = static_cast<Element>(args[p] % nb);
            }
            t.push_back(static_cast<Element>(a.apply(op, std::span<const Element>(left)) * nb +
                                             b.apply(op, std::span<const Element>(right))));
        });
        tables.push_back(std::move(t));
    }
    return FiniteAlgebra::create(n, a.signature(), std::move(tables));
}

} // namespace ualg

#endif
