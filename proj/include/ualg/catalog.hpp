#ifndef UALG_CATALOG_HPP
#define UALG_CATALOG_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "con_lattice.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "tuples.hpp"

namespace ualg {

inline constexpr std::size_t max_catalog_size = 8;

/// Lexicographically least concatenation of all operation tables over all
/// relabelings of the universe, and a relabeling (old -> new) achieving it.
struct CanonicalForm {
    std::vector<Element> tables;
    std::vector<Element> relabel;
};

namespace detail {

/// Visits every relabeling; `visit(inv, perm)` gets new -> old and old -> new.
template <class Visit>
void for_each_relabeling(std::size_t n, Visit&& visit) {
    std::vector<Element> inv(n);
    std::iota(inv.begin(), inv.end(), Element{0});
    std::vector<Element> perm(n);
    do {
        for (std::size_t i = 0; i < n; ++i) {
            perm[inv[i]] = static_cast<Element>(i);
        }
        if (!visit(inv, perm)) {
            return;
        }
    } while (std::next_permutation(inv.begin(), inv.end()));
}

/// Compares the relabeled tables against `best` entry by entry. Returns
/// -1 (smaller, and `out` holds the full relabeled tables), 0 or 1.
inline int compare_relabeled(const FiniteAlgebra& a, std::span<const Element> inv, std::span<const Element> perm,
                             std::span<const Element> best, std::vector<Element>& out) {
    const std::size_t n = a.size();
    std::size_t pos = 0;
    int cmp = 0;
    std::vector<Element> args;
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        const std::size_t k = a.arity(op);
        const auto table = a.table(op);
        const std::size_t len = table.size();
        args.assign(k, 0);
        for (std::size_t t = 0; t < len; ++t, ++pos) {
            std::size_t rest = t, old_index = 0, weight = 1;
            for (std::size_t i = k; i-- > 0;) {
                old_index += inv[rest % n] * weight;
                weight *= n;
                rest /= n;
            }
            const Element v = perm[table[old_index]];
            if (cmp == 0) {
                if (v > best[pos]) {
                    return 1;
                }
                if (v < best[pos]) {
                    cmp = -1;
                }
            }
            out[pos] = v;
        }
    }
    return cmp;
}

inline std::vector<Element> concatenated_tables(const FiniteAlgebra& a) {
    std::vector<Element> out;
    for (const auto& t : a.tables()) {
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

} // namespace detail

inline CanonicalForm canonical_form(const FiniteAlgebra& a) {
    if (a.size() > max_catalog_size) {
        throw ValidationError("canonical form is limited to " + std::to_string(max_catalog_size) + " elements");
    }
    CanonicalForm best{detail::concatenated_tables(a), a.universe()};
    std::vector<Element> scratch(best.tables.size());
    detail::for_each_relabeling(a.size(), [&](const auto& inv, const auto& perm) {
        if (detail::compare_relabeled(a, inv, perm, best.tables, scratch) < 0) {
            best.tables = scratch;
            best.relabel = perm;
        }
        return true;
    });
    return best;
}

/// True iff no relabeling gives a smaller table; stops at the first one.
inline bool is_canonical(const FiniteAlgebra& a) {
    const auto own = detail::concatenated_tables(a);
    std::vector<Element> scratch(own.size());
    bool canonical = true;
    detail::for_each_relabeling(a.size(), [&](const auto& inv, const auto& perm) {
        canonical = detail::compare_relabeled(a, inv, perm, own, scratch) >= 0;
        return canonical;
    });
    return canonical;
}

/// The algebra transported along a relabeling old -> new.
inline FiniteAlgebra relabel(const FiniteAlgebra& a, std::span<const Element> perm) {
    const std::size_t n = a.size();
    std::vector<Element> inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv[perm[i]] = static_cast<Element>(i);
    }
    std::vector<std::vector<Element>> tables;
    for (std::size_t op = 0; op < a.operation_count(); ++op) {
        const std::size_t k = a.arity(op);
        std::vector<Element> t(a.table(op).size());
        std::vector<Element> args(k);
        std::size_t idx = 0;
        for_each_tuple<Element>(n, k, [&](std::span<const Element> tuple) {
            for (std::size_t i = 0; i < k; ++i) {
                args[i] = inv[tuple[i]];
            }
            t[idx++] = perm[a.apply(op, std::span<const Element>(args))];
        });
        tables.push_back(std::move(t));
    }
    return FiniteAlgebra::create(n, a.signature(), std::move(tables));
}

inline bool isomorphic(const FiniteAlgebra& a, const FiniteAlgebra& b) {
    return a.size() == b.size() && a.signature() == b.signature() &&
           canonical_form(a).tables == canonical_form(b).tables;
}

/// 64-bit FNV-1a over the size and the canonical tables, each written as a
/// little-endian 32-bit word; rendered as 16 lowercase hex digits.
inline std::string canonical_digest(std::size_t size, std::span<const Element> canonical_tables) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::uint32_t w) {
        for (int i = 0; i < 4; ++i) {
            h ^= (w >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    feed(static_cast<std::uint32_t>(size));
    for (auto e : canonical_tables) {
        feed(e);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

enum class Provenance { enumerated, user_supplied };

inline const char* to_string(Provenance p) { return p == Provenance::enumerated ? "enumerated" : "user-supplied"; }

struct CatalogEntry {
    FiniteAlgebra algebra;
    std::vector<Element> canonical;
    Provenance provenance = Provenance::enumerated;

    std::string digest() const { return canonical_digest(algebra.size(), canonical); }
};

/// Pairwise non-isomorphic algebras, ordered by size and then canonical
/// form.
class Catalog {
public:
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const CatalogEntry& operator[](std::size_t i) const { return entries_.at(i); }
    const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }

    std::vector<FiniteAlgebra> algebras() const {
        std::vector<FiniteAlgebra> out;
        for (const auto& e : entries_) {
            out.push_back(e.algebra);
        }
        return out;
    }

    /// Adds `a` unless an isomorphic copy is present; returns whether added.
    bool add(const FiniteAlgebra& a, Provenance p = Provenance::user_supplied) {
        return insert({a, canonical_form(a).tables, p});
    }

    /// Entries with exactly n elements.
    std::size_t count_of_size(std::size_t n) const {
        return static_cast<std::size_t>(
            std::count_if(entries_.begin(), entries_.end(), [n](const auto& e) { return e.algebra.size() == n; }));
    }

    bool operator==(const Catalog& o) const {
        if (size() != o.size()) {
            return false;
        }
        for (std::size_t i = 0; i < size(); ++i) {
            if (!(entries_[i].algebra == o.entries_[i].algebra) || entries_[i].provenance != o.entries_[i].provenance) {
                return false;
            }
        }
        return true;
    }

    /// Same isomorphism classes in the same order, ignoring how each entry
    /// is labeled.
    bool equivalent(const Catalog& o) const {
        if (size() != o.size()) {
            return false;
        }
        for (std::size_t i = 0; i < size(); ++i) {
            if (entries_[i].canonical != o.entries_[i].canonical ||
                !(entries_[i].algebra.signature() == o.entries_[i].algebra.signature())) {
                return false;
            }
        }
        return true;
    }

    /// Entry with precomputed canonical form; false on an isomorphic copy.
    bool insert(CatalogEntry e) {
        auto key = std::make_pair(e.algebra.size(), e.canonical);
        auto pos = std::lower_bound(entries_.begin(), entries_.end(), key, [](const CatalogEntry& x, const auto& k) {
            return std::make_pair(x.algebra.size(), x.canonical) < k;
        });
        if (pos != entries_.end() && pos->algebra.size() == key.first && pos->canonical == key.second &&
            pos->algebra.signature() == e.algebra.signature()) {
            return false;
        }
        entries_.insert(pos, std::move(e));
        return true;
    }

private:
    std::vector<CatalogEntry> entries_;
};

namespace detail {

/// Builds the lattice algebra (join, meet) from an order on 0..n-1, or
/// nothing if the order is not a lattice.
inline std::optional<FiniteAlgebra> lattice_from_order(std::size_t n, const std::vector<char>& leq) {
    try {
        return FiniteLattice::from_order(n, leq).to_algebra();
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

inline void require_lattice_size(std::size_t max_size) {
    if (max_size > max_catalog_size) {
        throw ValidationError("lattice enumeration is limited to " + std::to_string(max_catalog_size) + " elements");
    }
}

} // namespace detail

/// All lattices with at most max_size elements, up to isomorphism, as
/// algebras (join, meet). Orders are enumerated with 0 the bottom, n-1 the
/// top and i < j whenever i is below j, then filtered for lattices.
inline Catalog gen_lattices(std::size_t max_size) {
    detail::require_lattice_size(max_size);
    Catalog cat;
    for (std::size_t n = 1; n <= max_size; ++n) {
        if (n <= 2) {
            std::vector<char> leq(n * n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    leq[i * n + j] = 1;
                }
            }
            cat.add(*detail::lattice_from_order(n, leq), Provenance::enumerated);
            continue;
        }
        // Free pairs (i, j), 1 <= i < j <= n-2, each related or not.
        std::vector<std::pair<std::size_t, std::size_t>> free;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j + 1 < n; ++j) {
                free.emplace_back(i, j);
            }
        }
        std::vector<char> leq(n * n);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
            std::fill(leq.begin(), leq.end(), 0);
            for (std::size_t i = 0; i < n; ++i) {
                leq[i * n + i] = 1;
                leq[0 * n + i] = 1;
                leq[i * n + (n - 1)] = 1;
            }
            for (std::size_t b = 0; b < free.size(); ++b) {
                if (bits >> b & 1) {
                    leq[free[b].first * n + free[b].second] = 1;
                }
            }
            bool transitive = true;
            for (std::size_t i = 0; i < n && transitive; ++i) {
                for (std::size_t j = 0; j < n && transitive; ++j) {
                    for (std::size_t k = 0; k < n && transitive; ++k) {
                        transitive = !(leq[i * n + j] && leq[j * n + k]) || leq[i * n + k];
                    }
                }
            }
            if (!transitive) {
                continue;
            }
            if (auto a = detail::lattice_from_order(n, leq)) {
                cat.add(*a, Provenance::enumerated);
            }
        }
    }
    return cat;
}

/// Second strategy: enumerate commutative, idempotent, associative meet
/// tables with 0 absorbing and n-1 neutral. A finite meet-semilattice
/// with a top element is a lattice.
inline Catalog gen_lattices_by_meet(std::size_t max_size) {
    detail::require_lattice_size(max_size);
    Catalog cat;
    for (std::size_t n = 1; n <= max_size; ++n) {
        std::vector<Element> m(n * n);
        auto set = [&](std::size_t i, std::size_t j, Element v) { m[i * n + j] = m[j * n + i] = v; };
        for (std::size_t i = 0; i < n; ++i) {
            set(i, i, static_cast<Element>(i));
            set(0, i, 0);
            set(n - 1, i, static_cast<Element>(i));
        }
        set(0, n - 1, 0);
        std::vector<std::pair<std::size_t, std::size_t>> free;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j + 1 < n; ++j) {
                free.emplace_back(i, j);
            }
        }
        std::vector<std::size_t> digit(free.size(), 0);
        while (true) {
            for (std::size_t b = 0; b < free.size(); ++b) {
                set(free[b].first, free[b].second, static_cast<Element>(digit[b]));
            }
            bool assoc = true;
            for (std::size_t x = 0; x < n && assoc; ++x) {
                for (std::size_t y = 0; y < n && assoc; ++y) {
                    for (std::size_t z = 0; z < n && assoc; ++z) {
                        assoc = m[m[x * n + y] * n + z] == m[x * n + m[y * n + z]];
                    }
                }
            }
            if (assoc) {
                std::vector<char> leq(n * n);
                for (std::size_t x = 0; x < n; ++x) {
                    for (std::size_t y = 0; y < n; ++y) {
                        leq[x * n + y] = m[x * n + y] == x;
                    }
                }
                if (auto a = detail::lattice_from_order(n, leq)) {
                    cat.add(*a, Provenance::enumerated);
                }
            }
            std::size_t b = 0;
            while (b < digit.size() && ++digit[b] == n) {
                digit[b++] = 0;
            }
            if (b == digit.size()) {
                break;
            }
        }
    }
    return cat;
}

/// Default guard on the number of raw table tuples gen_algebras may scan.
inline constexpr std::uint64_t default_table_budget = std::uint64_t{1} << 24;

using AlgebraFilter = std::function<bool(const FiniteAlgebra&)>;

namespace filters {

inline AlgebraFilter any() {
    return [](const FiniteAlgebra&) { return true; };
}

/// f(x, ..., x) = x for every operation.
inline AlgebraFilter idempotent() {
    return [](const FiniteAlgebra& a) {
        for (std::size_t op = 0; op < a.operation_count(); ++op) {
            std::vector<Element> args(a.arity(op));
            for (Element x = 0; x < a.size(); ++x) {
                std::fill(args.begin(), args.end(), x);
                if (a.apply(op, std::span<const Element>(args)) != x) {
                    return false;
                }
            }
        }
        return true;
    };
}

/// Exactly two congruences.
inline AlgebraFilter simple() {
    return [](const FiniteAlgebra& a) { return a.size() > 1 && con_lattice(a).size() == 2; };
}

/// Every operation is binary, associative, commutative and idempotent.
inline AlgebraFilter semilattice() {
    return [](const FiniteAlgebra& a) {
        const std::size_t n = a.size();
        for (std::size_t op = 0; op < a.operation_count(); ++op) {
            if (a.arity(op) != 2) {
                return false;
            }
            auto f = [&](Element x, Element y) { return a.apply(op, {x, y}); };
            for (Element x = 0; x < n; ++x) {
                if (f(x, x) != x) {
                    return false;
                }
                for (Element y = 0; y < n; ++y) {
                    if (f(x, y) != f(y, x)) {
                        return false;
                    }
                    for (Element z = 0; z < n; ++z) {
                        if (f(f(x, y), z) != f(x, f(y, z))) {
                            return false;
                        }
                    }
                }
            }
        }
        return true;
    };
}

/// Con A isomorphic to the given lattice.
inline AlgebraFilter con_isomorphic_to(FiniteLattice target) {
    return [target = std::move(target)](const FiniteAlgebra& a) {
        return lattices_isomorphic(con_lattice(a).lattice(), target);
    };
}

} // namespace filters

/// Every algebra of the signature with at most max_size elements, up to
/// isomorphism, that passes the filter. Tables are scanned in odometer
/// order and kept only when already in canonical form. Throws CapExceeded
/// when a size would need more than `budget` raw tables.
inline Catalog gen_algebras(const Signature& sig, std::size_t max_size, const AlgebraFilter& filter = filters::any(),
                            std::uint64_t budget = default_table_budget) {
    if (max_size > max_catalog_size) {
        throw ValidationError("algebra enumeration is limited to " + std::to_string(max_catalog_size) + " elements");
    }
    Catalog cat;
    for (std::size_t n = 1; n <= max_size; ++n) {
        std::size_t cells = 0;
        for (const auto& op : sig.operations()) {
            auto len = checked_power(n, op.arity);
            if (!len || *len > budget) {
                throw CapExceeded("table space for size " + std::to_string(n), budget);
            }
            cells += *len;
        }
        double space = 1;
        for (std::size_t c = 0; c < cells; ++c) {
            space *= static_cast<double>(n);
            if (space > static_cast<double>(budget)) {
                throw CapExceeded("table space for size " + std::to_string(n), budget);
            }
        }
        std::vector<Element> flat(cells, 0);
        while (true) {
            std::vector<std::vector<Element>> tables;
            std::size_t pos = 0;
            for (const auto& op : sig.operations()) {
                const std::size_t len = *checked_power(n, op.arity);
                tables.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                                    flat.begin() + static_cast<std::ptrdiff_t>(pos + len));
                pos += len;
            }
            auto a = FiniteAlgebra::create(n, sig, std::move(tables));
            if (is_canonical(a) && filter(a)) {
                cat.insert({a, flat, Provenance::enumerated});
            }
            std::size_t c = cells;
            while (c > 0 && ++flat[c - 1] == n) {
                flat[--c] = 0;
            }
            if (c == 0) {
                break;
            }
        }
    }
    return cat;
}

inline std::string catalog_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu.alg.json", i);
    return buf;
}

/// index.json lists every entry with its file, size, digest and
/// provenance; each entry is stored as NNNN.alg.json.
inline void save(const Catalog& cat, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json entries = json::array();
    for (std::size_t i = 0; i < cat.size(); ++i) {
        const auto& e = cat[i];
        const auto file = catalog_file_name(i);
        write_text_file(dir / file, to_json(e.algebra).dump(1) + "\n");
        entries.push_back({{"file", file},
                           {"size", e.algebra.size()},
                           {"digest", e.digest()},
                           {"provenance", to_string(e.provenance)}});
    }
    json index{{"count", cat.size()}, {"entries", std::move(entries)}};
    write_text_file(dir / "index.json", index.dump(1) + "\n");
}

/// Reads a saved catalog, recomputing each canonical digest. An empty
/// directory is an empty catalog.
inline Catalog load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ValidationError("catalog directory " + dir.string() + " does not exist");
    }
    Catalog cat;
    if (!std::filesystem::exists(dir / "index.json")) {
        if (std::filesystem::directory_iterator(dir) == std::filesystem::directory_iterator{}) {
            return cat;
        }
        throw ValidationError("catalog directory " + dir.string() + " has no index.json");
    }
    const json index = read_json_file(dir / "index.json");
    try {
        const auto& entries = index.at("entries");
        if (index.at("count").get<std::size_t>() != entries.size()) {
            throw ValidationError("index.json: count does not match the entry list");
        }
        for (const auto& e : entries) {
            const auto file = e.at("file").get<std::string>();
            auto a = load_algebra(dir / file);
            if (a.size() != e.at("size").get<std::size_t>()) {
                throw ValidationError(file + ": size does not match index.json");
            }
            auto canon = canonical_form(a).tables;
            CatalogEntry entry{a, canon,
                               e.at("provenance").get<std::string>() == "enumerated" ? Provenance::enumerated
                                                                                   : Provenance::user_supplied};
            if (entry.digest() != e.at("digest").get<std::string>()) {
                throw ValidationError(file + ": digest mismatch");
            }
            if (!cat.insert(std::move(entry))) {
                throw ValidationError(file + ": isomorphic to an earlier entry");
            }
        }
    } catch (const json::exception& ex) {
        throw ValidationError(std::string("malformed index.json: ") + ex.what());
    }
    return cat;
}

} // namespace ualg

#endif
