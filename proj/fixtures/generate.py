#!/usr/bin/env python3
"""Regenerates the algebra fixture files in this directory."""
import itertools
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def table(n, arity, fn):
    return [fn(*args) for args in itertools.product(range(n), repeat=arity)]


def group(name, elements, mul, identity, inv, labels=None):
    n = len(elements)
    index = {e: i for i, e in enumerate(elements)}
    return {
        "name": name,
        "size": n,
        "elements": labels or [str(e) for e in elements],
        "ops": [
            {"name": "mul", "arity": 2,
             "table": table(n, 2, lambda a, b: index[mul(elements[a], elements[b])])},
            {"name": "inv", "arity": 1,
             "table": table(n, 1, lambda a: index[inv(elements[a])])},
            {"name": "e", "arity": 0, "table": [index[identity]]},
        ],
    }


def cyclic(n):
    return group(f"Z{n}", list(range(n)), lambda a, b: (a + b) % n, 0,
                 lambda a: (-a) % n)


def abelian(name, mods):
    elements = list(itertools.product(*[range(m) for m in mods]))
    return group(name, elements,
                 lambda a, b: tuple((x + y) % m for x, y, m in zip(a, b, mods)),
                 tuple(0 for _ in mods),
                 lambda a: tuple((-x) % m for x, m in zip(a, mods)))


def perm_group(name, gens, degree):
    identity = tuple(range(degree))
    compose = lambda p, q: tuple(p[q[i]] for i in range(degree))
    elements = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in elements:
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    elements = [identity] + sorted(e for e in elements if e != identity)
    inverse = lambda p: tuple(sorted(range(degree), key=lambda i: p[i]))
    return group(name, elements, compose, identity, inverse)


def quaternion():
    # elements (sign, unit) with unit in 1,i,j,k
    units = ["1", "i", "j", "k"]
    prod = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elements = [(s, u) for s in (1, -1) for u in units]

    def mul(a, b):
        s, u = prod[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    def inv(a):
        return a if a[1] == "1" else (-a[0], a[1])

    labels = [("" if s == 1 else "-") + u for s, u in elements]
    return group("Q8", elements, mul, (1, "1"), inv, labels)


def lattice(name, n, leq, bounded=False):
    def join(a, b):
        ub = [c for c in range(n) if leq(a, c) and leq(b, c)]
        return next(c for c in ub if all(leq(c, d) for d in ub))

    def meet(a, b):
        lb = [c for c in range(n) if leq(c, a) and leq(c, b)]
        return next(c for c in lb if all(leq(d, c) for d in lb))

    ops = [{"name": "join", "arity": 2, "table": table(n, 2, join)},
           {"name": "meet", "arity": 2, "table": table(n, 2, meet)}]
    if bounded:
        bottom = next(c for c in range(n) if all(leq(c, d) for d in range(n)))
        top = next(c for c in range(n) if all(leq(d, c) for d in range(n)))
        ops += [{"name": "bot", "arity": 0, "table": [bottom]},
                {"name": "top", "arity": 0, "table": [top]}]
    return {"name": name, "size": n, "ops": ops}


def order_from_covers(n, covers):
    rel = {(i, i) for i in range(n)} | set(covers)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return lambda a, b: (a, b) in rel


def chain(n):
    return lattice(f"chain{n}", n, lambda a, b: a <= b)


def main():
    fixtures = {
        "trivial": {"name": "trivial", "size": 1, "ops": []},
        "z2": cyclic(2),
        "z3": cyclic(3),
        "z4": cyclic(4),
        "klein4": abelian("Z2xZ2", [2, 2]),
        "z5": cyclic(5),
        "z6": cyclic(6),
        "s3": perm_group("S3", [(1, 0, 2), (1, 2, 0)], 3),
        "z7": cyclic(7),
        "z8": cyclic(8),
        "z4xz2": abelian("Z4xZ2", [4, 2]),
        "z2xz2xz2": abelian("Z2xZ2xZ2", [2, 2, 2]),
        "d4": perm_group("D4", [(1, 2, 3, 0), (0, 3, 2, 1)], 4),
        "q8": quaternion(),
        "chain2": chain(2),
        "chain3": chain(3),
        "bounded_chain2": lattice("bounded chain2", 2, lambda a, b: a <= b, bounded=True),
        "diamond": lattice("2x2", 4, order_from_covers(4, [(0, 1), (0, 2), (1, 3), (2, 3)])),
        "m3": lattice("M3", 5, order_from_covers(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])),
        "n5": lattice("N5", 5, order_from_covers(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])),
        "semilattice2": {"name": "2-element join-semilattice", "size": 2,
                         "ops": [{"name": "join", "arity": 2, "table": [0, 1, 1, 1]}]},
    }
    for key, value in fixtures.items():
        with open(os.path.join(HERE, f"{key}.alg.json"), "w") as out:
            json.dump(value, out, indent=1)
            out.write("\n")


if __name__ == "__main__":
    main()
