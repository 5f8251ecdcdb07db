#!/usr/bin/env python3
"""Regenerates data/corpus.txt: small groups as permutation generators.

Groups given by a multiplication rule are written through their regular
representation. The script checks pairwise distinctness of the order-16
groups via a small invariant signature.
"""
import itertools
import sys


def compose(p, q):
    # (p*q)(x) = p(q(x))
    return tuple(p[q[i]] for i in range(len(q)))


def closure(gens, n):
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def cycles(p):
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        c = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            c.append(j)
            seen.add(j)
            j = p[j]
        out.append("(" + " ".join(map(str, c)) + ")")
    return "".join(out) if out else "()"


def regular(elements, mul, gens):
    idx = {e: i for i, e in enumerate(elements)}
    perms = []
    for g in gens:
        perms.append(tuple(idx[mul(g, e)] for e in elements))
    return len(elements), perms


def cyc(n):
    return (n, [tuple((i + 1) % n for i in range(n))])


def direct(*facs):
    deg = 0
    gens = []
    for n, ps in facs:
        for p in ps:
            full = list(range(sum(f[0] for f in facs)))
            for i in range(n):
                full[deg + i] = deg + p[i]
            gens.append(tuple(full))
        deg += n
    return deg, gens


def metacyclic(n, m, s, r):
    """<a,b | a^n = 1, b^m = a^s, b a b^-1 = a^r>; elements a^i b^j."""
    els = [(i, j) for j in range(m) for i in range(n)]

    def mul(x, y):
        i, j = x
        k, l = y
        a = (i + pow(r, j, n) * k) % n
        b = j + l
        if b >= m:
            b -= m
            a = (a + s) % n
        return (a, b)

    return regular(els, mul, [(1, 0), (0, 1)])


def dihedral(n):
    return metacyclic(n, 2, 0, n - 1)


def pauli():
    els = [(k, x, z) for k in range(4) for x in range(2) for z in range(2)]

    def mul(a, b):
        return ((a[0] + b[0] + 2 * a[2] * b[1]) % 4, a[1] ^ b[1], a[2] ^ b[2])

    return regular(els, mul, [(0, 1, 0), (0, 0, 1), (1, 0, 0)])


def g16_3():
    # (C4 x C2) x| C2 with c: a -> ab, b -> b
    els = [(i, b, c) for c in range(2) for b in range(2) for i in range(4)]

    def act(i, b):
        # image of a^i b^b under c
        return (i, (b + i) % 2)

    def mul(x, y):
        i, b, c = x
        k, l, d = y
        if c:
            k, l = act(k, l)
        return ((i + k) % 4, (b + l) % 2, (c + d) % 2)

    return regular(els, mul, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])


def sym(n):
    return n, [tuple((i + 1) % n for i in range(n)), tuple([1, 0] + list(range(2, n)))]


def alt4():
    return 4, [(1, 2, 0, 3), (1, 0, 3, 2)]


def alt5():
    return 5, [(1, 2, 3, 4, 0), (1, 2, 0, 3, 4)]


def sl23():
    # SL(2,3) acting on the 8 nonzero vectors of F_3^2
    vecs = [(x, y) for x in range(3) for y in range(3) if (x, y) != (0, 0)]
    idx = {v: i for i, v in enumerate(vecs)}

    def perm(M):
        return tuple(idx[((M[0][0] * v[0] + M[0][1] * v[1]) % 3, (M[1][0] * v[0] + M[1][1] * v[1]) % 3)] for v in vecs)

    return 8, [perm(((1, 1), (0, 1))), perm(((1, 0), (1, 1)))]


def gl23():
    vecs = [(x, y) for x in range(3) for y in range(3) if (x, y) != (0, 0)]
    idx = {v: i for i, v in enumerate(vecs)}

    def perm(M):
        return tuple(idx[((M[0][0] * v[0] + M[0][1] * v[1]) % 3, (M[1][0] * v[0] + M[1][1] * v[1]) % 3)] for v in vecs)

    return 8, [perm(((1, 1), (0, 1))), perm(((1, 0), (1, 1))), perm(((2, 0), (0, 1)))]


C = cyc
groups = [
    ("C1", (1, [])),
    ("C2", C(2)), ("C3", C(3)), ("C4", C(4)), ("C2xC2", direct(C(2), C(2))),
    ("C5", C(5)), ("C6", C(6)), ("S3", sym(3)), ("C7", C(7)),
    ("C8", C(8)), ("C4xC2", direct(C(4), C(2))), ("C2xC2xC2", direct(C(2), C(2), C(2))),
    ("D4", dihedral(4)), ("Q8", metacyclic(4, 2, 2, 3)),
    ("C9", C(9)), ("C3xC3", direct(C(3), C(3))),
    ("C10", C(10)), ("D5", dihedral(5)), ("C11", C(11)),
    ("C12", C(12)), ("C6xC2", direct(C(6), C(2))), ("A4", alt4()), ("D6", dihedral(6)),
    ("Dic3", metacyclic(3, 4, 0, 2)),
    ("C13", C(13)), ("C14", C(14)), ("D7", dihedral(7)), ("C15", C(15)),
    ("C16", C(16)), ("C4xC4", direct(C(4), C(4))), ("C8xC2", direct(C(8), C(2))),
    ("C4xC2xC2", direct(C(4), C(2), C(2))), ("C2^4", direct(C(2), C(2), C(2), C(2))),
    ("D8", dihedral(8)), ("Q16", metacyclic(8, 2, 4, 7)), ("SD16", metacyclic(8, 2, 0, 3)),
    ("M16", metacyclic(8, 2, 0, 5)), ("C4:C4", metacyclic(4, 4, 0, 3)),
    ("C2xD4", direct(C(2), dihedral(4))), ("C2xQ8", direct(C(2), metacyclic(4, 2, 2, 3))),
    ("C2^2:C4", g16_3()), ("Pauli", pauli()),
    ("S4", sym(4)), ("SL(2,3)", sl23()), ("D12", dihedral(12)), ("C2xA4", direct(C(2), alt4())),
    ("S3xS3", direct(sym(3), sym(3))), ("GL(2,3)", gl23()), ("C2xS4", direct(C(2), sym(4))),
    ("A5", alt5()),
]


ALIASES = {"C2xC2": "V4"}


def signature(els):
    els = list(els)
    n = len(els[0]) if els else 0
    ident = tuple(range(n))
    inv = {}
    for e in els:
        inv[e] = tuple(sorted(range(n), key=lambda i: e[i]))
    def order(e):
        k, x = 1, e
        while x != ident:
            x = compose(x, e); k += 1
        return k
    orders = tuple(sorted(order(e) for e in els))
    center = sum(1 for e in els if all(compose(e, f) == compose(f, e) for f in els))
    comm = closure([compose(compose(inv[a], inv[b]), compose(a, b)) for a in els for b in els], n)
    squares = len({compose(e, e) for e in els})
    return (len(els), orders, center, len(comm), squares)


def main():
    out = []
    sigs = {}
    for name, (deg, gens) in groups:
        els = closure(gens, deg) if deg > 0 else {()}
        if deg == 0:
            deg = 1
        sig = signature(els) if deg > 1 else (1,)
        if sig in sigs:
            sys.exit(f"signature clash: {name} vs {sigs[sig]}")
        sigs[sig] = name
        out.append(f"group {name}")
        if name in ALIASES:
            out.append(f"alias {ALIASES[name]}")
        out.append(f"degree {deg}")
        for g in gens:
            out.append(f"gen {cycles(g)}")
        out.append("end")
        print(f"{name}: order {len(els)}", file=sys.stderr)
    print("# Small groups by permutation generators (cycle notation, points 0-based).")
    print("\n".join(out))


if __name__ == "__main__":
    main()
