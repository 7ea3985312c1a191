"""Built-in example objects: the demo corpus used by the CLI and tests.

All identifiers are plain strings so every object round-trips through the
JSON file formats unchanged.
"""

from __future__ import annotations

import cmath

import numpy as np

from .groupoid import (FiniteGroupoid, GroupoidMorphism, pair_id,
                       validate_groupoid)
from .actions import (Cocycle, GroupoidAction, coboundary_cocycle,
                      product_cocycle, pullback_cocycle)
from .extensions import GroupExtension, GroupTable, unit_root
from .graphs import DirectedGraph, GraphMorphism


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Full equivalence relation on n points; arrow (i,j) runs j -> i."""
    pts = [str(i + 1) for i in range(n)]
    arrows = [pair_id(i, j) for i in pts for j in pts]
    units = [pair_id(i, i) for i in pts]
    src = {pair_id(i, j): pair_id(j, j) for i in pts for j in pts}
    rng = {pair_id(i, j): pair_id(i, i) for i in pts for j in pts}
    inv = {pair_id(i, j): pair_id(j, i) for i in pts for j in pts}
    comp = {}
    for i in pts:
        for j in pts:
            for k in pts:
                comp[(pair_id(i, j), pair_id(j, k))] = pair_id(i, k)
    return validate_groupoid(arrows, units, src, rng, inv, comp)


def cyclic_groupoid(k: int) -> FiniteGroupoid:
    """The cyclic group of order k as a one-unit groupoid."""
    arrows = [f"g{a}" for a in range(k)]
    comp = {(f"g{a}", f"g{b}"): f"g{(a + b) % k}"
            for a in range(k) for b in range(k)}
    return validate_groupoid(arrows, ["g0"],
                             {g: "g0" for g in arrows},
                             {g: "g0" for g in arrows},
                             {f"g{a}": f"g{(-a) % k}" for a in range(k)},
                             comp)


def disjoint_union(parts) -> FiniteGroupoid:
    """Disjoint union of groupoids with prefixed arrow ids."""
    arrows, units = [], []
    src, rng, inv, comp = {}, {}, {}, {}
    for tag, G in parts:
        def name(g, tag=tag):
            return f"{tag}:{g}"
        arrows.extend(name(g) for g in G.arrows)
        units.extend(name(u) for u in G.units)
        for g in G.arrows:
            src[name(g)] = name(G.src[g])
            rng[name(g)] = name(G.rng[g])
            inv[name(g)] = name(G.inv[g])
        for (g1, g2), g12 in G.comp.items():
            comp[(name(g1), name(g2))] = name(g12)
    return validate_groupoid(arrows, units, src, rng, inv, comp)


def heisenberg_elements(n: int):
    """Upper triangular triples over Z_n with
    [a,b,c][a',b',c'] = [a+a', b+b', c+c'+ab']."""
    def el(a, b, c):
        return f"[{a},{b},{c}]"
    elements = [el(a, b, c)
                for a in range(n) for b in range(n) for c in range(n)]
    mul = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for a2 in range(n):
                    for b2 in range(n):
                        for c2 in range(n):
                            mul[(el(a, b, c), el(a2, b2, c2))] = \
                                el((a + a2) % n, (b + b2) % n,
                                   (c + c2 + a * b2) % n)
    return elements, mul, el(0, 0, 0)


def heisenberg_groupoid(n: int) -> FiniteGroupoid:
    elements, mul, unit = heisenberg_elements(n)
    return GroupTable(elements, mul).to_groupoid()


def zn_square_groupoid(n: int) -> FiniteGroupoid:
    """Z_n x Z_n as a one-unit groupoid with elements (a,b)."""
    def el(a, b):
        return f"({a},{b})"
    elements = [el(a, b) for a in range(n) for b in range(n)]
    mul = {(el(a, b), el(a2, b2)): el((a + a2) % n, (b + b2) % n)
           for a in range(n) for b in range(n)
           for a2 in range(n) for b2 in range(n)}
    return GroupTable(elements, mul).to_groupoid()


def heisenberg_quotient(n: int) -> GroupoidMorphism:
    """The morphism [a,b,c] -> (a,b) onto Z_n^2; kernel is the center."""
    dom = heisenberg_groupoid(n)
    cod = zn_square_groupoid(n)
    mapping = {}
    for g in dom.arrows:
        a, b, _ = g.strip("[]").split(",")
        mapping[g] = f"({a},{b})"
    return GroupoidMorphism(dom, cod, mapping)


def heisenberg_extension(n: int) -> GroupExtension:
    """The center extension with the canonical section (a,b) -> [a,b,0]."""
    elements, mul, _ = heisenberg_elements(n)
    kernel = [f"[0,0,{c}]" for c in range(n)]
    # default section picks the first coset element in element order,
    # which is [a,b,0] since c is the innermost enumeration index
    return GroupExtension.from_tables(elements, mul, kernel)


def heisenberg_cocycle_closed_form(n: int, k: int, a: int, bp: int) -> complex:
    """chi_k evaluated at a*b' in Z_n, the closed form the extension
    cocycle must reproduce exactly."""
    return unit_root((k * ((a * bp) % n)) % n, n)


def flip_action() -> GroupoidAction:
    """Z_2 = {e, t} swapping the two points of X = {x, y}."""
    H = cyclic_groupoid(2)  # arrows g0 (unit), g1
    points = ("x", "y")
    anchor = {"x": "g0", "y": "g0"}
    act = {("g0", "x"): "x", ("g0", "y"): "y",
           ("g1", "x"): "y", ("g1", "y"): "x"}
    return GroupoidAction(H, points, anchor, act)


def trivial_action(H: FiniteGroupoid) -> GroupoidAction:
    """H acting on its own unit space along src/rng."""
    points = tuple(H.units)
    anchor = {u: u for u in points}
    act = {(h, H.src[h]): H.rng[h] for h in H.arrows}
    return GroupoidAction(H, points, anchor, act)


def cuntz_graphs():
    """One-vertex graphs with edges {a, b, c} and {1, 2}; the morphism
    sends a, b to 1 and c to 2."""
    V = DirectedGraph(("v",), ("a", "b", "c"),
                      {"a": "v", "b": "v", "c": "v"},
                      {"a": "v", "b": "v", "c": "v"})
    W = DirectedGraph(("w",), ("1", "2"),
                      {"1": "w", "2": "w"}, {"1": "w", "2": "w"})
    phi = GraphMorphism(V, W, {"v": "w"}, {"a": "1", "b": "1", "c": "2"})
    return V, W, phi


def split_terminal_graphs():
    """Two-vertex cover of the one-loop graph whose length-one lifts split
    across terminals as sizes {2, 1}."""
    V = DirectedGraph(("p", "q"), ("x1", "x2", "y1"),
                      {"x1": "p", "x2": "p", "y1": "q"},
                      {"x1": "p", "x2": "q", "y1": "q"})
    W = DirectedGraph(("w",), ("1",), {"1": "w"}, {"1": "w"})
    phi = GraphMorphism(V, W, {"p": "w", "q": "w"},
                        {"x1": "1", "x2": "1", "y1": "1"})
    return V, W, phi


def graph_path_groupoid_morphism(phi: GraphMorphism, depth: int):
    """Finite-depth lag-zero path groupoids of both graphs and the induced
    surjective morphism between them (defined whenever both graphs have a
    single vertex or matching terminal structure)."""
    from .graphs import _path_id
    from .groupoid import _trusted

    def window_groupoid(graph):
        paths = [()]
        for _ in range(depth):
            paths = [p + (e,) for p in paths
                     for e in (graph.edges_from(graph.terminus[p[-1]])
                               if p else graph.edges)]
        arrows, units = [], []
        src, rng, inv, comp = {}, {}, {}, {}
        by_term = {}
        for p in paths:
            by_term.setdefault(graph.terminus[p[-1]], []).append(p)
        for term in sorted(by_term, key=repr):
            block = by_term[term]
            aid = {(p, q): pair_id(_path_id(p), _path_id(q))
                   for p in block for q in block}
            for p in block:
                units.append(aid[(p, p)])
            for p in block:
                for q in block:
                    g = aid[(p, q)]
                    arrows.append(g)
                    src[g] = aid[(q, q)]
                    rng[g] = aid[(p, p)]
                    inv[g] = aid[(q, p)]
            for p in block:
                for q in block:
                    for r in block:
                        comp[(aid[(p, q)], aid[(q, r)])] = aid[(p, r)]
        return _trusted(arrows, units, src, rng, inv, comp), paths

    GV, vpaths = window_groupoid(phi.domain)
    GW, _ = window_groupoid(phi.codomain)
    mapping = {}
    for p in vpaths:
        for q in vpaths:
            if phi.domain.terminus[p[-1]] != phi.domain.terminus[q[-1]]:
                continue
            fp = tuple(phi.emap[e] for e in p)
            fq = tuple(phi.emap[e] for e in q)
            mapping[pair_id(_path_id(p), _path_id(q))] = \
                pair_id(_path_id(fp), _path_id(fq))
    return GroupoidMorphism(GV, GW, mapping)


def nonsaturated_surjection() -> GroupoidMorphism:
    """Two disjoint copies of Z_2 mapping onto Z_2, one of them trivially:
    a surjective non-fibration whose bundle is not saturated."""
    dom = disjoint_union([("1", cyclic_groupoid(2)),
                          ("2", cyclic_groupoid(2))])
    cod = cyclic_groupoid(2)
    mapping = {"1:g0": "g0", "1:g1": "g1", "2:g0": "g0", "2:g1": "g0"}
    return GroupoidMorphism(dom, cod, mapping)


def identity_morphism(G: FiniteGroupoid) -> GroupoidMorphism:
    return GroupoidMorphism(G, G, {g: g for g in G.arrows})


def corrupted_z3_tables():
    """Z_3 tables with one composite redirected to the unit: fails
    associativity."""
    G = cyclic_groupoid(3)
    comp = dict(G.comp)
    comp[("g1", "g1")] = "g0"   # should be g2
    return (list(G.arrows), list(G.units), dict(G.src), dict(G.rng),
            dict(G.inv), comp)


def zn2_bilinear_cocycle(n: int) -> Cocycle:
    """omega((a,b), (a',b')) = zeta^{a b'} on the group Z_n^2; normalized
    and never a coboundary for n > 1."""
    G = zn_square_groupoid(n)

    def parse(g):
        a, b = g.strip("()").split(",")
        return int(a), int(b)
    table = {}
    for g1 in G.arrows:
        a, _ = parse(g1)
        for g2 in G.arrows:
            _, b2 = parse(g2)
            table[(g1, g2)] = unit_root(a * b2, n)
    return Cocycle(G, table)


def random_action(rng: np.random.Generator, max_arrows: int = 24,
                  max_points: int = 8) -> GroupoidAction:
    """A random action of a random groupoid (disjoint blocks of cyclic
    groups and pair groupoids) on a random finite set.

    Cyclic blocks act by a permutation whose order divides the block
    order; pair blocks act through a chart of bijections onto a common
    reference fiber, which makes functoriality automatic.
    """
    parts = []
    arrows_used = units_used = 0
    while True:
        if rng.random() < 0.5:
            k = int(rng.integers(2, 5))
            cost_arrows, cost_units = k, 1
            block = ("c", lambda: cyclic_groupoid(k))
        else:
            m = int(rng.integers(2, 4))
            cost_arrows, cost_units = m * m, m
            block = ("r", lambda: pair_groupoid(m))
        if parts and (arrows_used + cost_arrows > max_arrows
                      or units_used + cost_units > max_points):
            break
        kind, make = block
        parts.append((f"{kind}{len(parts)}", make()))
        arrows_used += cost_arrows
        units_used += cost_units
        if rng.random() < 0.35:
            break
    H = disjoint_union(parts)

    budget = max_points - units_used  # extra points beyond one per unit
    sizes = {}
    for tag, G in parts:
        n_units = len(G.units)
        room = budget // n_units
        extra = int(rng.integers(0, room + 1)) if room > 0 else 0
        sizes[tag] = 1 + extra
        budget -= extra * n_units

    points, anchor, act = [], {}, {}
    for tag, G in parts:
        size = sizes[tag]
        if tag.startswith("c"):
            k = len(G.arrows)
            sigma = list(range(size))
            positions = list(rng.permutation(size))
            divisors = [d for d in range(1, k + 1) if k % d == 0]
            pos = 0
            while pos < size:
                choices = [d for d in divisors if d <= size - pos]
                L = int(choices[rng.integers(len(choices))])
                cyc = positions[pos:pos + L]
                for idx in range(L):
                    sigma[cyc[idx]] = cyc[(idx + 1) % L]
                pos += L
            pts = [f"{tag}x{i}" for i in range(size)]
            u = f"{tag}:g0"
            for p in pts:
                anchor[p] = u
            image = list(range(size))
            for a_exp in range(k):
                for i in range(size):
                    act[(f"{tag}:g{a_exp}", pts[i])] = pts[image[i]]
                image = [sigma[i] for i in image]
            points.extend(pts)
        else:
            m = int(round(len(G.arrows) ** 0.5))
            labels = [str(i + 1) for i in range(m)]
            charts = {lab: list(rng.permutation(size)) for lab in labels}
            for lab in labels:
                u = f"{tag}:{pair_id(lab, lab)}"
                for i in range(size):
                    p = f"{tag}{lab}x{i}"
                    anchor[p] = u
                    points.append(p)
            for li in labels:
                inv_i = {r: pos for pos, r in enumerate(charts[li])}
                for lj in labels:
                    h = f"{tag}:{pair_id(li, lj)}"
                    for jpos in range(size):
                        target = inv_i[charts[lj][jpos]]
                        act[(h, f"{tag}{lj}x{jpos}")] = f"{tag}{li}x{target}"
    return GroupoidAction(H, tuple(points), anchor, act)


def random_cocycle(G: FiniteGroupoid, rng: np.random.Generator,
                   pi: GroupoidMorphism = None) -> Cocycle:
    """A random normalized cocycle: a random coboundary, optionally times
    a structured pullback when a morphism to a group block is available."""
    beta = {g: cmath.exp(2j * cmath.pi * float(rng.random()))
            for g in G.arrows}
    omega = coboundary_cocycle(G, beta)
    if pi is not None:
        codomain = pi.codomain
        # pull back a bilinear-style twist when the codomain is Z_n^2
        # shaped; otherwise just keep the coboundary
        try:
            n = int(round(len(codomain.arrows) ** 0.5))
            if f"({n - 1},{n - 1})" in codomain.index and n > 1:
                omega = product_cocycle(
                    omega, pullback_cocycle(pi, zn2_bilinear_cocycle(n)))
        except Exception:
            pass
    return omega


EXAMPLES = {
    "pair": lambda: pair_groupoid(2),
    "z3": lambda: cyclic_groupoid(3),
    "heis2": lambda: heisenberg_groupoid(2),
    "heis3": lambda: heisenberg_groupoid(3),
}


def data_path(name: str) -> str:
    """Absolute path of a shipped corpus data file."""
    import os
    return os.path.join(os.path.dirname(__file__), "data", name)
