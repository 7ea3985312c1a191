"""JSON file formats for every object the CLI consumes or produces.

Structural problems (wrong types, missing keys, references to undeclared
identifiers) raise ParseError carrying the file, a JSON path and what was
expected there; semantic failures (axiom violations) are left to the
validators so the CLI can distinguish malformed input from verification
failure.

Where a format embeds another object (morphism domains, bundle bases),
the value may be either an inline object or a string path resolved
relative to the referring file.
"""

from __future__ import annotations

import json
import os
from typing import Optional

from .groupoid import FiniteGroupoid, GroupoidMorphism, validate_groupoid
from .actions import Cocycle, GroupoidAction
from .bundle import FellBundle
from .graphs import DirectedGraph, GraphMorphism


class ParseError(Exception):
    def __init__(self, file: Optional[str], path: str, expectation: str):
        self.file = file or "<inline>"
        self.path = path
        self.expectation = expectation
        super().__init__(f"{self.file}: at {path}: expected {expectation}")


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(path, "$", "a readable file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, "$", f"valid JSON ({exc.msg})") from None


def _expect(cond: bool, file, path: str, what: str):
    if not cond:
        raise ParseError(file, path, what)


def _resolve(source, base_dir, loader, file, path):
    """Inline object or relative path string."""
    if isinstance(source, str):
        full = source if os.path.isabs(source) else \
            os.path.join(base_dir or ".", source)
        return loader(full)
    if isinstance(source, dict):
        return loader(source, base_dir=base_dir, file=file, at=path)
    raise ParseError(file, path, "an object or a path string")


def _as_str_list(obj, file, path):
    _expect(isinstance(obj, list), file, path, "a list")
    out = []
    for i, v in enumerate(obj):
        _expect(isinstance(v, str), file, f"{path}[{i}]", "a string id")
        out.append(v)
    return out


def _as_str_map(obj, file, path, keys):
    _expect(isinstance(obj, dict), file, path, "an object")
    for k, v in obj.items():
        _expect(isinstance(v, str), file, f"{path}.{k}", "a string id")
    missing = [k for k in keys if k not in obj]
    _expect(not missing, file, path, f"an entry for {missing[0]!r}"
            if missing else "")
    return dict(obj)


def _as_complex(obj, file, path) -> complex:
    _expect(isinstance(obj, list) and len(obj) == 2
            and all(isinstance(v, (int, float)) for v in obj),
            file, path, "a [re, im] number pair")
    return complex(obj[0], obj[1])


def load_groupoid(source, base_dir=None, file=None, at="$") -> FiniteGroupoid:
    """Groupoid file: {"arrows": [...], "units": [...], "src": {},
    "rng": {}, "inv": {}, "comp": [[g1, g2, g12], ...]}. comp must list
    exactly the composable pairs; the axioms are checked exhaustively."""
    if isinstance(source, str):
        return load_groupoid(_read_json(source),
                             base_dir=os.path.dirname(source), file=source)
    obj = source
    _expect(isinstance(obj, dict), file, at, "a groupoid object")
    for key in ("arrows", "units", "src", "rng", "inv", "comp"):
        _expect(key in obj, file, at, f"key {key!r}")
    arrows = _as_str_list(obj["arrows"], file, f"{at}.arrows")
    arrow_set = set(arrows)
    units = _as_str_list(obj["units"], file, f"{at}.units")
    for i, u in enumerate(units):
        _expect(u in arrow_set, file, f"{at}.units[{i}]", "a declared arrow")
    tables = {}
    for name in ("src", "rng", "inv"):
        table = _as_str_map(obj[name], file, f"{at}.{name}", arrows)
        for k, v in table.items():
            _expect(k in arrow_set, file, f"{at}.{name}.{k}",
                    "a declared arrow key")
            _expect(v in arrow_set, file, f"{at}.{name}.{k}",
                    "a declared arrow value")
        tables[name] = table
    _expect(isinstance(obj["comp"], list), file, f"{at}.comp",
            "a list of [g1, g2, g12] triples")
    comp = {}
    for i, triple in enumerate(obj["comp"]):
        _expect(isinstance(triple, list) and len(triple) == 3
                and all(isinstance(v, str) for v in triple),
                file, f"{at}.comp[{i}]", "a [g1, g2, g12] string triple")
        g1, g2, g12 = triple
        for g in triple:
            _expect(g in arrow_set, file, f"{at}.comp[{i}]",
                    f"declared arrows (got {g!r})")
        _expect((g1, g2) not in comp, file, f"{at}.comp[{i}]",
                "no duplicate composable pair")
        comp[(g1, g2)] = g12
    return validate_groupoid(arrows, units, tables["src"], tables["rng"],
                             tables["inv"], comp)


def load_raw_groupoid_tables(source):
    """Parse a groupoid file structurally without running the validator;
    returns the validate_groupoid arguments."""
    if isinstance(source, str):
        obj = _read_json(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "a groupoid object")
    for key in ("arrows", "units", "src", "rng", "inv", "comp"):
        _expect(key in obj, file, "$", f"key {key!r}")
    arrows = _as_str_list(obj["arrows"], file, "$.arrows")
    units = _as_str_list(obj["units"], file, "$.units")
    src = _as_str_map(obj["src"], file, "$.src", arrows)
    rng = _as_str_map(obj["rng"], file, "$.rng", arrows)
    inv = _as_str_map(obj["inv"], file, "$.inv", arrows)
    comp = {}
    _expect(isinstance(obj["comp"], list), file, "$.comp", "a list")
    for i, triple in enumerate(obj["comp"]):
        _expect(isinstance(triple, list) and len(triple) == 3,
                file, f"$.comp[{i}]", "a [g1, g2, g12] triple")
        comp[(triple[0], triple[1])] = triple[2]
    return arrows, units, src, rng, inv, comp


def save_groupoid(G: FiniteGroupoid) -> dict:
    return {
        "arrows": list(G.arrows),
        "units": list(G.units),
        "src": {g: G.src[g] for g in G.arrows},
        "rng": {g: G.rng[g] for g in G.arrows},
        "inv": {g: G.inv[g] for g in G.arrows},
        "comp": [[g1, g2, g12] for (g1, g2), g12 in sorted(
            G.comp.items(), key=lambda kv: (G.index[kv[0][0]],
                                            G.index[kv[0][1]]))],
    }


def load_morphism(source, base_dir=None, file=None, at="$") -> GroupoidMorphism:
    """Morphism file: {"domain": <path|object>, "codomain": <path|object>,
    "map": {arrow: arrow}}."""
    if isinstance(source, str):
        return load_morphism(_read_json(source),
                             base_dir=os.path.dirname(source), file=source)
    obj = source
    _expect(isinstance(obj, dict), file, at, "a morphism object")
    for key in ("domain", "codomain", "map"):
        _expect(key in obj, file, at, f"key {key!r}")
    dom = _resolve(obj["domain"], base_dir, load_groupoid, file,
                   f"{at}.domain")
    cod = _resolve(obj["codomain"], base_dir, load_groupoid, file,
                   f"{at}.codomain")
    mapping = _as_str_map(obj["map"], file, f"{at}.map", dom.arrows)
    for k, v in mapping.items():
        _expect(k in dom.index, file, f"{at}.map.{k}", "a domain arrow")
        _expect(v in cod.index, file, f"{at}.map.{k}", "a codomain arrow")
    return GroupoidMorphism(dom, cod, mapping)


def save_morphism(pi: GroupoidMorphism, domain_ref=None, codomain_ref=None) -> dict:
    return {
        "domain": domain_ref or save_groupoid(pi.domain),
        "codomain": codomain_ref or save_groupoid(pi.codomain),
        "map": {g: pi.map[g] for g in pi.domain.arrows},
    }


def load_algebra_element(source, base_dir=None):
    """Element file: {"base": <path|object>, "coeffs": {arrow: [re, im]}}."""
    from .algebra import AlgebraElement
    if isinstance(source, str):
        obj = _read_json(source)
        base_dir = os.path.dirname(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "an element object")
    for key in ("base", "coeffs"):
        _expect(key in obj, file, "$", f"key {key!r}")
    base = _resolve(obj["base"], base_dir, load_groupoid, file, "$.base")
    _expect(isinstance(obj["coeffs"], dict), file, "$.coeffs", "an object")
    coeffs = {}
    for g, v in obj["coeffs"].items():
        _expect(g in base.index, file, f"$.coeffs.{g}", "a declared arrow")
        coeffs[g] = _as_complex(v, file, f"$.coeffs.{g}")
    return AlgebraElement.from_dict(base, coeffs), base


def load_bundle(source, base_dir=None) -> FellBundle:
    """Bundle file: {"base": <path|object>, "fibers": {h: [names]},
    "mul": [[h1, i, h2, j, {k: [re, im]}]], "star": [[h, i, {k: [re,im]}]]}."""
    if isinstance(source, str):
        obj = _read_json(source)
        base_dir = os.path.dirname(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "a bundle object")
    for key in ("base", "fibers", "mul", "star"):
        _expect(key in obj, file, "$", f"key {key!r}")
    base = _resolve(obj["base"], base_dir, load_groupoid, file, "$.base")
    _expect(isinstance(obj["fibers"], dict), file, "$.fibers", "an object")
    fibers = {}
    for h, names in obj["fibers"].items():
        _expect(h in base.index, file, f"$.fibers.{h}", "a base arrow")
        fibers[h] = tuple(_as_str_list(names, file, f"$.fibers.{h}"))
    for h in base.arrows:
        fibers.setdefault(h, ())

    def expansion(obj2, path, dim):
        _expect(isinstance(obj2, dict), file, path, "an object {k: [re,im]}")
        out = {}
        for k, v in obj2.items():
            _expect(k.isdigit() and int(k) < dim, file, f"{path}.{k}",
                    f"a basis index below {dim}")
            out[int(k)] = _as_complex(v, file, f"{path}.{k}")
        return out

    mul = {}
    _expect(isinstance(obj["mul"], list), file, "$.mul", "a list")
    for i, entry in enumerate(obj["mul"]):
        _expect(isinstance(entry, list) and len(entry) == 5,
                file, f"$.mul[{i}]", "[h1, i, h2, j, expansion]")
        h1, bi, h2, bj, exp = entry
        _expect(h1 in base.index and h2 in base.index, file, f"$.mul[{i}]",
                "base arrows")
        _expect(base.composable(h1, h2), file, f"$.mul[{i}]",
                "a composable pair of base arrows")
        _expect(isinstance(bi, int) and 0 <= bi < len(fibers[h1]),
                file, f"$.mul[{i}][1]", "a basis index of the first fiber")
        _expect(isinstance(bj, int) and 0 <= bj < len(fibers[h2]),
                file, f"$.mul[{i}][3]", "a basis index of the second fiber")
        h12 = base.compose(h1, h2)
        mul.setdefault((h1, h2), {})[(bi, bj)] = \
            expansion(exp, f"$.mul[{i}][4]", len(fibers[h12]))
    star = {}
    _expect(isinstance(obj["star"], list), file, "$.star", "a list")
    for i, entry in enumerate(obj["star"]):
        _expect(isinstance(entry, list) and len(entry) == 3,
                file, f"$.star[{i}]", "[h, i, expansion]")
        h, bi, exp = entry
        _expect(h in base.index, file, f"$.star[{i}][0]", "a base arrow")
        _expect(isinstance(bi, int) and 0 <= bi < len(fibers[h]),
                file, f"$.star[{i}][1]", "a basis index")
        star.setdefault(h, {})[bi] = \
            expansion(exp, f"$.star[{i}][2]", len(fibers[base.inv[h]]))
    return FellBundle(base, fibers, mul, star)


def save_bundle(E: FellBundle, base_ref=None) -> dict:
    base = E.base
    mul = []
    for (h1, h2) in sorted(E.mul, key=lambda p: (base.index[p[0]],
                                                 base.index[p[1]])):
        for (i, j) in sorted(E.mul[(h1, h2)]):
            exp = {str(k): [v.real, v.imag]
                   for k, v in sorted(E.mul[(h1, h2)][(i, j)].items())}
            mul.append([h1, i, h2, j, exp])
    star = []
    for h in base.arrows:
        for i in sorted(E.star.get(h, {})):
            exp = {str(k): [v.real, v.imag]
                   for k, v in sorted(E.star[h][i].items())}
            star.append([h, i, exp])
    return {
        "base": base_ref or save_groupoid(base),
        "fibers": {h: [str(x) for x in E.fibers[h]] for h in base.arrows},
        "mul": mul,
        "star": star,
    }


def load_graph(source, base_dir=None, file=None, at="$") -> DirectedGraph:
    """Graph file: {"vertices": [...],
    "edges": [{"id": e, "from": v, "to": v}]}."""
    if isinstance(source, str):
        return load_graph(_read_json(source),
                          base_dir=os.path.dirname(source), file=source)
    obj = source
    _expect(isinstance(obj, dict), file, at, "a graph object")
    for key in ("vertices", "edges"):
        _expect(key in obj, file, at, f"key {key!r}")
    vertices = _as_str_list(obj["vertices"], file, f"{at}.vertices")
    vset = set(vertices)
    _expect(isinstance(obj["edges"], list), file, f"{at}.edges", "a list")
    edges, origin, terminus = [], {}, {}
    for i, e in enumerate(obj["edges"]):
        _expect(isinstance(e, dict) and all(k in e for k in
                                            ("id", "from", "to")),
                file, f"{at}.edges[{i}]", '{"id", "from", "to"}')
        _expect(isinstance(e["id"], str), file, f"{at}.edges[{i}].id",
                "a string id")
        _expect(e["from"] in vset, file, f"{at}.edges[{i}].from",
                "a declared vertex")
        _expect(e["to"] in vset, file, f"{at}.edges[{i}].to",
                "a declared vertex")
        edges.append(e["id"])
        origin[e["id"]] = e["from"]
        terminus[e["id"]] = e["to"]
    return DirectedGraph(vertices, edges, origin, terminus)


def save_graph(g: DirectedGraph) -> dict:
    return {"vertices": list(g.vertices),
            "edges": [{"id": e, "from": g.origin[e], "to": g.terminus[e]}
                      for e in g.edges]}


def load_graph_morphism(source, base_dir=None) -> GraphMorphism:
    """Graph morphism file: {"domain": <path|object>,
    "codomain": <path|object>, "vmap": {}, "emap": {}}."""
    if isinstance(source, str):
        obj = _read_json(source)
        base_dir = os.path.dirname(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "a graph morphism object")
    for key in ("domain", "codomain", "vmap", "emap"):
        _expect(key in obj, file, "$", f"key {key!r}")
    dom = _resolve(obj["domain"], base_dir, load_graph, file, "$.domain")
    cod = _resolve(obj["codomain"], base_dir, load_graph, file, "$.codomain")
    vmap = _as_str_map(obj["vmap"], file, "$.vmap", dom.vertices)
    emap = _as_str_map(obj["emap"], file, "$.emap", dom.edges)
    for v, w in vmap.items():
        _expect(v in set(dom.vertices), file, f"$.vmap.{v}",
                "a domain vertex")
        _expect(w in set(cod.vertices), file, f"$.vmap.{v}",
                "a codomain vertex")
    for e, f2 in emap.items():
        _expect(e in set(dom.edges), file, f"$.emap.{e}", "a domain edge")
        _expect(f2 in set(cod.edges), file, f"$.emap.{e}", "a codomain edge")
    return GraphMorphism(dom, cod, vmap, emap)


def save_graph_morphism(phi: GraphMorphism) -> dict:
    return {"domain": save_graph(phi.domain),
            "codomain": save_graph(phi.codomain),
            "vmap": dict(phi.vmap), "emap": dict(phi.emap)}


def load_group(source, base_dir=None):
    """Group file: {"elements": [...], "mul": [[a, b, ab], ...],
    "kernel": [...]}; returns (elements, mul dict, kernel list)."""
    if isinstance(source, str):
        obj = _read_json(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "a group object")
    for key in ("elements", "mul"):
        _expect(key in obj, file, "$", f"key {key!r}")
    elements = _as_str_list(obj["elements"], file, "$.elements")
    eset = set(elements)
    _expect(isinstance(obj["mul"], list), file, "$.mul", "a list of triples")
    mul = {}
    for i, triple in enumerate(obj["mul"]):
        _expect(isinstance(triple, list) and len(triple) == 3
                and all(isinstance(v, str) for v in triple),
                file, f"$.mul[{i}]", "an [a, b, ab] string triple")
        for v in triple:
            _expect(v in eset, file, f"$.mul[{i}]",
                    f"declared elements (got {v!r})")
        mul[(triple[0], triple[1])] = triple[2]
    kernel = _as_str_list(obj.get("kernel", []), file, "$.kernel")
    for i, a in enumerate(kernel):
        _expect(a in eset, file, f"$.kernel[{i}]", "a declared element")
    return elements, mul, kernel


def save_group(elements, mul, kernel) -> dict:
    return {"elements": list(elements),
            "mul": [[a, b, mul[(a, b)]] for a in elements for b in elements],
            "kernel": list(kernel)}


def load_action(source, base_dir=None) -> GroupoidAction:
    """Action file: {"groupoid": <path|object>, "X": [...], "rho": {},
    "act": [[h, x, hx], ...]}."""
    if isinstance(source, str):
        obj = _read_json(source)
        base_dir = os.path.dirname(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "an action object")
    for key in ("groupoid", "X", "rho", "act"):
        _expect(key in obj, file, "$", f"key {key!r}")
    H = _resolve(obj["groupoid"], base_dir, load_groupoid, file, "$.groupoid")
    points = _as_str_list(obj["X"], file, "$.X")
    pset = set(points)
    rho = _as_str_map(obj["rho"], file, "$.rho", points)
    for x, u in rho.items():
        _expect(x in pset, file, f"$.rho.{x}", "a declared point")
        _expect(u in H.index, file, f"$.rho.{x}", "a groupoid arrow")
    _expect(isinstance(obj["act"], list), file, "$.act", "a list of triples")
    act = {}
    for i, triple in enumerate(obj["act"]):
        _expect(isinstance(triple, list) and len(triple) == 3
                and all(isinstance(v, str) for v in triple),
                file, f"$.act[{i}]", "an [h, x, hx] string triple")
        h, x, hx = triple
        _expect(h in H.index, file, f"$.act[{i}][0]", "a groupoid arrow")
        _expect(x in pset and hx in pset, file, f"$.act[{i}]",
                "declared points")
        act[(h, x)] = hx
    return GroupoidAction(H, points, rho, act)


def save_action(a: GroupoidAction, groupoid_ref=None) -> dict:
    return {
        "groupoid": groupoid_ref or save_groupoid(a.groupoid),
        "X": list(a.points),
        "rho": dict(a.anchor),
        "act": [[h, x, a.act[(h, x)]] for (h, x) in sorted(
            a.act, key=lambda hx: (a.groupoid.index[hx[0]],
                                   a.points.index(hx[1])))],
    }


def load_cocycle(source, groupoid: FiniteGroupoid = None, base_dir=None) -> Cocycle:
    """Cocycle file: {"groupoid": <path|object>,
    "omega": [[g1, g2, [re, im]], ...]}."""
    if isinstance(source, str):
        obj = _read_json(source)
        base_dir = os.path.dirname(source)
        file = source
    else:
        obj, file = source, None
    _expect(isinstance(obj, dict), file, "$", "a cocycle object")
    _expect("omega" in obj, file, "$", "key 'omega'")
    if groupoid is None:
        _expect("groupoid" in obj, file, "$", "key 'groupoid'")
        groupoid = _resolve(obj["groupoid"], base_dir, load_groupoid, file,
                            "$.groupoid")
    omega = {}
    _expect(isinstance(obj["omega"], list), file, "$.omega", "a list")
    for i, triple in enumerate(obj["omega"]):
        _expect(isinstance(triple, list) and len(triple) == 3,
                file, f"$.omega[{i}]", "a [g1, g2, [re, im]] triple")
        g1, g2, val = triple
        _expect(isinstance(g1, str) and g1 in groupoid.index,
                file, f"$.omega[{i}][0]", "a groupoid arrow")
        _expect(isinstance(g2, str) and g2 in groupoid.index,
                file, f"$.omega[{i}][1]", "a groupoid arrow")
        _expect(groupoid.composable(g1, g2), file, f"$.omega[{i}]",
                "a composable pair")
        omega[(g1, g2)] = _as_complex(val, file, f"$.omega[{i}][2]")
    return Cocycle(groupoid, omega)


def save_cocycle(om: Cocycle, groupoid_ref=None) -> dict:
    G = om.base
    return {
        "groupoid": groupoid_ref or save_groupoid(G),
        "omega": [[g1, g2, [v.real, v.imag]] for (g1, g2), v in sorted(
            om.omega.items(), key=lambda kv: (G.index[kv[0][0]],
                                              G.index[kv[0][1]]))],
    }
