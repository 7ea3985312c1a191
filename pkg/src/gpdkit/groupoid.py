"""Finite groupoids as explicit arrow tables.

An arrow is an opaque hashable identifier. Units are themselves arrows
(identity arrows). A pair (g1, g2) is composable iff src(g1) == rng(g2),
and the composite g1*g2 then satisfies src(g1*g2) == src(g2) and
rng(g1*g2) == rng(g1): an arrow is a map src -> rng and composition is
function composition, rightmost factor first. This convention is fixed
here and every convolution formula in the package depends on it.

All topological conditions (openness, continuity, Haar systems) are
automatic for finite discrete groupoids; classification reports record
them as vacuously satisfied instead of dropping them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional

Arrow = Hashable


class GroupoidError(ValueError):
    """A groupoid table axiom failed; ``witness`` holds the offending arrows."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingComposite(GroupoidError):
    pass


class IllegalComposite(GroupoidError):
    pass


class AssociativityFailure(GroupoidError):
    pass


class UnitFailure(GroupoidError):
    pass


class InverseFailure(GroupoidError):
    pass


class NotAMorphism(GroupoidError):
    pass


class NotSurjective(GroupoidError):
    pass


class NotASubgroupoid(GroupoidError):
    pass


class NotABisection(GroupoidError):
    pass


def pair_id(a, b) -> str:
    """Canonical string id for a constructed pair arrow."""
    return f"({a},{b})"


class FiniteGroupoid:
    """Immutable finite groupoid given by total source/range/inverse tables
    and a composition table defined exactly on the composable pairs.

    Build instances through :func:`validate_groupoid` (exhaustive axiom
    check) or one of the corpus constructors; the raw constructor only
    indexes the tables.
    """

    __slots__ = ("arrows", "units", "src", "rng", "inv", "comp",
                 "index", "_from", "_to", "_unit_set")

    def __init__(self, arrows, units, src, rng, inv, comp):
        self.arrows = tuple(arrows)
        self.units = tuple(units)
        self.src = dict(src)
        self.rng = dict(rng)
        self.inv = dict(inv)
        self.comp = dict(comp)
        self.index = {g: i for i, g in enumerate(self.arrows)}
        self._unit_set = frozenset(self.units)
        by_src = {u: [] for u in self.units}
        by_rng = {u: [] for u in self.units}
        for g in self.arrows:
            by_src[self.src[g]].append(g)
            by_rng[self.rng[g]].append(g)
        self._from = {u: tuple(v) for u, v in by_src.items()}
        self._to = {u: tuple(v) for u, v in by_rng.items()}

    def __len__(self) -> int:
        return len(self.arrows)

    def __repr__(self) -> str:
        return f"FiniteGroupoid({len(self.arrows)} arrows, {len(self.units)} units)"

    def is_unit(self, g) -> bool:
        return g in self._unit_set

    def composable(self, g1, g2) -> bool:
        return self.src[g1] == self.rng[g2]

    def compose(self, g1, g2):
        try:
            return self.comp[(g1, g2)]
        except KeyError:
            raise MissingComposite(
                f"no composite recorded for composable pair ({g1!r}, {g2!r})",
                witness=(g1, g2)) from None

    def arrows_from(self, u) -> tuple:
        """Arrows g with src(g) == u."""
        return self._from[u]

    def arrows_to(self, u) -> tuple:
        """Arrows g with rng(g) == u."""
        return self._to[u]

    def composable_pairs(self) -> Iterable[tuple]:
        for g2 in self.arrows:
            for g1 in self._from[self.rng[g2]]:
                yield (g1, g2)

    def isotropy(self, u) -> tuple:
        """Arrows with src == rng == u."""
        return tuple(g for g in self._from[u] if self.rng[g] == u)


def validate_groupoid(arrows, units, src, rng, inv, comp) -> FiniteGroupoid:
    """Check every groupoid axiom exhaustively and return the groupoid.

    ``comp`` may be a mapping ``(g1, g2) -> g12`` or an iterable of
    ``(g1, g2, g12)`` triples; it must cover exactly the composable pairs.
    Raises MissingComposite, IllegalComposite, AssociativityFailure,
    UnitFailure or InverseFailure, each carrying the offending arrows.
    """
    arrows = tuple(arrows)
    arrow_set = set(arrows)
    if len(arrow_set) != len(arrows):
        raise GroupoidError("duplicate arrow identifiers")
    units = tuple(units)
    for u in units:
        if u not in arrow_set:
            raise UnitFailure(f"unit {u!r} is not a declared arrow", witness=u)
    if not isinstance(comp, Mapping):
        comp = {(g1, g2): g12 for g1, g2, g12 in comp}

    unit_set = set(units)
    for table, name in ((src, "src"), (rng, "rng"), (inv, "inv")):
        for g in arrows:
            if g not in table:
                raise GroupoidError(f"{name} is not total: missing {g!r}", witness=g)
            if table[g] not in arrow_set:
                raise GroupoidError(
                    f"{name}[{g!r}] = {table[g]!r} is not a declared arrow",
                    witness=g)
    for g in arrows:
        if src[g] not in unit_set:
            raise UnitFailure(f"src[{g!r}] = {src[g]!r} is not a unit", witness=g)
        if rng[g] not in unit_set:
            raise UnitFailure(f"rng[{g!r}] = {rng[g]!r} is not a unit", witness=g)

    # comp defined exactly on composable pairs, with matching src/rng laws
    for (g1, g2), g12 in comp.items():
        if g1 not in arrow_set or g2 not in arrow_set or g12 not in arrow_set:
            raise IllegalComposite(
                f"comp entry ({g1!r}, {g2!r}) -> {g12!r} uses undeclared arrows",
                witness=(g1, g2, g12))
        if src[g1] != rng[g2]:
            raise IllegalComposite(
                f"comp defined on non-composable pair ({g1!r}, {g2!r})",
                witness=(g1, g2))
        if src[g12] != src[g2] or rng[g12] != rng[g1]:
            raise IllegalComposite(
                f"composite {g12!r} of ({g1!r}, {g2!r}) has wrong source or range",
                witness=(g1, g2, g12))
    for g2 in arrows:
        for g1 in arrows:
            if src[g1] == rng[g2] and (g1, g2) not in comp:
                raise MissingComposite(
                    f"composable pair ({g1!r}, {g2!r}) missing from comp",
                    witness=(g1, g2))

    for u in units:
        if src[u] != u or rng[u] != u:
            raise UnitFailure(f"unit {u!r} has src/rng != itself", witness=u)
    for g in arrows:
        if comp[(rng[g], g)] != g:
            raise UnitFailure(
                f"left unit law fails: {rng[g]!r} * {g!r} != {g!r}",
                witness=(rng[g], g))
        if comp[(g, src[g])] != g:
            raise UnitFailure(
                f"right unit law fails: {g!r} * {src[g]!r} != {g!r}",
                witness=(g, src[g]))

    for g in arrows:
        gi = inv[g]
        if inv[gi] != g:
            raise InverseFailure(f"inv is not involutive at {g!r}", witness=g)
        if src[gi] != rng[g] or rng[gi] != src[g]:
            raise InverseFailure(f"inv[{g!r}] has wrong source or range", witness=g)
        if comp[(g, gi)] != rng[g]:
            raise InverseFailure(
                f"{g!r} * {gi!r} != rng({g!r})", witness=(g, gi))
        if comp[(gi, g)] != src[g]:
            raise InverseFailure(
                f"{gi!r} * {g!r} != src({g!r})", witness=(gi, g))

    # exhaustive associativity over composable triples
    by_src = {}
    for g in arrows:
        by_src.setdefault(src[g], []).append(g)
    by_rng = {}
    for g in arrows:
        by_rng.setdefault(rng[g], []).append(g)
    for g2 in arrows:
        lefts = by_src.get(rng[g2], ())
        rights = by_rng.get(src[g2], ())
        for g1 in lefts:
            g12 = comp[(g1, g2)]
            for g3 in rights:
                if comp[(g12, g3)] != comp[(g1, comp[(g2, g3)])]:
                    raise AssociativityFailure(
                        f"({g1!r}*{g2!r})*{g3!r} != {g1!r}*({g2!r}*{g3!r})",
                        witness=(g1, g2, g3))

    return FiniteGroupoid(arrows, units, src, rng, inv, comp)


def _trusted(arrows, units, src, rng, inv, comp) -> FiniteGroupoid:
    # fast path for constructions that are valid by construction
    return FiniteGroupoid(arrows, units, src, rng, inv, comp)


class GroupoidMorphism:
    """A map of arrow sets that is required to be functorial; check with
    :func:`check_morphism` / :func:`classify_morphism`."""

    __slots__ = ("domain", "codomain", "map")

    def __init__(self, domain: FiniteGroupoid, codomain: FiniteGroupoid, map):
        self.domain = domain
        self.codomain = codomain
        self.map = dict(map)

    def __call__(self, g):
        return self.map[g]

    def __repr__(self):
        return (f"GroupoidMorphism({len(self.domain.arrows)} -> "
                f"{len(self.codomain.arrows)} arrows)")


@dataclass(frozen=True)
class MorphismClassification:
    is_morphism: bool
    surjective: bool
    surjective_on_units: bool
    fibration: bool
    covering: bool
    witness: Optional[tuple] = None
    # openness and continuity have no content for finite discrete groupoids;
    # recorded so reports can surface rather than silently drop them
    openness_automatic: bool = True

    def as_dict(self) -> dict:
        return {
            "is_morphism": self.is_morphism,
            "surjective": self.surjective,
            "surjective_on_units": self.surjective_on_units,
            "fibration": self.fibration,
            "covering": self.covering,
            "witness": None if self.witness is None else repr(self.witness),
            "openness_automatic": self.openness_automatic,
        }


def check_morphism(pi: GroupoidMorphism):
    """Raise NotAMorphism (with witness) unless pi is functorial."""
    G, H = pi.domain, pi.codomain
    for g in G.arrows:
        if g not in pi.map:
            raise NotAMorphism(f"map not total: missing {g!r}", witness=g)
        if pi.map[g] not in H.index:
            raise NotAMorphism(
                f"map[{g!r}] = {pi.map[g]!r} not in codomain", witness=g)
    for g in G.arrows:
        h = pi.map[g]
        if H.src[h] != pi.map[G.src[g]] or H.rng[h] != pi.map[G.rng[g]]:
            raise NotAMorphism(
                f"map does not intertwine src/rng at {g!r}", witness=g)
    for (g1, g2), g12 in G.comp.items():
        if H.comp[(pi.map[g1], pi.map[g2])] != pi.map[g12]:
            raise NotAMorphism(
                f"map not multiplicative on ({g1!r}, {g2!r})", witness=(g1, g2))


def classify_morphism(pi: GroupoidMorphism) -> MorphismClassification:
    """Classify pi as morphism / surjective / fibration / covering.

    The fibration test searches, for every codomain arrow h and every
    domain unit x over src(h), for a lift g with src(g) == x; covering
    requires that lift to be unique. Exhaustive, with witness on failure.
    """
    G, H = pi.domain, pi.codomain
    try:
        check_morphism(pi)
    except NotAMorphism as exc:
        return MorphismClassification(False, False, False, False, False,
                                      witness=exc.witness)

    image = set(pi.map[g] for g in G.arrows)
    surjective = image == set(H.arrows)
    surj_units = set(pi.map[u] for u in G.units) == set(H.units)

    lift_exists = True
    lifts_unique = True
    witness = None
    for h in H.arrows:
        sh = H.src[h]
        for x in G.units:
            if pi.map[x] != sh:
                continue
            lifts = [g for g in G.arrows_from(x) if pi.map[g] == h]
            if not lifts:
                lift_exists = False
                if witness is None:
                    witness = (h, x)
            elif len(lifts) > 1:
                lifts_unique = False
                if witness is None:
                    witness = (h, x)
    # a fibration is a surjective morphism with the lift property; the fact
    # that lift property + unit surjectivity already forces arrow
    # surjectivity is recorded by the separate flags, not assumed here
    fibration = surjective and lift_exists
    covering = fibration and lifts_unique
    if not surjective and witness is None:
        missing = sorted((h for h in H.arrows if h not in image), key=repr)
        witness = (missing[0],) if missing else None
    return MorphismClassification(True, surjective, surj_units,
                                  fibration, covering, witness)


def subgroupoid(G: FiniteGroupoid, arrows, require_all_units=True) -> FiniteGroupoid:
    """Restrict G to a subset of arrows, checking closure under composition,
    inverse and units. With require_all_units the unit space stays G^0."""
    sub = set(arrows)
    for g in sub:
        if g not in G.index:
            raise NotASubgroupoid(f"{g!r} is not an arrow of G", witness=g)
        if G.inv[g] not in sub:
            raise NotASubgroupoid(f"not closed under inverse at {g!r}", witness=g)
        for u in (G.src[g], G.rng[g]):
            if u not in sub:
                raise NotASubgroupoid(
                    f"missing unit {u!r} of member arrow {g!r}", witness=g)
    units = [u for u in G.units if u in sub] if not require_all_units \
        else list(G.units)
    if require_all_units:
        missing = [u for u in G.units if u not in sub]
        if missing:
            raise NotASubgroupoid(
                f"subgroupoid must contain all units; missing {missing[0]!r}",
                witness=missing[0])
    comp = {}
    for (g1, g2), g12 in G.comp.items():
        if g1 in sub and g2 in sub:
            if g12 not in sub:
                raise NotASubgroupoid(
                    f"not closed under composition at ({g1!r}, {g2!r})",
                    witness=(g1, g2))
            comp[(g1, g2)] = g12
    ordered = tuple(g for g in G.arrows if g in sub)
    return _trusted(ordered, tuple(units),
                    {g: G.src[g] for g in ordered},
                    {g: G.rng[g] for g in ordered},
                    {g: G.inv[g] for g in ordered}, comp)


@dataclass(frozen=True)
class KernelDecomposition:
    """The kernel of a surjective morphism with its fiberwise partition.

    ``fibers[x]`` lists the arrows over the codomain unit x; amenability
    of the kernel is automatic at finite scale and recorded as such."""
    groupoid: FiniteGroupoid
    fibers: dict
    amenable: bool = True


def kernel(pi: GroupoidMorphism) -> KernelDecomposition:
    """Kernel K = preimage of the codomain units, as a validated subgroupoid
    of the domain, partitioned into the fibers over each codomain unit."""
    cls = classify_morphism(pi)
    if not cls.is_morphism:
        raise NotAMorphism("kernel of a non-morphism", witness=cls.witness)
    if not cls.surjective:
        raise NotSurjective("kernel requires a surjective morphism",
                            witness=cls.witness)
    G, H = pi.domain, pi.codomain
    unit_set = set(H.units)
    karrows = [g for g in G.arrows if pi.map[g] in unit_set]
    K = subgroupoid(G, karrows)
    fibers = {x: tuple(g for g in karrows if pi.map[g] == x) for x in H.units}
    return KernelDecomposition(K, fibers)


def fiber_subgroupoid(pi: GroupoidMorphism, x) -> FiniteGroupoid:
    """The arrows over a single codomain unit x, as a groupoid in its own
    right (units: the domain units mapping to x)."""
    G = pi.domain
    arrows = tuple(g for g in G.arrows if pi.map[g] == x)
    units = tuple(u for u in G.units if pi.map[u] == x)
    comp = {(g1, g2): g12 for (g1, g2), g12 in G.comp.items()
            if pi.map[g1] == x and pi.map[g2] == x}
    return _trusted(arrows, units,
                    {g: G.src[g] for g in arrows},
                    {g: G.rng[g] for g in arrows},
                    {g: G.inv[g] for g in arrows}, comp)


def isotropy_quotient(G: FiniteGroupoid):
    """The orbit equivalence relation R on the unit space with its pair
    groupoid structure, and the quotient morphism g -> (rng(g), src(g)).
    The kernel of the quotient is the isotropy bundle."""
    pairs = sorted({(G.rng[g], G.src[g]) for g in G.arrows},
                   key=lambda p: (G.index[p[0]], G.index[p[1]]))
    ids = {p: pair_id(*p) for p in pairs}
    arrows = tuple(ids[p] for p in pairs)
    units = tuple(ids[(u, u)] for u in G.units)
    src = {ids[(x, y)]: ids[(y, y)] for (x, y) in pairs}
    rng = {ids[(x, y)]: ids[(x, x)] for (x, y) in pairs}
    inv = {ids[(x, y)]: ids[(y, x)] for (x, y) in pairs}
    comp = {}
    for (x, y) in pairs:
        for (y2, z) in pairs:
            if y2 == y:
                comp[(ids[(x, y)], ids[(y2, z)])] = ids[(x, z)]
    R = _trusted(arrows, units, src, rng, inv, comp)
    pi = GroupoidMorphism(G, R, {g: ids[(G.rng[g], G.src[g])] for g in G.arrows})
    return R, pi


@dataclass(frozen=True)
class Bisection:
    """An arrow subset on which both src and rng are injective."""
    arrows: tuple


def check_bisection(G: FiniteGroupoid, S) -> Bisection:
    """Validate S as a bisection; NotABisection carries a colliding pair."""
    S = tuple(S)
    seen_src, seen_rng = {}, {}
    for g in S:
        if g not in G.index:
            raise NotABisection(f"{g!r} is not an arrow of G", witness=g)
        u = G.src[g]
        if u in seen_src:
            raise NotABisection(
                f"src collides on {seen_src[u]!r} and {g!r}",
                witness=(seen_src[u], g))
        seen_src[u] = g
        v = G.rng[g]
        if v in seen_rng:
            raise NotABisection(
                f"rng collides on {seen_rng[v]!r} and {g!r}",
                witness=(seen_rng[v], g))
        seen_rng[v] = g
    return Bisection(S)


def greedy_bisection_cover(G: FiniteGroupoid) -> list:
    """Cover all arrows by maximal bisections, greedily in arrow order.
    Singletons are bisections, so a cover always exists."""
    uncovered = set(G.arrows)
    cover = []
    while uncovered:
        used_src, used_rng, sel = set(), set(), []
        for g in G.arrows:  # seed with uncovered arrows first
            if g in uncovered and G.src[g] not in used_src \
                    and G.rng[g] not in used_rng:
                sel.append(g)
                used_src.add(G.src[g])
                used_rng.add(G.rng[g])
        for g in G.arrows:  # then extend to a maximal bisection
            if g not in sel and G.src[g] not in used_src \
                    and G.rng[g] not in used_rng:
                sel.append(g)
                used_src.add(G.src[g])
                used_rng.add(G.rng[g])
        bs = check_bisection(G, sel)
        cover.append(bs)
        uncovered.difference_update(sel)
    return cover
