"""Convolution *-algebras of finite groupoids.

The product is (f1 f2)(g) = sum over factorizations g = g1 g2 of
f1(g1) f2(g2); the involution is f*(g) = conj(f(inv(g))). The C*-norm is
the operator norm of the left regular representation, which acts block
per unit u on the span of the arrows with source u. For finite groupoids
this representation is faithful (the coefficient f(g) appears verbatim as
the matrix entry at (g, src(g))), so the operator norm is the unique
C*-norm of the finite-dimensional algebra.

Block-size invariants of such algebras (the complete isomorphism
invariant at this scale) are computed by :func:`wedderburn`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groupoid import FiniteGroupoid, NotASubgroupoid, subgroupoid


class BaseMismatch(ValueError):
    pass


class NumericalDegeneracy(RuntimeError):
    """Central eigenvalues kept colliding within tolerance after retries."""


class AlgebraElement:
    """A complex-valued function on the arrows of a fixed groupoid."""

    __slots__ = ("base", "coeffs")

    def __init__(self, base: FiniteGroupoid, coeffs):
        self.base = base
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (len(base.arrows),):
            raise ValueError(f"coefficient vector has shape {c.shape}, "
                             f"expected ({len(base.arrows)},)")
        self.coeffs = c

    @classmethod
    def zero(cls, base):
        return cls(base, np.zeros(len(base.arrows), dtype=complex))

    @classmethod
    def delta(cls, base, g, weight=1.0):
        c = np.zeros(len(base.arrows), dtype=complex)
        c[base.index[g]] = weight
        return cls(base, c)

    @classmethod
    def from_dict(cls, base, mapping):
        c = np.zeros(len(base.arrows), dtype=complex)
        for g, v in mapping.items():
            c[base.index[g]] = v
        return cls(base, c)

    def __getitem__(self, g):
        return self.coeffs[self.base.index[g]]

    def __add__(self, other):
        _same_base(self, other)
        return AlgebraElement(self.base, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_base(self, other)
        return AlgebraElement(self.base, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return AlgebraElement(self.base, self.coeffs * complex(other))

    def __rmul__(self, scalar):
        return AlgebraElement(self.base, self.coeffs * complex(scalar))

    def star(self):
        return involute(self)

    def norm(self):
        return cstar_norm(self.base, self)

    def __repr__(self):
        support = sum(1 for v in self.coeffs if abs(v) > 0)
        return f"AlgebraElement(support {support}/{len(self.coeffs)})"


def _same_base(f1, f2):
    if f1.base is not f2.base:
        raise BaseMismatch("elements live on different groupoids")


def convolve(f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
    _same_base(f1, f2)
    G = f1.base
    out = np.zeros(len(G.arrows), dtype=complex)
    a, b = f1.coeffs, f2.coeffs
    idx = G.index
    for (g1, g2), g12 in G.comp.items():
        out[idx[g12]] += a[idx[g1]] * b[idx[g2]]
    return AlgebraElement(G, out)


def involute(f: AlgebraElement) -> AlgebraElement:
    G = f.base
    out = np.zeros(len(G.arrows), dtype=complex)
    for g in G.arrows:
        out[G.index[f.base.inv[g]]] = np.conj(f.coeffs[G.index[g]])
    return AlgebraElement(G, out)


def random_element(G: FiniteGroupoid, rng: np.random.Generator) -> AlgebraElement:
    """Independent standard complex Gaussian coefficients."""
    n = len(G.arrows)
    return AlgebraElement(G, rng.standard_normal(n) + 1j * rng.standard_normal(n))


class RegularRepresentation:
    """Left regular representation, one block per unit.

    Block for unit u acts on the span of G_u = arrows with source u;
    the matrix of f has entry f(g * inv(h)) at (g, h), which is always
    composable for g, h in G_u.
    """

    def __init__(self, G: FiniteGroupoid):
        self.G = G
        self.blocks = [(u, G.arrows_from(u)) for u in G.units]
        # (row, col) -> arrow index feeding that entry, per block
        self._entry = []
        for u, basis in self.blocks:
            table = np.empty((len(basis), len(basis)), dtype=np.int64)
            for j, h in enumerate(basis):
                hi = G.inv[h]
                for i, g in enumerate(basis):
                    table[i, j] = G.index[G.comp[(g, hi)]]
            self._entry.append(table)

    def matrices(self, f: AlgebraElement) -> list:
        return [f.coeffs[table] for table in self._entry]

    def full_matrix(self, f: AlgebraElement) -> np.ndarray:
        return block_diag(self.matrices(f))

    def basis_matrices(self) -> list:
        """Full block-diagonal matrices of every delta, in arrow order."""
        n = sum(len(b) for _, b in self.blocks)
        mats = [np.zeros((n, n), dtype=complex) for _ in self.G.arrows]
        off = 0
        for (u, basis), table in zip(self.blocks, self._entry):
            m = len(basis)
            for i in range(m):
                for j in range(m):
                    mats[table[i, j]][off + i, off + j] = 1.0
            off += m
        return mats


def block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    off = 0
    for b in blocks:
        m = b.shape[0]
        out[off:off + m, off:off + m] = b
        off += m
    return out


def cstar_norm(G: FiniteGroupoid, f: AlgebraElement) -> float:
    """Operator norm: the largest singular value over the unit blocks."""
    rep = RegularRepresentation(G)
    return max((float(np.linalg.norm(M, 2)) for M in rep.matrices(f)),
               default=0.0)


def positivity_check(G: FiniteGroupoid, f: AlgebraElement,
                     tol: float = 1e-9) -> bool:
    """True iff every regular-representation block of the self-adjoint f
    has spectrum >= -tol * ||f||."""
    rep = RegularRepresentation(G)
    mats = rep.matrices(f)
    scale = max((float(np.linalg.norm(M, 2)) for M in mats), default=0.0)
    for M in mats:
        if M.size == 0:
            continue
        herm_defect = float(np.max(np.abs(M - M.conj().T)))
        if herm_defect > tol * max(scale, 1.0):
            raise ValueError(f"element is not self-adjoint "
                             f"(defect {herm_defect:.3e})")
        if float(np.min(np.linalg.eigvalsh(M))) < -tol * max(scale, 1.0):
            return False
    return True


def faithfulness_defect(G: FiniteGroupoid) -> int:
    """dim ker of f -> lambda(f); zero on every valid groupoid."""
    rep = RegularRepresentation(G)
    mats = rep.basis_matrices()
    stacked = np.stack([m.ravel() for m in mats])
    return len(G.arrows) - int(np.linalg.matrix_rank(stacked))


def conditional_expectation(G: FiniteGroupoid, K, f: AlgebraElement,
                            embed: bool = False):
    """Restrict coefficients to an open subgroupoid K with the same units.

    K may be a FiniteGroupoid (already a subgroupoid of G) or an arrow
    collection. Returns an element of K, or of G supported on K when
    ``embed`` is set.
    """
    if f.base is not G:
        raise BaseMismatch("element does not live on G")
    if isinstance(K, FiniteGroupoid):
        sub = K
        for g in sub.arrows:
            if g not in G.index:
                raise NotASubgroupoid(f"{g!r} is not an arrow of G", witness=g)
        if set(sub.units) != set(G.units):
            raise NotASubgroupoid("subgroupoid must keep the full unit space")
    else:
        sub = subgroupoid(G, K)
    if embed:
        keep = set(sub.arrows)
        out = np.array([f.coeffs[G.index[g]] if g in keep else 0.0
                        for g in G.arrows], dtype=complex)
        return AlgebraElement(G, out)
    out = np.array([f.coeffs[G.index[g]] for g in sub.arrows], dtype=complex)
    return AlgebraElement(sub, out)


@dataclass(frozen=True)
class WedderburnInvariants:
    """Matrix block sizes of a finite-dimensional C*-algebra, sorted
    descending; sum of squares equals the dimension and the number of
    blocks equals the center dimension."""
    blocks: tuple
    dimension: int
    center_dimension: int

    def as_dict(self) -> dict:
        return {"blocks": list(self.blocks), "dimension": self.dimension,
                "center_dimension": self.center_dimension}


def sparse_center_basis(dim: int, products: dict, tol: float = 1e-9) -> np.ndarray:
    """Nullspace of the commutator constraints for an algebra given by
    sparse structure constants products[(i, j)] = {k: coeff}.

    Returns an orthonormal (k x dim) array of center coefficient vectors.
    """
    rows = {}

    def row_for(j, k):
        key = (j, k)
        r = rows.get(key)
        if r is None:
            r = np.zeros(dim, dtype=complex)
            rows[key] = r
        return r

    for (a, b), expansion in products.items():
        for k, c in expansion.items():
            if c == 0:
                continue
            row_for(b, k)[a] += c   # x e_b term of [x, e_b]
            row_for(a, k)[b] -= c   # e_a x term of [x, e_a]
    if not rows:
        return np.eye(dim, dtype=complex)
    M = np.stack(list(rows.values()))
    u, s, vh = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    null_dim = dim - int(np.sum(s > tol * max(smax, 1.0)))
    if null_dim == 0:
        return np.zeros((0, dim), dtype=complex)
    return vh[dim - null_dim:].conj()


def _cluster(values: np.ndarray, thr: float) -> list:
    """Indices of sorted-value clusters split at gaps larger than thr."""
    order = np.argsort(values)
    clusters = [[order[0]]]
    for prev, cur in zip(order, order[1:]):
        if values[cur] - values[prev] > thr:
            clusters.append([])
        clusters[-1].append(cur)
    return clusters


def _compress_to_support(mats, products, tol):
    """Restrict a *-closed matrix family to the range of its algebra unit.

    A *-closed finite-dimensional matrix algebra always has a unit acting
    as the identity on its support, but that unit need not be the ambient
    identity matrix; the spectral-projection argument below requires the
    representation to be unital, so non-full supports are cut down first.
    The unit is solved from the structure constants (sum_i c_i e_i e_j =
    e_j for every j), which stays cheap for sparse tables.
    """
    r = len(mats)
    n = mats[0].shape[0]
    rows = {}
    for (i, j), expansion in products.items():
        for k2, c in expansion.items():
            # u e_j = e_j and e_i u = e_i, coefficientwise
            rows.setdefault(("L", j, k2), np.zeros(r, dtype=complex))[i] += c
            rows.setdefault(("R", i, k2), np.zeros(r, dtype=complex))[j] += c
    if not rows:
        raise ValueError("algebra has no products; cannot locate a unit")
    M = np.stack(list(rows.values()))
    target = np.array([1.0 if j == k2 else 0.0 for (_, j, k2) in rows],
                      dtype=complex)
    coeff, *_ = np.linalg.lstsq(M, target, rcond=None)
    if float(np.linalg.norm(M @ coeff - target)) > tol * max(1.0, len(rows)):
        raise ValueError("algebra has no unit element")
    E = np.zeros((n, n), dtype=complex)
    for i, c in enumerate(coeff):
        if c != 0:
            E += c * mats[i]
    if float(np.linalg.norm(E - np.eye(n))) <= tol * n:
        return list(mats)
    E = (E + E.conj().T) / 2.0
    evals, V = np.linalg.eigh(E)
    keep = V[:, evals > 0.5]
    if keep.shape[1] == 0:
        raise ValueError("algebra unit has empty support")
    return [keep.conj().T @ m @ keep for m in mats]


def wedderburn_from_tables(mats: Sequence[np.ndarray], products: dict,
                           *, seed: int = 0, tol: float = 1e-9,
                           retries: int = 5) -> WedderburnInvariants:
    """Block sizes of the *-closed algebra spanned by ``mats`` (a faithful
    *-representation of a basis with sparse structure constants).

    Minimal central projections are the spectral projections of a random
    Hermitian central element; the size of each block is read off from the
    eigenvalue multiplicities of a second random Hermitian element
    restricted to the projection (a block of size n contributes n distinct
    eigenvalues, each with the multiplicity of the block in the
    representation). Collisions trigger a retry with fresh randomness.
    """
    r = len(mats)
    if r == 0:
        return WedderburnInvariants((), 0, 0)
    mats = _compress_to_support(mats, products, tol)
    n = mats[0].shape[0]
    center = sparse_center_basis(r, products, tol=tol)
    k = center.shape[0]

    rng = np.random.default_rng(seed)
    last_error = "no attempt"
    for _ in range(retries):
        zc = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        coef = zc @ center
        Z = np.zeros((n, n), dtype=complex)
        for j, c in enumerate(coef):
            if c != 0:
                Z += c * mats[j]
        Z = (Z + Z.conj().T) / 2.0  # stays central: the center is *-closed
        evals, V = np.linalg.eigh(Z)
        spread = float(evals[-1] - evals[0]) if n > 1 else 0.0
        thr = max(spread, 1.0) * 1e-7
        clusters = _cluster(evals, thr)
        if len(clusters) != k:
            last_error = (f"{len(clusters)} central clusters for center "
                          f"dimension {k}")
            continue

        yc = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        Y = np.zeros((n, n), dtype=complex)
        for j, w in enumerate(yc):
            Y += w * mats[j]
        Y = (Y + Y.conj().T) / 2.0
        yscale = max(float(np.linalg.norm(Y, 2)), 1.0)

        sizes = []
        ok = True
        for cl in clusters:
            Vc = V[:, cl]
            Yc = Vc.conj().T @ Y @ Vc
            sub = np.linalg.eigvalsh(Yc)
            subclusters = _cluster(sub, yscale * 1e-7)
            mults = {len(c) for c in subclusters}
            if len(mults) != 1:
                ok = False
                last_error = "inconsistent eigenvalue multiplicities in block"
                break
            m = mults.pop()
            nblk = len(subclusters)
            if nblk * m != len(cl):
                ok = False
                last_error = "block size times multiplicity mismatch"
                break
            sizes.append(nblk)
        if not ok:
            continue
        if sum(s * s for s in sizes) != r:
            last_error = (f"sum of squared block sizes {sizes} != "
                          f"dimension {r}")
            continue
        blocks = tuple(sorted(sizes, reverse=True))
        return WedderburnInvariants(blocks, r, k)
    raise NumericalDegeneracy(f"wedderburn failed after {retries} retries: "
                              f"{last_error}")


def _closure_tables(mats, tol):
    """Close a matrix family under products; return (basis, products, star ok)."""
    n = mats[0].shape[0]
    basis = []
    vecs = []  # orthonormalized vectorizations for span tests

    def in_span(v):
        w = v.copy()
        for q in vecs:
            w -= (q.conj() @ w) * q
        return float(np.linalg.norm(w)) <= tol * max(1.0, float(np.linalg.norm(v))), w

    def add(mat):
        inside, w = in_span(mat.ravel())
        if inside:
            return False
        vecs.append(w / np.linalg.norm(w))
        basis.append(mat)
        return True

    for m in mats:
        add(np.asarray(m, dtype=complex))
    changed = True
    while changed:
        changed = False
        cur = list(basis)
        for a in cur:
            for b in cur:
                if add(a @ b):
                    changed = True
    r = len(basis)
    stacked = np.stack([b.ravel() for b in basis]).T
    pinv = np.linalg.pinv(stacked)
    products = {}
    for i in range(r):
        for j in range(r):
            coeff = pinv @ (basis[i] @ basis[j]).ravel()
            entry = {k: c for k, c in enumerate(coeff) if abs(c) > tol}
            products[(i, j)] = entry
    for i in range(r):  # require a *-closed span
        coeff = pinv @ basis[i].conj().T.ravel()
        if float(np.linalg.norm(stacked @ coeff - basis[i].conj().T.ravel())) \
                > tol * max(1.0, float(np.linalg.norm(basis[i]))):
            raise ValueError("matrix family does not span a *-closed algebra")
    return basis, products


def wedderburn(obj, *, seed: int = 0, tol: float = 1e-9,
               retries: int = 5) -> WedderburnInvariants:
    """Block-size invariants of C*_r(G) for a groupoid, or of the *-closed
    algebra generated by an explicit family of matrices."""
    if isinstance(obj, FiniteGroupoid):
        rep = RegularRepresentation(obj)
        mats = rep.basis_matrices()
        products = {}
        idx = obj.index
        for (g1, g2), g12 in obj.comp.items():
            products[(idx[g1], idx[g2])] = {idx[g12]: 1.0}
        return wedderburn_from_tables(mats, products, seed=seed, tol=tol,
                                      retries=retries)
    mats = [np.asarray(m, dtype=complex) for m in obj]
    if not mats:
        return WedderburnInvariants((), 0, 0)
    basis, products = _closure_tables(mats, tol)
    return wedderburn_from_tables(basis, products, seed=seed, tol=tol,
                                  retries=retries)
