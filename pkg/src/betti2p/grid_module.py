"""Finitely presented 2-parameter persistence modules on a bounding box.

A :class:`GridModule` stores vector-space dimensions and edge matrices for
grades ``0 <= x <= s1``, ``0 <= y <= s2``.  Outside the box it is extended
by zero below the axes and constantly (clamping each coordinate into the box)
beyond it, so every edge leaving the box is an identity.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .exact_linalg import DenseMatrix, PrimeField, block_diag, is_invertible, solve_matrix


class Grade(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return Grade(self[0] + other[0], self[1] + other[1])

    def __sub__(self, other):
        return Grade(self[0] - other[0], self[1] - other[1])

    def __str__(self):
        return f"({self.x},{self.y})"


E1 = Grade(1, 0)
E2 = Grade(0, 1)
E12 = Grade(1, 1)


def leq(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Coordinatewise partial order."""
    return a[0] <= b[0] and a[1] <= b[1]


class ModuleError(ValueError):
    pass


class SearchCapExceeded(RuntimeError):
    """The isomorphism search visited more candidates than allowed."""


class GradeMultiset:
    """Finite multiset of grades, iterated in lexicographic order."""

    __slots__ = ("_counts",)

    def __init__(self, items: Mapping[tuple[int, int], int] | Iterable[tuple[int, int]] | None = None):
        counts: Counter = Counter()
        if items is None:
            pass
        elif isinstance(items, Mapping):
            for g, k in items.items():
                if k < 0:
                    raise ValueError(f"negative multiplicity at {g}")
                counts[Grade(*g)] += int(k)
        else:
            for g in items:
                counts[Grade(*g)] += 1
        self._counts = {g: k for g, k in sorted(counts.items()) if k > 0}

    def __getitem__(self, g) -> int:
        return self._counts.get(Grade(*g), 0)

    def multiplicity(self, g) -> int:
        return self[g]

    def items(self) -> list[tuple[Grade, int]]:
        return list(self._counts.items())

    def support(self) -> list[Grade]:
        return list(self._counts)

    def elements(self) -> list[Grade]:
        """Grades repeated by multiplicity, in canonical order."""
        return [g for g, k in self._counts.items() for _ in range(k)]

    def total(self) -> int:
        return sum(self._counts.values())

    def __len__(self):
        return self.total()

    def __bool__(self):
        return bool(self._counts)

    def __iter__(self) -> Iterator[Grade]:
        return iter(self.elements())

    def __add__(self, other: GradeMultiset) -> GradeMultiset:
        c = Counter(self._counts)
        c.update(other._counts)
        return GradeMultiset(c)

    def __eq__(self, other):
        if isinstance(other, GradeMultiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._counts.items()))

    def __repr__(self):
        return "GradeMultiset({" + ", ".join(f"({g.x},{g.y}):{k}" for g, k in self._counts.items()) + "})"

    def __str__(self):
        if not self._counts:
            return "{}"
        return "{" + ", ".join(f"({g.x},{g.y}):{k}" for g, k in self._counts.items()) + "}"

    def to_list(self) -> list[list[int]]:
        return [[g.x, g.y, k] for g, k in self._counts.items()]


@dataclass(frozen=True)
class BettiTable:
    """Bigraded Betti numbers beta_0, beta_1, beta_2 as grade multisets."""

    beta: tuple[GradeMultiset, GradeMultiset, GradeMultiset]

    def __getitem__(self, j: int) -> GradeMultiset:
        if j > 2:
            return GradeMultiset()
        return self.beta[j]

    def value(self, j: int, g) -> int:
        return self[j][g]


@dataclass(frozen=True, eq=False)
class GridModule:
    """A 2-parameter persistence module given on the box [0,s1] x [0,s2].

    ``dims`` maps every box grade to its dimension.  ``hmaps[(x, y)]`` is the
    matrix of M_(x,y) -> M_(x+1,y) for ``x < s1``; ``vmaps[(x, y)]`` is
    M_(x,y) -> M_(x,y+1) for ``y < s2``.
    """

    field: PrimeField
    box: tuple[int, int]
    dims: dict = dc_field(repr=False)
    hmaps: dict = dc_field(repr=False)
    vmaps: dict = dc_field(repr=False)

    @classmethod
    def build(cls, field: PrimeField, box: tuple[int, int], dims: Mapping, hmaps: Mapping | None = None,
              vmaps: Mapping | None = None) -> GridModule:
        """Normalize partial data: missing dims are 0, missing maps are zero matrices.

        Map entries may be DenseMatrix or nested lists; shapes are not checked
        here (see :func:`validate`).
        """
        s1, s2 = box
        if s1 < 0 or s2 < 0:
            raise ModuleError(f"invalid box {box}")
        d = {}
        for g, k in dims.items():
            g = Grade(*g)
            if not (0 <= g.x <= s1 and 0 <= g.y <= s2):
                raise ModuleError(f"grade {g} outside box {box}")
            d[g] = int(k)
        d = {g: d.get(g, 0) for g in box_grades(box)}

        def norm(maps, step):
            out = {}
            maps = {Grade(*g): m for g, m in (maps or {}).items()}
            for g, m in maps.items():
                if g not in d or g + step not in d:
                    raise ModuleError(f"edge at {g} leaves box {box}")
            for g in d:
                t = g + step
                if t not in d:
                    continue
                m = maps.get(g)
                if m is None:
                    m = DenseMatrix.zeros(d[t], d[g], field)
                elif not isinstance(m, DenseMatrix):
                    arr = np.asarray(m, dtype=np.int64)
                    if arr.size == 0:
                        arr = np.zeros((d[t], d[g]), dtype=np.int64)
                    m = DenseMatrix(arr, field)
                out[g] = m
            return out

        return cls(field, (int(s1), int(s2)), d, norm(hmaps, E1), norm(vmaps, E2))

    def __eq__(self, other):
        """Equality of presentations (same box and identical matrices), not isomorphism."""
        if not isinstance(other, GridModule):
            return NotImplemented
        return (self.field == other.field and self.box == other.box and self.dims == other.dims
                and self.hmaps == other.hmaps and self.vmaps == other.vmaps)

    __hash__ = None

    def grades(self) -> list[Grade]:
        return box_grades(self.box)

    def dimension_vector(self) -> dict:
        return dict(self.dims)

    def clamp(self, g) -> Grade:
        return Grade(min(g[0], self.box[0]), min(g[1], self.box[1]))

    def dim(self, g) -> int:
        return space_dim(self, g)

    def hmap(self, g) -> DenseMatrix:
        """Edge map M_g -> M_(g+e1) anywhere in Z^2."""
        return _edge(self, Grade(*g), 0)

    def vmap(self, g) -> DenseMatrix:
        """Edge map M_g -> M_(g+e2) anywhere in Z^2."""
        return _edge(self, Grade(*g), 1)

    def map(self, a, b) -> DenseMatrix:
        return map_matrix(self, a, b)


def box_grades(box: tuple[int, int]) -> list[Grade]:
    return [Grade(x, y) for x in range(box[0] + 1) for y in range(box[1] + 1)]


def _edge(m: GridModule, g: Grade, axis: int) -> DenseMatrix:
    step = E1 if axis == 0 else E2
    t = g + step
    dg, dt = space_dim(m, g), space_dim(m, t)
    if g.x < 0 or g.y < 0:
        return DenseMatrix.zeros(dt, 0, m.field)
    c = m.clamp(g)
    if g[axis] >= m.box[axis]:
        return DenseMatrix.identity(dg, m.field)
    return (m.hmaps if axis == 0 else m.vmaps)[c]


def space_dim(m: GridModule, g) -> int:
    """dim M_g with zero extension below the axes and clamping beyond the box."""
    if g[0] < 0 or g[1] < 0:
        return 0
    return m.dims[m.clamp(g)]


def map_matrix(m: GridModule, a, b) -> DenseMatrix:
    """The structure map M_a -> M_b for a <= b (horizontal steps first)."""
    a, b = Grade(*a), Grade(*b)
    if not leq(a, b):
        raise ModuleError(f"{a} is not <= {b}")
    db = space_dim(m, b)
    if a.x < 0 or a.y < 0:
        return DenseMatrix.zeros(db, 0, m.field)
    a, b = m.clamp(a), m.clamp(b)
    out = DenseMatrix.identity(m.dims[a], m.field)
    g = a
    while g.x < b.x:
        out = m.hmaps[g] @ out
        g = g + E1
    while g.y < b.y:
        out = m.vmaps[g] @ out
        g = g + E2
    return out


def map_along_path(m: GridModule, a, steps: str) -> DenseMatrix:
    """Compose edge maps along an explicit path of 'h'/'v' steps starting at ``a``."""
    g = Grade(*a)
    out = DenseMatrix.identity(space_dim(m, g), m.field)
    for s in steps:
        e = m.hmap(g) if s == "h" else m.vmap(g)
        out = e @ out
        g = g + (E1 if s == "h" else E2)
    return out


def validate(m: GridModule) -> list[str]:
    """Shape and commutativity violations; empty when ``m`` is a valid module."""
    out = []
    for g in m.grades():
        if m.dims[g] < 0:
            out.append(f"negative dimension at {g}")
    if out:
        return out
    for name, maps, step in (("hmap", m.hmaps, E1), ("vmap", m.vmaps, E2)):
        for g, mat in maps.items():
            want = (m.dims[g + step], m.dims[g])
            if mat.field != m.field:
                out.append(f"{name} at {g}: field {mat.field}, expected {m.field}")
            elif mat.shape != want:
                out.append(f"{name} at {g}: shape {mat.shape}, expected {want}")
    if out:
        return out
    s1, s2 = m.box
    for x in range(s1):
        for y in range(s2):
            g = Grade(x, y)
            hv = m.vmaps[g + E1] @ m.hmaps[g]
            vh = m.hmaps[g + E2] @ m.vmaps[g]
            if hv != vh:
                out.append(f"square at {g} does not commute")
    return out


def direct_sum(m: GridModule, n: GridModule) -> GridModule:
    if m.field != n.field:
        raise ModuleError(f"field mismatch: {m.field} vs {n.field}")
    box = (max(m.box[0], n.box[0]), max(m.box[1], n.box[1]))
    grades = box_grades(box)
    dims = {g: space_dim(m, g) + space_dim(n, g) for g in grades}
    hm = {g: block_diag(m.hmap(g), n.hmap(g)) for g in grades if g.x < box[0]}
    vm = {g: block_diag(m.vmap(g), n.vmap(g)) for g in grades if g.y < box[1]}
    return GridModule.build(m.field, box, dims, hm, vm)


def zero_module(field: PrimeField, box=(0, 0)) -> GridModule:
    return GridModule.build(field, box, {})


def pad_box(m: GridModule, extra: int = 1) -> GridModule:
    """The same module re-expressed on a box enlarged by ``extra`` in each direction."""
    box = (m.box[0] + extra, m.box[1] + extra)
    grades = box_grades(box)
    return GridModule.build(
        m.field, box, {g: space_dim(m, g) for g in grades},
        {g: m.hmap(g) for g in grades if g.x < box[0]},
        {g: m.vmap(g) for g in grades if g.y < box[1]},
    )


def change_basis(m: GridModule, mats: Mapping) -> GridModule:
    """Isomorphic copy of ``m`` under invertible per-grade changes of basis.

    ``mats[g]`` maps old coordinates at ``g`` to new ones; grades without an
    entry keep their basis.
    """
    f = m.field
    P = {g: mats.get(g, DenseMatrix.identity(m.dims[g], f)) for g in m.grades()}
    Pinv = {}
    for g, p in P.items():
        inv = solve_matrix(p, DenseMatrix.identity(p.rows, f))
        if inv is None or p.rows != p.cols:
            raise ModuleError(f"change of basis at {g} is not invertible")
        Pinv[g] = inv
    hm = {g: P[g + E1] @ a @ Pinv[g] for g, a in m.hmaps.items()}
    vm = {g: P[g + E2] @ a @ Pinv[g] for g, a in m.vmaps.items()}
    return GridModule.build(f, m.box, m.dims, hm, vm)


def free_basis(s: GradeMultiset, g) -> list[int]:
    """Indices (into ``s.elements()``) of free generators alive at grade ``g``."""
    return [i for i, mu in enumerate(s.elements()) if leq(mu, g)]


def free_module(s: GradeMultiset, box: tuple[int, int], field: PrimeField) -> GridModule:
    """F(S): one upper-quadrant summand per element of ``s``.

    The basis at each grade is the alive generators in canonical order, so every
    structure map is a coordinate inclusion.
    """
    for g in s.support():
        if not (0 <= g.x <= box[0] and 0 <= g.y <= box[1]):
            raise ModuleError(f"generator {g} outside box {box}")
    grades = box_grades(box)
    alive = {g: free_basis(s, g) for g in grades}
    dims = {g: len(alive[g]) for g in grades}

    def inclusion(src, dst):
        pos = {i: k for k, i in enumerate(alive[dst])}
        a = np.zeros((len(alive[dst]), len(alive[src])), dtype=np.int64)
        for c, i in enumerate(alive[src]):
            a[pos[i], c] = 1
        return DenseMatrix(a, field)

    hm = {g: inclusion(g, g + E1) for g in grades if g.x < box[0]}
    vm = {g: inclusion(g, g + E2) for g in grades if g.y < box[1]}
    return GridModule.build(field, box, dims, hm, vm)


def _check_in_box(g, box):
    if not (0 <= g[0] <= box[0] and 0 <= g[1] <= box[1]):
        raise ModuleError(f"grade {tuple(g)} outside box {box}")


def gen_simple(alpha, field: PrimeField, box: tuple[int, int] | None = None) -> GridModule:
    """The one-dimensional module supported at a single grade.

    The box must reach one step past ``alpha`` in both directions, otherwise
    clamping would make the module nonzero beyond it.
    """
    alpha = Grade(*alpha)
    if box is None:
        box = (alpha.x + 1, alpha.y + 1)
    _check_in_box(alpha, box)
    if alpha.x >= box[0] or alpha.y >= box[1]:
        raise ModuleError(f"box {box} must extend past {alpha} for a finite support")
    return GridModule.build(field, box, {alpha: 1})


def gen_hook(field: PrimeField, box: tuple[int, int] = (2, 2)) -> GridModule:
    """One generator at the origin, killed by the single relation at (1,1)."""
    if box[0] < 1 or box[1] < 1:
        raise ModuleError(f"box {box} too small for the hook")
    dims = {g: 1 for g in box_grades(box) if g.x == 0 or g.y == 0}
    one = [[1]]
    hm = {g: one for g in box_grades(box) if g.y == 0 and g.x < box[0]}
    vm = {g: one for g in box_grades(box) if g.x == 0 and g.y < box[1]}
    return GridModule.build(field, box, dims, hm, vm)


def gen_cz_family(lam: int, field: PrimeField) -> GridModule:
    """Member of the cross-ratio family, distinguished only by the scalar ``lam``.

    Dimension 2 on the triangle x+y <= 2 (identity maps), dimension 1 on the
    anti-diagonal x+y = 3, reached by the functionals
    a(x,y)=x into (0,3), b(x,y)=y into (1,2), c(x,y)=x+y into (2,1) and
    d(x,y)=x+lam*y into (3,0).
    """
    lam = int(lam) % field.p
    if lam in (0, 1):
        raise ModuleError("lambda must avoid 0 and 1")
    box = (3, 3)
    dims = {}
    for x, y in itertools.product(range(4), repeat=2):
        if x + y <= 2:
            dims[(x, y)] = 2
        elif x + y == 3:
            dims[(x, y)] = 1
    ident = [[1, 0], [0, 1]]
    a, b, c, d = [[1, 0]], [[0, 1]], [[1, 1]], [[1, lam]]
    hm, vm = {}, {}
    for (x, y), k in dims.items():
        if k != 2:
            continue
        if x + y < 2:
            hm[(x, y)] = ident
            vm[(x, y)] = ident
    hm[(2, 0)] = d
    vm[(2, 0)] = c
    hm[(1, 1)] = c
    vm[(1, 1)] = b
    hm[(0, 2)] = b
    vm[(0, 2)] = a
    return GridModule.build(field, box, dims, hm, vm)


def _gl(d: int, field: PrimeField) -> list[np.ndarray]:
    p = field.p
    out = []
    for entries in itertools.product(range(p), repeat=d * d):
        a = np.array(entries, dtype=np.int64).reshape(d, d)
        if is_invertible(DenseMatrix(a, field)):
            out.append(a)
    return out


def brute_force_isomorphic(m: GridModule, n: GridModule, cap: int = 10**7) -> bool:
    """Exhaustive search for a grade-wise invertible family commuting with all edges.

    Grades are assigned in lexicographic order and each candidate is checked
    against the edges coming from already-assigned grades.  ``cap`` bounds the
    number of candidates examined; exceeding it raises
    :class:`SearchCapExceeded` rather than returning an answer.
    """
    if m.field != n.field:
        return False
    box = (max(m.box[0], n.box[0]), max(m.box[1], n.box[1]))
    grades = box_grades(box)
    if any(space_dim(m, g) != space_dim(n, g) for g in grades):
        return False
    f, p = m.field, m.field.p
    gl_cache: dict[int, list[np.ndarray]] = {}
    for g in grades:
        d = space_dim(m, g)
        if d not in gl_cache:
            if p ** (d * d) > cap:
                raise SearchCapExceeded(f"GL_{d}(F_{p}) enumeration exceeds cap {cap}")
            gl_cache[d] = _gl(d, f)
    # incoming constraints: for edge g -> t,  Gamma_t @ M_edge == N_edge @ Gamma_g
    incoming: dict = {g: [] for g in grades}
    for g in grades:
        for t, em, en in ((g + E1, m.hmap(g), n.hmap(g)), (g + E2, m.vmap(g), n.vmap(g))):
            if t in incoming:
                incoming[t].append((g, em.array, en.array))
    count = 0
    assigned: dict = {}

    def search(i: int) -> bool:
        nonlocal count
        if i == len(grades):
            return True
        g = grades[i]
        for cand in gl_cache[space_dim(m, g)]:
            count += 1
            if count > cap:
                raise SearchCapExceeded(f"more than {cap} candidates examined")
            ok = True
            for src, em, en in incoming[g]:
                if not np.array_equal((cand @ em) % p, (en @ assigned[src]) % p):
                    ok = False
                    break
            if ok:
                assigned[g] = cand
                if search(i + 1):
                    return True
                del assigned[g]
        return False

    return search(0)
