"""Betti numbers from frame multiplicities, Hilbert-function checks and the crosscheck.

For a finitely presented 2-parameter module M and every grade a,

    beta_0(a) = y_a
    beta_1(a) = y_a - d(a) + d(a-e1) + d(a-e2) - d(a-e1-e2) + z_(a-e1-e2)
    beta_2(a) = z_(a-e1-e2)

where d is the dimension vector, y_a the point-bar multiplicity of the
into-a frame and z_a that of the a-outward frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact_linalg import DenseMatrix, PrimeField, kernel_basis, solve_matrix
from .grid_module import (
    E1,
    E2,
    E12,
    BettiTable,
    Grade,
    GradeMultiset,
    GridModule,
    box_grades,
    leq,
    space_dim,
    validate,
)
from .resolution import DEFAULT_PADDING, Resolution, diagnostic_grades, resolve
from .zigzag import barcode, restrict_into_frame, y_alpha, z_alpha


class NegativeMultiplicity(ArithmeticError):
    pass


def formula_grades(m: GridModule, padding: int = DEFAULT_PADDING) -> list[Grade]:
    return box_grades((m.box[0] + padding, m.box[1] + padding))


def betti_theorem(m: GridModule, padding: int = DEFAULT_PADDING) -> BettiTable:
    """Betti table from y, z and the dimension vector alone."""
    d = lambda g: space_dim(m, g)  # noqa: E731
    b0, b1, b2 = {}, {}, {}
    for a in formula_grades(m, padding):
        y = y_alpha(m, a)
        low = a - E12
        z = z_alpha(m, low) if low.x >= 0 and low.y >= 0 else 0
        one = y - d(a) + d(a - E1) + d(a - E2) - d(low) + z
        for j, v in enumerate((y, one, z)):
            if v < 0:
                raise NegativeMultiplicity(f"beta_{j}{a} = {v} < 0")
        b0[a], b1[a], b2[a] = y, one, z
    return BettiTable((GradeMultiset(b0), GradeMultiset(b1), GradeMultiset(b2)))


def hilbert_identity_check(m: GridModule, table: BettiTable, padding: int = DEFAULT_PADDING) -> dict:
    """dim M_a == sum over mu <= a of (m0 - m1 + m2)(mu), per grade."""
    signed = [(g, k) for g, k in table[0].items()] + [(g, -k) for g, k in table[1].items()] + \
        [(g, k) for g, k in table[2].items()]
    out = {}
    for a in formula_grades(m, padding):
        out[a] = space_dim(m, a) == sum(k for g, k in signed if leq(g, a))
    return out


def euler_local_check(m: GridModule, table: BettiTable, padding: int = DEFAULT_PADDING) -> dict:
    """Local alternating sum of dims equals m0 - m1 + m2 at each grade."""
    d = lambda g: space_dim(m, g)  # noqa: E731
    out = {}
    for a in formula_grades(m, padding):
        lhs = d(a) - d(a - E1) - d(a - E2) + d(a - E12)
        rhs = table[0][a] - table[1][a] + table[2][a]
        out[a] = lhs == rhs
    return out


@dataclass
class CrosscheckReport:
    formula: BettiTable
    resolution: BettiTable
    mismatches: list = field(default_factory=list)  # (j, grade, formula, resolution)
    eq7_mismatches: list = field(default_factory=list)  # (grade, recomputed, resolution)

    @property
    def agree(self) -> bool:
        return not self.mismatches and not self.eq7_mismatches

    def lines(self) -> list[str]:
        out = []
        for j, g, a, b in self.mismatches:
            out.append(f"beta_{j} at {g}: formula {a} != resolution {b}")
        for g, a, b in self.eq7_mismatches:
            out.append(f"beta_1 at {g}: kernel recount {a} != resolution {b}")
        return out


def crosscheck(m: GridModule, padding: int = DEFAULT_PADDING, res: Resolution | None = None) -> CrosscheckReport:
    """Compare the frame formula with the resolution, grade by grade."""
    errs = validate(m)
    if errs:
        raise ValueError("; ".join(errs))
    if res is None:
        res = resolve(m, padding)
    rt = BettiTable(res.xi)
    ft = betti_theorem(m, padding)
    rep = CrosscheckReport(ft, rt)
    grades = set(formula_grades(m, padding))
    for j in range(3):
        grades.update(rt[j].support())
        grades.update(ft[j].support())
    for j in range(3):
        for g in sorted(grades):
            if ft[j][g] != rt[j][g]:
                rep.mismatches.append((j, g, ft[j][g], rt[j][g]))
    K0 = res.steps[0].kernel
    dk = lambda g: space_dim(K0, g)  # noqa: E731
    for a in diagnostic_grades(m, padding):
        top = a + E12
        z = z_alpha(m, a) if a.x >= 0 and a.y >= 0 else 0
        recount = dk(top) - dk(a + E1) - dk(a + E2) + dk(a) + z
        if recount != rt[1][top]:
            rep.eq7_mismatches.append((top, recount, rt[1][top]))
    return rep


# -- random finitely presented modules --------------------------------------

def _random_solution(A: DenseMatrix, b: DenseMatrix, rng: np.random.Generator) -> DenseMatrix | None:
    x = solve_matrix(A, b)
    if x is None:
        return None
    ker = kernel_basis(A)
    if ker.cols:
        c = rng.integers(0, A.field.p, size=(ker.cols, 1))
        x = x + ker @ DenseMatrix(c, A.field)
    return x


def random_module(rng: np.random.Generator, field: PrimeField, box: tuple[int, int], max_dim: int = 4,
                  max_tries: int = 200) -> GridModule:
    """A random valid module: free horizontal maps, vertical maps solved square by square.

    Each vertical map must close the square to its left and leave the next
    square solvable; a row with no solution triggers a full resample.
    """
    s1, s2 = box
    p = field.p
    for _ in range(max_tries):
        grades = box_grades(box)
        dims = {g: int(rng.integers(0, max_dim + 1)) for g in grades}
        hm = {g: DenseMatrix(rng.integers(0, p, size=(dims[g + E1], dims[g])), field)
              for g in grades if g.x < s1}
        vm = {}
        ok = True
        for y in range(s2):
            for x in range(s1 + 1):
                g = Grade(x, y)
                V = _solve_vertical(g, dims, hm, vm, field, rng, s1)
                if V is None:
                    ok = False
                    break
                vm[g] = V
            if not ok:
                break
        if ok:
            m = GridModule.build(field, box, dims, hm, vm)
            assert not validate(m)
            return m
    raise RuntimeError("could not sample a commuting module")


def _solve_vertical(g, dims, hm, vm, field, rng, s1) -> DenseMatrix | None:
    """Random V at g with V H_left = H_above_left V_left and, if there is a next
    square, H_above V killing ker H (so the next vertical map exists)."""
    rows, cols = dims[g + E2], dims[g]
    n = rows * cols
    if n == 0:
        return DenseMatrix.zeros(rows, cols, field)
    p = field.p
    blocks, rhs = [], []
    # vec(V) in row-major order: V[r, c] -> r * cols + c
    if g.x > 0:
        left = g - E1
        H = hm[left].array  # cols x dims[left]
        C = (hm[left + E2].array @ vm[left].array) % p  # rows x dims[left]
        # (V H)[r, k] = sum_c V[r, c] H[c, k]
        for r in range(rows):
            for k in range(H.shape[1]):
                row = np.zeros(n, dtype=np.int64)
                row[r * cols : (r + 1) * cols] = H[:, k]
                blocks.append(row)
                rhs.append(C[r, k])
    if g.x < s1:
        K = kernel_basis(hm[g]).array  # cols x q
        Ha = hm[g + E2].array  # dims[g+e1+e2] x rows
        # (Ha V K)[i, k] = sum_{r,c} Ha[i, r] V[r, c] K[c, k] = 0
        for i in range(Ha.shape[0]):
            for k in range(K.shape[1]):
                row = np.outer(Ha[i, :], K[:, k]).reshape(-1)
                blocks.append(row)
                rhs.append(0)
    if not blocks:
        return DenseMatrix(rng.integers(0, p, size=(rows, cols)), field)
    A = DenseMatrix(np.array(blocks, dtype=np.int64), field)
    b = DenseMatrix(np.array(rhs, dtype=np.int64).reshape(-1, 1), field)
    x = _random_solution(A, b, rng)
    if x is None:
        return None
    return DenseMatrix(x.array.reshape(rows, cols), field)


def random_corpus(n: int, seed: int, field: PrimeField, max_box: int = 4, max_dim: int = 4) -> list[GridModule]:
    """``n`` reproducible random modules; case i depends only on (seed, i)."""
    out = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        box = (int(rng.integers(1, max_box + 1)), int(rng.integers(1, max_box + 1)))
        out.append(random_module(rng, field, box, max_dim))
    return out


def frames_differ(m: GridModule, n: GridModule, padding: int = DEFAULT_PADDING) -> list[Grade]:
    """Grades whose into-frames have different barcodes."""
    grades = formula_grades(m if m.box >= n.box else n, padding)
    return [a for a in grades if barcode(restrict_into_frame(m, a)) != barcode(restrict_into_frame(n, a))]


def search_frame_counterexample(seed: int, field: PrimeField, attempts: int = 2000, box=(2, 2), max_dim: int = 2):
    """Two modules with identical Betti tables but a differing into-frame.

    Returns ``(m, n, grades)`` or ``None``.  Equal Betti tables force equal
    dimension vectors, so the frames differ only in their maps.  Candidates are
    keyed by the formula table; callers should confirm with :func:`resolve`.
    """
    rng = np.random.default_rng(seed)
    seen: dict = {}
    for _ in range(attempts):
        m = random_module(rng, field, box, max_dim)
        key = betti_theorem(m).beta
        for other in seen.get(key, []):
            diff = frames_differ(m, other)
            if diff:
                return other, m, diff
        seen.setdefault(key, []).append(m)
    return None
