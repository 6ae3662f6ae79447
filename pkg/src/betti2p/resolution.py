"""Minimal free resolutions of 2-parameter modules, built one cover at a time.

Each :class:`CoverStep` lifts a basis of the cokernel of the incoming maps at
every grade, maps the free module on those lifts onto the module, and realizes
the kernel as a new :class:`GridModule` whose per-grade bases live inside the
free module's coordinates.  Three steps (for M, K_0, K_1) give the Betti
multisets; a fourth kernel must vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_linalg import (
    DenseMatrix,
    contains,
    cokernel_reps,
    hstack,
    image_basis,
    intersect_subspaces,
    kernel_basis,
    rank,
    solve_matrix,
)
from .grid_module import (
    E1,
    E2,
    E12,
    BettiTable,
    Grade,
    GradeMultiset,
    GridModule,
    box_grades,
    free_basis,
    free_module,
    map_matrix,
    space_dim,
)
from .zigzag import z_alpha

DEFAULT_PADDING = 2


class CoverError(RuntimeError):
    """The free cover is not surjective at some grade."""


class SyzygyError(RuntimeError):
    """A third kernel survived: the resolution did not terminate at length 2."""


def w_space(m: GridModule, alpha) -> DenseMatrix:
    """Vectors of M_alpha whose classes span M_alpha / (im H + im V)."""
    a = Grade(*alpha)
    incoming = hstack([m.hmap(a - E1), m.vmap(a - E2)])
    return cokernel_reps(incoming, space_dim(m, a))


def beta0(m: GridModule) -> GradeMultiset:
    """Grades of minimal generators with multiplicity (the cokernel dimensions)."""
    # beyond the box incoming maps are identities, so only box grades contribute
    return GradeMultiset({g: w_space(m, g).cols for g in m.grades()})


@dataclass(frozen=True, eq=False)
class CoverStep:
    """One stage F -> M of the resolution and its kernel."""

    generators: dict  # grade -> lifted representatives (columns in M_grade)
    free_grades: GradeMultiset
    free: GridModule
    gamma: dict  # grade -> matrix of F_grade -> M_grade
    kernel_bases: dict  # grade -> kernel basis inside F_grade coordinates
    kernel: GridModule


def build_cover(m: GridModule, padding: int = DEFAULT_PADDING) -> CoverStep:
    """Free cover of ``m`` on its box enlarged by ``padding`` and the resulting kernel."""
    f = m.field
    box = (m.box[0] + padding, m.box[1] + padding)
    grades = box_grades(box)
    gens = {g: w_space(m, g) for g in m.grades()}
    xi0 = GradeMultiset({g: w.cols for g, w in gens.items()})
    elems = xi0.elements()
    # column k of generator list: lifted vector w_mu^k
    lifts = []
    seen: dict = {}
    for mu in elems:
        k = seen.get(mu, 0)
        seen[mu] = k + 1
        lifts.append((mu, gens[mu].take_columns([k])))
    F = free_module(xi0, box, f)

    # gamma(v_i) at g: push the column from a predecessor where generator i is
    # already alive, or take the lift at its birth grade
    gamma: dict = {}
    alive = {g: free_basis(xi0, g) for g in grades}
    for g in grades:
        cols = []
        for i in alive[g]:
            mu, w = lifts[i]
            if mu == g:
                cols.append(w)
                continue
            prev = g - E1 if mu.x <= g.x - 1 else g - E2
            edge = m.hmap(prev) if prev == g - E1 else m.vmap(prev)
            cols.append(edge @ gamma[prev].take_columns([alive[prev].index(i)]))
        gam = hstack(cols, rows=space_dim(m, g), field=f)
        if rank(gam) != space_dim(m, g):
            raise CoverError(f"cover is not surjective at {g}: rank {rank(gam)} < dim {space_dim(m, g)}")
        gamma[g] = gam

    kb = {g: kernel_basis(gamma[g]) for g in grades}
    kdims = {g: kb[g].cols for g in grades}

    def induced(src, dst, fmap):
        x = solve_matrix(kb[dst], fmap @ kb[src])
        if x is None:
            raise CoverError(f"kernel not preserved along {src}->{dst}")
        return x

    hm = {g: induced(g, g + E1, F.hmaps[g]) for g in grades if g.x < box[0]}
    vm = {g: induced(g, g + E2, F.vmaps[g]) for g in grades if g.y < box[1]}
    K = GridModule.build(f, box, kdims, hm, vm)
    return CoverStep(gens, xi0, F, gamma, kb, K)


@dataclass(frozen=True, eq=False)
class Resolution:
    xi: tuple  # (xi_0, xi_1, xi_2)
    steps: tuple  # CoverStep for M, K_0, K_1
    syzygy_witness: bool

    @property
    def kernels(self) -> list[GridModule]:
        return [s.kernel for s in self.steps]

    def free_modules(self) -> list[GridModule]:
        return [s.free for s in self.steps]


def resolve(m: GridModule, padding: int = DEFAULT_PADDING) -> Resolution:
    """xi_0, xi_1, xi_2 of ``m``; raises :class:`SyzygyError` if K_2 is nonzero."""
    steps = [build_cover(m, padding)]
    for _ in range(2):
        steps.append(build_cover(steps[-1].kernel, 0))
    k2 = steps[-1].kernel
    if any(k2.dims.values()):
        bad = [g for g, d in k2.dims.items() if d]
        raise SyzygyError(f"K_2 is nonzero at {bad[:5]}")
    return Resolution(tuple(s.free_grades for s in steps), tuple(steps), True)


def betti_resolution(m: GridModule, padding: int = DEFAULT_PADDING) -> BettiTable:
    return BettiTable(resolve(m, padding).xi)


@dataclass(frozen=True)
class IntersectionDiagnostic:
    dim_I: int
    dim_K: int
    z: int
    lemma_ok: bool
    identity_ok: bool


def intersection_diagnostic(m: GridModule, alpha, cover: CoverStep | None = None) -> IntersectionDiagnostic:
    """Intersection of the two pushed-forward kernels at alpha+e1+e2.

    ``lemma_ok``: the intersection sits inside the image of F_alpha.
    ``identity_ok``: its dimension is dim K_alpha plus z_alpha of ``m``.
    """
    if cover is None:
        cover = build_cover(m)
    a = Grade(*alpha)
    F, K = cover.free, cover.kernel
    top = a + E12

    def pushed(g):
        if g.x < 0 or g.y < 0:
            return DenseMatrix.zeros(space_dim(F, top), 0, m.field)
        return map_matrix(F, g, top) @ cover.kernel_bases[F.clamp(g)]

    inter = intersect_subspaces(pushed(a + E1), pushed(a + E2))
    f_img = map_matrix(F, a, top)
    dim_K = space_dim(K, a)
    z = z_alpha(m, a)
    return IntersectionDiagnostic(
        dim_I=inter.cols,
        dim_K=dim_K,
        z=z,
        lemma_ok=contains(f_img, inter),
        identity_ok=inter.cols == dim_K + z,
    )


def diagnostic_grades(m: GridModule, padding: int = DEFAULT_PADDING) -> list[Grade]:
    """Grades alpha for which alpha+e1+e2 ranges over the padded box."""
    return [Grade(x, y) for x in range(-1, m.box[0] + padding) for y in range(-1, m.box[1] + padding)]


def free_image_basis(cover: CoverStep, alpha, beta) -> DenseMatrix:
    """Image of F_alpha inside F_beta (a coordinate subspace)."""
    return image_basis(map_matrix(cover.free, alpha, beta))
