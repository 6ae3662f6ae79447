"""Acceptance criteria, one test each.  Outcomes are summarized at the end of the run.

Tolerances are exact (integer equality) everywhere; the runtime bounds are
60 s for the full cross-validation corpus, 1 s for the barcode round trip and
5 min for the isomorphism search.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from betti2p import cli
from betti2p.betti_formula import (
    betti_theorem,
    crosscheck,
    euler_local_check,
    hilbert_identity_check,
    random_corpus,
)
from betti2p.exact_linalg import PrimeField
from betti2p.formats import parse_module, parse_zigzag, write_module, write_zigzag
from betti2p.grid_module import GradeMultiset, free_module, gen_cz_family, gen_hook, gen_simple
from betti2p.resolution import betti_resolution, diagnostic_grades, intersection_diagnostic, resolve
from betti2p.zigzag import BWD, FWD, Barcode, barcode, gen_from_barcode, z_alpha

pytestmark = pytest.mark.acceptance

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIG2_BARS = [(1, 4), (2, 4), (1, 3), (1, 1), (2, 2), (3, 4), (1, 1), (2, 3)]
FIG2_STATED_DIMS = [4, 5, 5, 4]

CORPUS_SEED = 7
CROSSCHECK_BUDGET_S = 60.0
FIG2_BUDGET_S = 1.0
ISO_BUDGET_S = 300.0

_cache: dict = {}


def G(*pairs):
    return GradeMultiset(list(pairs))


def corpus():
    """200 modules over GF(2) and 50 over GF(5), box at most 4x4, dims at most 4."""
    if "corpus" not in _cache:
        _cache["corpus"] = (random_corpus(200, CORPUS_SEED, PrimeField(2), max_box=4, max_dim=4)
                            + random_corpus(50, CORPUS_SEED, PrimeField(5), max_box=4, max_dim=4))
    return _cache["corpus"]


def resolved():
    """(module, resolution, crosscheck report) for every corpus module, computed once."""
    if "resolved" not in _cache:
        out = []
        for m in corpus():
            res = resolve(m)
            out.append((m, res, crosscheck(m, res=res)))
        _cache["resolved"] = out
    return _cache["resolved"]


def test_c1_crosscheck_corpus(criterion):
    with criterion("1 formula == resolution on 200 GF(2) + 50 GF(5) modules, < 60 s") as c:
        t0 = time.perf_counter()
        rows = resolved()
        elapsed = time.perf_counter() - t0
        bad = [(i, r.lines()) for i, (_, _, r) in enumerate(rows) if not r.agree]
        assert len(rows) == 250
        assert not bad, bad[:3]
        assert elapsed < CROSSCHECK_BUDGET_S, f"{elapsed:.1f} s"
        c["text"] = f"250/250 agree in {elapsed:.1f} s"


def test_c2_koszul_and_hook(criterion):
    with criterion("2 Koszul and hook fixtures from both engines") as c:
        f = PrimeField(2)
        koszul = (G((0, 0)), G((1, 0), (0, 1)), G((1, 1)))
        hook = (G((0, 0)), G((1, 1)), G())
        for m, want in ((gen_simple((0, 0), f), koszul), (gen_hook(f), hook)):
            assert betti_theorem(m).beta == want
            assert betti_resolution(m).beta == want
        for name, want in (("simple.pm2", koszul), ("hook.pm2", hook)):
            m = parse_module((FIXTURES / name).read_text())
            assert betti_theorem(m).beta == betti_resolution(m).beta == want
        c["text"] = "exact"


def test_c3_free_modules(criterion):
    with criterion("3 free modules F(S) give (S, {}, {}) for 50 random S") as c:
        rng = np.random.default_rng(CORPUS_SEED)
        for i in range(50):
            p = (2, 3, 5)[i % 3]
            box = (int(rng.integers(1, 5)), int(rng.integers(1, 5)))
            k = int(rng.integers(0, 7))
            s = GradeMultiset([(int(rng.integers(0, box[0] + 1)), int(rng.integers(0, box[1] + 1)))
                               for _ in range(k)])
            m = free_module(s, box, PrimeField(p))
            assert betti_theorem(m).beta == (s, G(), G()), (i, s)
            assert betti_resolution(m).beta == (s, G(), G()), (i, s)
        c["text"] = "50/50"


def test_c4_fig2_barcode(criterion):
    with criterion("4 eight-bar zigzag example round-trips under all 8 direction patterns; vertex dims 4,5,5,4") as c:
        t0 = time.perf_counter()
        f = PrimeField(2)
        patterns = [[a, b, d] for a in (FWD, BWD) for b in (FWD, BWD) for d in (FWD, BWD)]
        dims = set()
        for dirs in patterns:
            z = gen_from_barcode(FIG2_BARS, dirs, f)
            assert barcode(z) == Barcode(FIG2_BARS), dirs
            text = write_zigzag(z)
            assert barcode(parse_zigzag(text)) == Barcode(FIG2_BARS)
            dims.add(tuple(z.dims))
        elapsed = time.perf_counter() - t0
        assert elapsed < FIG2_BUDGET_S, f"{elapsed:.2f} s"
        assert len(dims) == 1
        (got,) = dims
        c["text"] = f"round trip 8/8 in {elapsed:.2f} s; vertex dims {list(got)}"
        # dim(M_1) = 4 = dim(M_4) and dim(M_2) = 5 = dim(M_3)
        assert list(got) == FIG2_STATED_DIMS, (
            f"round trip 8/8 ok, but the eight bars cover the vertices {list(got)} times, not {FIG2_STATED_DIMS}")


def test_c5_hilbert_identities(criterion):
    with criterion("5 cumulative and local Hilbert identities on the corpus, both engines") as c:
        grades = 0
        for m, _, rep in resolved():
            for t in (rep.formula, rep.resolution):
                for check in (hilbert_identity_check, euler_local_check):
                    flags = check(m, t)
                    bad = [g for g, ok in flags.items() if not ok]
                    assert not bad, (check.__name__, bad[:3])
                    grades += len(flags)
        c["text"] = f"{grades} grade checks"


def test_c6_proof_diagnostics(criterion):
    with criterion("6 containment, dim I = dim K_0 + z, and z(K_0) = 0 on the corpus") as c:
        n = 0
        for i, (m, res, _) in enumerate(resolved()):
            cover = res.steps[0]
            for a in diagnostic_grades(m):
                d = intersection_diagnostic(m, a, cover)
                assert d.lemma_ok, (i, a)
                assert d.identity_ok, (i, a, d)
                n += 1
            k0 = cover.kernel
            assert all(z_alpha(k0, g) == 0 for g in k0.grades()), i
        c["text"] = f"{n} grades"


def test_c7_syzygy_vanishing(criterion):
    with criterion("7 K_2 = 0 on the corpus; beta_j empty for j > 2 from both engines") as c:
        for i, (m, res, rep) in enumerate(resolved()):
            assert res.syzygy_witness, i
            assert not any(res.steps[2].kernel.dims.values()), i
            for t in (rep.formula, rep.resolution):
                assert all(t[j] == G() for j in (3, 4, 5)), i
        c["text"] = "250/250"


def test_c8_cz_family(criterion, capsys):
    with criterion("8 CZ lambda=2 vs 3 over GF(5): same dims and tables, not isomorphic, < 5 min") as c:
        f = PrimeField(5)
        a, b = gen_cz_family(2, f), gen_cz_family(3, f)
        assert a.dims == b.dims
        ta, tb = betti_theorem(a), betti_theorem(b)
        assert ta == tb == betti_resolution(a) == betti_resolution(b)
        t0 = time.perf_counter()
        code = cli.main(["isocheck", str(FIXTURES / "cz_l2_p5.pm2"), str(FIXTURES / "cz_l3_p5.pm2")])
        out = capsys.readouterr().out
        elapsed = time.perf_counter() - t0
        assert code == 0 and out.strip() == "not isomorphic", out
        assert elapsed < ISO_BUDGET_S, f"{elapsed:.1f} s"
        c["text"] = f"isocheck: not isomorphic in {elapsed:.1f} s"


def test_c9_determinism_round_trip(criterion, capsys):
    with criterion("9 fixtures round-trip bit-exactly; same seed gives byte-identical reports") as c:
        files = sorted(FIXTURES.glob("*.pm2")) + sorted(FIXTURES.glob("*.zz"))
        for path in files:
            text = path.read_text()
            if path.suffix == ".zz":
                once = write_zigzag(parse_zigzag(text))
                assert write_zigzag(parse_zigzag(once)) == once
            else:
                once = write_module(parse_module(text, check=False))
                assert write_module(parse_module(once, check=False)) == once
            body = "".join(ln for ln in text.splitlines(keepends=True) if not ln.lstrip().startswith("#"))
            assert once == body, path.name

        def report(*argv):
            code = cli.main([str(a) for a in argv])
            return code, capsys.readouterr().out

        runs = [("crosscheck", "--random", 25, "--seed", 3, "--field", 2, "--format", "json"),
                ("crosscheck", "--random", 25, "--seed", 3, "--field", 5),
                ("betti", "-i", FIXTURES / "frames_pair_a.pm2", "--format", "json"),
                ("resolve", "-i", FIXTURES / "cz_l3_p5.pm2"),
                ("frames", "-i", FIXTURES / "hook.pm2", "--format", "json"),
                ("check", "-i", FIXTURES / "simple.pm2"),
                ("zigzag", "-i", FIXTURES / "fig2.zz", "--format", "json")]
        for argv in runs:
            first, second = report(*argv), report(*argv)
            assert first == second, argv
            if "json" in argv:
                json.loads(first[1])
        c["text"] = f"{len(files)} files, {len(runs)} reports"
