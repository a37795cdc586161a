"""Builders for bundled models, seeded random data and synthetic blow-up pairs.

Two-set torus diagrams use identity restrictions: formally a cover of the
torus by two copies of itself. That is algebraically legitimate and exercises
every map, but it is not a geometric cover.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Mapping, Sequence

from .cech import CoverDiagram, constant_diagram
from .complexes import Bidegree, BigradedComplex, ChainMap, direct_sum
from .currents import PairingData, pairing_from_model
from .dga import DgaModel
from .errors import InfeasibleParamsError
from .linalg import SparseMatrix, inverse
from .morphisms import CoverMorphism
from .scalars import I, ONE, ZERO, as_scalar

__all__ = [
    "torus_model",
    "interval_model",
    "tensor_models",
    "sum_models",
    "model_two_set_diagram",
    "model_pairings",
    "sum_diagrams",
    "disjoint_cover_morphism",
    "broken_cover_morphism",
    "RandomBounds",
    "random_complex",
    "random_chain_map",
    "random_valid_diagram",
    "random_iso_diagram",
    "random_morphism",
    "BlowupParams",
    "synthetic_blowup_bundle",
    "ModelBundle",
    "torus_bundle",
    "cover_bundle",
    "CORPUS",
    "named_bundle",
]


# ---------------------------------------------------------------- algebras

def _merge_sign(a: Sequence[int], b: Sequence[int]) -> int:
    """Sign of the shuffle sorting ``a + b``; 0 when they share an index."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


def torus_model(n: int, c=Fraction(1, 2)) -> DgaModel:
    """Exterior algebra on ``dz_1..dz_n`` and ``dz̄_1..dz̄_n`` with zero differential.

    Basis of ``(p, q)`` is ``dz_I ∧ dz̄_J`` with ``I``, ``J`` in lexicographic order.
    The partition is ``(c·1, (1-c)·1)``.
    """
    if not 1 <= n <= 4:
        raise InfeasibleParamsError(f"torus_model needs 1 <= n <= 4, got {n}")
    basis = {(p, q): [(a, b) for a in combinations(range(n), p) for b in combinations(range(n), q)]
             for p in range(n + 1) for q in range(n + 1)}
    index = {b: {mono: k for k, mono in enumerate(monos)} for b, monos in basis.items()}
    dims = {Bidegree(*b): len(monos) for b, monos in basis.items()}
    products = {}
    for a_deg, a_monos in basis.items():
        for b_deg, b_monos in basis.items():
            out_deg = (a_deg[0] + b_deg[0], a_deg[1] + b_deg[1])
            if out_deg not in basis:
                continue
            nb = len(b_monos)
            entries = {}
            for i, (I1, J1) in enumerate(a_monos):
                for j, (I2, J2) in enumerate(b_monos):
                    s = _merge_sign(I1, I2) * _merge_sign(J1, J2)
                    if not s:
                        continue
                    # move dz_{I2} past dz̄_{J1}
                    if (len(J1) * len(I2)) % 2:
                        s = -s
                    k = index[out_deg][(tuple(sorted(I1 + I2)), tuple(sorted(J1 + J2)))]
                    entries[(k, i * nb + j)] = as_scalar(s)
            products[(Bidegree(*a_deg), Bidegree(*b_deg))] = SparseMatrix(len(basis[out_deg]), len(a_monos) * nb, entries)
    c = as_scalar(c)
    return DgaModel(f"torus{n}", BigradedComplex(f"torus{n}", dims), products, (ONE,), n=n,
                    integral=(ONE,), partition=((c,), (ONE - c,)))


def interval_model(c=Fraction(1, 2)) -> DgaModel:
    """Truncated ``span{1, t} -> span{dt̄}`` with ``t² = 0``, ``t·dt̄ = 0`` and ``dt = dt̄``.

    The partition ``(c + t, 1 - c - t)`` is not closed, so gluing sees its derivative.
    """
    b00, b01 = Bidegree(0, 0), Bidegree(0, 1)
    cx = BigradedComplex("interval", {b00: 2, b01: 1}, {b00: SparseMatrix(1, 2, {(0, 1): ONE})})
    products = {
        (b00, b00): SparseMatrix(2, 4, {(0, 0): ONE, (1, 1): ONE, (1, 2): ONE}),
        (b00, b01): SparseMatrix(1, 2, {(0, 0): ONE}),
        (b01, b00): SparseMatrix(1, 2, {(0, 0): ONE}),
    }
    c = as_scalar(c)
    return DgaModel("interval", cx, products, (ONE, ZERO), partition=((c, ONE), (ONE - c, -ONE)))


def tensor_models(a: DgaModel, b: DgaModel, name: str | None = None) -> DgaModel:
    """Graded tensor product with Koszul signs.

    Bidegree ``(p, q)`` is the direct sum over splittings ``(p1+p2, q1+q2)``
    ordered by the splitting of the left factor; each block is ordered
    ``i * dim(right) + j``. The partition comes from the right factor.
    """
    ca, cb = a.complex, b.complex
    layout: dict[Bidegree, list] = {}
    for da in sorted(ca.dims):
        for db in sorted(cb.dims):
            layout.setdefault(da + db, []).append((da, db))
    offsets = {}
    for deg, parts in layout.items():
        off = 0
        for da, db in parts:
            offsets[(da, db)] = off
            off += ca.dim(*da) * cb.dim(*db)
    dims = {deg: sum(ca.dim(*x) * cb.dim(*y) for x, y in parts) for deg, parts in layout.items()}

    def idx(da, i, db, j):
        return offsets[(da, db)] + i * cb.dim(*db) + j

    diff = {}
    for deg, parts in layout.items():
        up = Bidegree(deg.p, deg.q + 1)
        entries = {}
        for da, db in parts:
            sign = -1 if (da.p + da.q) % 2 else 1
            da1, db1 = Bidegree(da.p, da.q + 1), Bidegree(db.p, db.q + 1)
            for i in range(ca.dim(*da)):
                for j in range(cb.dim(*db)):
                    col = idx(da, i, db, j)
                    for (k, _), x in ca.d(*da).submatrix(range(ca.dim(*da1)), [i]).entries.items():
                        key = (idx(da1, k, db, j), col)
                        entries[key] = entries.get(key, ZERO) + x
                    for (k, _), x in cb.d(*db).submatrix(range(cb.dim(*db1)), [j]).entries.items():
                        key = (idx(da, i, db1, k), col)
                        entries[key] = entries.get(key, ZERO) + (x if sign > 0 else -x)
        if entries:
            diff[deg] = SparseMatrix(dims.get(up, 0), dims[deg], entries)
    cx = BigradedComplex(name or f"{a.name}⊗{b.name}", dims, diff)
    products = {}
    for d1, parts1 in layout.items():
        for d2, parts2 in layout.items():
            d3 = d1 + d2
            if d3 not in dims:
                continue
            n2 = dims[d2]
            entries = {}
            for a1, b1 in parts1:
                for a2, b2 in parts2:
                    ta, tb = a.product_table(a1, a2), b.product_table(b1, b2)
                    if ta.is_zero() or tb.is_zero():
                        continue
                    koszul = -1 if ((b1.p + b1.q) * (a2.p + a2.q)) % 2 else 1
                    na2, nb2 = ca.dim(*a2), cb.dim(*b2)
                    for (ka, cola), x in ta.entries.items():
                        i1, i2 = divmod(cola, na2)
                        for (kb, colb), y in tb.entries.items():
                            j1, j2 = divmod(colb, nb2)
                            row = idx(a1 + a2, ka, b1 + b2, kb)
                            col = idx(a1, i1, b1, j1) * n2 + idx(a2, i2, b2, j2)
                            entries[(row, col)] = entries.get((row, col), ZERO) + koszul * x * y
            if entries:
                products[(d1, d2)] = SparseMatrix(dims[d3], dims[d1] * n2, entries)

    def lift(u, v):
        # u ⊗ v for u, v in bidegree (0,0) of each factor
        z = Bidegree(0, 0)
        out = [ZERO] * dims[z]
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                if x and y:
                    out[idx(z, i, z, j)] = x * y
        return tuple(out)

    partition = None
    if b.partition is not None:
        partition = (lift(a.unit, b.partition[0]), lift(a.unit, b.partition[1]))
    integral, n = None, None
    if a.integral is not None and b.integral is not None and a.n is not None and b.n is not None:
        n = a.n + b.n
        top, ta, tb = Bidegree(n, n), Bidegree(a.n, a.n), Bidegree(b.n, b.n)
        vec = [ZERO] * dims.get(top, 0)
        for i, x in enumerate(a.integral):
            for j, y in enumerate(b.integral):
                vec[idx(ta, i, tb, j)] = x * y
        integral = tuple(vec)
    return DgaModel(cx.name, cx, products, lift(a.unit, b.unit), n=n, integral=integral, partition=partition)


def sum_models(models: Sequence[DgaModel], name: str | None = None) -> DgaModel:
    """Product algebra ``A_1 × … × A_k``: componentwise product, unit and integral concatenated."""
    cx = direct_sum([m.complex for m in models], name or "⊕".join(m.name for m in models))
    products = {}
    for a in cx.dims:
        for b in cx.dims:
            if (a + b) not in cx.dims:
                continue
            nb = cx.dim(*b)
            entries = {}
            ro = ao = bo = 0
            for m in models:
                na, nbm = m.dim(a), m.dim(b)
                for (k, col), x in m.product_table(a, b).entries.items():
                    i, j = divmod(col, nbm)
                    entries[(ro + k, (ao + i) * nb + bo + j)] = x
                ro += m.dim(a + b)
                ao += na
                bo += nbm
            if entries:
                products[(a, b)] = SparseMatrix(cx.dim(*(a + b)), cx.dim(*a) * nb, entries)
    unit = tuple(x for m in models for x in m.unit)
    ns = {m.n for m in models}
    integral = None
    if all(m.integral is not None for m in models) and len(ns) == 1:
        integral = tuple(x for m in models for x in m.integral)
    partition = None
    if all(m.partition is not None for m in models):
        partition = tuple(tuple(x for m in models for x in m.partition[k]) for k in range(2))
    return DgaModel(cx.name, cx, products, unit, n=ns.pop() if len(ns) == 1 else None,
                    integral=integral, partition=partition)


def model_two_set_diagram(m: DgaModel, labels=(0, 1)) -> CoverDiagram:
    return constant_diagram(m.complex, labels, name=f"{m.name}-cover")


def model_pairings(m: DgaModel, d: CoverDiagram) -> dict:
    """The same integration pairing on every piece of a constant diagram."""
    pd = pairing_from_model(m)
    return {s: pd for s in d.simplices}


# ---------------------------------------------------------------- sums and covers

def _block_map(maps: Sequence[ChainMap], source: BigradedComplex, target: BigradedComplex) -> ChainMap:
    blocks = {b: SparseMatrix.block_diag([f.block(*b) for f in maps]) for b in source.dims}
    return ChainMap(source, target, blocks, name="⊕".join(f.name for f in maps))


def sum_diagrams(diagrams: Sequence[CoverDiagram], name: str | None = None,
                 pieces: Mapping | None = None) -> CoverDiagram:
    """Piecewise direct sum; ``pieces`` may supply prebuilt summed complexes."""
    base = diagrams[0]
    complex_at = dict(pieces) if pieces else {
        s: direct_sum([d.complex_at[s] for d in diagrams], "⊕".join(d.complex_at[s].name for d in diagrams))
        for s in base.simplices}
    restrict = {k: _block_map([d.restrict[k] for d in diagrams], complex_at[k[0]], complex_at[k[1]])
                for k in base.restrict}
    extend = {}
    if all(d.extend for d in diagrams):
        extend = {k: _block_map([d.extend[k] for d in diagrams], complex_at[k[1]], complex_at[k[0]])
                  for k in base.extend}
    ambient, amb_r = None, {}
    if all(d.ambient is not None for d in diagrams):
        ambient = direct_sum([d.ambient for d in diagrams])
        amb_r = {a: _block_map([d.ambient_restrict[a] for d in diagrams], ambient, complex_at[(a,)])
                 for a in base.index_set}
    return CoverDiagram(base.index_set, base.simplices, complex_at, restrict,
                        name=name or "⊕".join(d.name for d in diagrams), ambient=ambient,
                        ambient_restrict=amb_r, extend=extend)


def _stack(source: BigradedComplex, target: BigradedComplex, coeffs: Sequence, pad: int = 0) -> ChainMap:
    """``x ↦ (c_1 x, …, c_k x, 0)`` from one copy of ``source`` into ``target``."""
    blocks = {}
    for b, n in source.dims.items():
        entries = {}
        for k, c in enumerate(coeffs):
            c = as_scalar(c)
            if c:
                for i in range(n):
                    entries[(k * n + i, i)] = c
        blocks[b] = SparseMatrix(target.dim(*b), n, entries)
    return ChainMap(source, target, blocks, name="stack")


def _sheets(base: CoverDiagram, k: int, pairings: Mapping | None, coeffs: Sequence,
            name: str) -> CoverMorphism:
    models, summed = {}, {}
    if pairings is not None:
        for s, pd in pairings.items():
            if pd.model is None:
                raise InfeasibleParamsError("sheeted covers need pairings built from models")
            key = id(pd.model)
            if key not in summed:
                summed[key] = sum_models([pd.model] * k, name=f"{pd.model.name}x{k}")
            models[s] = summed[key]
    pieces = {s: models[s].complex for s in base.simplices} if models else None
    src = sum_diagrams([base] * k, name=f"{base.name}x{k}", pieces=pieces)
    pull = {s: _stack(base.complex_at[s], src.complex_at[s], coeffs) for s in base.simplices}
    src_pairs = tgt_pairs = None
    n = None
    if pairings is not None:
        cache = {}
        src_pairs = {}
        for s in base.simplices:
            key = id(models[s])
            if key not in cache:
                cache[key] = pairing_from_model(models[s])
            src_pairs[s] = cache[key]
        tgt_pairs = dict(pairings)
        n = next(iter(pairings.values())).n
    return CoverMorphism(name, src, base, pull, base.index_set[0], n, src_pairs, tgt_pairs)


def disjoint_cover_morphism(base: CoverDiagram, k: int, pairings: Mapping | None = None) -> CoverMorphism:
    """``X ⊔ … ⊔ X -> X`` with ``k`` sheets; pullback is the ``k``-fold diagonal."""
    if k < 1:
        raise InfeasibleParamsError(f"need at least one sheet, got {k}")
    return _sheets(base, k, pairings, [1] * k, f"{base.name}-sheets{k}")


def broken_cover_morphism(base: CoverDiagram, pairings: Mapping) -> CoverMorphism:
    """Two sheets with pullback ``x ↦ (x, 2x)``: a chain map with degree 3 for which
    ``π_* ĩ π* = 5 i``, so the projection identity fails."""
    return _sheets(base, 2, pairings, [1, 2], f"{base.name}-broken")


# ---------------------------------------------------------------- random data

_ENTRIES = (0, 0, 0, 1, -1, 2, I, -I)


@dataclass(frozen=True)
class RandomBounds:
    p_size: int = 4
    q_size: int = 4
    max_piece_dim: int = 6

    def __post_init__(self):
        if min(self.p_size, self.q_size, self.max_piece_dim) < 1:
            raise InfeasibleParamsError("random bounds must be positive")


@dataclass(frozen=True, eq=False)
class _Elementary:
    """A complex written as ``G · E · G^{-1}`` with ``E`` a sum of elementary pieces."""

    complex: BigradedComplex
    kinds: Mapping[Bidegree, tuple]  # per elementary basis vector: "h", "bot" or "top"
    g: Mapping[Bidegree, SparseMatrix]
    g_inv: Mapping[Bidegree, SparseMatrix]
    e: Mapping[Bidegree, SparseMatrix]


def _random_invertible(rng: random.Random, n: int) -> SparseMatrix:
    lower = {(i, j): as_scalar(rng.choice(_ENTRIES)) for i in range(n) for j in range(i)}
    upper = {(i, j): as_scalar(rng.choice(_ENTRIES)) for i in range(n) for j in range(i + 1, n)}
    for i in range(n):
        lower[(i, i)] = ONE
        upper[(i, i)] = ONE
    return SparseMatrix(n, n, lower) @ SparseMatrix(n, n, upper)


def _random_elementary(rng: random.Random, name: str, bounds: RandomBounds, acyclic: bool = False,
                       budget: int | None = None) -> _Elementary:
    budget = bounds.max_piece_dim if budget is None else budget
    pieces = []  # (p, q, "h") or (p, q, "pair")
    used = rng.randint(0, budget)
    while used > 0:
        p, q = rng.randrange(bounds.p_size), rng.randrange(bounds.q_size)
        if (acyclic or rng.random() < 0.5) and used >= 2 and q + 1 < bounds.q_size:
            pieces.append((p, q, "pair"))
            used -= 2
        elif not acyclic:
            pieces.append((p, q, "h"))
            used -= 1
        else:
            used -= 1
    slots: dict[Bidegree, list] = {}
    edges = []
    for p, q, kind in pieces:
        if kind == "h":
            slots.setdefault(Bidegree(p, q), []).append("h")
        else:
            lo, hi = Bidegree(p, q), Bidegree(p, q + 1)
            slots.setdefault(lo, []).append("bot")
            slots.setdefault(hi, []).append("top")
            edges.append((lo, len(slots[lo]) - 1, hi, len(slots[hi]) - 1))
    dims = {b: len(v) for b, v in slots.items()}
    e_entries: dict[Bidegree, dict] = {}
    for lo, i, hi, j in edges:
        e_entries.setdefault(lo, {})[(j, i)] = ONE
    e = {b: SparseMatrix(dims.get(Bidegree(b.p, b.q + 1), 0), dims[b], ent) for b, ent in e_entries.items()}
    g = {b: _random_invertible(rng, k) for b, k in sorted(dims.items())}
    g_inv = {b: inverse(m) for b, m in g.items()}
    diff = {}
    for b, m in e.items():
        up = Bidegree(b.p, b.q + 1)
        diff[b] = g[up] @ m @ g_inv[b]
    return _Elementary(BigradedComplex(name, dims, diff), {b: tuple(v) for b, v in slots.items()}, g, g_inv, e)


def _random_matrix(rng: random.Random, rows: int, cols: int, density: float = 0.5) -> SparseMatrix:
    return SparseMatrix(rows, cols, {(i, j): as_scalar(rng.choice(_ENTRIES[3:]))
                                     for i in range(rows) for j in range(cols) if rng.random() < density})


def _random_elementary_map(rng: random.Random, a: _Elementary, b: _Elementary, name: str) -> ChainMap:
    """Cycle-to-cycle part plus a null-homotopic part ``d h + h d``, then conjugated."""
    keys = set(a.complex.dims)
    h = {}
    for k in keys:
        down = Bidegree(k.p, k.q - 1)
        if b.complex.dim(*down):
            h[k] = _random_matrix(rng, b.complex.dim(*down), a.complex.dim(*k), 0.4)
    blocks = {}
    for k in keys:
        rows, cols = b.complex.dim(*k), a.complex.dim(*k)
        base = {}
        src_kinds, tgt_kinds = a.kinds[k], b.kinds.get(k, ())
        for j, sk in enumerate(src_kinds):
            if sk != "h":
                continue
            for i, tk in enumerate(tgt_kinds):
                if tk in ("h", "top") and rng.random() < 0.6:
                    base[(i, j)] = as_scalar(rng.choice(_ENTRIES[3:]))
        f = SparseMatrix(rows, cols, base)
        # homotopy part, directly in the conjugated bases
        down, up = Bidegree(k.p, k.q - 1), Bidegree(k.p, k.q + 1)
        f_conj = (b.g[k] @ f @ a.g_inv[k]) if rows and cols else SparseMatrix.zeros(rows, cols)
        homotopy = SparseMatrix.zeros(rows, cols)
        if k in h:
            homotopy = homotopy + b.complex.d(*down) @ h[k]
        if up in h:
            homotopy = homotopy + h[up] @ a.complex.d(*k)
        blocks[k] = f_conj + homotopy
    return ChainMap(a.complex, b.complex, blocks, name=name)


def random_complex(seed: int, bounds: RandomBounds = RandomBounds(), name: str = "random") -> BigradedComplex:
    """Valid by construction: a sum of elementary pieces in a random basis."""
    return _random_elementary(random.Random(seed), name, bounds).complex


def random_chain_map(seed: int, bounds: RandomBounds = RandomBounds()) -> ChainMap:
    rng = random.Random(seed)
    a = _random_elementary(rng, "A", bounds)
    b = _random_elementary(rng, "B", bounds)
    return _random_elementary_map(rng, a, b, "f")


def random_valid_diagram(seed: int, bounds: RandomBounds = RandomBounds(), labels=(0, 1)) -> CoverDiagram:
    """Two-set diagram with random pieces, restrictions and extensions; deterministic per seed."""
    rng = random.Random(seed)
    u0 = _random_elementary(rng, f"r{seed}U0", bounds)
    u1 = _random_elementary(rng, f"r{seed}U1", bounds)
    u01 = _random_elementary(rng, f"r{seed}U01", bounds)
    a, b = labels
    restrict = {((a,), (a, b)): _random_elementary_map(rng, u0, u01, "r0"),
                ((b,), (a, b)): _random_elementary_map(rng, u1, u01, "r1")}
    extend = {((a,), (a, b)): _random_elementary_map(rng, u01, u0, "e0"),
              ((b,), (a, b)): _random_elementary_map(rng, u01, u1, "e1")}
    pieces = {(a,): u0.complex, (b,): u1.complex, (a, b): u01.complex}
    return CoverDiagram(labels, tuple(pieces), pieces, restrict, name=f"random{seed}", extend=extend)


def random_iso_diagram(seed: int, bounds: RandomBounds = RandomBounds(), acyclic: bool = True,
                       labels=(0, 1)) -> CoverDiagram:
    """Two-set diagram whose restriction ``U1 -> U01`` is a chain isomorphism."""
    rng = random.Random(seed)
    u0 = _random_elementary(rng, f"i{seed}U0", bounds)
    u1 = _random_elementary(rng, f"i{seed}U1", bounds, acyclic=acyclic)
    g = {b: _random_invertible(rng, k) for b, k in u1.complex.dims.items()}
    # U01 = U1 in the elementary basis, conjugated by a fresh change of basis
    diff = {b: g[Bidegree(b.p, b.q + 1)] @ m @ inverse(g[b]) for b, m in u1.e.items()}
    u01 = _Elementary(BigradedComplex(f"i{seed}U01", u1.complex.dims, diff), u1.kinds, g,
                      {b: inverse(m) for b, m in g.items()}, u1.e)
    iso = ChainMap(u1.complex, u01.complex, {b: g[b] @ u1.g_inv[b] for b in u1.complex.dims}, name="r1")
    a, b = labels
    restrict = {((a,), (a, b)): _random_elementary_map(rng, u0, u01, "r0"), ((b,), (a, b)): iso}
    pieces = {(a,): u0.complex, (b,): u1.complex, (a, b): u01.complex}
    return CoverDiagram(labels, tuple(pieces), pieces, restrict, name=f"iso{seed}")


def random_morphism(seed: int, bounds: RandomBounds = RandomBounds(), max_sheets: int = 3) -> CoverMorphism:
    """``base^k ⊕ extra -> base`` with pullback ``x ↦ (c_1 x, …, c_k x, 0)``."""
    rng = random.Random(seed)
    base = random_valid_diagram(rng.randrange(10 ** 6), bounds)
    extra = random_valid_diagram(rng.randrange(10 ** 6), bounds)
    k = rng.randint(1, max_sheets)
    coeffs = [rng.choice((1, 2, -1, I)) for _ in range(k)]
    src = sum_diagrams([base] * k + [extra], name=f"rm{seed}src")
    pull = {s: _stack(base.complex_at[s], src.complex_at[s], coeffs) for s in base.simplices}
    n = max(max(bounds.p_size, bounds.q_size) - 1, 0)
    return CoverMorphism(f"random-morphism{seed}", src, base, pull, base.index_set[0], n)


# ---------------------------------------------------------------- blow-up data

def _zero_diff_complex(name: str, dims: Mapping) -> BigradedComplex:
    return BigradedComplex(name, {Bidegree(*b): k for b, k in dims.items()})


@dataclass(frozen=True)
class BlowupParams:
    """Synthetic blow-up data over the two-set torus diagram of dimension ``n``.

    ``quotient``: extra relative classes on X̃ (the exceptional contribution).
    ``cancel``: extra pieces on Ũ1 and Ũ01 joined by an isomorphism (no net effect).
    ``target_extra``: relative classes already present on X.
    ``u0_deficit``: extra classes on Ũ0 that π* misses; any nonzero entry breaks
    the U0-level isomorphism and is rejected unless violations are allowed.
    """

    n: int = 1
    quotient: Mapping = field(default_factory=dict)
    cancel: Mapping = field(default_factory=dict)
    target_extra: Mapping = field(default_factory=dict)
    u0_deficit: Mapping = field(default_factory=dict)
    name: str = "blowup"


def _check_dims(params: BlowupParams, label: str, dims: Mapping):
    for (p, q), k in dims.items():
        if k < 0:
            raise InfeasibleParamsError(f"{label} requests negative dimension {k} at ({p},{q})")
        if not (0 <= p <= params.n and 0 <= q <= params.n):
            raise InfeasibleParamsError(f"{label} bidegree ({p},{q}) lies outside [0,{params.n}]^2")


def _piece_diagram(name: str, u0: Mapping, u1: Mapping, u01: Mapping, r1_rank_block: Mapping) -> CoverDiagram:
    """Zero-differential two-set diagram; ``U1 -> U01`` is the identity on the last
    ``r1_rank_block[b]`` coordinates of both sides and zero elsewhere."""
    c0, c1, c01 = (_zero_diff_complex(f"{name}{s}", d) for s, d in (("U0", u0), ("U1", u1), ("U01", u01)))
    blocks = {}
    for b, k in r1_rank_block.items():
        b = Bidegree(*b)
        rows, cols = c01.dim(*b), c1.dim(*b)
        blocks[b] = SparseMatrix(rows, cols, {(rows - k + t, cols - k + t): ONE for t in range(k)})
    r1 = ChainMap(c1, c01, blocks, name=f"{name}r1")
    r0 = ChainMap.zero(c0, c01)
    e0, e1 = ChainMap.zero(c01, c0), ChainMap.zero(c01, c1)
    pieces = {(0,): c0, (1,): c1, (0, 1): c01}
    return CoverDiagram((0, 1), tuple(pieces), pieces,
                        {((0,), (0, 1)): r0, ((1,), (0, 1)): r1}, name=name,
                        extend={((0,), (0, 1)): e0, ((1,), (0, 1)): e1})


def _add(*maps: Mapping) -> dict:
    out: dict = {}
    for m in maps:
        for b, k in m.items():
            out[tuple(b)] = out.get(tuple(b), 0) + k
    return out


def synthetic_blowup_bundle(params: BlowupParams, allow_violations: bool = False) -> ModelBundle:
    """Target ``X`` = torus cover ⊕ ``target_extra``; source = target ⊕ exceptional part.

    The exceptional part has ``H(X̃, X̃∖E) / π* H(X, X∖Z)`` equal to ``quotient``.
    """
    for label in ("quotient", "cancel", "target_extra", "u0_deficit"):
        _check_dims(params, label, getattr(params, label))
    bad = {b: k for b, k in params.u0_deficit.items() if k}
    if bad and not allow_violations:
        where = ", ".join(f"({p},{q})" for p, q in sorted(bad))
        raise InfeasibleParamsError(
            f"u0_deficit breaks the U0-level isomorphism at {where} "
            f"(and surjectivity one step up); no blow-up decomposition can be certified")
    torus = torus_model(params.n)
    t_diag = model_two_set_diagram(torus)
    extra = _piece_diagram("Xextra", {}, params.target_extra, {}, {})
    target = sum_diagrams([t_diag, extra], name=f"{params.name}-X")
    exc = _piece_diagram("E", params.u0_deficit, _add(params.quotient, params.cancel), params.cancel,
                         params.cancel)
    source = sum_diagrams([t_diag, extra, exc], name=f"{params.name}-Xt")
    pull = {s: _stack(target.complex_at[s], source.complex_at[s], [1]) for s in target.simplices}
    morph = CoverMorphism(f"{params.name}-tau", source, target, pull, 0, params.n)
    expected = {}
    for p in range(params.n + 1):
        for q in range(params.n + 1):
            h = comb(params.n, p) * comb(params.n, q) + params.target_extra.get((p, q), 0)
            qd = params.quotient.get((p, q), 0)
            expected[("h_global_target", Bidegree(p, q))] = h
            expected[("quotient_dim", Bidegree(p, q))] = qd
            expected[("h_global_source", Bidegree(p, q))] = h + qd
    return ModelBundle(params.name, diagrams={target.name: target, source.name: source},
                       morphisms={morph.name: morph}, expected=expected)


# ---------------------------------------------------------------- bundles

@dataclass(frozen=True, eq=False)
class ModelBundle:
    name: str
    models: Mapping[str, DgaModel] = field(default_factory=dict)
    complexes: Mapping[str, BigradedComplex] = field(default_factory=dict)
    diagrams: Mapping[str, CoverDiagram] = field(default_factory=dict)
    pairings: Mapping[str, PairingData] = field(default_factory=dict)
    diagram_pairings: Mapping[str, Mapping[tuple, str]] = field(default_factory=dict)
    morphisms: Mapping[str, CoverMorphism] = field(default_factory=dict)
    expected: Mapping[tuple[str, Bidegree], int] = field(default_factory=dict)

    def issues(self) -> list[str]:
        out = []
        for dname, pmap in self.diagram_pairings.items():
            if dname not in self.diagrams:
                out.append(f"pairings refer to unknown diagram {dname!r}")
            for s, pname in pmap.items():
                if pname not in self.pairings:
                    out.append(f"diagram {dname!r} refers to unknown pairing {pname!r}")
        return out

    def pairings_for(self, diagram: str) -> dict | None:
        pmap = self.diagram_pairings.get(diagram)
        if pmap is None:
            return None
        return {tuple(s): self.pairings[name] for s, name in pmap.items()}


def torus_bundle(n: int) -> ModelBundle:
    m = torus_model(n)
    d = model_two_set_diagram(m)
    pd = pairing_from_model(m)
    expected = {("h", Bidegree(p, q)): comb(n, p) * comb(n, q) for p in range(n + 1) for q in range(n + 1)}
    return ModelBundle(f"torus-{n}", models={m.name: m}, diagrams={d.name: d}, pairings={pd.name: pd},
                       diagram_pairings={d.name: {s: pd.name for s in d.simplices}}, expected=expected)


def cover_bundle(n: int, k: int, broken: bool = False) -> ModelBundle:
    m = torus_model(n)
    d = model_two_set_diagram(m)
    pd = pairing_from_model(m)
    pairs = {s: pd for s in d.simplices}
    morph = broken_cover_morphism(d, pairs) if broken else disjoint_cover_morphism(d, k, pairs)
    src_pd = next(iter(morph.source_pairings.values()))
    src_model = src_pd.model
    return ModelBundle(
        morph.name, models={m.name: m, src_model.name: src_model},
        diagrams={d.name: d, morph.source.name: morph.source},
        pairings={pd.name: pd, src_pd.name: src_pd},
        diagram_pairings={d.name: {s: pd.name for s in d.simplices},
                          morph.source.name: {s: src_pd.name for s in d.simplices}},
        morphisms={morph.name: morph},
        expected={("mu", Bidegree(0, 0)): 3 if broken else k})


CORPUS: dict[str, Callable[[], ModelBundle]] = {
    "torus-1": lambda: torus_bundle(1),
    "torus-2": lambda: torus_bundle(2),
    "cover1-torus-1": lambda: cover_bundle(1, 1),
    "cover2-torus-1": lambda: cover_bundle(1, 2),
    "cover3-torus-1": lambda: cover_bundle(1, 3),
    "cover2-torus-2": lambda: cover_bundle(2, 2),
    "broken-torus-1": lambda: cover_bundle(1, 2, broken=True),
    "blowup-trivial": lambda: synthetic_blowup_bundle(BlowupParams(1, name="blowup-trivial")),
    "blowup-11": lambda: synthetic_blowup_bundle(BlowupParams(1, {(1, 1): 1}, name="blowup-11")),
    "blowup-surface": lambda: synthetic_blowup_bundle(
        BlowupParams(2, {(1, 1): 1}, {(0, 1): 1}, name="blowup-surface")),
    "blowup-mixed": lambda: synthetic_blowup_bundle(
        BlowupParams(2, {(1, 1): 1, (2, 2): 1}, {(1, 1): 1}, {(0, 2): 1}, name="blowup-mixed")),
    "blowup-threefold": lambda: synthetic_blowup_bundle(
        BlowupParams(3, {(1, 1): 1, (2, 2): 1}, name="blowup-threefold")),
    "blowup-violating": lambda: synthetic_blowup_bundle(
        BlowupParams(1, {(1, 1): 1}, u0_deficit={(0, 0): 1}, name="blowup-violating"),
        allow_violations=True),
}


def named_bundle(name: str) -> ModelBundle:
    try:
        return CORPUS[name]()
    except KeyError:
        raise KeyError(f"unknown bundle {name!r}; known: {', '.join(CORPUS)}") from None
