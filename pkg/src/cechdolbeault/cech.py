"""Cover diagrams, the Čech double complex and its total complex.

A :class:`CoverDiagram` is the combinatorial shadow of an open cover: the
nerve (strictly increasing label tuples), one complex per intersection and a
restriction chain map for every codimension-one face inclusion.

Components of every Čech space are ordered by ``(r, simplex, basis index)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Mapping, Sequence

from .complexes import Bidegree, BigradedComplex, ChainMap, CohomologyGroup, cohomology
from .dga import DgaModel
from .errors import CechDolbeaultError, DiagramError, UnsupportedRelativeError
from .linalg import SparseMatrix, Vector
from .scalars import ONE, ZERO
from .sequences import ShortExactSequence

__all__ = [
    "CoverDiagram",
    "CechDoubleComplex",
    "CechElement",
    "validate_diagram",
    "build_double_complex",
    "total_complex",
    "total_layout",
    "cech_cohomology",
    "canonical_map",
    "relative_complex",
    "relative_indices",
    "ses_of_pair",
    "cech_map",
    "relative_cech_map",
    "constant_diagram",
    "glue_global",
]

Simplex = tuple


def _faces(s: Simplex) -> list[tuple[int, Simplex]]:
    """Codimension-one faces of ``s`` as ``(nu, face)`` with ``face = s minus s[nu]``."""
    return [(nu, s[:nu] + s[nu + 1:]) for nu in range(len(s))]


@dataclass(frozen=True, eq=False)
class CoverDiagram:
    index_set: tuple
    simplices: tuple
    complex_at: Mapping[Simplex, BigradedComplex]
    restrict: Mapping[tuple[Simplex, Simplex], ChainMap]
    name: str = "diagram"
    ambient: BigradedComplex | None = None
    ambient_restrict: Mapping[Hashable, ChainMap] = field(default_factory=dict)
    # compactly supported extension maps complex_at[simplex] -> complex_at[face]
    extend: Mapping[tuple[Simplex, Simplex], ChainMap] = field(default_factory=dict)

    def __post_init__(self):
        simplices = sorted({tuple(s) for s in self.simplices}, key=lambda s: (len(s), s))
        object.__setattr__(self, "index_set", tuple(self.index_set))
        object.__setattr__(self, "simplices", tuple(simplices))
        object.__setattr__(self, "complex_at", {tuple(k): v for k, v in self.complex_at.items()})
        object.__setattr__(self, "restrict",
                           {(tuple(a), tuple(b)): f for (a, b), f in self.restrict.items()})
        object.__setattr__(self, "extend",
                           {(tuple(a), tuple(b)): f for (a, b), f in self.extend.items()})
        object.__setattr__(self, "ambient_restrict", dict(self.ambient_restrict))

    @property
    def max_r(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of(self, r: int) -> list[Simplex]:
        return [s for s in self.simplices if len(s) == r + 1]

    def restriction(self, face: Simplex, simplex: Simplex) -> ChainMap:
        """Restriction ``complex_at[face] -> complex_at[simplex]``, composed if needed."""
        face, simplex = tuple(face), tuple(simplex)
        if face == simplex:
            return ChainMap.identity(self.complex_at[face])
        f = self.restrict.get((face, simplex))
        if f is not None:
            return f
        missing = [a for a in simplex if a not in face]
        if not missing or any(a not in simplex for a in face):
            raise DiagramError(f"{face} is not a face of {simplex}")
        mid = tuple(a for a in simplex if a != missing[-1])
        return self.restriction(mid, simplex).compose(self.restriction(face, mid))

    @cached_property
    def issues(self) -> list[str]:
        return validate_diagram(self)

    @cached_property
    def double_complex(self) -> CechDoubleComplex:
        return build_double_complex(self)

    @cached_property
    def total(self) -> BigradedComplex:
        return total_complex(self.double_complex)

    def piece_ps(self) -> list[int]:
        return sorted({p for c in self.complex_at.values() for p in c.ps})


def validate_diagram(d: CoverDiagram) -> list[str]:
    out = []
    labels = set(d.index_set)
    order = {a: k for k, a in enumerate(d.index_set)}
    simplex_set = set(d.simplices)
    for s in d.simplices:
        if not s or any(a not in labels for a in s):
            out.append(f"simplex {s} uses labels outside the index set")
            continue
        if any(order[s[k]] >= order[s[k + 1]] for k in range(len(s) - 1)):
            out.append(f"simplex {s} is not strictly increasing")
        if s not in d.complex_at:
            out.append(f"simplex {s} has no complex")
        if len(s) > 1:
            for _, face in _faces(s):
                if face not in simplex_set:
                    out.append(f"face {face} of {s} is not listed (nerve not closed)")
    for a in d.index_set:
        if (a,) not in simplex_set:
            out.append(f"vertex {a!r} is not listed")
    if out:
        return out
    for s, c in d.complex_at.items():
        out.extend(f"complex on {s}: {i}" for i in c.issues)
    for s in d.simplices:
        if len(s) < 2:
            continue
        for _, face in _faces(s):
            f = d.restrict.get((face, s))
            if f is None:
                out.append(f"missing restriction {face} -> {s}")
                continue
            if f.source is not d.complex_at[face] and f.source.dims != d.complex_at[face].dims:
                out.append(f"restriction {face} -> {s} has the wrong source")
            if f.target is not d.complex_at[s] and f.target.dims != d.complex_at[s].dims:
                out.append(f"restriction {face} -> {s} has the wrong target")
            if f.shift != (0, 0):
                out.append(f"restriction {face} -> {s} has a nonzero shift")
            out.extend(f"restriction {face} -> {s}: {i}" for i in f.defects)
    if out:
        return out
    # functoriality: both routes around every codimension-two face agree
    for s in d.simplices:
        if len(s) < 3:
            continue
        for a, b in combinations(s, 2):
            small = tuple(x for x in s if x not in (a, b))
            via_a = tuple(x for x in s if x != a)
            via_b = tuple(x for x in s if x != b)
            route_a = d.restrict[(via_a, s)].compose(d.restrict[(small, via_a)])
            route_b = d.restrict[(via_b, s)].compose(d.restrict[(small, via_b)])
            if any(route_a.block(*k) != route_b.block(*k) for k in d.complex_at[small].dims):
                out.append(f"restrictions are not functorial: {small} -> {via_a} -> {s} "
                           f"differs from {small} -> {via_b} -> {s}")
    for (face, s), f in d.restrict.items():
        if len(s) - len(face) > 1:
            composite = _face_composite(d, face, s)
            if any(composite.block(*k) != f.block(*k) for k in d.complex_at[face].dims):
                out.append(f"restriction {face} -> {s} is not the composite of face restrictions")
    for (face, s), e in d.extend.items():
        out.extend(f"extension {s} -> {face}: {i}" for i in e.defects)
    if d.ambient is not None:
        for a in d.index_set:
            g = d.ambient_restrict.get(a)
            if g is None:
                out.append(f"missing ambient restriction to {a!r}")
            else:
                out.extend(f"ambient restriction to {a!r}: {i}" for i in g.defects)
        if not out:
            for s in d.simplices_of(1):
                a, b = s
                ra = d.restrict[((a,), s)].compose(d.ambient_restrict[a])
                rb = d.restrict[((b,), s)].compose(d.ambient_restrict[b])
                if any(ra.block(*k) != rb.block(*k) for k in d.ambient.dims):
                    out.append(f"ambient restrictions disagree on {s}")
    return out


def _face_composite(d: CoverDiagram, face: Simplex, s: Simplex) -> ChainMap:
    """Composite of codimension-one restrictions from ``face`` up to ``s``."""
    chain = [face]
    for a in s:
        if a not in chain[-1]:
            chain.append(tuple(x for x in s if x in chain[-1] or x == a))
    f = ChainMap.identity(d.complex_at[face])
    for lo, hi in zip(chain, chain[1:]):
        f = d.restrict[(lo, hi)].compose(f)
    return f


def _require_valid(d: CoverDiagram):
    if d.issues:
        raise DiagramError(f"diagram {d.name!r} is not valid: " + "; ".join(d.issues))


@dataclass(frozen=True, eq=False)
class CechDoubleComplex:
    """``B^r(U, K^{p,s})`` with Čech boundary ``delta`` and componentwise ``dbar``."""

    diagram: CoverDiagram
    ps: tuple

    def components(self, r: int, p: int, s: int) -> list[tuple[Simplex, int, int]]:
        out, off = [], 0
        for sigma in self.diagram.simplices_of(r):
            n = self.diagram.complex_at[sigma].dim(p, s)
            out.append((sigma, off, n))
            off += n
        return out

    def dim(self, r: int, p: int, s: int) -> int:
        return sum(n for _, _, n in self.components(r, p, s))

    def delta(self, r: int, p: int, s: int) -> SparseMatrix:
        """``(δT)_{α0..α_{r+1}} = Σ_ν (-1)^ν T_{..α̂_ν..}`` restricted."""
        d = self.diagram
        src = {sigma: off for sigma, off, _ in self.components(r, p, s)}
        entries = {}
        for tau, toff, _ in self.components(r + 1, p, s):
            for nu, face in _faces(tau):
                block = d.restrict[(face, tau)].block(p, s)
                sign = -1 if nu % 2 else 1
                for (i, j), x in block.entries.items():
                    key = (toff + i, src[face] + j)
                    entries[key] = entries.get(key, ZERO) + (x if sign > 0 else -x)
        return SparseMatrix(self.dim(r + 1, p, s), self.dim(r, p, s), entries)

    def dbar(self, r: int, p: int, s: int) -> SparseMatrix:
        d = self.diagram
        return SparseMatrix.block_diag([d.complex_at[sigma].d(p, s) for sigma in d.simplices_of(r)])

    def s_range(self, p: int) -> range:
        spans = [c.q_span(p) for c in self.diagram.complex_at.values()]
        spans = [sp for sp in spans if sp is not None]
        if not spans:
            return range(0)
        return range(min(a for a, _ in spans), max(b for _, b in spans) + 1)

    def check(self) -> list[str]:
        out = []
        rmax = self.diagram.max_r
        for p in self.ps:
            for s in self.s_range(p):
                for r in range(rmax + 1):
                    if not (self.delta(r + 1, p, s) @ self.delta(r, p, s)).is_zero():
                        out.append(f"δ∘δ≠0 at r={r}, (p,s)=({p},{s})")
                    if not (self.dbar(r, p, s + 1) @ self.dbar(r, p, s)).is_zero():
                        out.append(f"∂̄∘∂̄≠0 at r={r}, (p,s)=({p},{s})")
                    if self.delta(r, p, s + 1) @ self.dbar(r, p, s) != self.dbar(r + 1, p, s) @ self.delta(r, p, s):
                        out.append(f"δ∂̄≠∂̄δ at r={r}, (p,s)=({p},{s})")
        return out


def build_double_complex(d: CoverDiagram, p: int | None = None) -> CechDoubleComplex:
    _require_valid(d)
    ps = tuple(d.piece_ps()) if p is None else (p,)
    dc = CechDoubleComplex(d, ps)
    problems = dc.check()
    if problems:
        raise DiagramError(f"diagram {d.name!r} does not give a double complex: " + "; ".join(problems))
    return dc


def total_layout(d: CoverDiagram, p: int, q: int) -> list[tuple[int, Simplex, int, int]]:
    """Components ``(r, simplex, offset, dim)`` of the total space at ``(p, q)``."""
    out, off = [], 0
    for r in range(d.max_r + 1):
        for sigma in d.simplices_of(r):
            n = d.complex_at[sigma].dim(p, q - r)
            out.append((r, sigma, off, n))
            off += n
    return out


def _total_d(d: CoverDiagram, p: int, q: int) -> SparseMatrix:
    src = total_layout(d, p, q)
    tgt = total_layout(d, p, q + 1)
    tgt_off = {(r, sigma): off for r, sigma, off, _ in tgt}
    entries = {}

    def put(i, j, x):
        key = (i, j)
        entries[key] = entries.get(key, ZERO) + x

    for r, sigma, off, n in src:
        if not n:
            continue
        s = q - r
        # (-1)^r ∂̄ on the same component
        dbar = d.complex_at[sigma].d(p, s)
        sign_r = -1 if r % 2 else 1
        toff = tgt_off[(r, sigma)]
        for (i, j), x in dbar.entries.items():
            put(toff + i, off + j, x if sign_r > 0 else -x)
        # Čech part into every coface
        for tau in d.simplices_of(r + 1):
            for nu, face in _faces(tau):
                if face != sigma:
                    continue
                block = d.restrict[(face, tau)].block(p, s)
                toff = tgt_off[(r + 1, tau)]
                for (i, j), x in block.entries.items():
                    put(toff + i, off + j, -x if nu % 2 else x)
    return SparseMatrix(sum(n for *_, n in tgt), sum(n for *_, n in src), entries)


def total_complex(dc: CechDoubleComplex) -> BigradedComplex:
    """``⊕_{r+s=q} B^r(U, K^{p,s})`` with ``D = δ + (-1)^r ∂̄``."""
    d = dc.diagram
    dims, diff = {}, {}
    for p in dc.ps:
        srange = dc.s_range(p)
        if not srange:
            continue
        qs = range(srange.start, srange.stop + d.max_r)
        for q in qs:
            n = sum(c[3] for c in total_layout(d, p, q))
            if n:
                dims[Bidegree(p, q)] = n
        for q in qs:
            m = _total_d(d, p, q)
            if not m.is_zero():
                diff[Bidegree(p, q)] = m
    return BigradedComplex(f"Tot({d.name})", dims, diff)


@dataclass(frozen=True)
class CechElement:
    """A cochain of total degree ``(p, q)``: one vector per simplex."""

    p: int
    q: int
    components: Mapping[Simplex, Vector]

    def to_vector(self, d: CoverDiagram) -> Vector:
        out = []
        for r, sigma, _, n in total_layout(d, self.p, self.q):
            v = self.components.get(sigma)
            if v is None:
                out.extend([ZERO] * n)
            else:
                if len(v) != n:
                    raise ValueError(f"component on {sigma} has length {len(v)}, expected {n}")
                out.extend(v)
        return tuple(out)

    @classmethod
    def from_vector(cls, d: CoverDiagram, p: int, q: int, v: Vector) -> CechElement:
        comps = {}
        for r, sigma, off, n in total_layout(d, p, q):
            comps[sigma] = tuple(v[off:off + n])
        return cls(p, q, comps)


def cech_cohomology(d: CoverDiagram, p: int, q: int) -> CohomologyGroup:
    return cohomology(d.total, p, q)


def canonical_map(d: CoverDiagram) -> ChainMap:
    """``ξ ↦ (ξ|U_α)_α`` from the ambient complex into the total complex."""
    _require_valid(d)
    if d.ambient is None:
        raise DiagramError(f"diagram {d.name!r} has no ambient complex")
    tot = d.total
    blocks = {}
    for p, q in d.ambient.dims:
        layout = total_layout(d, p, q)
        rows = sum(c[3] for c in layout)
        entries = {}
        for r, sigma, off, n in layout:
            if r:
                continue
            g = d.ambient_restrict[sigma[0]].block(p, q)
            for (i, j), x in g.entries.items():
                entries[(off + i, j)] = x
        blocks[Bidegree(p, q)] = SparseMatrix(rows, d.ambient.dim(p, q), entries)
    return ChainMap(d.ambient, tot, blocks, name=f"can[{d.name}]").require()


def _two_set(d: CoverDiagram, omit) -> Hashable:
    if len(d.index_set) != 2:
        raise UnsupportedRelativeError(
            f"relative complexes need a two-set cover, got {len(d.index_set)} sets")
    if omit not in d.index_set:
        raise UnsupportedRelativeError(f"label {omit!r} is not in the index set {d.index_set}")
    return next(a for a in d.index_set if a != omit)


def relative_indices(d: CoverDiagram, p: int, q: int, omit) -> list[int]:
    """Indices of the total space at ``(p, q)`` that survive ``ξ_omit = 0``."""
    keep = []
    for r, sigma, off, n in total_layout(d, p, q):
        if sigma != (omit,):
            keep.extend(range(off, off + n))
    return keep


def relative_complex(d: CoverDiagram, omit) -> BigradedComplex:
    """Subcomplex ``{ξ : ξ_omit = 0} = A(U1) ⊕ A(U01)[-1]`` of the total complex."""
    _two_set(d, omit)
    tot = d.total
    keys = set(tot.dims) | {Bidegree(b.p, b.q - 1) for b in tot.dims}
    dims, diff = {}, {}
    for p, q in sorted(keys):
        src = relative_indices(d, p, q, omit)
        if src:
            dims[Bidegree(p, q)] = len(src)
        tgt = relative_indices(d, p, q + 1, omit)
        m = tot.d(p, q).submatrix(tgt, src)
        if not m.is_zero():
            diff[Bidegree(p, q)] = m
    return BigradedComplex(f"Rel({d.name},{omit})", dims, diff)


def _selection(n_total: int, idx: Sequence[int]) -> SparseMatrix:
    """Inclusion of the coordinates ``idx`` into a space of dimension ``n_total``."""
    return SparseMatrix(n_total, len(idx), {(i, k): ONE for k, i in enumerate(idx)})


def ses_of_pair(d: CoverDiagram, omit) -> ShortExactSequence:
    """``0 → A(U, U0) → A(U) → A(U0) → 0`` for the two-set cover with ``U0 = omit``."""
    _two_set(d, omit)
    tot = d.total
    rel = relative_complex(d, omit)
    quot = d.complex_at[(omit,)]
    incl, proj = {}, {}
    for p, q in set(tot.dims) | set(rel.dims) | set(quot.dims):
        n = sum(c[3] for c in total_layout(d, p, q))
        keep = relative_indices(d, p, q, omit)
        incl[Bidegree(p, q)] = _selection(n, keep)
        omit_off = next(off for r, s, off, _ in total_layout(d, p, q) if s == (omit,))
        proj[Bidegree(p, q)] = _selection(n, range(omit_off, omit_off + quot.dim(p, q))).T
    return ShortExactSequence(
        rel, tot, quot,
        ChainMap(rel, tot, incl, name=f"incl[{d.name}]"),
        ChainMap(tot, quot, proj, name=f"proj[{d.name}]"),
    )


def cech_map(src: CoverDiagram, tgt: CoverDiagram, piece_maps: Mapping[Simplex, ChainMap],
             name: str = "") -> ChainMap:
    """Map of total complexes induced by per-simplex chain maps ``src[σ] -> tgt[σ]``."""
    if src.simplices != tgt.simplices:
        raise DiagramError("diagrams have different nerves")
    S, T = src.total, tgt.total
    blocks = {}
    for p, q in S.dims:
        rows = T.dim(p, q)
        entries = {}
        t_layout = {sigma: off for _, sigma, off, _ in total_layout(tgt, p, q)}
        for r, sigma, off, n in total_layout(src, p, q):
            f = piece_maps.get(sigma)
            if f is None or not n:
                continue
            for (i, j), x in f.block(p, q - r).entries.items():
                entries[(t_layout[sigma] + i, off + j)] = x
        blocks[Bidegree(p, q)] = SparseMatrix(rows, S.dim(p, q), entries)
    return ChainMap(S, T, blocks, name=name or f"{src.name}->{tgt.name}")


def relative_cech_map(src: CoverDiagram, tgt: CoverDiagram, piece_maps: Mapping[Simplex, ChainMap],
                      omit, name: str = "") -> ChainMap:
    """Restriction of :func:`cech_map` to the relative complexes."""
    full = cech_map(src, tgt, piece_maps)
    rs, rt = relative_complex(src, omit), relative_complex(tgt, omit)
    blocks = {}
    for p, q in rs.dims:
        blocks[Bidegree(p, q)] = full.block(p, q).submatrix(
            relative_indices(tgt, p, q, omit), relative_indices(src, p, q, omit))
    return ChainMap(rs, rt, blocks, name=name or f"rel[{src.name}->{tgt.name}]")


def constant_diagram(c: BigradedComplex, labels: Sequence = (0, 1), name: str | None = None) -> CoverDiagram:
    """Full nerve on ``labels`` with ``c`` on every simplex and identity restrictions."""
    labels = tuple(labels)
    simplices = [s for r in range(1, len(labels) + 1) for s in combinations(labels, r)]
    ident = ChainMap.identity(c)
    restrict = {(face, s): ident for s in simplices if len(s) > 1 for _, face in _faces(s)}
    return CoverDiagram(labels, tuple(simplices), {s: c for s in simplices}, restrict,
                        name=name or f"{c.name}-cover{len(labels)}", ambient=c,
                        ambient_restrict={a: ident for a in labels},
                        extend={k: ident for k in restrict})


def glue_global(m: DgaModel, x: CechElement, labels: Sequence = (0, 1)) -> Vector:
    """Global form ``ρ0 ξ0 + ρ1 ξ1 - ∂̄ρ0 ∧ ξ01`` for a closed two-set cochain ``x``."""
    if m.partition is None:
        raise CechDolbeaultError(f"model {m.name!r} carries no partition of unity")
    if len(labels) != 2:
        raise UnsupportedRelativeError("gluing is defined for two-set covers only")
    a, b = labels
    d = constant_diagram(m.complex, labels)
    p, q = x.p, x.q
    v = x.to_vector(d)
    if any(d.total.d(p, q).apply(v)):
        raise CechDolbeaultError(f"cochain at ({p},{q}) is not D̄-closed")
    rho0, rho1 = m.partition
    zero = Bidegree(0, 0)
    n = m.complex.dim(p, q)
    xi0 = x.components.get((a,), (ZERO,) * n)
    xi1 = x.components.get((b,), (ZERO,) * n)
    xi01 = x.components.get((a, b), (ZERO,) * m.complex.dim(p, q - 1))
    t0 = m.wedge(zero, rho0, (p, q), xi0)
    t1 = m.wedge(zero, rho1, (p, q), xi1)
    drho0 = m.d(zero, rho0)
    t2 = m.wedge((0, 1), drho0, (p, q - 1), xi01)
    eta = tuple(u + w - z for u, w, z in zip(t0, t1, t2))
    if any(m.d((p, q), eta)):
        raise CechDolbeaultError("glued form is not ∂̄-closed; model axioms are violated")
    return eta
