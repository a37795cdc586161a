"""Currents as linear duals of finite form complexes.

The current space ``K^{p,q}`` is the dual of the form space in bidegree
``(n-p, n-q)``. Its differential is fixed by ``<dT, φ> = (-1)^{p+q+1} <T, dφ>``,
so on matrices ``dK(p,q) = (-1)^{p+q+1} · d(n-p, n-q-1)^T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .cech import CoverDiagram, cech_map, relative_cech_map, relative_complex, ses_of_pair
from .complexes import Bidegree, BigradedComplex, ChainMap, _require_valid, induced_map
from .dga import DgaModel
from .errors import DiagramError, PairingSquareError, ShapeError, StokesError
from .linalg import SparseMatrix, inverse, rank
from .sequences import LadderReport, LesReport, assemble_les, compare_les

__all__ = [
    "DualComplex",
    "dualize",
    "dual_chain_map",
    "double_dual_iso",
    "sign_identity_holds",
    "PairingData",
    "pairing_from_model",
    "FormToCurrent",
    "form_to_current",
    "dual_diagram",
    "relative_current_complex",
    "FormsCurrentsReport",
    "compare_forms_currents",
]


@dataclass(frozen=True, eq=False)
class DualComplex:
    base: BigradedComplex
    n: int
    dual: BigradedComplex


def _check_support(c: BigradedComplex, n: int):
    bad = [b for b in c.dims if not (0 <= b.p <= n and 0 <= b.q <= n)]
    if bad:
        raise ShapeError(f"complex {c.name!r} has spaces outside [0,{n}]x[0,{n}]: "
                         + ", ".join(map(str, bad)))


def dualize(c: BigradedComplex, n: int) -> DualComplex:
    """Dual complex with the current sign rule; cached per ``(c, n)``."""
    cache = c._dual_cache
    if n in cache:
        return cache[n]
    _require_valid(c)
    _check_support(c, n)
    dims = {Bidegree(n - b.p, n - b.q): k for b, k in c.dims.items()}
    diff = {}
    for p in range(n + 1):
        for q in range(n):
            m = c.d(n - p, n - q - 1).T
            if m.is_zero():
                continue
            diff[Bidegree(p, q)] = -m if (p + q) % 2 == 0 else m
    out = DualComplex(c, n, BigradedComplex(f"K({c.name})", dims, diff))
    cache[n] = out
    return out


def sign_identity_holds(c: BigradedComplex, n: int) -> list[Bidegree]:
    """Bidegrees where ``<dT, φ> + (-1)^{p+q} <T, dφ> = 0`` fails (empty when all hold)."""
    k = dualize(c, n).dual
    bad = []
    for p in range(n + 1):
        for q in range(n):
            # as bilinear forms on K(p,q) x A(n-p, n-q-1)
            lhs = k.d(p, q).T
            rhs = c.d(n - p, n - q - 1)
            if (lhs + rhs if (p + q) % 2 == 0 else lhs - rhs) != SparseMatrix.zeros(*lhs.shape):
                bad.append(Bidegree(p, q))
    return bad


def dual_chain_map(f: ChainMap, n: int, source_dual: DualComplex | None = None,
                   target_dual: DualComplex | None = None) -> ChainMap:
    """Transpose ``f: A -> B`` into ``K(B) -> K(A)``; ``K(B)(p,q)`` maps by ``f(n-p,n-q)^T``."""
    if f.shift != (0, 0):
        raise ValueError("only shift-(0,0) maps can be dualized")
    ka = (source_dual or dualize(f.source, n)).dual
    kb = (target_dual or dualize(f.target, n)).dual
    blocks = {}
    for p, q in kb.dims:
        blocks[Bidegree(p, q)] = f.block(n - p, n - q).T
    return ChainMap(kb, ka, blocks, name=f"{f.name}^T")


def double_dual_iso(c: BigradedComplex, n: int) -> ChainMap:
    """``c -> K(K(c))``; the double dual differential is ``-d``, hence the ``(-1)^q`` scaling."""
    dd = dualize(dualize(c, n).dual, n).dual
    blocks = {b: SparseMatrix.identity(k, -1 if b.q % 2 else 1) for b, k in c.dims.items()}
    return ChainMap(c, dd, blocks, name=f"ev[{c.name}]").require()


@dataclass(frozen=True, eq=False)
class PairingData:
    """``pairing[(p,q)][i, j] = ∫ e_i ∧ f_j`` for ``e_i`` in ``(p,q)`` and ``f_j`` in ``(n-p,n-q)``."""

    complex: BigradedComplex
    n: int
    pairing: Mapping[Bidegree, SparseMatrix] = field(default_factory=dict)
    model: DgaModel | None = None
    name: str = "pairing"

    def __post_init__(self):
        object.__setattr__(self, "pairing", {Bidegree(*k): m for k, m in sorted(self.pairing.items())})

    def block(self, p: int, q: int) -> SparseMatrix:
        m = self.pairing.get((p, q))
        if m is None:
            return SparseMatrix.zeros(self.complex.dim(p, q), self.complex.dim(self.n - p, self.n - q))
        return m

    def scaled(self, s, name: str | None = None) -> PairingData:
        return PairingData(self.complex, self.n, {k: m.scale(s) for k, m in self.pairing.items()},
                           self.model, name or f"{s}*{self.name}")

    def issues(self) -> list[str]:
        out = []
        for b, m in self.pairing.items():
            expected = (self.complex.dim(*b), self.complex.dim(self.n - b.p, self.n - b.q))
            if m.shape != expected:
                out.append(f"pairing block {b} has shape {m.shape}, expected {expected}")
        if self.model is not None and self.model.complex is not self.complex:
            out.append("pairing model does not match the paired complex")
        return out


def pairing_from_model(m: DgaModel, name: str | None = None) -> PairingData:
    if m.integral is None or m.n is None:
        raise StokesError(f"model {m.name!r} has no integration functional")
    n, c = m.n, m.complex
    blocks = {}
    for p in range(n + 1):
        for q in range(n + 1):
            a, b = Bidegree(p, q), Bidegree(n - p, n - q)
            if not c.dim(*a) or not c.dim(*b):
                continue
            left = m.product_table(a, b)
            nb = c.dim(*b)
            # ∫ e_i ∧ f_j = integral · column (i * nb + j) of the product table
            entries = {}
            for (k, col), x in left.entries.items():
                y = m.integral[k]
                if y:
                    i, j = divmod(col, nb)
                    entries[(i, j)] = entries.get((i, j), 0) + x * y
            blocks[a] = SparseMatrix(c.dim(*a), nb, entries)
    return PairingData(c, n, blocks, m, name or f"∫[{m.name}]")


def _stokes_defects(pd: PairingData) -> list[str]:
    out = []
    m = pd.model
    if m is not None and m.integral is not None and m.n == pd.n:
        n = pd.n
        for i in range(m.dim((n, n - 1))):
            eta = m.basis_vector((n, n - 1), i)
            if m.integrate(m.d((n, n - 1), eta)):
                out.append(f"∫ d(eta) != 0 for eta = basis element {i} of ({n},{n - 1})")
    return out


@dataclass(frozen=True, eq=False)
class FormToCurrent:
    map: ChainMap
    injective_at: Mapping[Bidegree, bool]

    @property
    def injective(self) -> bool:
        return all(self.injective_at.values())


def form_to_current(pd: PairingData) -> FormToCurrent:
    """``i(φ) = ∫ φ ∧ ·`` as a chain map from forms to currents."""
    problems = pd.issues()
    if problems:
        raise ShapeError("; ".join(problems))
    stokes = _stokes_defects(pd)
    if stokes:
        raise StokesError("Stokes compatibility fails: " + "; ".join(stokes))
    c, n = pd.complex, pd.n
    k = dualize(c, n).dual
    blocks = {b: pd.block(*b).T for b in c.dims}
    f = ChainMap(c, k, blocks, name=f"i[{pd.name}]")
    if f.defects:
        where = ", ".join(str(d.at) for d in f.defects)
        raise StokesError(f"pairing {pd.name!r} is not compatible with d: "
                          f"∫ dη ∧ ψ ± ∫ η ∧ dψ != 0 for η in bidegree {where}")
    inj = {b: rank(blocks[b]) == c.dim(*b) for b in c.dims}
    return FormToCurrent(f, inj)


def _extension_from_pairings(face_pd: PairingData, simplex_pd: PairingData, r: ChainMap,
                             n: int) -> ChainMap:
    """Solve ``P_face · e = r^T · P_simplex`` degreewise for the extension ``e``."""
    src, tgt = r.target, r.source
    blocks = {}
    for p, q in src.dims:
        a = Bidegree(n - p, n - q)
        pf = face_pd.block(*a)
        if pf.rows != pf.cols or rank(pf) != pf.rows:
            raise DiagramError(f"pairing {face_pd.name!r} is degenerate at {a}; "
                               f"supply explicit extension maps")
        blocks[Bidegree(p, q)] = inverse(pf) @ r.block(*a).T @ simplex_pd.block(*a)
    return ChainMap(src, tgt, blocks, name=f"ext[{r.name}]")


def dual_diagram(d: CoverDiagram, n: int, pairings: Mapping | None = None) -> CoverDiagram:
    """Diagram of current complexes; restrictions of currents are transposed extensions.

    Extensions come from ``d.extend`` when present, otherwise they are solved
    from nondegenerate per-piece pairings.
    """
    pieces = {s: dualize(c, n).dual for s, c in d.complex_at.items()}
    restrict = {}
    for (face, s), r in d.restrict.items():
        e = d.extend.get((face, s))
        if e is None:
            if pairings is None:
                raise DiagramError(f"no extension map {s} -> {face} and no pairings to derive one")
            e = _extension_from_pairings(pairings[face], pairings[s], r, n)
        if e.defects:
            raise DiagramError(f"extension {s} -> {face} is not a chain map")
        restrict[(face, s)] = dual_chain_map(e, n, dualize(d.complex_at[s], n), dualize(d.complex_at[face], n))
    return CoverDiagram(d.index_set, d.simplices, pieces, restrict, name=f"K({d.name})")


def relative_current_complex(dd: CoverDiagram, omit) -> BigradedComplex:
    """``K(U1) ⊕ K(U01)[-1]`` with ``D(T1, T01) = (dT1, T1|01 - dT01)``."""
    return relative_complex(dd, omit)


def _check_pairing_squares(d: CoverDiagram, dd: CoverDiagram, maps: Mapping) -> None:
    for (face, s), r in d.restrict.items():
        lhs = maps[s].compose(r)
        rhs = dd.restrict[(face, s)].compose(maps[face])
        for b in d.complex_at[face].dims:
            if lhs.block(*b) != rhs.block(*b):
                raise PairingSquareError(
                    f"pairing square {face} -> {s} does not commute at {b}")


@dataclass(frozen=True, eq=False)
class FormsCurrentsReport:
    relative_map: ChainMap
    verdicts: Mapping[Bidegree, bool]
    kernel_dims: Mapping[Bidegree, int]
    ladders: Mapping[int, LadderReport]
    les_forms: Mapping[int, LesReport]
    les_currents: Mapping[int, LesReport]

    @property
    def all_iso(self) -> bool:
        return all(self.verdicts.values())

    @property
    def ladders_commute(self) -> bool:
        return all(l.all_commute for l in self.ladders.values())

    def to_dict(self) -> dict:
        return {
            "all_iso": self.all_iso,
            "ladders_commute": self.ladders_commute,
            "verdicts": [{"p": b.p, "q": b.q, "iso": v, "kernel_dim": self.kernel_dims[b]}
                         for b, v in sorted(self.verdicts.items())],
            "ladders": {str(p): l.to_dict() for p, l in sorted(self.ladders.items())},
        }


def compare_forms_currents(d: CoverDiagram, pairings: Mapping, omit, n: int | None = None) -> FormsCurrentsReport:
    """Induced map of ``i`` on relative cohomology plus the five-lemma ladder over the pair LES."""
    if n is None:
        n = next(iter(pairings.values())).n
    dd = dual_diagram(d, n, pairings)
    maps = {s: form_to_current(pairings[s]).map for s in d.simplices}
    _check_pairing_squares(d, dd, maps)
    i_tot = cech_map(d, dd, maps, name=f"i[{d.name}]").require()
    i_rel = relative_cech_map(d, dd, maps, omit, name=f"i_rel[{d.name}]").require()
    i_quot = maps[(omit,)]
    ses_a, ses_k = ses_of_pair(d, omit), ses_of_pair(dd, omit)
    rel_a = ses_a.sub
    verdicts, kernels = {}, {}
    degrees = sorted(set(rel_a.dims) | set(ses_k.sub.dims))
    for p, q in degrees:
        m = induced_map(i_rel, p, q)
        r = rank(m)
        verdicts[Bidegree(p, q)] = m.rows == m.cols == r
        kernels[Bidegree(p, q)] = m.cols - r
    ladders, les_a_all, les_k_all = {}, {}, {}
    for p in sorted({b.p for b in degrees} | set(d.piece_ps())):
        spans = [ses_a.sub.q_span(p), ses_a.mid.q_span(p), ses_a.quot.q_span(p),
                 ses_k.sub.q_span(p), ses_k.mid.q_span(p), ses_k.quot.q_span(p)]
        spans = [x for x in spans if x is not None]
        if not spans:
            continue
        q_range = (min(a for a, _ in spans) - 1, max(b for _, b in spans) + 1)
        les_a = assemble_les(ses_a, p, q_range)
        les_k = assemble_les(ses_k, p, q_range)
        verticals = []
        for q in range(q_range[0], q_range[1] + 1):
            verticals += [induced_map(i_rel, p, q), induced_map(i_tot, p, q), induced_map(i_quot, p, q)]
        ladders[p] = compare_les(les_a, les_k, verticals)
        les_a_all[p], les_k_all[p] = les_a, les_k
    return FormsCurrentsReport(i_rel, verdicts, kernels, ladders, les_a_all, les_k_all)
