"""Cover-compatible morphisms ``π: X̃ -> X`` and the checks built on them.

A :class:`CoverMorphism` stores pullbacks ``π*: A(U_σ) -> A(Ũ_σ)`` piece by
piece. Pushforward on currents is never supplied: it is the transpose of the
pullback under the duality used by :func:`~cechdolbeault.currents.dualize`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping

from .cech import CoverDiagram, cech_map, relative_cech_map, relative_complex
from .complexes import Bidegree, ChainMap, cohomology, induced_map
from .currents import PairingData, compare_forms_currents, dual_chain_map, dual_diagram
from .errors import CechDolbeaultError, DegreeError, HypothesisError, ShapeError
from .linalg import SparseMatrix, rank
from .scalars import Scalar

__all__ = [
    "CoverMorphism",
    "validate_morphism",
    "relative_pullback",
    "total_pullback",
    "relative_pushforward",
    "pushforward_piece",
    "compute_degree",
    "ProjectionReport",
    "projection_identity_check",
    "InjectivityCertificate",
    "check_relative_injectivity",
    "injectivity_certificates",
    "BlowupReport",
    "blowup_decomposition",
]


@dataclass(frozen=True, eq=False)
class CoverMorphism:
    name: str
    source: CoverDiagram  # the cover of X̃
    target: CoverDiagram  # the cover of X
    pullback: Mapping[tuple, ChainMap]  # target piece -> source piece
    omit: Hashable = None  # label of U0 = X minus S
    n: int | None = None
    source_pairings: Mapping[tuple, PairingData] | None = None
    target_pairings: Mapping[tuple, PairingData] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pullback", {tuple(k): f for k, f in sorted(self.pullback.items())})
        if self.omit is None:
            object.__setattr__(self, "omit", self.target.index_set[0])
        for attr in ("source_pairings", "target_pairings"):
            val = getattr(self, attr)
            if val is not None:
                object.__setattr__(self, attr, {tuple(k): v for k, v in val.items()})

    @property
    def kept(self) -> tuple:
        """Label of U1."""
        return next(a for a in self.target.index_set if a != self.omit)

    @property
    def relative_pieces(self) -> list[tuple]:
        return [s for s in self.target.simplices if s != (self.omit,)]

    @property
    def dimension(self) -> int:
        if self.n is not None:
            return self.n
        for pairs in (self.target_pairings, self.source_pairings):
            if pairs:
                return next(iter(pairs.values())).n
        coords = [x for d in (self.source, self.target) for c in d.complex_at.values()
                  for b in c.dims for x in b]
        return max(coords, default=0)

    @cached_property
    def issues(self) -> list[str]:
        return validate_morphism(self)

    @cached_property
    def hypotheses(self) -> list[tuple[str, bool, str]]:
        return _theorem_hypotheses(self)


def validate_morphism(m: CoverMorphism) -> list[str]:
    out = []
    for side, d in (("source", m.source), ("target", m.target)):
        out.extend(f"{side} diagram: {i}" for i in d.issues)
    if out:
        return out
    if m.source.simplices != m.target.simplices or m.source.index_set != m.target.index_set:
        return ["source and target covers have different nerves"]
    if len(m.target.index_set) != 2:
        return ["morphisms are checked on two-set covers only"]
    if m.omit not in m.target.index_set:
        return [f"label {m.omit!r} is not in the index set"]
    for s in m.relative_pieces:
        if s not in m.pullback:
            out.append(f"missing pullback on {s}")
    for s, f in m.pullback.items():
        if s not in m.target.complex_at:
            out.append(f"pullback on unknown piece {s}")
            continue
        if f.source.dims != m.target.complex_at[s].dims or f.target.dims != m.source.complex_at[s].dims:
            out.append(f"pullback on {s} has the wrong source or target")
            continue
        out.extend(f"pullback on {s}: {i}" for i in f.defects)
    if out:
        return out
    for (face, s), r in m.target.restrict.items():
        if face in m.pullback and s in m.pullback:
            lhs = m.source.restrict[(face, s)].compose(m.pullback[face])
            rhs = m.pullback[s].compose(r)
            for b in m.target.complex_at[face].dims:
                if lhs.block(*b) != rhs.block(*b):
                    out.append(f"pullback does not commute with restriction {face} -> {s} at {b}")
        e, e_src = m.target.extend.get((face, s)), m.source.extend.get((face, s))
        if e is not None and e_src is not None and face in m.pullback and s in m.pullback:
            lhs = e_src.compose(m.pullback[s])
            rhs = m.pullback[face].compose(e)
            for b in m.target.complex_at[s].dims:
                if lhs.block(*b) != rhs.block(*b):
                    out.append(f"pullback does not commute with extension {s} -> {face} at {b}")
    for side, pairs in (("source", m.source_pairings), ("target", m.target_pairings)):
        if pairs:
            for s, pd in pairs.items():
                out.extend(f"{side} pairing on {s}: {i}" for i in pd.issues())
    return out


def _require(m: CoverMorphism):
    if m.issues:
        raise CechDolbeaultError(f"morphism {m.name!r} is not valid: " + "; ".join(m.issues))


def relative_pullback(m: CoverMorphism) -> ChainMap:
    """``π*(ξ1, ξ01) = (π*ξ1, π*ξ01)`` on relative complexes."""
    _require(m)
    return relative_cech_map(m.target, m.source, m.pullback, m.omit,
                             name=f"π*_rel[{m.name}]").require()


def total_pullback(m: CoverMorphism) -> ChainMap:
    _require(m)
    if (m.omit,) not in m.pullback:
        raise CechDolbeaultError(f"morphism {m.name!r} has no pullback on U0")
    return cech_map(m.target, m.source, m.pullback, name=f"π*[{m.name}]").require()


def pushforward_piece(m: CoverMorphism, s: tuple) -> ChainMap:
    """``π_*: K(Ũ_σ) -> K(U_σ)``, the transpose of the pullback on ``σ``."""
    return dual_chain_map(m.pullback[s], m.dimension)


def relative_pushforward(m: CoverMorphism) -> ChainMap:
    """``(T1, T01) ↦ (π_* T1, π_* T01)`` between relative current complexes."""
    _require(m)
    n = m.dimension
    dd_s = dual_diagram(m.source, n, m.source_pairings)
    dd_t = dual_diagram(m.target, n, m.target_pairings)
    pieces = {}
    for s in m.relative_pieces:
        f = pushforward_piece(m, s)
        if f.source.dims != dd_s.complex_at[s].dims or f.target.dims != dd_t.complex_at[s].dims:
            raise ShapeError(f"pushforward on {s} does not match the dual pieces")
        pieces[s] = f
    return relative_cech_map(dd_s, dd_t, pieces, m.omit, name=f"π_*[{m.name}]").require()


def _unit_current(pd: PairingData) -> tuple:
    if pd.model is None:
        raise DegreeError(f"pairing {pd.name!r} has no model, so no unit")
    return pd.block(0, 0).T.apply(pd.model.unit)


def compute_degree(m: CoverMorphism) -> Scalar:
    """``μ`` with ``π_*(1̃) = μ · 1`` as currents, required to agree on every piece."""
    _require(m)
    if not m.source_pairings or not m.target_pairings:
        raise DegreeError(f"morphism {m.name!r} carries no pairings to realise units as currents")
    n = m.dimension
    mu = None
    for s in m.pullback:
        if s not in m.source_pairings or s not in m.target_pairings:
            continue
        if not m.target.complex_at[s].dim(0, 0):
            continue  # an empty piece carries no unit
        one_src = _unit_current(m.source_pairings[s])
        one_tgt = _unit_current(m.target_pairings[s])
        pushed = m.pullback[s].block(n, n).T.apply(one_src)
        k = next((i for i, x in enumerate(one_tgt) if x), None)
        if k is None:
            raise DegreeError(f"unit current vanishes on {s}")
        ratio = pushed[k] / one_tgt[k]
        if tuple(ratio * x for x in one_tgt) != pushed:
            raise DegreeError(f"π_*(1) is not a multiple of 1 on {s}; the target cannot be connected")
        if mu is not None and ratio != mu:
            raise DegreeError(f"degree is not constant: {mu} on one piece, {ratio} on {s}")
        mu = ratio
    if mu is None:
        raise DegreeError(f"morphism {m.name!r} has no piece carrying both pairings")
    return mu


@dataclass(frozen=True)
class ProjectionReport:
    mu: Scalar | None
    checks: tuple[tuple[tuple, Bidegree, bool], ...]
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.mu is not None and all(ok for *_, ok in self.checks)

    @property
    def failures(self) -> list[str]:
        return [f"{s} at {b}" for s, b, ok in self.checks if not ok]

    def to_dict(self) -> dict:
        return {
            "mu": None if self.mu is None else str(self.mu),
            "holds": self.holds,
            "detail": self.detail,
            "checks": [{"piece": list(s), "p": b.p, "q": b.q, "holds": ok} for s, b, ok in self.checks],
        }


def projection_identity_check(m: CoverMorphism, pd_source: Mapping | None = None,
                              pd_target: Mapping | None = None) -> ProjectionReport:
    """``μ · i = π_* ∘ ĩ ∘ π*`` blockwise on the U1 and U01 squares."""
    pd_source = pd_source if pd_source is not None else m.source_pairings
    pd_target = pd_target if pd_target is not None else m.target_pairings
    if pd_source is not m.source_pairings or pd_target is not m.target_pairings:
        m = CoverMorphism(m.name, m.source, m.target, m.pullback, m.omit, m.n, pd_source, pd_target)
    try:
        mu = compute_degree(m)
    except DegreeError as exc:
        return ProjectionReport(None, (), str(exc))
    n = m.dimension
    checks = []
    for s in m.relative_pieces:
        f = m.pullback[s]
        ps, pt = pd_source[s], pd_target[s]
        for b in m.target.complex_at[s].dims:
            p, q = b
            lhs = pt.block(p, q).T.scale(mu)
            rhs = f.block(n - p, n - q).T @ ps.block(p, q).T @ f.block(p, q)
            checks.append((s, b, lhs == rhs))
    return ProjectionReport(mu, tuple(checks))


def _theorem_hypotheses(m: CoverMorphism) -> list[tuple[str, bool, str]]:
    """Engine-side hypotheses of the injectivity theorem, in order, stopping at the first failure."""
    out = []
    if m.issues:
        return [("morphism is valid", False, "; ".join(m.issues))]
    out.append(("morphism is valid", True, ""))
    if not m.source_pairings or not m.target_pairings:
        return out + [("pairings present", False, "both sides need per-piece pairings")]
    out.append(("pairings present", True, ""))
    report = projection_identity_check(m)
    if report.mu is None:
        return out + [("degree is defined", False, report.detail)]
    if not report.mu:
        return out + [("degree is nonzero", False, "μ = 0")]
    out.append(("degree is nonzero", True, f"μ = {report.mu}"))
    if not report.holds:
        return out + [("projection identity", False, "fails on " + ", ".join(report.failures))]
    out.append(("projection identity", True, f"μ = {report.mu}"))
    for side, d, pairs in (("target", m.target, m.target_pairings), ("source", m.source, m.source_pairings)):
        try:
            cmp = compare_forms_currents(d, pairs, m.omit, m.dimension)
        except CechDolbeaultError as exc:
            return out + [(f"forms vs currents on the {side}", False, str(exc))]
        if not cmp.all_iso:
            bad = [f"{b} (kernel {cmp.kernel_dims[b]})" for b, ok in cmp.verdicts.items() if not ok]
            return out + [(f"forms vs currents on the {side}", False, "not an isomorphism at " + ", ".join(bad))]
        out.append((f"forms vs currents on the {side}", True, ""))
    return out


@dataclass(frozen=True)
class InjectivityCertificate:
    at: Bidegree
    map_matrix: SparseMatrix
    kernel_dim: int
    verdict: bool

    def to_dict(self) -> dict:
        return {"p": self.at.p, "q": self.at.q, "rows": self.map_matrix.rows,
                "cols": self.map_matrix.cols, "kernel_dim": self.kernel_dim, "injective": self.verdict}


def check_relative_injectivity(m: CoverMorphism, p: int, q: int) -> InjectivityCertificate:
    """Certificate for injectivity of ``π*`` on relative cohomology at ``(p, q)``."""
    for name, ok, detail in m.hypotheses:
        if not ok:
            raise HypothesisError(name, detail)
    mat = induced_map(relative_pullback(m), p, q)
    k = mat.cols - rank(mat)
    return InjectivityCertificate(Bidegree(p, q), mat, k, k == 0)


def injectivity_certificates(m: CoverMorphism) -> list[InjectivityCertificate]:
    rel = relative_complex(m.target, m.omit)
    return [check_relative_injectivity(m, *b) for b in sorted(rel.dims)]


@dataclass(frozen=True)
class BlowupReport:
    at: Bidegree
    dims: Mapping[str, int]
    hypotheses: tuple[tuple[str, bool, str], ...]
    identity_holds: bool

    @property
    def certified(self) -> bool:
        return self.identity_holds and all(ok for _, ok, _ in self.hypotheses)

    @property
    def failed(self) -> list[str]:
        return [f"{name} ({detail})" for name, ok, detail in self.hypotheses if not ok]

    def to_dict(self) -> dict:
        return {
            "p": self.at.p, "q": self.at.q,
            "dims": dict(sorted(self.dims.items())),
            "hypotheses": [{"map": n, "holds": ok, "ranks": d} for n, ok, d in self.hypotheses],
            "identity_holds": self.identity_holds,
            "certified": self.certified,
        }


def _rank_detail(mat: SparseMatrix) -> str:
    return f"rank {rank(mat)}, {mat.rows}x{mat.cols}"


def blowup_decomposition(m: CoverMorphism, p: int, q: int) -> BlowupReport:
    """``h(X̃) = h(X) + dim H(X̃, X̃∖E) / π* H(X, X∖Z)`` at ``(p, q)``, with hypotheses checked."""
    _require(m)
    pi_tot = total_pullback(m)
    pi_rel = relative_pullback(m)
    pi_0 = m.pullback[(m.omit,)]
    hyps = []

    def check(name, mat, want):
        r = rank(mat)
        ok = {"iso": r == mat.rows == mat.cols, "surjective": r == mat.rows,
              "injective": r == mat.cols}[want]
        hyps.append((f"{name} {want}", ok, _rank_detail(mat)))

    check(f"π* on H^{{{p},{q}}}(U0)", induced_map(pi_0, p, q), "iso")
    check(f"π* on H^{{{p},{q - 1}}}(U0)", induced_map(pi_0, p, q - 1), "surjective")
    check(f"π* on H^{{{p},{q}}}(X)", induced_map(pi_tot, p, q), "injective")
    rel_map = induced_map(pi_rel, p, q)
    check(f"π* on H^{{{p},{q}}}(X,U0)", rel_map, "injective")
    check(f"π* on H^{{{p},{q + 1}}}(X,U0)", induced_map(pi_rel, p, q + 1), "injective")
    dims = {
        "h_global_target": cohomology(pi_tot.source, p, q).dim,
        "h_global_source": cohomology(pi_tot.target, p, q).dim,
        "h_rel_target": cohomology(pi_rel.source, p, q).dim,
        "h_rel_source": cohomology(pi_rel.target, p, q).dim,
        "rank_rel_pullback": rank(rel_map),
    }
    dims["quotient_dim"] = dims["h_rel_source"] - dims["rank_rel_pullback"]
    holds = dims["h_global_source"] == dims["h_global_target"] + dims["quotient_dim"]
    return BlowupReport(Bidegree(p, q), dims, tuple(hyps), holds)
