"""Short exact sequences of complexes, connecting maps and long exact sequences.

Exactness is certified per instance from ranks; nothing here assumes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .complexes import Bidegree, BigradedComplex, ChainMap, cohomology, induced_map
from .errors import ShapeError, ZigzagError
from .linalg import SparseMatrix, rank, solve

__all__ = [
    "ShortExactSequence",
    "validate_ses",
    "connecting_map",
    "LesNode",
    "LesReport",
    "assemble_les",
    "LadderReport",
    "compare_les",
]


@dataclass(frozen=True, eq=False)
class ShortExactSequence:
    """``0 -> sub --incl--> mid --proj--> quot -> 0``."""

    sub: BigradedComplex
    mid: BigradedComplex
    quot: BigradedComplex
    incl: ChainMap
    proj: ChainMap

    @cached_property
    def issues(self) -> list[str]:
        return validate_ses(self)

    def bidegrees(self) -> list[Bidegree]:
        return sorted(set(self.sub.dims) | set(self.mid.dims) | set(self.quot.dims))


def validate_ses(s: ShortExactSequence) -> list[str]:
    """Levelwise exactness by ranks, plus the chain-map property of both maps."""
    out = [f"incl: {i}" for i in s.incl.defects] + [f"proj: {i}" for i in s.proj.defects]
    for c in (s.sub, s.mid, s.quot):
        out.extend(f"{c.name}: {i}" for i in c.issues)
    if out:
        return out
    for p, q in s.bidegrees():
        i, j = s.incl.block(p, q), s.proj.block(p, q)
        ri, rj = rank(i), rank(j)
        if ri != s.sub.dim(p, q):
            out.append(f"incl is not injective at ({p},{q}): rank {ri} < {s.sub.dim(p, q)}")
        if rj != s.quot.dim(p, q):
            out.append(f"proj is not surjective at ({p},{q}): rank {rj} < {s.quot.dim(p, q)}")
        if not (j @ i).is_zero():
            out.append(f"proj∘incl != 0 at ({p},{q})")
        elif ri != s.mid.dim(p, q) - rj:
            out.append(f"ker(proj) != im(incl) at ({p},{q}): rank {ri} vs nullity {s.mid.dim(p, q) - rj}")
    return out


def connecting_map(s: ShortExactSequence, p: int, q: int, strategy: str = "low") -> SparseMatrix:
    """Matrix of ``δ: H(quot)(p, q-1) -> H(sub)(p, q)`` via lift, differentiate, pull back."""
    if s.issues:
        raise ZigzagError("sequence is not exact: " + "; ".join(s.issues))
    src = cohomology(s.quot, p, q - 1)
    tgt = cohomology(s.sub, p, q)
    cols = []
    for c in src.representatives.basis:
        b = solve(s.proj.block(p, q - 1), c, strategy)
        if b is None:
            raise ZigzagError(f"cannot lift a class of {s.quot.name} at ({p},{q - 1})")
        db = s.mid.d(p, q - 1).apply(b)
        a = solve(s.incl.block(p, q), db, strategy)
        if a is None:
            raise ZigzagError(f"d(lift) is not in the image of incl at ({p},{q})")
        cols.append(tgt.class_of(a))
    return SparseMatrix.from_columns(cols, tgt.dim)


@dataclass(frozen=True)
class LesNode:
    label: str
    kind: str  # "sub", "mid" or "quot"
    at: Bidegree
    dim: int
    incoming_rank: int = 0
    outgoing_rank: int = 0
    exact: bool = True

    @property
    def witness(self) -> str:
        return f"rank(in)={self.incoming_rank}, dim-rank(out)={self.dim - self.outgoing_rank}"


@dataclass(frozen=True, eq=False)
class LesReport:
    """Nodes in sequence order; ``maps[k]`` goes from node ``k`` to node ``k + 1``."""

    p: int
    q_range: tuple[int, int]
    nodes: tuple[LesNode, ...]
    maps: tuple[SparseMatrix, ...]
    composites_zero: tuple[bool, ...] = field(default=())

    @property
    def all_exact(self) -> bool:
        return all(n.exact for n in self.nodes) and all(self.composites_zero)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q_range": list(self.q_range),
            "all_exact": self.all_exact,
            "nodes": [
                {"label": n.label, "kind": n.kind, "p": n.at.p, "q": n.at.q, "dim": n.dim,
                 "rank_in": n.incoming_rank, "rank_out": n.outgoing_rank, "exact": n.exact}
                for n in self.nodes
            ],
            "maps": [{"rank": rank(m), "shape": list(m.shape)} for m in self.maps],
        }

    def text(self) -> str:
        lines = [f"long exact sequence, p={self.p}, q in [{self.q_range[0]}, {self.q_range[1]}]"]
        for n in self.nodes:
            verdict = "exact" if n.exact else "NOT EXACT"
            lines.append(f"  {n.label:<28} dim {n.dim:>3}  {verdict}  ({n.witness})")
        return "\n".join(lines)


def _les_q_range(s: ShortExactSequence, p: int) -> tuple[int, int]:
    spans = [c.q_span(p) for c in (s.sub, s.mid, s.quot)]
    spans = [x for x in spans if x is not None]
    if not spans:
        return (0, 0)
    return (min(a for a, _ in spans) - 1, max(b for _, b in spans) + 1)


def assemble_les(s: ShortExactSequence, p: int, q_range: tuple[int, int] | None = None,
                 strategy: str = "low") -> LesReport:
    """``… -> H(sub) -> H(mid) -> H(quot) -δ-> H(sub)[q+1] -> …`` with exactness at every node."""
    lo, hi = q_range if q_range is not None else _les_q_range(s, p)
    dims, kinds, maps = [], [], []
    for q in range(lo, hi + 1):
        for kind, c in (("sub", s.sub), ("mid", s.mid), ("quot", s.quot)):
            dims.append(cohomology(c, p, q).dim)
            kinds.append((kind, c.name, q))
        maps.append(induced_map(s.incl, p, q))
        maps.append(induced_map(s.proj, p, q))
        if q < hi:
            maps.append(connecting_map(s, p, q + 1, strategy))
    composites = tuple((b @ a).is_zero() for a, b in zip(maps, maps[1:]))
    ranks = [rank(m) for m in maps]
    nodes = []
    for k, (kind, name, q) in enumerate(kinds):
        r_in = ranks[k - 1] if k > 0 else 0
        r_out = ranks[k] if k < len(maps) else 0
        exact = r_in == dims[k] - r_out
        if 0 < k < len(maps):
            exact = exact and composites[k - 1]
        nodes.append(LesNode(f"H^{{{p},{q}}}({name})", kind, Bidegree(p, q), dims[k], r_in, r_out, exact))
    return LesReport(p, (lo, hi), tuple(nodes), tuple(maps), composites)


@dataclass(frozen=True)
class LadderReport:
    squares_commute: tuple[bool, ...]
    vertical_iso: tuple[bool, ...]
    five_lemma: tuple[tuple[int, bool, bool], ...]  # (node, flanks iso, middle iso)

    @property
    def all_commute(self) -> bool:
        return all(self.squares_commute)

    @property
    def five_lemma_confirmed(self) -> bool:
        return all(mid for _, flanks, mid in self.five_lemma if flanks)

    def to_dict(self) -> dict:
        return {
            "squares_commute": list(self.squares_commute),
            "vertical_iso": list(self.vertical_iso),
            "five_lemma": [{"node": k, "flanks_iso": f, "middle_iso": m} for k, f, m in self.five_lemma],
        }


def _is_iso(m: SparseMatrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def compare_les(top: LesReport, bottom: LesReport, verticals: Sequence[SparseMatrix]) -> LadderReport:
    """Check a ladder of two long exact sequences joined by ``verticals[k]: top_k -> bottom_k``."""
    if len(top.nodes) != len(bottom.nodes) or len(verticals) != len(top.nodes):
        raise ShapeError("ladder rows and verticals must have the same length")
    for k, v in enumerate(verticals):
        if v.shape != (bottom.nodes[k].dim, top.nodes[k].dim):
            raise ShapeError(f"vertical {k} has shape {v.shape}, "
                             f"expected {(bottom.nodes[k].dim, top.nodes[k].dim)}")
    squares = tuple(bottom.maps[k] @ verticals[k] == verticals[k + 1] @ top.maps[k]
                    for k in range(len(top.maps)))
    iso = tuple(_is_iso(v) for v in verticals)
    five = tuple((k, all(iso[j] for j in (k - 2, k - 1, k + 1, k + 2)), iso[k])
                 for k in range(2, len(verticals) - 2))
    return LadderReport(squares, iso, five)
