"""JSON file formats for complexes, models, diagrams, pairings, morphisms and bundles.

Every scalar is written in canonical text form and every object with sorted
keys, so emitting, reading and emitting again reproduces the same bytes.
A bundle is a directory holding ``manifest.json`` plus one file per object.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Mapping

from .cech import CoverDiagram
from .complexes import Bidegree, BigradedComplex, ChainMap
from .currents import PairingData
from .dga import DgaModel
from .errors import CechDolbeaultError, FormatError
from .linalg import SparseMatrix
from .models import ModelBundle
from .morphisms import CoverMorphism
from .scalars import Scalar

__all__ = [
    "FORMAT",
    "dumps",
    "complex_to_json",
    "complex_from_json",
    "write_bundle",
    "read_bundle",
    "read_path",
]

FORMAT = "cechdolbeault-bundle/1"


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- writing

def _triples(m: SparseMatrix) -> list:
    return [[i, j, str(x)] for (i, j), x in sorted(m.entries.items())]


def _blocks(blocks: Mapping[Bidegree, SparseMatrix]) -> list:
    return [[b.p, b.q, _triples(m)] for b, m in sorted(blocks.items()) if not m.is_zero()]


def _vec(v) -> list:
    return [str(x) for x in v]


def complex_to_json(c: BigradedComplex) -> dict:
    return {"kind": "complex", "name": c.name,
            "dims": [[b.p, b.q, k] for b, k in sorted(c.dims.items())],
            "diff": _blocks(c.diff)}


def _map_json(f: ChainMap) -> dict:
    return {"name": f.name, "shift": list(f.shift), "blocks": _blocks(f.blocks)}


class _Names:
    """Assigns one file name per distinct complex; identical content shares a name."""

    def __init__(self):
        self.by_id: dict[int, str] = {}
        self.by_name: dict[str, BigradedComplex] = {}

    def __call__(self, c: BigradedComplex) -> str:
        if id(c) in self.by_id:
            return self.by_id[id(c)]
        name, k = c.name, 1
        while name in self.by_name and not _same(self.by_name[name], c):
            k += 1
            name = f"{c.name}~{k}"
        self.by_name.setdefault(name, c)
        self.by_id[id(c)] = name
        return name


def _same(a: BigradedComplex, b: BigradedComplex) -> bool:
    return a.dims == b.dims and set(a.diff) == set(b.diff) and all(a.diff[k] == b.diff[k] for k in a.diff)


def _model_json(m: DgaModel, names: _Names) -> dict:
    return {
        "kind": "model", "name": m.name, "complex": names(m.complex),
        "products": [[a.p, a.q, b.p, b.q, _triples(t)] for (a, b), t in sorted(m.products.items())
                     if not t.is_zero()],
        "unit": _vec(m.unit), "n": m.n,
        "integral": None if m.integral is None else _vec(m.integral),
        "partition": None if m.partition is None else [_vec(v) for v in m.partition],
    }


def _pairing_json(pd: PairingData, names: _Names) -> dict:
    return {"kind": "pairing", "name": pd.name, "complex": names(pd.complex), "n": pd.n,
            "model": None if pd.model is None else pd.model.name, "blocks": _blocks(pd.pairing)}


def _diagram_json(d: CoverDiagram, names: _Names) -> dict:
    return {
        "kind": "diagram", "name": d.name,
        "index_set": list(d.index_set),
        "simplices": [list(s) for s in d.simplices],
        "complexes": [[list(s), names(d.complex_at[s])] for s in d.simplices],
        "restrict": [[list(a), list(b), _map_json(f)] for (a, b), f in sorted(d.restrict.items())],
        "extend": [[list(a), list(b), _map_json(f)] for (a, b), f in sorted(d.extend.items())],
        "ambient": None if d.ambient is None else names(d.ambient),
        "ambient_restrict": [[a, _map_json(d.ambient_restrict[a])] for a in d.index_set
                             if a in d.ambient_restrict],
    }


def _morphism_json(m: CoverMorphism, diagram_names: Mapping[int, str], pairing_names: Mapping[int, str]) -> dict:
    def pairs(pm):
        if pm is None:
            return None
        return [[list(s), pairing_names[id(pd)]] for s, pd in sorted(pm.items())]

    return {
        "kind": "morphism", "name": m.name,
        "source": diagram_names[id(m.source)], "target": diagram_names[id(m.target)],
        "omit": m.omit, "n": m.n,
        "pullback": [[list(s), _map_json(f)] for s, f in sorted(m.pullback.items())],
        "source_pairings": pairs(m.source_pairings), "target_pairings": pairs(m.target_pairings),
    }


def _file_name(kind: str, k: int, name: str) -> str:
    safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "object"
    return f"{kind}-{k:02d}-{safe}.json"


def write_bundle(b: ModelBundle, directory) -> Path:
    """Write ``b`` as a directory; returns the manifest path."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    names = _Names()
    # collect pairings reachable from morphisms so they get names too
    pairings: dict[int, PairingData] = {id(p): p for p in b.pairings.values()}
    diagrams: dict[int, CoverDiagram] = {id(d): d for d in b.diagrams.values()}
    models: dict[int, DgaModel] = {id(m): m for m in b.models.values()}
    for m in b.morphisms.values():
        diagrams.setdefault(id(m.source), m.source)
        diagrams.setdefault(id(m.target), m.target)
        for pm in (m.source_pairings, m.target_pairings):
            for pd in (pm or {}).values():
                pairings.setdefault(id(pd), pd)
    for pd in pairings.values():
        if pd.model is not None:
            models.setdefault(id(pd.model), pd.model)
    for c in b.complexes.values():
        names(c)
    docs = {"model": [_model_json(m, names) for m in models.values()],
            "pairing": [_pairing_json(p, names) for p in pairings.values()],
            "diagram": [_diagram_json(d, names) for d in diagrams.values()]}
    pairing_names = {k: p.name for k, p in pairings.items()}
    diagram_names = {k: d.name for k, d in diagrams.items()}
    docs["morphism"] = [_morphism_json(m, diagram_names, pairing_names) for m in b.morphisms.values()]
    docs["complex"] = []
    for name, c in names.by_name.items():
        doc = complex_to_json(c)
        doc["name"] = name
        docs["complex"].append(doc)
    files: dict[str, list] = {}
    for kind in ("complex", "model", "pairing", "diagram", "morphism"):
        files[kind] = []
        for k, doc in enumerate(sorted(docs[kind], key=lambda d: d["name"])):
            fname = _file_name(kind, k, doc["name"])
            (out / fname).write_text(dumps(doc), encoding="utf-8")
            files[kind].append(fname)
    manifest = {
        "format": FORMAT, "name": b.name, "files": files,
        "diagram_pairings": [[dn, [[list(s), pn] for s, pn in sorted(pm.items())]]
                             for dn, pm in sorted(b.diagram_pairings.items())],
        "expected": [[label, bd.p, bd.q, v] for (label, bd), v in sorted(b.expected.items())],
    }
    path = out / "manifest.json"
    path.write_text(dumps(manifest), encoding="utf-8")
    return path


# ---------------------------------------------------------------- reading

class _Reader:
    def __init__(self, path):
        self.path = Path(path)

    def fail(self, loc: str, msg: str):
        raise FormatError(self.path, loc, msg)

    def load(self) -> Any:
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            self.fail("file", str(exc))
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            self.fail(f"line {exc.lineno} column {exc.colno}", exc.msg)

    def field(self, obj, key, loc, types=None, optional=False):
        if not isinstance(obj, dict):
            self.fail(loc, "expected an object")
        if key not in obj:
            if optional:
                return None
            self.fail(loc, f"missing field {key!r}")
        v = obj[key]
        if v is None and optional:
            return None
        if types is not None and not isinstance(v, types):
            self.fail(f"{loc}.{key}", f"expected {getattr(types, '__name__', types)}")
        return v

    def scalar(self, x, loc) -> Scalar:
        if isinstance(x, bool):
            self.fail(loc, "expected a scalar")
        if isinstance(x, int):
            return Scalar(x)
        if not isinstance(x, str):
            self.fail(loc, "expected a scalar string")
        try:
            return Scalar.parse(x)
        except ValueError as exc:
            self.fail(loc, str(exc))

    def integer(self, x, loc) -> int:
        if not isinstance(x, int) or isinstance(x, bool):
            self.fail(loc, "expected an integer")
        return x

    def vector(self, v, loc) -> tuple:
        if not isinstance(v, list):
            self.fail(loc, "expected a list of scalars")
        return tuple(self.scalar(x, f"{loc}[{k}]") for k, x in enumerate(v))

    def matrix(self, triples, rows, cols, loc) -> SparseMatrix:
        if not isinstance(triples, list):
            self.fail(loc, "expected a list of [row, col, scalar] triples")
        entries = {}
        for k, t in enumerate(triples):
            if not isinstance(t, list) or len(t) != 3:
                self.fail(f"{loc}[{k}]", "expected [row, col, scalar]")
            i, j = self.integer(t[0], f"{loc}[{k}][0]"), self.integer(t[1], f"{loc}[{k}][1]")
            if not (0 <= i < rows and 0 <= j < cols):
                self.fail(f"{loc}[{k}]", f"index ({i},{j}) outside a {rows}x{cols} block")
            entries[(i, j)] = self.scalar(t[2], f"{loc}[{k}][2]")
        return SparseMatrix(rows, cols, entries)

    def blocks(self, items, shape, loc) -> dict:
        if not isinstance(items, list):
            self.fail(loc, "expected a list of [p, q, triples]")
        out = {}
        for k, it in enumerate(items):
            if not isinstance(it, list) or len(it) != 3:
                self.fail(f"{loc}[{k}]", "expected [p, q, triples]")
            b = Bidegree(self.integer(it[0], f"{loc}[{k}][0]"), self.integer(it[1], f"{loc}[{k}][1]"))
            out[b] = self.matrix(it[2], *shape(b), f"{loc}[{k}][2]")
        return out

    def simplex(self, s, loc) -> tuple:
        if not isinstance(s, list) or not s:
            self.fail(loc, "expected a non-empty list of labels")
        return tuple(s)


def _complex(r: _Reader, doc, loc="") -> BigradedComplex:
    name = r.field(doc, "name", loc, str)
    dims = {}
    for k, t in enumerate(r.field(doc, "dims", loc, list)):
        if not isinstance(t, list) or len(t) != 3:
            r.fail(f"{loc}dims[{k}]", "expected [p, q, dim]")
        p, q, n = (r.integer(x, f"{loc}dims[{k}]") for x in t)
        if n < 0:
            r.fail(f"{loc}dims[{k}]", "negative dimension")
        dims[Bidegree(p, q)] = n
    dims_get = lambda b: dims.get(b, 0)  # noqa: E731
    diff = r.blocks(r.field(doc, "diff", loc, list),
                    lambda b: (dims_get(Bidegree(b.p, b.q + 1)), dims_get(b)), f"{loc}diff")
    return BigradedComplex(name, dims, diff)


def complex_from_json(doc: dict, path="<memory>") -> BigradedComplex:
    return _complex(_Reader(path), doc)


def _chain_map(r: _Reader, doc, source: BigradedComplex, target: BigradedComplex, loc) -> ChainMap:
    shift = r.field(doc, "shift", loc, list)
    if len(shift) != 2:
        r.fail(f"{loc}.shift", "expected [dp, dq]")
    s = Bidegree(r.integer(shift[0], f"{loc}.shift"), r.integer(shift[1], f"{loc}.shift"))
    blocks = r.blocks(r.field(doc, "blocks", loc, list),
                      lambda b: (target.dim(b.p + s.p, b.q + s.q), source.dim(*b)), f"{loc}.blocks")
    return ChainMap(source, target, blocks, s, name=r.field(doc, "name", loc, str))


def _lookup(r: _Reader, table: Mapping, name, loc, what):
    if name not in table:
        r.fail(loc, f"unknown {what} {name!r}")
    return table[name]


def _model(r: _Reader, doc, complexes) -> DgaModel:
    c = _lookup(r, complexes, r.field(doc, "complex", "", str), "complex", "complex")
    products = {}
    for k, it in enumerate(r.field(doc, "products", "", list)):
        if not isinstance(it, list) or len(it) != 5:
            r.fail(f"products[{k}]", "expected [p1, q1, p2, q2, triples]")
        a = Bidegree(r.integer(it[0], f"products[{k}]"), r.integer(it[1], f"products[{k}]"))
        b = Bidegree(r.integer(it[2], f"products[{k}]"), r.integer(it[3], f"products[{k}]"))
        products[(a, b)] = r.matrix(it[4], c.dim(*(a + b)), c.dim(*a) * c.dim(*b), f"products[{k}][4]")
    integral = r.field(doc, "integral", "", list, optional=True)
    partition = r.field(doc, "partition", "", list, optional=True)
    if partition is not None and len(partition) != 2:
        r.fail("partition", "expected two vectors")
    n = r.field(doc, "n", "", int, optional=True)
    return DgaModel(r.field(doc, "name", "", str), c, products, r.vector(r.field(doc, "unit", "", list), "unit"),
                    n=n, integral=None if integral is None else r.vector(integral, "integral"),
                    partition=None if partition is None else tuple(
                        r.vector(v, f"partition[{k}]") for k, v in enumerate(partition)))


def _pairing(r: _Reader, doc, complexes, models) -> PairingData:
    c = _lookup(r, complexes, r.field(doc, "complex", "", str), "complex", "complex")
    n = r.integer(r.field(doc, "n", ""), "n")
    model_name = r.field(doc, "model", "", str, optional=True)
    model = None if model_name is None else _lookup(r, models, model_name, "model", "model")
    blocks = r.blocks(r.field(doc, "blocks", "", list), lambda b: (c.dim(*b), c.dim(n - b.p, n - b.q)), "blocks")
    return PairingData(c, n, blocks, model, r.field(doc, "name", "", str))


def _diagram(r: _Reader, doc, complexes) -> CoverDiagram:
    index_set = r.field(doc, "index_set", "", list)
    simplices = [r.simplex(s, f"simplices[{k}]") for k, s in enumerate(r.field(doc, "simplices", "", list))]
    complex_at = {}
    for k, it in enumerate(r.field(doc, "complexes", "", list)):
        if not isinstance(it, list) or len(it) != 2:
            r.fail(f"complexes[{k}]", "expected [simplex, complex name]")
        complex_at[r.simplex(it[0], f"complexes[{k}][0]")] = _lookup(r, complexes, it[1], f"complexes[{k}][1]", "complex")

    def piece(s, loc):
        if s not in complex_at:
            r.fail(loc, f"simplex {list(s)} has no complex")
        return complex_at[s]

    def maps(key, reverse):
        out = {}
        for k, it in enumerate(r.field(doc, key, "", list)):
            loc = f"{key}[{k}]"
            if not isinstance(it, list) or len(it) != 3:
                r.fail(loc, "expected [face, simplex, map]")
            a, b = r.simplex(it[0], loc), r.simplex(it[1], loc)
            src, tgt = piece(a, loc), piece(b, loc)
            if reverse:
                src, tgt = tgt, src
            out[(a, b)] = _chain_map(r, it[2], src, tgt, f"{loc}[2]")
        return out

    restrict, extend = maps("restrict", False), maps("extend", True)
    amb_name = r.field(doc, "ambient", "", str, optional=True)
    ambient = None if amb_name is None else _lookup(r, complexes, amb_name, "ambient", "complex")
    amb_r = {}
    for k, it in enumerate(r.field(doc, "ambient_restrict", "", list)):
        loc = f"ambient_restrict[{k}]"
        if ambient is None or not isinstance(it, list) or len(it) != 2:
            r.fail(loc, "expected [label, map] and an ambient complex")
        amb_r[it[0]] = _chain_map(r, it[1], ambient, piece((it[0],), loc), f"{loc}[1]")
    return CoverDiagram(tuple(index_set), tuple(simplices), complex_at, restrict,
                        name=r.field(doc, "name", "", str), ambient=ambient, ambient_restrict=amb_r, extend=extend)


def _morphism(r: _Reader, doc, diagrams, pairings) -> CoverMorphism:
    src = _lookup(r, diagrams, r.field(doc, "source", "", str), "source", "diagram")
    tgt = _lookup(r, diagrams, r.field(doc, "target", "", str), "target", "diagram")
    pull = {}
    for k, it in enumerate(r.field(doc, "pullback", "", list)):
        loc = f"pullback[{k}]"
        if not isinstance(it, list) or len(it) != 2:
            r.fail(loc, "expected [simplex, map]")
        s = r.simplex(it[0], loc)
        if s not in tgt.complex_at or s not in src.complex_at:
            r.fail(loc, f"simplex {list(s)} is not in both diagrams")
        pull[s] = _chain_map(r, it[1], tgt.complex_at[s], src.complex_at[s], f"{loc}[1]")

    def pairs(key):
        items = r.field(doc, key, "", list, optional=True)
        if items is None:
            return None
        return {r.simplex(it[0], f"{key}[{k}]"): _lookup(r, pairings, it[1], f"{key}[{k}]", "pairing")
                for k, it in enumerate(items)}

    return CoverMorphism(r.field(doc, "name", "", str), src, tgt, pull, r.field(doc, "omit", ""),
                         r.field(doc, "n", "", int, optional=True), pairs("source_pairings"), pairs("target_pairings"))


def read_bundle(directory) -> ModelBundle:
    directory = Path(directory)
    mr = _Reader(directory / "manifest.json")
    manifest = mr.load()
    if mr.field(manifest, "format", "", str) != FORMAT:
        mr.fail("format", f"unsupported format, expected {FORMAT!r}")
    files = mr.field(manifest, "files", "", dict)
    tables: dict[str, dict] = {k: {} for k in ("complex", "model", "pairing", "diagram", "morphism")}
    for kind in tables:
        for k, fname in enumerate(mr.field(files, kind, "files", list, optional=True) or []):
            if not isinstance(fname, str) or "/" in fname or "\\" in fname:
                mr.fail(f"files.{kind}[{k}]", "expected a plain file name")
            r = _Reader(directory / fname)
            doc = r.load()
            if r.field(doc, "kind", "", str) != kind:
                r.fail("kind", f"expected kind {kind!r}")
            try:
                if kind == "complex":
                    obj = _complex(r, doc)
                elif kind == "model":
                    obj = _model(r, doc, tables["complex"])
                elif kind == "pairing":
                    obj = _pairing(r, doc, tables["complex"], tables["model"])
                elif kind == "diagram":
                    obj = _diagram(r, doc, tables["complex"])
                else:
                    obj = _morphism(r, doc, tables["diagram"], tables["pairing"])
            except FormatError:
                raise
            except CechDolbeaultError as exc:
                r.fail(kind, str(exc))
            tables[kind][obj.name] = obj
    dp = {}
    for k, it in enumerate(mr.field(manifest, "diagram_pairings", "", list)):
        loc = f"diagram_pairings[{k}]"
        if not isinstance(it, list) or len(it) != 2:
            mr.fail(loc, "expected [diagram, [[simplex, pairing], ...]]")
        dname = _lookup(mr, tables["diagram"], it[0], loc, "diagram").name
        dp[dname] = {mr.simplex(s, loc): _lookup(mr, tables["pairing"], pn, loc, "pairing").name for s, pn in it[1]}
    expected = {}
    for k, it in enumerate(mr.field(manifest, "expected", "", list)):
        if not isinstance(it, list) or len(it) != 4:
            mr.fail(f"expected[{k}]", "expected [label, p, q, value]")
        expected[(it[0], Bidegree(it[1], it[2]))] = mr.integer(it[3], f"expected[{k}]")
    used = {id(m.complex) for m in tables["model"].values()}
    loose = {n: c for n, c in tables["complex"].items() if id(c) not in used}
    return ModelBundle(mr.field(manifest, "name", "", str), models=tables["model"], complexes=loose,
                       diagrams=tables["diagram"], pairings=tables["pairing"], diagram_pairings=dp,
                       morphisms=tables["morphism"], expected=expected)


def read_path(path) -> ModelBundle:
    """A bundle directory, a manifest file or a single complex file."""
    path = Path(path)
    if path.is_dir():
        return read_bundle(path)
    if path.name == "manifest.json":
        return read_bundle(path.parent)
    r = _Reader(path)
    doc = r.load()
    kind = r.field(doc, "kind", "", str)
    if kind != "complex":
        r.fail("kind", "a single file must hold a complex; other objects need a bundle directory")
    c = _complex(r, doc)
    return ModelBundle(c.name, complexes={c.name: c})
