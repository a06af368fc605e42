"""JSON loaders for model, hypergraph and parameter files.

Site labels are strings mapped to indices in file order. Load problems
raise ``ModelError`` naming the offending line or field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from latgas import sitesets as ss
from latgas.errors import ModelError
from latgas.exact import PartitionQuery
from latgas.hypergraph import Hypergraph
from latgas.model import CriterionParams, InteractionModel


def read_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ModelError(f"{path}: {err.strerror}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err


def _labels(doc, where="sites") -> tuple[str, ...]:
    sites = doc.get("sites") if isinstance(doc, dict) else None
    if isinstance(sites, bool):
        raise ModelError(f"{where}: expected an integer or a list of labels")
    if isinstance(sites, int):
        if not 0 <= sites <= ss.MAX_SITES:
            raise ModelError(f"{where}: {sites} outside [0, {ss.MAX_SITES}]")
        return tuple(str(i) for i in range(sites))
    if isinstance(sites, list) and all(isinstance(s, str) for s in sites):
        if len(set(sites)) != len(sites):
            raise ModelError(f"{where}: duplicate labels")
        return tuple(sites)
    raise ModelError(f"{where}: expected an integer or a list of labels")


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if not isinstance(value, dict) or set(value) - {"re", "im"}:
        raise ModelError(f"{where}: expected {{\"re\": f, \"im\": f}}")
    out = []
    for part in ("re", "im"):
        v = value.get(part, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelError(f"{where}.{part}: expected a number")
        out.append(float(v))
    return complex(*out)


def _mask(items, index: dict[str, int], where: str) -> int:
    if not isinstance(items, list):
        raise ModelError(f"{where}: expected a list of site labels")
    mask = 0
    for i, lab in enumerate(items):
        if str(lab) not in index:
            raise ModelError(f"{where}[{i}]: unknown site {lab!r}")
        mask |= 1 << index[str(lab)]
    return mask


def _activity(doc, labels, where="activity") -> tuple[complex, ...]:
    index = {lab: i for i, lab in enumerate(labels)}
    z = [0j] * len(labels)
    block = doc.get("activity", {})
    if not isinstance(block, dict):
        raise ModelError(f"{where}: expected an object keyed by site")
    for lab, val in block.items():
        if lab not in index:
            raise ModelError(f"{where}.{lab}: unknown site")
        z[index[lab]] = _complex(val, f"{where}.{lab}")
    return tuple(z)


def _entries(block, index, key, where) -> dict[int, complex]:
    if not isinstance(block, list):
        raise ModelError(f"{where}: expected a list")
    out = {}
    for i, item in enumerate(block):
        here = f"{where}[{i}]"
        if not isinstance(item, dict) or "subset" not in item or key not in item:
            raise ModelError(f"{here}: expected {{\"subset\": [...], \"{key}\": ...}}")
        m = _mask(item["subset"], index, f"{here}.subset")
        if m == 0:
            raise ModelError(f"{here}.subset: empty subset")
        if m in out:
            raise ModelError(f"{here}.subset: duplicate subset")
        out[m] = _complex(item[key], f"{here}.{key}")
    return out


@dataclass(frozen=True)
class ModelFile:
    model: InteractionModel
    query: PartitionQuery


def model_from_json(doc) -> ModelFile:
    """Build a model and its query; without a ``query`` block the volume is the whole lattice."""
    if not isinstance(doc, dict):
        raise ModelError("top level: expected an object")
    labels = _labels(doc)
    index = {lab: i for i, lab in enumerate(labels)}
    z = _activity(doc, labels)
    w = _entries(doc.get("interaction", []), index, "w", "interaction")
    pot = None
    if "potential" in doc:
        pot = _entries(doc["potential"], index, "v", "potential")
    w = {k: v for k, v in w.items() if v != 1}
    model = InteractionModel(len(labels), z, w, pot, labels)
    q = doc.get("query")
    if q is None:
        query = PartitionQuery(0, model.lattice, 0)
    else:
        if not isinstance(q, dict):
            raise ModelError("query: expected an object")
        query = PartitionQuery(*(_mask(q.get(k, []), index, f"query.{k}")
                                 for k in ("pinned", "volume", "boundary")))
    return ModelFile(model, query)


def load_model(path) -> ModelFile:
    return model_from_json(read_json(path))


def hypergraph_from_json(doc) -> tuple[Hypergraph, tuple[complex, ...]]:
    """Hypergraph plus its (optional) activity block, default all zero."""
    if not isinstance(doc, dict):
        raise ModelError("top level: expected an object")
    labels = _labels(doc)
    index = {lab: i for i, lab in enumerate(labels)}
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise ModelError("edges: expected a list")
    masks = set()
    for i, e in enumerate(edges):
        m = _mask(e, index, f"edges[{i}]")
        if m == 0:
            raise ModelError(f"edges[{i}]: empty edge")
        masks.add(m)
    return Hypergraph(len(labels), frozenset(masks), labels=labels), _activity(doc, labels)


def load_hypergraph(path):
    return hypergraph_from_json(read_json(path))


def params_from_json(doc, labels) -> CriterionParams:
    """``{"r": {label: f}}`` or ``{"alpha": {label: f}}``; unlisted sites get 0."""
    if not isinstance(doc, dict) or len({"r", "alpha"} & set(doc)) != 1:
        raise ModelError("params: expected exactly one of \"r\" or \"alpha\"")
    key = "r" if "r" in doc else "alpha"
    index = {lab: i for i, lab in enumerate(labels)}
    vals = [0.0] * len(labels)
    if not isinstance(doc[key], dict):
        raise ModelError(f"params.{key}: expected an object keyed by site")
    for lab, v in doc[key].items():
        if lab not in index:
            raise ModelError(f"params.{key}.{lab}: unknown site")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelError(f"params.{key}.{lab}: expected a number")
        vals[index[lab]] = float(v)
    return CriterionParams.from_r(vals) if key == "r" else CriterionParams.from_alpha(vals)


def load_params(path, labels) -> CriterionParams:
    return params_from_json(read_json(path), labels)
