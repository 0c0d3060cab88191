"""JSON for copresentations.

Finite copresentations list their relations with each open as a list of
basic opens, each basic open a list of index positions.  Countable ones are
written as named built-ins with parameters plus a sample of relations, and
only the built-ins can be read back.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import QpolisError
from .codes import Copresentation, OpenCode, Pi02Relation, RelationFamily
from .dedekind import reals_dedekind
from .metric import dyadic_grid, metric_completion

SCHEMA_VERSION = 1
BUILTINS = ("reals", "completion")


def label_json(label):
    if isinstance(label, tuple):
        return [label_json(l) for l in label]
    if isinstance(label, frozenset):
        return sorted((label_json(l) for l in label), key=repr)
    if isinstance(label, Fraction):
        return str(label)
    return label


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


def _code_json(code, position):
    if code.finite:
        return code.to_json(position)
    return {"generator": code.name, "params": [label_json(p) for p in code.params]}


def copres_to_json(C: Copresentation, sample: int = 4) -> dict:
    if C.finite_indices:
        labels = list(C.indices)
        pos = {l: k for k, l in enumerate(labels)}
        rels = []
        for fam in C.families:
            for _, r in fam.relations(None if fam.finite else sample):
                rels.append({"family": fam.name, "U": _code_json(r.antecedent, pos),
                             "V": _code_json(r.consequent, pos)})
        return {"schema": SCHEMA_VERSION, "indices": len(labels),
                "labels": [label_json(l) for l in labels], "relations": rels,
                "provenance": [label_json(p) for p in C.provenance]}
    fams = []
    for fam in C.families:
        shown = []
        for k, r in fam.relations(sample):
            shown.append({"item": k, "U": _labels_json(r.antecedent),
                          "V": _labels_json(r.consequent)})
        spec = {"size": fam.size} if fam.finite else label_json(fam.spec)
        fams.append({"name": fam.name, "spec": spec, "sample": shown})
    return {"schema": SCHEMA_VERSION, "indices": "countable", "index_name": C.indices.name,
            "families": fams, "provenance": [label_json(p) for p in C.provenance]}


def _labels_json(code):
    if code.finite:
        return [[label_json(l) for l in sorted(g, key=repr)] for g in code.generators]
    return {"generator": code.name, "params": [label_json(p) for p in code.params]}


def builtin(name: str, max_denominator: int = 64) -> Copresentation:
    if name == "reals":
        return reals_dedekind()
    if name == "completion":
        return metric_completion(dyadic_grid(max_denominator))
    raise QpolisError("SCHEMA_ERROR", f"unknown built-in space {name!r}", known=list(BUILTINS))


def copres_from_json(data) -> Copresentation:
    """Read a finite copresentation, or ``{"builtin": name, ...}``."""
    if not isinstance(data, dict):
        raise QpolisError("SCHEMA_ERROR", "copresentation JSON must be an object")
    if "builtin" in data:
        return builtin(data["builtin"], int(data.get("max_denominator", 64)))
    try:
        n = data["indices"]
        if not isinstance(n, int) or n < 0:
            raise QpolisError("SCHEMA_ERROR", "only finite index sets can be read back")
        labels = [_hashable(l) for l in data.get("labels", list(range(n)))]
        if len(labels) != n:
            raise QpolisError("SCHEMA_ERROR", "labels do not match the index count")

        def code(gens):
            return OpenCode(tuple(frozenset(labels[i] for i in g) for g in gens))
        rels = [Pi02Relation(code(r["U"]), code(r["V"])) for r in data.get("relations", [])]
    except (KeyError, TypeError, IndexError) as exc:
        raise QpolisError("SCHEMA_ERROR", f"bad copresentation JSON: {exc!r}") from exc
    fams = [RelationFamily.of("relations", rels)] if rels else []
    return Copresentation(labels, fams, ("json",))
