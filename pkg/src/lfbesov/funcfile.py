"""Function files: a JSON-style text document describing a step function as a
sum of ball indicators.

    {
      "field": {"p": 2, "c": 1},
      "side": "spatial",
      "resolution": 1,
      "support": 0,
      "terms": [
        {"center": "q=2^1; 1@0", "level": 1, "coef": [1.0, 0.0]}
      ]
    }

Each term contributes coef * Phi_{center + P^level}.  Documents are read
with the YAML composer so every error can be reported with the byte offset
of the offending node.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

from .field import FieldElement, field_init, format_element, parse_element
from .functions import FREQUENCY, SPATIAL, StepFunction, from_terms


class FunctionFileError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        where = f"byte {offset}: " if offset is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Term:
    center: FieldElement
    level: int
    coef: complex


@dataclass(frozen=True)
class FunctionDoc:
    p: int
    c: int
    side: str
    resolution: int
    support: int
    terms: tuple[Term, ...] = field(default_factory=tuple)

    def to_function(self) -> StepFunction:
        params = field_init(self.p, self.c)
        return from_terms(
            params,
            [(t.center, t.level, t.coef) for t in self.terms],
            resolution=self.resolution,
            support=self.support,
            side=self.side,
        )

    @classmethod
    def from_function(cls, f: StepFunction) -> FunctionDoc:
        terms = tuple(Term(cid.rep, cid.level, v) for cid, v in f.values.items())
        return cls(f.params.p, f.params.c, f.side, f.resolution, f.support, terms)


def _num(x: float) -> str:
    return repr(float(x))


def emit(doc: FunctionDoc | StepFunction) -> str:
    if isinstance(doc, StepFunction):
        doc = FunctionDoc.from_function(doc)
    lines = [
        "{",
        f'  "field": {{"p": {doc.p}, "c": {doc.c}}},',
        f'  "side": "{doc.side}",',
        f'  "resolution": {doc.resolution},',
        f'  "support": {doc.support},',
    ]
    if not doc.terms:
        lines.append('  "terms": []')
    else:
        lines.append('  "terms": [')
        body = []
        for t in doc.terms:
            c = complex(t.coef)
            body.append(
                f'    {{"center": "{format_element(t.center)}", "level": {t.level}, '
                f'"coef": [{_num(c.real)}, {_num(c.imag)}]}}'
            )
        lines.append(",\n".join(body))
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


class _Doc:
    def __init__(self, text: str):
        self.text = text

    def offset(self, node_or_mark) -> int:
        mark = getattr(node_or_mark, "start_mark", node_or_mark)
        return len(self.text[: mark.index].encode("utf-8"))

    def fail(self, node, message: str):
        raise FunctionFileError(message, self.offset(node))

    def mapping(self, node, what: str) -> dict[str, Any]:
        if not isinstance(node, yaml.MappingNode):
            self.fail(node, f"{what} must be a mapping")
        out = {}
        for k, v in node.value:
            if not isinstance(k, yaml.ScalarNode):
                self.fail(k, "mapping keys must be scalars")
            if k.value in out:
                self.fail(k, f"duplicate key {k.value!r}")
            out[k.value] = (k, v)
        return out

    def scalar(self, node, what: str) -> str:
        if not isinstance(node, yaml.ScalarNode):
            self.fail(node, f"{what} must be a scalar")
        return node.value

    def integer(self, node, what: str) -> int:
        text = self.scalar(node, what)
        try:
            return int(text)
        except ValueError:
            self.fail(node, f"{what} must be an integer, got {text!r}")

    def real(self, node, what: str) -> float:
        text = self.scalar(node, what)
        try:
            return float(text)
        except ValueError:
            self.fail(node, f"{what} must be a number, got {text!r}")


def parse(text: str) -> FunctionDoc:
    doc = _Doc(text)
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise FunctionFileError(f"syntax error: {exc.problem}", doc.offset(mark) if mark else None) from None
    if root is None:
        raise FunctionFileError("empty document", 0)
    top = doc.mapping(root, "document")
    required = ("field", "resolution", "support", "terms")
    for key in required:
        if key not in top:
            doc.fail(root, f"missing field {key!r}")
    for key, (knode, _) in top.items():
        if key not in required + ("side",):
            doc.fail(knode, f"unknown field {key!r}")

    fnode = top["field"][1]
    fmap = doc.mapping(fnode, "field")
    for key in ("p", "c"):
        if key not in fmap:
            doc.fail(fnode, f"field is missing {key!r}")
    p = doc.integer(fmap["p"][1], "field.p")
    c = doc.integer(fmap["c"][1], "field.c")
    try:
        params = field_init(p, c)
    except ValueError as exc:
        doc.fail(fnode, str(exc))

    side = SPATIAL
    if "side" in top:
        side = doc.scalar(top["side"][1], "side")
        if side not in (SPATIAL, FREQUENCY):
            doc.fail(top["side"][1], f"side must be {SPATIAL!r} or {FREQUENCY!r}")
    resolution = doc.integer(top["resolution"][1], "resolution")
    support = doc.integer(top["support"][1], "support")
    if resolution + support < 0:
        doc.fail(top["support"][1], "resolution + support must be >= 0")

    tnode = top["terms"][1]
    if not isinstance(tnode, yaml.SequenceNode):
        doc.fail(tnode, "terms must be a list")
    terms = []
    for item in tnode.value:
        tmap = doc.mapping(item, "term")
        for key in ("center", "level", "coef"):
            if key not in tmap:
                doc.fail(item, f"term is missing {key!r}")
        for key, (knode, _) in tmap.items():
            if key not in ("center", "level", "coef"):
                doc.fail(knode, f"unknown term field {key!r}")
        cnode = tmap["center"][1]
        try:
            center = parse_element(doc.scalar(cnode, "center"), params)
        except ValueError as exc:
            doc.fail(cnode, str(exc))
        level = doc.integer(tmap["level"][1], "level")
        if level > resolution:
            doc.fail(tmap["level"][1], f"level {level} is finer than resolution {resolution}")
        if not center.truncate(level).is_zero and center.truncate(level).lo < -support:
            doc.fail(cnode, "center lies outside the support bound")
        if level < -support:
            doc.fail(tmap["level"][1], "ball exceeds the support bound")
        coef_node = tmap["coef"][1]
        if not isinstance(coef_node, yaml.SequenceNode) or len(coef_node.value) != 2:
            doc.fail(coef_node, "coef must be [re, im]")
        re_, im_ = (doc.real(n, "coef") for n in coef_node.value)
        terms.append(Term(center, level, complex(re_, im_)))
    return FunctionDoc(p, c, side, resolution, support, tuple(terms))


def read_function(path) -> StepFunction:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read()).to_function()


def write_function(path, f: StepFunction | FunctionDoc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit(f))
