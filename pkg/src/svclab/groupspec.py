"""Group-spec documents: JSON descriptions of finite groups.

Every document is an object with a ``kind`` field:

    cyclic           {"n": 15, "gen": "a"}
    dihedral         {"n": 5}
    symmetric        {"n": 4}
    alternating      {"n": 5}
    quaternion       {}
    perm             {"generators": {"x": [2, 3, 1]}}         one-line images, 1-based
    table            {"table": [[...]], "names": [...], "generators": {"a": 1}}
    direct_product   {"factors": [doc, ...], "labels": ["3", "5"]}
    semidirect       {"C": doc, "Q": doc, "action": {"b": {"a": "a^-1"}}}
    quotient         {"group": doc, "normal": ["a^2"]}
    fibered          {"group": doc, "L": ["a"] | "whole" | "centralizer-of-centre", "t": 3}
    central_product  {"H": doc, "K": doc, "iso": {"a^2": "a^2"}}

Elements are written as words in the generator names of the group they live in.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from . import groups as gr
from . import words as wd
from .groups import FiniteGroup, GroupError, Subgroup


class SpecError(ValueError):
    pass


def element(G: FiniteGroup, text: str | int) -> int:
    if isinstance(text, int):
        if not 0 <= text < G.order:
            raise SpecError(f"element index {text} out of range for {G.name}")
        return text
    try:
        return wd.evaluate(wd.parse(str(text)), G, coefficients=dict(G.generators))
    except (wd.WordSyntaxError, wd.UnboundSymbol) as exc:
        raise SpecError(f"cannot read element {text!r} of {G.name}: {exc}") from None


def subgroup(G: FiniteGroup, gens) -> Subgroup:
    return G.subgroup(element(G, g) for g in gens)


def _need(doc: dict, key: str):
    if key not in doc:
        raise SpecError(f"{doc.get('kind')!r} spec needs field {key!r}")
    return doc[key]


def build(doc: dict[str, Any], cap: int = gr.DEFAULT_ORDER_CAP) -> FiniteGroup:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError("a group spec must be an object with a 'kind' field")
    kind = doc["kind"]
    name = doc.get("name")
    if kind == "cyclic":
        G = gr.cyclic(int(_need(doc, "n")), doc.get("gen", "a"))
    elif kind == "dihedral":
        G = gr.dihedral(int(_need(doc, "n")))
    elif kind == "symmetric":
        G = gr.symmetric(int(_need(doc, "n")))
    elif kind == "alternating":
        G = gr.alternating(int(_need(doc, "n")))
    elif kind == "quaternion":
        G = gr.quaternion()
    elif kind == "perm":
        G = gr.permutation_group(_need(doc, "generators"), name=name or "P", cap=cap)
    elif kind == "table":
        gens = doc.get("generators")
        G = gr.FiniteGroup(
            _need(doc, "table"),
            doc.get("names"),
            list(gens.items()) if gens else None,
            name=name or "G",
        )
    elif kind == "direct_product":
        factors = [build(f, cap) for f in _need(doc, "factors")]
        G = gr.direct_product(*factors, labels=doc.get("labels"))
    elif kind == "semidirect":
        C = build(_need(doc, "C"), cap)
        Q = build(_need(doc, "Q"), cap)
        cg, qg = dict(C.generators), dict(Q.generators)
        action = {}
        for c_name, imgs in _need(doc, "action").items():
            if c_name not in cg:
                raise SpecError(f"{c_name!r} is not a generator of {C.name}")
            action[cg[c_name]] = {qg[q]: element(Q, img) for q, img in imgs.items()}
        G = gr.semidirect_product(C, Q, action)
    elif kind == "quotient":
        base = build(_need(doc, "group"), cap)
        G, _ = gr.quotient(base, subgroup(base, _need(doc, "normal")))
    elif kind == "fibered":
        H = build(_need(doc, "group"), cap)
        L = doc.get("L", "whole")
        if L == "whole":
            L = H.whole()
        elif L == "centralizer-of-centre":
            L = gr.centralizer(H, gr.centre(H))
        else:
            L = subgroup(H, L)
        G = gr.fibered_product(H, L, int(_need(doc, "t")), cap=cap)
    elif kind == "central_product":
        H = build(_need(doc, "H"), cap)
        K = build(_need(doc, "K"), cap)
        iso = {element(H, a): element(K, b) for a, b in _need(doc, "iso").items()}
        G = gr.central_product(H, K, iso)
    else:
        raise SpecError(f"unknown group kind {kind!r}")
    if G.order > cap:
        raise gr.CapExceeded(f"group order {G.order} exceeds cap {cap}")
    if name:
        G.name = name
    return G


def loads(text: str, cap: int = gr.DEFAULT_ORDER_CAP) -> FiniteGroup:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return build(doc, cap)
    except GroupError as exc:
        raise SpecError(str(exc)) from None


def load(path: str | Path, cap: int = gr.DEFAULT_ORDER_CAP) -> FiniteGroup:
    try:
        return loads(Path(path).read_text(), cap)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from None
