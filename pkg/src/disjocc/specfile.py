"""
JSON space and event documents.

Space::

    {"factors": [{"elements": ["0", "1"], "order": [["0", "1"]],
                  "weights": {"0": "1/2", "1": "1/2"}}]}

Events (a list, under ``"events"`` in the same or a separate document)::

    {"type": "cylinder", "coord": 1, "values": ["1"]}
    {"type": "upset", "generators": [["1", "0"]]}
    {"type": "downset", "generators": [["0", "1"]]}
    {"type": "explicit", "outcomes": [["0", "1"], ["1", "1"]]}
    {"type": "not" | "and" | "or", "args": [...]}
    {"type": "full"} / {"type": "empty"}

Coordinates are 1-based here; outcomes and values use element labels.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InvalidFactorError, SpecFormatError
from .events import Event
from .space import Factor, ProductSpace


def _fail(path, msg):
    raise SpecFormatError(f"{path}: {msg}")


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(exc.msg, exc.lineno) from None


def space_from_dict(doc: dict) -> ProductSpace:
    if not isinstance(doc, dict) or "factors" not in doc:
        _fail("$", "expected an object with a 'factors' list")
    factors = []
    for i, f in enumerate(doc["factors"]):
        path = f"factors[{i}]"
        if not isinstance(f, dict) or "elements" not in f:
            _fail(path, "expected an object with 'elements'")
        try:
            factors.append(Factor.build(f["elements"], f.get("order", ()), f.get("weights")))
        except (InvalidFactorError, ValueError, ZeroDivisionError) as exc:
            _fail(path, str(exc))
    try:
        return ProductSpace(tuple(factors))
    except InvalidFactorError as exc:
        _fail("factors", str(exc))


def space_to_dict(space: ProductSpace) -> dict:
    out = []
    for f in space.factors:
        covers = [[f.elements[a], f.elements[b]] for a, b in f.covers]
        out.append({
            "elements": list(f.elements),
            "order": covers,
            "weights": {e: str(w) for e, w in zip(f.elements, f.weights)},
        })
    return {"factors": out}


def _outcome(space, labels, path):
    if not isinstance(labels, list) or len(labels) != space.n:
        _fail(path, f"outcome must list {space.n} element labels")
    try:
        return space.outcome_from_labels([str(x) for x in labels])
    except KeyError as exc:
        _fail(path, str(exc))


def event_from_dict(space: ProductSpace, doc: dict, path: str = "event") -> Event:
    if not isinstance(doc, dict) or "type" not in doc:
        _fail(path, "expected an object with a 'type'")
    kind = doc["type"]
    label = doc.get("label")
    if kind == "cylinder":
        coord = doc.get("coord")
        if not isinstance(coord, int) or not 1 <= coord <= space.n:
            _fail(path, f"coord must be an integer in 1..{space.n}")
        f = space.factors[coord - 1]
        try:
            vals = [f.index(v) for v in doc.get("values", [])]
        except KeyError as exc:
            _fail(path, str(exc))
        return Event.cylinder(space, coord - 1, vals, label)
    if kind in ("upset", "downset"):
        gens = [_outcome(space, g, f"{path}.generators[{j}]") for j, g in enumerate(doc.get("generators", []))]
        return (Event.upset if kind == "upset" else Event.downset)(space, gens, label)
    if kind == "explicit":
        outs = [_outcome(space, o, f"{path}.outcomes[{j}]") for j, o in enumerate(doc.get("outcomes", []))]
        return Event.explicit(space, outs, label)
    if kind == "full":
        return Event.full(space, label)
    if kind == "empty":
        return Event.empty(space, label)
    if kind in ("not", "and", "or"):
        args = doc.get("args")
        if not isinstance(args, list) or not args:
            _fail(path, f"'{kind}' needs a non-empty 'args' list")
        subs = [event_from_dict(space, a, f"{path}.args[{j}]") for j, a in enumerate(args)]
        if kind == "not":
            if len(subs) != 1:
                _fail(path, "'not' takes exactly one argument")
            ev = ~subs[0]
        else:
            ev = subs[0]
            for s in subs[1:]:
                ev = ev & s if kind == "and" else ev | s
        ev.label = label
        return ev
    _fail(path, f"unknown event type {kind!r}")


def events_from_list(space: ProductSpace, docs: list) -> list[Event]:
    if not isinstance(docs, list):
        _fail("events", "expected a list")
    return [event_from_dict(space, d, f"events[{i}]") for i, d in enumerate(docs)]


def event_to_dict(event: Event) -> dict:
    """Lossless explicit form."""
    doc = {"type": "explicit", "outcomes": [list(event.space.labels(w)) for w in event]}
    if event.label:
        doc["label"] = event.label
    return doc


def instance_to_dict(space: ProductSpace, events) -> dict:
    doc = space_to_dict(space)
    doc["events"] = [event_to_dict(e) for e in events]
    return doc


def load_instance(space_text: str, events_text: str | None = None):
    """Parse a space document and its events (inline or from a second document)."""
    doc = loads(space_text)
    space = space_from_dict(doc)
    if events_text is not None:
        edoc = loads(events_text)
        elist = edoc.get("events") if isinstance(edoc, dict) else edoc
    else:
        elist = doc.get("events", [])
    return space, events_from_list(space, elist)
