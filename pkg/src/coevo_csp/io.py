"""XCSP 2.1 reader (binary extensional subset) and the native JSON instance format."""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET

from .core import CONFLICTS, SUPPORTS, Constraint, ContractError, CspInstance, Relation

SCHEMA_VERSION = "1"


class ParseError(ValueError):
    """Input document cannot be turned into a valid instance."""


def _parse_values(text: str, where: str) -> list:
    vals = []
    for tok in (text or "").split():
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", tok)
        try:
            if m:
                lo, hi = int(m.group(1)), int(m.group(2))
                vals.extend(range(lo, hi + 1))
            else:
                vals.append(int(tok))
        except ValueError:
            raise ParseError(f"{where}: bad domain token {tok!r}") from None
    return vals


def _parse_tuples(text: str, arity: int, where: str) -> list:
    out = []
    for chunk in (text or "").split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != arity:
            raise ParseError(f"{where}: tuple {chunk!r} does not have arity {arity}")
        try:
            out.append(tuple(int(p) for p in parts))
        except ValueError:
            raise ParseError(f"{where}: malformed tuple {chunk!r}") from None
    return out


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xcsp(document: str) -> CspInstance:
    """Parse an XCSP 2.1 document with binary extensional constraints.

    Unary constraints are folded into the domains.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from None
    for el in root.iter():
        tag = _local(el.tag)
        if tag in ("predicates", "predicate", "functions", "function"):
            raise ParseError(f"<{tag}>: intensional constraints unsupported")
        if tag in ("global", "globals"):
            raise ParseError(f"<{tag}>: global constraints unsupported")

    def section(name):
        for el in root:
            if _local(el.tag) == name:
                return el
        return None

    pres = section("presentation")
    name = pres.get("name", "") if pres is not None else ""

    domains = {}
    for el in (section("domains") if section("domains") is not None else []):
        dname = el.get("name")
        vals = _parse_values(el.text, f"domain {dname!r}")
        if not vals:
            raise ParseError(f"domain {dname!r} is empty")
        domains[dname] = vals

    var_index = {}
    var_doms = []
    for el in (section("variables") if section("variables") is not None else []):
        vname, dref = el.get("name"), el.get("domain")
        if dref not in domains:
            raise ParseError(f"variable {vname!r}: unknown domain {dref!r}")
        if vname in var_index:
            raise ParseError(f"variable {vname!r} declared twice")
        var_index[vname] = len(var_doms)
        var_doms.append(list(domains[dref]))

    relations = {}
    for el in (section("relations") if section("relations") is not None else []):
        rname = el.get("name")
        sem = el.get("semantics")
        if sem not in (SUPPORTS, CONFLICTS):
            raise ParseError(f"relation {rname!r}: unsupported semantics {sem!r}")
        try:
            arity = int(el.get("arity", "2"))
        except ValueError:
            raise ParseError(f"relation {rname!r}: bad arity") from None
        relations[rname] = (arity, sem, _parse_tuples(el.text, arity, f"relation {rname!r}"))

    binary = []
    for el in (section("constraints") if section("constraints") is not None else []):
        cname = el.get("name")
        where = f"constraint {cname!r}"
        ref = el.get("reference", "")
        if ref.startswith("global:"):
            raise ParseError(f"{where}: global constraints unsupported")
        if ref not in relations:
            raise ParseError(f"{where}: unknown relation {ref!r}")
        scope = (el.get("scope") or "").split()
        for s in scope:
            if s not in var_index:
                raise ParseError(f"{where}: unknown variable {s!r}")
        arity, sem, tuples = relations[ref]
        if len(scope) != arity:
            raise ParseError(f"{where}: scope size {len(scope)} != relation arity {arity}")
        if arity == 1:
            v = var_index[scope[0]]
            listed = {t[0] for t in tuples}
            keep = [a for a in var_doms[v] if (a in listed) == (sem == SUPPORTS)]
            if not keep:
                raise ParseError(f"{where}: unary constraint empties a domain")
            var_doms[v] = keep
            continue
        if arity != 2:
            raise ParseError(f"{where}: arity {arity} unsupported (binary only)")
        x, y = var_index[scope[0]], var_index[scope[1]]
        binary.append((where, x, y, sem, tuples))

    cons = []
    for cid, (where, x, y, sem, tuples) in enumerate(binary):
        dx, dy = set(var_doms[x]), set(var_doms[y])
        # drop tuples that mention values removed by unary folding or outside the domains
        kept = frozenset(t for t in tuples if t[0] in dx and t[1] in dy)
        cons.append(Constraint(cid, (x, y), Relation(sem, kept)))
    try:
        return CspInstance(name, tuple(tuple(d) for d in var_doms), tuple(cons))
    except ContractError as exc:
        raise ParseError(str(exc)) from None


def read_xcsp(path) -> CspInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_xcsp(fh.read())


def serialize_native(inst: CspInstance, metadata: dict | None = None) -> str:
    """Canonical JSON text; equal instances serialize to identical bytes."""
    dom_ids = {}
    for d in inst.domains:
        dom_ids.setdefault(d, len(dom_ids))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": inst.name,
        "domains": [list(d) for d in dom_ids],
        "variables": [dom_ids[d] for d in inst.domains],
        "relations": [
            {"semantics": c.relation.semantics,
             "tuples": sorted(list(t) for t in c.relation.tuples)}
            for c in inst.constraints
        ],
        "constraints": [
            {"scope": list(c.scope), "relation": c.id} for c in inst.constraints
        ],
    }
    if metadata:
        doc["metadata"] = metadata
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), indent=None) + "\n"


def parse_native(text: str) -> CspInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"native document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("native document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        domains = [tuple(int(v) for v in d) for d in doc["domains"]]
        var_doms = [domains[int(ref)] for ref in doc["variables"]]
        rels = [Relation(r["semantics"], frozenset(tuple(int(v) for v in t) for t in r["tuples"]))
                for r in doc["relations"]]
        cons = []
        for cid, c in enumerate(doc["constraints"]):
            x, y = (int(v) for v in c["scope"])
            cons.append(Constraint(cid, (x, y), rels[int(c["relation"])]))
        return CspInstance(str(doc.get("name", "")), tuple(var_doms), tuple(cons))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParseError(f"native document violates the schema: {exc!r}") from None


def read_instance(path) -> CspInstance:
    """Load an instance by extension: ``.xml`` is XCSP, anything else native."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".xml"):
        return parse_xcsp(text)
    return parse_native(text)


def write_native(inst: CspInstance, path, metadata: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_native(inst, metadata))
