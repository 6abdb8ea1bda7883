"""Reading and writing FBAS documents and result reports.

FBAS documents use the stellarbeat layout: a JSON array of nodes, each with
a ``publicKey`` and a recursive ``quorumSet`` made of ``threshold``,
``validators`` (public keys) and ``innerQuorumSets``.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import logging
import warnings
from typing import Any, Union

from .errors import FbasParseError
from .experiments import AccuracyReport, BenchReport
from .fbas import Fbas, QuorumSet, members
from .power import PowerIndexReport

log = logging.getLogger(__name__)


class UnresolvedValidatorWarning(UserWarning):
    """A quorum set names a public key that is not in the document."""


def _load(document: Union[str, bytes]) -> Any:
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FbasParseError("malformed-json", f"document is not UTF-8: {exc}") from None
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise FbasParseError("malformed-json", str(exc)) from None


def _parse_qset(raw: Any, index: dict[str, int], owner: str, path: str) -> QuorumSet:
    if not isinstance(raw, dict):
        raise FbasParseError("invalid-document", f"{owner}: {path} is not an object")
    threshold = raw.get("threshold")
    validators = raw.get("validators", [])
    inner_raw = raw.get("innerQuorumSets", [])
    if not isinstance(validators, list) or not all(isinstance(v, str) for v in validators):
        raise FbasParseError("invalid-document", f"{owner}: {path}.validators must be a list of strings")
    if not isinstance(inner_raw, list):
        raise FbasParseError("invalid-document", f"{owner}: {path}.innerQuorumSets must be a list")
    if isinstance(threshold, bool) or not isinstance(threshold, int):
        raise FbasParseError("invalid-threshold", f"{owner}: {path}.threshold must be an integer")
    members_count = len(validators) + len(inner_raw)
    if not 1 <= threshold <= members_count:
        raise FbasParseError(
            "invalid-threshold",
            f"{owner}: {path}.threshold {threshold} outside 1..{members_count}")
    if len(set(validators)) != len(validators):
        raise FbasParseError("duplicate-validator", f"{owner}: {path} lists a validator twice")

    resolved = []
    for key in validators:
        if key in index:
            resolved.append(index[key])
        else:
            # Threshold is kept as written; the set may become unsatisfiable.
            message = f"{owner}: dropping unknown validator {key!r} from {path}"
            log.warning(message)
            warnings.warn(message, UnresolvedValidatorWarning, stacklevel=4)
    inner = [_parse_qset(sub, index, owner, f"{path}.innerQuorumSets[{k}]")
             for k, sub in enumerate(inner_raw)]
    return QuorumSet(threshold, tuple(resolved), tuple(inner))


def parse_fbas(document: Union[str, bytes]) -> Fbas:
    """Build an :class:`Fbas` from a JSON document; nodes are indexed in document order."""
    raw = _load(document)
    if not isinstance(raw, list):
        raise FbasParseError("invalid-document", "top level must be a JSON array of nodes")
    keys = []
    for pos, node in enumerate(raw):
        if not isinstance(node, dict) or not isinstance(node.get("publicKey"), str):
            raise FbasParseError("invalid-document", f"node #{pos} has no string publicKey")
        keys.append(node["publicKey"])
    index: dict[str, int] = {}
    for pos, key in enumerate(keys):
        if key in index:
            raise FbasParseError("duplicate-public-key", f"publicKey {key!r} appears twice")
        index[key] = pos
    qsets = []
    for key, node in zip(keys, raw):
        if "quorumSet" not in node:
            raise FbasParseError("invalid-document", f"{key}: missing quorumSet")
        qsets.append(_parse_qset(node["quorumSet"], index, key, "quorumSet"))
    return Fbas(tuple(qsets), tuple(keys))


def _public_keys(fbas: Fbas) -> list[str]:
    keys = [a if a is not None else f"n{i}" for i, a in enumerate(fbas.aliases)]
    if len(set(keys)) != len(keys):
        raise ValueError("cannot serialize: generated names collide with existing aliases")
    return keys


def _qset_doc(qset: QuorumSet, keys: list[str]) -> dict:
    return {
        "threshold": qset.threshold,
        "validators": [keys[v] for v in qset.validators],
        "innerQuorumSets": [_qset_doc(sub, keys) for sub in qset.inner_sets],
    }


def serialize_fbas(fbas: Fbas) -> str:
    """Canonical JSON text (sorted keys, node order kept). Nodes without an alias are named ``n{i}``."""
    keys = _public_keys(fbas)
    doc = [{"publicKey": keys[i], "quorumSet": _qset_doc(q, keys)}
           for i, q in enumerate(fbas.quorum_sets)]
    return json.dumps(doc, sort_keys=True, indent=2)


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _blank(value: Any) -> Any:
    return "" if value is None else value


def _float_text(x: float) -> str:
    return f"{x:.17g}"


def _power_csv(report: PowerIndexReport) -> str:
    aliases = [_blank(a) for a in report.aliases]
    m, seed = _blank(report.samples), _blank(report.seed)
    if report.exact:
        header = ["node_index", "alias", "value_numerator", "value_denominator", "method", "m", "seed"]
        rows = [[i, aliases[i], v.numerator, v.denominator, report.method, m, seed]
                for i, v in enumerate(report.values)]
    else:
        header = ["node_index", "alias", "value_float", "method", "m", "seed"]
        rows = [[i, aliases[i], _float_text(v), report.method, m, seed]
                for i, v in enumerate(report.values)]
    return _csv_text(header, rows)


def _power_json(report: PowerIndexReport) -> dict:
    nodes = []
    for i, v in enumerate(report.values):
        entry: dict[str, Any] = {"node_index": i, "alias": report.aliases[i], "value": float(v)}
        if report.exact:
            entry["numerator"] = v.numerator
            entry["denominator"] = v.denominator
        else:
            entry["pivot_count"] = report.pivot_counts[i]
        nodes.append(entry)
    return {
        "method": report.method,
        "m": report.samples,
        "seed": report.seed,
        "player_set": members(report.player_set),
        "nodes": nodes,
    }


BENCH_COLUMNS = ["kind", "n", "method", "m", "reps", "median_seconds", "skipped"]
ACCURACY_COLUMNS = ["kind", "n", "m", "reps", "base_seed", "mmpe"]


def write_report(report: Union[PowerIndexReport, AccuracyReport, BenchReport],
                 fmt: str = "json") -> str:
    """Render a report as ``json`` or ``csv`` text; rows keep a deterministic order."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(report, PowerIndexReport):
        if fmt == "csv":
            return _power_csv(report)
        return json.dumps(_power_json(report), indent=2) + "\n"
    if isinstance(report, BenchReport):
        rows = [[r.kind, r.n, r.method, _blank(r.m), r.reps,
                 "" if r.median_seconds is None else _float_text(r.median_seconds),
                 int(r.skipped)] for r in report.rows]
        if fmt == "csv":
            return _csv_text(BENCH_COLUMNS, rows)
        return json.dumps({"rows": [r.as_dict() for r in report.rows]}, indent=2) + "\n"
    if isinstance(report, AccuracyReport):
        if fmt == "csv":
            rows = [[r.kind, r.n, r.m, r.reps, r.base_seed, _float_text(r.mmpe)] for r in report.rows]
            return _csv_text(ACCURACY_COLUMNS, rows)
        return json.dumps({"rows": [r.as_dict() for r in report.rows]}, indent=2) + "\n"
    raise TypeError(f"cannot render {type(report).__name__}")
