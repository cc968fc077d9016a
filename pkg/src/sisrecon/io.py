"""File formats: graph text, trace JSON, plan JSON and result JSON.

Floats are written with 17 significant digits so every 64-bit value
round-trips exactly. JSON has no infinities, so ``-inf`` is written as
``null``; writers that can emit it add a ``"finite"`` flag next to the value.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from .graphs import AdjacencyMatrix
from .reduction import ReductionPlan
from .sis import SISParams, ViralTrace, state_from_bits, state_to_bits

TRACE_VERSION = 1


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            text = format(obj, ".17g")
            if all(c in "-0123456789" for c in text):
                text += ".0"
            return text
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _encode(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _encode(obj) + "\n"


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def read_graph(path: str | Path) -> AdjacencyMatrix:
    return AdjacencyMatrix.from_text(Path(path).read_text(encoding="utf-8"))


def write_graph(path: str | Path, A: AdjacencyMatrix) -> None:
    write_text(path, A.to_text())


def trace_to_dict(trace: ViralTrace, p: SISParams) -> dict:
    return {
        "version": TRACE_VERSION,
        "n": trace.n_nodes,
        "beta_T": p.beta_T,
        "delta_T": p.delta_T,
        "segments": [{"state": state_to_bits(s), "repeat": r} for s, r in trace.segments],
    }


def trace_from_dict(d: dict) -> tuple[ViralTrace, SISParams]:
    if d.get("version") != TRACE_VERSION:
        raise ValueError(f"unsupported trace version {d.get('version')!r}")
    n = int(d["n"])
    segs = []
    for seg in d["segments"]:
        s = state_from_bits(seg["state"])
        if len(s) != n:
            raise ValueError(f"state {seg['state']!r} does not have {n} bits")
        segs.append((s, int(seg["repeat"])))
    return ViralTrace(tuple(segs)), SISParams(float(d["beta_T"]), float(d["delta_T"]))


def trace_dumps(trace: ViralTrace, p: SISParams) -> str:
    return dumps(trace_to_dict(trace, p))


def write_trace(path: str | Path, trace: ViralTrace, p: SISParams) -> None:
    write_text(path, trace_dumps(trace, p))


def read_trace(path: str | Path) -> tuple[ViralTrace, SISParams]:
    return trace_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def trace_digest(trace: ViralTrace, p: SISParams) -> str:
    """SHA-256 of the trace file contents."""
    return hashlib.sha256(trace_dumps(trace, p).encode("utf-8")).hexdigest()


def plan_to_dict(plan: ReductionPlan, trace: ViralTrace | None = None) -> dict:
    d = plan.to_dict()
    if trace is not None:
        d["trace_sha256"] = trace_digest(trace, plan.params)
    return d


def write_plan(path: str | Path, plan: ReductionPlan, trace: ViralTrace | None = None) -> None:
    write_text(path, dumps(plan_to_dict(plan, trace)))


def read_plan(path: str | Path) -> ReductionPlan:
    return ReductionPlan.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
