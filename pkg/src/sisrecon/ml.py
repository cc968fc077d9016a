"""Exact maximum-likelihood network reconstruction by exhaustive search.

Full-size search covers every symmetric zero-diagonal binary matrix;
reduced-size search covers the first-row entries ``a_13 .. a_1n`` with
``a_12 = 1`` and all other entries fixed to a known host. Candidates are
enumerated as integers over their free bits (most significant bit first),
scored in blocks with :class:`TallyModel`, and ties are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._likelihood import TallyModel, codes_to_bits, reduced_bits
from .errors import Degenerate, LengthMismatch, TooLarge
from .graphs import AdjacencyMatrix, is_connected
from .maxcut import CutAssignment, cut_size
from .reduction import build_full_trace, build_reduced_trace, plan_full_reduction, plan_reduction
from .sis import SISParams, ViralTrace

FULL_LIMIT_BITS = 28
REDUCED_LIMIT = 24
ARGMAX_CAP = 4096
BLOCK = 1 << 14


@dataclass(frozen=True)
class MLResult:
    """Best log-likelihood and the candidates attaining it.

    ``argmax`` holds upper-triangle bitstrings (full search) or first-row
    bitstrings ``a_13 .. a_1n`` (reduced search), in enumeration order.
    ``truncated`` is set when more than ``ARGMAX_CAP`` candidates tie.
    """

    best_value: float
    argmax: tuple[str, ...]
    candidates_evaluated: int
    truncated: bool = False
    reduced: bool = False

    def matrices(self, host: AdjacencyMatrix | None = None) -> list[AdjacencyMatrix]:
        if not self.reduced:
            n = _n_from_bits(len(self.argmax[0])) if self.argmax else 0
            return [AdjacencyMatrix.from_upper_bits(n, s) for s in self.argmax]
        if host is None:
            raise ValueError("reduced results need the host to rebuild matrices")
        rows = np.array([[int(c) for c in s] for s in self.argmax], dtype=np.int8).reshape(len(self.argmax), host.n - 2)
        return [AdjacencyMatrix.from_upper_bits(host.n, "".join(map(str, b))) for b in reduced_bits(host, rows)]

    def to_dict(self) -> dict:
        return {
            "best_log_likelihood": self.best_value,
            "argmax": list(self.argmax),
            "evaluated": self.candidates_evaluated,
            "truncated": self.truncated,
        }


def _n_from_bits(width: int) -> int:
    n = 1
    while n * (n - 1) // 2 < width:
        n += 1
    return n


def _search(model: TallyModel, total: int, width: int, to_bits, keep=None) -> tuple[float, list[int], bool]:
    best = -np.inf
    hits: list[int] = []
    truncated = False
    for lo in range(0, total, BLOCK):
        codes = np.arange(lo, min(lo + BLOCK, total), dtype=np.int64)
        vals = model.totals(to_bits(codes_to_bits(codes, width)))
        if keep is not None:
            mask = keep(codes)
            vals = np.where(mask, vals, -np.inf)
        top = vals.max()
        if top == -np.inf or top < best:
            continue
        if top > best:
            best, hits, truncated = top, [], False
        for c in codes[vals == top]:
            if len(hits) < ARGMAX_CAP:
                hits.append(int(c))
            else:
                truncated = True
                break
    return float(best), hits, truncated


def ml_full_bruteforce(
    trace: ViralTrace,
    p: SISParams,
    limit_bits: int = FULL_LIMIT_BITS,
    connected_only: bool = False,
) -> MLResult:
    """Maximise the log-likelihood over all ``2^(n(n-1)/2)`` candidate matrices.

    Candidates are not required to be connected; ``connected_only`` filters
    the reported argmax (and its value) to connected matrices.
    """
    n = trace.n_nodes
    width = n * (n - 1) // 2
    if width > limit_bits:
        raise TooLarge(f"{width} free entries exceed the limit of {limit_bits} bits")
    model = TallyModel(trace.tally(), n, p)

    def connected(codes):
        return np.array([is_connected(AdjacencyMatrix.from_upper_bits(n, int(c))) for c in codes])

    best, hits, truncated = _search(model, 1 << width, width, lambda b: b, connected if connected_only else None)
    if not hits:
        raise Degenerate("every candidate has zero likelihood")
    return MLResult(best, tuple(format(c, f"0{width}b") if width else "" for c in hits), 1 << width, truncated)


def ml_reduced_bruteforce(
    trace: ViralTrace, host: AdjacencyMatrix, p: SISParams, limit: int = REDUCED_LIMIT
) -> MLResult:
    """Maximise over first-row completions ``a_13 .. a_1n``.

    ``a_12`` is forced to 1 and every entry among nodes ``2..n`` is copied
    from ``host``.
    """
    n = host.n
    if trace.n_nodes != n:
        raise LengthMismatch(f"trace has {trace.n_nodes} nodes, host has {n}")
    m = n - 2
    if m > limit:
        raise TooLarge(f"{m} free entries exceed the limit of {limit}")
    model = TallyModel(trace.tally(), n, p)
    best, hits, truncated = _search(model, 1 << m, m, lambda rows: reduced_bits(host, rows))
    if not hits:
        raise Degenerate("every completion has zero likelihood")
    return MLResult(best, tuple(format(c, f"0{m}b") if m else "" for c in hits), 1 << m, truncated, reduced=True)


def reevaluate(result: MLResult, trace: ViralTrace, p: SISParams, host: AdjacencyMatrix | None = None) -> np.ndarray:
    """Log-likelihood of every argmax member, by the same evaluator."""
    n = trace.n_nodes
    model = TallyModel(trace.tally(), n, p)
    if result.reduced:
        rows = np.array([[int(c) for c in s] for s in result.argmax], dtype=np.int8).reshape(len(result.argmax), n - 2)
        return model.totals(reduced_bits(host, rows))
    bits = np.array([[int(c) for c in s] for s in result.argmax], dtype=np.int8)
    return model.totals(bits)


@dataclass(frozen=True)
class ReductionRun:
    """Everything produced by one pass of the max-cut solver via reconstruction."""

    cut_value: int
    assignment: CutAssignment
    plan: object
    trace: ViralTrace
    result: MLResult
    assignments: tuple[CutAssignment, ...]


def run_reduction(Gtilde: AdjacencyMatrix, p: SISParams, mode: str = "reduced", host: AdjacencyMatrix | None = None) -> ReductionRun:
    """Build the trace for ``mode``, solve ML by brute force and read the cut.

    ``y_k = a_1,k+2`` of the lexicographically smallest argmax gives the
    reported assignment; ``assignments`` lists the readings of every argmax
    member.
    """
    if mode == "reduced":
        plan = plan_reduction(Gtilde, p, host)
        trace = build_reduced_trace(plan)
        result = ml_reduced_bruteforce(trace, plan.host, p)
        ys = [tuple(int(c) for c in s) for s in result.argmax]
    elif mode == "full":
        plan = plan_full_reduction(Gtilde, p, host)
        trace = build_full_trace(plan)
        result = ml_full_bruteforce(trace, p)
        n = plan.n
        ys = [tuple(int(A[1, l]) for l in range(3, n + 1)) for A in result.matrices()]
    else:
        raise ValueError(f"mode must be 'reduced' or 'full', not {mode!r}")
    y = min(ys)
    return ReductionRun(cut_size(Gtilde, y), y, plan, trace, result, tuple(ys))


def solve_maxcut_via_reduction(Gtilde: AdjacencyMatrix, p: SISParams, mode: str = "reduced") -> tuple[int, CutAssignment]:
    run = run_reduction(Gtilde, p, mode)
    return run.cut_value, run.assignment
