"""Differential testing of the LF kernel against encode-then-prove.

Closed objects are enumerated exhaustively by size and paired with every
small atomic type. Each pair is decided twice: directly by the kernel, and
by searching for a proof of the encoded goal from the encoded signature.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from . import kernel
from .encoding import HHProgram, encode_signature, judgment_to_goal
from .erasure import erase_object
from .kernel import Derivable, LfTypeError, Ok, check_family, check_object
from .printer import show_lf
from .prover import (
    ProofTrace, Proved, replay_trace, solve_iterative,
    trace_to_json,
)
from .syntax import (
    TM, TYPE, App, Const, EMPTY_CONTEXT, FamApp, FamConst, KindPi, Lam, LfContext, LfFamily,
    LfObject,
    LfSignature, Pi, SimpleTypeError, Var, fresh_name, lf_close, lf_size, st_typeof,
)

log = logging.getLogger(__name__)

AGREE_YES = "AgreeYes"
AGREE_NO = "AgreeNo"
UNSOUND = "UnsoundMismatch"
TIMEOUT = "InconclusiveTimeout"
NON_PATTERN = "InconclusiveNonPattern"
HARNESS_ERROR = "HarnessError"
CLASSIFICATIONS = (AGREE_YES, AGREE_NO, UNSOUND, TIMEOUT, NON_PATTERN, HARNESS_ERROR)

_BINDER_HINTS = ("x", "y", "u", "v", "w")


@dataclass(frozen=True)
class CampaignConfig:
    signature: LfSignature
    max_term_size: int = 7
    max_index_size: int = 1
    depth_mult: int = 4
    parallelism: int = 1

    def __post_init__(self):
        if min(self.max_term_size, self.max_index_size, self.depth_mult, self.parallelism) < 1:
            raise ValueError("campaign bounds must be positive")


@dataclass(frozen=True)
class CaseVerdict:
    term: LfObject
    type: LfFamily
    kernel: bool
    prover: str
    classification: str
    kernel_reason: LfTypeError | None = None
    trace: ProofTrace | None = None

    @property
    def size(self) -> int:
        return lf_size(self.term)


@dataclass
class CampaignReport:
    config: CampaignConfig
    totals: dict[str, int] = field(default_factory=dict)
    totals_by_size: dict[int, dict[str, int]] = field(default_factory=dict)
    mismatches: list[CaseVerdict] = field(default_factory=list)
    harness_errors: list[CaseVerdict] = field(default_factory=list)
    soundness_violations: list[CaseVerdict] = field(default_factory=list)
    objects: int = 0
    skipped_ill_sorted: int = 0
    types: list[LfFamily] = field(default_factory=list)

    @property
    def cases(self) -> int:
        return sum(self.totals.values())


# ---------------------------------------------------------------------------
# enumeration

class _Enumerator:
    def __init__(self, sig: LfSignature):
        self.sig = sig
        self.obj_consts = [Const(d.name) for d in sig.decls if not d.is_family]
        self.fam_consts = [FamConst(d.name) for d in sig.decls if d.is_family]
        self._objs: dict = {}
        self._heads: dict = {}
        self._fams: dict = {}

    def ctx(self, scope) -> LfContext:
        return LfContext(tuple(scope))

    def fresh(self, scope) -> str:
        hint = _BINDER_HINTS[len(scope) % len(_BINDER_HINTS)]
        return fresh_name(hint, self.sig.names() | {n for n, _ in scope})

    def objects(self, n: int, scope: tuple) -> list[LfObject]:
        """Raw well-scoped objects of exactly size ``n``."""
        key = (n, scope)
        if key in self._objs:
            return self._objs[key]
        out: list[LfObject] = []
        if n == 1:
            out += self.obj_consts
            out += [Var(x) for x, _ in scope]
        for i in range(1, n):
            for f in self.objects(i, scope):
                for a in self.objects(n - i, scope):
                    out.append(App(f, a))
        for k in range(1, n - 1):
            for a in self.families(k, scope):
                x = self.fresh(scope)
                for b in self.objects(n - 1 - k, scope + ((x, a),)):
                    out.append(Lam(x, a, lf_close(b, x)))
        out = list(dict.fromkeys(out))
        self._objs[key] = out
        return out

    def heads(self, n: int, scope: tuple) -> list[tuple[LfFamily, object]]:
        """Well-kinded family applications of size ``n`` with their kinds."""
        key = (n, scope)
        if key in self._heads:
            return self._heads[key]
        ctx = self.ctx(scope)
        cands: list[LfFamily] = list(self.fam_consts) if n == 1 else []
        for i in range(1, n):
            for h, k in self.heads(i, scope):
                if not isinstance(k, KindPi):
                    continue
                for a in self.objects(n - i, scope):
                    cands.append(FamApp(h, a))
        out = []
        for c in cands:
            r = check_family(self.sig, ctx, c)
            if isinstance(r, Ok):
                out.append((c, r.value))
        self._heads[key] = out
        return out

    def families(self, n: int, scope: tuple) -> list[LfFamily]:
        """Families of kind type and exactly size ``n``, valid in ``scope``."""
        key = (n, scope)
        if key in self._fams:
            return self._fams[key]
        out = [h for h, k in self.heads(n, scope) if k == TYPE]
        for k in range(1, n - 1):
            for a in self.families(k, scope):
                x = self.fresh(scope)
                for b in self.families(n - 1 - k, scope + ((x, a),)):
                    out.append(Pi(x, a, lf_close(b, x)))
        out = list(dict.fromkeys(out))
        self._fams[key] = out
        return out


def enumerate_objects(sig: LfSignature, size: int) -> Iterator[LfObject]:
    """All closed objects of size at most ``size``, smallest first, no alpha-duplicates.

    Lambda annotations range over families the kernel accepts in scope.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    en = _Enumerator(sig)
    for n in range(1, size + 1):
        yield from en.objects(n, ())


def enumerate_atomic_types(sig: LfSignature, max_index_size: int) -> list[LfFamily]:
    """Closed atomic families of kind type whose indices have size <= ``max_index_size``."""
    en = _Enumerator(sig)
    out = []
    level = [(h, k) for h in en.fam_consts
             for k in [check_family(sig, EMPTY_CONTEXT, h)] if isinstance(k, Ok)]
    level = [(h, k.value) for h, k in level]
    while level:
        nxt = []
        for h, k in level:
            if k == TYPE:
                out.append(h)
            elif isinstance(k, KindPi):
                for n in range(1, max_index_size + 1):
                    for a in en.objects(n, ()):
                        c = FamApp(h, a)
                        r = check_family(sig, EMPTY_CONTEXT, c)
                        if isinstance(r, Ok):
                            nxt.append((c, r.value))
        level = nxt
    return list(dict.fromkeys(out))


# ---------------------------------------------------------------------------
# cases

def _prover_label(r) -> str:
    return type(r).__name__


def classify(kernel_ok: bool, prover: str) -> str:
    if prover == "Proved":
        return AGREE_YES if kernel_ok else UNSOUND
    if prover == "Exhausted":
        return TIMEOUT
    if prover == "Incomplete":
        return NON_PATTERN
    return HARNESS_ERROR if kernel_ok else AGREE_NO


def run_case(sig: LfSignature, m: LfObject, a: LfFamily, config: CampaignConfig,
             program: HHProgram | None = None) -> CaseVerdict:
    k = check_object(sig, EMPTY_CONTEXT, m, a)
    kernel_ok = isinstance(k, Derivable)
    program = program if program is not None else encode_signature(sig)
    goal = judgment_to_goal(sig, m, a)
    r = solve_iterative(program, goal, config.depth_mult * lf_size(m))
    label = _prover_label(r)
    return CaseVerdict(m, a, kernel_ok, label, classify(kernel_ok, label),
                       None if kernel_ok else k.reason,
                       r.trace if isinstance(r, Proved) else None)


def well_sorted(sig: LfSignature, m: LfObject) -> bool:
    """Whether the erasure of ``m`` is a simply typed term of type tm."""
    try:
        return st_typeof(erase_object(m, sig)) == TM
    except SimpleTypeError:
        return False


def _run_chunk(args) -> list[CaseVerdict]:
    sig, pairs, config = args
    program = encode_signature(sig, checked=True)
    return [run_case(sig, m, a, config, program) for m, a in pairs]


def run_campaign(config: CampaignConfig) -> CampaignReport:
    sig = config.signature
    report = CampaignReport(config)
    if not sig.decls:
        return report
    res = kernel.check_signature(sig)
    if not isinstance(res, Derivable):
        raise ValueError(f"signature rejected: {res.reason}")
    types = enumerate_atomic_types(sig, config.max_index_size)
    report.types = types
    pairs = []
    for m in enumerate_objects(sig, config.max_term_size):
        report.objects += 1
        if not well_sorted(sig, m):
            report.skipped_ill_sorted += 1
            continue
        pairs += [(m, a) for a in types]
    log.info("%d objects, %d candidate judgments", report.objects, len(pairs))

    if config.parallelism > 1 and len(pairs) > 1:
        step = max(1, len(pairs) // (config.parallelism * 4))
        chunks = [(sig, pairs[i:i + step], config) for i in range(0, len(pairs), step)]
        with ProcessPoolExecutor(config.parallelism) as ex:
            verdicts = [v for chunk in ex.map(_run_chunk, chunks) for v in chunk]
    else:
        verdicts = _run_chunk((sig, pairs, config))

    totals = Counter({c: 0 for c in CLASSIFICATIONS})
    by_size: dict[int, Counter] = {}
    for v in verdicts:
        totals[v.classification] += 1
        by_size.setdefault(v.size, Counter())[v.classification] += 1
        if v.classification == UNSOUND:
            report.mismatches.append(v)
        if v.classification == HARNESS_ERROR:
            report.harness_errors.append(v)
        if v.kernel and v.prover != "Proved":
            report.soundness_violations.append(v)
    report.totals = dict(totals)
    report.totals_by_size = {s: dict(c) for s, c in sorted(by_size.items())}
    return report


def verify_mismatch(sig: LfSignature, v: CaseVerdict, program: HHProgram | None = None) -> bool:
    """Re-check both sides of a reported mismatch independently."""
    program = program if program is not None else encode_signature(sig)
    goal = judgment_to_goal(sig, v.term, v.type)
    if v.trace is None or not replay_trace(program, goal, v.trace):
        return False
    return all(not isinstance(check_object(sig, EMPTY_CONTEXT, v.term, v.type, conv), Derivable)
               for conv in (kernel.BETA_ETA, kernel.BETA))


def report_to_json(report: CampaignReport) -> dict:
    cfg = report.config
    sig = cfg.signature
    program = encode_signature(sig, checked=True) if sig.decls else None

    def case(v: CaseVerdict) -> dict:
        return {
            "classification": v.classification,
            "term": show_lf(v.term),
            "type": show_lf(v.type),
            "size": v.size,
            "kernel": v.kernel,
            "kernel_reason": None if v.kernel_reason is None else {
                "kind": v.kernel_reason.kind,
                "message": v.kernel_reason.message,
                "pinpoint": list(v.kernel_reason.pinpoint) if v.kernel_reason.pinpoint else None,
            },
            "prover": v.prover,
            "trace": None if v.trace is None else trace_to_json(v.trace),
        }

    mismatches = []
    for v in report.mismatches:
        d = case(v)
        d["verified"] = verify_mismatch(sig, v, program)
        mismatches.append(d)
    return {
        "schema": 1,
        "config": {
            "max_term_size": cfg.max_term_size,
            "max_index_size": cfg.max_index_size,
            "depth_mult": cfg.depth_mult,
        },
        "objects": report.objects,
        "skipped_ill_sorted": report.skipped_ill_sorted,
        "types": [show_lf(a) for a in report.types],
        "cases": report.cases,
        "totals": report.totals,
        "totals_by_size": {str(k): v for k, v in report.totals_by_size.items()},
        "mismatches": mismatches,
        "harness_errors": [case(v) for v in report.harness_errors],
        "soundness_violations": [case(v) for v in report.soundness_violations],
        "ordering": "objects by size, then construction order; types in enumeration order",
    }


def report_to_text(report: CampaignReport) -> str:
    lines = [
        f"objects enumerated: {report.objects} "
        f"(skipped {report.skipped_ill_sorted} with ill-sorted erasure)",
        f"atomic types: {', '.join(show_lf(a) for a in report.types)}",
        f"judgments checked: {report.cases}",
    ]
    for c in CLASSIFICATIONS:
        lines.append(f"  {c:<24} {report.totals.get(c, 0)}")
    for v in report.mismatches:
        pin = v.kernel_reason.pinpoint if v.kernel_reason else None
        why = f"{pin[1]} vs {pin[0]}" if pin else (v.kernel_reason.kind if v.kernel_reason else "")
        lines.append(f"UNSOUND  {show_lf(v.term)} : {show_lf(v.type)}    [kernel: {why}]")
    for v in report.soundness_violations:
        lines.append(f"SOUNDNESS-DIRECTION  {show_lf(v.term)} : {show_lf(v.type)}  "
                     f"prover={v.prover}")
    return "\n".join(lines) + "\n"
