"""Ground-truth product-based checker: enumerate, bind, evaluate.

This is the reference semantics the family-based route must agree with:
a product line satisfies a constraint for all variants exactly when every
valid configuration's bound variant satisfies the original, unlifted
constraint.  Deliberately brute force, and deliberately independent of
the SMT translation.
"""

from __future__ import annotations

import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from . import smt
from .binding import BoundVariant, bind
from .lifting import lift
from .constraints import TypedConstraint, evaluate
from .variability import (Configuration, DEFAULT_ENUMERATION_CAP, ProductLine,
                          enumerate_configurations)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AllVariantsSatisfy:
    count: int  # number of variants checked; 0 flags a vacuous feature model

    @property
    def vacuous(self) -> bool:
        return self.count == 0


@dataclass(frozen=True)
class Violation:
    config: Configuration
    variant: BoundVariant


OracleVerdict = Union[AllVariantsSatisfy, Violation]


def oracle_check(pl: ProductLine, tc: TypedConstraint,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> OracleVerdict:
    """First violating configuration in lexicographic order, if any."""
    configs = enumerate_configurations(pl.feature_model, cap=cap)
    if not configs:
        logger.warning(
            "feature model is unsatisfiable; every constraint holds "
            "vacuously over zero variants")
        return AllVariantsSatisfy(0)
    for k in configs:
        variant = bind(pl, k)
        if not evaluate(tc, pl.metamodel, variant.graph):
            return Violation(k, variant)
    return AllVariantsSatisfy(len(configs))


@dataclass(frozen=True)
class EquivalenceReport:
    agree: bool
    oracle_verdict: OracleVerdict
    smt_verdict: smt.Verdict
    detail: str = ""


def _verdict_kind(verdict) -> str:
    if isinstance(verdict, (AllVariantsSatisfy, smt.AllVariantsSatisfy)):
        return "satisfies"
    if isinstance(verdict, (Violation, smt.Violation)):
        return "violation"
    return "unknown"


def equivalence_test(pl: ProductLine, tc: TypedConstraint,
                     solver_cmd=None, cap: int = DEFAULT_ENUMERATION_CAP,
                     timeout: float | None = None) -> EquivalenceReport:
    """Run both routes and compare verdict kinds.

    On disagreement the emitted script is dumped to a temp file and the
    oracle's witness (if any) is described, so the case can be replayed.
    """
    oracle_verdict = oracle_check(pl, tc, cap=cap)
    smt_verdict = smt.check(pl, tc, solver_cmd=solver_cmd, timeout=timeout)
    agree = _verdict_kind(oracle_verdict) == _verdict_kind(smt_verdict)
    detail = ""
    if not agree:
        script = smt.emit_smt(pl, lift(tc))
        path = Path(tempfile.mkstemp(suffix=".smt2", prefix="plift-")[1])
        path.write_text(script.text, encoding="utf-8")
        witness = ""
        if isinstance(oracle_verdict, Violation):
            witness = f"; oracle witness {oracle_verdict.config}"
        detail = f"script dumped to {path}{witness}"
    return EquivalenceReport(agree, oracle_verdict, smt_verdict, detail)

