"""Verification reports shared by every checking routine and the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from .series import Comparison, HalfExp, Mismatch, QSeries

SCHEMA_VERSION = "report-v1"
PASS, FAIL, ERROR = "pass", "fail", "error"


def honesty_note(order: HalfExp) -> str:
    return f"verified to order {order} (truncated-series equality), not a proof"


@dataclass
class VerificationReport:
    id: str
    order: HalfExp
    status: str
    first_mismatch: Mismatch | None = None
    elapsed_ms: float = 0.0
    lhs_terms: int = 0
    rhs_terms: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    location: str = ""
    message: str = ""
    #: for sequence checks (Bailey pairs), the index that failed
    failed_index: int | None = None

    def __post_init__(self):
        if self.status == FAIL and self.first_mismatch is None and self.failed_index is None:
            raise ValueError("a failing report must carry its first mismatch")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self):
        return self.passed

    @classmethod
    def from_comparison(cls, ident: str, order: HalfExp, cmp: Comparison, t0: float,
                        lhs: QSeries | None = None, rhs: QSeries | None = None,
                        **extra) -> "VerificationReport":
        return cls(
            id=ident,
            order=order,
            status=PASS if cmp.equal else FAIL,
            first_mismatch=cmp.mismatch,
            elapsed_ms=(time.perf_counter() - t0) * 1e3,
            lhs_terms=lhs.term_count() if lhs is not None else 0,
            rhs_terms=rhs.term_count() if rhs is not None else 0,
            **extra,
        )

    def to_dict(self) -> dict[str, Any]:
        mm = None
        if self.first_mismatch is not None:
            m = self.first_mismatch
            mm = {"q_exp": str(m.q_exp), "z_exp": m.z_exp, "lhs": str(m.left), "rhs": str(m.right)}
        out = {
            "id": self.id,
            "order": str(self.order),
            "params": {k: self.params[k] for k in sorted(self.params)},
            "status": self.status,
            "first_mismatch": mm,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "terms": {"lhs": self.lhs_terms, "rhs": self.rhs_terms},
            "location": self.location,
            "note": honesty_note(self.order),
        }
        if self.failed_index is not None:
            out["failed_index"] = self.failed_index
        if self.message:
            out["message"] = self.message
        return out

    def summary_line(self) -> str:
        tag = self.status.upper()
        extra = ""
        if self.failed_index is not None:
            extra = f" first failing n={self.failed_index}"
        if self.first_mismatch is not None:
            m = self.first_mismatch
            extra += f" first mismatch at q^{m.q_exp} z^{m.z_exp}: {m.left} != {m.right}"
        if self.message:
            extra += f" ({self.message})"
        params = "".join(f" {k}={v}" for k, v in sorted(self.params.items()))
        return f"{tag:5} {self.id}{params} order={self.order} [{self.elapsed_ms:.0f} ms]{extra}"
