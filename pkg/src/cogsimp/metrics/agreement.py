"""Per-operation precision/recall/F1 and Cohen's kappa between two labelings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..core import ALL_OPS, OperationSet, OperationToken


@dataclass(frozen=True)
class OpScores:
    precision: float | None
    recall: float | None
    f1: float | None
    support: int
    predicted: int


@dataclass(frozen=True)
class AgreementReport:
    per_op: Mapping[OperationToken, OpScores]
    micro: tuple[float | None, float | None, float | None]
    kappa_per_op: Mapping[OperationToken, float | None]
    n_items: int

    def as_dict(self) -> dict:
        na = lambda v: "n/a" if v is None else v  # noqa: E731
        return {
            "n_items": self.n_items,
            "micro": dict(zip(("precision", "recall", "f1"), map(na, self.micro))),
            "per_op": {
                op.name: {
                    "precision": na(s.precision), "recall": na(s.recall), "f1": na(s.f1),
                    "support": s.support, "predicted": s.predicted,
                    "kappa": na(self.kappa_per_op[op]),
                }
                for op, s in self.per_op.items()
            },
        }

    def table(self) -> str:
        fmt = lambda v: "n/a" if v is None else f"{100 * v:.2f}"  # noqa: E731
        rows = [f"{'Operation':<12}{'P.':>8}{'R.':>8}{'F1':>8}{'#':>6}{'kappa':>8}"]
        for op, s in self.per_op.items():
            k = self.kappa_per_op[op]
            rows.append(f"{op.surface:<12}{fmt(s.precision):>8}{fmt(s.recall):>8}{fmt(s.f1):>8}"
                        f"{s.support:>6}{'n/a' if k is None else f'{k:.3f}':>8}")
        p, r, f = self.micro
        rows.append(f"{'micro':<12}{fmt(p):>8}{fmt(r):>8}{fmt(f):>8}")
        return "\n".join(rows)


def _prf(tp: int, fp: int, fn: int):
    p = tp / (tp + fp) if tp + fp else None
    r = tp / (tp + fn) if tp + fn else None
    if p is None or r is None:
        f = None
    else:
        f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def cohen_kappa(a: list[bool], b: list[bool]) -> float | None:
    """Kappa for two binary label vectors; None when chance agreement is 1."""
    n = len(a)
    if n == 0:
        return None
    po = sum(x == y for x, y in zip(a, b)) / n
    pa, pb = sum(a) / n, sum(b) / n
    pe = pa * pb + (1 - pa) * (1 - pb)
    if pe >= 1.0:
        return None
    return (po - pe) / (1 - pe)


def agreement(pred: Mapping[str, OperationSet], gold: Mapping[str, OperationSet]) -> AgreementReport:
    """Score ``pred`` against ``gold`` on the ids they share."""
    ids = sorted(pred.keys() & gold.keys())
    if not ids:
        raise ValueError("prediction and gold labels share no ids")
    per_op = {}
    kappa = {}
    TP = FP = FN = 0
    for op in ALL_OPS:
        p_vec = [op in pred[i] for i in ids]
        g_vec = [op in gold[i] for i in ids]
        tp = sum(p and g for p, g in zip(p_vec, g_vec))
        fp = sum(p and not g for p, g in zip(p_vec, g_vec))
        fn = sum(g and not p for p, g in zip(p_vec, g_vec))
        TP, FP, FN = TP + tp, FP + fp, FN + fn
        support = tp + fn
        if support == 0:
            scores = OpScores(None, None, None, 0, tp + fp)
        else:
            scores = OpScores(*_prf(tp, fp, fn), support, tp + fp)
        per_op[op] = scores
        kappa[op] = cohen_kappa(p_vec, g_vec)
    return AgreementReport(per_op, _prf(TP, FP, FN), kappa, len(ids))
