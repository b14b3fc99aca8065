"""Misclassification counts and the F1 identification score."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ErrorCounts:
    tp: int
    fp: int  # misclassification by inclusion (MCI)
    fn: int  # misclassification by exclusion (MCE)

    @property
    def mci(self) -> int:
        return self.fp

    @property
    def mce(self) -> int:
        return self.fn


def classify_errors(identified, truth) -> ErrorCounts:
    ident = {int(i) for i in identified}
    true = {int(i) for i in truth}
    return ErrorCounts(tp=len(ident & true), fp=len(ident - true), fn=len(true - ident))


def precision(c: ErrorCounts) -> float:
    return c.tp / (c.tp + c.fp) if c.tp else 0.0


def recall(c: ErrorCounts) -> float:
    return c.tp / (c.tp + c.fn) if c.tp else 0.0


def f1(c: ErrorCounts) -> float:
    """Harmonic mean of precision and recall; 0 when there are no true positives.

    Evaluated as 2tp / (2tp + fp + fn), which is the same quantity without
    the intermediate rounding of the two ratios.
    """
    if c.tp == 0:
        return 0.0
    return 2.0 * c.tp / (2.0 * c.tp + c.fp + c.fn)
