"""
Decision Scoring
================

Ground truth for the window starting at k is the channel active at sample k.
A window is transient when a mode switch happens inside it, i.e. at some s
with k < s <= k + L - 1. Ambiguous decisions count as incorrect and are
tallied separately when the tied set contains the true channel.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..classifier.angle_classifier import Decision, DecisionStatus
from ..errors import DimensionMismatch
from ..system.models import FaultChannel

ACCURACY_DEFINITION = {
    "accuracy": "correct / fault-active windows whose residual norm exceeds the threshold",
    "accuracy_all_active": "correct / all fault-active windows",
    "accuracy_steady": "correct / detected fault-active windows that contain no mode switch",
    "accuracy_transient": "correct / detected fault-active windows that contain a mode switch",
    "truth": "channel active at the window start",
    "ambiguous": "counted incorrect",
}

HEALTHY = "healthy"
AMBIGUOUS = "ambiguous"


def switch_points(active: Sequence[Optional[FaultChannel]]) -> List[int]:
    """Samples s where the active channel differs from sample s - 1"""
    return [s for s in range(1, len(active)) if active[s] != active[s - 1]]


def transient_mask(active: Sequence[Optional[FaultChannel]], L: int, count: int) -> np.ndarray:
    """True for window starts k < count whose window straddles a switch"""
    mask = np.zeros(count, dtype=bool)
    for s in switch_points(active):
        mask[max(0, s - L + 1): min(count, s)] = True
    return mask


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator else None


@dataclass
class ScoreCard:
    evaluated: int
    fault_active: int
    detected_active: int
    correct_detected: int
    correct_all: int
    steady_detected: int
    correct_steady: int
    transient_detected: int
    correct_transient: int
    ambiguous: int
    ambiguous_containing_truth: int
    false_alarms: int
    healthy_windows: int
    confusion: Dict[str, Dict[str, int]] = field(default_factory=dict)

    @property
    def accuracy(self) -> Optional[float]:
        return _ratio(self.correct_detected, self.detected_active)

    @property
    def accuracy_all_active(self) -> Optional[float]:
        return _ratio(self.correct_all, self.fault_active)

    @property
    def accuracy_steady(self) -> Optional[float]:
        return _ratio(self.correct_steady, self.steady_detected)

    @property
    def accuracy_transient(self) -> Optional[float]:
        return _ratio(self.correct_transient, self.transient_detected)

    @property
    def false_alarm_rate(self) -> Optional[float]:
        return _ratio(self.false_alarms, self.healthy_windows)

    def confusion_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.confusion).T.fillna(0).astype(int)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "accuracy_all_active": self.accuracy_all_active,
            "accuracy_steady": self.accuracy_steady,
            "accuracy_transient": self.accuracy_transient,
            "false_alarm_rate": self.false_alarm_rate,
            "evaluated": self.evaluated,
            "fault_active": self.fault_active,
            "detected_active": self.detected_active,
            "correct_detected": self.correct_detected,
            "steady_detected": self.steady_detected,
            "transient_detected": self.transient_detected,
            "ambiguous": self.ambiguous,
            "ambiguous_containing_truth": self.ambiguous_containing_truth,
            "false_alarms": self.false_alarms,
            "confusion": self.confusion,
            "definition": ACCURACY_DEFINITION,
        }


def _predicted_label(decision: Decision) -> str:
    if decision.status == DecisionStatus.HEALTHY:
        return HEALTHY
    if decision.status == DecisionStatus.AMBIGUOUS:
        return AMBIGUOUS
    return decision.channels[0].label


def score(
    decisions: Sequence[Decision],
    active: Sequence[Optional[FaultChannel]],
    L: int,
    channels: Sequence[FaultChannel],
) -> ScoreCard:
    """
    Score one decision sequence against per-sample ground truth

    Confusion rows are true labels, columns predicted labels, both over
    every evaluated window; the counts sum to the number of decisions.
    """
    count = len(decisions)
    if count > len(active):
        raise DimensionMismatch(f"{count} decisions but only {len(active)} ground-truth samples")

    labels = [HEALTHY] + [c.label for c in channels]
    columns = labels + [AMBIGUOUS]
    confusion = {row: {col: 0 for col in columns} for row in labels}
    transient = transient_mask(active, L, count)

    totals = dict.fromkeys(
        (
            "fault_active", "detected_active", "correct_detected", "correct_all",
            "steady_detected", "correct_steady", "transient_detected", "correct_transient",
            "ambiguous", "ambiguous_containing_truth", "false_alarms", "healthy_windows",
        ),
        0,
    )

    for k, decision in enumerate(decisions):
        truth = active[k]
        predicted = _predicted_label(decision)
        row = HEALTHY if truth is None else truth.label
        confusion.setdefault(row, {col: 0 for col in columns})[predicted] += 1

        if truth is None:
            totals["healthy_windows"] += 1
            totals["false_alarms"] += predicted != HEALTHY
            continue

        correct = decision.status == DecisionStatus.FAULT and decision.channels[0] == truth
        detected = decision.status != DecisionStatus.HEALTHY
        totals["fault_active"] += 1
        totals["correct_all"] += correct
        if decision.status == DecisionStatus.AMBIGUOUS:
            totals["ambiguous"] += 1
            totals["ambiguous_containing_truth"] += truth in decision.channels
        if not detected:
            continue
        totals["detected_active"] += 1
        totals["correct_detected"] += correct
        if transient[k]:
            totals["transient_detected"] += 1
            totals["correct_transient"] += correct
        else:
            totals["steady_detected"] += 1
            totals["correct_steady"] += correct

    return ScoreCard(evaluated=count, confusion=confusion, **{k: int(v) for k, v in totals.items()})
