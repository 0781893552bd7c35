"""
Fault Scenarios
===============

Piecewise fault schedules. A segment covers the half-open interval
[start, end) and drives one channel with a closed set of signal shapes.
Shapes are evaluated at the absolute sample index k.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidScenario
from .models import FaultChannel, all_channels


class SignalKind(Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    SINUSOID = "sinusoid"
    GEOMETRIC_DECAY = "geometric_decay"
    STEP = "step"
    SERIES = "series"


@dataclass(frozen=True)
class FaultSignal:
    """
    Time-function descriptor

    zero            0
    constant        value
    sinusoid        amplitude * sin(2 pi frequency k + phase)
    geometric_decay amplitude * base ** (k - offset)
    step            level for k >= at, 0 before
    series          values[k - start] (explicit samples)
    """

    kind: SignalKind
    value: float = 0.0
    amplitude: float = 1.0
    frequency: float = 0.0
    phase: float = 0.0
    base: float = 1.0
    offset: int = 0
    level: float = 0.0
    at: Optional[int] = None
    values: Tuple[float, ...] = ()

    @classmethod
    def zero(cls) -> "FaultSignal":
        return cls(SignalKind.ZERO)

    @classmethod
    def constant(cls, value: float) -> "FaultSignal":
        return cls(SignalKind.CONSTANT, value=value)

    @classmethod
    def sinusoid(cls, amplitude: float, frequency: float, phase: float = 0.0) -> "FaultSignal":
        return cls(SignalKind.SINUSOID, amplitude=amplitude, frequency=frequency, phase=phase)

    @classmethod
    def geometric_decay(cls, base: float, offset: int, amplitude: float = 1.0) -> "FaultSignal":
        return cls(SignalKind.GEOMETRIC_DECAY, base=base, offset=offset, amplitude=amplitude)

    @classmethod
    def step(cls, level: float, at: Optional[int] = None) -> "FaultSignal":
        return cls(SignalKind.STEP, level=level, at=at)

    @classmethod
    def series(cls, values: Sequence[float]) -> "FaultSignal":
        return cls(SignalKind.SERIES, values=tuple(float(v) for v in values))

    def evaluate(self, k: np.ndarray, start: int = 0) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == SignalKind.ZERO:
            return np.zeros_like(k)
        if self.kind == SignalKind.CONSTANT:
            return np.full_like(k, self.value)
        if self.kind == SignalKind.SINUSOID:
            return self.amplitude * np.sin(2.0 * np.pi * self.frequency * k + self.phase)
        if self.kind == SignalKind.GEOMETRIC_DECAY:
            return self.amplitude * np.power(self.base, k - self.offset)
        if self.kind == SignalKind.STEP:
            at = start if self.at is None else self.at
            return np.where(k >= at, self.level, 0.0)
        # series
        idx = (k - start).astype(int)
        if np.any(idx >= len(self.values)):
            raise InvalidScenario(f"series of length {len(self.values)} is shorter than its segment")
        return np.asarray(self.values, dtype=float)[idx]

    def scaled(self, factor: float) -> "FaultSignal":
        """Same shape with every magnitude multiplied by factor"""
        return replace(
            self,
            value=self.value * factor,
            amplitude=self.amplitude * factor,
            level=self.level * factor,
            values=tuple(v * factor for v in self.values),
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind == SignalKind.CONSTANT:
            data["value"] = self.value
        elif self.kind == SignalKind.SINUSOID:
            data.update(amplitude=self.amplitude, frequency=self.frequency, phase=self.phase)
        elif self.kind == SignalKind.GEOMETRIC_DECAY:
            data.update(amplitude=self.amplitude, base=self.base, offset=self.offset)
        elif self.kind == SignalKind.STEP:
            data.update(level=self.level, at=self.at)
        elif self.kind == SignalKind.SERIES:
            data["values"] = list(self.values)
        return data


@dataclass(frozen=True)
class FaultSegment:
    start: int
    end: int
    channel: FaultChannel
    signal: FaultSignal

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise InvalidScenario(f"segment [{self.start}, {self.end}) is empty or negative")

    def overlaps(self, other: "FaultSegment") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass
class FaultScenario:
    """
    Ordered list of fault segments

    Segments may not overlap in time unless allow_simultaneous is set, which
    is reserved for multi-fault experiments.
    """

    segments: List[FaultSegment] = field(default_factory=list)
    allow_simultaneous: bool = False

    def __post_init__(self):
        self.segments = sorted(self.segments, key=lambda s: (s.start, s.channel.sort_key))
        for i, first in enumerate(self.segments):
            for second in self.segments[i + 1:]:
                if not first.overlaps(second):
                    continue
                if first.channel == second.channel or not self.allow_simultaneous:
                    raise InvalidScenario(
                        f"segments {first.channel.label}[{first.start},{first.end}) and "
                        f"{second.channel.label}[{second.start},{second.end}) overlap"
                    )

    @classmethod
    def healthy(cls) -> "FaultScenario":
        return cls([])

    def validate(self, length: int, n_u: int, n_y: int) -> None:
        for segment in self.segments:
            segment.channel.validate(n_u, n_y)
            if segment.end > length:
                raise InvalidScenario(
                    f"segment {segment.channel.label}[{segment.start},{segment.end}) exceeds length {length}"
                )

    def channels(self) -> List[FaultChannel]:
        seen = {s.channel for s in self.segments}
        return sorted(seen, key=lambda c: c.sort_key)

    def scaled(self, factor: float) -> "FaultScenario":
        return FaultScenario(
            [replace(s, signal=s.signal.scaled(factor)) for s in self.segments],
            self.allow_simultaneous,
        )

    def materialize(
        self, length: int, n_u: int, n_y: int
    ) -> Tuple[np.ndarray, List[Optional[FaultChannel]]]:
        """
        Fault values per channel and the active channel per sample

        Returns:
            (f, active): f is length x (n_u + n_y) in all_channels order;
            active[k] is the channel whose segment covers k, or None
        """
        self.validate(length, n_u, n_y)
        columns = {c: i for i, c in enumerate(all_channels(n_u, n_y))}
        f = np.zeros((length, len(columns)))
        active: List[Optional[FaultChannel]] = [None] * length

        for segment in self.segments:
            k = np.arange(segment.start, segment.end)
            f[segment.start:segment.end, columns[segment.channel]] += segment.signal.evaluate(k, segment.start)
            for t in range(segment.start, segment.end):
                if active[t] is None:
                    active[t] = segment.channel
        return f, active

    def to_dict(self) -> Dict[str, Any]:
        return {
            "allow_simultaneous": self.allow_simultaneous,
            "segments": [
                {
                    "start": s.start,
                    "end": s.end,
                    "channel": s.channel.label,
                    "signal": s.signal.to_dict(),
                }
                for s in self.segments
            ],
        }
