"""
Experiment Configuration Models
===============================

Pydantic models for experiment documents. Every field has an explicit
default so that the reference config lists the complete schema.
"""

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import InvalidChannel
from ..kernel.kernel_filter import RankPolicy, RankPolicyKind
from ..system.benchmarks import benchmark_model, random_state_space
from ..system.inputs import InputKind, InputSpec
from ..system.models import FaultChannel, StateSpaceModel
from ..system.scenarios import FaultScenario, FaultSegment, FaultSignal, SignalKind

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Strict):
    source: Literal["benchmark", "inline", "random"] = "benchmark"
    exact_zero: bool = True
    A: Optional[List[List[float]]] = None
    B_u: Optional[List[List[float]]] = None
    C: Optional[List[List[float]]] = None
    D_u: Optional[List[List[float]]] = None
    K: Optional[List[List[float]]] = None
    Sigma_e: Optional[List[List[float]]] = None
    n: int = Field(default=3, ge=1)
    n_u: int = Field(default=1, ge=1)
    n_y: int = Field(default=2, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _inline_matrices(self):
        if self.source == "inline":
            missing = [name for name in ("A", "B_u", "C", "D_u") if getattr(self, name) is None]
            if missing:
                raise ValueError(f"inline model is missing {missing}")
        return self

    def build(self) -> StateSpaceModel:
        if self.source == "benchmark":
            return benchmark_model(exact_zero=self.exact_zero)
        if self.source == "random":
            return random_state_space(self.n, self.n_u, self.n_y, seed=self.seed)
        return StateSpaceModel(
            A=np.array(self.A),
            B_u=np.array(self.B_u),
            C=np.array(self.C),
            D_u=np.array(self.D_u),
            K=None if self.K is None else np.array(self.K),
            Sigma_e=None if self.Sigma_e is None else np.array(self.Sigma_e),
            name="inline",
        )


class InputConfig(_Strict):
    kind: Literal["prbs", "multi_step", "impulse", "zero"] = "prbs"
    level: float = 1.0
    seed: int = 0
    nbits: int = Field(default=10, ge=2, le=32)
    hold: int = Field(default=1, ge=1)
    values: List[float] = Field(default_factory=lambda: [1.0, 2.0, 1.5])
    dwell: int = Field(default=20, ge=1)
    channel: Optional[int] = None

    def build(self) -> InputSpec:
        return InputSpec(
            kind=InputKind(self.kind),
            level=self.level,
            seed=self.seed,
            nbits=self.nbits,
            hold=self.hold,
            values=tuple(self.values),
            dwell=self.dwell,
            channel=self.channel,
        )


class SignalConfig(_Strict):
    kind: Literal["zero", "constant", "sinusoid", "geometric_decay", "step", "series"] = "zero"
    value: float = 0.0
    amplitude: float = 1.0
    frequency: float = 0.0
    phase: float = 0.0
    base: float = 1.0
    offset: int = 0
    level: float = 0.0
    at: Optional[int] = None
    values: List[float] = Field(default_factory=list)

    def build(self) -> FaultSignal:
        return FaultSignal(
            kind=SignalKind(self.kind),
            value=self.value,
            amplitude=self.amplitude,
            frequency=self.frequency,
            phase=self.phase,
            base=self.base,
            offset=self.offset,
            level=self.level,
            at=self.at,
            values=tuple(self.values),
        )


class SegmentConfig(_Strict):
    start: int = Field(ge=0)
    end: int
    channel: str
    signal: SignalConfig = Field(default_factory=SignalConfig)

    @field_validator("channel")
    @classmethod
    def _parse_channel(cls, value: str) -> str:
        try:
            FaultChannel.parse(value)
        except InvalidChannel as exc:
            raise ValueError(str(exc)) from exc
        return value.strip().lower()

    @model_validator(mode="after")
    def _ordered(self):
        if self.end <= self.start:
            raise ValueError(f"segment end {self.end} must exceed start {self.start}")
        return self


class ScenarioConfig(_Strict):
    samples: int = Field(default=200, ge=2)
    segments: List[SegmentConfig] = Field(default_factory=list)
    amplitude_reference: Literal["absolute", "innovation_std"] = "absolute"
    allow_simultaneous: bool = False

    def build(self) -> FaultScenario:
        return FaultScenario(
            [
                FaultSegment(s.start, s.end, FaultChannel.parse(s.channel), s.signal.build())
                for s in self.segments
            ],
            allow_simultaneous=self.allow_simultaneous,
        )


class NoiseConfig(_Strict):
    """Innovation noise: off, scaled to an SNR target, or a fixed covariance"""

    enabled: bool = False
    snr_db: Optional[float] = None
    covariance: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _exclusive(self):
        if self.snr_db is not None and self.covariance is not None:
            raise ValueError("snr_db and covariance are mutually exclusive")
        return self


class RankPolicyConfig(_Strict):
    kind: Literal["fixed_order", "gap", "threshold"] = "gap"
    order: Optional[int] = Field(default=None, ge=0)
    gap_factor: float = Field(default=10.0, gt=1.0)
    rel_tol: float = Field(default=1e-9, gt=0.0)

    @model_validator(mode="after")
    def _order_given(self):
        if self.kind == "fixed_order" and self.order is None:
            raise ValueError("fixed_order rank policy needs an order")
        return self

    def build(self) -> RankPolicy:
        return RankPolicy(RankPolicyKind(self.kind), self.order, self.gap_factor, self.rel_tol)


class ThresholdConfig(_Strict):
    residual: Optional[float] = Field(default=None, ge=0.0)
    residual_factor: float = Field(default=5.0, ge=0.0)
    residual_percentile: float = Field(default=99.0, gt=0.0, le=100.0)
    residual_floor: float = Field(default=1e-8, ge=0.0)
    tie: float = Field(default=1e-6, ge=0.0)
    angle: float = Field(default=1e-6, ge=0.0)


class DataConfig(_Strict):
    healthy_samples: int = Field(default=1000, ge=2)
    validation_samples: int = Field(default=500, ge=2)
    healthy_input: InputConfig = Field(default_factory=InputConfig)
    faulty_input: InputConfig = Field(default_factory=lambda: InputConfig(seed=1))
    healthy_csv: Optional[str] = None
    x0: Optional[List[float]] = None


class KernelConfig(_Strict):
    dictionary_source: Literal["data", "nominal"] = "data"
    rank_policy: RankPolicyConfig = Field(default_factory=RankPolicyConfig)
    rel_tol: float = Field(default=1e-9, gt=0.0)
    instrument: bool = True
    past_horizon: Optional[int] = Field(default=None, ge=1)


class ClassifierConfig(_Strict):
    combination_search: bool = False
    max_faults: int = Field(default=2, ge=1)


class DiscernConfig(_Strict):
    enabled: bool = True
    use_oracle: bool = True
    strict: bool = True
    rel_tol: Optional[float] = Field(default=None, gt=0.0)


class MonteCarloConfig(_Strict):
    trials: int = Field(default=1, ge=1)
    master_seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)


class ExperimentConfig(_Strict):
    """Complete experiment document"""

    schema_version: int = Field(default=SCHEMA_VERSION, ge=SCHEMA_VERSION, le=SCHEMA_VERSION)
    name: str = "experiment"
    L: int = Field(default=15, ge=2)
    model: ModelConfig = Field(default_factory=ModelConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    kernel: KernelConfig = Field(default_factory=KernelConfig)
    thresholds: ThresholdConfig = Field(default_factory=ThresholdConfig)
    classifier: ClassifierConfig = Field(default_factory=ClassifierConfig)
    discern: DiscernConfig = Field(default_factory=DiscernConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    output_dir: str = "results"

    @model_validator(mode="after")
    def _segments_fit(self):
        for segment in self.scenario.segments:
            if segment.end > self.scenario.samples:
                raise ValueError(
                    f"segment {segment.channel}[{segment.start},{segment.end}) exceeds "
                    f"scenario.samples={self.scenario.samples}"
                )
        return self
