"""
Pipeline State
==============

Stage bookkeeping for one experiment run: status, timestamps, errors and
warnings per stage, serialized into summary.json.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional


class RunStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class StageStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclass
class PipelineStage:
    """A single named stage of the pipeline"""

    name: str
    description: str = ""
    status: StageStatus = StageStatus.PENDING
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def duration_ms(self) -> Optional[float]:
        if self.started_at is None or self.completed_at is None:
            return None
        return (self.completed_at - self.started_at).total_seconds() * 1000

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
            "duration_ms": self.duration_ms,
            "error": self.error,
            "metadata": self.metadata,
        }


class PipelineState:
    """
    Execution state of one run

    Stages are registered in order; at most one is running at a time.
    """

    def __init__(self, run_name: str, trial: int = 0):
        self.run_name = run_name
        self.trial = trial

        self.status = RunStatus.PENDING
        self.created_at = datetime.now(timezone.utc)
        self.started_at: Optional[datetime] = None
        self.completed_at: Optional[datetime] = None

        self.stages: Dict[str, PipelineStage] = {}
        self.stage_order: List[str] = []
        self.current_stage: Optional[str] = None

        self.errors: List[str] = []
        self.warnings: List[str] = []

    def add_stage(self, name: str, description: str = "") -> PipelineStage:
        stage = PipelineStage(name, description)
        self.stages[name] = stage
        if name not in self.stage_order:
            self.stage_order.append(name)
        return stage

    def start_run(self) -> None:
        self.status = RunStatus.RUNNING
        self.started_at = datetime.now(timezone.utc)

    def complete_run(self) -> None:
        self.status = RunStatus.COMPLETED
        self.completed_at = datetime.now(timezone.utc)

    def fail_run(self, error: str) -> None:
        self.status = RunStatus.FAILED
        self.completed_at = datetime.now(timezone.utc)
        self.errors.append(f"Run failed: {error}")

    def start_stage(self, name: str) -> PipelineStage:
        """Mark a stage running, registering it first if needed"""
        stage = self.stages.get(name) or self.add_stage(name)
        stage.status = StageStatus.RUNNING
        stage.started_at = datetime.now(timezone.utc)
        self.current_stage = name
        return stage

    def complete_stage(self, name: str, **metadata: Any) -> None:
        stage = self.stages[name]
        stage.status = StageStatus.COMPLETED
        stage.completed_at = datetime.now(timezone.utc)
        stage.metadata.update(metadata)
        self.current_stage = None

    def fail_stage(self, name: str, error: str) -> None:
        stage = self.stages[name]
        stage.status = StageStatus.FAILED
        stage.completed_at = datetime.now(timezone.utc)
        stage.error = error
        self.errors.append(f"Stage {name} failed: {error}")

    def skip_stage(self, name: str, reason: str) -> None:
        stage = self.stages.get(name) or self.add_stage(name)
        stage.status = StageStatus.SKIPPED
        stage.metadata["reason"] = reason

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def completed_stages(self) -> List[str]:
        return [n for n in self.stage_order if self.stages[n].status == StageStatus.COMPLETED]

    def is_complete(self) -> bool:
        return self.status in (RunStatus.COMPLETED, RunStatus.FAILED)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_name": self.run_name,
            "trial": self.trial,
            "status": self.status.value,
            "created_at": self.created_at.isoformat(),
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
            "current_stage": self.current_stage,
            "stages": [self.stages[n].to_dict() for n in self.stage_order],
            "errors": self.errors,
            "warnings": self.warnings,
        }
