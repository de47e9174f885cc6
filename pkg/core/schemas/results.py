import csv
import io
from typing import Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field

from core.commons.enums import SolveMethod
from core.schemas.economics import Contract, MarketState

TRACE_CSV_HEADER = ("epoch", "test_reward", "critic_loss", "actor_obj", "wall_ms")


class OracleSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    contract: Contract
    expected_server: float
    method: SolveMethod
    clamped: bool = False
    iterations: Optional[int] = None


class EpochRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int
    test_reward: float
    critic_loss: float
    actor_obj: float
    wall_ms: float = 0.0
    test_reward_penalized: float = 0.0


class TrainingTrace(BaseModel):
    """Per-epoch evaluation series of one training run."""

    method: str
    eval_state_hashes: tuple[str, ...] = ()
    records: list[EpochRecord] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def test_rewards(self) -> list[float]:
        return [record.test_reward for record in self.records]

    def to_csv(self, record_wall_clock: bool = False) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRACE_CSV_HEADER)
        for record in self.records:
            writer.writerow(
                (
                    record.epoch,
                    repr(record.test_reward),
                    repr(record.critic_loss),
                    repr(record.actor_obj),
                    repr(record.wall_ms) if record_wall_clock else "0",
                )
            )
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str, method: str, eval_state_hashes=()) -> "TrainingTrace":
        rows = csv.DictReader(io.StringIO(text))
        return cls(
            method=method,
            eval_state_hashes=tuple(eval_state_hashes),
            records=[
                EpochRecord(
                    epoch=int(row["epoch"]),
                    test_reward=float(row["test_reward"]),
                    critic_loss=float(row["critic_loss"]),
                    actor_obj=float(row["actor_obj"]),
                    wall_ms=float(row["wall_ms"]),
                )
                for row in rows
            ],
        )


class MethodSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean_utility: float
    std_utility: float
    example_contract: Contract
    feasibility_rate: float


class ComparisonReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    reference_state: MarketState
    methods: Mapping[str, MethodSummary]
    gdm_to_ppo_ratio: float
    eval_state_hashes: tuple[str, ...]


class RunManifest(BaseModel):
    subcommand: str
    config_hash: str
    seed: int
    profile: Optional[str] = None
    versions: Mapping[str, str]
    outputs: list[str] = Field(default_factory=list)
