from __future__ import annotations

import json
from pathlib import Path

from core.commons.enums import OperationStatus, Profile, SolveMethod
from core.commons.errors import MissingArtifactError
from core.environment import ContractEnv, state_hash
from core.policies.diffusion import NoiseSchedule, generate_action, load_checkpoint, save_checkpoint, train
from core.policies.diffusion.trainer import eval_generator
from core.policies.ppo import load_policy, ppo_train, save_policy
from core.reporting import (
    build_comparison,
    build_report,
    contracts_document,
    projected_contracts,
    render_curves_svg,
    require_same_states,
)
from core.schemas import Contract, ExperimentConfig, MarketState, OracleSolution, TrainingTrace
from core.schemas.handler_response import HandlerResponse
from core.solvers import closed_form_contract, grid_search_contract, projected_ascent
from core.utils import logger
from core.utils.io_utils import read_states, write_json, write_manifest, write_states

GDM_DIR, PPO_DIR = "gdm", "ppo"
CHECKPOINT, TRACE, EVAL_STATES = "checkpoint.json", "trace.csv", "eval_states.jsonl"


class ExperimentHandler:
    """
    Runs one subcommand for one seed and writes its artifacts under `output_dir`.

    Args:
        config (ExperimentConfig): Validated experiment configuration.
        seed (int): Seed bound to the sampler and both trainers.
        output_dir (Path): Destination of every artifact and manifest.
        profile (Profile, optional): Learning-rate profile the config was loaded with, if any.
    """

    def __init__(
        self, config: ExperimentConfig, seed: int, output_dir: Path, profile: Profile | None = None
    ):
        self.config = config.with_seed(seed)
        self.seed = seed
        self.output_dir = output_dir
        self.profile = profile

    def _env(self) -> ContractEnv:
        return ContractEnv(self.config.sampler, self.config.econ, self.config.reward)

    def _held_out(self) -> list[MarketState]:
        return self._env().held_out_states(self.config.gdm.eval_states)

    def _finish(self, command: str, directory: Path, outputs: list[Path], payload=None, message="") -> HandlerResponse:
        profile = self.profile.value if self.profile else None
        manifest = write_manifest(directory, command, self.config, self.seed, profile, outputs)
        response = HandlerResponse(
            operation_command=command,
            operation_status=OperationStatus.SUCCEEDED,
            output_dir=str(directory),
            outputs=[str(path) for path in [*outputs, manifest]],
            response_payload=payload or {},
            message=message,
        )
        logger.info(response.generated_message, extra={"outputs": response.outputs})
        return response

    def sample_states(self, count: int | None = None) -> HandlerResponse:
        """Writes the held-out states as JSON lines."""
        env = self._env()
        states = env.held_out_states(count or self.config.gdm.eval_states)
        path = write_states(self.output_dir / "states.jsonl", states)
        return self._finish("sample-states", self.output_dir, [path], message=f"{len(states)} states")

    def solve_oracle(self, method: SolveMethod = SolveMethod.CLOSED_FORM) -> HandlerResponse:
        """Solves the reference (first held-out) state with the chosen oracle."""
        state = self._held_out()[0]
        solution = self._solve(state, method)
        path = write_json(self.output_dir / "oracle.json", solution)
        return self._finish(
            "solve-oracle", self.output_dir, [path], payload=solution.model_dump(mode="json")
        )

    def _solve(self, state: MarketState, method: SolveMethod) -> OracleSolution:
        params = self.config.econ
        if method is SolveMethod.GRID:
            return grid_search_contract(state, params, self.config.grid)
        if method is SolveMethod.ASCENT:
            init = Contract.from_latency_reward([state.l_max] * state.n, [params.r_max] * state.n)
            return projected_ascent(state, params, init)
        return closed_form_contract(state, params)

    def train_gdm(self) -> HandlerResponse:
        env = self._env()
        denoiser, critic, trace = train(env, self.config.gdm)
        directory = self.output_dir / GDM_DIR
        schedule = NoiseSchedule.linear(self.config.gdm.t_steps, self.config.gdm.beta_start, self.config.gdm.beta_end)
        outputs = [
            save_checkpoint(directory / CHECKPOINT, denoiser, critic, schedule, self.config.gdm),
            *self._write_trace(directory, trace, env.held_out_states(self.config.gdm.eval_states)),
        ]
        return self._finish("train-gdm", directory, outputs, message=self._final_reward(trace))

    def train_ppo(self) -> HandlerResponse:
        env = self._env()
        ppo_config = self.config.ppo.model_copy(update={"eval_states": self.config.gdm.eval_states})
        policy, trace = ppo_train(env, ppo_config)
        directory = self.output_dir / PPO_DIR
        outputs = [
            save_policy(directory / CHECKPOINT, policy, ppo_config),
            *self._write_trace(directory, trace, env.held_out_states(ppo_config.eval_states)),
        ]
        return self._finish("train-ppo", directory, outputs, message=self._final_reward(trace))

    def _write_trace(self, directory: Path, trace: TrainingTrace, states: list[MarketState]) -> list[Path]:
        trace_path = directory / TRACE
        trace_path.parent.mkdir(parents=True, exist_ok=True)
        trace_path.write_text(trace.to_csv(self.config.record_wall_clock))
        return [trace_path, write_states(directory / EVAL_STATES, states)]

    @staticmethod
    def _final_reward(trace: TrainingTrace) -> str:
        return f"final test reward {trace.test_rewards[-1]:.4f}" if len(trace) else "no epochs run"

    @staticmethod
    def _require(*paths: Path, kind: str = "checkpoint") -> None:
        for path in paths:
            if not path.is_file():
                raise MissingArtifactError(f"missing {kind}: {path}")

    def _method_contracts(self, states: list[MarketState]) -> dict[str, list[Contract]]:
        gdm_checkpoint = self.output_dir / GDM_DIR / CHECKPOINT
        ppo_checkpoint = self.output_dir / PPO_DIR / CHECKPOINT
        self._require(gdm_checkpoint, ppo_checkpoint)

        env = self._env()
        features = env.encode(states)
        denoiser, _, schedule, gdm_config = load_checkpoint(gdm_checkpoint)
        gdm_actions = generate_action(
            features, denoiser, schedule, eval_generator(gdm_config.seed), deterministic=True
        )
        policy, _ = load_policy(ppo_checkpoint)
        return {
            "oracle": [closed_form_contract(state, env.params).contract for state in states],
            "gdm": projected_contracts(env, states, gdm_actions),
            "ppo": projected_contracts(env, states, policy.mean_action(features)),
        }

    def _stored_hashes(self, method_dir: str) -> list[str]:
        path = self.output_dir / method_dir / EVAL_STATES
        self._require(path, kind="evaluation states")
        return [state_hash(state) for state in read_states(path)]

    def compare(self) -> HandlerResponse:
        states = self._held_out()
        contracts = self._method_contracts(states)
        hashes = [state_hash(state) for state in states]
        for method_dir in (GDM_DIR, PPO_DIR):
            require_same_states(self._stored_hashes(method_dir), hashes)
        comparison = build_comparison(states, contracts, self.config.econ)
        outputs = [
            write_json(self.output_dir / "comparison.json", comparison),
            write_json(self.output_dir / "contracts.json", contracts_document(states, contracts)),
        ]
        return self._finish(
            "compare",
            self.output_dir,
            outputs,
            payload={"gdm_to_ppo_ratio": comparison.gdm_to_ppo_ratio},
        )

    def _load_trace(self, method_dir: str) -> TrainingTrace:
        directory = self.output_dir / method_dir
        self._require(directory / TRACE, kind="trace")
        return TrainingTrace.from_csv(
            (directory / TRACE).read_text(), method_dir, self._stored_hashes(method_dir)
        )

    def report(self) -> HandlerResponse:
        states = self._held_out()
        gdm_trace, ppo_trace = self._load_trace(GDM_DIR), self._load_trace(PPO_DIR)
        bundle = build_report(gdm_trace, ppo_trace, states, self._method_contracts(states), self.config.econ)

        curves = self.output_dir / "curves.csv"
        curves.write_text(bundle.curves_csv)
        markdown = self.output_dir / "report.md"
        markdown.write_text(bundle.markdown)
        outputs = [
            curves,
            markdown,
            write_json(self.output_dir / "contracts.json", bundle.contracts),
            write_json(self.output_dir / "comparison.json", bundle.comparison),
            render_curves_svg(bundle.curves, self.output_dir / "curves.svg"),
        ]
        return self._finish(
            "report",
            self.output_dir,
            outputs,
            payload={"gdm_to_ppo_ratio": bundle.comparison.gdm_to_ppo_ratio},
        )


def dump_payload(response: HandlerResponse) -> str:
    return json.dumps(response.response_payload, indent=2, sort_keys=True, default=float)


__all__ = ["ExperimentHandler", "dump_payload"]
