import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from core.commons.errors import EvalSetMismatchError
from core.environment import state_hash
from core.reporting.comparison import build_comparison, contracts_document
from core.schemas import ComparisonReport, Contract, EconParams, MarketState, TrainingTrace

CURVES_HEADER = ("epoch", "gdm_reward", "ppo_reward", "oracle_reward")


@dataclass
class ReportBundle:
    comparison: ComparisonReport
    markdown: str
    curves_csv: str
    contracts: dict
    curves: list[tuple[int, float | None, float | None, float]]


def require_same_states(left: Sequence[str], right: Sequence[str]) -> None:
    """Raises EvalSetMismatchError unless both hash sequences are identical."""
    if tuple(left) != tuple(right):
        raise EvalSetMismatchError(
            only_left=sorted(set(left) - set(right)), only_right=sorted(set(right) - set(left))
        )


def _curve_rows(
    gdm_trace: TrainingTrace, ppo_trace: TrainingTrace, oracle_reward: float
) -> list[tuple[int, float | None, float | None, float]]:
    gdm, ppo = gdm_trace.test_rewards, ppo_trace.test_rewards
    return [
        (
            epoch,
            gdm[epoch] if epoch < len(gdm) else None,
            ppo[epoch] if epoch < len(ppo) else None,
            oracle_reward,
        )
        for epoch in range(max(len(gdm), len(ppo)))
    ]


def _curves_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CURVES_HEADER)
    for row in rows:
        writer.writerow(["" if value is None else repr(value) for value in row])
    return buffer.getvalue()


def _format_items(contract: Contract) -> str:
    return ", ".join(f"({item.inv_latency:.6f}, {item.reward:.4f})" for item in contract.items)


def _ratio(gdm: float | None, ppo: float | None) -> str:
    if gdm is None or ppo is None or ppo == 0:
        return "-"
    return f"{gdm / ppo:.4f}"


def _markdown(comparison: ComparisonReport, rows) -> str:
    oracle = comparison.methods["oracle"].mean_utility if "oracle" in comparison.methods else None
    lines = [
        "# Contract design comparison",
        "",
        f"Held-out states: {len(comparison.eval_state_hashes)}",
        "",
        "| method | mean U_E | std U_E | oracle-normalized | feasibility |",
        "|---|---|---|---|---|",
    ]
    for method, summary in comparison.methods.items():
        normalized = f"{summary.mean_utility / oracle:.4f}" if oracle else "-"
        lines.append(
            f"| {method} | {summary.mean_utility:.4f} | {summary.std_utility:.4f} "
            f"| {normalized} | {summary.feasibility_rate:.2f} |"
        )
    lines += [
        "",
        f"GDM / PPO utility ratio: {comparison.gdm_to_ppo_ratio:.4f}",
        "",
        "## Contracts on the reference state",
        "",
        f"theta = {comparison.reference_state.theta}, Q = {comparison.reference_state.q}",
        "",
        "| method | items (inv_latency, reward) |",
        "|---|---|",
    ]
    lines += [
        f"| {method} | {_format_items(summary.example_contract)} |"
        for method, summary in comparison.methods.items()
    ]
    lines += [
        "",
        "## Test reward per epoch",
        "",
        "| epoch | gdm | ppo | oracle | gdm/ppo | gdm >= ppo |",
        "|---|---|---|---|---|---|",
    ]
    for epoch, gdm, ppo, oracle_reward in rows:
        ordering = "-" if gdm is None or ppo is None else ("yes" if gdm >= ppo else "no")
        lines.append(
            f"| {epoch} | {'-' if gdm is None else f'{gdm:.4f}'} | {'-' if ppo is None else f'{ppo:.4f}'} "
            f"| {oracle_reward:.4f} | {_ratio(gdm, ppo)} | {ordering} |"
        )
    return "\n".join(lines) + "\n"


def build_report(
    gdm_trace: TrainingTrace,
    ppo_trace: TrainingTrace,
    states: Sequence[MarketState],
    contracts_by_method: Mapping[str, Sequence[Contract]],
    params: EconParams,
) -> ReportBundle:
    """
    Assembles the comparison, the reward-curve table and the markdown report.

    Raises:
        EvalSetMismatchError: If the traces were scored on different held-out states.
    """
    hashes = [state_hash(state) for state in states]
    require_same_states(gdm_trace.eval_state_hashes, ppo_trace.eval_state_hashes)
    require_same_states(gdm_trace.eval_state_hashes, hashes)

    comparison = build_comparison(states, contracts_by_method, params)
    rows = _curve_rows(gdm_trace, ppo_trace, comparison.methods["oracle"].mean_utility)
    return ReportBundle(
        comparison=comparison,
        markdown=_markdown(comparison, rows),
        curves_csv=_curves_csv(rows),
        contracts=contracts_document(states, contracts_by_method),
        curves=rows,
    )


def render_curves_svg(rows, path: Path) -> Path:
    """Static line chart of the test reward curves with the oracle as a horizontal reference."""
    plt.rcParams["svg.hashsalt"] = "contract-design"
    figure, axis = plt.subplots(figsize=(7, 4))
    epochs = [row[0] for row in rows]
    for column, label in ((1, "GDM"), (2, "DRL-PPO")):
        points = [(row[0], row[column]) for row in rows if row[column] is not None]
        if points:
            axis.plot(*zip(*points), label=label)
    if rows:
        axis.hlines(rows[0][3], min(epochs), max(epochs), linestyles="dashed", colors="gray", label="oracle")
    axis.set_xlabel("epoch")
    axis.set_ylabel("test reward (projected U_E)")
    axis.legend()
    figure.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    return path
