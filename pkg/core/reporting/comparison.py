from typing import Mapping, Sequence

import numpy as np

from core.economics import evaluate, project_feasible
from core.environment import ContractEnv, state_hash
from core.schemas import ComparisonReport, Contract, EconParams, MarketState, MethodSummary

METHOD_ORDER = ("oracle", "gdm", "ppo")


def projected_contracts(
    env: ContractEnv, states: Sequence[MarketState], raw_actions: np.ndarray
) -> list[Contract]:
    return [
        project_feasible(state, env.decode(raw, state), env.params)
        for state, raw in zip(states, raw_actions, strict=True)
    ]


def summarize_method(
    states: Sequence[MarketState], contracts: Sequence[Contract], params: EconParams
) -> MethodSummary:
    reports = [evaluate(state, contract, params) for state, contract in zip(states, contracts, strict=True)]
    utilities = np.array([report.expected_server for report in reports])
    return MethodSummary(
        mean_utility=float(utilities.mean()),
        std_utility=float(utilities.std()),
        example_contract=contracts[0],
        feasibility_rate=float(np.mean([report.feasible for report in reports])),
    )


def build_comparison(
    states: Sequence[MarketState],
    contracts_by_method: Mapping[str, Sequence[Contract]],
    params: EconParams,
) -> ComparisonReport:
    """
    Summarises each method's contracts on the held-out states.

    Contracts are projected once more before scoring, so every reported
    contract passes IR and IC.
    """
    summaries = {
        method: summarize_method(
            states,
            [project_feasible(state, contract, params) for state, contract in zip(states, contracts_by_method[method])],
            params,
        )
        for method in METHOD_ORDER
        if method in contracts_by_method
    }
    gdm, ppo = summaries.get("gdm"), summaries.get("ppo")
    ratio = gdm.mean_utility / ppo.mean_utility if gdm and ppo and ppo.mean_utility else float("nan")
    return ComparisonReport(
        reference_state=states[0],
        methods=summaries,
        gdm_to_ppo_ratio=ratio,
        eval_state_hashes=tuple(state_hash(state) for state in states),
    )


def contracts_document(
    states: Sequence[MarketState], contracts_by_method: Mapping[str, Sequence[Contract]]
) -> dict:
    """JSON-ready listing of every method's contract per held-out state, items as (inv_latency, reward)."""
    return {
        "reference_state": states[0].model_dump(mode="json"),
        "methods": {
            method: [
                {
                    "state_hash": state_hash(state),
                    "items": [[item.inv_latency, item.reward] for item in contract.items],
                }
                for state, contract in zip(states, contracts)
            ]
            for method, contracts in contracts_by_method.items()
        },
    }
