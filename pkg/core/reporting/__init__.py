from core.reporting.comparison import (
    build_comparison,
    contracts_document,
    projected_contracts,
    summarize_method,
)
from core.reporting.render import ReportBundle, build_report, render_curves_svg, require_same_states

__all__ = [
    "ReportBundle",
    "build_comparison",
    "build_report",
    "contracts_document",
    "projected_contracts",
    "render_curves_svg",
    "require_same_states",
    "summarize_method",
]
