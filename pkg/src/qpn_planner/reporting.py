"""Plain-text reports and plots for the command line."""

import logging
import os
from typing import List, Sequence

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from qpn_planner.dominance import AdmissibilityResult, DominanceProof
from qpn_planner.network import Network, Violation
from qpn_planner.oracle import Oracle, SignReport
from qpn_planner.ordering import PartialOrder, element_labels
from qpn_planner.reduction import ReductionStep, format_step
from qpn_planner.strategy import Strategy, case_analysis

logger = logging.getLogger(__name__)

RULE = "-" * 60


def section(title: str) -> List[str]:
    return [RULE, title, RULE]


def validation_report(violations: Sequence[Violation]) -> str:
    if not violations:
        return "\n".join(section("VALIDATION") + ["valid"]) + "\n"
    lines = section("VALIDATION") + [f"{len(violations)} violation(s)"]
    lines.extend(f"  {v}" for v in violations)
    return "\n".join(lines) + "\n"


def reduction_report(
    net: Network, reduced: Network, steps: Sequence[ReductionStep]
) -> str:
    lines = section("REDUCTION STEPS")
    if not steps:
        lines.append("nothing to reduce")
    # step updates may name variables a later step removes, so render against the original
    lines.extend(f"{i + 1:3d}. {format_step(step, net)}" for i, step in enumerate(steps))
    lines += section("REDUCED NETWORK")
    lines.append("variables: " + ", ".join(v.id for v in reduced.variables))
    lines.extend(f"  {inf.render(reduced)}" for inf in reduced.influences)
    lines.extend(f"  inform {src} -> {dst}" for src, dst in reduced.informational)
    return "\n".join(lines) + "\n"


def order_report(po: PartialOrder, net: Network, title: str) -> str:
    lines = section(title)
    lines.append(f"variables: {', '.join(po.variables) or '(none)'}")
    if po.collapsed:
        lines.append("warning: contradictory constraints collapsed a cycle")
    labels = [label or "(empty)" for label in element_labels(po, net)]
    for idx, members in enumerate(po.classes):
        below = sorted(po.graph.successors(idx))
        text = " = ".join(labels[e] for e in members)
        covers = ", ".join(f"#{j}" for j in below)
        lines.append(f"  #{idx} [height {po.heights[idx]}] {text}" + (f" > {covers}" if covers else ""))
    return "\n".join(lines) + "\n"


def strategies_report(net: Network, strategies: Sequence[Strategy], cases: bool) -> str:
    lines = section(f"STRATEGIES ({len(strategies)})")
    lines.extend(f"{i + 1:3d}. {s.render(net)}" for i, s in enumerate(strategies))
    if cases and net.value_node is not None:
        lines += section("CASE ANALYSES")
        frames = [case_analysis(net, s).to_frame(net) for s in strategies]
        if frames:
            lines.append(pd.concat(frames, ignore_index=True).to_string(index=False))
    return "\n".join(lines) + "\n"


def admissibility_report(net: Network, result: AdmissibilityResult) -> str:
    analysis = result.analysis_net
    lines = section("ANALYSIS")
    lines.append(
        f"{len(result.strategies)} strategies over "
        f"{', '.join(analysis.decisions) or 'no remaining decisions'}"
    )
    for policy in result.forced:
        lines.append(f"fixed by reduction: {policy.render(net)}")

    lines += section("PROOFS")
    if not result.proofs:
        lines.append("no strategy was pruned")
    for proof in result.proofs:
        lines.extend(proof.render(analysis))
        lines.append("")

    lines += section(f"UNDOMINATED BY PURE STRATEGIES ({len(result.undominated_by_pure)})")
    lines.extend(f"  {s.render(analysis)}" for s in result.undominated_by_pure)

    lines += section(f"ADMISSIBLE ({len(result.admissible)})")
    for s in result.admissible:
        lines.append(f"  {result.lift(s).render(net)}")
        lines.extend(f"      {note}" for note in result.notes.get(s, []))
    return "\n".join(lines) + "\n"


def sign_report(net: Network, report: SignReport) -> str:
    lines = section("SIGN VERIFICATION")
    lines.extend(report.render(net))
    lines.append(f"violations: {report.violations}")
    return "\n".join(lines) + "\n"


def eu_gap_frame(oracle: Oracle, proofs: Sequence[DominanceProof]) -> pd.DataFrame:
    """EU(best dominator) - EU(dominated) per proof and sampled model."""
    frames = []
    for n, proof in enumerate(proofs):
        best = np.max(np.stack([oracle.expected_utility(d) for d in proof.dominators]), axis=0)
        gap = best - oracle.expected_utility(proof.dominated)
        frames.append(
            pd.DataFrame(
                {
                    "proof": n,
                    "kind": proof.kind.value,
                    "route": proof.route,
                    "gap": gap,
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=["proof", "kind", "route", "gap"])
    return pd.concat(frames, ignore_index=True)


def plot_eu_gaps(df: pd.DataFrame, filename: str) -> None:
    """Plots the distribution of expected-utility margins of every proof."""
    directory = os.path.dirname(filename)
    if directory:
        os.makedirs(directory, exist_ok=True)
    plt.figure(figsize=(10, 6))
    if not df.empty:
        sns.histplot(data=df, x="gap", hue="kind", bins=30, alpha=0.6)
    plt.axvline(0, color="red", linestyle="--", label="No margin")
    plt.title("Expected-Utility Margin of Dominance Proofs over Sampled Models")
    plt.xlabel("EU(dominator) - EU(dominated)")
    plt.ylabel("Frequency")
    plt.grid(True, alpha=0.3)
    plt.tight_layout()
    plt.savefig(filename)
    plt.close()
    logger.info(f"EU gap plot saved to '{filename}'")
