"""Verdicts for all 32 classes in both partitions under one correlation regime."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..inequalities import triple_from, usual_wbi
from ..probcore import JointDistribution, VariableSpace
from ..taxonomy import ClassId, Partition, classify, form_of, mirror_to_beta, strength_of
from .regime import AssumptionRegime, desk_space
from .search import (
    CLASSIFY_TOL,
    RESIDUAL_TOL,
    WITNESS,
    feasibility_search,
    max_violation_search,
)
from .structural import missing_setting_inconsistency, reduction_applies, reduction_under_strict_perfectness

INCONSISTENT, IMPLIES_BI, CAN_VIOLATE = "inconsistent", "implies-bi", "can-violate"
GLYPHS = {INCONSISTENT: "—", IMPLIES_BI: "1", CAN_VIOLATE: "0"}


@dataclass
class ClassVerdict:
    class_id: ClassId
    regime: AssumptionRegime
    status: str
    evidence: dict = field(default_factory=dict)
    witness: JointDistribution | None = None

    @property
    def glyph(self) -> str:
        return GLYPHS[self.status]

    def to_dict(self) -> dict:
        return {
            "class": str(self.class_id),
            "regime": self.regime.name,
            "status": self.status,
            "glyph": self.glyph,
            "evidence": _clean(self.evidence),
            "has_witness": self.witness is not None,
        }


def both_settings_in_a_factor(index: int) -> bool:
    form = form_of(index)
    return any(len(vars_ & {"a", "b"}) == 2 for vars_ in (form.first_factor()[1], form.second_factor()[1]))


def witness_problems(v: ClassVerdict) -> list[str]:
    """Reasons a CAN_VIOLATE verdict's witness fails its contract (empty when fine)."""
    if v.status != CAN_VIOLATE:
        return []
    if v.witness is None:
        return ["no witness"]
    problems = []
    got = classify(v.witness, v.class_id.partition, CLASSIFY_TOL)
    if got != v.class_id:
        problems.append(f"witness classifies to {got}")
    residual = v.regime.residual(v.witness)
    if residual >= RESIDUAL_TOL:
        problems.append(f"residual {residual:.3g}")
    margin = float(usual_wbi(triple_from(v.witness)).margin)
    if margin <= 0:
        problems.append(f"margin {margin:.3g}")
    return problems


def _alpha_verdict(index: int, regime: AssumptionRegime, space: VariableSpace, seed: int, restarts: int) -> ClassVerdict:
    form = form_of(index)
    cid = form.class_id
    proof = missing_setting_inconsistency(form, regime.delta_max)
    if proof is not None:
        return ClassVerdict(cid, regime, INCONSISTENT, {"proof": "missing-setting", "statement": proof.statement})
    if regime.strict and reduction_applies(form):
        reduction = reduction_under_strict_perfectness(form)
        if reduction is not None:
            search = feasibility_search(form, regime, space, seed, restarts, stop_at_witness=True)
            evidence = {
                "proof": "reduction",
                "reduces_to": str(reduction.reduced.class_id),
                "statement": reduction.statement,
                "search": search.to_dict(),
                "search_agrees": search.status != WITNESS,
            }
            return ClassVerdict(cid, regime, INCONSISTENT, evidence)
    if not both_settings_in_a_factor(index):
        consistency = feasibility_search(form, regime, space, seed, restarts)
        attack = max_violation_search(form, regime, space, seed, restarts, need_witness=False)
        evidence = {
            "reason": "no factor conditions on both settings",
            "consistency": consistency.to_dict(),
            "falsification": attack.to_dict(),
            "falsification_margin": falsification_margin(attack),
        }
        return ClassVerdict(cid, regime, IMPLIES_BI, evidence, consistency.witness)
    attack = max_violation_search(form, regime, space, seed, restarts, stop_margin=0.5)
    evidence = {"reason": "a factor conditions on both settings", "search": attack.to_dict()}
    if attack.witness is None or not attack.witness_margin or attack.witness_margin <= 0:
        evidence["unresolved"] = "search found no violating witness"
        return ClassVerdict(cid, regime, IMPLIES_BI, evidence)
    return ClassVerdict(cid, regime, CAN_VIOLATE, evidence, attack.witness)


def falsification_margin(attack) -> float:
    """Usual margin under strict correlations, corrected margin at each point's own eps otherwise."""
    return attack.best_margin if attack.regime.strict else attack.best_generalized_margin


def _beta_verdict(alpha: ClassVerdict) -> ClassVerdict:
    cid = ClassId(alpha.class_id.index, Partition.BETA)
    evidence = {"from": str(alpha.class_id), "by": "outcome-role symmetry"}
    if alpha.status == INCONSISTENT:
        proof = missing_setting_inconsistency(form_of(cid), alpha.regime.delta_max)
        if proof is not None:
            evidence["statement"] = proof.statement
    if "falsification_margin" in alpha.evidence:
        evidence["falsification_margin"] = alpha.evidence["falsification_margin"]
    witness = None
    if alpha.witness is not None:
        witness = mirror_to_beta(alpha.witness)
        if alpha.status == CAN_VIOLATE:
            evidence["witness_margin"] = float(usual_wbi(triple_from(witness)).margin)
    return ClassVerdict(cid, alpha.regime, alpha.status, evidence, witness)


def reproduce_table1(
    regime: AssumptionRegime,
    space: VariableSpace | None = None,
    seed: int = 0,
    restarts: int = 100,
    classes=range(1, 33),
) -> list[ClassVerdict]:
    """Alpha-led verdicts for ``classes`` followed by their beta-led counterparts."""
    space = space or desk_space()
    alpha = [_alpha_verdict(i, regime, space, seed, restarts) for i in classes]
    return alpha + [_beta_verdict(v) for v in alpha]


def render_table(columns: dict[str, list[ClassVerdict]]) -> str:
    """Aligned text table with one glyph column per (regime, partition)."""
    names = list(columns)
    by_key = {
        name: {(v.class_id.index, v.class_id.partition): v.glyph for v in verdicts}
        for name, verdicts in columns.items()
    }
    heads = [f"{name} {p.suffix}" for name in names for p in Partition]
    form_width = max(len(form_of(i).describe()) for i in range(1, 33))
    lines = ["class  " + "form".ljust(form_width) + "  group   " + "  ".join(heads)]
    for i in range(1, 33):
        cells = []
        for name in names:
            for p in Partition:
                cells.append(by_key[name].get((i, p), " ").center(len(f"{name} {p.suffix}")))
        lines.append(
            f"H{i:<5d}" + form_of(i).describe().ljust(form_width) + f"  {strength_of(i).value:<6s}  " + "  ".join(cells)
        )
    return "\n".join(lines)


def table_json(columns: dict[str, list[ClassVerdict]]) -> str:
    return json.dumps({name: [v.to_dict() for v in vs] for name, vs in columns.items()}, indent=2)


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x
