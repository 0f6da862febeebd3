"""Monte Carlo checks of the verification theorem in the explicit case.

For any admissible spending path ``z`` the affine value function satisfies

    v(0, x) = J(z) + G(z),   G(z) = int_0^T [H0(w) - <B, w> z + beta z^2] ds >= 0

so ``v`` dominates every objective value and ``z*`` (where ``G = 0``) is
optimal.  The estimates here use common random numbers: path ``i`` of every
control is driven by the same noise stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid import ControlPath
from .hjb import LinearValueFunction, _cumulative_from_end, _h0, optimal_control_path, value_function
from .lift import initial_datum
from .params import ScenarioParams
from .sdde import Z975, check_grid, objective_samples, summarize

# verdict is inconclusive when 3 half-widths exceed this fraction of max(|v|, 1)
INCONCLUSIVE_REL_WIDTH = 0.05
N_SIGMA = 3.0


def fundamental_identity_gap(
    params: ScenarioParams, vf: LinearValueFunction, control: ControlPath
) -> float:
    """Accumulated Hamiltonian slack ``G(z)`` of a spending path (trapezoid rule)."""
    check_grid(params, None, control)
    Bw = vf.Bw
    z = control.values
    slack = _h0(Bw, params.beta) - Bw * z + params.beta * z * z
    return float(_cumulative_from_end(slack, params.dt)[0])


def discretization_allowance(
    params: ScenarioParams, control: ControlPath, n_paths: int, seed: int
) -> float:
    """``2 |J_dt - J_{dt/2}|`` with both levels driven by the same Brownian paths."""
    fine = params.refined(2)
    j_coarse = objective_samples(params, control, n_paths, seed, substeps=2)
    j_fine = objective_samples(fine, control.resampled(fine.dt), n_paths, seed)
    return 2.0 * abs(float(np.mean(j_coarse)) - float(np.mean(j_fine)))


@dataclass
class DominanceReport:
    v_value: float
    control_labels: list[str]
    j_means: np.ndarray
    j_half_widths: np.ndarray
    predicted_gaps: np.ndarray
    allowances: np.ndarray
    # paired (common random numbers) J(z*) - J(z) and its 95% half-width
    paired_diffs: np.ndarray
    paired_half_widths: np.ndarray
    optimal_j: float
    optimal_half_width: float
    n_paths: int
    violations: list[str] = field(default_factory=list)
    identity_violations: list[str] = field(default_factory=list)

    @property
    def optimal_gap(self) -> float:
        """``J(z*) - v(0, x)``."""
        return self.optimal_j - self.v_value

    @property
    def passed(self) -> bool:
        return not self.violations and not self.identity_violations

    @property
    def inconclusive(self) -> bool:
        widest = float(np.max(self.j_half_widths, initial=self.optimal_half_width))
        return N_SIGMA * widest > INCONCLUSIVE_REL_WIDTH * max(abs(self.v_value), 1.0)

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "violation"
        return "inconclusive" if self.inconclusive else "pass"

    def rows(self) -> list[dict]:
        out = []
        for i, label in enumerate(self.control_labels):
            out.append(
                {
                    "label": label,
                    "j_mean": self.j_means[i],
                    "half_width_95": self.j_half_widths[i],
                    "predicted_j": self.v_value - self.predicted_gaps[i],
                    "gap": self.predicted_gaps[i],
                    "allowance": self.allowances[i],
                    "paired_diff_vs_optimal": self.paired_diffs[i],
                    "paired_half_width": self.paired_half_widths[i],
                    "status": "violation" if label in self.violations
                    else "identity_mismatch" if label in self.identity_violations
                    else "ok",
                }
            )
        return out


def verify_dominance(
    params: ScenarioParams,
    vf: LinearValueFunction,
    controls: Sequence[ControlPath],
    n_paths: int,
    seed: int,
    labels: Optional[Sequence[str]] = None,
    *,
    allowance: bool = True,
    workers: int = 1,
) -> DominanceReport:
    """Estimate ``J(0, x; z)`` for each control against ``v(0, x)``.

    A control is a dominance violation when its whole 3-sigma band sits
    above ``v + allowance``; it is an identity violation when its estimate
    misses ``v - G(z)`` by more than three half-widths plus the allowance.
    """
    labels = list(labels) if labels is not None else [f"control_{i}" for i in range(len(controls))]
    if len(labels) != len(controls):
        raise ValueError("need one label per control")
    v0 = value_function(vf, 0.0, initial_datum(params))
    z_star = optimal_control_path(vf)
    base = objective_samples(params, z_star, n_paths, seed, workers=workers)
    opt = summarize(base)

    means, hws, gaps, allows, pdiff, phw = ([] for _ in range(6))
    violations, mismatches = [], []
    for label, control in zip(labels, controls):
        check_grid(params, None, control)
        samples = objective_samples(params, control, n_paths, seed, workers=workers)
        est = summarize(samples)
        diff = base - samples
        gap = fundamental_identity_gap(params, vf, control)
        allow = discretization_allowance(params, control, n_paths, seed) if allowance else 0.0
        means.append(est.mean)
        hws.append(est.half_width_95)
        gaps.append(gap)
        allows.append(allow)
        pdiff.append(float(np.mean(diff)))
        phw.append(Z975 * float(np.std(diff, ddof=1)) / np.sqrt(n_paths))
        if est.mean - N_SIGMA * est.half_width_95 > v0 + allow:
            violations.append(label)
        elif abs(est.mean - (v0 - gap)) > N_SIGMA * est.half_width_95 + allow:
            mismatches.append(label)

    return DominanceReport(
        v_value=v0,
        control_labels=labels,
        j_means=np.array(means),
        j_half_widths=np.array(hws),
        predicted_gaps=np.array(gaps),
        allowances=np.array(allows),
        paired_diffs=np.array(pdiff),
        paired_half_widths=np.array(phw),
        optimal_j=opt.mean,
        optimal_half_width=opt.half_width_95,
        n_paths=n_paths,
        violations=violations,
        identity_violations=mismatches,
    )


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs_mean: float
    half_width: float

    @property
    def discrepancy(self) -> float:
        return abs(self.lhs - self.rhs_mean)


def mc_identity_check(
    params: ScenarioParams,
    vf: LinearValueFunction,
    control: ControlPath,
    n_paths: int,
    seed: int,
) -> IdentityCheck:
    """``v(0, x)`` against the Monte Carlo mean of ``J(z)`` plus ``G(z)``."""
    lhs = value_function(vf, 0.0, initial_datum(params))
    est = summarize(objective_samples(params, control, n_paths, seed))
    rhs = est.mean + fundamental_identity_gap(params, vf, control)
    return IdentityCheck(lhs, rhs, est.half_width_95)
