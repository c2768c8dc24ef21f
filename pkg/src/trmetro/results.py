from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ScenarioResult:
    """Output of one protocol run at one parameter point."""

    name: str
    distribution: np.ndarray | None
    fi: float | None
    qfi: float | None = None
    success_prob: float | None = None
    theoretical_max: float | None = None
    metadata: dict = field(default_factory=dict)
    warnings: tuple = ()

    def check(self, tol: float = 1e-6) -> list[str]:
        """Invariant violations, empty when the record is sound."""
        problems = []
        if self.distribution is not None:
            p = np.asarray(self.distribution, dtype=float)
            if np.any(p < -1e-12):
                problems.append("negative probability")
            if abs(p.sum() - 1.0) > 1e-9:
                problems.append(f"distribution sums to {p.sum():.12g}")
        if self.qfi is not None and self.qfi < -1e-9:
            problems.append("negative QFI")
        if self.fi is not None:
            if self.fi < -1e-9:
                problems.append("negative FI")
            if self.qfi is not None and self.fi > self.qfi + 1e-3 * max(1.0, self.qfi):
                problems.append("FI exceeds QFI")
            if self.theoretical_max is not None and self.fi > self.theoretical_max + tol:
                problems.append("FI exceeds theoretical maximum")
        if self.success_prob is not None and not -1e-12 <= self.success_prob <= 1 + 1e-12:
            problems.append("success probability outside [0, 1]")
        return problems
