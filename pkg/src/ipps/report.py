"""Known size bounds for t-IPPS(n, k) and the construction experiment table."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .construct import run_construction
from .equations import Triviality, greedy_solution_free, random_shift_search, verify_solution_free
from .verify import max_pairwise_intersection

K4_REGIMES = {
    "upper": "I_2(n,4) = o(n^2)",
    "previous_lower": "I_2(n,4) = Omega(n^(4/3+o(1)))",
    "construction_lower": "I_2(n,4) = Omega(n^(3/2-o(1)))",
}


@dataclass(frozen=True)
class BoundsReport:
    n: int
    k: int
    t: int
    upper_exponent: int
    upper_binomial: int
    mu: int
    lower_exponent: Fraction
    special_k4: dict | None = None
    achieved: int | None = None

    @property
    def achieved_ratio(self) -> float | None:
        """``achieved / n**1.5`` for the k = 4, t = 2 case."""
        if self.achieved is None or self.special_k4 is None:
            return None
        return self.achieved / self.n**1.5

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "t": self.t,
            "upper_exponent": self.upper_exponent,
            "upper_binomial": self.upper_binomial,
            "mu": self.mu,
            "lower_exponent": f"{self.lower_exponent.numerator}/{self.lower_exponent.denominator}",
            "special_k4": self.special_k4,
            "achieved": self.achieved,
        }
        ratio = self.achieved_ratio
        out["achieved_over_n_1.5"] = None if ratio is None else f"{ratio:.6f}"
        return out


def bounds_report(n: int, k: int, t: int, achieved: int | None = None) -> BoundsReport:
    if not (n >= k >= 2 and t >= 2):
        raise ValueError(f"need n >= k >= 2 and t >= 2, got n={n}, k={k}, t={t}")
    exponent = -(-k // (t * t // 4 + t))
    mu = (t + 2) ** 2 // 4  # floor((t/2 + 1)^2)
    special = dict(K4_REGIMES) if (k, t) == (4, 2) else None
    return BoundsReport(
        n=n,
        k=k,
        t=t,
        upper_exponent=exponent,
        upper_binomial=math.comb(n, exponent),
        mu=mu,
        lower_exponent=Fraction(k, mu - 1),
        special_k4=special,
        achieved=achieved,
    )


EXPERIMENT_COLUMNS = [
    "m",
    "q",
    "n",
    "equations",
    "S_size",
    "blocks",
    "max_intersection",
    "verdict",
    "examined",
    "pruned",
    "S_over_sqrt_m",
    "log_blocks_over_log_n",
    "shift_u",
    "shift_size",
    "shift_solution_free",
]


def experiment_row(m: int, seed: int, mode: str = "fast", trials: int = 64) -> dict:
    result = run_construction(m, verify_mode=mode)
    params, system = result.params, result.system
    nb = len(system)
    # the two halves of the requirement list, built separately and recombined by a shift
    eqs = result.equations
    all_equal = [e for e in eqs if e.triviality is Triviality.ALL_EQUAL]
    matched = [e for e in eqs if e.triviality is Triviality.COEFF_MATCHED]
    S0 = greedy_solution_free(m, all_equal).elements
    S1 = greedy_solution_free(m, matched).elements
    u, shifted = random_shift_search(S0, S1, m, seed=seed + m, trials=trials)
    return {
        "m": m,
        "q": params.q,
        "n": params.n,
        "equations": len(eqs),
        "S_size": len(result.slopes),
        "blocks": nb,
        "max_intersection": max_pairwise_intersection(system) if nb >= 2 else 0,
        "verdict": result.report.verdict,
        "examined": result.report.stats["examined"],
        "pruned": result.report.stats["pruned"],
        "S_over_sqrt_m": f"{len(result.slopes) / math.sqrt(m):.6f}",
        "log_blocks_over_log_n": f"{math.log(nb) / math.log(params.n):.6f}",
        "shift_u": u,
        "shift_size": len(shifted),
        "shift_solution_free": verify_solution_free(shifted, eqs).verdict,
    }


def default_jobs() -> int:
    return max(1, int(os.environ.get("IPPS_JOBS", "1")))


def run_experiment(
    m_list: Sequence[int], seed: int = 0, mode: str = "fast", jobs: int | None = None
) -> str:
    """CSV table, one row per m, in the order given."""
    for m in m_list:
        if m < 2:
            raise ValueError(f"every m must be >= 2, got {m}")
    jobs = default_jobs() if jobs is None else jobs
    if jobs > 1 and len(m_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(experiment_row, m_list, [seed] * len(m_list), [mode] * len(m_list)))
    else:
        rows = [experiment_row(m, seed, mode) for m in m_list]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=EXPERIMENT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
