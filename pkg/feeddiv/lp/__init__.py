# Linear programs and the simplex solver
from feeddiv.lp.builders import build_diversity_lp, build_engagement_lp, opt_delta
from feeddiv.lp.program import LinearProgram, LpSolution, LpStatus, Relation
from feeddiv.lp.simplex import solve

__all__ = [
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "Relation",
    "build_diversity_lp",
    "build_engagement_lp",
    "opt_delta",
    "solve",
]
