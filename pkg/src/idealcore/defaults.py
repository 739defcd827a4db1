"""Default tolerances and counts shared by the library and the CLI."""

DELTA = 1e-2
EPS_FINAL = 1e-2
# I-boundedness cutoff: {n : |x_n| > BOUND} must be small
BOUND = 100.0
TOL_EQUIV_FACTOR = 3.0
DIRECTIONS_PER_DIM = 64
# rounds of witness-hull direction refinement in the support construction
SUPPORT_REFINE = 2
BALL_CENTERS = 32
MAX_ROUNDS = 64


def tol_equiv(delta: float = DELTA, eps_final: float = EPS_FINAL) -> float:
    """Agreement tolerance between core constructions."""
    return TOL_EQUIV_FACTOR * max(delta, eps_final)
