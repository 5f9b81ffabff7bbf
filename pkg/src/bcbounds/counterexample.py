"""Separating example: a product channel where the achievable sum rate
(8/3 bits) sits strictly below the UV outer bound (at least 44/15 bits).

Each component has four inputs. One receiver sees the two-way class label
[x >= 2] (deterministic, one bit). The other receiver sees an unordered
pair of distinct inputs, uniform over the three pairs containing x, so
its output alphabet has six symbols. Component 1 is oriented with the
deterministic receiver on the Y side, component 2 on the Z side; the
product is therefore reversely semi-deterministic.

The weighted sum-rate curve of a single component at uniform input is
piecewise affine with one breakpoint, known in closed form, and the
minimum of the two components' curve sum is 8/3 at lambda = 1/2. A
mixture auxiliary built from the class label, the input parity, and a
Q-randomized switch to the raw input evaluates the UV bound to exactly
44/15. Everything here is exact arithmetic plus seeded searches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .channel import Channel, ProductChannel, make_product
from .kernel import entropy_of_array
from .marton import (
    AuxiliaryJoint,
    Cardinalities,
    MartonSumRate,
    embed_auxiliary,
    lambda_sr_functional,
    marton_sum_rate,
    outer_auxiliary,
)
from .objectives import FixedInputObjective
from .regions import UvAuxiliary, UvPoint, UvSumRate, evaluate_uv_point, uv_sum_rate
from .search import SearchConfig, ascend, simplex_grid

__all__ = [
    "PAIRS",
    "component",
    "product_channel",
    "f_closed_form",
    "f_envelope_oracle",
    "lambda_curve_analytic",
    "analytic_product_curve",
    "analytic_minimum",
    "component_branch_aux",
    "component_seed_joints",
    "product_seed_auxiliaries",
    "product_seed_factory",
    "REDUCED_PRODUCT_PROFILE",
    "uv_witness_auxiliary",
    "witness_component_values",
    "marton_on_product",
    "uv_on_product",
    "verify_separation",
    "uniform_input_check",
]

# unordered pairs of distinct inputs; the noisy receiver emits the index
# of one of the three pairs containing x, each with probability 1/3
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

LOG2_3 = float(np.log2(3.0))

# the class label [x >= 2] and the parity x % 2; parity pairs one input
# from each class, which keeps the class label uninformed while still
# splitting the noisy receiver's pair distribution
_LABEL = np.array([0, 0, 1, 1])
_PARITY = np.array([0, 1, 0, 1])


def component(det: str = "z") -> Channel:
    """One four-input component; `det` names the deterministic receiver."""
    if det not in ("y", "z"):
        raise ValueError("det must be 'y' or 'z'")
    noisy = np.zeros((4, 6))
    for j, (a, b) in enumerate(PAIRS):
        noisy[a, j] = 1.0 / 3.0
        noisy[b, j] = 1.0 / 3.0
    label = np.zeros((4, 2))
    label[np.arange(4), _LABEL] = 1.0
    if det == "z":
        q = np.einsum("xy,xz->xyz", noisy, label)
    else:
        q = np.einsum("xy,xz->xyz", label, noisy)
    return Channel(q)


def product_channel() -> ProductChannel:
    """Component 1 deterministic toward Y, component 2 toward Z."""
    return make_product(component("y"), component("z"))


def f_closed_form(x: float) -> float:
    """Best H(Z|U) - H(Y|U) over p(u|x) at input (x/2, x/2, (1-x)/2, (1-x)/2)
    on the Z-deterministic component: (1/3) H2(x) - log2(3)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return entropy_of_array(np.array([x, 1.0 - x])) / 3.0 - LOG2_3


def _hz_minus_hy(points: np.ndarray) -> np.ndarray:
    """H(Z) - H(Y) on the Z-deterministic component, vectorized over rows."""
    pz = np.stack([points[:, 0] + points[:, 1], points[:, 2] + points[:, 3]], axis=1)
    py = np.zeros((points.shape[0], 6))
    for j, (a, b) in enumerate(PAIRS):
        py[:, j] = (points[:, a] + points[:, b]) / 3.0

    def ent(rows):
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(rows > 0.0, rows * np.log2(np.where(rows > 0, rows, 1.0)), 0.0)
        return -terms.sum(axis=1)

    return ent(pz) - ent(py)


def f_envelope_oracle(x: float, resolution: int = 32) -> float:
    """Independent oracle for f via an upper concave envelope.

    The best p(u|x) value equals the concave envelope of H(Z) - H(Y) over
    input laws, evaluated at the symmetric point. The envelope is computed
    as a linear program over mixtures of grid distributions: maximize the
    mixed objective subject to the mixture reproducing the target marginal.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    grid = np.array(list(simplex_grid(4, resolution)))
    g = _hz_minus_hy(grid)
    target = np.array([x / 2.0, x / 2.0, (1.0 - x) / 2.0, (1.0 - x) / 2.0])
    res = linprog(
        -g,
        A_eq=grid.T,
        b_eq=target,
        bounds=(0.0, None),
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"envelope LP failed: {res.message}")
    return -float(res.fun)


def lambda_curve_analytic(lam: float, det: str = "z") -> float:
    """Closed-form weighted sum rate at uniform input for one component.

    Z-deterministic orientation: 5/3 - (2/3) lam on [0, 1/2], then 4/3.
    The Y-deterministic orientation is the lam -> 1 - lam mirror.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if det == "y":
        return lambda_curve_analytic(1.0 - lam, "z")
    if det != "z":
        raise ValueError("det must be 'y' or 'z'")
    if lam <= 0.5:
        return 5.0 / 3.0 - 2.0 / 3.0 * lam
    return 4.0 / 3.0


def analytic_product_curve(lam: float) -> float:
    return lambda_curve_analytic(lam, "y") + lambda_curve_analytic(lam, "z")


def analytic_minimum() -> tuple[float, float]:
    """(lambda*, value) of the product curve minimum: (1/2, 8/3)."""
    return 0.5, 8.0 / 3.0


def component_branch_aux(
    det: str, branch: str, px: np.ndarray | None = None
) -> AuxiliaryJoint:
    """The two optimal auxiliary constructions for one component.

    Z-deterministic: 'steep' is W = class label, U = X, V = class label
    (value 5/3 - (2/3) lam at uniform); 'flat' is W constant, U = parity,
    V = class label (value 4/3 for every lam). The Y-deterministic
    constructions swap the U and V roles.
    """
    px = np.full(4, 0.25) if px is None else np.asarray(px, dtype=float)
    if det == "z":
        if branch == "steep":
            t = np.zeros((4, 2, 2, 4))
            t[np.arange(4), _LABEL, _LABEL, np.arange(4)] = px
        elif branch == "flat":
            t = np.zeros((2, 2, 1, 4))
            t[_PARITY, _LABEL, 0, np.arange(4)] = px
        else:
            raise ValueError("branch must be 'steep' or 'flat'")
    elif det == "y":
        if branch == "steep":
            t = np.zeros((2, 4, 2, 4))
            t[_LABEL, np.arange(4), _LABEL, np.arange(4)] = px
        elif branch == "flat":
            t = np.zeros((2, 2, 1, 4))
            t[_LABEL, _PARITY, 0, np.arange(4)] = px
        else:
            raise ValueError("branch must be 'steep' or 'flat'")
    else:
        raise ValueError("det must be 'y' or 'z'")
    return AuxiliaryJoint(t)


def component_seed_joints(
    det: str, prof: Cardinalities, px: np.ndarray
) -> list[np.ndarray]:
    """Both branch constructions embedded into a search profile."""
    out = []
    for branch in ("steep", "flat"):
        aux = component_branch_aux(det, branch, px)
        nu, nv, nw, _ = aux.shape
        if nu <= prof.nu and nv <= prof.nv and nw <= prof.nw:
            out.append(embed_auxiliary(aux, prof).joint)
    return out


# profile for the 16-input product: contains every product of branch
# constructions (|U| <= 2*4, |V| <= 4*2, |W| <= 2*2) at a quarter of the
# full sum-rate profile's size
REDUCED_PRODUCT_PROFILE = Cardinalities(8, 8, 4)


def product_seed_auxiliaries() -> list[AuxiliaryJoint]:
    """Products of component branch constructions on the 16-input channel."""
    out = []
    for b1 in ("steep", "flat"):
        for b2 in ("steep", "flat"):
            a1 = component_branch_aux("y", b1)
            a2 = component_branch_aux("z", b2)
            out.append(embed_auxiliary(outer_auxiliary(a1, a2), REDUCED_PRODUCT_PROFILE))
    return out


def product_seed_factory(lam: float) -> list[np.ndarray]:
    return [a.joint for a in product_seed_auxiliaries()]


def uv_witness_auxiliary(q_probs: tuple[float, float] = (0.8, 0.8)) -> UvAuxiliary:
    """Mixture auxiliary certifying the UV bound value on the product.

    Component 1: U1 is the Y1 label; the V side draws Q1 (probability
    q_probs[0] for branch 0) and reveals the parity of X1 when Q1 = 0 or
    X1 itself when Q1 = 1. Component 2 mirrors this on the U side with
    V2 the Z2 label. The (branch, symbol) pairs are flattened to plain
    alphabets of size six; the product auxiliary has |U| = |V| = 12 on
    the 16 inputs. At q_probs = (4/5, 4/5) the evaluated point is exactly
    (22/15, 22/15, 44/15, 44/15).
    """
    q1, q2 = float(q_probs[0]), float(q_probs[1])
    if not (0.0 <= q1 <= 1.0 and 0.0 <= q2 <= 1.0):
        raise ValueError("mixing probabilities must lie in [0, 1]")
    # mixed symbol: values 0..1 are the parity branch, 2..5 identify x
    p1 = np.zeros((2, 6, 4))  # (u1, v1_mixed, x1)
    p2 = np.zeros((6, 2, 4))  # (u2_mixed, v2, x2)
    for x in range(4):
        u1 = _LABEL[x]
        p1[u1, _PARITY[x], x] += q1 * 0.25
        p1[u1, 2 + x, x] += (1.0 - q1) * 0.25
        v2 = _LABEL[x]
        p2[_PARITY[x], v2, x] += q2 * 0.25
        p2[2 + x, v2, x] += (1.0 - q2) * 0.25
    joint = np.einsum("ace,bdf->abcdef", p1, p2).reshape(12, 12, 16)
    return UvAuxiliary(joint)


def witness_component_values() -> dict[str, float]:
    """Exact per-component information values behind the 44/15 total."""
    c1 = component("y")
    c2 = component("z")
    q1, q2 = 0.8, 0.8
    p1 = np.zeros((2, 6, 4))
    p2 = np.zeros((6, 2, 4))
    for x in range(4):
        p1[_LABEL[x], _PARITY[x], x] += q1 * 0.25
        p1[_LABEL[x], 2 + x, x] += (1.0 - q1) * 0.25
        p2[_PARITY[x], _LABEL[x], x] += q2 * 0.25
        p2[2 + x, _LABEL[x], x] += (1.0 - q2) * 0.25
    pt1 = evaluate_uv_point(c1, UvAuxiliary(p1))
    pt2 = evaluate_uv_point(c2, UvAuxiliary(p2))
    return {
        "iu1y1": pt1.r1_bound,
        "iv1z1": pt1.r2_bound,
        "ix1z1_given_u1": pt1.sum_y_side - pt1.r1_bound,
        "ix1y1_given_v1": pt1.sum_z_side - pt1.r2_bound,
        "iu2y2": pt2.r1_bound,
        "iv2z2": pt2.r2_bound,
        "ix2z2_given_u2": pt2.sum_y_side - pt2.r1_bound,
        "ix2y2_given_v2": pt2.sum_z_side - pt2.r2_bound,
    }


def marton_on_product(
    cfg: SearchConfig | None = None,
    scalar_tol: float = 2e-3,
) -> MartonSumRate:
    """Marton sum rate of the product, seeded with the branch products."""
    cfg = cfg or SearchConfig(restarts=6, max_iters=120)
    return marton_sum_rate(
        product_channel().flat,
        cfg,
        profile=REDUCED_PRODUCT_PROFILE,
        scalar_tol=scalar_tol,
        seed_factory=product_seed_factory,
    )


def uv_on_product(cfg: SearchConfig | None = None) -> UvSumRate:
    """Free UV sum-rate search on the product, seeded with the witness."""
    cfg = cfg or SearchConfig(restarts=8, max_iters=150)
    return uv_sum_rate(
        product_channel().flat,
        cfg,
        extra_seeds=[uv_witness_auxiliary().joint],
    )


@dataclass
class SeparationCheck:
    name: str
    computed: float
    target: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "computed_bits": self.computed,
            "target_bits": self.target,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class SeparationReport:
    checks: list
    passed: bool
    converged: bool
    marton: MartonSumRate
    uv_witness_point: UvPoint
    uv_free: UvSumRate
    seed: int

    def to_dict(self) -> dict:
        return {
            "channel": {"nx": 16, "ny": 12, "nz": 12, "structure": "product"},
            "seed": self.seed,
            "analytic": {
                "lambda_star": 0.5,
                "marton_sum_rate_bits": 8.0 / 3.0,
                "uv_witness_bits": 44.0 / 15.0,
                "gap_bits": 44.0 / 15.0 - 8.0 / 3.0,
            },
            "marton_numeric": {
                "value_bits": self.marton.value,
                "lambda_star": self.marton.lam_star,
                "evaluations": self.marton.evaluations,
                "converged": self.marton.converged,
            },
            "uv_witness_point": self.uv_witness_point.to_dict(),
            "uv_free": {
                "value_bits": self.uv_free.value,
                "converged": self.uv_free.converged,
            },
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
            "converged": self.converged,
        }


def verify_separation(
    seed: int = 0,
    marton_cfg: SearchConfig | None = None,
    uv_cfg: SearchConfig | None = None,
) -> SeparationReport:
    """End-to-end reproduction of the inner/outer sum-rate separation.

    Checks: (i) the analytic curve minimum is 8/3 at lambda = 1/2;
    (ii) the numeric Marton sum rate of the product is within 5e-3 of it;
    (iii) the UV bound at the explicit mixture auxiliary is exactly 44/15;
    (iv) the free UV search does at least as well; (v) the numeric gap
    reproduces the analytic 4/15 separation up to the same slacks.
    """
    marton_cfg = (marton_cfg or SearchConfig(restarts=6, max_iters=120)).with_(seed=seed)
    uv_cfg = (uv_cfg or SearchConfig(restarts=8, max_iters=150)).with_(seed=seed)

    lam_star, analytic_value = analytic_minimum()
    grid = [k / 10.0 for k in range(11)]
    curve_min = min(analytic_product_curve(l) for l in grid + [lam_star])
    checks = [
        SeparationCheck(
            "analytic_curve_minimum",
            computed=curve_min,
            target=analytic_value,
            tolerance=1e-12,
            passed=abs(curve_min - analytic_value) <= 1e-12,
        )
    ]

    marton = marton_on_product(marton_cfg)
    checks.append(
        SeparationCheck(
            "marton_numeric_on_product",
            computed=marton.value,
            target=analytic_value,
            tolerance=5e-3,
            passed=abs(marton.value - analytic_value) <= 5e-3,
        )
    )

    witness = uv_witness_auxiliary()
    point = evaluate_uv_point(product_channel().flat, witness)
    target_uv = 44.0 / 15.0
    checks.append(
        SeparationCheck(
            "uv_at_witness",
            computed=point.sum_rate,
            target=target_uv,
            tolerance=1e-9,
            passed=abs(point.sum_rate - target_uv) <= 1e-9,
        )
    )

    free = uv_on_product(uv_cfg)
    checks.append(
        SeparationCheck(
            "uv_free_search",
            computed=free.value,
            target=target_uv,
            tolerance=1e-6,
            passed=free.value >= target_uv - 1e-6,
        )
    )

    gap = free.value - marton.value
    checks.append(
        SeparationCheck(
            "separation_gap",
            computed=gap,
            target=target_uv - analytic_value,
            tolerance=5e-3 + 1e-6,
            passed=gap >= (target_uv - analytic_value) - 5e-3 - 1e-6,
        )
    )

    return SeparationReport(
        checks=checks,
        passed=all(c.passed for c in checks),
        converged=marton.converged and free.converged,
        marton=marton,
        uv_witness_point=point,
        uv_free=free,
        seed=seed,
    )


@dataclass
class UniformInputReport:
    det: str
    lambdas: tuple
    resolution: int
    uniform_values: dict
    max_excess: float
    argmax_px: np.ndarray
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "orientation": self.det,
            "lambdas": list(self.lambdas),
            "grid_resolution": self.resolution,
            "uniform_value_bits": {str(k): v for k, v in self.uniform_values.items()},
            "max_excess_over_uniform_bits": self.max_excess,
            "argmax_px": [float(v) for v in self.argmax_px],
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def uniform_input_check(
    det: str = "z",
    resolution: int = 16,
    lambdas: tuple = (0.0, 0.5, 1.0),
    cfg: SearchConfig | None = None,
    tolerance: float = 2e-3,
) -> UniformInputReport:
    """Grid check that uniform input maximizes the fixed-input sum rate.

    Sweeps every p(x) with coordinates in multiples of 1/resolution; at
    each grid point the fixed-input search (seeded with both branch
    constructions, which remain valid at any input law) must not beat the
    uniform-input value by more than the tolerance.
    """
    c = component(det)
    cfg = cfg or SearchConfig(restarts=1, max_iters=50, patience=3)
    prof = Cardinalities.for_sum_rate(c)
    uniform = np.full(4, 0.25)
    fns = {lam: lambda_sr_functional(c, lam, prof) for lam in lambdas}

    def value_at(lam: float, px: np.ndarray) -> float:
        # compiled functional reused across the sweep; starts are the two
        # branch constructions plus flat conditionals, all deterministic
        fobj = FixedInputObjective(fns[lam], px)
        starts = [fobj.to_flat(t) for t in component_seed_joints(det, prof, px)]
        starts.append(np.full(sum(fobj.block_sizes), 1.0 / (prof.nu * prof.nv * prof.nw)))
        best = -np.inf
        for s in starts:
            v, _, _, _ = ascend(fobj, s, fobj.block_sizes, cfg)
            best = max(best, v)
        return best

    uniform_values = {lam: value_at(lam, uniform) for lam in lambdas}
    max_excess = -np.inf
    argmax_px = uniform
    for px in simplex_grid(4, resolution):
        for lam in lambdas:
            excess = value_at(lam, px) - uniform_values[lam]
            if excess > max_excess:
                max_excess = excess
                argmax_px = px
    return UniformInputReport(
        det=det,
        lambdas=tuple(lambdas),
        resolution=resolution,
        uniform_values=uniform_values,
        max_excess=float(max_excess),
        argmax_px=np.asarray(argmax_px, dtype=float),
        tolerance=tolerance,
        passed=max_excess <= tolerance,
    )
