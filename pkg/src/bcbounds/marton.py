"""Lambda-weighted sum rates for broadcast channels.

For a channel q(y,z|x), an auxiliary joint p(u,v,w,x) and lambda in [0,1],
the weighted sum rate is

    lambda*I(W;Y) + (1-lambda)*I(W;Z) + I(U;Y|W) + I(V;Z|W) - I(U;V|W).

Its maximum over auxiliaries upper-bounds every lambda-combination of the
inner-bound sum rate, is convex in lambda, and its minimum over lambda is
the inner-bound sum rate itself. Maximizations here are nonconvex, so all
reported maxima are certified lower bounds (exact evaluations at feasible
points); the minimum over lambda of such values is what the sum-rate
driver reports.

Cardinality caps: searches default to |U| <= min(nx, ny),
|V| <= min(nx, nz), |W| <= nx, which suffice for the weighted sum rate.
Profiles are explicit and echoed into every result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import Channel, capacity, deterministic_map, is_deterministic, make_product
from .kernel import entropy_of_array
from .objectives import (
    FixedInputObjective,
    InfoFunctional,
    JointObjective,
    MinOfObjectives,
    mi_terms,
    scale_terms,
)
from .search import (
    SearchConfig,
    ascend,
    golden_section_min,
    maximize,
    project_simplex,
    simplex_grid,
)

__all__ = [
    "Cardinalities",
    "AuxiliaryJoint",
    "LambdaSample",
    "LambdaCurve",
    "lambda_sr_terms",
    "lambda_sr_functional",
    "lambda_sr_value",
    "curve_subgradient",
    "maximize_lambda_sr_at_input",
    "lambda_sr_global",
    "endpoint_sr",
    "build_lambda_curve",
    "marton_sum_rate",
    "check_factorization",
    "check_min_max_equality",
    "outer_auxiliary",
    "embed_auxiliary",
    "curve_to_csv",
]


@dataclass(frozen=True)
class Cardinalities:
    """Auxiliary alphabet sizes (|U|, |V|, |W|) for a search."""

    nu: int
    nv: int
    nw: int

    @classmethod
    def for_sum_rate(cls, c: Channel) -> "Cardinalities":
        return cls(min(c.nx, c.ny), min(c.nx, c.nz), c.nx)

    @classmethod
    def for_region(cls, c: Channel) -> "Cardinalities":
        return cls(c.nx, c.nx, c.nx + 4)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.nu, self.nv, self.nw)


@dataclass
class AuxiliaryJoint:
    """Joint law p(u, v, w, x) of the auxiliaries and the channel input."""

    joint: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.joint, dtype=float)
        if arr.ndim != 4:
            raise ValueError("auxiliary joint must have axes (u, v, w, x)")
        if arr.min() < -1e-10:
            raise ValueError(f"negative entry {arr.min()} in auxiliary joint")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"auxiliary joint sums to {arr.sum()}")
        self.joint = np.where(arr < 0.0, 0.0, arr)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.joint.shape

    def px(self) -> np.ndarray:
        return self.joint.sum(axis=(0, 1, 2))

    def check_input(self, px: np.ndarray, tol: float = 1e-10) -> bool:
        return bool(np.abs(self.px() - np.asarray(px, dtype=float)).max() <= tol)

    def to_json_dict(self) -> dict:
        return {"shape": list(self.joint.shape), "p_uvwx": self.joint.tolist()}


def lambda_sr_terms(lam: float) -> list:
    return (
        scale_terms(mi_terms("w", "y"), lam)
        + scale_terms(mi_terms("w", "z"), 1.0 - lam)
        + mi_terms("u", "y", "w")
        + mi_terms("v", "z", "w")
        + scale_terms(mi_terms("u", "v", "w"), -1.0)
    )


def lambda_sr_functional(c: Channel, lam: float, prof: Cardinalities) -> InfoFunctional:
    shape = (prof.nu, prof.nv, prof.nw, c.nx)
    return InfoFunctional("uvwx", shape, lambda_sr_terms(lam), channel=c.q)


def lambda_sr_value(c: Channel, lam: float, aux: AuxiliaryJoint) -> float:
    """Exact weighted sum rate at one auxiliary joint."""
    nu, nv, nw, nx = aux.shape
    if nx != c.nx:
        raise ValueError("auxiliary input alphabet mismatch")
    fn = lambda_sr_functional(c, lam, Cardinalities(nu, nv, nw))
    return fn.value(aux.joint)


def curve_subgradient(c: Channel, aux: AuxiliaryJoint) -> float:
    """I(W;Y) - I(W;Z) at a maximizer: a subgradient of the lambda-curve."""
    pwx = aux.joint.sum(axis=(0, 1))
    pwy = pwx @ c.qy
    pwz = pwx @ c.qz
    iwy = (
        entropy_of_array(pwx.sum(axis=1))
        + entropy_of_array(pwy.sum(axis=0))
        - entropy_of_array(pwy)
    )
    iwz = (
        entropy_of_array(pwx.sum(axis=1))
        + entropy_of_array(pwz.sum(axis=0))
        - entropy_of_array(pwz)
    )
    return iwy - iwz


def _det_joint(
    c: Channel,
    prof: Cardinalities,
    px: np.ndarray,
    u_map: np.ndarray | None,
    v_map: np.ndarray | None,
    w_map: np.ndarray | None,
) -> np.ndarray:
    t = np.zeros((prof.nu, prof.nv, prof.nw, c.nx))
    for x in range(c.nx):
        u = 0 if u_map is None else int(u_map[x])
        v = 0 if v_map is None else int(v_map[x])
        w = 0 if w_map is None else int(w_map[x])
        t[u, v, w, x] = px[x]
    return t


def _class_index(labels: np.ndarray) -> np.ndarray:
    """Position of each x inside its label class (0, 1, ... per class)."""
    counts: dict[int, int] = {}
    out = np.zeros(len(labels), dtype=int)
    for x, lab in enumerate(labels):
        out[x] = counts.get(int(lab), 0)
        counts[int(lab)] = out[x] + 1
    return out


def structured_seed_joints(
    c: Channel, prof: Cardinalities, px_list: Sequence[np.ndarray]
) -> list[np.ndarray]:
    """Deterministic-map auxiliary joints used as search starts.

    Covers the standard reductions: private-message-only (U=X or V=X),
    common-message-only (W=X), and output-label auxiliaries when a
    receiver is deterministic (these realize the H(Y,Z) and endpoint
    collapses exactly). Maps that do not fit the profile are skipped.
    """
    ident = np.arange(c.nx)
    # identity folded into each slot's alphabet cap, exact when it fits
    iu, iv, iw = ident % prof.nu, ident % prof.nv, ident % prof.nw
    ylab = deterministic_map(c, "y") if is_deterministic(c, "y") else None
    zlab = deterministic_map(c, "z") if is_deterministic(c, "z") else None

    def fits(m: np.ndarray | None, cap: int) -> bool:
        return m is None or int(m.max()) < cap

    combos: list[tuple] = []
    if ylab is not None:
        combos += [
            (None, iv, ylab),
            (ylab, iv, None),
            (ylab, None, None),
            (iu, None, ylab),
            (ylab, None, ylab),
        ]
    if zlab is not None:
        combos += [
            (iu, None, zlab),
            (iu, zlab, None),
            (None, zlab, None),
            (None, iv, zlab),
            (None, zlab, zlab),
        ]
    combos += [
        (iu, None, None),
        (None, iv, None),
        (iu, iv, None),
        (iu, iv, iw),
        (iu, None, iw),
        (None, iv, iw),
    ]
    if ylab is not None and zlab is not None:
        combos += [(ylab, zlab, None)]
    # within-class index of x (position inside its label class): carries the
    # private information for the noisy receiver while the label rides on
    # the other slot, closing the flat endpoint of deterministic channels
    if ylab is not None:
        cidx = _class_index(ylab)
        combos += [(ylab, cidx, None), (ylab, cidx, ylab), (None, cidx, ylab)]
    if zlab is not None:
        cidx = _class_index(zlab)
        combos += [(cidx, zlab, None), (cidx, zlab, zlab), (cidx, None, zlab)]

    seen: set[bytes] = set()
    out: list[np.ndarray] = []
    for u_map, v_map, w_map in combos:
        if not (fits(u_map, prof.nu) and fits(v_map, prof.nv) and fits(w_map, prof.nw)):
            continue
        for px in px_list:
            t = _det_joint(c, prof, px, u_map, v_map, w_map)
            key = t.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(t)
    return out


def _default_px_list(c: Channel) -> list[np.ndarray]:
    uniform = np.full(c.nx, 1.0 / c.nx)
    _, py = capacity(c, "y")
    _, pz = capacity(c, "z")
    return [uniform, py, pz]


@dataclass
class LambdaPointResult:
    value: float
    aux: AuxiliaryJoint
    subgradient: float
    profile: Cardinalities
    converged: bool
    budget_exhausted: bool
    restart_values: list = field(default_factory=list)


def maximize_lambda_sr_at_input(
    c: Channel,
    lam: float,
    px: np.ndarray,
    cfg: SearchConfig | None = None,
    profile: Cardinalities | None = None,
    extra_seeds: Sequence[np.ndarray] = (),
) -> LambdaPointResult:
    """Best weighted sum rate at a fixed input law (certified lower bound)."""
    cfg = cfg or SearchConfig()
    prof = profile or Cardinalities.for_sum_rate(c)
    px = np.asarray(px, dtype=float)
    fn = lambda_sr_functional(c, lam, prof)
    obj = FixedInputObjective(fn, px)
    seeds = [obj.to_flat(t) for t in structured_seed_joints(c, prof, [px])]
    seeds += [obj.to_flat(np.asarray(t, dtype=float)) for t in extra_seeds]
    res = maximize(obj, obj.block_sizes, cfg, seeds=seeds)
    aux = AuxiliaryJoint(obj.to_tensor(res.point))
    return LambdaPointResult(
        value=res.value,
        aux=aux,
        subgradient=curve_subgradient(c, aux),
        profile=prof,
        converged=res.converged,
        budget_exhausted=res.budget_exhausted,
        restart_values=res.restart_values,
    )


def lambda_sr_global(
    c: Channel,
    lam: float,
    cfg: SearchConfig | None = None,
    profile: Cardinalities | None = None,
    extra_seeds: Sequence[np.ndarray] = (),
    polish_rounds: int = 1,
) -> LambdaPointResult:
    """Global weighted sum rate: joint search over p(u,v,w,x).

    Multi-start ascent over the full joint, followed by an outer concave
    polish on the input law: the weighted sum rate is concave in p(x), and
    at an inner maximizer the gradient of the joint objective contracted
    with the conditional is a supergradient in p(x).
    """
    cfg = cfg or SearchConfig()
    prof = profile or Cardinalities.for_sum_rate(c)
    fn = lambda_sr_functional(c, lam, prof)
    obj = JointObjective(fn)
    seeds = [obj.to_flat(t) for t in structured_seed_joints(c, prof, _default_px_list(c))]
    seeds += [obj.to_flat(np.asarray(t, dtype=float)) for t in extra_seeds]
    res = maximize(obj, obj.block_sizes, cfg, seeds=seeds)
    best_v, best_t = res.value, obj.to_tensor(res.point)

    if polish_rounds > 0:
        inner_cfg = cfg.with_(max_iters=max(40, cfg.max_iters // 2))
        t = best_t
        for _ in range(polish_rounds):
            px = t.sum(axis=(0, 1, 2))
            fobj = FixedInputObjective(fn, px)
            warm = fobj.to_flat(t)
            v0, x0, _, _ = ascend(fobj, warm, fobj.block_sizes, inner_cfg)
            t0 = fobj.to_tensor(x0)
            if v0 > best_v:
                best_v, best_t = v0, t0
            _, grad = fn.value_and_grad(t0)
            cond_only = np.where(px > 0, t0 / np.where(px > 0, px, 1.0), 0.0)
            super_px = np.einsum("uvwx,uvwx->x", cond_only, grad)
            improved = False
            for step in (1.0, 0.2, 0.05):
                px_new = project_simplex(px + step * super_px)
                fobj2 = FixedInputObjective(fn, px_new)
                v1, x1, _, _ = ascend(fobj2, fobj2.to_flat(t0), fobj2.block_sizes, inner_cfg)
                if v1 > best_v + 1e-12:
                    best_v, best_t = v1, fobj2.to_tensor(x1)
                    t = best_t
                    improved = True
                    break
            if not improved:
                break

    aux = AuxiliaryJoint(best_t)
    return LambdaPointResult(
        value=best_v,
        aux=aux,
        subgradient=curve_subgradient(c, aux),
        profile=prof,
        converged=res.converged,
        budget_exhausted=res.budget_exhausted,
        restart_values=res.restart_values,
    )


def _set_partitions(n: int):
    """All labelings of range(n) by cell index, as restricted growth strings."""
    a = [0] * n
    b = [0] * n
    while True:
        yield list(a)
        i = n - 1
        while i > 0 and a[i] == b[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        b[i] = max(b[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = b[j - 1]


def endpoint_sr(
    c: Channel, endpoint: int, cfg: SearchConfig | None = None
) -> LambdaPointResult:
    """Reduced endpoint search: at lambda=0 the weighted sum rate equals
    max over p(w,x) of I(W;Z) + I(X;Y|W) (receivers swapped at lambda=1).

    This searches a much smaller space than the full auxiliary joint and
    serves as an independent oracle for the endpoint values.
    """
    if endpoint not in (0, 1):
        raise ValueError("endpoint must be 0 or 1")
    cfg = cfg or SearchConfig(restarts=32, max_iters=200)
    if endpoint == 0:
        terms = mi_terms("w", "z") + mi_terms("x", "y", "w")
    else:
        terms = mi_terms("w", "y") + mi_terms("x", "z", "w")
    fn = InfoFunctional("wx", (c.nx, c.nx), terms, channel=c.q)
    obj = JointObjective(fn)

    # a maximizing W can be taken as a quantization of X, so for small
    # alphabets seed every deterministic partition and let ascent fix p(x)
    if c.nx <= 5:
        w_maps = [np.asarray(p) for p in _set_partitions(c.nx)]
    else:
        w_maps = [np.zeros(c.nx, dtype=int), np.arange(c.nx)]
    seeds = []
    for px in _default_px_list(c):
        for w_map in w_maps:
            t = np.zeros((c.nx, c.nx))
            for x in range(c.nx):
                t[int(w_map[x]), x] = px[x]
            seeds.append(obj.to_flat(t))
    res = maximize(obj, obj.block_sizes, cfg, seeds=seeds)
    pwx = res.point.reshape(c.nx, c.nx)
    # report as a full auxiliary with U=X, V=const so downstream code can
    # evaluate it with the standard formula
    nu = c.nx
    t_full = np.zeros((nu, 1, c.nx, c.nx))
    for x in range(c.nx):
        t_full[x, 0, :, x] = pwx[:, x]
    lam = 0.0 if endpoint == 0 else 1.0
    aux = AuxiliaryJoint(t_full if endpoint == 0 else np.swapaxes(t_full, 0, 1))
    value_check = lambda_sr_functional(c, lam, Cardinalities(*aux.shape[:3])).value(aux.joint)
    return LambdaPointResult(
        value=max(res.value, value_check),
        aux=aux,
        subgradient=curve_subgradient(c, aux),
        profile=Cardinalities(*aux.shape[:3]),
        converged=res.converged,
        budget_exhausted=res.budget_exhausted,
        restart_values=res.restart_values,
    )


@dataclass
class LambdaSample:
    lam: float
    value: float
    subgradient: float
    converged: bool
    aux: AuxiliaryJoint


@dataclass
class LambdaCurve:
    """Sampled lambda-curve with convexity and hyperplane diagnostics."""

    samples: list[LambdaSample]
    convexity_violations: list = field(default_factory=list)
    hyperplane_violations: list = field(default_factory=list)

    def lambdas(self) -> np.ndarray:
        return np.asarray([s.lam for s in self.samples])

    def values(self) -> np.ndarray:
        return np.asarray([s.value for s in self.samples])

    def min_sample(self) -> LambdaSample:
        return min(self.samples, key=lambda s: s.value)

    def run_checks(self, slack: float = 1e-6) -> None:
        self.convexity_violations = []
        self.hyperplane_violations = []
        ss = sorted(self.samples, key=lambda s: s.lam)
        for i in range(len(ss)):
            for j in range(i + 2, len(ss)):
                mid = 0.5 * (ss[i].lam + ss[j].lam)
                for k in range(i + 1, j):
                    if abs(ss[k].lam - mid) < 1e-12:
                        bound = 0.5 * (ss[i].value + ss[j].value) + slack
                        if ss[k].value > bound:
                            self.convexity_violations.append(
                                (ss[i].lam, ss[k].lam, ss[j].lam, ss[k].value - bound + slack)
                            )
        for s in ss:
            for other in ss:
                line = (other.lam - s.lam) * s.subgradient + s.value
                if line > other.value + slack:
                    self.hyperplane_violations.append(
                        (s.lam, other.lam, line - other.value)
                    )

    def ok(self) -> bool:
        return not self.convexity_violations and not self.hyperplane_violations


def curve_to_csv(curve: LambdaCurve) -> str:
    lines = ["lambda,value_bits,subgradient,converged"]
    for s in curve.samples:
        lines.append(f"{s.lam!r},{s.value!r},{s.subgradient!r},{int(s.converged)}")
    return "\n".join(lines) + "\n"


def build_lambda_curve(
    c: Channel,
    lambdas: Sequence[float],
    cfg: SearchConfig | None = None,
    profile: Cardinalities | None = None,
    seed_factory: Callable[[float], list[np.ndarray]] | None = None,
    check_slack: float = 1e-6,
) -> LambdaCurve:
    """Sample the global lambda-curve on a grid with warm-started searches."""
    cfg = cfg or SearchConfig()
    samples: list[LambdaSample] = []
    warm: list[np.ndarray] = []
    for lam in lambdas:
        extra = list(warm)
        if seed_factory is not None:
            extra += list(seed_factory(float(lam)))
        res = lambda_sr_global(c, float(lam), cfg, profile=profile, extra_seeds=extra)
        samples.append(
            LambdaSample(float(lam), res.value, res.subgradient, res.converged, res.aux)
        )
        warm = [res.aux.joint]
    curve = LambdaCurve(samples)
    curve.run_checks(check_slack)
    return curve


@dataclass
class MartonSumRate:
    value: float
    lam_star: float
    aux: AuxiliaryJoint
    evaluations: int
    converged: bool
    profile: Cardinalities


def marton_sum_rate(
    c: Channel,
    cfg: SearchConfig | None = None,
    profile: Cardinalities | None = None,
    scalar_tol: float = 1e-4,
    seed_factory: Callable[[float], list[np.ndarray]] | None = None,
) -> MartonSumRate:
    """min over lambda of the global weighted sum rate (golden section).

    The lambda-curve is convex; evaluations carry the maximizer's
    I(W;Y)-I(W;Z) as a subgradient hint to shrink the bracket before
    golden-section refinement. Consecutive evaluations warm-start each
    other with the previous maximizer.
    """
    cfg = cfg or SearchConfig()
    prof = profile or Cardinalities.for_sum_rate(c)
    warm: list[np.ndarray] = []

    def f(lam: float):
        extra = list(warm)
        if seed_factory is not None:
            extra += list(seed_factory(float(lam)))
        res = lambda_sr_global(c, float(lam), cfg, profile=prof, extra_seeds=extra)
        warm.clear()
        warm.append(res.aux.joint)
        return res.value, res.subgradient, res

    out = golden_section_min(f, bracket=(0.0, 1.0), tol=scalar_tol)
    best: LambdaPointResult = out.payload
    return MartonSumRate(
        value=out.value,
        lam_star=out.x,
        aux=best.aux,
        evaluations=out.evaluations,
        converged=out.converged and not best.budget_exhausted,
        profile=prof,
    )


def outer_auxiliary(a1: AuxiliaryJoint, a2: AuxiliaryJoint) -> AuxiliaryJoint:
    """Independent product of component auxiliaries on the product channel.

    Index flattening matches the product channel: first component major.
    """
    t = np.einsum("abcd,efgh->aebfcgdh", a1.joint, a2.joint)
    n1, n2 = a1.shape, a2.shape
    return AuxiliaryJoint(
        t.reshape(n1[0] * n2[0], n1[1] * n2[1], n1[2] * n2[2], n1[3] * n2[3])
    )


def embed_auxiliary(aux: AuxiliaryJoint, prof: Cardinalities) -> AuxiliaryJoint:
    """Zero-pad auxiliary alphabets up to a larger profile."""
    nu, nv, nw, nx = aux.shape
    if (nu, nv, nw) == prof.as_tuple():
        return aux
    if nu > prof.nu or nv > prof.nv or nw > prof.nw:
        raise ValueError("cannot shrink an auxiliary by embedding")
    t = np.zeros((prof.nu, prof.nv, prof.nw, nx))
    t[:nu, :nv, :nw, :] = aux.joint
    return AuxiliaryJoint(t)


@dataclass
class FactorizationReport:
    lam: float
    value_c1: float
    value_c2: float
    value_product: float
    gap: float
    tolerance: float
    holds: bool
    deterministic_links: list
    converged: bool

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "component_1_bits": self.value_c1,
            "component_2_bits": self.value_c2,
            "sum_bits": self.value_c1 + self.value_c2,
            "product_bits": self.value_product,
            "gap_bits": self.gap,
            "tolerance_bits": self.tolerance,
            "factorizes": self.holds,
            "deterministic_links": self.deterministic_links,
            "converged": self.converged,
        }


def check_factorization(
    c1: Channel,
    c2: Channel,
    lam: float,
    cfg: SearchConfig | None = None,
    tol: float = 5e-3,
    product_cfg: SearchConfig | None = None,
) -> FactorizationReport:
    """Compare the product channel's weighted sum rate with the component sum.

    The product search is seeded with the independent product of the
    component maximizers, so superadditivity of the reported values holds
    by construction; the interesting direction is whether the product
    search exceeds the sum.
    """
    cfg = cfg or SearchConfig(restarts=48, max_iters=250)
    r1 = lambda_sr_global(c1, lam, cfg)
    r2 = lambda_sr_global(c2, lam, cfg)
    pc = make_product(c1, c2)
    flat = pc.flat
    prof_p = Cardinalities.for_sum_rate(flat)
    seed = embed_auxiliary(outer_auxiliary(r1.aux, r2.aux), prof_p)
    pcfg = product_cfg or cfg.with_(restarts=max(8, cfg.restarts // 4), max_iters=cfg.max_iters)
    rp = lambda_sr_global(flat, lam, pcfg, profile=prof_p, extra_seeds=[seed.joint])
    gap = rp.value - (r1.value + r2.value)
    links = []
    for tag, ch in (("1", c1), ("2", c2)):
        for rec in ("y", "z"):
            if is_deterministic(ch, rec):
                links.append(f"component_{tag}_{rec}")
    return FactorizationReport(
        lam=lam,
        value_c1=r1.value,
        value_c2=r2.value,
        value_product=rp.value,
        gap=gap,
        tolerance=tol,
        holds=abs(gap) <= tol,
        deterministic_links=links,
        converged=r1.converged and r2.converged and rp.converged,
    )


@dataclass
class MinMaxReport:
    max_min: float
    max_min_max: float
    min_max: float
    max_pairwise_gap: float
    lam_star: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "max_min_bits": self.max_min,
            "max_min_max_bits": self.max_min_max,
            "min_max_bits": self.min_max,
            "max_pairwise_gap_bits": self.max_pairwise_gap,
            "lambda_star": self.lam_star,
            "converged": self.converged,
        }


def check_min_max_equality(
    c: Channel,
    cfg: SearchConfig | None = None,
    px_resolution: int = 12,
) -> MinMaxReport:
    """Numerically compare the three orderings of max/min for tiny channels.

    max-min: maximize min(endpoint expressions) over the auxiliary joint
    (the weighted sum rate is affine in lambda, so the inner min sits at
    an endpoint). max-min-max: sweep p(x) on a grid, inner min over
    lambda of the fixed-input maximum. min-max: golden section over
    lambda of the global maximum. All three agree in exact arithmetic.
    """
    if max(c.nx, c.ny, c.nz) > 3:
        raise ValueError("min-max check is restricted to nx, ny, nz <= 3")
    cfg = cfg or SearchConfig(restarts=12, max_iters=120)
    prof = Cardinalities.for_sum_rate(c)

    # min-max via the sum-rate driver
    mm_cfg = cfg.with_(restarts=max(8, cfg.restarts // 2))
    mm = marton_sum_rate(c, mm_cfg, profile=prof, scalar_tol=1e-3)

    # max-min over the joint: min of the two endpoint functionals
    prof_mm = Cardinalities(c.nx, c.nx, min(2 * c.nx, c.nx + 4))
    f0 = lambda_sr_functional(c, 0.0, prof_mm)
    f1 = lambda_sr_functional(c, 1.0, prof_mm)
    obj = MinOfObjectives([JointObjective(f0), JointObjective(f1)])
    block = [int(np.prod(f0.shape))]
    seeds = [
        t.ravel() for t in structured_seed_joints(c, prof_mm, _default_px_list(c))
    ]
    # mixture seeds from maximizers straddling the minimizing lambda
    lamL = max(0.0, mm.lam_star - 0.08)
    lamR = min(1.0, mm.lam_star + 0.08)
    auxL = lambda_sr_global(c, lamL, mm_cfg, profile=prof).aux
    auxR = lambda_sr_global(c, lamR, mm_cfg, profile=prof).aux
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        mix = _mixture_joint(auxL, auxR, alpha, prof_mm)
        if mix is not None:
            seeds.append(mix.ravel())
    res_mm = maximize(obj, block, cfg, seeds=seeds)
    max_min = res_mm.value

    # max-min-max over a p(x) grid with a local polish
    inner_cfg = cfg.with_(restarts=max(4, cfg.restarts // 3), max_iters=max(60, cfg.max_iters // 2))

    def min_over_lambda(px: np.ndarray) -> float:
        warm: list[np.ndarray] = []

        def g(lam: float):
            r = maximize_lambda_sr_at_input(
                c, float(lam), px, inner_cfg, profile=prof, extra_seeds=warm
            )
            warm.clear()
            warm.append(r.aux.joint)
            return r.value, r.subgradient, None

        return golden_section_min(g, bracket=(0.0, 1.0), tol=2e-3).value

    best_px, best_val = None, -np.inf
    for px in simplex_grid(c.nx, px_resolution):
        val = min_over_lambda(px)
        if val > best_val:
            best_val, best_px = val, px
    # local polish around the best grid point
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(987,)))
    for _ in range(10):
        cand = project_simplex(best_px + 0.5 / px_resolution * rng.normal(size=c.nx))
        val = min_over_lambda(cand)
        if val > best_val:
            best_val, best_px = val, cand
    max_min_max = best_val

    vals = [max_min, max_min_max, mm.value]
    gap = max(vals) - min(vals)
    return MinMaxReport(
        max_min=max_min,
        max_min_max=max_min_max,
        min_max=mm.value,
        max_pairwise_gap=gap,
        lam_star=mm.lam_star,
        converged=mm.converged and res_mm.converged,
    )


def _mixture_joint(
    a: AuxiliaryJoint, b: AuxiliaryJoint, alpha: float, prof: Cardinalities
) -> np.ndarray | None:
    """Time-share two auxiliaries by stacking their W alphabets."""
    nu = max(a.shape[0], b.shape[0])
    nv = max(a.shape[1], b.shape[1])
    nw = a.shape[2] + b.shape[2]
    nx = a.shape[3]
    if nu > prof.nu or nv > prof.nv or nw > prof.nw or b.shape[3] != nx:
        return None
    t = np.zeros((prof.nu, prof.nv, prof.nw, nx))
    t[: a.shape[0], : a.shape[1], : a.shape[2], :] += (1.0 - alpha) * a.joint
    t[: b.shape[0], : b.shape[1], a.shape[2] : a.shape[2] + b.shape[2], :] += alpha * b.joint
    return t
