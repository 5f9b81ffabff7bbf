"""Outer and inner rate regions evaluated at explicit auxiliaries.

Two families live here. The single-letter UV outer bound works on one
channel with auxiliaries p(u,v,x). The product-channel regions work on a
two-component product with independent per-component auxiliaries
p1(u1,v1,w1,x1) p2(u2,v2,w2,x2) and produce polytopes in (R0, R1, R2):

  product_outer      six inequality families with min-terms expanded
  product_inner      the achievable product region (with the -I(U;V|W) term)
  semi_deterministic capacity region form when Y1 and Z2 are deterministic
  more_capable       capacity region form when Z1 is more capable than Y1
                     and Y2 more capable than Z2

All min-terms are expanded into separate inequalities, so every
right-hand side is a smooth sum of per-component information terms; the
support search differentiates through the optimal vertex via the active
constraints' dual weights.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import Channel, ProductChannel, is_deterministic, is_more_capable
from .marton import (
    AuxiliaryJoint,
    Cardinalities,
    embed_auxiliary,
    structured_seed_joints,
)
from .objectives import (
    InfoFunctional,
    JointObjective,
    MinOfObjectives,
    ent_terms,
    mi_terms,
)
from .search import SearchConfig, maximize

__all__ = [
    "UvAuxiliary",
    "UvPoint",
    "ProductAuxiliary",
    "RateRegionPolytope",
    "evaluate_uv_point",
    "uv_sum_rate",
    "build_region",
    "region_support",
    "REGION_KINDS",
]


# ---------------------------------------------------------------- UV bound


@dataclass
class UvAuxiliary:
    """Joint law p(u, v, x) for the single-letter UV outer bound."""

    joint: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.joint, dtype=float)
        if arr.ndim != 3:
            raise ValueError("UV auxiliary must have axes (u, v, x)")
        if arr.min() < -1e-10:
            raise ValueError("negative entry in UV auxiliary")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"UV auxiliary sums to {arr.sum()}")
        self.joint = np.where(arr < 0.0, 0.0, arr)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.joint.shape


@dataclass
class UvPoint:
    r1_bound: float  # I(U;Y)
    r2_bound: float  # I(V;Z)
    sum_y_side: float  # I(U;Y) + I(X;Z|U)
    sum_z_side: float  # I(V;Z) + I(X;Y|V)

    @property
    def sum_rate(self) -> float:
        return min(self.r1_bound + self.r2_bound, self.sum_y_side, self.sum_z_side)

    def to_dict(self) -> dict:
        return {
            "r1_bound_bits": self.r1_bound,
            "r2_bound_bits": self.r2_bound,
            "sum_y_side_bits": self.sum_y_side,
            "sum_z_side_bits": self.sum_z_side,
            "sum_rate_bits": self.sum_rate,
        }


def _uv_functionals(c: Channel, nu: int, nv: int) -> dict[str, InfoFunctional]:
    shape = (nu, nv, c.nx)

    def make(terms):
        return InfoFunctional("uvx", shape, terms, channel=c.q)

    return {
        "iuy": make(mi_terms("u", "y")),
        "ivz": make(mi_terms("v", "z")),
        "sum_y": make(mi_terms("u", "y") + mi_terms("x", "z", "u")),
        "sum_z": make(mi_terms("v", "z") + mi_terms("x", "y", "v")),
    }


def evaluate_uv_point(c: Channel, aux: UvAuxiliary) -> UvPoint:
    """Exact UV-bound coordinates at one auxiliary."""
    nu, nv, nx = aux.shape
    if nx != c.nx:
        raise ValueError("UV auxiliary input alphabet mismatch")
    fns = _uv_functionals(c, nu, nv)
    return UvPoint(
        r1_bound=fns["iuy"].value(aux.joint),
        r2_bound=fns["ivz"].value(aux.joint),
        sum_y_side=fns["sum_y"].value(aux.joint),
        sum_z_side=fns["sum_z"].value(aux.joint),
    )


@dataclass
class UvSumRate:
    value: float
    aux: UvAuxiliary
    point: UvPoint
    converged: bool
    budget_exhausted: bool


def uv_sum_rate(
    c: Channel,
    cfg: SearchConfig | None = None,
    nu: int | None = None,
    nv: int | None = None,
    extra_seeds: Sequence[np.ndarray] = (),
) -> UvSumRate:
    """Maximize the UV sum rate min of its three inequality combinations.

    Auxiliary alphabets default to |U| = |V| = nx + 1. The objective is a
    min of smooth branches; ascent follows the active branch and every
    candidate is scored exactly, so the result is a certified lower bound.
    """
    cfg = cfg or SearchConfig(restarts=32, max_iters=200)
    nu = nu or c.nx + 1
    nv = nv or c.nx + 1
    fns = _uv_functionals(c, nu, nv)
    shape = (nu, nv, c.nx)
    size = int(np.prod(shape))
    f_b0 = InfoFunctional(
        "uvx", shape, mi_terms("u", "y") + mi_terms("v", "z"), channel=c.q
    )
    branch_objs = [JointObjective(f_b0), JointObjective(fns["sum_y"]), JointObjective(fns["sum_z"])]
    obj = MinOfObjectives(branch_objs)

    seeds = []
    uniform = np.full(c.nx, 1.0 / c.nx)
    ident = np.arange(c.nx)
    for u_map, v_map in ((ident, ident), (ident, None), (None, ident)):
        t = np.zeros(shape)
        for x in range(c.nx):
            u = 0 if u_map is None else int(u_map[x])
            v = 0 if v_map is None else int(v_map[x])
            t[u, v, x] = uniform[x]
        seeds.append(t.ravel())
    for s in extra_seeds:
        if isinstance(s, UvAuxiliary):
            s = s.joint
        s = np.asarray(s, dtype=float)
        if s.shape != shape:
            # allow smaller auxiliary alphabets, zero-padded
            padded = np.zeros(shape)
            padded[: s.shape[0], : s.shape[1], :] = s
            s = padded
        seeds.append(s.ravel())

    res = maximize(obj, [size], cfg, seeds=seeds)
    aux = UvAuxiliary(res.point.reshape(shape))
    return UvSumRate(
        value=res.value,
        aux=aux,
        point=evaluate_uv_point(c, aux),
        converged=res.converged,
        budget_exhausted=res.budget_exhausted,
    )


# ------------------------------------------------------- product regions


@dataclass
class ProductAuxiliary:
    """Independent per-component auxiliaries for a product channel."""

    a1: AuxiliaryJoint
    a2: AuxiliaryJoint


# named per-component information terms used by region right-hand sides
_TERM_DEFS = {
    "ay": lambda: mi_terms("w", "y"),
    "az": lambda: mi_terms("w", "z"),
    "uy": lambda: mi_terms("u", "y", "w"),
    "vz": lambda: mi_terms("v", "z", "w"),
    "su": lambda: mi_terms("u", "y", "w") + mi_terms("x", "z", "uw"),
    "sv": lambda: mi_terms("v", "z", "w") + mi_terms("x", "y", "vw"),
    "hyw": lambda: ent_terms("y", "w"),
    "hzw": lambda: ent_terms("z", "w"),
    "svh": lambda: mi_terms("v", "z", "w") + ent_terms("y", "vw"),
    "suh": lambda: mi_terms("u", "y", "w") + ent_terms("z", "uw"),
    "xy": lambda: mi_terms("x", "y", "w"),
    "xz": lambda: mi_terms("x", "z", "w"),
    "iuv": lambda: mi_terms("u", "v", "w"),
    "niuv": lambda: [(-c, s) for c, s in mi_terms("u", "v", "w")],
}

Row = tuple[tuple[int, int, int], tuple[str, ...], tuple[str, ...]]


def _region_rows(kind: str, mirrored: bool) -> list[Row]:
    r0 = [((1, 0, 0), ("ay",), ("ay",)), ((1, 0, 0), ("az",), ("az",))]
    if kind == "product_outer":
        rows = list(r0)
        for base in ("ay", "az"):
            rows.append(((1, 1, 0), (base, "uy"), (base, "uy")))
            rows.append(((1, 0, 1), (base, "vz"), (base, "vz")))
        if not mirrored:
            patterns = [("su", "su"), ("sv", "su"), ("sv", "sv")]
        else:
            patterns = [("su", "sv"), ("sv", "sv"), ("su", "su")]
        for p1, p2 in patterns:
            for base in ("ay", "az"):
                rows.append(((1, 1, 1), (base, p1), (base, p2)))
        return _dedupe(rows)
    if kind == "product_inner":
        rows = list(r0)
        rows.append(((1, 1, 0), ("ay", "uy"), ("ay", "uy")))
        rows.append(((1, 0, 1), ("az", "vz"), ("az", "vz")))
        for base in ("ay", "az"):
            rows.append(((1, 1, 1), (base, "uy", "vz", "niuv"), (base, "uy", "vz", "niuv")))
        return rows
    if kind == "semi_deterministic":
        rows = list(r0)
        rows.append(((1, 1, 0), ("ay", "hyw"), ("ay", "uy")))
        rows.append(((1, 0, 1), ("az", "vz"), ("az", "hzw")))
        for base in ("ay", "az"):
            rows.append(((1, 1, 1), (base, "svh"), (base, "suh")))
        return rows
    if kind == "more_capable":
        rows = list(r0)
        for base in ("ay", "az"):
            rows.append(((1, 1, 0), (base, "uy"), (base, "xy")))
            rows.append(((1, 0, 1), (base, "xz"), (base, "vz")))
        for p1, p2 in (("su", "xy"), ("xz", "xy"), ("xz", "sv")):
            for base in ("ay", "az"):
                rows.append(((1, 1, 1), (base, p1), (base, p2)))
        return _dedupe(rows)
    if kind == "more_capable_deterministic":
        # mixed class: Z1 more capable than Y1, Y2 deterministic
        rows = list(r0)
        for base in ("ay", "az"):
            rows.append(((1, 1, 0), (base, "uy"), (base, "hyw")))
            rows.append(((1, 0, 1), (base, "xz"), (base, "vz")))
            rows.append(((1, 1, 1), (base, "xz"), (base, "svh")))
        return rows
    raise ValueError(f"unknown region kind {kind!r}")


def _dedupe(rows: list[Row]) -> list[Row]:
    seen, out = set(), []
    for row in rows:
        key = (row[0], tuple(sorted(row[1])), tuple(sorted(row[2])))
        if key not in seen:
            seen.add(key)
            out.append(row)
    return out


REGION_KINDS = (
    "product_outer",
    "product_inner",
    "semi_deterministic",
    "more_capable",
    "more_capable_deterministic",
)


def default_region_profiles(
    pc: ProductChannel, kind: str
) -> tuple[Cardinalities, Cardinalities]:
    """Auxiliary alphabet profiles per kind.

    The specialized regions use reduced auxiliaries: the semi-deterministic
    form needs only (W1, V1) and (W2, U2); the more-capable form only
    (W1, U1) and (W2, V2). Unused alphabets collapse to size one.
    """
    p1 = Cardinalities.for_region(pc.c1)
    p2 = Cardinalities.for_region(pc.c2)
    if kind == "semi_deterministic":
        p1 = Cardinalities(1, p1.nv, p1.nw)
        p2 = Cardinalities(p2.nu, 1, p2.nw)
    elif kind == "more_capable":
        p1 = Cardinalities(p1.nu, 1, p1.nw)
        p2 = Cardinalities(1, p2.nv, p2.nw)
    elif kind == "more_capable_deterministic":
        p1 = Cardinalities(p1.nu, 1, p1.nw)
        p2 = Cardinalities(1, p2.nv, p2.nw)
    return p1, p2


def _class_notes(pc: ProductChannel, kind: str, verify_classes: bool) -> list[str]:
    """Class-membership diagnostics; mismatches warn, never raise."""
    notes: list[str] = []
    if kind == "semi_deterministic":
        if not (is_deterministic(pc.c1, "y") and is_deterministic(pc.c2, "z")):
            notes.append(
                "warning: region form assumes deterministic Y1 and Z2; "
                "channel does not match, values are not a capacity region"
            )
    elif kind == "more_capable" and verify_classes:
        v1 = is_more_capable(pc.c1, "z")
        v2 = is_more_capable(pc.c2, "y")
        if not (v1.holds and v2.holds):
            notes.append(
                "warning: region form assumes Z1 more capable than Y1 and "
                "Y2 more capable than Z2; search-based check failed "
                f"(gaps {v1.gap:.3g}, {v2.gap:.3g})"
            )
    elif kind == "more_capable_deterministic":
        if not is_deterministic(pc.c2, "y"):
            notes.append(
                "warning: region form assumes deterministic Y2; "
                "channel does not match"
            )
        if verify_classes:
            v1 = is_more_capable(pc.c1, "z")
            if not v1.holds:
                notes.append(
                    "warning: region form assumes Z1 more capable than Y1; "
                    f"search-based check failed (gap {v1.gap:.3g})"
                )
    return notes


@dataclass
class RateRegionPolytope:
    """Polytope {R >= 0, a . R <= rhs} in (R0, R1, R2) with provenance."""

    inequalities: list[tuple[tuple[int, int, int], float]]
    tag: str
    notes: list = field(default_factory=list)

    def to_json_list(self) -> list[dict]:
        return [
            {"a": [float(x) for x in a], "rhs": float(r)}
            for a, r in self.inequalities
        ]

    def vertices(self, fix_r0: float | None = None) -> np.ndarray:
        ineqs = list(self.inequalities)
        if fix_r0 is not None:
            ineqs.append(((1, 0, 0), float(fix_r0)))
        return _polytope_vertices(ineqs)

    def support(self, weights: Sequence[float], fix_r0: float | None = None) -> tuple[float, np.ndarray]:
        verts = self.vertices(fix_r0=fix_r0)
        w = np.asarray(weights, dtype=float)
        scores = verts @ w
        i = int(np.argmax(scores))
        return float(scores[i]), verts[i]

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        r = np.asarray(point, dtype=float)
        if (r < -tol).any():
            return False
        for a, rhs in self.inequalities:
            if float(np.dot(a, r)) > rhs + tol:
                return False
        return True


def _polytope_vertices(ineqs: list[tuple[tuple[int, int, int], float]]) -> np.ndarray:
    mats, rhs = [], []
    for a, r in ineqs:
        mats.append([float(x) for x in a])
        rhs.append(float(r))
    for j in range(3):
        row = [0.0, 0.0, 0.0]
        row[j] = -1.0
        mats.append(row)
        rhs.append(0.0)
    A = np.asarray(mats)
    b = np.asarray(rhs)
    verts = []
    for combo in itertools.combinations(range(len(b)), 3):
        sub = A[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        v = np.linalg.solve(sub, b[list(combo)])
        if (A @ v <= b + 1e-9).all():
            verts.append(v)
    if not verts:
        return np.zeros((1, 3))
    return np.unique(np.round(np.asarray(verts), 12), axis=0)


def build_region(
    pc: ProductChannel,
    aux: ProductAuxiliary,
    kind: str,
    mirrored: bool = False,
    verify_classes: bool = False,
) -> RateRegionPolytope:
    """Instantiate a region's inequalities at one product auxiliary."""
    notes = _class_notes(pc, kind, verify_classes)
    rows = _region_rows(kind, mirrored)
    vals1 = _term_values(pc.c1, aux.a1, {n for _, t1, _ in rows for n in t1})
    vals2 = _term_values(pc.c2, aux.a2, {n for _, _, t2 in rows for n in t2})
    ineqs = []
    for a, t1, t2 in rows:
        rhs = sum(vals1[n] for n in t1) + sum(vals2[n] for n in t2)
        ineqs.append((a, float(rhs)))
    tag = kind + ("_mirror" if (kind == "product_outer" and mirrored) else "")
    return RateRegionPolytope(inequalities=ineqs, tag=tag, notes=notes)


def _term_values(c: Channel, aux: AuxiliaryJoint, names) -> dict[str, float]:
    nu, nv, nw, nx = aux.shape
    if nx != c.nx:
        raise ValueError("component auxiliary input alphabet mismatch")
    out = {}
    for name in names:
        fn = InfoFunctional("uvwx", aux.shape, _TERM_DEFS[name](), channel=c.q)
        out[name] = fn.value(aux.joint)
    return out


class _SupportObjective:
    """Support function of a region in a fixed direction, as a function of
    the two component auxiliaries, with gradients via active-vertex duals."""

    def __init__(
        self,
        pc: ProductChannel,
        kind: str,
        mirrored: bool,
        weights: Sequence[float],
        prof1: Cardinalities,
        prof2: Cardinalities,
        fix_r0: float | None = None,
    ) -> None:
        self.rows = _region_rows(kind, mirrored)
        self.w = np.asarray(weights, dtype=float)
        self.shape1 = (prof1.nu, prof1.nv, prof1.nw, pc.c1.nx)
        self.shape2 = (prof2.nu, prof2.nv, prof2.nw, pc.c2.nx)
        self.size1 = int(np.prod(self.shape1))
        self.size2 = int(np.prod(self.shape2))
        self.f1 = [
            InfoFunctional(
                "uvwx",
                self.shape1,
                [t for n in t1 for t in _TERM_DEFS[n]()],
                channel=pc.c1.q,
            )
            for _, t1, _ in self.rows
        ]
        self.f2 = [
            InfoFunctional(
                "uvwx",
                self.shape2,
                [t for n in t2 for t in _TERM_DEFS[n]()],
                channel=pc.c2.q,
            )
            for _, _, t2 in self.rows
        ]
        n_rows = len(self.rows)
        A = [list(map(float, a)) for a, _, _ in self.rows]
        extra_rhs = []
        if fix_r0 is not None:
            A.append([1.0, 0.0, 0.0])
            extra_rhs.append(float(fix_r0))
        for j in range(3):
            row = [0.0, 0.0, 0.0]
            row[j] = -1.0
            A.append(row)
            extra_rhs.append(0.0)
        self.A = np.asarray(A)
        self.n_rows = n_rows
        self.extra_rhs = np.asarray(extra_rhs)
        combos, inv = [], []
        for combo in itertools.combinations(range(self.A.shape[0]), 3):
            sub = self.A[list(combo)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            combos.append(combo)
            inv.append(np.linalg.inv(sub))
        self.combos = np.asarray(combos)
        self.inv = np.asarray(inv)

    @property
    def block_sizes(self) -> list[int]:
        return [self.size1, self.size2]

    def split(self, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (
            flat[: self.size1].reshape(self.shape1),
            flat[self.size1 :].reshape(self.shape2),
        )

    def rhs_and_parts(self, t1, t2, with_grad: bool):
        rhs = np.empty(self.n_rows)
        grads1, grads2 = [], []
        for i in range(self.n_rows):
            if with_grad:
                v1, g1 = self.f1[i].value_and_grad(t1)
                v2, g2 = self.f2[i].value_and_grad(t2)
                grads1.append(g1)
                grads2.append(g2)
            else:
                v1 = self.f1[i].value(t1)
                v2 = self.f2[i].value(t2)
            rhs[i] = v1 + v2
        return rhs, grads1, grads2

    def __call__(self, flat: np.ndarray) -> tuple[float, np.ndarray]:
        t1, t2 = self.split(flat)
        rhs, grads1, grads2 = self.rhs_and_parts(t1, t2, with_grad=True)
        b = np.concatenate([rhs, self.extra_rhs])
        verts = np.einsum("kij,kj->ki", self.inv, b[self.combos])
        feas = (verts @ self.A.T <= b[None, :] + 1e-9).all(axis=1)
        scores = verts @ self.w
        scores[~feas] = -np.inf
        k = int(np.argmax(scores))
        value = float(scores[k])
        if not np.isfinite(value):
            # empty numeric polytope: fall back to the origin
            value = 0.0
            g = np.zeros(self.size1 + self.size2)
            return value, g
        mu = self.inv[k].T @ self.w
        g1 = np.zeros(self.shape1)
        g2 = np.zeros(self.shape2)
        for slot, row_idx in enumerate(self.combos[k]):
            if row_idx < self.n_rows and abs(mu[slot]) > 1e-14:
                g1 += mu[slot] * grads1[row_idx]
                g2 += mu[slot] * grads2[row_idx]
        return value, np.concatenate([g1.ravel(), g2.ravel()])

    def value_only(self, flat: np.ndarray) -> float:
        t1, t2 = self.split(flat)
        rhs, _, _ = self.rhs_and_parts(t1, t2, with_grad=False)
        b = np.concatenate([rhs, self.extra_rhs])
        verts = np.einsum("kij,kj->ki", self.inv, b[self.combos])
        feas = (verts @ self.A.T <= b[None, :] + 1e-9).all(axis=1)
        scores = verts @ self.w
        scores[~feas] = -np.inf
        v = float(scores.max())
        return v if np.isfinite(v) else 0.0


def _fit_seed(aux: AuxiliaryJoint, prof: Cardinalities) -> np.ndarray:
    """Adapt a seed auxiliary to a profile: axes the profile collapses to
    size one are marginalized out, the rest zero-padded."""
    t = aux.joint
    if prof.nu == 1 and t.shape[0] > 1:
        t = t.sum(axis=0, keepdims=True)
    if prof.nv == 1 and t.shape[1] > 1:
        t = t.sum(axis=1, keepdims=True)
    if prof.nw == 1 and t.shape[2] > 1:
        t = t.sum(axis=2, keepdims=True)
    return embed_auxiliary(AuxiliaryJoint(t), prof).joint


@dataclass
class SupportResult:
    value: float
    weights: tuple[float, float, float]
    vertex: np.ndarray
    aux: ProductAuxiliary
    region: RateRegionPolytope
    converged: bool
    budget_exhausted: bool


def region_support(
    pc: ProductChannel,
    kind: str,
    weights: Sequence[float],
    cfg: SearchConfig | None = None,
    mirrored: bool = False,
    profiles: tuple[Cardinalities, Cardinalities] | None = None,
    extra_seeds: Sequence[ProductAuxiliary] = (),
    fix_r0: float | None = None,
) -> SupportResult:
    """Maximize a region's support function over product auxiliaries.

    Certified lower bound of the true support: every candidate auxiliary
    pair is scored by exact vertex enumeration of its polytope.
    """
    cfg = cfg or SearchConfig(restarts=32, max_iters=150)
    if profiles is None:
        profiles = default_region_profiles(pc, kind)
    prof1, prof2 = profiles
    obj = _SupportObjective(pc, kind, mirrored, weights, prof1, prof2, fix_r0=fix_r0)

    seeds = []
    px1 = [np.full(pc.c1.nx, 1.0 / pc.c1.nx)]
    px2 = [np.full(pc.c2.nx, 1.0 / pc.c2.nx)]
    s1 = structured_seed_joints(pc.c1, prof1, px1)
    s2 = structured_seed_joints(pc.c2, prof2, px2)
    for t1 in s1[:6]:
        for t2 in s2[:6]:
            seeds.append(np.concatenate([t1.ravel(), t2.ravel()]))
    for pa in extra_seeds:
        e1 = _fit_seed(pa.a1, prof1)
        e2 = _fit_seed(pa.a2, prof2)
        seeds.append(np.concatenate([e1.ravel(), e2.ravel()]))

    res = maximize(obj, obj.block_sizes, cfg, seeds=seeds)
    t1, t2 = obj.split(res.point)
    aux = ProductAuxiliary(AuxiliaryJoint(t1), AuxiliaryJoint(t2))
    region = build_region(pc, aux, kind, mirrored=mirrored)
    value, vertex = region.support(weights, fix_r0=fix_r0)
    value = max(value, res.value)
    return SupportResult(
        value=value,
        weights=tuple(float(x) for x in weights),
        vertex=vertex,
        aux=aux,
        region=region,
        converged=res.converged,
        budget_exhausted=res.budget_exhausted,
    )
