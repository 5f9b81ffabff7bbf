"""Two-receiver discrete memoryless broadcast channels.

A channel is a row-stochastic tensor q[x, y, z] = q(y, z | x). The product
of two channels uses independent inputs/outputs with row-major index
flattening: (x1, x2) -> x1 * nx2 + x2, and likewise for y and z, so
component indices are recoverable by divmod.

Receiver comparisons ("more capable": I(X;A) >= I(X;B) for every input
law; "less noisy": I(U;A) >= I(U;B) for every p(u,x)) are semi-decidable
here: a violation witness is a certificate, absence of one after a grid
plus multi-start search is best-effort only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .kernel import entropy_of_array
from .objectives import InfoFunctional, JointObjective, mi_terms, scale_terms
from .search import SearchConfig, maximize, simplex_grid, simplex_grid_size

ROW_TOL = 1e-9
Receiver = Literal["y", "z"]

__all__ = [
    "Channel",
    "ProductChannel",
    "ClassReport",
    "make_product",
    "is_deterministic",
    "deterministic_map",
    "capacity",
    "is_more_capable",
    "less_noisy_verdict",
    "classify",
    "channel_to_dict",
    "channel_from_dict",
    "load_channel_file",
    "save_channel_file",
]


@dataclass(frozen=True)
class Channel:
    q: np.ndarray  # q[x, y, z]

    def __post_init__(self) -> None:
        arr = np.asarray(self.q, dtype=float)
        if arr.ndim != 3:
            raise ValueError("channel tensor must have axes (x, y, z)")
        if arr.min() < -ROW_TOL:
            raise ValueError(f"negative channel entry {arr.min()}")
        rows = arr.sum(axis=(1, 2))
        worst = float(np.abs(rows - 1.0).max())
        if worst > ROW_TOL:
            raise ValueError(f"row-stochasticity violated by {worst}")
        arr = np.where(arr < 0.0, 0.0, arr)
        object.__setattr__(self, "q", arr)

    @property
    def nx(self) -> int:
        return self.q.shape[0]

    @property
    def ny(self) -> int:
        return self.q.shape[1]

    @property
    def nz(self) -> int:
        return self.q.shape[2]

    @cached_property
    def qy(self) -> np.ndarray:
        return self.q.sum(axis=2)

    @cached_property
    def qz(self) -> np.ndarray:
        return self.q.sum(axis=1)

    def receiver_matrix(self, receiver: Receiver) -> np.ndarray:
        _check_receiver(receiver)
        return self.qy if receiver == "y" else self.qz

    def joint_with_input(self, px: np.ndarray) -> np.ndarray:
        """p(x, y, z) for the given input law."""
        px = np.asarray(px, dtype=float)
        if px.shape != (self.nx,):
            raise ValueError("px length mismatch")
        return px[:, None, None] * self.q


@dataclass(frozen=True)
class ProductChannel:
    """Two independent component channels used in parallel."""

    c1: Channel
    c2: Channel

    @cached_property
    def flat(self) -> Channel:
        q = np.einsum("abc,def->adbecf", self.c1.q, self.c2.q)
        n1, n2 = self.c1, self.c2
        return Channel(q.reshape(n1.nx * n2.nx, n1.ny * n2.ny, n1.nz * n2.nz))

    @property
    def components(self) -> tuple[Channel, Channel]:
        return (self.c1, self.c2)


def make_product(c1: Channel, c2: Channel) -> ProductChannel:
    return ProductChannel(c1, c2)


def _check_receiver(receiver: str) -> None:
    if receiver not in ("y", "z"):
        raise ValueError(f"receiver must be 'y' or 'z', got {receiver!r}")


def is_deterministic(c: Channel, receiver: Receiver) -> bool:
    """True when the receiver's marginal channel has a single unit entry per row."""
    m = c.receiver_matrix(receiver)
    return bool(m.max(axis=1).min() >= 1.0 - ROW_TOL)


def deterministic_map(c: Channel, receiver: Receiver) -> np.ndarray:
    if not is_deterministic(c, receiver):
        raise ValueError(f"receiver {receiver} is not deterministic")
    return np.argmax(c.receiver_matrix(receiver), axis=1)


def capacity(c: Channel, receiver: Receiver, tol: float = 1e-10, max_iters: int = 2000):
    """Blahut-Arimoto capacity of one receiver's marginal channel.

    Returns (capacity_bits, px). Used for structured search seeds and
    trivial sanity caps, not as part of any bound's definition.
    """
    w = c.receiver_matrix(receiver)
    nx = w.shape[0]
    px = np.full(nx, 1.0 / nx)
    logw = np.where(w > 0.0, np.log2(np.where(w > 0.0, w, 1.0)), 0.0)
    cap = 0.0
    for _ in range(max_iters):
        out = px @ w
        with np.errstate(divide="ignore"):
            logout = np.where(out > 0.0, np.log2(np.where(out > 0.0, out, 1.0)), 0.0)
        d = np.einsum("xy,xy->x", w, logw - logout[None, :])
        cap_new = float(np.log2(np.dot(px, np.exp2(d))))
        px = px * np.exp2(d - cap_new)
        px = np.maximum(px, 0.0)
        px /= px.sum()
        if abs(cap_new - cap) < tol:
            cap = cap_new
            break
        cap = cap_new
    return cap, px


def mutual_information_with_input(c: Channel, receiver: Receiver, px: np.ndarray) -> float:
    w = c.receiver_matrix(receiver)
    px = np.asarray(px, dtype=float)
    joint = px[:, None] * w
    return (
        entropy_of_array(joint.sum(axis=0))
        + entropy_of_array(px)
        - entropy_of_array(joint)
    )


@dataclass
class ComparisonVerdict:
    """Outcome of a one-sided receiver comparison search."""

    holds: bool | None  # True / False / None for unknown
    gap: float  # max of I(X;weaker) - I(X;stronger) found (or U variant)
    witness: np.ndarray | None
    converged: bool

    def to_dict(self) -> dict:
        verdict = {True: "yes", False: "no", None: "unknown"}[self.holds]
        return {
            "verdict": verdict,
            "max_gap_bits": self.gap,
            "witness": None if self.witness is None else self.witness.tolist(),
            "converged": self.converged,
        }


def _gap_objective(c: Channel, stronger: Receiver, aux: bool) -> JointObjective:
    weaker: Receiver = "z" if stronger == "y" else "y"
    if aux:
        axes, shape = "ux", (2, c.nx)
        terms = mi_terms("u", weaker) + scale_terms(mi_terms("u", stronger), -1.0)
    else:
        axes, shape = "x", (c.nx,)
        terms = mi_terms("x", weaker) + scale_terms(mi_terms("x", stronger), -1.0)
    fn = InfoFunctional(axes, shape, terms, channel=c.q, channel_axes="xyz")
    return JointObjective(fn)


def is_more_capable(
    c: Channel, stronger: Receiver, cfg: SearchConfig | None = None
) -> ComparisonVerdict:
    """Search for an input law where the weaker receiver learns more.

    Maximizes I(X;weaker) - I(X;stronger) over p(x) by coarse grid plus
    multi-start ascent. A positive gap (beyond 1e-9) refutes the relation
    with the witness input; otherwise the relation is reported to hold on
    a best-effort basis.
    """
    _check_receiver(stronger)
    cfg = cfg or SearchConfig(restarts=16, max_iters=120)
    obj = _gap_objective(c, stronger, aux=False)
    seeds = []
    res_grid = cfg.grid_resolution
    while simplex_grid_size(c.nx, res_grid) > 25000 and res_grid > 2:
        res_grid -= 2
    best_grid, best_px = -np.inf, None
    for p in simplex_grid(c.nx, res_grid):
        v = obj.functional.value(p)
        if v > best_grid:
            best_grid, best_px = v, p
    seeds.append(best_px)
    result = maximize(obj, obj.block_sizes, cfg, seeds=seeds)
    gap = max(result.value, best_grid)
    witness = result.point if result.value >= best_grid else best_px
    refuted = gap > 1e-9
    return ComparisonVerdict(
        holds=(not refuted),
        gap=float(gap),
        witness=np.asarray(witness, dtype=float),
        converged=result.converged,
    )


def less_noisy_verdict(
    c: Channel, stronger: Receiver, cfg: SearchConfig | None = None
) -> ComparisonVerdict:
    """Heuristic refutation search with a binary auxiliary.

    Maximizes I(U;weaker) - I(U;stronger) over p(u, x) with |U| = 2. A
    positive gap is a sound "no"; otherwise the verdict stays unknown
    because no finite certificate for "yes" is available here.
    """
    _check_receiver(stronger)
    cfg = cfg or SearchConfig(restarts=24, max_iters=150)
    obj = _gap_objective(c, stronger, aux=True)
    result = maximize(obj, obj.block_sizes, cfg)
    refuted = result.value > 1e-9
    return ComparisonVerdict(
        holds=(False if refuted else None),
        gap=float(result.value),
        witness=obj.to_tensor(result.point),
        converged=result.converged,
    )


@dataclass
class ClassReport:
    y_deterministic: bool
    z_deterministic: bool
    y_more_capable: ComparisonVerdict
    z_more_capable: ComparisonVerdict
    y_less_noisy: ComparisonVerdict
    z_less_noisy: ComparisonVerdict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "y_deterministic": self.y_deterministic,
            "z_deterministic": self.z_deterministic,
            "y_more_capable_than_z": self.y_more_capable.to_dict(),
            "z_more_capable_than_y": self.z_more_capable.to_dict(),
            "y_less_noisy_than_z": self.y_less_noisy.to_dict(),
            "z_less_noisy_than_y": self.z_less_noisy.to_dict(),
            "notes": self.notes,
        }


def classify(c: Channel, cfg: SearchConfig | None = None) -> ClassReport:
    """Structural report: determinism flags and receiver-order verdicts."""
    return ClassReport(
        y_deterministic=is_deterministic(c, "y"),
        z_deterministic=is_deterministic(c, "z"),
        y_more_capable=is_more_capable(c, "y", cfg),
        z_more_capable=is_more_capable(c, "z", cfg),
        y_less_noisy=less_noisy_verdict(c, "y", cfg),
        z_less_noisy=less_noisy_verdict(c, "z", cfg),
    )


def channel_to_dict(c: Channel) -> dict:
    return {"nx": c.nx, "ny": c.ny, "nz": c.nz, "q": c.q.tolist()}


def channel_from_dict(d: dict) -> Channel:
    try:
        nx, ny, nz = int(d["nx"]), int(d["ny"]), int(d["nz"])
        q = np.asarray(d["q"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel object: {exc}") from exc
    if q.shape != (nx, ny, nz):
        raise ValueError(f"q has shape {q.shape}, header says {(nx, ny, nz)}")
    return Channel(q)


def load_channel_file(path: str) -> Channel | ProductChannel:
    """Load a channel or a two-component product file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top-level JSON object expected")
    if "product" in data:
        parts = data["product"]
        if not isinstance(parts, list) or len(parts) != 2:
            raise ValueError(f"{path}: 'product' must list exactly two channels")
        return ProductChannel(channel_from_dict(parts[0]), channel_from_dict(parts[1]))
    return channel_from_dict(data)


def save_channel_file(path: str, c: Channel | ProductChannel) -> None:
    if isinstance(c, ProductChannel):
        data = {"product": [channel_to_dict(c.c1), channel_to_dict(c.c2)]}
    else:
        data = channel_to_dict(c)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
