"""Differentiable information objectives over distribution tensors.

Every maximization target in this package (lambda-sum-rate, endpoint
reformulations, UV bound branches, classification gaps, region right-hand
sides) is a weighted sum of joint entropies of marginals of

    lifted(t)(dist_axes, out_axes) = t(dist_axes) * q(out_axes | input)

where t is the searched distribution and q the fixed channel. Each such
marginal is a linear image of t, so values and exact gradients come from
one shared routine. Gradients of entropy use d/dm[-m log2 m] =
-(log2 m + log2 e); zero marginals are clipped only inside the gradient
(values keep the exact zero-skip convention of the kernel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernel import entropy_of_array

LOG2E = math.log2(math.e)
GRAD_CLIP = 1e-300

__all__ = [
    "InfoFunctional",
    "mi_terms",
    "ent_terms",
    "scale_terms",
    "merge_terms",
    "JointObjective",
    "FixedInputObjective",
    "MinOfObjectives",
]

Term = tuple[float, str]


def _canon(subset: str, order: str) -> str:
    letters = set(subset)
    unknown = letters - set(order)
    if unknown:
        raise ValueError(f"unknown axes {sorted(unknown)}")
    return "".join(a for a in order if a in letters)


def mi_terms(a: str, b: str, given: str = "", coeff: float = 1.0) -> list[Term]:
    """Entropy decomposition of coeff * I(A;B|C)."""
    if set(a) & set(b) or set(a) & set(given) or set(b) & set(given):
        raise ValueError("a, b, given must be disjoint")
    out = [(coeff, a + given), (coeff, b + given), (-coeff, a + b + given)]
    if given:
        out.append((-coeff, given))
    return out


def ent_terms(of: str, given: str = "", coeff: float = 1.0) -> list[Term]:
    """Entropy decomposition of coeff * H(OF|GIVEN)."""
    out = [(coeff, of + given)]
    if given:
        out.append((-coeff, given))
    return out


def scale_terms(terms: Sequence[Term], factor: float) -> list[Term]:
    return [(c * factor, s) for c, s in terms]


def merge_terms(terms: Sequence[Term], order: str) -> list[Term]:
    acc: dict[str, float] = {}
    for coeff, subset in terms:
        key = _canon(subset, order)
        if not key:
            continue
        acc[key] = acc.get(key, 0.0) + coeff
    return [(c, s) for s, c in acc.items() if abs(c) > 1e-14]


@dataclass
class _Compiled:
    coeff: float
    subset: str
    fwd: str
    qm: np.ndarray | None
    adj: str | None
    expand: tuple[int, ...]


class InfoFunctional:
    """Weighted entropy sum with exact gradient w.r.t. the base tensor.

    dist_axes: one letter per axis of t, input axis last (e.g. 'uvwx').
    channel: optional conditional array with axes channel_axes, first
    letter the input (shared with dist_axes), the rest output axes.
    terms: (coefficient, subset-of-letters) pairs.
    """

    def __init__(
        self,
        dist_axes: str,
        dist_shape: Sequence[int],
        terms: Sequence[Term],
        channel: np.ndarray | None = None,
        channel_axes: str = "xyz",
    ) -> None:
        if len(dist_axes) != len(dist_shape):
            raise ValueError("dist_axes and dist_shape disagree")
        self.dist_axes = dist_axes
        self.shape = tuple(int(n) for n in dist_shape)
        in_axis = channel_axes[0]
        out_axes = channel_axes[1:] if channel is not None else ""
        if channel is not None and in_axis not in dist_axes:
            raise ValueError(f"input axis '{in_axis}' not among dist axes")
        order = dist_axes + out_axes
        self.order = order
        merged = merge_terms(terms, order)
        self._q_cache: dict[str, np.ndarray] = {}
        self.terms: list[_Compiled] = []
        for coeff, subset in merged:
            s4 = "".join(a for a in dist_axes if a in subset)
            sout = "".join(a for a in out_axes if a in subset)
            if sout:
                qm = self._q_marginal(channel, channel_axes, in_axis + sout)
                fwd = f"{dist_axes},{in_axis}{sout}->{s4}{sout}"
                adj_keep = s4 if in_axis in s4 else "".join(
                    a for a in dist_axes if a in s4 + in_axis
                )
                adj = f"{in_axis}{sout},{s4}{sout}->{adj_keep}"
                expand_axes = adj_keep
            else:
                qm = None
                fwd = f"{dist_axes}->{s4}"
                adj = None
                expand_axes = s4
            expand = tuple(
                n if a in expand_axes else 1
                for a, n in zip(dist_axes, self.shape)
            )
            self.terms.append(_Compiled(coeff, subset, fwd, qm, adj, expand))

    def _q_marginal(self, channel, channel_axes, keep: str) -> np.ndarray:
        if keep in self._q_cache:
            return self._q_cache[keep]
        drop = tuple(i for i, a in enumerate(channel_axes) if a not in keep)
        qm = channel.sum(axis=drop) if drop else channel
        self._q_cache[keep] = qm
        return qm

    def value(self, t: np.ndarray) -> float:
        total = 0.0
        for term in self.terms:
            if term.qm is None:
                m = np.einsum(term.fwd, t)
            else:
                m = np.einsum(term.fwd, t, term.qm)
            total += term.coeff * entropy_of_array(m)
        return total

    def value_and_grad(self, t: np.ndarray) -> tuple[float, np.ndarray]:
        total = 0.0
        grad = np.zeros(self.shape)
        for term in self.terms:
            if term.qm is None:
                m = np.einsum(term.fwd, t)
            else:
                m = np.einsum(term.fwd, t, term.qm)
            total += term.coeff * entropy_of_array(m)
            dh = -(np.log2(np.maximum(m, GRAD_CLIP)) + LOG2E)
            if term.adj is None:
                contrib = dh
            else:
                contrib = np.einsum(term.adj, term.qm, dh)
            grad += term.coeff * contrib.reshape(term.expand)
        return total, grad


class JointObjective:
    """Flat-vector adapter: one simplex over the whole base tensor."""

    def __init__(self, functional: InfoFunctional) -> None:
        self.functional = functional
        self.shape = functional.shape
        self.size = int(np.prod(self.shape))

    @property
    def block_sizes(self) -> list[int]:
        return [self.size]

    def __call__(self, flat: np.ndarray) -> tuple[float, np.ndarray]:
        v, g = self.functional.value_and_grad(flat.reshape(self.shape))
        return v, g.ravel()

    def to_tensor(self, flat: np.ndarray) -> np.ndarray:
        return flat.reshape(self.shape).copy()

    def to_flat(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float).ravel().copy()


class FixedInputObjective:
    """Flat-vector adapter at fixed input law: one simplex per input symbol.

    The flat layout is input-major: block x holds the conditional
    p(rest | X=x) in C order. Axes of the base tensor keep the input last.
    """

    def __init__(self, functional: InfoFunctional, px: np.ndarray) -> None:
        self.functional = functional
        self.rest_shape = functional.shape[:-1]
        self.nx = functional.shape[-1]
        self.px = np.asarray(px, dtype=float)
        if self.px.shape != (self.nx,):
            raise ValueError("px length mismatch")
        self.block = int(np.prod(self.rest_shape))

    @property
    def block_sizes(self) -> list[int]:
        return [self.block] * self.nx

    def __call__(self, flat: np.ndarray) -> tuple[float, np.ndarray]:
        t = self.to_tensor(flat)
        v, g = self.functional.value_and_grad(t)
        gc = np.moveaxis(g * self.px, -1, 0)
        return v, gc.ravel()

    def to_tensor(self, flat: np.ndarray) -> np.ndarray:
        cond = flat.reshape((self.nx,) + self.rest_shape)
        return np.moveaxis(cond, 0, -1) * self.px

    def to_flat(self, t: np.ndarray) -> np.ndarray:
        """Conditional layout of a joint tensor (zero-mass inputs -> uniform)."""
        t = np.asarray(t, dtype=float)
        px = t.sum(axis=tuple(range(t.ndim - 1)))
        safe = np.where(px > 0.0, px, 1.0)
        cond = t / safe
        uniform = 1.0 / self.block
        cond = np.where(px > 0.0, cond, uniform)
        return np.moveaxis(cond, -1, 0).ravel().copy()


class MinOfObjectives:
    """Pointwise minimum of objectives; gradient follows the active branch.

    Used for max-min problems (UV bound, endpoint pair). Projected ascent
    on this objective is still a certified lower bound: every candidate is
    scored by the true minimum.
    """

    def __init__(self, parts: Sequence[Callable[[np.ndarray], tuple[float, np.ndarray]]]):
        if not parts:
            raise ValueError("need at least one objective")
        self.parts = list(parts)

    def __call__(self, flat: np.ndarray) -> tuple[float, np.ndarray]:
        best_v, best_g = None, None
        for p in self.parts:
            v, g = p(flat)
            if best_v is None or v < best_v:
                best_v, best_g = v, g
        return best_v, best_g

    def values(self, flat: np.ndarray) -> list[float]:
        return [p(flat)[0] for p in self.parts]
