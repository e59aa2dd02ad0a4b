"""Signatures, multi-indices and jet coordinates for paths R^{r|s} -> M."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .graded import DT, G, T, X, Gen, GradedPoly, ParityError, substitute


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Parameter space R^{r|s} together with the fiber coordinates of M.

    Parameters are numbered 1..r (even) then r+1..r+s (odd).  ``fiber`` holds
    ``(name, parity)`` per coordinate x^a, a = 1..len(fiber); coordinates
    sharing a name form a family numbered by occurrence.
    """

    r: int
    s: int
    fiber: tuple

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise SignatureError("r and s must be non-negative")
        if not self.fiber:
            raise SignatureError("fiber must be nonempty")
        fib = tuple((str(n), int(p)) for n, p in self.fiber)
        if any(p not in (0, 1) for _, p in fib):
            raise SignatureError("fiber parities must be 0 or 1")
        object.__setattr__(self, "fiber", fib)

    @classmethod
    def simple(cls, r: int, s: int = 0, parities: Sequence[int] = (0,), name: str = "x") -> "Signature":
        return cls(r, s, tuple((name, p) for p in parities))

    @property
    def n_params(self) -> int:
        return self.r + self.s

    @property
    def n_fiber(self) -> int:
        return len(self.fiber)

    @property
    def params(self) -> range:
        return range(1, self.r + self.s + 1)

    def index_parity(self, i: int) -> int:
        if not 1 <= i <= self.r + self.s:
            raise SignatureError(f"parameter index {i} out of range for {self.r}|{self.s}")
        return 0 if i <= self.r else 1

    def fiber_parity(self, a: int) -> int:
        if not 1 <= a <= len(self.fiber):
            raise SignatureError(f"fiber index {a} out of range")
        return self.fiber[a - 1][1]

    def multi_parity(self, sigma: Sequence[int]) -> int:
        return sum(self.index_parity(i) for i in sigma) & 1

    # canonical multi-indices -------------------------------------------
    def sort_multi(self, indices: Sequence[int]) -> "MultiIndex":
        """Sort a multi-index; the sign is the Koszul sign of the odd indices.

        Returns sign 0 when an odd index repeats (the coordinate vanishes).
        """
        odd = [i for i in indices if self.index_parity(i)]
        if len(set(odd)) < len(odd):
            return MultiIndex((), 0)
        inv = sum(1 for p in range(len(odd)) for q in range(p + 1, len(odd)) if odd[q] < odd[p])
        return MultiIndex(tuple(sorted(indices)), -1 if inv & 1 else 1)

    # generators ----------------------------------------------------------
    def t_gen(self, i: int) -> Gen:
        return Gen(T, i, (), self.index_parity(i))

    def dt_gen(self, i: int) -> Gen:
        return Gen(DT, i, (), self.index_parity(i) ^ 1)

    def x_gen(self, a: int, sigma: Sequence[int] = ()) -> Gen:
        """Generator for an already canonical multi-index."""
        return Gen(X, a, tuple(sigma), (self.fiber_parity(a) + self.multi_parity(sigma)) & 1)

    def gamma_gen(self, a: int, sigma: Sequence[int] = ()) -> Gen:
        return Gen(G, a, tuple(sigma), (self.fiber_parity(a) + self.multi_parity(sigma) + 1) & 1)

    def x(self, a: int, *indices: int) -> GradedPoly:
        """The coordinate x^a_{indices} as a polynomial (signed, possibly zero)."""
        mi = self.sort_multi(indices)
        if not mi.sign:
            return GradedPoly()
        return GradedPoly.gen(self.x_gen(a, mi.indices), mi.sign)

    def gamma(self, a: int, *indices: int) -> GradedPoly:
        mi = self.sort_multi(indices)
        if not mi.sign:
            return GradedPoly()
        return GradedPoly.gen(self.gamma_gen(a, mi.indices), mi.sign)

    def t(self, i: int) -> GradedPoly:
        return GradedPoly.gen(self.t_gen(i))

    def dt(self, i: int) -> GradedPoly:
        return GradedPoly.gen(self.dt_gen(i))

    def top_form(self) -> GradedPoly:
        """dt^1 ... dt^r (the coordinate volume of the even parameters)."""
        out = GradedPoly.const(1)
        for i in range(1, self.r + 1):
            out = out * self.dt(i)
        return out

    def prepend(self, g: Gen, i: int):
        """``(sign, generator)`` for the coordinate with index ``i`` prepended.

        Works for ``x`` and ``G`` generators; returns ``None`` if the result
        vanishes.
        """
        pi = self.index_parity(i)
        if pi and i in g.sigma:
            return None
        sign = 1
        if pi:
            passed = sum(1 for j in g.sigma if j < i and self.index_parity(j))
            if passed & 1:
                sign = -1
        sigma = tuple(sorted(g.sigma + (i,)))
        return sign, Gen(g.kind, g.index, sigma, g.parity ^ pi)

    def check_gen(self, g: Gen) -> None:
        """Raise if ``g`` is not a valid generator for this signature."""
        if g.kind == T:
            ok = g == self.t_gen(g.index)
        elif g.kind == DT:
            ok = g == self.dt_gen(g.index)
        elif g.kind in (X, G):
            if list(g.sigma) != sorted(g.sigma):
                raise SignatureError(f"{g}: multi-index not canonical")
            if self.sort_multi(g.sigma).sign == 0:
                raise SignatureError(f"{g}: repeated odd index")
            ok = g == (self.x_gen if g.kind == X else self.gamma_gen)(g.index, g.sigma)
        else:
            ok = False
        if not ok:
            raise ParityError(f"generator {g} inconsistent with signature {self.r}|{self.s}")

    # signature extension used by the variational differential -----------
    def appended(self) -> "Signature":
        return Signature(self.r + 1, self.s, self.fiber)

    def shift_odd(self, p: GradedPoly) -> GradedPoly:
        """Re-index odd parameters r+1.. to r+2.. for the appended signature."""
        if self.s == 0 or not p:
            return p
        r = self.r

        def sh(i):
            return i + 1 if i > r else i

        def image(g: Gen):
            if g.kind in (T, DT):
                if g.index <= r:
                    return None
                return GradedPoly.gen(g._replace(index=g.index + 1))
            if g.kind in (X, G):
                if not g.sigma or g.sigma[-1] <= r:
                    return None
                return GradedPoly.gen(g._replace(sigma=tuple(sh(i) for i in g.sigma)))
            return None

        return substitute(p, image)


class MultiIndex(NamedTuple):
    indices: tuple
    sign: int

    @property
    def order(self) -> int:
        return len(self.indices)


class JetCoord(NamedTuple):
    """Fiber index plus canonical multi-index."""

    a: int
    sigma: tuple = ()

    @property
    def order(self) -> int:
        return len(self.sigma)

    def gen(self, sig: Signature) -> Gen:
        return sig.x_gen(self.a, self.sigma)

    def parity(self, sig: Signature) -> int:
        return (sig.fiber_parity(self.a) + sig.multi_parity(self.sigma)) & 1

    def name(self) -> str:
        return f"x^{self.a}_({' '.join(map(str, self.sigma))})"

    def to_json(self) -> dict:
        return {"fiber": self.a, "multi": list(self.sigma)}


def prepend_index(c: JetCoord, i: int, sig: Signature):
    """Canonical coordinate for the multi-index ``i sigma``.

    Returns ``(JetCoord, sign)``, or ``None`` when the coordinate is zero.
    """
    r = sig.prepend(c.gen(sig), i)
    if r is None:
        return None
    sign, g = r
    return JetCoord(c.a, g.sigma), sign


def multi_indices(sig: Signature, order: int):
    """Canonical multi-indices of exactly ``order``: multisets of even
    parameters times subsets of odd ones."""
    evens = range(1, sig.r + 1)
    odds = range(sig.r + 1, sig.r + sig.s + 1)
    out = []
    for k_odd in range(0, min(order, sig.s) + 1):
        for od in itertools.combinations(odds, k_odd):
            for ev in itertools.combinations_with_replacement(evens, order - k_odd):
                out.append(ev + od)
    out.sort()
    return out


def enumerate_coords(sig: Signature, max_order: int) -> list:
    """All canonical jet coordinates of order <= max_order.

    Ordered by (order, fiber index, multi-index), so truncations are prefixes.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    out = []
    for k in range(max_order + 1):
        for sigma in multi_indices(sig, k):
            for a in range(1, sig.n_fiber + 1):
                out.append(JetCoord(a, sigma))
    out.sort(key=lambda c: (c.order, c.a, c.sigma))
    return out


def count_coords(sig: Signature, max_order: int) -> int:
    """Closed-form count: sum over k of sum_j C(s, j) * C(r + k - j - 1, k - j)."""
    from math import comb

    total = 0
    for k in range(max_order + 1):
        for j in range(0, min(k, sig.s) + 1):
            e = k - j
            total += comb(sig.s, j) * (comb(sig.r + e - 1, e) if sig.r else (1 if e == 0 else 0))
    return total * sig.n_fiber
