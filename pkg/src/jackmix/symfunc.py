"""Homogeneous symmetric functions over the rationals in the m, p, e and h bases.

Every conversion is routed through the power sums.  The monomial side uses
the triangular p -> m transition (counting assignments of parts to rows);
the e and h sides use Newton's identities, which keeps everything exact and
avoids any matrix inversion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .partitions import Partition, enumerate_partitions, format_partition, parse_partition, z_stat

__all__ = [
    "BASES",
    "SymExpansion",
    "convert",
    "multiply",
    "theta_inner",
    "p_to_m_coeff",
    "to_json",
    "from_json",
    "set_degree_cap",
    "get_degree_cap",
]

BASES = ("m", "p", "e", "h")
_MULTIPLICATIVE = ("p", "e", "h")
_DEGREE_CAP = 40


def set_degree_cap(cap: int) -> None:
    global _DEGREE_CAP
    if cap < 1:
        raise ValueError("degree cap must be positive")
    _DEGREE_CAP = int(cap)


def get_degree_cap() -> int:
    return _DEGREE_CAP


def _check_degree(n: int) -> None:
    if n > _DEGREE_CAP:
        raise ValueError(f"degree {n} exceeds the exact-mode cap {_DEGREE_CAP}")


def _canonical(coeffs: Mapping) -> dict:
    # descending lex, dropping zeros
    out = {}
    for lam in sorted(coeffs, reverse=True):
        c = Fraction(coeffs[lam])
        if c:
            out[Partition(lam)] = c
    return out


@dataclass(frozen=True)
class SymExpansion:
    """Sparse expansion sum_lam coeffs[lam] * b_lam in basis ``basis``."""

    basis: str
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        clean = _canonical(self.coeffs)
        for lam in clean:
            if sum(lam) != self.degree:
                raise ValueError(f"{format_partition(lam)} is not a partition of {self.degree}")
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def single(cls, basis: str, lam, coeff=1) -> "SymExpansion":
        lam = Partition(lam)
        return cls(basis, sum(lam), {lam: Fraction(coeff)})

    def __getitem__(self, lam) -> Fraction:
        return self.coeffs.get(Partition(lam), Fraction(0))

    def __add__(self, other: "SymExpansion") -> "SymExpansion":
        _same_space(self, other)
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            out[lam] = out.get(lam, 0) + c
        return SymExpansion(self.basis, self.degree, out)

    def __sub__(self, other: "SymExpansion") -> "SymExpansion":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s) -> "SymExpansion":
        s = Fraction(s)
        return SymExpansion(self.basis, self.degree, {k: v * s for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, SymExpansion):
            return NotImplemented
        return (self.basis, self.degree, self.coeffs) == (other.basis, other.degree, other.coeffs)

    def __hash__(self):
        return hash((self.basis, self.degree, tuple(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs


def _same_space(f: SymExpansion, g: SymExpansion) -> None:
    if f.basis != g.basis:
        raise ValueError(f"basis mismatch: {f.basis} vs {g.basis}")
    if f.degree != g.degree:
        raise ValueError(f"degree mismatch: {f.degree} vs {g.degree}")


# ---------------------------------------------------------------- p <-> m


@lru_cache(maxsize=None)
def p_to_m_coeff(rho: Partition, lam: Partition) -> int:
    """Coefficient of m_lam in p_rho: number of maps parts(rho) -> rows(lam) with row sums lam."""
    if sum(rho) != sum(lam):
        return 0
    target = tuple(lam)

    @lru_cache(maxsize=None)
    def count(i: int, filled: tuple) -> int:
        if i == len(rho):
            return int(filled == target)
        r = rho[i]
        total = 0
        for j, cap in enumerate(target):
            if filled[j] + r <= cap:
                nxt = filled[:j] + (filled[j] + r,) + filled[j + 1 :]
                total += count(i + 1, nxt)
        return total

    return count(0, (0,) * len(target))


def _p_to_m(f: SymExpansion) -> SymExpansion:
    out: dict = {}
    lams = enumerate_partitions(f.degree)
    for rho, a in f.coeffs.items():
        for lam in lams:
            if lam < rho:
                break  # only lam dominating rho (hence lex >= rho) can appear
            k = p_to_m_coeff(rho, lam)
            if k:
                out[lam] = out.get(lam, 0) + a * k
    return SymExpansion("m", f.degree, out)


def _m_to_p(f: SymExpansion) -> SymExpansion:
    # peel off the lex-smallest monomial each round; p_lam has m_lam with
    # coefficient prod m_i! and otherwise only lex-larger monomials
    rest = dict(f.coeffs)
    out: dict = {}
    lams = enumerate_partitions(f.degree)
    while rest:
        lam = min(rest)
        a = rest.pop(lam)
        lead = p_to_m_coeff(lam, lam)
        coef = a / lead
        out[lam] = coef
        for mu in lams:
            if mu <= lam:
                break
            k = p_to_m_coeff(lam, mu)
            if k:
                v = rest.get(mu, 0) - coef * k
                if v:
                    rest[mu] = v
                else:
                    rest.pop(mu, None)
    return SymExpansion("p", f.degree, out)


# ---------------------------------------------------------- p <-> e, h


def _mul_dicts(a: dict, b: dict) -> dict:
    out: dict = {}
    for la, ca in a.items():
        for lb, cb in b.items():
            key = Partition(sorted(la + lb, reverse=True))
            out[key] = out.get(key, 0) + ca * cb
    return out


@lru_cache(maxsize=None)
def _e_r_in_p(r: int) -> dict:
    # e_r = sum_rho eps_rho p_rho / z_rho
    return {rho: Fraction((-1) ** (r - len(rho)), z_stat(rho)) for rho in enumerate_partitions(r)}


@lru_cache(maxsize=None)
def _h_r_in_p(r: int) -> dict:
    return {rho: Fraction(1, z_stat(rho)) for rho in enumerate_partitions(r)}


@lru_cache(maxsize=None)
def _p_r_in(basis: str, r: int) -> dict:
    """p_r in the e or h basis via Newton's identities."""
    if basis == "e":
        # p_r = (-1)^(r-1) r e_r + sum_{i=1}^{r-1} (-1)^(i-1) e_i p_{r-i}
        out = {Partition((r,)): Fraction((-1) ** (r - 1) * r)}
        sign = lambda i: (-1) ** (i - 1)
    else:
        # p_r = r h_r - sum_{i=1}^{r-1} h_i p_{r-i}
        out = {Partition((r,)): Fraction(r)}
        sign = lambda i: -1
    for i in range(1, r):
        prod = _mul_dicts({Partition((i,)): Fraction(sign(i))}, _p_r_in(basis, r - i))
        for k, v in prod.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _product_expand(f: SymExpansion, single) -> dict:
    out: dict = {}
    for lam, a in f.coeffs.items():
        acc = {Partition(()): Fraction(1)}
        for part in lam:
            acc = _mul_dicts(acc, single(part))
        for k, v in acc.items():
            out[k] = out.get(k, 0) + a * v
    return out


def _to_p(f: SymExpansion) -> SymExpansion:
    if f.basis == "p":
        return f
    if f.basis == "m":
        return _m_to_p(f)
    single = _e_r_in_p if f.basis == "e" else _h_r_in_p
    return SymExpansion("p", f.degree, _product_expand(f, single))


def _from_p(f: SymExpansion, target: str) -> SymExpansion:
    if target == "p":
        return f
    if target == "m":
        return _p_to_m(f)
    return SymExpansion(target, f.degree, _product_expand(f, lambda r: _p_r_in(target, r)))


def convert(f: SymExpansion, target: str) -> SymExpansion:
    """Express ``f`` in ``target`` (one of 'm', 'p', 'e', 'h')."""
    if target not in BASES:
        raise NotImplementedError(f"unsupported basis {target!r}")
    _check_degree(f.degree)
    if f.basis == target:
        return f
    return _from_p(_to_p(f), target)


def multiply(f: SymExpansion, g: SymExpansion) -> SymExpansion:
    if f.basis != g.basis:
        raise ValueError("multiply expects both factors in the same basis")
    deg = f.degree + g.degree
    if deg > _DEGREE_CAP:
        raise ValueError(f"product degree {deg} exceeds the cap {_DEGREE_CAP}")
    if f.basis == "m":
        return convert(multiply(convert(f, "p"), convert(g, "p")), "m")
    return SymExpansion(f.basis, deg, _mul_dicts(f.coeffs, g.coeffs))


def theta_inner(f: SymExpansion, g: SymExpansion, theta) -> Fraction:
    """<f, g>_theta with <p_lam, p_mu> = delta z_lam theta^len(lam)."""
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    if f.degree != g.degree:
        raise ValueError("degree mismatch")
    fp, gp = convert(f, "p"), convert(g, "p")
    total = Fraction(0)
    for lam, a in fp.coeffs.items():
        b = gp.coeffs.get(lam)
        if b:
            total += a * b * z_stat(lam) * theta ** len(lam)
    return total


# ------------------------------------------------------------------ json


def to_json(f: SymExpansion) -> str:
    return json.dumps(
        {
            "basis": f.basis,
            "degree": f.degree,
            "coeffs": {format_partition(k): str(v) for k, v in f.coeffs.items()},
        }
    )


def from_json(text) -> SymExpansion:
    obj = json.loads(text) if isinstance(text, str) else text
    coeffs = {parse_partition(k): Fraction(v) for k, v in obj["coeffs"].items()}
    return SymExpansion(obj["basis"], int(obj["degree"]), coeffs)
