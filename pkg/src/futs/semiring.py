"""Exact semirings and finite-support functions over them.

Two commutative semirings ship: ``BOOLEAN`` (disjunction, conjunction) and
``RATIONAL`` (non-negative rationals backed by :class:`fractions.Fraction`).
Values are plain Python objects (``bool`` / ``Fraction``); the semiring object
carries the operations and validates values on the way in.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any

from .errors import PairingCollision, SemiringMismatch


class Semiring:
    """A commutative semiring ``(R, +, 0, *, 1)`` with exact equality."""

    name: str = ""
    zero: Any = None
    one: Any = None

    def add(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def coerce(self, value):
        """Validate ``value`` and return its canonical representation."""
        raise NotImplementedError

    def parse(self, value):
        """Read a value from its JSON form."""
        raise NotImplementedError

    def dump(self, value):
        """JSON form of ``value``."""
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return x == self.zero

    def sum(self, values: Iterable) -> Any:
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def __repr__(self):
        return f"<semiring {self.name}>"

    def __reduce__(self):
        return (by_name, (self.name,))


class BooleanSemiring(Semiring):
    name = "bool"
    zero = False
    one = True

    def add(self, x, y):
        return x or y

    def mul(self, x, y):
        return x and y

    def coerce(self, value):
        if not isinstance(value, bool):
            raise TypeError(f"boolean semiring value expected, got {value!r}")
        return value

    def parse(self, value):
        if isinstance(value, bool):
            return value
        if value in ("true", "false"):
            return value == "true"
        raise ValueError(f"not a boolean value: {value!r}")

    def dump(self, value):
        return bool(value)


class RationalSemiring(Semiring):
    name = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, x, y):
        return x + y

    def mul(self, x, y):
        return x * y

    def coerce(self, value):
        # floats and bools are refused: equality must stay exact
        if isinstance(value, bool) or isinstance(value, float):
            raise TypeError(f"exact rational expected, got {value!r}")
        if isinstance(value, str):
            return self.parse(value)
        v = Fraction(value)
        if v < 0:
            raise ValueError(f"negative weight {v} not allowed")
        return v

    def parse(self, value):
        if isinstance(value, bool):
            raise ValueError(f"not a rational value: {value!r}")
        if isinstance(value, int):
            return self.coerce(value)
        if not isinstance(value, str):
            raise ValueError(f"not a rational value: {value!r}")
        return parse_rational(value)

    def dump(self, value):
        return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, an integer, or a finite decimal into a non-negative Fraction."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            v = Fraction(_decimal(num)) / Fraction(_decimal(den))
        else:
            v = Fraction(_decimal(s))
    except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc
    if v < 0:
        raise ValueError(f"negative weight {text!r} not allowed")
    return v


def _decimal(s: str) -> Decimal:
    s = s.strip()
    if not s or s.lower() in ("nan", "inf", "infinity", "-inf", "+inf"):
        raise ValueError(s)
    d = Decimal(s)
    if not d.is_finite():
        raise ValueError(s)
    return d


BOOLEAN = BooleanSemiring()
RATIONAL = RationalSemiring()

_REGISTRY = {BOOLEAN.name: BOOLEAN, RATIONAL.name: RATIONAL}


def by_name(name: str) -> Semiring:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown semiring {name!r}") from None


def rational_min(x: Fraction, y: Fraction) -> Fraction:
    return x if x <= y else y


class FiniteSupportFn(Mapping):
    """A finitely supported function from states into a semiring.

    Behaves as a read-only mapping over its support: iteration yields exactly
    the states with a non-zero value, and lookup of any other state returns the
    semiring zero instead of raising.
    """

    __slots__ = ("semiring", "_entries", "_hash")

    def __init__(self, semiring: Semiring, entries: Mapping | Iterable = ()):
        self.semiring = semiring
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean = {}
        for x, v in items:
            v = semiring.coerce(v)
            if not semiring.is_zero(v):
                clean[x] = v
        self._entries = clean
        self._hash = None

    @classmethod
    def _trusted(cls, semiring: Semiring, entries: dict) -> "FiniteSupportFn":
        # entries already coerced and free of zeros
        obj = cls.__new__(cls)
        obj.semiring = semiring
        obj._entries = entries
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, semiring: Semiring) -> "FiniteSupportFn":
        return cls._trusted(semiring, {})

    @classmethod
    def point(cls, x: Hashable, value, semiring: Semiring | None = None) -> "FiniteSupportFn":
        if semiring is None:
            semiring = BOOLEAN if isinstance(value, bool) else RATIONAL
        return cls(semiring, [(x, value)])

    @classmethod
    def char(cls, x: Hashable, semiring: Semiring) -> "FiniteSupportFn":
        """The characteristic function ``[x -> 1]``."""
        return cls._trusted(semiring, {x: semiring.one})

    def __getitem__(self, x):
        return self._entries.get(x, self.semiring.zero)

    def __contains__(self, x):
        return x in self._entries

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def support(self) -> frozenset:
        return frozenset(self._entries)

    def __eq__(self, other):
        if not isinstance(other, FiniteSupportFn):
            return NotImplemented
        return self.semiring is other.semiring and self._entries == other._entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.semiring.name, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{x} -> {self.semiring.dump(v)}" for x, v in self._entries.items())
        return f"[{inner}]"

    def _check(self, other: "FiniteSupportFn"):
        if self.semiring is not other.semiring:
            raise SemiringMismatch(f"{self.semiring.name} vs {other.semiring.name}")

    def __add__(self, other: "FiniteSupportFn") -> "FiniteSupportFn":
        """Pointwise sum."""
        if not isinstance(other, FiniteSupportFn):
            return NotImplemented
        self._check(other)
        sr = self.semiring
        out = dict(self._entries)
        for x, v in other._entries.items():
            if x in out:
                s = sr.add(out[x], v)
                if sr.is_zero(s):
                    del out[x]
                else:
                    out[x] = s
            else:
                out[x] = v
        return FiniteSupportFn._trusted(sr, out)

    def scale(self, r) -> "FiniteSupportFn":
        """Left scalar multiple ``r * self``."""
        sr = self.semiring
        try:
            r = sr.coerce(r)
        except TypeError as exc:
            raise SemiringMismatch(str(exc)) from None
        out = {}
        for x, v in self._entries.items():
            p = sr.mul(r, v)
            if not sr.is_zero(p):
                out[x] = p
        return FiniteSupportFn._trusted(sr, out)

    def pair_product(self, other: "FiniteSupportFn", pair: Callable[[Any, Any], Hashable]) -> "FiniteSupportFn":
        """``(self | other)(pair(x1, x2)) = self(x1) * other(x2)``.

        ``pair`` must be injective on the product of the two supports;
        :class:`PairingCollision` is raised when it is not.
        """
        self._check(other)
        sr = self.semiring
        out = {}
        seen = {}
        for x1, v1 in self._entries.items():
            for x2, v2 in other._entries.items():
                x = pair(x1, x2)
                if x in seen:
                    raise PairingCollision(f"{seen[x]!r} and {(x1, x2)!r} both pair to {x!r}")
                seen[x] = (x1, x2)
                p = sr.mul(v1, v2)
                if not sr.is_zero(p):
                    out[x] = p
        return FiniteSupportFn._trusted(sr, out)

    def total(self):
        """The sum of all values."""
        return self.semiring.sum(self._entries.values())

    def mass(self, states) -> Any:
        """Sum of the values over ``states`` (any container supporting ``in``)."""
        sr = self.semiring
        return sr.sum(v for x, v in self._entries.items() if x in states)

    def to_json(self, key=str) -> dict:
        return {key(x): self.semiring.dump(v) for x, v in self._entries.items()}


def fsf_zero(semiring: Semiring) -> FiniteSupportFn:
    return FiniteSupportFn.zero(semiring)


def fsf_point(x, r, semiring: Semiring | None = None) -> FiniteSupportFn:
    return FiniteSupportFn.point(x, r, semiring)


def fsf_char(x, semiring: Semiring) -> FiniteSupportFn:
    return FiniteSupportFn.char(x, semiring)


def fsf_add(phi: FiniteSupportFn, psi: FiniteSupportFn) -> FiniteSupportFn:
    return phi + psi


def fsf_scale(r, phi: FiniteSupportFn) -> FiniteSupportFn:
    return phi.scale(r)


def fsf_pair_product(phi: FiniteSupportFn, psi: FiniteSupportFn, pair) -> FiniteSupportFn:
    return phi.pair_product(psi, pair)


def fsf_total(phi: FiniteSupportFn):
    return phi.total()
