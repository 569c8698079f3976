"""Prime-field share arithmetic and the exact rotation-angle algebra.

Everything the classical half of the protocol needs lives here: GF(q)
arithmetic, the dealer's secret polynomial, per-participant shares,
Lagrange recombination weights, and rotation angles kept as exact
rational multiples of a full turn.  Angles only become floating point
at the moment a gate matrix is built, so consistency checks on angle
sums are exact integer checks, never float comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class NotPrimeError(ValueError):
    """Raised when a modulus candidate has a nontrivial factor."""

    def __init__(self, q: int, factor: int):
        super().__init__(f"{q} is not prime (factor {factor})")
        self.q = q
        self.factor = factor


class AngleSumError(ValueError):
    """Raised when an angle sum that must be a whole number of turns is not.

    This signals corrupted shares or recombination weights: an honest
    session always produces an exact integer.
    """


@dataclass(frozen=True)
class PrimeModulus:
    """The prime q defining GF(q).  Construct via :func:`validate_prime`."""

    q: int

    def reduce(self, value: int) -> int:
        return value % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return pow(a, self.q - 2, self.q)

    def rand_element(self, rng, exclude_zero: bool = False) -> int:
        lo = 1 if exclude_zero else 0
        return int(rng.integers(lo, self.q))

    def check_range(self, value: int, what: str = "value") -> int:
        if not 0 <= value < self.q:
            raise ValueError(f"{what} {value} not reduced into [0, {self.q})")
        return value


def validate_prime(q: int) -> PrimeModulus:
    """Trial-division primality check; returns the modulus handle.

    q is small here (it only has to exceed the participant count), so
    deterministic trial division is all we need.
    """
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    if q == 2:
        return PrimeModulus(2)
    if q % 2 == 0:
        raise NotPrimeError(q, 2)
    i = 3
    while i * i <= q:
        if q % i == 0:
            raise NotPrimeError(q, i)
        i += 2
    return PrimeModulus(q)


@dataclass(frozen=True)
class DealerPolynomial:
    """f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1} over GF(q), a_0 = q - s_D.

    The constant term is pinned so that the dealer's secret number plus
    the recombined constant cancels mod q.
    """

    modulus: PrimeModulus
    s_d: int
    coeffs: tuple[int, ...]

    @property
    def t(self) -> int:
        return len(self.coeffs)

    def eval(self, x: int) -> int:
        q = self.modulus.q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % q
        return acc


def make_polynomial(s_d: int, high_coeffs: Sequence[int],
                    modulus: PrimeModulus) -> DealerPolynomial:
    """Build the degree-(t-1) dealer polynomial with a_0 = (q - s_D) mod q."""
    modulus.check_range(s_d, "dealer secret")
    for i, c in enumerate(high_coeffs):
        modulus.check_range(c, f"coefficient a_{i + 1}")
    a0 = (modulus.q - s_d) % modulus.q
    return DealerPolynomial(modulus, s_d, (a0, *high_coeffs))


def random_polynomial(modulus: PrimeModulus, t: int, rng,
                      exclude_zero_secret: bool = True) -> DealerPolynomial:
    """Draw s_D and the t-1 high coefficients uniformly from GF(q).

    By default s_D = 0 is excluded: the scheme tolerates it, but a zero
    secret number means the dealer's encryption rotation is the
    identity, so the default generator avoids it.
    """
    if t < 1:
        raise ValueError(f"threshold must be >= 1, got {t}")
    s_d = modulus.rand_element(rng, exclude_zero=exclude_zero_secret)
    high = [modulus.rand_element(rng) for _ in range(t - 1)]
    return make_polynomial(s_d, high, modulus)


def eval_share(poly: DealerPolynomial, x: int) -> int:
    """Evaluate f(x_i) mod q — the private share handed to participant i."""
    poly.modulus.check_range(x, "abscissa")
    return poly.eval(x)


@dataclass(frozen=True)
class ShareRecord:
    """One participant's public abscissa x_i and private share f(x_i)."""

    participant_id: str
    x: int
    share: int


@dataclass(frozen=True)
class LagrangeWeight:
    """Recombination weight c_l of one participant within a chosen set."""

    participant_id: str
    c: int


def _check_distinct_x(participating: Sequence[ShareRecord]) -> None:
    xs = [rec.x for rec in participating]
    if any(x == 0 for x in xs):
        raise ValueError("abscissa x=0 is reserved for the secret")
    if len(set(xs)) != len(xs):
        raise ValueError(f"duplicate abscissas in participating set: {sorted(xs)}")


def lagrange_weight(participating: Sequence[ShareRecord], l: int,
                    modulus: PrimeModulus) -> LagrangeWeight:
    """c_l = f(x_l) * prod_{v != l} (-x_v) / (x_l - x_v) mod q.

    The empty product (a single participant) leaves c equal to the
    share itself.
    """
    _check_distinct_x(participating)
    rec = participating[l]
    acc = rec.share % modulus.q
    for v, other in enumerate(participating):
        if v == l:
            continue
        num = (-other.x) % modulus.q
        den = modulus.inv((rec.x - other.x) % modulus.q)
        acc = acc * num % modulus.q * den % modulus.q
    return LagrangeWeight(rec.participant_id, acc)


def verify_zero_sum(s_d: int, weights: Sequence[LagrangeWeight],
                    modulus: PrimeModulus) -> bool:
    """True iff the dealer secret and the weights cancel: (s_D + sum c_l) % q == 0."""
    total = s_d + sum(w.c for w in weights)
    return total % modulus.q == 0


_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RationalAngle:
    """An angle stored exactly as (num/den) full turns, i.e. (num/den)*2*pi.

    Addition, negation, and integer scaling stay exact; only
    :attr:`radians` rounds to floating point, and that happens solely
    inside gate-matrix construction.  Angles are *not* reduced modulo a
    turn, so 24pi/7 keeps its winding number.
    """

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ZeroDivisionError("angle denominator must be nonzero")
        num, den = self.num, self.den
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num, den)
        if g > 1:
            num //= g
            den //= g
        if num == 0:
            den = 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def zero(cls) -> "RationalAngle":
        return cls(0, 1)

    @classmethod
    def from_fraction(cls, turns: Fraction) -> "RationalAngle":
        return cls(turns.numerator, turns.denominator)

    @property
    def turns(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return _TWO_PI * self.num / self.den

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.num * other.den + other.num * self.den,
                             self.den * other.den)

    def __sub__(self, other: "RationalAngle") -> "RationalAngle":
        return self + (-other)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle(-self.num, self.den)

    def __mul__(self, k: int) -> "RationalAngle":
        return RationalAngle(self.num * k, self.den)

    __rmul__ = __mul__

    def mod_turn(self) -> "RationalAngle":
        """The same direction reduced into [0, 1) turns."""
        return RationalAngle.from_fraction(self.turns % 1)

    def is_whole_turns(self) -> bool:
        return self.den == 1

    def pi_string(self) -> str:
        """Render as a multiple of pi, e.g. '8*pi/7', 'pi/7', '2*pi', '0'."""
        halfturns = Fraction(2 * self.num, self.den)
        k, d = halfturns.numerator, halfturns.denominator
        if k == 0:
            return "0"
        sign = "-" if k < 0 else ""
        k = abs(k)
        head = "pi" if k == 1 else f"{k}*pi"
        tail = "" if d == 1 else f"/{d}"
        return f"{sign}{head}{tail}"

    def to_payload(self) -> dict:
        return {"num": self.num, "den": self.den}

    @classmethod
    def from_payload(cls, payload: dict) -> "RationalAngle":
        return cls(int(payload["num"]), int(payload["den"]))

    def __repr__(self) -> str:
        return f"RationalAngle({self.pi_string()})"


def rotation_angle(w: int, value: int, modulus: PrimeModulus) -> RationalAngle:
    """The protocol's share-to-angle map: w * (value/q) full turns.

    w must lie in [1, q-1]; the session parameters are drawn from that
    range to keep distinct secrets encrypted under distinct multiples.
    """
    if not 1 <= w <= modulus.q - 1:
        raise ValueError(f"angle multiplier w={w} outside [1, {modulus.q - 1}]")
    modulus.check_range(value, "angle value")
    return RationalAngle(w * value, modulus.q)


def check_angle_sum(gamma_d: RationalAngle,
                    gammas: Sequence[RationalAngle]) -> int:
    """Return r such that gamma_D + sum(gammas) equals exactly r full turns.

    Raises :class:`AngleSumError` when the exact rational total is not a
    whole number of turns, which can only happen if shares or weights
    were corrupted.
    """
    total = gamma_d
    for g in gammas:
        total = total + g
    if not total.is_whole_turns():
        raise AngleSumError(
            f"angle sum {total.pi_string()} is not a whole number of turns")
    return total.num
