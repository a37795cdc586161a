"""Exact Gaussian rationals ``a + b*i`` with ``a, b`` in Q."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from .errors import ScalarParseError

__all__ = ["Scalar", "as_scalar", "ZERO", "ONE", "I"]


class Scalar:
    """An element of Q(i).

    Both parts are :class:`fractions.Fraction`, so denominators stay positive
    and reduced after every operation.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, str):
            parsed = Scalar.parse(re)
            re, im = parsed.re, parsed.im + Fraction(im)
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> Scalar:
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.re, self.im))

    # arithmetic

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return Scalar._make(self.re * o.re, _FZERO)
        return Scalar._make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return Scalar._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> Scalar:
        if not self:
            raise ZeroDivisionError("inverse of zero Scalar")
        if not self.im:
            return Scalar._make(1 / self.re, _FZERO)
        norm = self.re * self.re + self.im * self.im
        return Scalar._make(self.re / norm, -self.im / norm)

    def conjugate(self) -> Scalar:
        return Scalar._make(self.re, -self.im)

    # comparisons

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_rational_integer(self) -> bool:
        return not self.im and self.re.denominator == 1

    # text form

    def __str__(self):
        re_part, im_part = self.re, self.im
        if not im_part:
            return _fstr(re_part)
        mag = abs(im_part)
        im_text = "i" if mag == 1 else f"{_fstr(mag)}*i"
        if not re_part:
            return ("-" if im_part < 0 else "") + im_text
        return f"{_fstr(re_part)}{'-' if im_part < 0 else '+'}{im_text}"

    def __repr__(self):
        return f"Scalar('{self}')"

    @classmethod
    def parse(cls, text: str) -> Scalar:
        """Parse ``"a/b"``, ``"c*i"``, ``"-1/2+3*i"`` and similar forms."""
        s = text.replace(" ", "")
        m = _SCALAR_RE.fullmatch(s)
        if not s or m is None:
            raise ScalarParseError(f"cannot parse scalar {text!r}")
        try:
            if m.group("i0"):
                return cls._make(_FZERO, _signed(m.group("isign0"), m.group("imag0")))
            im = _signed(m.group("isign"), m.group("imag")) if m.group("i") else _FZERO
            return cls._make(Fraction(m.group("re")), im)
        except ZeroDivisionError:
            raise ScalarParseError(f"zero denominator in scalar {text!r}") from None


def _signed(sign: str | None, mag: str | None) -> Fraction:
    x = Fraction(mag) if mag else Fraction(1)
    return -x if sign == "-" else x


_NUM = r"\d+(?:/\d+)?"
# either a pure imaginary "c*i", or a real part optionally followed by a signed imaginary part
_SCALAR_RE = re.compile(
    rf"(?:(?P<isign0>[+-])?(?:(?P<imag0>{_NUM})\*)?(?P<i0>i))"
    rf"|(?:(?P<re>[+-]?{_NUM})(?:(?P<isign>[+-])(?:(?P<imag>{_NUM})\*)?(?P<i>i))?)"
)

_FZERO = Fraction(0)


def _fstr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Rational)):
        return Scalar._make(Fraction(x), _FZERO)
    if isinstance(x, complex):
        return Scalar(Fraction(x.real), Fraction(x.imag))
    return None


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, strings and Scalars to a Scalar."""
    if isinstance(x, str):
        return Scalar.parse(x)
    s = _coerce(x)
    if s is None:
        raise TypeError(f"cannot convert {type(x).__name__} to Scalar")
    return s


ZERO = Scalar._make(_FZERO, _FZERO)
ONE = Scalar._make(Fraction(1), _FZERO)
I = Scalar._make(_FZERO, Fraction(1))
