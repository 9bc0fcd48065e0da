"""The binary cubic forms F_{n,a}(X, Y) = X^3 - u_a X^2 Y + (-1)^a v_a X Y^2 - Y^3."""

import enum
import logging
import threading
from dataclasses import dataclass

from sympy import Matrix

from app.config import settings
from app.exceptions import DegenerateFormError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class FormCoefficients:
    n: int
    a: int
    u: int
    v: int

    def evaluate(self, x: int, y: int) -> int:
        sign = -1 if self.a % 2 else 1
        return x**3 - self.u * x * x * y + sign * self.v * x * y * y - y**3


class CoefficientCache:
    """Per-n coefficient sequences extended on demand.

    Bounded by ``limit`` stored (n, a) entries; when full the cache is
    dropped and rebuilt lazily. Guarded by a lock so threads may share it.
    """

    def __init__(self, limit: int):
        self._limit = limit
        self._lock = threading.Lock()
        self._sequences: dict[int, tuple[list[int], list[int]]] = {}
        self._size = 0

    def clear(self) -> None:
        with self._lock:
            self._sequences.clear()
            self._size = 0

    def resize(self, limit: int) -> None:
        with self._lock:
            self._limit = limit
            if self._size > limit:
                self._sequences.clear()
                self._size = 0

    def __len__(self) -> int:
        return self._size

    def get(self, n: int, a: int) -> tuple[int, int]:
        with self._lock:
            seq = self._sequences.get(n)
            if seq is not None and a < len(seq[0]):
                return seq[0][a], seq[1][a]
            if seq is None:
                seq = _seed(n)
            else:
                self._size -= len(seq[0])
            _extend(n, seq, a)
            if self._size + len(seq[0]) > self._limit:
                logger.info("coeff_cache_reset size=%d limit=%d", self._size, self._limit)
                self._sequences.clear()
                self._size = 0
            if len(seq[0]) <= self._limit:
                self._sequences[n] = seq
                self._size += len(seq[0])
            return seq[0][a], seq[1][a]


def _seed(n: int) -> tuple[list[int], list[int]]:
    # F_{n,0} = (X - Y)^3, F_{n,1} = F_n, F_{n,2} from the displayed expansion
    return [3, n - 1, n * n + 5], [3, n + 2, n * n + 2 * n + 6]


def _extend(n: int, seq: tuple[list[int], list[int]], a: int) -> None:
    us, vs = seq
    while len(us) <= a:
        us.append((n - 1) * us[-1] + (n + 2) * us[-2] + us[-3])
        vs.append((n + 2) * vs[-1] - (n - 1) * vs[-2] - vs[-3])


_cache = CoefficientCache(settings.memo_limit)


def configure_cache(limit: int) -> None:
    _cache.resize(limit)


def coeffs(n: int, a: int) -> FormCoefficients:
    """(u_a, v_a) by the three-term recurrences."""
    if a < 0:
        raise PreconditionError("coefficients are defined for a >= 0; use eval_form for a < 0", n=n, a=a)
    u, v = _cache.get(n, a)
    return FormCoefficients(n=n, a=a, u=u, v=v)


def coefficient_sequence(n: int, a_max: int) -> list[FormCoefficients]:
    """coeffs(n, 0..a_max) in one pass."""
    seq = _seed(n)
    _extend(n, seq, a_max)
    return [FormCoefficients(n=n, a=a, u=seq[0][a], v=seq[1][a]) for a in range(a_max + 1)]


def companion_matrix(n: int) -> Matrix:
    """Companion matrix of f_n; its eigenvalues are λ0, λ1, λ2."""
    return Matrix([[0, 0, 1], [1, 0, n + 2], [0, 1, n - 1]])


def coeffs_oracle(n: int, a: int) -> FormCoefficients:
    """Coefficients from traces: u_a = tr(M^a), v_a = (-1)^a tr(M^-a)."""
    if a < 0:
        raise PreconditionError("coefficients are defined for a >= 0", n=n, a=a)
    m = companion_matrix(n)
    u = int((m**a).trace())
    inverse = m.inv()
    v = int((inverse**a).trace()) * (-1 if a % 2 else 1)
    return FormCoefficients(n=n, a=a, u=u, v=v)


def eval_form(n: int, a: int, x: int, y: int, *, degenerate: bool = False) -> int:
    """Exact F_{n,a}(x, y); F_{n,-a}(X, Y) = -F_{n,a}(Y, X)."""
    if a == 0 and not degenerate:
        raise DegenerateFormError("F_{n,0} = (X - Y)^3 is degenerate", n=n, a=a)
    if a < 0:
        return -eval_form(n, -a, y, x)
    return coeffs(n, a).evaluate(x, y)


class Symmetry(str, enum.Enum):
    """Generators of the symmetries of the family."""

    NEG = "neg"
    FLIP_N = "flip_n"
    FLIP_A = "flip_a"


@dataclass(frozen=True, slots=True)
class SymmetryImage:
    n: int
    a: int
    x: int
    y: int
    sign: int


def symmetry_image(n: int, a: int, x: int, y: int, which: Symmetry | str) -> SymmetryImage:
    """Image point with eval_form(image) = sign * eval_form(n, a, x, y)."""
    if a == 0:
        raise DegenerateFormError("symmetries are defined for a != 0", n=n, a=a)
    which = Symmetry(which)
    if which is Symmetry.NEG:
        return SymmetryImage(n, a, -x, -y, -1)
    if which is Symmetry.FLIP_N:
        # F_{-n-1,a}(X, Y) = F_{n,a}(-Y, -X)
        return SymmetryImage(-n - 1, a, -y, -x, 1)
    return SymmetryImage(n, -a, y, x, -1)
