"""Exception hierarchy shared by every module.

The CLI maps any :class:`QafrftError` to exit code 2 and reports the class name.
"""

from __future__ import annotations


class QafrftError(Exception):
    """Base class for all library errors."""


class NotInvertible(QafrftError, ValueError):
    def __init__(self, value: int, modulus: int, gcd: int):
        super().__init__(f"{value} is not invertible mod {modulus} (gcd={gcd})")
        self.value = value
        self.modulus = modulus
        self.gcd = gcd


class EvenModulus(QafrftError, ValueError):
    pass


class UnsupportedModulus(QafrftError, ValueError):
    pass


class ModulusMismatch(QafrftError, ValueError):
    pass


class SearchExhausted(QafrftError, RuntimeError):
    pass


class NoFourierPower(QafrftError, ValueError):
    pass


class DecompositionFailure(QafrftError, ValueError):
    pass


class NonInvertibleC(QafrftError, ValueError):
    pass


class DegenerateRotation(QafrftError, ValueError):
    pass


class NotProportional(QafrftError, ValueError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DimensionMismatch(QafrftError, ValueError):
    pass


class InvalidGate(QafrftError, ValueError):
    pass


class DimensionCap(QafrftError, ValueError):
    pass


class NonCoprimeB(QafrftError, ValueError):
    pass


class IndexRange(QafrftError, IndexError):
    pass


class ParseError(QafrftError, ValueError):
    """Malformed circuit or matrix document.

    ``line`` and ``pos`` locate the problem in the source text when it is
    known (JSON syntax errors); structural errors report the JSON path.
    """

    def __init__(self, message: str, line: int | None = None, pos: int | None = None,
                 path: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"col {pos}")
        if path:
            where.append(path)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.pos = pos
        self.path = path
