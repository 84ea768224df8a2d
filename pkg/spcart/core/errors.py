"""Error hierarchy shared by the numerical modules and the CLI."""

from typing import Optional


class SpcartError(Exception):
    """Base class; `exit_code` is what the CLI returns for it."""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, flag: Optional[str] = None, domain: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.flag = flag
        self.domain = domain


class ArgumentError(SpcartError):
    """An argument lies outside its validated domain."""

    exit_code = 2
    kind = "argument"

    def __str__(self) -> str:
        parts = [self.message]
        if self.flag:
            parts.append(f"flag {self.flag}")
        if self.domain:
            parts.append(f"expected {self.domain}")
        return "; ".join(parts)


class InputError(SpcartError):
    """Input data cannot be used: non-finite, mis-shaped, not a covariance."""

    exit_code = 3
    kind = "data"


class DataIntegrityError(InputError):
    """A bundled data file does not match its recorded checksum."""

    kind = "data-integrity"


class DegeneracyError(SpcartError):
    """A factorization hit a rank deficiency it cannot recover from."""

    exit_code = 4
    kind = "degeneracy"
