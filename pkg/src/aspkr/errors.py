"""Exception hierarchy shared by every module."""


class AspKrError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class ProgramSyntaxError(AspKrError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class AlphabetMismatch(AspKrError):
    pass


class CapExceeded(AspKrError):
    pass


class BudgetExceeded(AspKrError):
    pass


class NotACongruence(AspKrError):
    def __init__(self, q, q2, x, message=None):
        super().__init__(message or f"states {q!r} and {q2!r} are related but their {x!r}-successors are not")
        self.witness = (q, q2, x)


class LoopFreeViolation(AspKrError):
    pass


class PreconditionError(AspKrError):
    pass


class Inconclusive(AspKrError):
    """Bounded search ran out without finding a certificate (CLI exit status 3)."""
