"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class InvolutionEmbedError(Exception):
    """Base class; ``code`` is a short machine-readable tag."""

    code = "error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class DomainError(InvolutionEmbedError, ValueError):
    code = "domain-error"


class DegenerateFormError(DomainError):
    code = "degenerate-form"


class InfeasibleError(DomainError):
    """The requested data violates a necessary condition (product formula etc.)."""

    code = "infeasible"

    def __init__(self, message: str, constraint: str = ""):
        super().__init__(message)
        self.constraint = constraint

    def to_json(self) -> dict:
        out = super().to_json()
        if self.constraint:
            out["constraint"] = self.constraint
        return out


class PreconditionError(DomainError):
    code = "precondition"


class UnsupportedExtensionError(DomainError):
    code = "unsupported-extension-symbol"


class BoundExceededError(InvolutionEmbedError):
    """A search ran out of budget.  Never means 'does not exist'."""

    code = "bound-exceeded"

    def __init__(self, message: str, bound: int):
        super().__init__(f"{message} (bound={bound})")
        self.bound = bound

    def to_json(self) -> dict:
        out = super().to_json()
        out["bound"] = self.bound
        return out


class VerificationError(InvolutionEmbedError, AssertionError):
    """An internally produced witness failed independent re-verification."""

    code = "verification-failed"
