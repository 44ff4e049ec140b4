"""
Exception hierarchy for model loading and data-flow analysis.

All exceptions provide structured error information for logging,
user feedback, and programmatic error handling. Each class also names
the process exit code the command-line front end uses for it.
"""

from typing import Any, Dict, List, Optional, Sequence

EXIT_VALIDATION = 1
EXIT_ABORT = 2


class DfasError(Exception):
    """
    Base exception for all analyzer errors.

    All custom exceptions inherit from this to allow catch-all
    error handling while preserving specific error types.
    """

    exit_code: int = EXIT_VALIDATION

    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ) -> None:
        """
        Initialize analyzer error with structured context.

        Args:
            message: Human-readable error description
            error_code: Machine-readable error identifier (e.g., "UNKNOWN_IDENTIFIER")
            details: Additional context for debugging/logging
            suggestion: Actionable recommendation to fix the error
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        self.suggestion = suggestion

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for JSON serialization."""
        return {
            "error": self.error_code,
            "message": self.message,
            "details": self.details,
            "suggestion": self.suggestion,
        }

    def __repr__(self) -> str:
        """Developer-friendly representation."""
        return (
            f"{self.__class__.__name__}("
            f"error_code={self.error_code!r}, "
            f"message={self.message!r})"
        )


class ModelSyntaxError(DfasError):
    """Raised when a model file or an action/expression string cannot be parsed."""

    def __init__(
        self,
        reason: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        location: Optional[str] = None,
    ) -> None:
        """
        Initialize syntax error.

        Args:
            reason: What the parser could not accept
            line: 1-based line in the model text (JSON-level errors)
            column: 1-based column in the model text or in the offending string
            location: Dotted path of the offending field (e.g., "processes[0].transitions[2]")
        """
        where = []
        if location:
            where.append(location)
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        suffix = f" ({', '.join(where)})" if where else ""

        super().__init__(
            message=f"Syntax error: {reason}{suffix}",
            error_code="MODEL_SYNTAX_ERROR",
            details={"line": line, "column": column, "location": location},
            suggestion="See docs/MODEL_SCHEMA.md for the accepted syntax",
        )
        self.reason = reason
        self.line = line
        self.column = column
        self.location = location


class UnknownIdentifierError(DfasError):
    """Raised when a model refers to an undeclared name."""

    def __init__(
        self,
        kind: str,
        name: str,
        location: Optional[str] = None,
        known: Optional[Sequence[str]] = None,
    ) -> None:
        """
        Initialize unknown identifier error.

        Args:
            kind: Kind of name ("variable", "channel", "state", ...)
            name: The undeclared name
            location: Where the reference occurs
            known: Declared names of the same kind, for the suggestion
        """
        suggestion = None
        if known:
            suggestion = f"Declared {kind}s: {', '.join(known)}"

        super().__init__(
            message=f"Unknown {kind} '{name}'" + (f" in {location}" if location else ""),
            error_code="UNKNOWN_IDENTIFIER",
            details={"kind": kind, "name": name, "location": location},
            suggestion=suggestion,
        )
        self.kind = kind
        self.name = name


class DuplicateDeclarationError(DfasError):
    """Raised when a name is declared twice in the same scope."""

    def __init__(self, kind: str, name: str, scope: Optional[str] = None) -> None:
        super().__init__(
            message=f"Duplicate {kind} '{name}'" + (f" in {scope}" if scope else ""),
            error_code="DUPLICATE_DECLARATION",
            details={"kind": kind, "name": name, "scope": scope},
            suggestion=f"Rename or remove the second declaration of '{name}'",
        )
        self.kind = kind
        self.name = name


class ModelValidationError(DfasError):
    """
    Raised when a model breaks an assumption the requested analysis relies on.

    Carries the offending diagnostics (see ``async_dfa.model.validation``).
    """

    def __init__(self, problems: Sequence[Any], engine: Optional[str] = None) -> None:
        """
        Initialize model validation error.

        Args:
            problems: Diagnostics (objects with ``code`` and ``message``) or plain strings
            engine: Engine the model was rejected for, if the rejection is engine specific
        """
        messages: List[str] = [getattr(p, "message", str(p)) for p in problems]
        codes: List[str] = [getattr(p, "code", "SCHEMA") for p in problems]
        head = messages[0] if messages else "model is invalid"
        extra = f" (+{len(messages) - 1} more)" if len(messages) > 1 else ""
        target = f" for the {engine} engine" if engine else ""

        super().__init__(
            message=f"Model rejected{target}: {head}{extra}",
            error_code="MODEL_VALIDATION_FAILED",
            details={"problems": messages, "codes": codes, "engine": engine},
            suggestion="Run 'dfas validate MODEL' to list every diagnostic",
        )
        self.problems = list(problems)
        self.engine = engine


class DomainMismatchError(DfasError):
    """Raised when functions or values from different domains or variable universes meet."""

    def __init__(self, operation: str, expected: str, actual: str) -> None:
        super().__init__(
            message=f"{operation}: expected {expected}, got {actual}",
            error_code="DOMAIN_MISMATCH",
            details={"operation": operation, "expected": expected, "actual": actual},
            suggestion="Attach a single domain to the whole graph before analysis",
        )
        self.operation = operation


class UnsupportedOperationError(DfasError):
    """Raised when a domain cannot provide a lattice operation."""

    def __init__(self, domain: str, operation: str, reason: str) -> None:
        super().__init__(
            message=f"{domain} does not support {operation}: {reason}",
            error_code="UNSUPPORTED_OPERATION",
            details={"domain": domain, "operation": operation},
            suggestion="Use the lcp or ccp domain for the backward engine",
        )
        self.domain = domain
        self.operation = operation


class UnsupportedEngineError(DfasError):
    """Raised when an engine is asked to run with a domain or model it cannot handle."""

    def __init__(
        self,
        engine: str,
        reason: str,
        supported: Optional[Sequence[str]] = None,
    ) -> None:
        suggestion = None
        if supported:
            suggestion = f"Supported choices: {', '.join(supported)}"

        super().__init__(
            message=f"The {engine} engine cannot run: {reason}",
            error_code="UNSUPPORTED_ENGINE",
            details={"engine": engine, "reason": reason, "supported": list(supported or [])},
            suggestion=suggestion,
        )
        self.engine = engine
        self.reason = reason


class ContractViolationError(DfasError):
    """Raised when an operation is called outside its precondition."""

    def __init__(self, operation: str, reason: str) -> None:
        super().__init__(
            message=f"{operation}: {reason}",
            error_code="CONTRACT_VIOLATION",
            details={"operation": operation},
        )
        self.operation = operation


class StateSpaceLimitError(DfasError):
    """Raised when the product construction exceeds the node cap."""

    exit_code = EXIT_ABORT

    def __init__(self, limit: int, reached: int) -> None:
        super().__init__(
            message=f"Product graph exceeds {limit:,} nodes",
            error_code="STATE_SPACE_LIMIT",
            details={"limit": limit, "reached": reached},
            suggestion="Raise --max-nodes or reduce the number of interleaved processes",
        )
        self.limit = limit


class AnalysisAbortedError(DfasError):
    """Raised when an engine stops early (watchdog or iteration cap)."""

    exit_code = EXIT_ABORT

    def __init__(
        self,
        engine: str,
        reason: str,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(
            message=f"{engine} analysis aborted: {reason}",
            error_code="ANALYSIS_ABORTED",
            details={"engine": engine, **(details or {})},
            suggestion="Raise --max-iters, or check that the domain has finite height",
        )
        self.engine = engine
        self.reason = reason
