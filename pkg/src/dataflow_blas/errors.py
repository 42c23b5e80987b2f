"""Structured error types raised across the toolchain.

Every error a user can trigger carries a stable ``code`` (the class name)
so the CLI and tests can match on it without parsing messages.
"""


class DesignError(Exception):
    """Base class for all user-triggerable toolchain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- design-spec parsing -------------------------------------------------

class SpecSyntaxError(DesignError):
    """Input is not syntactically valid JSON (code reported as SyntaxError)."""

    @property
    def code(self) -> str:
        return "SyntaxError"


class UnknownRoutine(DesignError):
    """blas_routine is not in the routine catalog."""


class MissingRoutines(DesignError):
    """The design declares no routines."""


class DuplicateName(DesignError):
    """Two routines share a kernel_name."""


class BadKernelName(DesignError):
    """kernel_name is not a valid identifier."""


class BadConnectionRef(DesignError):
    """A connection or on_chip_generate entry names a missing kernel or port."""


class BadWindowSize(DesignError):
    """window_size_bytes is not a positive multiple of the vector byte width."""


class BadVectorWidth(DesignError):
    """vector_width_bits does not divide the platform maximum or is too narrow."""


class UnknownField(DesignError):
    """The JSON carries a field the schema does not define."""


class BadFieldValue(DesignError):
    """A known field holds a value of the wrong type or range."""


# --- graph construction ---------------------------------------------------

class CyclicComposition(DesignError):
    """Kernel-to-kernel connections form a cycle."""


class ConflictingGenerator(DesignError):
    """A port is both connected to another kernel and marked on_chip_generate."""


# --- placement -------------------------------------------------------------

class HintConflict(DesignError):
    """Two kernels are hinted to the same tile."""


class HintOutOfBounds(DesignError):
    """A placement hint lies outside the tile grid."""


class MemoryBudgetExceeded(DesignError):
    """A kernel's window footprint exceeds the per-tile local memory."""


class GridFull(DesignError):
    """No free tile remains for an unplaced kernel."""


# --- code generation -------------------------------------------------------

class IncompleteBinding(DesignError):
    """A template placeholder was left unbound; indicates an internal bug."""


class NonEmptyOutputDir(DesignError):
    """Output directory already holds files and --force was not given."""


# --- reference semantics / simulation ---------------------------------------

class LengthMismatch(DesignError):
    """Bound input lengths violate the routine's shape constraints."""


class IntegerOverflow(DesignError):
    """An i32 operation left the representable range."""


class ShapeMismatch(DesignError):
    """Bound data shapes are inconsistent across the graph."""


class UnboundInput(DesignError):
    """An input mover has no bound data."""


# --- performance model -------------------------------------------------------

class NotAPipeline(DesignError):
    """Variant comparison needs at least one kernel-to-kernel channel."""
