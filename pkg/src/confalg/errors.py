"""Exception hierarchy shared by every confalg module."""


class ConfAlgError(Exception):
    """Base class for all confalg errors."""


class FormatError(ConfAlgError, ValueError):
    """Malformed polynomial text, definition file or variable name."""


class BasisError(ConfAlgError, KeyError):
    """A symbol does not belong to the basis it was used with."""

    def __str__(self):
        return Exception.__str__(self)


class DimensionError(ConfAlgError, ValueError):
    """Sizes or ambient ranks do not match."""


class ContextError(ConfAlgError, ValueError):
    """Extension-field elements from different fields were mixed."""


class PreconditionError(ConfAlgError):
    """An operation was called on input that violates its precondition.

    ``witness`` carries whatever data demonstrates the violation (a failing
    triple, an offending table entry, a non-nilpotent power, ...).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class WellDefinednessError(PreconditionError):
    """A module action does not respect the torsion relations."""


class MembershipError(PreconditionError):
    """An element lies outside a declared subalgebra."""
