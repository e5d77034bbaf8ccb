"""Exception types shared across the package.

Every validator raises a named error carrying the first violating cell or
tuple, so failures are reproducible and reportable verbatim.
"""

from __future__ import annotations


class TwistcharError(Exception):
    """Base class for all package errors."""


# -- group validation ---------------------------------------------------------

class GroupValidationError(TwistcharError):
    pass


class NotLatinSquare(GroupValidationError):
    def __init__(self, cell, message=""):
        self.cell = cell
        super().__init__(message or f"table is not a Latin square at cell {cell}")


class NotAssociative(GroupValidationError):
    def __init__(self, cell, message=""):
        self.cell = cell
        super().__init__(message or f"associativity fails at triple {cell}")


class NoIdentity(GroupValidationError):
    def __init__(self, message="table has no two-sided identity"):
        super().__init__(message)


class NotASubgroup(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"member set is not a subgroup: {witness}")


class NotNormalSubgroup(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"subgroup is not normal, conjugation escapes at {witness}")


class NotAHomomorphism(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map is not a homomorphism at {witness}")


class ActionNotHomomorphic(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"action is not a homomorphism into Aut(H) at {witness}")


class NotAutomorphism(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map is not an automorphism: {witness}")


class NotEquivariant(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map is not conjugation-invariant at {witness}")


# -- enumeration and arithmetic guards ----------------------------------------

class EnumerationCapExceeded(TwistcharError):
    def __init__(self, needed, cap):
        self.needed = needed
        self.cap = cap
        super().__init__(f"search space of size {needed} exceeds cap {cap}")


class ModulusOverflow(TwistcharError):
    def __init__(self, modulus, cap):
        self.modulus = modulus
        self.cap = cap
        super().__init__(f"working modulus {modulus} exceeds cap {cap}")


class ShapeMismatch(TwistcharError):
    pass


# -- bicharacters and cocycles -------------------------------------------------

class NotBimultiplicative(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"values are not bimultiplicative at {witness}")


class NotCyclic(TwistcharError):
    pass


class NotGenerator(TwistcharError):
    pass


class NotNormalized(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"cocycle is not normalized at {witness}")


class CocycleIdentityFails(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"2-cocycle identity fails at triple {witness}")


class NotSymmetric(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"cocycle is not symmetric at {witness}")


class WitnessNotFound(TwistcharError):
    """No coboundary witness exists up to the staged modulus bound."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"no coboundary witness found: {report}")


# -- characteristic pairs ------------------------------------------------------

class RelationFails(TwistcharError):
    def __init__(self, relation, witness, message=""):
        self.relation = relation
        self.witness = witness
        super().__init__(message or f"relation ({relation}) fails at {witness}")


class ContextMismatch(TwistcharError):
    pass


# -- extensions ----------------------------------------------------------------

class NotAnExtension(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"homomorphism does not restrict to the given map at {witness}")


class ExtensionObstructed(TwistcharError):
    """Raised when an operation requires an extension of the subgroup map and none exists."""

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__(f"map does not extend to the whole group: {certificate.obstruction}")


class NotCoprime(TwistcharError):
    def __init__(self, p, n):
        self.p = p
        self.n = n
        super().__init__(f"gcd({p}, {n}) != 1")


class NotActInvariant(TwistcharError):
    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"map is not invariant under the action at {witness}")


# -- file front end ------------------------------------------------------------

class ParseError(TwistcharError):
    def __init__(self, path, field, message):
        self.path = path
        self.field = field
        super().__init__(f"{path}: {field}: {message}")
