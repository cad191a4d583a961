"""Exception types shared across the package.

Input problems (bad mol text, bad chemistry config, bad CLI arguments)
raise subclasses of ChemGraphError; everything else is a genuine bug and
is allowed to surface as an ordinary assertion.
"""


class ChemGraphError(Exception):
    """Base class for all user-facing errors."""


class MolSyntaxError(ChemGraphError):
    """Malformed mol text.  Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownNodeType(MolSyntaxError):
    pass


class ArityMismatch(MolSyntaxError):
    pass


class TagOveruse(MolSyntaxError):
    pass


class OrientationClash(MolSyntaxError):
    pass


class MissingCapType(ChemGraphError):
    pass


class ChemistryConfigError(ChemGraphError):
    """Malformed chemistry config file."""


class UnknownType(ChemistryConfigError):
    pass


class DuplicateRewriteName(ChemistryConfigError):
    pass


class BadValence(ChemistryConfigError):
    pass


class InterfaceMismatch(ChemistryConfigError):
    pass


class UnknownChemistry(ChemGraphError):
    pass


class StaleMatch(ChemGraphError):
    """A Match was applied to a molecule that changed since matching."""


class InsufficientTokens(ChemGraphError):
    """Hapax-mode application requested with an empty token supply."""


class ParityMismatch(ChemGraphError):
    """Random egg cannot be wired: half-edge counts do not pair up."""


class LambdaSyntaxError(ChemGraphError):
    """Malformed lambda term.  Carries a 0-based character offset."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"at offset {position}: {message}")
