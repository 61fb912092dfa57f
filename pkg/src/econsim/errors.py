"""Exception hierarchy for the simulator.

Domain errors (EconsimError subclasses) map to CLI exit code 1,
I/O and configuration problems to exit code 2.
"""


class EconsimError(Exception):
    """Base class for all domain errors."""


# --- scenario / configuration ---------------------------------------------

class ParseError(EconsimError):
    """Scenario file is structurally malformed (bad syntax, unknown field)."""


class ValidationError(EconsimError):
    """Scenario violates a documented invariant.

    Carries the machine-readable diagnostics that triggered it.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"{d.code} at {d.path}: {d.message}" for d in self.diagnostics)
        super().__init__(f"invalid scenario: {lines}")


class DanglingReference(EconsimError):
    """A recipe or occupation references a commodity that does not exist."""


class ConfigError(EconsimError):
    """Run invocation is inconsistent with the loaded configuration."""


# --- agent state / market -------------------------------------------------

class MissingPrice(EconsimError):
    """Net worth requested but a held pooled commodity has no quote."""


class InsufficientFunds(EconsimError):
    pass


class InsufficientInventory(EconsimError):
    pass


class InsufficientLiquidity(EconsimError):
    """Buy quantity would drain the pool's entire inventory reserve."""


class NonPositiveQuantity(EconsimError):
    pass


class Incapacitated(EconsimError):
    """Agent is below the energy/health floor and cannot labor or produce."""


class InvalidAction(EconsimError):
    """Action payload is malformed or not applicable (e.g. eating non-food)."""


class EmptyPopulation(EconsimError):
    pass


class AccountingError(EconsimError):
    """Internal consistency failure: the global currency ledger does not balance."""


# --- analytics --------------------------------------------------------------

class AnalyticsError(EconsimError):
    """Base class for analytics input problems."""


class UnsortedLog(AnalyticsError):
    pass


class EmptyLog(AnalyticsError):
    pass


class InsufficientData(AnalyticsError):
    pass


class NonPositivePrice(AnalyticsError):
    pass


class ZeroVariance(AnalyticsError):
    pass


class EmptyInput(AnalyticsError):
    pass


class MissingCommodity(AnalyticsError):
    pass
