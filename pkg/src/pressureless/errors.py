"""Exception hierarchy shared by all modules."""


class PressurelessError(Exception):
    """Base class for every error raised by this package."""


# expressions

class ExprSyntaxError(PressurelessError):
    def __init__(self, message, position, source=""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(ExprSyntaxError):
    pass


class UnknownFunction(ExprSyntaxError):
    pass


class DomainError(PressurelessError):
    """Evaluation left the domain of an operation (division by zero, sqrt < 0, overflow)."""


class NonDifferentiable(PressurelessError):
    pass


# scenarios

class InadmissibleScenario(PressurelessError):
    pass


class ConfigError(PressurelessError):
    pass


# characteristics

class CausticError(PressurelessError):
    pass


class NoConvergence(PressurelessError):
    pass


class SingularJacobian(PressurelessError):
    pass


class FrontIntersectionAmbiguous(PressurelessError):
    pass


# front tracking

class ZeroMass(PressurelessError):
    pass


class SideViolation(PressurelessError):
    pass


class StepRejected(PressurelessError):
    pass


class FrontFold(PressurelessError):
    pass


class InsufficientHistory(PressurelessError):
    pass


# variational / closed forms

class BoxTooSmall(PressurelessError):
    pass


class NoJumpDetected(PressurelessError):
    pass


class QuadratureFailure(PressurelessError):
    pass


class StabilityViolated(PressurelessError):
    pass


# oracles / dispersion

class SupportViolation(PressurelessError):
    pass


class BlowUp(PressurelessError):
    def __init__(self, message, time):
        self.time = time
        super().__init__(f"{message} (t={time:.6g})")
