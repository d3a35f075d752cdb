"""Exception hierarchy shared by the solvers, diagnostics, verification and harness."""


class DampedEulerError(Exception):
    """Base class for all package errors."""


class VacuumError(DampedEulerError):
    """Density (or 1 + (gamma-1) theta) reached zero or below."""


class AmplitudeError(DampedEulerError):
    """Initial perturbation amplitude makes 1 + eps*rho0 non-positive."""


class CFLCollapse(DampedEulerError):
    """Time step fell below the configured floor."""

    def __init__(self, msg, t=None, dt=None):
        super().__init__(msg)
        self.t = t
        self.dt = dt


class HorizonExceeded(DampedEulerError):
    """No blow-up detected before the configured horizon."""

    def __init__(self, msg, horizon=None):
        super().__init__(msg)
        self.horizon = horizon


class OrderCapExceeded(DampedEulerError):
    pass


class InsufficientHistory(DampedEulerError):
    pass


class UnsortedSeries(DampedEulerError):
    pass


class IdentityViolation(DampedEulerError):
    def __init__(self, msg, identity_id=None, point=None, residual=None):
        super().__init__(msg)
        self.identity_id = identity_id
        self.point = point
        self.residual = residual


class OrderFailure(DampedEulerError):
    def __init__(self, msg, order=None):
        super().__init__(msg)
        self.order = order


class InequalityViolation(DampedEulerError):
    def __init__(self, msg, inequality_id=None, witness=None):
        super().__init__(msg)
        self.inequality_id = inequality_id
        self.witness = witness


class Unconfirmed(DampedEulerError):
    """Blow-up times at h and h/2 disagree beyond the relative tolerance."""


class InsufficientData(DampedEulerError):
    pass


class ConfigError(DampedEulerError):
    pass
