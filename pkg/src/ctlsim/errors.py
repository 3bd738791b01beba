"""Exception hierarchy for ctlsim."""


class CTLError(Exception):
    """Base class for all errors raised by ctlsim."""


class ModeDomainError(CTLError, ValueError):
    """Mode index outside the first Brillouin zone (j == 0 or |j| > N/2)."""


class NoRootInBracket(CTLError, ValueError):
    """The degeneracy residual does not change sign over the bracket."""


class UnsupportedResonance(CTLError, ValueError):
    pass


class DetuningTooLarge(CTLError, ValueError):
    pass


class StiffnessError(CTLError, RuntimeError):
    """Adaptive integrator could not keep the local error below tolerance."""


class LeakageExceeded(CTLError, RuntimeError):
    """Fock-space truncation lost more than the allowed probability."""


class NotNormalizable(CTLError, ZeroDivisionError):
    """Normalized g2 requested where a first-order correlation vanishes."""


class PoleAtTanSingularity(NotNormalizable):
    """G1 vanishes because cos(xi t) = 0 for the hopping/Raman closed form."""


class NoInteraction(CTLError, ValueError):
    pass


class ConfigError(CTLError, ValueError):
    pass
