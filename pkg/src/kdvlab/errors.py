"""Exception hierarchy shared by all subpackages."""


class KdvLabError(Exception):
    """Base class for every error raised by kdvlab."""


class ConfigurationError(KdvLabError, ValueError):
    """Invalid grid, operator or experiment configuration."""


class NumericalFault(KdvLabError, RuntimeError):
    """A computation could not be completed for numerical reasons."""


class SingularShiftError(NumericalFault):
    """The shifted operator sigma*I - A_h has a zero pivot."""

    def __init__(self, sigma, detail=""):
        self.sigma = sigma
        msg = f"shifted operator is singular at sigma={sigma!r}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class NearEigenvalueError(NumericalFault):
    """The spectral parameter is (numerically) an eigenvalue of A."""

    def __init__(self, lam, abs_delta):
        self.lam = lam
        self.abs_delta = abs_delta
        super().__init__(
            f"lambda={lam!r} is too close to the spectrum (|Delta|={abs_delta:.3e})"
        )


class ContourError(NumericalFault):
    """The characteristic function vanishes on (or too near) a contour."""


class StepSizeError(NumericalFault):
    """Time step rejected by the advective stability guard."""


class DecayFitError(KdvLabError, ValueError):
    """Not enough usable samples to fit an exponential decay."""


class ZeroDenominatorError(KdvLabError, ValueError):
    """A normalized ratio was requested for inputs that are identically zero."""


class BlowUpError(NumericalFault):
    """The sup-norm guard stopped a run; outputs up to that time are kept."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"blow-up guard tripped at t={t:g}")
