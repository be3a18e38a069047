"""Exception hierarchy shared by all pshlab modules."""


class PshLabError(Exception):
    pass


class StencilOutsideDomain(PshLabError):
    """A finite-difference stencil touched the origin or left the domain ball."""


class NotAvailable(PshLabError):
    """The field carries no closed-form derivatives."""


class ChartSingular(PshLabError):
    """A Hopf chart was evaluated on its excluded set."""


class NodeSingular(PshLabError):
    """An integrand returned a non-finite value at a quadrature node."""


class UnknownEntry(PshLabError):
    pass


class BadParams(PshLabError):
    pass


class NonMonotone(PshLabError):
    """Lelong slopes increased along the ladder beyond tolerance."""


class NotSeparatedForm(PshLabError):
    pass


class RestrictionSingular(PshLabError):
    pass


class OutsideDomain(PshLabError):
    pass


class NonSmoothField(PshLabError):
    """A C^2 computation was requested on a field flagged non-smooth."""


class ConfigError(PshLabError):
    pass


class CheckFailure(PshLabError):
    pass
