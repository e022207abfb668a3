class NetError(Exception):
    """Malformed net: unbound variables, colour-set violations, bad hierarchy."""


class UnboundVariable(NetError):
    pass


class ColorSetError(NetError):
    pass


class HierarchyError(NetError):
    pass


class FiringError(Exception):
    """Attempt to fire a binding that is not enabled."""
