"""Exception hierarchy for backend and configuration failures."""


class HedgeError(Exception):
    pass


class ConfigError(HedgeError):
    """Bad model file, predictor spec, or option value."""


class TransportError(HedgeError):
    """Backend I/O failure after the configured retries."""

    def __init__(self, msg: str, retries: int = 0):
        super().__init__(msg)
        self.retries = retries


class ProtocolError(HedgeError):
    """Malformed backend response."""


class ContractError(HedgeError):
    """Backend returned a probability vector violating the Prediction
    invariants; never silently normalized."""


class CapacityError(HedgeError):
    """An exact enumeration was requested beyond its configured limit."""
