"""Exception types shared across the package."""


class NoseError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NoseError, ValueError):
    """An argument falls outside its mathematical domain."""


class DataShapeError(NoseError, ValueError):
    """Data does not match the layout required by the chosen scenario."""


class NumericError(NoseError, ArithmeticError):
    """A computation produced a non-finite or otherwise invalid value."""


class InsufficientDrawsError(NoseError, ValueError):
    """Too few posterior samples to carry out an estimate."""


class ChainDivergedError(NoseError, RuntimeError):
    """An MCMC chain reached a non-finite state.

    Carries the offending move name and iteration index so failures can be
    traced back to a specific update.
    """

    def __init__(self, move: str, iteration: int, chain: int | None = None):
        self.move = move
        self.iteration = iteration
        self.chain = chain
        where = f" (chain {chain})" if chain is not None else ""
        super().__init__(
            f"non-finite sampler state after move '{move}' at iteration {iteration}{where}"
        )
