class FbaPomcpError(Exception):
    def __init__(self, message="Planning toolkit error"):
        self.message = message
        super().__init__(self.message)


class InvalidArgumentError(FbaPomcpError, ValueError):
    def __init__(self, message="Invalid argument"):
        super().__init__(message)


class DegeneratePriorError(FbaPomcpError):
    """
    A Dirichlet row has no positive mass, so its expectation is undefined
    """

    def __init__(self, message="Dirichlet row has zero total mass"):
        super().__init__(message)


class ModelInconsistencyError(FbaPomcpError):
    """
    Counts do not have the shape the topology requires
    """

    def __init__(self, message="Counts do not conform to topology"):
        super().__init__(message)


class InvalidPriorError(FbaPomcpError):
    def __init__(self, message="Prior counts must be strictly positive"):
        super().__init__(message)


class EmptyBeliefError(FbaPomcpError):
    def __init__(self, message="Belief has no particles"):
        super().__init__(message)


class BeliefCollapseError(FbaPomcpError):
    """
    Every particle got zero weight: the observation is impossible under the belief
    """

    def __init__(self, message="Belief collapsed: total particle weight is zero"):
        super().__init__(message)


class RejectionTimeoutError(FbaPomcpError):
    def __init__(self, message="Rejection sampling exceeded its attempt budget"):
        super().__init__(message)


class InfeasibleHistoryError(FbaPomcpError):
    def __init__(self, message="History has zero probability under the model"):
        super().__init__(message)


class InsufficientDataError(FbaPomcpError):
    def __init__(self, message="At least two runs are required"):
        super().__init__(message)


class ConfigError(FbaPomcpError):
    def __init__(self, message="Invalid experiment configuration"):
        super().__init__(message)
