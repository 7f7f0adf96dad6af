"""Exception hierarchy with stable machine-readable codes.

Every domain error carries a ``code`` string that the CLI surfaces verbatim,
so scripts can dispatch on it without parsing messages.
"""


class TropicorrError(Exception):
    code = "Error"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class BadSubdivision(TropicorrError):
    code = "BadSubdivision"


class NotStabilizable(TropicorrError):
    code = "NotStabilizable"


class NotBalanced(TropicorrError):
    code = "NotBalanced"


class NonCollinear(TropicorrError):
    code = "NonCollinear"


class GenusNotOne(TropicorrError):
    code = "GenusNotOne"


class ConstraintCountMismatch(TropicorrError):
    code = "ConstraintCountMismatch"


class ConstraintUnsatisfied(TropicorrError):
    code = "ConstraintUnsatisfied"


class ZeroSlopeCycleEdge(TropicorrError):
    code = "ZeroSlopeCycleEdge"


class NotASubdivision(TropicorrError):
    code = "NotASubdivision"


class IndexInfinite(TropicorrError):
    code = "IndexInfinite"


class SublatticeNotContained(TropicorrError):
    code = "SublatticeNotContained"


class RayNotInFan(TropicorrError):
    code = "RayNotInFan"


class NotReduced(TropicorrError):
    code = "NotReduced"


class ObstructionNonzero(TropicorrError):
    code = "ObstructionNonzero"


class HypothesisFailed(TropicorrError):
    """A counting theorem hypothesis does not hold; ``flag`` names the first
    violated one."""

    def __init__(self, flag, message=""):
        self.flag = flag
        self.code = "HypothesisFailed:" + flag
        super().__init__(message or self.code)


class ParseError(TropicorrError):
    code = "ParseError"
