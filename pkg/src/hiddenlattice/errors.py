"""Exception hierarchy shared by every module of the package."""


class LatticeError(Exception):
    """Base class; the CLI maps every subclass to exit code 1."""

    code = "lattice_error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class NotInvertibleMod(LatticeError):
    code = "not_invertible_mod"

    def __init__(self, message, factor=None):
        super().__init__(message)
        # nontrivial divisor of the modulus discovered along the way, if any
        self.factor = factor

    def to_dict(self):
        d = super().to_dict()
        if self.factor is not None:
            d["factor"] = str(self.factor)
        return d


class CompositeModulus(LatticeError):
    code = "composite_modulus"


class RankDeficient(LatticeError):
    code = "rank_deficient"


class SingularBasis(LatticeError):
    code = "singular_basis"


class DimensionMismatch(LatticeError):
    code = "dimension_mismatch"


class RadiusTooSmall(LatticeError):
    code = "radius_too_small"


class EnumerationBudgetExceeded(LatticeError):
    code = "enumeration_budget_exceeded"


class BudgetExceeded(LatticeError):
    code = "budget_exceeded"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoInvertibleMinor(LatticeError):
    code = "no_invertible_minor"

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class RankMismatch(LatticeError):
    code = "rank_mismatch"


class KernelRankMismatch(LatticeError):
    code = "kernel_rank_mismatch"


class CompletionModeUnavailable(LatticeError):
    code = "completion_mode_unavailable"


class InvalidInstance(LatticeError):
    code = "invalid_instance"


class ParamOutOfRange(LatticeError):
    code = "param_out_of_range"


class ResampleBudgetExceeded(LatticeError):
    code = "resample_budget_exceeded"


class PrimeGenFailure(LatticeError):
    code = "prime_gen_failure"


class BlockAlignmentFailure(LatticeError):
    code = "block_alignment_failure"


class PerBlockFailure(LatticeError):
    code = "per_block_failure"

    def __init__(self, message, block_index=None):
        super().__init__(message)
        self.block_index = block_index

    def to_dict(self):
        d = super().to_dict()
        d["block_index"] = self.block_index
        return d
