"""Exception types shared across the package."""


class DatasetFormatError(ValueError):
    """Malformed or inconsistent dataset files (bad records, checksum, non-finite values)."""


class DegenerateDataError(RuntimeError):
    """Data-dependent degeneracy that makes a requested statistic undefined."""


class UndefinedRcError(DegenerateDataError):
    """Relative contrast is undefined because every query's nearest distance is zero."""

    def __init__(self, zero_min_count: int):
        super().__init__(
            f"relative contrast undefined: all {zero_min_count} queries have a zero "
            f"nearest-neighbor distance (exact duplicates)"
        )
        self.zero_min_count = zero_min_count


class ZeroNormError(DegenerateDataError):
    """A zero vector was given to the angular metric."""

    def __init__(self, what: str, index: int | None = None):
        msg = f"angular distance undefined for zero-norm {what}"
        if index is not None:
            msg += f" (id {index})"
        super().__init__(msg)
        self.index = index
