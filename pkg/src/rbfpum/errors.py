"""Exception types shared across the package."""


class CoveringError(Exception):
    """A patch covering is unusable, e.g. a patch holds fewer than 3 points."""


class CoverageError(Exception):
    """An evaluation point is covered by no patch."""


class LocalConditioningError(Exception):
    """A local interpolation matrix is numerically singular."""

    def __init__(self, patch_index, message):
        super().__init__(f"patch {patch_index}: {message}")
        self.patch_index = patch_index


class SolveError(Exception):
    """The global collocation system could not be solved reliably."""
