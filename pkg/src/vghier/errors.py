"""Exception types shared across the toolkit."""


class VghierError(Exception):
    """Base class for all toolkit errors."""


class MalformedInput(VghierError):
    """Input bytes are not a usable SVG document (broken XML, no viewport)."""


class EmptyDocument(VghierError):
    """Document contains no drawable paths."""


class EmptySubset(VghierError):
    """A path-subset argument was empty."""


class UnknownNode(VghierError):
    """Node id not present in the tree."""


class TreeParseError(VghierError):
    """Tree JSON/shorthand could not be parsed."""


class TreeValidationError(VghierError):
    """Tree violates a structural invariant."""


class SamplingExhausted(VghierError):
    """No valid triplet found within the rejection budget."""


class NonFiniteLoss(VghierError):
    """Training produced a NaN/inf loss."""


class SubsetNotNested(VghierError):
    """Oracle affinity queried with a subset that straddles ground-truth groups."""


class UnknownSubset(VghierError):
    """Embedding table has no entry for the queried subset."""


class FormatError(VghierError):
    """Model or embedding-table file is malformed."""


ModelFormatError = FormatError


class LeafSetMismatch(VghierError):
    """Two trees being compared do not share the same leaf set."""


class EmptyGroup(VghierError):
    """Node-overlap queried with an empty group."""


class EmptyScribble(VghierError):
    """Scribble suggestion queried with no touched paths."""


class InvalidSpec(VghierError):
    """Synthetic-generator spec is unusable."""
