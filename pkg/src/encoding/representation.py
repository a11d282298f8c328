"""Fixed-length video representations."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.exceptions import ConfigError, DimensionMismatchError, InvalidInputError
from src.words.modeling import WordKind

UNIT_NORM_TOL = 1e-10


class EncodingMethod(Enum):
    """Aggregation scheme that produced an encoding."""

    BOVW = "bovw"
    VLAD = "vlad"
    FV = "fv"
    MEAN = "mean"
    LOW_LEVEL_FV = "llfv"
    LOW_LEVEL_BOVW = "llbovw"
    LOW_LEVEL_VLAD = "llvlad"

    @classmethod
    def parse(cls, value) -> "EncodingMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(
                f"Unknown encoder '{value}' (expected one of: "
                f"{', '.join(m.value for m in cls)})"
            ) from None

    @property
    def is_normalized(self) -> bool:
        return self in (
            EncodingMethod.VLAD,
            EncodingMethod.FV,
            EncodingMethod.LOW_LEVEL_FV,
            EncodingMethod.LOW_LEVEL_VLAD,
        )

    def expected_length(self, n_codewords: int, dim: int) -> int:
        """Vector length: M*K (BoVW), M*D (VLAD), 2*M*D (FV), d (mean) or M (llbovw)."""
        if self is EncodingMethod.MEAN:
            return dim
        if self is EncodingMethod.LOW_LEVEL_BOVW:
            return n_codewords
        if self in (EncodingMethod.FV, EncodingMethod.LOW_LEVEL_FV):
            return 2 * n_codewords * dim
        return n_codewords * dim


@dataclass(frozen=True, eq=False)
class EncodedVideo:
    """Encoding of one video.

    Attributes:
        video_id: Source video
        method: Encoder that produced the vector
        vector: The representation
        kind: Word kind, None for the low-level baselines
        n_codewords: M (universal components for the low-level FV, k-means
            centers for the low-level BoVW and VLAD)
        dim: K for BoVW, D for VLAD / FV, d for the baselines

    Raises:
        DimensionMismatchError: If the length does not match the method
        InvalidInputError: If entries are not finite, or a normalized
            encoding is neither unit-norm nor all-zero
    """

    video_id: str
    method: EncodingMethod
    vector: np.ndarray
    kind: Optional[WordKind]
    n_codewords: int
    dim: int

    def __post_init__(self):
        vector = np.array(self.vector, dtype=np.float64).ravel()
        expected = self.method.expected_length(self.n_codewords, self.dim)
        if vector.size != expected:
            raise DimensionMismatchError(
                f"{self.method.name} encoding of '{self.video_id}' has length "
                f"{vector.size}, expected {expected}"
            )
        if not np.all(np.isfinite(vector)):
            raise InvalidInputError(f"Encoding of '{self.video_id}' is not finite")
        if self.method.is_normalized and np.any(vector != 0):
            norm = float(np.linalg.norm(vector))
            if abs(norm - 1.0) > UNIT_NORM_TOL:
                raise InvalidInputError(
                    f"{self.method.name} encoding of '{self.video_id}' has norm {norm}"
                )
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)

    @property
    def length(self) -> int:
        return self.vector.size
