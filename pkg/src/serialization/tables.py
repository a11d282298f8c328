"""Delimited-text tables: the label table and the encoding export."""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from src.encoding.representation import EncodedVideo
from src.exceptions import FormatError
from src.serialization.binary import PathLike

logger = logging.getLogger(__name__)

LABEL_COLUMNS = ["video_id", "label", "split"]
SPLITS = ("train", "test")


def write_labels(table: pd.DataFrame, path: PathLike):
    """Write a ``video_id,label,split`` table."""
    missing = set(LABEL_COLUMNS) - set(table.columns)
    if missing:
        raise FormatError(f"Label table lacks columns {sorted(missing)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table[LABEL_COLUMNS].to_csv(path, index=False)


def read_labels(path: PathLike) -> pd.DataFrame:
    """Read and validate a label table.

    Raises:
        FormatError: On missing columns, unknown splits or duplicate ids
    """
    try:
        table = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise FormatError(f"Label table not found: {path}") from None
    if list(table.columns) != LABEL_COLUMNS:
        raise FormatError(
            f"{path}: expected columns {LABEL_COLUMNS}, got {list(table.columns)}"
        )
    unknown = set(table["split"]) - set(SPLITS)
    if unknown:
        raise FormatError(f"{path}: unknown split values {sorted(unknown)}")
    if table["video_id"].duplicated().any():
        raise FormatError(f"{path}: duplicate video ids")
    return table


def export_encodings_text(encodings: Sequence[EncodedVideo], path: PathLike):
    """One line per video: id, method, then the values at full precision."""
    rows = [
        [encoded.video_id, encoded.method.value, *encoded.vector.tolist()]
        for encoded in encodings
    ]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(path, header=False, index=False, float_format="%.17g")
    logger.info("Exported %d encodings to %s", len(rows), path)


def read_encodings_text(path: PathLike) -> pd.DataFrame:
    """Read a text export back; index is the video id, columns method + values."""
    try:
        frame = pd.read_csv(
            path,
            header=None,
            dtype={0: str, 1: str},
            float_precision="round_trip",
        )
    except FileNotFoundError:
        raise FormatError(f"Encoding export not found: {path}") from None
    frame = frame.set_index(0)
    frame.index.name = "video_id"
    frame = frame.rename(columns={1: "method"})
    values = frame.drop(columns="method").to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: non-finite or ragged encoding rows")
    return frame
