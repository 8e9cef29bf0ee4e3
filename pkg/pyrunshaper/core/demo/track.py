"""
Demonstration keypoint tracks.

A demo file is CSV with header ``frame,part,x,y`` and four rows per frame,
one for each of ``r_knee, l_knee, r_foot, l_foot``. Coordinates are relative
to the pelvis. Comment lines starting with ``#`` may precede the header and
carry ``key=value`` metadata (``cadence_s``, ``frames_per_half_step``,
``scale``, ``source``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from pyrunshaper.core.errors import (
    ConfigurationError,
    DemoDataError,
    DemoSchemaError,
    InsufficientDemoError,
)
from pyrunshaper.core.sim.biped import KEYPOINT_PARTS
from pyrunshaper.logging.setup import get_logger

logger = get_logger(__name__)

DEMO_COLUMNS = ("frame", "part", "x", "y")
MIN_FRAMES = 8
COORDINATE_BOUND = 2.0
DEFAULT_FRAMES_PER_HALF_STEP = 4
BUNDLED_DEMOS = ("cartoon", "game", "human")
BUNDLED_DEMO_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(__file__))), "demos")
# Scales this close to 1 leave a track untouched
_IDENTITY_SCALE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DemoFrame:
    """Pelvis-relative knee and foot positions for one demo frame."""
    frame_index: int
    r_knee: np.ndarray
    l_knee: np.ndarray
    r_foot: np.ndarray
    l_foot: np.ndarray

    def parts(self) -> np.ndarray:
        """Positions in r_knee, l_knee, r_foot, l_foot order, shape (4, 2)."""
        return np.stack([self.r_knee, self.l_knee, self.r_foot, self.l_foot])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DemoFrame):
            return NotImplemented
        return (self.frame_index == other.frame_index
                and np.array_equal(self.parts(), other.parts()))


@dataclass(frozen=True, eq=False)
class DemoTrack:
    """
    Cyclic sequence of demo frames.

    Attributes:
        frame_index: Strictly increasing frame numbers, shape (n,)
        positions: Pelvis-relative coordinates, shape (n, 4, 2)
        frames_per_half_step: Recording density
        scale: Meters per original demo unit (1.0 until normalized)
        cadence_s: Seconds between frames in the source, if documented
        source: Free-form origin label
    """
    frame_index: np.ndarray
    positions: np.ndarray
    frames_per_half_step: int = DEFAULT_FRAMES_PER_HALF_STEP
    scale: float = 1.0
    cadence_s: float | None = None
    source: str | None = None
    cyclic: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.positions.ndim != 3 or self.positions.shape[1:] != (4, 2):
            raise DemoDataError(
                f"Demo positions must have shape (n, 4, 2), got {self.positions.shape}")
        if len(self.frame_index) != len(self.positions):
            raise DemoDataError("frame_index and positions differ in length")
        if len(self.positions) < MIN_FRAMES:
            raise InsufficientDemoError(
                f"Demo track has {len(self.positions)} frames; at least "
                f"{MIN_FRAMES} (one gait cycle) are required")
        if np.any(np.diff(self.frame_index) <= 0):
            raise DemoDataError("frame_index must be strictly increasing")
        if not np.all(np.isfinite(self.positions)):
            raise DemoDataError("Demo coordinates must be finite")

    def __len__(self) -> int:
        return len(self.positions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DemoTrack):
            return NotImplemented
        return (np.array_equal(self.frame_index, other.frame_index)
                and np.array_equal(self.positions, other.positions)
                and self.frames_per_half_step == other.frames_per_half_step
                and self.scale == other.scale)

    def frame(self, i: int) -> DemoFrame:
        r_knee, l_knee, r_foot, l_foot = self.positions[i]
        return DemoFrame(int(self.frame_index[i]), r_knee, l_knee, r_foot, l_foot)

    @property
    def frames(self) -> list[DemoFrame]:
        return [self.frame(i) for i in range(len(self))]

    def max_foot_distance(self) -> float:
        """Largest pelvis-to-foot distance over all frames and both feet."""
        feet = self.positions[:, 2:4, :]
        return float(np.max(np.hypot(feet[..., 0], feet[..., 1])))


def _read_metadata(path: str) -> dict[str, str]:
    """Collect ``key=value`` tokens from leading comment lines."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            for token in line[1:].split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    meta[key.strip()] = value.strip()
    return meta


def load_demo(path: str) -> DemoTrack:
    """
    Load and validate a demo track.

    Row numbers in error messages count data rows from 1, excluding the
    header and comment lines.

    Args:
        path: CSV file in the demo format

    Returns:
        DemoTrack sorted by frame index

    Raises:
        DemoSchemaError: Missing column
        DemoDataError: Non-finite or non-numeric value, unknown part,
            duplicate or incomplete frame
        InsufficientDemoError: Fewer than 8 frames
    """
    meta = _read_metadata(path)
    try:
        df = pd.read_csv(path, comment="#", dtype={"part": str},
                         float_precision="round_trip", skip_blank_lines=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise DemoSchemaError(f"Cannot parse demo file {path}: {e}") from e

    df.columns = [str(c).strip() for c in df.columns]
    for column in DEMO_COLUMNS:
        if column not in df.columns:
            raise DemoSchemaError(
                f"Demo file {path} is missing required column '{column}'",
                column=column)

    df["part"] = df["part"].astype(str).str.strip()
    bad_part = ~df["part"].isin(KEYPOINT_PARTS)
    if bad_part.any():
        row = int(np.flatnonzero(bad_part.to_numpy())[0])
        raise DemoDataError(
            f"Unknown part {df['part'].iloc[row]!r} at row {row + 1} of {path}; "
            f"expected one of {', '.join(KEYPOINT_PARTS)}",
            row=row + 1, column="part")

    frames = pd.to_numeric(df["frame"], errors="coerce")
    bad_frame = ~np.isfinite(frames.to_numpy(dtype=np.float64)) | (frames % 1 != 0)
    if bad_frame.any():
        row = int(np.flatnonzero(np.asarray(bad_frame))[0])
        raise DemoDataError(
            f"Invalid frame index {df['frame'].iloc[row]!r} at row {row + 1} of {path}",
            row=row + 1, column="frame")
    df["frame"] = frames.astype(np.int64)

    for column in ("x", "y"):
        values = pd.to_numeric(df[column], errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            part = df["part"].iloc[row]
            raise DemoDataError(
                f"Non-finite value {df[column].iloc[row]!r} in column '{column}' "
                f"({part}_{column}) at row {row + 1} of {path}",
                row=row + 1, column=column)
        df[column] = values

    duplicated = df.duplicated(subset=["frame", "part"], keep="first").to_numpy()
    if duplicated.any():
        row = int(np.flatnonzero(duplicated)[0])
        raise DemoDataError(
            f"Duplicate frame_index {df['frame'].iloc[row]} "
            f"(part {df['part'].iloc[row]}) at row {row + 1} of {path}",
            row=row + 1, column="frame")

    counts = df.groupby("frame")["part"].nunique()
    incomplete = counts[counts != len(KEYPOINT_PARTS)]
    if not incomplete.empty:
        raise DemoDataError(
            f"Frame {int(incomplete.index[0])} of {path} does not list all of "
            f"{', '.join(KEYPOINT_PARTS)}",
            column="part")

    wide = df.pivot(index="frame", columns="part", values=["x", "y"]).sort_index()
    positions = np.stack([
        np.stack([wide[("x", part)].to_numpy(), wide[("y", part)].to_numpy()], axis=-1)
        for part in KEYPOINT_PARTS
    ], axis=1)

    track = DemoTrack(
        frame_index=wide.index.to_numpy(dtype=np.int64),
        positions=positions,
        frames_per_half_step=int(meta.get("frames_per_half_step",
                                          DEFAULT_FRAMES_PER_HALF_STEP)),
        scale=float(meta.get("scale", 1.0)),
        cadence_s=float(meta["cadence_s"]) if "cadence_s" in meta else None,
        source=meta.get("source"),
    )
    logger.debug(f"Loaded demo track {path} with {len(track)} frames")
    return track


def save_demo(track: DemoTrack, path: str, comment: str | None = None) -> None:
    """
    Write a track in the demo CSV format.

    Floats are written at full round-trip precision so that loading the file
    reproduces the track exactly.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    meta: dict[str, Any] = {
        "frames_per_half_step": track.frames_per_half_step,
        "scale": repr(float(track.scale)),
    }
    if track.cadence_s is not None:
        meta["cadence_s"] = repr(float(track.cadence_s))
    if track.source:
        meta["source"] = track.source

    rows = []
    for i, frame in enumerate(track.frame_index):
        for p, part in enumerate(KEYPOINT_PARTS):
            x, y = track.positions[i, p]
            rows.append({"frame": int(frame), "part": part, "x": float(x), "y": float(y)})
    df = pd.DataFrame(rows, columns=list(DEMO_COLUMNS))

    with open(path, "w", encoding="utf-8", newline="") as f:
        if comment:
            f.write(f"# {comment}\n")
        f.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        df.to_csv(f, index=False, float_format=None)


def normalize(track: DemoTrack, leg_length: float) -> DemoTrack:
    """
    Scale a track so its largest pelvis-to-foot distance equals ``leg_length``.

    Args:
        track: Validated track
        leg_length: Standing leg length in meters (thigh + shank)

    Returns:
        Scaled track; ``scale`` accumulates the applied factor

    Raises:
        ConfigurationError: If leg_length is not positive
        DemoDataError: If the track never moves a foot off the pelvis, or
            a normalized coordinate falls outside [-2, 2] m
    """
    if not leg_length > 0.0:
        raise ConfigurationError(f"leg_length must be positive, got {leg_length}")
    max_distance = track.max_foot_distance()
    if max_distance <= 0.0:
        raise DemoDataError("Degenerate demo track: all feet coincide with the pelvis")

    factor = leg_length / max_distance
    if abs(factor - 1.0) <= _IDENTITY_SCALE_TOLERANCE:
        return track

    positions = track.positions * factor
    if np.any(np.abs(positions) > COORDINATE_BOUND):
        raise DemoDataError(
            f"Normalized coordinates exceed ±{COORDINATE_BOUND} m; "
            "knees or feet are far outside the leg's reach")
    return DemoTrack(
        frame_index=track.frame_index.copy(),
        positions=positions,
        frames_per_half_step=track.frames_per_half_step,
        scale=track.scale * factor,
        cadence_s=track.cadence_s,
        source=track.source,
    )


def phase_lookup(track: DemoTrack, control_step: int) -> DemoFrame:
    """Frame aligned with a control step: one frame per step, wrapping around."""
    return track.frame(control_step % len(track))


def resolve_demo(name_or_path: str) -> str:
    """
    Path of a bundled track name or an existing CSV file.

    Raises:
        ConfigurationError: If neither a bundled name nor an existing file
    """
    if name_or_path in BUNDLED_DEMOS:
        return os.path.join(BUNDLED_DEMO_DIR, f"{name_or_path}.csv")
    if os.path.isfile(name_or_path):
        return name_or_path
    raise ConfigurationError(
        f"Demo {name_or_path!r} is neither a bundled track "
        f"({', '.join(BUNDLED_DEMOS)}) nor an existing file")


def load_normalized(name_or_path: str, leg_length: float) -> DemoTrack:
    """Resolve, load and normalize a demo track in one call."""
    return normalize(load_demo(resolve_demo(name_or_path)), leg_length)
