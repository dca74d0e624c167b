"""Versioned binary snapshots for checkpoint/resume and mode-set storage.

A snapshot is an ``.npz`` archive holding a JSON header and named float/int
arrays. Object arrays are never stored, so loading needs no pickle.
"""

import io
import json
import zipfile
from typing import Any

import numpy as np

from .errors import SnapshotError, ValidationError
from .field import ModeSet
from .models import FieldModel, RngSpec

SNAPSHOT_FORMAT = "sedatom-snapshot"
SNAPSHOT_VERSION = 1

_HEADER_KEY = "__header__"
_MODE_COLUMNS = ("omega", "amp_cos", "amp_sin", "scale", "polarization", "k_vec", "slot")


def pack(header: dict[str, Any], arrays: dict[str, np.ndarray], kind: str) -> bytes:
    """Serialize ``header`` and ``arrays`` into snapshot bytes.

    Args:
        header: JSON-serializable metadata
        arrays: Named numeric arrays
        kind: Snapshot kind tag checked on load (e.g. "trajectory", "modes")

    Returns:
        The archive bytes.
    """
    meta = {"format": SNAPSHOT_FORMAT, "version": SNAPSHOT_VERSION, "kind": kind, "header": header}
    encoded = np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8)
    buffer = io.BytesIO()
    np.savez(buffer, **{_HEADER_KEY: encoded}, **arrays)
    return buffer.getvalue()


def unpack(blob: bytes, kind: str) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """Inverse of :func:`pack`.

    Raises:
        SnapshotError: If the bytes are truncated or corrupt, or the format,
            version or kind do not match
    """
    try:
        with np.load(io.BytesIO(blob), allow_pickle=False) as archive:
            contents = {name: archive[name] for name in archive.files}
    except (zipfile.BadZipFile, ValueError, OSError, EOFError, KeyError, TypeError, AttributeError) as e:
        raise SnapshotError(f"Snapshot is truncated or corrupt: {e}") from e

    if _HEADER_KEY not in contents:
        raise SnapshotError("Snapshot has no header")
    try:
        meta = json.loads(contents.pop(_HEADER_KEY).tobytes().decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SnapshotError(f"Snapshot header is corrupt: {e}") from e

    if meta.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotError(f"Not a {SNAPSHOT_FORMAT} file")
    if meta.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(
            f"Snapshot version {meta.get('version')} is not supported (expected {SNAPSHOT_VERSION})"
        )
    if meta.get("kind") != kind:
        raise SnapshotError(f"Expected a '{kind}' snapshot, got '{meta.get('kind')}'")
    return meta["header"], contents


def modes_to_arrays(modes: ModeSet, prefix: str = "modes.") -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """Split a ModeSet into JSON metadata and named arrays."""
    meta = {
        "model": modes.model.value,
        "band": [modes.band[0], modes.band[1]],
        "seed": int(modes.rng.seed),
        "stream_id": int(modes.rng.stream_id),
        "grid_origin": modes.grid_origin,
        "spacing": modes.spacing,
        "planar": modes.planar,
        "damping_omega": modes.damping_omega,
    }
    arrays = {prefix + name: np.asarray(getattr(modes, name)) for name in _MODE_COLUMNS}
    return meta, arrays


def modes_from_arrays(meta: dict[str, Any], arrays: dict[str, np.ndarray], prefix: str = "modes.") -> ModeSet:
    """Rebuild a ModeSet written by :func:`modes_to_arrays`."""
    try:
        columns = {}
        for name in _MODE_COLUMNS:
            values = np.array(arrays[prefix + name])
            values.setflags(write=False)
            columns[name] = values
        return ModeSet(
            model=FieldModel(meta["model"]),
            band=(float(meta["band"][0]), float(meta["band"][1])),
            rng=RngSpec(seed=int(meta["seed"]), stream_id=int(meta["stream_id"])),
            grid_origin=float(meta["grid_origin"]),
            spacing=float(meta["spacing"]),
            planar=bool(meta["planar"]),
            damping_omega=meta["damping_omega"],
            **columns,
        )
    except (KeyError, ValueError, TypeError, ValidationError) as e:
        raise SnapshotError(f"Mode data in snapshot is incomplete: {e}") from e


def dump_modes(modes: ModeSet) -> bytes:
    """Serialize a ModeSet on its own."""
    meta, arrays = modes_to_arrays(modes)
    return pack(meta, arrays, kind="modes")


def load_modes(blob: bytes) -> ModeSet:
    """Load a ModeSet written by :func:`dump_modes`."""
    meta, arrays = unpack(blob, kind="modes")
    return modes_from_arrays(meta, arrays)
