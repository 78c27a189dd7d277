"""Versioned scene-file format and byte-reproducible JSON emission.

Files are plain JSON, but they are emitted by a small writer of our own so
the bytes are a pure function of the content: fixed key order, fixed
indentation, floats with 17 significant digits (enough to round-trip IEEE
doubles exactly). Parsing uses the stdlib and reports file/field context on
any malformed input.
"""

from __future__ import annotations

import json
from typing import Optional

from .geometry import (
    InvalidInputError,
    InvalidInstanceError,
    MapInstance,
    Scene,
)

FORMAT_VERSION = "1"


class MalformedFileError(ValueError):
    """A scene file failed to parse or validate; message carries context."""


def format_float(x: float) -> str:
    """17 significant digits: exact double round-trip, stable bytes."""
    return "%.17g" % float(x)


def _emit(obj, indent: int, lines: list, prefix: str, suffix: str) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            lines.append(f"{pad}{prefix}{{}}{suffix}")
            return
        lines.append(f"{pad}{prefix}{{")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            comma = "," if i + 1 < len(items) else ""
            _emit(v, indent + 1, lines, f"{json.dumps(str(k))}: ", comma)
        lines.append(f"{pad}}}{suffix}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            lines.append(f"{pad}{prefix}[]{suffix}")
            return
        if all(not isinstance(v, (dict, list, tuple)) for v in seq):
            body = ", ".join(_scalar(v) for v in seq)
            lines.append(f"{pad}{prefix}[{body}]{suffix}")
            return
        lines.append(f"{pad}{prefix}[")
        for i, v in enumerate(seq):
            comma = "," if i + 1 < len(seq) else ""
            _emit(v, indent + 1, lines, "", comma)
        lines.append(f"{pad}]{suffix}")
    else:
        lines.append(f"{pad}{prefix}{_scalar(obj)}{suffix}")


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise InvalidInputError(f"cannot serialize value of type {type(v).__name__}")


def to_json_text(obj) -> str:
    """Deterministic pretty JSON: dict order preserved, %.17g floats."""
    lines: list = []
    _emit(obj, 0, lines, "", "")
    return "\n".join(lines) + "\n"


def scene_to_mapping(scene: Scene) -> dict:
    instances = []
    for inst in scene.instances:
        entry = {"class": inst.class_label, "topology": inst.topology}
        if inst.confidence is not None:
            entry["confidence"] = inst.confidence
        entry["points"] = [[float(x), float(y)] for x, y in inst.points]
        instances.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "frame_id": scene.frame_id,
        "extent": [float(v) for v in scene.extent],
        "instances": instances,
    }


def dumps_scene(scene: Scene) -> str:
    return to_json_text(scene_to_mapping(scene))


def _require(mapping: dict, key: str, source: str):
    if key not in mapping:
        raise MalformedFileError(f"{source}: missing field {key!r}")
    return mapping[key]


def _as_float(value, where: str, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedFileError(f"{source}: {where} must be a number, got {value!r}")
    return float(value)


def loads_scene(text: str, source: str = "<string>") -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedFileError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise MalformedFileError(f"{source}: top level must be an object")
    version = _require(doc, "format_version", source)
    if version != FORMAT_VERSION:
        raise MalformedFileError(
            f"{source}: unsupported format_version {version!r} (expected "
            f"{FORMAT_VERSION!r})"
        )
    frame_id = _require(doc, "frame_id", source)
    if not isinstance(frame_id, str):
        raise MalformedFileError(f"{source}: frame_id must be a string")
    extent_raw = _require(doc, "extent", source)
    if not isinstance(extent_raw, list) or len(extent_raw) != 4:
        raise MalformedFileError(f"{source}: extent must be a list of 4 numbers")
    extent = tuple(_as_float(v, f"extent[{i}]", source) for i, v in enumerate(extent_raw))
    raw_instances = _require(doc, "instances", source)
    if not isinstance(raw_instances, list):
        raise MalformedFileError(f"{source}: instances must be a list")

    instances = []
    for i, raw in enumerate(raw_instances):
        where = f"instance {i}"
        if not isinstance(raw, dict):
            raise MalformedFileError(f"{source}: {where} must be an object")
        label = _require(raw, "class", f"{source}: {where}")
        topology = _require(raw, "topology", f"{source}: {where}")
        raw_points = _require(raw, "points", f"{source}: {where}")
        if not isinstance(raw_points, list):
            raise MalformedFileError(f"{source}: {where}: points must be a list")
        points = []
        for k, pt in enumerate(raw_points):
            if not isinstance(pt, list) or len(pt) != 2:
                raise MalformedFileError(
                    f"{source}: {where}: point {k} must be an [x, y] pair"
                )
            points.append(
                [_as_float(v, f"{where} point {k}", source) for v in pt]
            )
        confidence: Optional[float] = None
        if "confidence" in raw:
            confidence = _as_float(raw["confidence"], f"{where}: confidence", source)
        try:
            instances.append(
                MapInstance(label, points, topology=topology, confidence=confidence)
            )
        except InvalidInstanceError as e:
            raise MalformedFileError(f"{source}: {where}: {e}") from None

    try:
        return Scene(instances=tuple(instances), frame_id=frame_id, extent=extent)
    except InvalidInputError as e:
        raise MalformedFileError(f"{source}: {e}") from None


def write_scene(path: str, scene: Scene) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_scene(scene))


def read_scene(path: str) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_scene(fh.read(), source=str(path))
