"""Canonical XML serialization.

Every file the platform writes (manifests, status maps, topologies,
reports) goes through these helpers so output is byte-stable: fixed
attribute order (insertion order), 2-space indent, UTF-8 declaration,
trailing newline, and shortest-round-trip float formatting.
"""

from __future__ import annotations

import os
import tempfile
import xml.etree.ElementTree as ET

_DECLARATION = "<?xml version='1.0' encoding='UTF-8'?>"


def fmt_float(x: float) -> str:
    return repr(float(x))


def to_text(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return _DECLARATION + "\n" + ET.tostring(root, encoding="unicode") + "\n"


def to_bytes(root: ET.Element) -> bytes:
    return to_text(root).encode("utf-8")


def parse_text(text: str | bytes) -> ET.Element:
    return ET.fromstring(text)


def parse_file(path) -> ET.Element:
    return ET.parse(path).getroot()


def write_atomic(path, root: ET.Element) -> None:
    """Write via temp-file-then-rename so readers never see a torn file and
    a crash mid-write leaves the previous version intact."""
    data = to_bytes(root)
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-xml-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
