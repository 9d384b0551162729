"""Export a validated design as a tapeout-shaped project bundle.

Bundle layout:
    src/project.v      the design source, byte-for-byte
    info.yaml          top module + tile shape + title/author/description
    docs/info.md       short write-up seeded from the chat
    test/frame0.ppm    golden first frame from simulation
    manifest.json      sha256 of every file above

Everything is regenerated deterministically from the session, so exporting
twice produces byte-identical bundles (the zip uses a fixed timestamp).
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
import zipfile
from pathlib import Path

from ..agent.session import DesignSession
from ..agent.validate import Depth, validate
from ..vga.ppm import write_ppm

_ZIP_DATE = (2000, 1, 1, 0, 0, 0)


class ExportError(Exception):
    def __init__(self, failing_gate: str, message: str):
        super().__init__(message)
        self.failing_gate = failing_gate


def _yaml_quote(value: str) -> str:
    if value == "" or any(c in value for c in ":#{}[]&*!|>'\"%@`\n") or value != value.strip():
        return json.dumps(value, ensure_ascii=False)
    return value


def render_info_yaml(top: str, tiles: str, title: str, author: str, description: str,
                     extra: dict | None = None) -> str:
    lines = ["project:"]
    fields = {
        "top": top,
        "tiles": tiles,
        "title": title,
        "author": author,
        "description": description,
    }
    if extra:
        for k, v in extra.items():
            if k not in fields:
                fields[k] = v
    for key, value in fields.items():
        lines.append(f"  {key}: {_yaml_quote(str(value))}")
    return "\n".join(lines) + "\n"


def _gate_check(report: dict) -> None:
    """Raise ExportError naming the first failing gate."""
    if not report.get("parse_ok"):
        raise ExportError("parse", "the design does not parse; fix the syntax errors before exporting")
    iface = report.get("interface") or {}
    if not iface.get("interface_ok"):
        findings = "; ".join(f["message"] for f in iface.get("findings", [])) or "interface mismatch"
        raise ExportError("interface", f"the Tiny Tapeout interface check fails: {findings}")
    lint = report.get("lint") or {}
    if not lint.get("synthesizable"):
        errors = [f for f in lint.get("findings", []) if f.get("severity") == "Error"]
        codes = ", ".join(sorted({f["code"] for f in errors})) or "lint errors"
        raise ExportError("lint", f"the design is not synthesizable ({codes}); fix the lint errors")
    if not report.get("sim_ok"):
        raise ExportError("simulation", f"behavioral simulation fails: {report.get('sim_error') or 'no frames captured'}")
    area = report.get("area") or {}
    if not area.get("fits_supported_tiles", False):
        raise ExportError("area", f"the design needs {area.get('tiles')} tiles, beyond the supported 2x4")


def package_export(
    session: DesignSession,
    dest: str | Path,
    title: str | None = None,
    author: str = "anonymous",
    template_extra: dict | None = None,
    report=None,
) -> dict:
    """Write the bundle under dest/ and return the manifest.

    `report` may carry a precomputed full-depth ValidationReport for the
    latest revision; otherwise one is regenerated here."""
    rev = session.latest_revision()
    if rev is None:
        raise ExportError("revision", "this session has no design yet; ask the agent for one first")

    if report is None or report.depth != Depth.FULL.value or not report.frames:
        report = validate(rev.source, Depth.FULL)
    _gate_check(report.to_dict())

    top = report.interface.detected_top
    tiles = report.area.tiles_str
    description = session.user_messages()[0] if session.user_messages() else f"design {top}"
    if title is None:
        title = description if len(description) <= 60 else description[:57] + "..."

    files: dict[str, bytes] = {
        "src/project.v": rev.source.text.encode("utf-8"),
        "info.yaml": render_info_yaml(top, tiles, title, author, description, template_extra).encode("utf-8"),
        "docs/info.md": (
            f"# {title}\n\n{description}\n\n"
            f"Top module: `{top}`. Tile shape: {tiles}. "
            f"First captured frame: `test/frame0.ppm` "
            f"(sha256 of pixels: {report.frame_digests[0]}).\n"
        ).encode("utf-8"),
        "test/frame0.ppm": write_ppm(report.frames[0]),
    }
    manifest = {
        "top": top,
        "tiles": tiles,
        "revision": rev.number,
        "files": {path: hashlib.sha256(data).hexdigest() for path, data in sorted(files.items())},
    }
    files["manifest.json"] = (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8")

    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    for rel, data in files.items():
        target = dest / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    return manifest


def build_archive(bundle_dir: str | Path) -> bytes:
    """Deterministic zip of an exported bundle."""
    bundle_dir = Path(bundle_dir)
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for path in sorted(p for p in bundle_dir.rglob("*") if p.is_file()):
            info = zipfile.ZipInfo(str(path.relative_to(bundle_dir)), date_time=_ZIP_DATE)
            info.external_attr = 0o644 << 16
            zf.writestr(info, path.read_bytes())
    return buf.getvalue()
