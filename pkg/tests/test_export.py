import hashlib
import json
import zipfile
from io import BytesIO

import pytest

from chipchat.agent.config import load_default_config
from chipchat.agent.llm import ScriptedLlmClient
from chipchat.agent.loop import chat_turn
from chipchat.agent.session import DesignSession
from chipchat.tt.export import ExportError, build_archive, package_export, render_info_yaml

GOOD = open(__file__.replace("test_export.py", "../corpus/04_blue_square/design.v")).read()
FLAWED = GOOD.replace("  assign uio_out = 0;", "  assign uio_out = 0;\n  initial b = 0;", 1)


@pytest.fixture(scope="module")
def config():
    return load_default_config()


@pytest.fixture()
def ready_session(config):
    session = DesignSession(id="exp1")
    llm = ScriptedLlmClient(replies=[f"```verilog\n{GOOD}\n```"])
    chat_turn(session, "a blue square in the middle", config, llm)
    return session


def test_bundle_contents(ready_session, tmp_path):
    manifest = package_export(ready_session, tmp_path / "out")
    root = tmp_path / "out"
    for rel in ("src/project.v", "info.yaml", "docs/info.md", "test/frame0.ppm", "manifest.json"):
        assert (root / rel).exists(), rel
    assert manifest["tiles"] == "1x1"
    assert manifest["top"] == "tt_um_blue_square"
    # project.v is the revision text verbatim
    assert (root / "src/project.v").read_text() == ready_session.revisions[-1].source.text
    # manifest digests match the files on disk
    for rel, digest in manifest["files"].items():
        assert hashlib.sha256((root / rel).read_bytes()).hexdigest() == digest
    # info.yaml carries the tile shape
    info = (root / "info.yaml").read_text()
    assert "tiles: 1x1" in info
    assert "top: tt_um_blue_square" in info


def test_export_idempotent(ready_session, tmp_path):
    package_export(ready_session, tmp_path / "a")
    package_export(ready_session, tmp_path / "b")
    a_files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    for rel in a_files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel
    assert build_archive(tmp_path / "a") == build_archive(tmp_path / "b")


def test_archive_matches_manifest(ready_session, tmp_path):
    manifest = package_export(ready_session, tmp_path / "out")
    archive = build_archive(tmp_path / "out")
    with zipfile.ZipFile(BytesIO(archive)) as zf:
        names = set(zf.namelist())
        for rel, digest in manifest["files"].items():
            assert rel in names
            assert hashlib.sha256(zf.read(rel)).hexdigest() == digest


def test_export_refuses_lint_failure(config, tmp_path):
    session = DesignSession(id="exp2")
    llm = ScriptedLlmClient(replies=[f"```verilog\n{FLAWED}\n```"], repeat_last=True)
    chat_turn(session, "square", config, llm)
    with pytest.raises(ExportError) as exc:
        package_export(session, tmp_path / "no")
    assert exc.value.failing_gate == "lint"
    assert "INITIAL_BLOCK" in str(exc.value)


def test_export_refuses_empty_session(tmp_path):
    with pytest.raises(ExportError) as exc:
        package_export(DesignSession(id="empty"), tmp_path / "no")
    assert exc.value.failing_gate == "revision"


def test_info_yaml_shape():
    text = render_info_yaml("tt_um_x", "1x2", "My Chip", "someone", "it draws things")
    lines = text.splitlines()
    assert lines[0] == "project:"
    assert "  top: tt_um_x" in lines
    assert "  tiles: 1x2" in lines
    assert "  title: My Chip" in lines
    assert "  author: someone" in lines
    # two-space indentation throughout
    assert all(l.startswith("  ") for l in lines[1:])


def test_info_yaml_quotes_tricky_values():
    text = render_info_yaml("tt_um_x", "1x1", 'say "hi": ok', "a", "d")
    assert '"say \\"hi\\": ok"' in text


def test_info_yaml_passthrough_extra():
    text = render_info_yaml("tt_um_x", "1x1", "t", "a", "d", extra={"clock_hz": 25175000})
    assert "  clock_hz: 25175000" in text


def test_docs_stub_mentions_description(ready_session, tmp_path):
    package_export(ready_session, tmp_path / "out")
    md = (tmp_path / "out/docs/info.md").read_text()
    assert "a blue square in the middle" in md
