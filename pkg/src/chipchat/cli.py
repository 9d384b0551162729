"""Command-line driver for every pipeline stage.

Exit codes everywhere: 0 success, 1 domain failure (lint error, compliance
failure, timing violation, mismatch), 2 usage or I/O error.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .agent.config import load_default_config
from .agent.llm import HttpLlmClient, LlmError, ScriptedLlmClient
from .agent.loop import chat_turn, replay_session
from .agent.session import DesignSession, SessionStore
from .agent.validate import Depth, report_digest, validate
from .frontend.elaborate import ElabError, elaborate
from .frontend.lint import lint_synthesizable
from .frontend.parser import ParseError, parse
from .frontend.sloc import UnterminatedComment, count_sloc
from .sim.engine import SimError, build_sim
from .source import DesignSource, Origin
from .tt.area import DEFAULT_CAPACITY_PER_1X1, estimate_area
from .tt.interface import check_interface
from .vga.capture import TimingViolation, capture_frames
from .vga.ppm import write_png, write_ppm
from .vga.timing import default_library

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as e:
        click.echo(f"cannot read {path}: {e.strerror}", err=True)
        sys.exit(EXIT_USAGE)


def _parse_or_exit(text: str, as_json: bool) -> object:
    try:
        return parse(text)
    except ParseError as e:
        if as_json:
            click.echo(json.dumps({"parse_ok": False,
                                   "errors": [d.to_dict() for d in e.diagnostics]}, indent=2))
        else:
            for d in e.diagnostics:
                click.echo(f"parse error: {d.render()}", err=True)
        sys.exit(EXIT_FAIL)


@click.group()
@click.version_option(package_name="chipchat")
def main():
    """Chat-driven VGA chip design: lint, simulate, pre-flight, chat, serve."""


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def lint(file: str, as_json: bool):
    """Synthesizability lint; exit 0 iff no Errors."""
    text = _read_file(file)
    ast = _parse_or_exit(text, as_json)
    report = lint_synthesizable(ast)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        for f in report.findings:
            click.echo(f"{f.severity.value.lower()}: {f.render()}")
        click.echo(f"synthesizable: {'yes' if report.synthesizable else 'no'}")
    sys.exit(EXIT_OK if report.synthesizable else EXIT_FAIL)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--capacity", type=float, default=DEFAULT_CAPACITY_PER_1X1,
              help="cell units per 1x1 tile")
@click.option("--json", "as_json", is_flag=True)
def check(file: str, capacity: float, as_json: bool):
    """Tapeout pre-flight: interface compliance + tile-area estimate."""
    text = _read_file(file)
    ast = _parse_or_exit(text, as_json)
    compliance = check_interface(ast)
    area = None
    elab_error = None
    if compliance.interface_ok:
        try:
            design = elaborate(ast, compliance.detected_top, default_library())
            area = estimate_area(design, capacity)
        except ElabError as e:
            elab_error = str(e)
    ok = compliance.interface_ok and area is not None and area.fits_supported_tiles
    if as_json:
        click.echo(json.dumps({
            "interface": compliance.to_dict(),
            "area": area.to_dict() if area else None,
            "elaboration_error": elab_error,
            "pass": bool(ok),
        }, indent=2))
    else:
        for f in compliance.findings:
            click.echo(f"error: [{f.code}] {f.message}")
        if elab_error:
            click.echo(f"error: {elab_error}")
        if area:
            click.echo(f"tiles: {area.tiles_str}  (cell units: {area.cell_units:.0f}, "
                       f"utilization: {area.utilization:.0%})")
        click.echo(f"pre-flight: {'pass' if ok else 'fail'}")
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


def _parse_poke(text: str) -> tuple[int, str, int]:
    try:
        assign, _, cycle = text.partition("@")
        name, _, value = assign.partition("=")
        return int(cycle or 0), name.strip(), int(value, 0)
    except ValueError:
        click.echo(f"bad --poke {text!r}; expected name=value@cycle", err=True)
        sys.exit(EXIT_USAGE)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--frames", "n_frames", type=click.IntRange(1, 16), default=1)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--poke", "pokes", multiple=True, help="name=value@cycle, repeatable")
@click.option("--png", "also_png", is_flag=True, help="write PNG next to each PPM")
@click.option("--json", "as_json", is_flag=True)
def render(file: str, n_frames: int, out_dir: str, pokes: tuple[str, ...], also_png: bool, as_json: bool):
    """Simulate FILE and write frame0.ppm .. frameN-1.ppm to --out."""
    text = _read_file(file)
    ast = _parse_or_exit(text, as_json)
    schedule = [_parse_poke(p) for p in pokes]
    tops = [m.name for m in ast.modules if m.name.startswith("tt_um_")]
    if len(tops) != 1:
        click.echo("render needs exactly one tt_um_* module", err=True)
        sys.exit(EXIT_FAIL)
    try:
        design = elaborate(ast, tops[0], default_library())
        sim = build_sim(design)
        for name, value in (("ui_in", 0), ("uio_in", 0), ("ena", 1)):
            sim.poke(name, value)
        sim.reset(2)
        frames = capture_frames(sim, n_frames=n_frames, input_schedule=schedule)
    except (ElabError, SimError, TimingViolation) as e:
        if as_json:
            click.echo(json.dumps({"ok": False, "error": str(e)}, indent=2))
        else:
            click.echo(f"render failed: {e}", err=True)
        sys.exit(EXIT_FAIL)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digests = []
    for frame in frames:
        (out / f"frame{frame.frame_index}.ppm").write_bytes(write_ppm(frame))
        if also_png:
            (out / f"frame{frame.frame_index}.png").write_bytes(write_png(frame))
        digests.append(frame.digest())
    if as_json:
        click.echo(json.dumps({"ok": True, "frames": len(frames), "digests": digests}, indent=2))
    else:
        for i, d in enumerate(digests):
            click.echo(f"frame{i}.ppm  sha256:{d}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def sloc(file: str, as_json: bool):
    """Count effective source lines (no comments, no blanks)."""
    text = _read_file(file)
    try:
        n = count_sloc(text)
    except UnterminatedComment as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_FAIL)
    click.echo(json.dumps({"sloc": n}) if as_json else str(n))
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# chat / replay


def _report_line(report) -> str:
    d = report.to_dict() if hasattr(report, "to_dict") else report
    return (f"functional: {'PASS' if d['functional_ok'] else 'FAIL'}   "
            f"tapeout-ready: {'PASS' if d['tapeout_ok'] else 'FAIL'}   "
            f"tiles: {(d.get('area') or {}).get('tiles', '-')}")


@main.command()
@click.option("--mock", "mock_script", type=click.Path(), help="scripted replies JSON")
@click.option("--endpoint", help="OpenAI-compatible chat completions endpoint")
@click.option("--model", help="model name for --endpoint")
@click.option("--api-key-env", default="CHIPCHAT_LLM_API_KEY", show_default=True,
              help="environment variable holding the API key")
@click.option("--session-dir", type=click.Path(), help="persist the session log here")
@click.option("--once", "once_msg", help="send one message and exit")
@click.option("--max-repair", type=click.IntRange(0, 10), default=3, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="NDJSON transcript output")
def chat(mock_script, endpoint, model, api_key_env, session_dir, once_msg, max_repair, as_json):
    """Chat with the design agent in the terminal."""
    import os

    if mock_script:
        llm = ScriptedLlmClient.from_file(mock_script)
    elif endpoint and model:
        llm = HttpLlmClient(endpoint=endpoint, model=model, api_key=os.environ.get(api_key_env))
    else:
        click.echo("need --mock SCRIPT or --endpoint URL --model NAME", err=True)
        sys.exit(EXIT_USAGE)

    config = load_default_config(max_repair_rounds=max_repair)
    store = None
    if session_dir:
        store = SessionStore(session_dir)
        session = store.create()
    else:
        session = DesignSession(id="local")

    def one_turn(text: str) -> None:
        try:
            outcome = chat_turn(session, text, config, llm, store=store, finalize_full=True)
        except LlmError as e:
            if as_json:
                click.echo(json.dumps({"error": str(e), "retry": e.retry_guidance}))
            else:
                click.echo(f"transport error: {e} ({e.retry_guidance})", err=True)
            sys.exit(EXIT_FAIL)
        if as_json:
            click.echo(json.dumps({
                "reply": outcome.reply,
                "revision": outcome.revision,
                "report": outcome.report.to_dict() if outcome.report else None,
                "llm_calls": outcome.llm_calls,
                "transcript_digest": session.transcript_digest(),
            }, sort_keys=True))
        else:
            for t in session.turns[-(2 + 2 * (outcome.llm_calls - 1)):]:
                prefix = {"user": "you", "agent": "agent", "validator": "validator"}[t.role]
                click.echo(f"{prefix}> {t.text}\n")
            if outcome.report is not None:
                click.echo(_report_line(outcome.report))

    if once_msg:
        one_turn(once_msg)
        sys.exit(EXIT_OK)

    interactive = sys.stdin.isatty()
    if interactive and not as_json:
        click.echo("describe the design you want (ctrl-d to quit)")
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        one_turn(line)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("logfile", type=click.Path())
@click.option("--mock", "mock_script", type=click.Path(), required=True)
@click.option("--json", "as_json", is_flag=True)
def replay(logfile: str, mock_script: str, as_json: bool):
    """Re-run a recorded session against its mock; exit 0 iff identical."""
    path = Path(logfile)
    if not path.exists():
        click.echo(f"no such session log: {logfile}", err=True)
        sys.exit(EXIT_USAGE)
    store = SessionStore(path.parent.parent)
    recorded = store.load(path.stem)
    llm = ScriptedLlmClient.from_file(mock_script)
    config = load_default_config()
    fresh = replay_session(recorded, config, llm)
    old, new = recorded.transcript_digest(), fresh.transcript_digest()
    same = old == new
    if as_json:
        click.echo(json.dumps({"recorded": old, "replayed": new, "identical": same}, indent=2))
    else:
        click.echo(f"recorded: {old}\nreplayed: {new}\n{'identical' if same else 'DIFFERENT'}")
    sys.exit(EXIT_OK if same else EXIT_FAIL)


# ---------------------------------------------------------------------------
# corpus


def _corpus_one(args: tuple[str, float]) -> dict:
    design_dir, capacity = args
    d = Path(design_dir)
    meta = json.loads((d / "design.json").read_text("utf-8"))
    text = (d / "design.v").read_text("utf-8")
    report = validate(DesignSource(text=text, origin=Origin.FIXTURE),
                      Depth.FULL, capacity_per_1x1=capacity)
    rd = report.to_dict()
    row = {
        "name": meta.get("name", d.name),
        "category": meta.get("category", "?"),
        "sloc": rd["sloc"],
        "tiles": (rd.get("area") or {}).get("tiles", "-"),
        "functional_ok": rd["functional_ok"],
        "tapeout_ok": rd["tapeout_ok"],
        "frame0_digest": rd["frame_digests"][0] if rd["frame_digests"] else None,
        "errors": report.error_messages(),
    }
    ok = row["functional_ok"] and row["tapeout_ok"]
    if ok and "expected_tiles" in meta and row["tiles"] != meta["expected_tiles"]:
        ok = False
        row["errors"].append(f"tiles {row['tiles']} != expected {meta['expected_tiles']}")
    if ok and "expected_sloc" in meta and row["sloc"] != meta["expected_sloc"]:
        ok = False
        row["errors"].append(f"sloc {row['sloc']} != expected {meta['expected_sloc']}")
    if ok and meta.get("expected_frame0_digest") and row["frame0_digest"] != meta["expected_frame0_digest"]:
        ok = False
        row["errors"].append("frame0 digest does not match the committed golden")
    row["pass"] = ok
    return row


@main.group()
def corpus():
    """Operations over a directory of bundled designs."""


@corpus.command(name="run")
@click.argument("directory", type=click.Path())
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True,
              help="validate designs in parallel")
@click.option("--capacity", type=float, default=DEFAULT_CAPACITY_PER_1X1)
@click.option("--json", "as_json", is_flag=True)
def corpus_run(directory: str, jobs: int, capacity: float, as_json: bool):
    """Full validation over every design; Table-style report; exit 0 iff all pass."""
    root = Path(directory)
    design_dirs = sorted(str(p.parent) for p in root.glob("*/design.json"))
    if not design_dirs:
        click.echo(f"no designs under {directory} (need <dir>/design.json)", err=True)
        sys.exit(EXIT_USAGE)
    work = [(d, capacity) for d in design_dirs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_corpus_one, work))
    else:
        rows = [_corpus_one(w) for w in work]

    all_pass = all(r["pass"] for r in rows)
    if as_json:
        click.echo(json.dumps({"designs": rows, "all_pass": all_pass}, indent=2, sort_keys=True))
    else:
        header = f"{'design':<22} {'category':<14} {'sloc':>5} {'tiles':>6}  {'functional':<10} {'tapeout':<8}"
        click.echo(header)
        click.echo("-" * len(header))
        for r in rows:
            click.echo(f"{r['name']:<22} {r['category']:<14} {r['sloc']:>5} {r['tiles']:>6}  "
                       f"{'yes' if r['functional_ok'] else 'NO':<10} "
                       f"{'yes' if r['tapeout_ok'] else 'NO':<8}"
                       + ("" if r["pass"] else "  <- FAIL"))
            for e in r["errors"]:
                click.echo(f"    ! {e}")
        click.echo(f"{sum(r['pass'] for r in rows)}/{len(rows)} designs pass")
    sys.exit(EXIT_OK if all_pass else EXIT_FAIL)


# ---------------------------------------------------------------------------
# serve


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--data-dir", type=click.Path(), default="./chipchat-data", show_default=True)
@click.option("--mock", "mock_script", type=click.Path(), help="scripted LLM replies (mock mode)")
@click.option("--endpoint", help="OpenAI-compatible endpoint URL")
@click.option("--model", help="model name")
@click.option("--cors", multiple=True, help="allowed CORS origin, repeatable")
@click.option("--ui-dir", type=click.Path(), help="serve this directory as the web UI")
def serve(listen, data_dir, mock_script, endpoint, model, cors, ui_dir):
    """Run the HTTP service (environment overrides: CHIPCHAT_*)."""
    import uvicorn

    from .service.app import create_app
    from .service.config import ServiceConfig

    host, _, port = listen.rpartition(":")
    config = ServiceConfig.from_env(
        data_dir=Path(data_dir),
        host=host or "127.0.0.1",
        port=int(port),
        mock_script=Path(mock_script) if mock_script else None,
        llm_endpoint=endpoint or "",
        llm_model=model or "",
        cors_origins=list(cors) or ["*"],
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    if config.mock_script is None and not (config.llm_endpoint and config.llm_model):
        click.echo("need --mock SCRIPT or --endpoint URL --model NAME "
                   "(or CHIPCHAT_MOCK_SCRIPT / CHIPCHAT_LLM_ENDPOINT+MODEL)", err=True)
        sys.exit(EXIT_USAGE)
    from .agent.config import verify_examples

    click.echo("verifying the bundled example designs...")
    try:
        verify_examples(load_default_config())
    except RuntimeError as e:
        click.echo(f"refusing to start: {e}", err=True)
        sys.exit(EXIT_FAIL)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


if __name__ == "__main__":
    main()
