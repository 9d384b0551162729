"""Agent configuration: prompts are data files, not code, so deployments
can swap them without touching the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..source import DesignSource, Origin

MAX_REPAIR_ROUNDS_LIMIT = 10


@dataclass(frozen=True)
class ExamplePair:
    """A few-shot pair: plain-language visual behavior -> reference RTL."""

    name: str
    description: str
    rtl: DesignSource


@dataclass
class LlmSettings:
    endpoint: str = ""
    model: str = ""
    api_key: str | None = None
    temperature: float = 0.2
    max_tokens: int = 4096
    timeout: float = 120.0


@dataclass
class AgentConfig:
    system_prompt: str
    coding_instructions: str
    examples: list[ExamplePair] = field(default_factory=list)
    max_repair_rounds: int = 3
    llm: LlmSettings = field(default_factory=LlmSettings)

    def __post_init__(self):
        if not 0 <= self.max_repair_rounds <= MAX_REPAIR_ROUNDS_LIMIT:
            raise ValueError(f"max_repair_rounds must be between 0 and {MAX_REPAIR_ROUNDS_LIMIT}")


def _data_root():
    return resources.files("chipchat.agent").joinpath("data")


def load_default_examples() -> list[ExamplePair]:
    root = _data_root().joinpath("examples")
    pairs: list[ExamplePair] = []
    names = sorted(
        p.name[:-2] for p in root.iterdir() if p.name.endswith(".v")
    )
    for name in names:
        rtl = root.joinpath(f"{name}.v").read_text("utf-8")
        description = root.joinpath(f"{name}.md").read_text("utf-8").strip()
        pairs.append(ExamplePair(
            name=name,
            description=description,
            rtl=DesignSource(text=rtl, origin=Origin.FIXTURE),
        ))
    return pairs


def load_default_config(max_repair_rounds: int = 3, llm: LlmSettings | None = None) -> AgentConfig:
    return AgentConfig(
        system_prompt=_data_root().joinpath("system_prompt.md").read_text("utf-8"),
        coding_instructions=_data_root().joinpath("coding_instructions.md").read_text("utf-8"),
        examples=load_default_examples(),
        max_repair_rounds=max_repair_rounds,
        llm=llm or LlmSettings(),
    )


def verify_examples(config: AgentConfig) -> None:
    """Startup gate: every bundled example must pass Full validation."""
    from .validate import Depth, validate

    for ex in config.examples:
        report = validate(ex.rtl, Depth.FULL)
        if not (report.functional_ok and report.tapeout_ok):
            problems = "; ".join(report.error_messages()) or "unknown failure"
            raise RuntimeError(
                f"bundled example {ex.name!r} fails validation ({problems}); refusing to start"
            )
