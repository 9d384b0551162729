"""Service configuration: flags first, CHIPCHAT_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ServiceConfig:
    data_dir: Path = Path("./chipchat-data")
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    max_sessions: int = 256
    max_body_bytes: int = 1_000_000
    max_repair_rounds: int = 3
    # LLM binding: a mock script path, or an endpoint+model pair
    mock_script: Path | None = None
    llm_endpoint: str = ""
    llm_model: str = ""
    llm_api_key: str | None = None
    ui_dir: Path | None = None

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        cfg = cls(**overrides)
        env = os.environ
        if "CHIPCHAT_DATA_DIR" in env:
            cfg.data_dir = Path(env["CHIPCHAT_DATA_DIR"])
        if "CHIPCHAT_LISTEN" in env:
            listen = env["CHIPCHAT_LISTEN"]
            host, _, port = listen.rpartition(":")
            cfg.host = host or cfg.host
            cfg.port = int(port)
        if "CHIPCHAT_MOCK_SCRIPT" in env:
            cfg.mock_script = Path(env["CHIPCHAT_MOCK_SCRIPT"])
        if "CHIPCHAT_LLM_ENDPOINT" in env:
            cfg.llm_endpoint = env["CHIPCHAT_LLM_ENDPOINT"]
        if "CHIPCHAT_LLM_MODEL" in env:
            cfg.llm_model = env["CHIPCHAT_LLM_MODEL"]
        if "CHIPCHAT_LLM_API_KEY" in env:
            cfg.llm_api_key = env["CHIPCHAT_LLM_API_KEY"]
        if "CHIPCHAT_CORS" in env:
            cfg.cors_origins = [o.strip() for o in env["CHIPCHAT_CORS"].split(",") if o.strip()]
        return cfg

    def ensure_data_dir(self) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        probe = self.data_dir / ".write-probe"
        try:
            probe.write_text("ok")
            probe.unlink()
        except OSError as e:
            raise RuntimeError(f"data directory {self.data_dir} is not writable: {e}") from e
