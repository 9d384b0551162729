from .config import AgentConfig, ExamplePair, LlmSettings, load_default_config, verify_examples
from .extract import extract_code
from .llm import HttpLlmClient, LlmError, ScriptedLlmClient, prompt_digest
from .loop import ChatOutcome, chat_turn, replay_session
from .prompt import build_prompt
from .session import DesignSession, Revision, SessionStore, Status, Turn
from .validate import Depth, ValidationReport, report_digest, validate

__all__ = [
    "AgentConfig", "ExamplePair", "LlmSettings", "load_default_config", "verify_examples",
    "extract_code", "HttpLlmClient", "LlmError", "ScriptedLlmClient", "prompt_digest",
    "ChatOutcome", "chat_turn", "replay_session", "build_prompt",
    "DesignSession", "Revision", "SessionStore", "Status", "Turn",
    "Depth", "ValidationReport", "report_digest", "validate",
]
