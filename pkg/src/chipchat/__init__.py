"""chipchat: chat-driven VGA chip design playground.

Verilog subset frontend, deterministic cycle-based simulation with VGA
frame capture, Tiny Tapeout pre-flight checks, and an LLM design agent.
"""

__version__ = "0.1.0"
