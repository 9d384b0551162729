import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest

from chipchat.frontend.parser import parse
from chipchat.vga.timing import default_library

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"


@pytest.fixture(scope="session")
def library():
    return default_library()


@pytest.fixture(scope="session")
def corpus_dirs() -> list[Path]:
    dirs = sorted(p.parent for p in CORPUS.glob("*/design.json"))
    assert len(dirs) == 8, "the bundled corpus has eight designs"
    return dirs


@pytest.fixture(scope="session")
def corpus_sources(corpus_dirs) -> dict[str, str]:
    return {d.name: (d / "design.v").read_text() for d in corpus_dirs}


@pytest.fixture(scope="session")
def corpus_meta(corpus_dirs) -> dict[str, dict]:
    return {d.name: json.loads((d / "design.json").read_text()) for d in corpus_dirs}


@pytest.fixture(scope="session")
def blue_square(corpus_sources) -> str:
    return corpus_sources["04_blue_square"]


def top_module_of(text: str) -> str:
    ast = parse(text)
    for m in ast.modules:
        if m.name.startswith("tt_um_"):
            return m.name
    return ast.modules[0].name


# simple designs used across test modules

COUNTER = """
module counter(input clk, input rst_n, output [7:0] q);
  reg [7:0] q_r;
  always @(posedge clk) begin
    if (!rst_n)
      q_r <= 0;
    else
      q_r <= q_r + 1;
  end
  assign q = q_r;
endmodule
"""

SWAP = """
module swap(input clk, input rst_n, input load, input [7:0] av, input [7:0] bv,
            output [7:0] a_out, output [7:0] b_out);
  reg [7:0] a;
  reg [7:0] b;
  always @(posedge clk) begin
    if (load) begin
      a <= av;
      b <= bv;
    end else begin
      a <= b;
      b <= a;
    end
  end
  assign a_out = a;
  assign b_out = b;
endmodule
"""


@pytest.fixture(scope="session")
def counter_src() -> str:
    return COUNTER


@pytest.fixture(scope="session")
def swap_src() -> str:
    return SWAP
