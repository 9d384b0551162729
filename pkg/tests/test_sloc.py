import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipchat.frontend.sloc import UnterminatedComment, count_sloc


def test_empty():
    assert count_sloc("") == 0


def test_header_comment_and_blank():
    assert count_sloc("// header\n\nmodule m;\nendmodule\n") == 2


def test_blue_square_is_41(blue_square):
    assert count_sloc(blue_square) == 41


def test_comments_only():
    assert count_sloc("// a\n/* b\nc\nd */\n   // e\n") == 0


def test_code_before_line_comment_counts():
    assert count_sloc("assign x = 1; // trailing\n") == 1


def test_block_comment_spanning_lines():
    assert count_sloc("a /* x\ny\nz */ b\n") == 2  # first and last lines carry code


def test_block_comment_all_enclosed_lines_removed():
    assert count_sloc("/*\nline\nline\n*/\n") == 0


def test_string_hides_comment_markers():
    assert count_sloc('x = "//not a comment";\n') == 1


def test_unterminated_block_comment():
    with pytest.raises(UnterminatedComment):
        count_sloc("module m;\n/* never closed\n")


def test_crlf_equivalent():
    lf = "module m;\n// c\nendmodule\n"
    assert count_sloc(lf) == count_sloc(lf.replace("\n", "\r\n"))


def test_sloc_not_more_than_physical_lines(corpus_sources):
    for text in corpus_sources.values():
        assert count_sloc(text) <= len(text.splitlines())


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_blank_line_insertion_never_changes_count(corpus_sources, data):
    name = data.draw(st.sampled_from(sorted(corpus_sources)))
    text = corpus_sources[name]
    lines = text.split("\n")
    pos = data.draw(st.integers(0, len(lines)))
    blank = data.draw(st.sampled_from(["", "   ", "\t"]))
    mutated = "\n".join(lines[:pos] + [blank] + lines[pos:])
    assert count_sloc(mutated) == count_sloc(text)
