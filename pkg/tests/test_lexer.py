import pytest

from copri.errors import LexError
from copri.lexer import EOF, IDENTIFIER, KEYWORD, LITERAL, PUNCT, tokenize


def lexemes(src):
    return [t.lexeme for t in tokenize(src) if t.kind != EOF]


def test_char_array_declaration():
    assert lexemes("char[10] accNo;") == ["char", "[", "10", "]", "accNo", ";"]


def test_empty_source_is_just_eof():
    toks = tokenize("")
    assert len(toks) == 1 and toks[0].kind == EOF


def test_call_site():
    assert lexemes("account.getBalance()") == ["account", ".", "getBalance", "(", ")"]


def test_kinds_and_values():
    toks = tokenize('concept x 1 2.5 "a\\n" ... == null')
    kinds = [t.kind for t in toks]
    assert kinds == [KEYWORD, IDENTIFIER, LITERAL, LITERAL, LITERAL, PUNCT, PUNCT, KEYWORD, EOF]
    assert toks[2].value == 1 and isinstance(toks[2].value, int)
    assert toks[3].value == 2.5
    assert toks[4].value == "a\n"


@pytest.mark.parametrize("word", [
    "concept", "reference", "object", "in", "super", "sub", "this", "new", "continue",
    "create", "delete", "if", "else", "while", "return", "null", "true", "false",
    "static", "void", "double", "int", "boolean", "String", "char", "Object", "Map",
])
def test_keywords(word):
    assert tokenize(word)[0].kind == KEYWORD


def test_comments_and_positions():
    toks = tokenize("a // comment ( \n  b")
    assert [(t.lexeme, t.line, t.column) for t in toks[:2]] == [("a", 1, 1), ("b", 2, 3)]


def test_longest_punctuation_wins():
    assert lexemes("a<=b!=c&&d||e") == ["a", "<=", "b", "!=", "c", "&&", "d", "||", "e"]


def test_every_lexeme_is_a_source_substring():
    src = 'concept A reference { int x = 3; } object { String s = "q"; }'
    for t in tokenize(src)[:-1]:
        assert t.lexeme and t.lexeme in src


def test_unterminated_string():
    with pytest.raises(LexError) as e:
        tokenize('x = "abc')
    assert (e.value.line, e.value.column) == (1, 5)


def test_illegal_character():
    with pytest.raises(LexError) as e:
        tokenize("a\n  # b")
    assert (e.value.line, e.value.column) == (2, 3)


def test_determinism(corpus_dir):
    for path in corpus_dir.glob("*.cop"):
        src = path.read_text()
        assert len(tokenize(src)) == len(tokenize(src))
