"""S-expression reader with source positions."""


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


class Tok(str):
    """An atom; ``kind`` is 'symbol', 'quoted', 'string' or 'keyword'."""

    def __new__(cls, text, line, col, kind="symbol"):
        t = super().__new__(cls, text)
        t.line, t.col, t.kind = line, col, kind
        return t


class SList(list):
    """A parenthesized list remembering where it opened."""

    def __init__(self, items=(), line=None, col=None):
        super().__init__(items)
        self.line, self.col = line, col


def pos(e):
    return getattr(e, "line", None), getattr(e, "col", None)


def parse_sexprs(text):
    out = []
    stack = []
    i, n = 0, len(text)
    line, col0 = 1, 0  # col0 is the index where the current line starts

    def here(k):
        return line, k - col0 + 1

    def emit(x):
        (stack[-1] if stack else out).append(x)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col0 = i + 1
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            ln, cl = here(i)
            stack.append(SList(line=ln, col=cl))
            i += 1
        elif c == ")":
            if not stack:
                raise ParseError("unbalanced ')'", *here(i))
            lst = stack.pop()
            emit(lst)
            i += 1
        elif c == "|":
            ln, cl = here(i)
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", ln, cl)
            body = text[i + 1:j]
            if "\\" in body:
                raise ParseError("backslash inside quoted symbol", ln, cl)
            nl = body.count("\n")
            if nl:
                line += nl
                col0 = i + 1 + body.rfind("\n") + 1
            emit(Tok(body, ln, cl, "quoted"))
            i = j + 1
        elif c == '"':
            ln, cl = here(i)
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", ln, cl)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                if text[j] == "\n":
                    line += 1
                    col0 = j + 1
                buf.append(text[j])
                j += 1
            emit(Tok("".join(buf), ln, cl, "string"))
            i = j + 1
        else:
            ln, cl = here(i)
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            word = text[i:j]
            emit(Tok(word, ln, cl, "keyword" if word.startswith(":") else "symbol"))
            i = j
    if stack:
        lst = stack[-1]
        raise ParseError("unbalanced '(' (missing ')')", lst.line, lst.col)
    return out
