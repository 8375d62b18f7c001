"""Parser and formatter for ``.tgn`` state files.

Grammar::

    doc    := header? system state* roles? EOF
    header := "tangnet-spec" "v1"
    system := "system" IDENT "{" party ("," party)* "}"
    party  := IDENT ":" INT
    state  := "state" IDENT "=" term (("+" | "-") term)* ";"
    term   := amp "|" INT ("," INT)* ">"
    amp    := SIGNED_NUMBER | "(" SIGNED_NUMBER ("+" | "-") NUMBER "i" ")"
    roles  := "roles" "{" (IDENT ":" ROLE ";")+ "}"
    ROLE   := "S" | "S1" | "S2" | "E0" | "E1" | "E2"

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError
from ..linalg import max_dim
from ..states import ROLES, MultipartiteSpace, PartitionModel, PureState

NORM_TOL = 1e-6
HEADER = "tangnet-spec"
VERSION = "v1"
KEYWORDS = {"system", "state", "roles"}
PUNCT = set("{}:,=;+-|>()")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<header>tangnet-spec\b)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}:,=;+\-|>()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, FLOAT, KEYWORD, HEADER, PUNCT, EOF, ERROR
    value: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; a lexical error becomes a trailing ERROR token."""
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            tokens.append(Token("ERROR", source[pos], line, col))
            return tokens
        kind = m.lastgroup
        text = m.group()
        if kind == "number":
            is_int = text.isdigit()
            tokens.append(Token("INT" if is_int else "FLOAT", text, line, col))
        elif kind == "ident":
            tokens.append(Token("KEYWORD" if text in KEYWORDS else "IDENT", text, line, col))
        elif kind == "punct":
            tokens.append(Token("PUNCT", text, line, col))
        elif kind == "header":
            tokens.append(Token("HEADER", text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class Term:
    amplitude: complex
    indices: tuple[int, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StateDecl:
    name: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SpecDocument:
    system: str
    parties: tuple[tuple[str, int], ...]
    states: tuple[StateDecl, ...] = ()
    roles: tuple[tuple[str, str], ...] | None = None
    version: str = VERSION

    @property
    def space(self) -> MultipartiteSpace:
        return MultipartiteSpace(self.parties)

    def state_names(self) -> list[str]:
        return [s.name for s in self.states]

    def state(self, name: str | None = None) -> PureState:
        """The named state (first declared when ``name`` is None), renormalized."""
        if not self.states:
            raise KeyError("document declares no states")
        decl = self.states[0] if name is None else next((s for s in self.states if s.name == name), None)
        if decl is None:
            raise KeyError(f"no state named {name!r}; have {self.state_names()}")
        terms = {t.indices: t.amplitude for t in decl.terms}
        return PureState.from_terms(self.space, terms, normalize=True)

    def partition(self) -> PartitionModel | None:
        if self.roles is None:
            return None
        return PartitionModel.infer(dict(self.roles))


def _tok_name(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    if tok.kind == "ERROR":
        return f"character {tok.value!r}"
    return repr(tok.value)


class _Parser:
    def __init__(self, source: str, normalize: bool):
        self.tokens = tokenize(source)
        self.i = 0
        self.normalize = normalize

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, expected, tok: Token | None = None):
        tok = tok or self.tok
        if tok.kind == "ERROR" and not message.startswith("unexpected character"):
            message = f"unexpected character {tok.value!r}"
        raise ParseError(message, tok.line, tok.col, expected)

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind: str, value: str | None = None, label: str | None = None) -> Token:
        if self.at(kind, value):
            t = self.tok
            self.i += 1
            return t
        want = label or (f'"{value}"' if value is not None else kind)
        self.fail(f"unexpected {_tok_name(self.tok)}", [want])

    def punct(self, value: str) -> Token:
        return self.expect("PUNCT", value)

    # doc := header? system state* roles? EOF
    def document(self) -> SpecDocument:
        if self.at("HEADER"):
            self.i += 1
            v = self.expect("IDENT", label=f'"{VERSION}"')
            if v.value != VERSION:
                self.fail(f"unsupported version {v.value!r}", [f'"{VERSION}"'], v)
        if not self.at("KEYWORD", "system"):
            self.fail(f"unexpected {_tok_name(self.tok)}", ['"system"', f'"{HEADER}"'])
        name, parties = self.system()
        dims = dict(parties)
        labels = [p for p, _ in parties]
        states, seen = [], set()
        while self.at("KEYWORD", "state"):
            decl = self.state(labels, dims)
            if decl.name in seen:
                self.fail(f"duplicate state {decl.name!r}", ["IDENT"],
                          Token("IDENT", decl.name, decl.line, decl.col))
            seen.add(decl.name)
            states.append(decl)
        roles = self.roles(dims) if self.at("KEYWORD", "roles") else None
        if not self.at("EOF"):
            want = ["EOF"] if roles is not None else ["EOF", '"state"', '"roles"']
            self.fail(f"unexpected {_tok_name(self.tok)}", want)
        return SpecDocument(name, tuple(parties), tuple(states), roles)

    def system(self):
        self.expect("KEYWORD", "system")
        name = self.expect("IDENT").value
        self.punct("{")
        parties = [self.party()]
        while self.at("PUNCT", ","):
            self.i += 1
            parties.append(self.party())
        if not self.at("PUNCT", "}"):
            self.fail(f"unexpected {_tok_name(self.tok)}", ['","', '"}"'])
        self.i += 1
        seen = set()
        for (label, _), tok in parties:
            if label in seen:
                self.fail(f"duplicate party {label!r}", ["IDENT"], tok)
            seen.add(label)
        total = math.prod(dim for (_, dim), _ in parties)
        if total > max_dim():
            self.fail(f"total dimension {total} exceeds the cap {max_dim()}",
                      [f"dimensions with product <= {max_dim()}"], parties[0][1])
        return name, [p for p, _ in parties]

    def party(self):
        label = self.expect("IDENT")
        self.punct(":")
        dim_tok = self.expect("INT")
        dim = int(dim_tok.value)
        if dim < 2:
            self.fail(f"party {label.value} needs dimension at least 2, got {dim}", ["INT >= 2"], dim_tok)
        return (label.value, dim), label

    def number(self) -> float:
        sign = 1.0
        if self.at("PUNCT", "+") or self.at("PUNCT", "-"):
            sign = -1.0 if self.tok.value == "-" else 1.0
            self.i += 1
        if not (self.at("INT") or self.at("FLOAT")):
            self.fail(f"unexpected {_tok_name(self.tok)}", ["INT", "FLOAT"])
        tok = self.tok
        self.i += 1
        value = float(tok.value)
        if not math.isfinite(value):
            self.fail(f"number {tok.value} is out of range", ["finite number"], tok)
        return sign * value

    def amplitude(self) -> complex:
        if self.at("PUNCT", "("):
            self.i += 1
            re_part = self.number()
            if not (self.at("PUNCT", "+") or self.at("PUNCT", "-")):
                self.fail(f"unexpected {_tok_name(self.tok)}", ['"+"', '"-"'])
            sign = -1.0 if self.tok.value == "-" else 1.0
            self.i += 1
            if not (self.at("INT") or self.at("FLOAT")):
                self.fail(f"unexpected {_tok_name(self.tok)}", ["INT", "FLOAT"])
            tok = self.tok
            self.i += 1
            im = float(tok.value)
            if not math.isfinite(im):
                self.fail(f"number {tok.value} is out of range", ["finite number"], tok)
            self.expect("IDENT", "i")
            self.punct(")")
            return complex(re_part, math.copysign(im, sign))
        if not (self.at("INT") or self.at("FLOAT") or self.at("PUNCT", "+") or self.at("PUNCT", "-")):
            self.fail(f"unexpected {_tok_name(self.tok)}", ["INT", "FLOAT", '"("', '"-"'])
        return complex(self.number(), 0.0)

    def term(self, labels, dims, negate=False) -> Term:
        start = self.tok
        amp = self.amplitude()
        if negate:
            amp = -amp
        self.punct("|")
        idx_toks = [self.expect("INT")]
        while self.at("PUNCT", ","):
            self.i += 1
            idx_toks.append(self.expect("INT"))
        if not self.at("PUNCT", ">"):
            self.fail(f"unexpected {_tok_name(self.tok)}", ['","', '">"'])
        self.i += 1
        if len(idx_toks) != len(labels):
            self.fail(f"basis ket has {len(idx_toks)} indices, system has {len(labels)} parties",
                      [f"{len(labels)} indices"], start)
        indices = tuple(int(t.value) for t in idx_toks)
        for label, k in zip(labels, indices):
            if k >= dims[label]:
                self.fail(f"index {k} out of range for party {label} (dim {dims[label]})",
                          [f"INT < {dims[label]}"], start)
        return Term(amp, indices, start.line, start.col)

    def state(self, labels, dims) -> StateDecl:
        self.expect("KEYWORD", "state")
        name = self.expect("IDENT")
        self.punct("=")
        terms = [self.term(labels, dims)]
        while self.at("PUNCT", "+") or self.at("PUNCT", "-"):
            negate = self.tok.value == "-"
            self.i += 1
            terms.append(self.term(labels, dims, negate))
        if not self.at("PUNCT", ";"):
            self.fail(f"unexpected {_tok_name(self.tok)}", ['"+"', '"-"', '";"'])
        self.i += 1
        seen = set()
        for t in terms:
            if t.indices in seen:
                self.fail(f"basis ket {t.indices} appears twice in state {name.value!r}",
                          ["distinct basis ket"], Token("PUNCT", "|", t.line, t.col))
            seen.add(t.indices)
        norm = math.sqrt(sum(abs(t.amplitude) ** 2 for t in terms))
        if norm == 0.0:
            self.fail(f"state {name.value!r} has zero norm", ["nonzero amplitude"], name)
        if self.normalize:
            terms = [Term(t.amplitude / norm, t.indices, t.line, t.col) for t in terms]
        elif abs(norm - 1.0) > NORM_TOL:
            self.fail(f"state {name.value!r} has norm {norm:.9g}; amplitudes must be normalized "
                      "(or pass --normalize)", ["normalized amplitudes"], name)
        return StateDecl(name.value, tuple(terms), name.line, name.col)

    def roles(self, dims):
        self.expect("KEYWORD", "roles")
        self.punct("{")
        out, seen = [], set()
        while True:
            label = self.expect("IDENT")
            if label.value not in dims:
                self.fail(f"unknown party label {label.value!r}", sorted(dims), label)
            if label.value in seen:
                self.fail(f"duplicate role for party {label.value!r}", ["IDENT"], label)
            seen.add(label.value)
            self.punct(":")
            role = self.expect("IDENT", label="ROLE")
            if role.value not in ROLES:
                self.fail(f"unknown role {role.value!r}", [f'"{r}"' for r in ROLES], role)
            self.punct(";")
            out.append((label.value, role.value))
            if self.at("PUNCT", "}"):
                self.i += 1
                return tuple(out)
            if not self.at("IDENT"):
                self.fail(f"unexpected {_tok_name(self.tok)}", ["IDENT", '"}"'])


def parse(source: str, normalize: bool = False) -> SpecDocument:
    """Parse DSL text, raising :class:`ParseError` with position and expected tokens."""
    if not isinstance(source, str):
        raise TypeError("parse expects text")
    return _Parser(source, normalize).document()


def format_amplitude(z: complex) -> str:
    re_part, im = float(z.real), float(z.imag)
    if im == 0.0 and math.copysign(1.0, im) > 0:
        return repr(re_part)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"({re_part!r}{sign}{abs(im)!r}i)"


def format_document(doc: SpecDocument) -> str:
    """Canonical text; ``parse(format_document(d)) == d`` with bit-exact amplitudes."""
    lines = [f"{HEADER} {doc.version}"]
    parties = ", ".join(f"{label}: {dim}" for label, dim in doc.parties)
    lines.append(f"system {doc.system} {{ {parties} }}")
    for s in doc.states:
        terms = " + ".join(
            f"{format_amplitude(t.amplitude)} |{','.join(str(i) for i in t.indices)}>" for t in s.terms
        )
        lines.append(f"state {s.name} = {terms};")
    if doc.roles is not None:
        body = " ".join(f"{label}: {role};" for label, role in doc.roles)
        lines.append(f"roles {{ {body} }}")
    return "\n".join(lines) + "\n"


def document_from_state(psi: PureState, name: str = "psi", system: str = "U",
                        roles: dict[str, str] | None = None, tol: float = 0.0) -> SpecDocument:
    """Serialize a state's nonzero amplitudes into a one-state document."""
    dims = psi.space.dims
    terms = tuple(
        Term(complex(a), tuple(int(i) for i in np.unravel_index(k, dims)))
        for k, a in enumerate(psi.amplitudes) if abs(a) > tol
    )
    return SpecDocument(
        system, psi.space.parties, (StateDecl(name, terms),),
        tuple(roles.items()) if roles is not None else None,
    )
