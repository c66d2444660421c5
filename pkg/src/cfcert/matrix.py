"""Exact 2x2 matrix words and randomized identity checking.

A quotient matrix Q(x) is [[x, 1], [1, 0]]; a product of quotient matrices
encodes a continued fraction, so identities between words give rewriting
rules between expansions.  Identities are written in a small text format::

    identity shift_v
    sym v in 2..9
    sym a0 in 1..9
    sym a1 in 1..9 where v^2 | a1
    lhs R(v,-1;0,v) Q(a0) Q(a1)
    rhs Q(a0-1) Q(1) Q(v-1) Q(a1/v^2-1) Q(1) Q(v-1) R(v,-1;0,v)

``where E | s`` (on any sym line) makes the sampler draw s as E times a
value from s's own range, so E must only involve symbols declared before s.
``sym s = EXPR`` defines a derived symbol.
"""

from __future__ import annotations

import ast
import operator
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def quotient(cls, x) -> "Mat2":
        return cls(Fraction(x), Fraction(1), Fraction(1), Fraction(0))

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


class Expr:
    """Arithmetic expression over named integer symbols, evaluated exactly."""

    def __init__(self, text: str):
        self.text = text.strip()
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"bad expression {text!r}") from exc
        self._tree = tree.body
        self.names = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)}
        self._check(self._tree)

    def _check(self, node):
        if isinstance(node, ast.BinOp) and (type(node.op) in _BINOPS or isinstance(node.op, ast.Pow)):
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            self._check(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, int):
            pass
        elif isinstance(node, ast.Name):
            pass
        else:
            raise ParseError(f"unsupported syntax in {self.text!r}")

    def __call__(self, env: dict[str, Fraction]) -> Fraction:
        return self._eval(self._tree, env)

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ParseError(f"undeclared symbol {node.id!r} in {self.text!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        left, right = self._eval(node.left, env), self._eval(node.right, env)
        if isinstance(node.op, ast.Pow):
            if right.denominator != 1:
                raise ParseError(f"non-integer exponent in {self.text!r}")
            return left ** int(right)
        return _BINOPS[type(node.op)](left, right)

    def __repr__(self):
        return self.text


@dataclass(frozen=True)
class Factor:
    kind: str  # "Q" or "R"
    entries: tuple[Expr, ...]

    def matrix(self, env) -> Mat2:
        if self.kind == "Q":
            return Mat2.quotient(self.entries[0](env))
        return Mat2(*(e(env) for e in self.entries))

    def __str__(self):
        if self.kind == "Q":
            return f"Q({self.entries[0]})"
        e = self.entries
        return f"R({e[0]},{e[1]};{e[2]},{e[3]})"


@dataclass(frozen=True)
class MatrixWord:
    factors: tuple[Factor, ...]

    def evaluate(self, env: dict[str, Fraction]) -> Mat2:
        m = Mat2.identity()
        for f in self.factors:
            m = m @ f.matrix(env)
        return m

    @property
    def names(self) -> set[str]:
        return {n for f in self.factors for e in f.entries for n in e.names}

    def __str__(self):
        return " ".join(str(f) for f in self.factors)


_FACTOR_RE = re.compile(r"([QR])\(")


def parse_word(text: str) -> MatrixWord:
    factors = []
    i, s = 0, text.strip()
    while i < len(s):
        if s[i].isspace() or s[i] in "*·":
            i += 1
            continue
        m = _FACTOR_RE.match(s, i)
        if not m:
            raise ParseError(f"expected Q(...) or R(...) at {s[i:]!r}")
        depth, j = 1, m.end()
        while j < len(s) and depth:
            depth += {"(": 1, ")": -1}.get(s[j], 0)
            j += 1
        if depth:
            raise ParseError(f"unbalanced parentheses in {text!r}")
        body = s[m.end():j - 1]
        if m.group(1) == "Q":
            factors.append(Factor("Q", (Expr(body),)))
        else:
            top, sep, bottom = body.partition(";")
            cells = [t for t in top.split(",")] + [t for t in bottom.split(",")]
            if not sep or len(cells) != 4:
                raise ParseError(f"R-matrix needs the form R(r,t;u,s): {body!r}")
            factors.append(Factor("R", tuple(Expr(c) for c in cells)))
        i = j
    return MatrixWord(tuple(factors))


@dataclass(frozen=True)
class Symbol:
    name: str
    lo: int = 0
    hi: int = 0
    multiple_of: tuple[Expr, ...] = ()
    definition: Expr | None = None


@dataclass
class MatrixIdentity:
    name: str
    lhs: MatrixWord
    rhs: MatrixWord
    symbols: list[Symbol] = field(default_factory=list)

    def sample(self, rng: random.Random) -> dict[str, Fraction]:
        env: dict[str, Fraction] = {}
        for s in self.symbols:
            if s.definition is not None:
                env[s.name] = s.definition(env)
                continue
            v = Fraction(rng.randint(s.lo, s.hi))
            for e in s.multiple_of:
                v *= e(env)
            env[s.name] = v
        return env

    def perturbed(self) -> "MatrixIdentity":
        """Copy with the first rhs quotient entry increased by one (a falsification control)."""
        factors = list(self.rhs.factors)
        for i, f in enumerate(factors):
            if f.kind == "Q":
                factors[i] = Factor("Q", (Expr(f"({f.entries[0].text})+1"),))
                break
        else:
            f = factors[0]
            factors[0] = Factor("R", (Expr(f"({f.entries[0].text})+1"),) + f.entries[1:])
        return MatrixIdentity(self.name + "_perturbed", self.lhs, MatrixWord(tuple(factors)), list(self.symbols))


_SYM_RANGE = re.compile(r"^sym\s+(\w+)\s+in\s+(-?\d+)\s*\.\.\s*(-?\d+)\s*(?:where\s+(.+))?$")
_SYM_DEF = re.compile(r"^sym\s+(\w+)\s*=\s*(.+)$")


def parse_identity(text: str) -> MatrixIdentity:
    name, lhs, rhs = "identity", None, None
    symbols: list[Symbol] = []
    divisors: dict[str, list[Expr]] = {}
    for lineno, raw in enumerate(text.strip().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("identity"):
            name = line.split(None, 1)[1].strip() if " " in line else name
        elif m := _SYM_RANGE.match(line):
            sym, lo, hi, where = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
            if where:
                for clause in where.split(","):
                    e, bar, target = clause.partition("|")
                    if not bar or not target.strip().isidentifier():
                        raise ParseError(f"line {lineno}: expected 'where EXPR | SYMBOL'")
                    divisors.setdefault(target.strip(), []).append(Expr(e))
            symbols.append(Symbol(sym, lo, hi))
        elif m := _SYM_DEF.match(line):
            symbols.append(Symbol(m.group(1), definition=Expr(m.group(2))))
        elif line.startswith("lhs"):
            lhs = parse_word(line[3:])
        elif line.startswith("rhs"):
            rhs = parse_word(line[3:])
        else:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}")
    if lhs is None or rhs is None:
        raise ParseError("identity needs both an lhs and an rhs line")
    for i, s in enumerate(symbols):
        if s.name in divisors:
            if s.definition is not None:
                raise ParseError(f"derived symbol {s.name!r} cannot carry a divisibility constraint")
            symbols[i] = Symbol(s.name, s.lo, s.hi, tuple(divisors.pop(s.name)))
    if divisors:
        raise ParseError(f"divisibility constraint on undeclared symbol(s) {sorted(divisors)}")
    declared = {s.name for s in symbols}
    missing = (lhs.names | rhs.names) - declared
    if missing:
        raise ParseError(f"undeclared symbols: {sorted(missing)}")
    return MatrixIdentity(name, lhs, rhs, symbols)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    samples: int
    counterexample: dict[str, Fraction] | None = None
    lhs_value: Mat2 | None = None
    rhs_value: Mat2 | None = None

    def __bool__(self):
        return self.passed


def matrix_word_check(identity: MatrixIdentity, samples: int = 100, seed: int = 0,
                      ranges: dict[str, tuple[int, int]] | None = None) -> CheckResult:
    """Compare both sides exactly at ``samples`` random symbol assignments.

    ``ranges`` overrides declared sampling ranges by symbol name.  Returns the
    first failing assignment, if any.  A zero denominator inside an entry
    propagates as ZeroDivisionError.
    """
    if ranges:
        identity = MatrixIdentity(identity.name, identity.lhs, identity.rhs, [
            Symbol(s.name, *ranges[s.name], s.multiple_of, s.definition) if s.name in ranges else s
            for s in identity.symbols])
    rng = random.Random(seed)
    for i in range(samples):
        env = identity.sample(rng)
        left, right = identity.lhs.evaluate(env), identity.rhs.evaluate(env)
        if left != right:
            return CheckResult(False, i + 1, env, left, right)
    return CheckResult(True, samples)


# Identities relating the expansion of alpha to that of (r alpha + t)/s.  The
# last one encodes the odd-part lift when m = p^2.
IDENTITY_TEXTS = {
    "shift_v_pair": """
        identity shift_v_pair
        sym v in 2..9
        sym a0 in 1..9
        sym a1 in 1..9 where v^2 | a1
        lhs R(v,-1;0,v) Q(a0) Q(a1)
        rhs Q(a0-1) Q(1) Q(v-1) Q(a1/v^2-1) Q(1) Q(v-1) R(v,-1;0,v)
    """,
    "scale_v2_pair": """
        identity scale_v2_pair
        sym v in 2..9
        sym a0 in 1..9 where v^2 | a0
        sym a1 in 1..9
        lhs R(1,v-v^2;0,v^2) Q(a0) Q(a1)
        rhs Q(a0/v^2-1) Q(v-1) Q(1) Q(a1-1) Q(v-1) Q(1) R(1,v-v^2;0,v^2)
    """,
    "divide_v_single": """
        identity divide_v_single
        sym v in 2..9
        sym a0 in 1..9 where v | a0
        lhs R(1,-1;0,v) Q(a0)
        rhs Q(a0/v-1) Q(1) Q(v-1) R(1,-1;0,v)
    """,
    "shift_l_pair": """
        identity shift_l_pair
        sym l in 1..6
        sym k in 1..8
        sym v = l*k + 1
        sym a0 in 1..9
        sym a1 in 1..9 where v^2 | a1
        lhs R(v,-l;0,v) Q(a0) Q(a1)
        rhs Q(a0-1) Q(1) Q((v-l-1)/l) Q(l-1) Q(1) Q(a1/v^2-1) Q(l) Q((v-1)/l) R(v,-l;0,v)
    """,
    "shift_l_pair_alt": """
        identity shift_l_pair_alt
        sym l in 2..6
        sym k in 2..8
        sym v = l*k - 1
        sym a0 in 1..9
        sym a1 in 1..9 where v^2 | a1
        lhs R(v,-l;0,v) Q(a0) Q(a1)
        rhs Q(a0-1) Q(1) Q((v-2*l+1)/l) Q(1) Q(l-1) Q(a1/v^2-1) Q(1) Q(l-2) Q(1) Q((v-l+1)/l) R(v,-l;0,v)
    """,
    "lift_pair": """
        identity lift_pair
        sym p in 2..7
        sym m = p^2
        sym a0 in 0..9
        sym a1 in 1..9 where m | a1
        lhs R(m,p;0,p^2) Q(a0) Q(a1)
        rhs Q(m*a0/p^2) Q(p) Q(-a1/m) Q(-p) R(m,p;0,p^2)
    """,
}


def builtin_identities() -> list[MatrixIdentity]:
    return [parse_identity(t) for t in IDENTITY_TEXTS.values()]
