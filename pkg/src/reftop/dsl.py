"""Sectioned text format for curve family definitions.

Sections: [symbols] (generator and adjoined algebraic constants),
[curve] (x, y, sigma, the declared y dx factorization, and the invariant
generator in x), [time] (t = T(s) and optional closed-form data),
[points] (the chosen half of special points with residue parameter
names), [cycles] (generalized cycles with weight expressions).
Expressions use identifiers, integers, + - * / ^ and parentheses;
comments start with #.  Errors carry line and column.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import Context, SymbolKind
from .curve import (
    CurveError,
    CurveFamily,
    GeneralizedCycle,
    PPlusPoint,
    TimeSpec,
    involution_from_expr,
)
from .poly import ParamPoly
from .ratfun import FactoredRat
from .series import INFINITY


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# -- tokenizer ---------------------------------------------------------

@dataclass
class Token:
    kind: str  # name, int, op, colon, lparen, rparen, end
    text: str
    line: int
    col: int


_OPS = set("+-*/^")


def _tokenize(text: str, line: int) -> list[Token]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(Token("int", text[i:j], line, col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("name", text[i:j], line, col))
            i = j
        elif ch in _OPS:
            out.append(Token("op", ch, line, col))
            i += 1
        elif ch == "(":
            out.append(Token("lparen", ch, line, col))
            i += 1
        elif ch == ")":
            out.append(Token("rparen", ch, line, col))
            i += 1
        elif ch == ":":
            out.append(Token("colon", ch, line, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    out.append(Token("end", "", line, len(text) + 1))
    return out


# -- expression AST ----------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_end(self):
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)

    def parse_expr(self, min_bp: int = 0):
        tok = self.next()
        if tok.kind == "int":
            left = ("num", Fraction(tok.text))
        elif tok.kind == "name":
            left = ("name", tok.text, tok)
        elif tok.kind == "lparen":
            left = self.parse_expr(0)
            closing = self.next()
            if closing.kind != "rparen":
                raise ParseError("expected ')'", closing.line, closing.col)
        elif tok.kind == "op" and tok.text == "-":
            left = ("neg", self.parse_expr(30))
        elif tok.kind == "op" and tok.text == "+":
            left = self.parse_expr(30)
        else:
            raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)
        while True:
            tok = self.peek()
            if tok.kind != "op":
                break
            bp = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}[tok.text]
            if bp < min_bp:
                break
            self.next()
            right = self.parse_expr(bp + (0 if tok.text == "^" else 1))
            left = ("bin", tok.text, left, right, tok)
        return left


def _parse_expression(text: str, line: int):
    parser = _Parser(_tokenize(text, line))
    ast = parser.parse_expr()
    parser.expect_end()
    return ast


def _eval_ast(ast, env: dict[str, FactoredRat], ctx: Context) -> FactoredRat:
    kind = ast[0]
    if kind == "num":
        return FactoredRat.const(ctx, ast[1])
    if kind == "name":
        name, tok = ast[1], ast[2]
        if name not in env:
            raise ParseError(f"unknown symbol {name!r}", tok.line, tok.col)
        return env[name]
    if kind == "neg":
        return -_eval_ast(ast[1], env, ctx)
    op, left, right, tok = ast[1], ast[2], ast[3], ast[4]
    a = _eval_ast(left, env, ctx)
    if op == "^":
        if right[0] == "neg" and right[1][0] == "num":
            right = ("num", -right[1][1])
        if right[0] != "num" or right[1].denominator != 1:
            raise ParseError("exponent must be an integer", tok.line, tok.col)
        return a ** int(right[1])
    b = _eval_ast(right, env, ctx)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b.is_zero():
        raise ParseError("division by zero", tok.line, tok.col)
    return a / b


def _factor_list(ast, env, ctx, line: int):
    """Interpret an expression as scalar * product of polynomial factors."""
    num: list[tuple[ParamPoly, int]] = []
    den: list[tuple[ParamPoly, int]] = []
    scalar = FactoredRat.const(ctx, 1)

    def walk(node, inverted: bool):
        nonlocal scalar
        if node[0] == "bin" and node[1] == "*":
            walk(node[2], inverted)
            walk(node[3], inverted)
            return
        if node[0] == "bin" and node[1] == "/":
            walk(node[2], inverted)
            walk(node[3], not inverted)
            return
        if node[0] == "neg":
            scalar = -scalar
            walk(node[1], inverted)
            return
        power = 1
        if node[0] == "bin" and node[1] == "^":
            exp = node[3]
            if exp[0] != "num" or exp[1].denominator != 1 or exp[1] < 0:
                raise ParseError("factor exponent must be a nonnegative integer", line, 1)
            power = int(exp[1])
            node = node[2]
        value = _eval_ast(node, env, ctx)
        if value.den:
            raise ParseError("declared factor must be polynomial", line, 1)
        if value.is_constant():
            c = value.constant_value() ** power
            scalar = scalar / c if inverted else scalar * c
            return
        (den if inverted else num).append((value.num, power))

    walk(ast, False)
    return scalar, num, den


# -- curve document ----------------------------------------------------

def _split_sections(text: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ParseError("content before the first section header", lineno, 1)
        sections[current].append((lineno, stripped))
    return sections


def _key_value(entries: list[tuple[int, str]]) -> dict[str, tuple[int, str]]:
    out: dict[str, tuple[int, str]] = {}
    for lineno, line in entries:
        if "=" not in line:
            raise ParseError("expected 'key = expression'", lineno, 1)
        key, value = line.split("=", 1)
        out[key.strip()] = (lineno, value.strip())
    return out


def parse_curve(text: str, name: str = "curve") -> CurveFamily:
    sections = _split_sections(text)
    for required in ("symbols", "curve", "time", "points"):
        if required not in sections:
            raise ParseError(f"missing [{required}] section", 1, 1)

    ctx = Context()
    ctx.point_var(0)  # canonical first point variable comes first
    qsym = ctx.declare("Q", SymbolKind.REFINEMENT)
    zsym = ctx.declare("z", SymbolKind.POINT)
    xsym = ctx.declare("x", SymbolKind.POINT)

    env: dict[str, FactoredRat] = {"Q": FactoredRat.var(ctx, qsym)}
    generator = None
    for lineno, line in sections["symbols"]:
        if line.startswith("algebraic"):
            rest = line[len("algebraic"):].strip()
            if "=" not in rest:
                raise ParseError("expected 'algebraic name = minimal polynomial'", lineno, 1)
            sym_name, poly_text = (part.strip() for part in rest.split("=", 1))
            coeffs = _minimal_poly_coeffs(sym_name, poly_text, lineno, ctx)
            sym = ctx.declare_algebraic(sym_name, coeffs)
            env[sym_name] = FactoredRat.var(ctx, sym)
            continue
        if "=" not in line:
            raise ParseError("expected 'generator = name' or 'algebraic ...'", lineno, 1)
        key, value = (part.strip() for part in line.split("=", 1))
        if key != "generator":
            raise ParseError(f"unknown symbols entry {key!r}", lineno, 1)
        generator = ctx.declare(value, SymbolKind.GENERATOR)
        env[value] = FactoredRat.var(ctx, generator)
    if generator is None:
        raise ParseError("missing generator declaration", 1, 1)

    mu_names = []
    point_entries = []
    for lineno, line in sections["points"]:
        if ":" not in line:
            raise ParseError("expected 'point : mu-name'", lineno, 1)
        point_text, mu_name = (part.strip() for part in line.rsplit(":", 1))
        mu = ctx.declare(mu_name, SymbolKind.PARAM)
        env[mu_name] = FactoredRat.var(ctx, mu)
        mu_names.append(mu_name)
        point_entries.append((lineno, point_text, mu))

    curve_env = dict(env)
    curve_env["z"] = FactoredRat.var(ctx, zsym)
    curve_kv = _key_value(sections["curve"])
    for required in ("x", "y", "sigma", "ydx", "invariant"):
        if required not in curve_kv:
            raise ParseError(f"missing curve entry {required!r}", 1, 1)

    def curve_expr(key: str, extra_env=None) -> FactoredRat:
        lineno, text_value = curve_kv[key]
        ast = _parse_expression(text_value, lineno)
        return _eval_ast(ast, extra_env or curve_env, ctx)

    x = curve_expr("x")
    y = curve_expr("y")
    sigma_expr = curve_expr("sigma")
    sigma = involution_from_expr(sigma_expr, zsym)

    lineno, ydx_text = curve_kv["ydx"]
    scalar, ydx_num, ydx_den = _factor_list(
        _parse_expression(ydx_text, lineno), curve_env, ctx, lineno
    )

    inv_env = dict(env)
    inv_env["x"] = FactoredRat.var(ctx, xsym)
    invariant = curve_expr("invariant", inv_env)

    time_kv = _key_value(sections["time"])
    if "t" not in time_kv:
        raise ParseError("missing time entry 't'", 1, 1)
    lineno, t_text = time_kv["t"]
    t_value = _eval_ast(_parse_expression(t_text, lineno), env, ctx)
    f0 = None
    if "f0" in time_kv:
        lineno, f0_text = time_kv["f0"]
        f0 = _eval_ast(_parse_expression(f0_text, lineno), env, ctx)

    points = []
    for lineno, point_text, mu in point_entries:
        points.append(PPlusPoint(_parse_point(point_text, lineno, env, ctx), mu))

    cycles = []
    for lineno, line in sections.get("cycles", []):
        cycles.append(_parse_cycle(line, lineno, env, curve_env, ctx))
    if len(cycles) > 1:
        raise ParseError("at most one time cycle is supported", 1, 1)

    time = TimeSpec(t_value, cycles[0] if cycles else None)
    curve = CurveFamily(
        ctx=ctx,
        name=name,
        zsym=zsym,
        xsym=xsym,
        x=x,
        y=y,
        sigma=sigma,
        ydx_num=ydx_num,
        ydx_den=ydx_den,
        ydx_scalar=scalar,
        invariant=invariant,
        generator=generator,
        time=time,
        points=points,
        f0=f0,
    )
    try:
        declared = curve.ydx_value(zsym)
        _ = declared
    except Exception as err:  # pragma: no cover - defensive
        raise ParseError(f"invalid ydx declaration: {err}", lineno, 1)
    return curve


def _parse_point(text: str, lineno: int, env, ctx):
    if text.strip() == "inf":
        return INFINITY
    return _eval_ast(_parse_expression(text, lineno), env, ctx)


def _parse_cycle(line: str, lineno: int, env, curve_env, ctx) -> GeneralizedCycle:
    if ":" not in line:
        raise ParseError("expected 'KIND location [partner] : weight'", lineno, 1)
    head, weight_text = (part.strip() for part in line.rsplit(":", 1))
    parts = head.split(None, 1)
    if len(parts) != 2 or parts[0] not in ("II", "III"):
        raise ParseError("cycle kind must be II or III", lineno, 1)
    kind = parts[0]
    locations = parts[1].split()
    location = _parse_point(locations[0], lineno, env, ctx)
    partner = _parse_point(locations[1], lineno, env, ctx) if len(locations) > 1 else None
    weight = _eval_ast(_parse_expression(weight_text, lineno), curve_env, ctx)
    if kind == "III":
        if not (weight - FactoredRat.const(ctx, 1)).is_zero():
            raise ParseError("kind III cycles carry weight 1", lineno, 1)
        weight = None
    return GeneralizedCycle(kind, location, weight, partner)


def _minimal_poly_coeffs(name: str, poly_text: str, lineno: int, ctx: Context):
    """Extract ascending rational coefficients of a monic minimal polynomial."""
    scratch = Context()
    sym = scratch.declare(name, SymbolKind.PARAM)
    env = {name: FactoredRat.var(scratch, sym)}
    value = _eval_ast(_parse_expression(poly_text, lineno), env, scratch)
    if value.den:
        raise ParseError("minimal polynomial must be polynomial", lineno, 1)
    by_deg = value.num.coeffs_in(sym)
    degree = max(by_deg)
    coeffs = []
    for k in range(degree + 1):
        c = by_deg.get(k)
        if c is not None and not c.is_constant():
            raise ParseError("minimal polynomial must have rational coefficients", lineno, 1)
        coeffs.append(c.constant_value() if c is not None else Fraction(0))
    if coeffs[-1] != 1:
        raise ParseError("minimal polynomial must be monic", lineno, 1)
    return coeffs
