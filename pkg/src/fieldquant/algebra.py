"""Exact symbolic algebra over the noncommuting generators of the problem.

An ``OperatorExpr`` is a finite sum of terms

    rational coefficient * parameter monomial * generator word,

stored in a canonical normal-ordered form, so conservation statements are
decided by exact structural equality and never hide behind a tolerance.

Generators and their canonical order: x < y < z < t < px < py < pz < dt.
Rewriting rules used for normal ordering:

    px*x = x*px - i*hbar      (same for y, z pairs)
    dt*t = t*dt + 1

and every other pair of distinct generators commutes.  ``dt`` is the formal
derivative with respect to explicit time; the energy operator is i*hbar*dt.
Symbolic parameters are {hbar, m, q, E, wc, c} with integer exponents, plus
the imaginary unit i with i^2 folded into the rational coefficient.
"""

from __future__ import annotations

from enum import IntEnum
from fractions import Fraction

from .config import SystemConfig, ConfigError


class Gen(IntEnum):
    X = 0
    Y = 1
    Z = 2
    T = 3
    PX = 4
    PY = 5
    PZ = 6
    DT = 7


GEN_NAMES = {Gen.X: "x", Gen.Y: "y", Gen.Z: "z", Gen.T: "t",
             Gen.PX: "px", Gen.PY: "py", Gen.PZ: "pz", Gen.DT: "dt"}
NAME_TO_GEN = {v: k for k, v in GEN_NAMES.items()}

PARAMS = ("hbar", "m", "q", "E", "wc", "c")
_PARAM_INDEX = {name: k for k, name in enumerate(PARAMS)}

# monomial = (i_power in {0,1}, exponent tuple over PARAMS)
_MONO_ONE = (0, (0,) * len(PARAMS))
_MONO_IHBAR = (1, (1, 0, 0, 0, 0, 0))

# conjugate canonical pairs: position generator paired with its momentum
_CANON_PAIR = {Gen.PX: Gen.X, Gen.PY: Gen.Y, Gen.PZ: Gen.Z}


def _mono_mul(a, b):
    """Product of two parameter monomials; returns (sign, monomial)."""
    ipow = a[0] + b[0]
    sign = 1
    if ipow >= 2:       # i^2 = -1
        ipow -= 2
        sign = -1
    exps = tuple(x + y for x, y in zip(a[1], b[1]))
    return sign, (ipow, exps)


def _mono_pow(mono, n):
    sign = 1
    out = _MONO_ONE
    for _ in range(n):
        s, out = _mono_mul(out, mono)
        sign *= s
    return sign, out


def _normalize_word(word):
    """Rewrite a generator word into canonical order.

    Returns a dict {(monomial, sorted_word): Fraction} equal to the input
    word as an operator.
    """
    out = {}
    stack = [(Fraction(1), _MONO_ONE, tuple(word))]
    while stack:
        coeff, mono, w = stack.pop()
        # find the first out-of-order adjacent pair
        k = -1
        for j in range(len(w) - 1):
            if w[j] > w[j + 1]:
                k = j
                break
        if k < 0:
            key = (mono, w)
            out[key] = out.get(key, Fraction(0)) + coeff
            continue
        a, b = w[k], w[k + 1]
        swapped = w[:k] + (b, a) + w[k + 2:]
        if a in _CANON_PAIR and _CANON_PAIR[a] == b:
            # p*x = x*p - i*hbar
            stack.append((coeff, mono, swapped))
            sign, mono2 = _mono_mul(mono, _MONO_IHBAR)
            stack.append((-sign * coeff, mono2, w[:k] + w[k + 2:]))
        elif a == Gen.DT and b == Gen.T:
            # dt*t = t*dt + 1
            stack.append((coeff, mono, swapped))
            stack.append((coeff, mono, w[:k] + w[k + 2:]))
        else:
            stack.append((coeff, mono, swapped))
    return {k: v for k, v in out.items() if v != 0}


class OperatorExpr:
    """Normal-ordered noncommutative polynomial with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    # --- constructors ---

    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls()

    @classmethod
    def one(cls) -> "OperatorExpr":
        return cls({(_MONO_ONE, ()): Fraction(1)})

    @classmethod
    def generator(cls, g: Gen) -> "OperatorExpr":
        return cls({(_MONO_ONE, (g,)): Fraction(1)})

    @classmethod
    def parameter(cls, name: str, power: int = 1) -> "OperatorExpr":
        if name == "i":
            sign, mono = _mono_pow((1, (0,) * len(PARAMS)), power % 4)
            return cls({(mono, ()): Fraction(sign)})
        idx = _PARAM_INDEX[name]
        exps = tuple(power if k == idx else 0 for k in range(len(PARAMS)))
        return cls({((0, exps), ()): Fraction(1)})

    @classmethod
    def rational(cls, value) -> "OperatorExpr":
        return cls({(_MONO_ONE, ()): Fraction(value)})

    # --- ring operations ---

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return OperatorExpr(terms)

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return self + (-other)

    def __neg__(self) -> "OperatorExpr":
        return OperatorExpr({k: -v for k, v in self.terms.items()})

    def __mul__(self, other: "OperatorExpr") -> "OperatorExpr":
        terms = {}
        for (mono_a, word_a), ca in self.terms.items():
            for (mono_b, word_b), cb in other.terms.items():
                sign, mono = _mono_mul(mono_a, mono_b)
                base = sign * ca * cb
                for (mono_w, word), cw in _normalize_word(word_a + word_b).items():
                    s2, mono_full = _mono_mul(mono, mono_w)
                    key = (mono_full, word)
                    terms[key] = terms.get(key, Fraction(0)) + s2 * base * cw
        return OperatorExpr(terms)

    def __pow__(self, n: int) -> "OperatorExpr":
        if n < 0:
            raise ValueError("negative operator powers are not defined")
        out = OperatorExpr.one()
        for _ in range(n):
            out = out * self
        return out

    def scale(self, value) -> "OperatorExpr":
        c = Fraction(value)
        return OperatorExpr({k: c * v for k, v in self.terms.items()})

    # --- predicates ---

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def contains_generator(self, g: Gen) -> bool:
        return any(g in word for (_, word) in self.terms)

    def __repr__(self):
        return f"OperatorExpr({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


# module-level generator/parameter shorthands
def gen(g: Gen) -> OperatorExpr:
    return OperatorExpr.generator(g)


def sym(name: str, power: int = 1) -> OperatorExpr:
    return OperatorExpr.parameter(name, power)


IMAG = OperatorExpr.parameter("i")


def normal_order(expr: OperatorExpr) -> OperatorExpr:
    """Canonical form.  Storage is already normal ordered, so this is a
    re-normalization pass that must act as the identity; kept as the public
    entry point (and exercised by the idempotence property tests)."""
    out = OperatorExpr.zero()
    for (mono, word), coeff in expr.terms.items():
        partial = {}
        for (mono_w, w), cw in _normalize_word(word).items():
            sign, mono_full = _mono_mul(mono, mono_w)
            key = (mono_full, w)
            partial[key] = partial.get(key, Fraction(0)) + sign * coeff * cw
        out = out + OperatorExpr(partial)
    return out


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a * b - b * a


def partial_t(expr: OperatorExpr) -> OperatorExpr:
    """Formal derivative with respect to the explicit-time generator t."""
    terms = {}
    for (mono, word), coeff in expr.terms.items():
        k = word.count(Gen.T)
        if k == 0:
            continue
        idx = word.index(Gen.T)
        new_word = word[:idx] + word[idx + 1:]
        key = (mono, new_word)
        terms[key] = terms.get(key, Fraction(0)) + k * coeff
    return OperatorExpr(terms)


def heisenberg_residual(f: OperatorExpr, H: OperatorExpr) -> OperatorExpr:
    """(1/(i*hbar)) [f, H] + df/dt; the zero expression iff f is conserved."""
    if H.contains_generator(Gen.DT):
        raise ValueError("Hamiltonian must be time-local (no dt generator)")
    inv_ihbar = OperatorExpr.parameter("hbar", -1) * IMAG.scale(-1)  # 1/(i*hbar) = -i/hbar
    return inv_ihbar * commutator(f, H) + partial_t(f)


def substitute_param(expr: OperatorExpr, name: str, value) -> OperatorExpr:
    """Replace a symbolic parameter by an exact rational value."""
    idx = _PARAM_INDEX[name]
    value = Fraction(value)
    terms = {}
    for (mono, word), coeff in expr.terms.items():
        exp = mono[1][idx]
        if exp:
            if value == 0:
                if exp < 0:
                    raise ZeroDivisionError(f"{name} appears with a negative power")
                continue
            coeff = coeff * value ** exp
        exps = tuple(0 if k == idx else e for k, e in enumerate(mono[1]))
        key = ((mono[0], exps), word)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return OperatorExpr(terms)


def adjoint(expr: OperatorExpr) -> OperatorExpr:
    """Formal adjoint: reverse words, conjugate i, generators self-adjoint
    except dt, which is anti-self-adjoint (so i*hbar*dt is Hermitian)."""
    out = OperatorExpr.zero()
    for (mono, word), coeff in expr.terms.items():
        sign = -1 if mono[0] == 1 else 1          # conjugate i
        if word.count(Gen.DT) % 2 == 1:           # dt^\dagger = -dt
            sign = -sign
        reversed_terms = {}
        for (mono_w, w), cw in _normalize_word(tuple(reversed(word))).items():
            s2, mono_full = _mono_mul(mono, mono_w)
            key = (mono_full, w)
            reversed_terms[key] = reversed_terms.get(key, Fraction(0)) + s2 * sign * coeff * cw
        out = out + OperatorExpr(reversed_terms)
    return out


# --- named operators of the two systems ---

def momentum_minus_force_time() -> OperatorExpr:
    """px - q*E*t, the conserved linear-potential momentum."""
    return gen(Gen.PX) - sym("q") * sym("E") * gen(Gen.T)


def energy_operator() -> OperatorExpr:
    """i*hbar*dt."""
    return IMAG * sym("hbar") * gen(Gen.DT)


def gauge_momentum_y() -> OperatorExpr:
    """py - m*wc*z, conserved in the parallel-field geometry."""
    return gen(Gen.PY) - sym("m") * sym("wc") * gen(Gen.Z)


def momentum_z() -> OperatorExpr:
    return gen(Gen.PZ)


def hamiltonian_1d(cfg: SystemConfig) -> OperatorExpr:
    """px^2/(2m) - q*E*x for the one-dimensional constant-force system."""
    if cfg.geometry != "electric_1d":
        raise ConfigError("geometry", "hamiltonian_1d requires geometry electric_1d")
    kinetic = (gen(Gen.PX) ** 2).scale(Fraction(1, 2)) * sym("m", -1)
    return kinetic - sym("q") * sym("E") * gen(Gen.X)


def hamiltonian_parallel(cfg: SystemConfig) -> OperatorExpr:
    """(px^2 + py^2 + (pz - m*wc*y)^2)/(2m) - q*E*x, fully expanded."""
    if cfg.geometry != "parallel_eb":
        raise ConfigError("geometry", "hamiltonian_parallel requires geometry parallel_eb")
    half_inv_m = OperatorExpr.rational(Fraction(1, 2)) * sym("m", -1)
    gauge = gen(Gen.PZ) - sym("m") * sym("wc") * gen(Gen.Y)
    kinetic = half_inv_m * (gen(Gen.PX) ** 2 + gen(Gen.PY) ** 2 + gauge * gauge)
    return kinetic - sym("q") * sym("E") * gen(Gen.X)


def system_hamiltonian(cfg: SystemConfig) -> OperatorExpr:
    if cfg.hamiltonian_override is not None:
        return parse_operator(cfg.hamiltonian_override)
    if cfg.geometry == "electric_1d":
        return hamiltonian_1d(cfg)
    return hamiltonian_parallel(cfg)


def conserved_operators(cfg: SystemConfig) -> dict[str, OperatorExpr]:
    """The conserved operators claimed for the configured geometry."""
    if cfg.geometry == "electric_1d":
        return {
            "px - q*E*t": momentum_minus_force_time(),
            "i*hbar*dt": energy_operator(),
        }
    return {
        "px - q*E*t": momentum_minus_force_time(),
        "py - m*wc*z": gauge_momentum_y(),
        "pz": momentum_z(),
        "i*hbar*dt": energy_operator(),
    }


def eigen_ladder_check(j: int, depth: int = 6) -> OperatorExpr:
    """Residual of [f, E^(j+1)] = i*hbar*q*E*(j+1)*E^j; zero iff the ladder
    commutation identity holds at order j."""
    if j > depth:
        raise ValueError(f"ladder order {j} exceeds configured depth {depth}")
    f = momentum_minus_force_time()
    e_op = energy_operator()
    lhs = commutator(f, e_op ** (j + 1))
    rhs = (IMAG * sym("hbar") * sym("q") * sym("E") * (e_op ** j)).scale(j + 1)
    return lhs - rhs


# --- text form -----------------------------------------------------------

class ParseError(ValueError):
    """Syntax error in operator text; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


_ATOM_NAMES = dict(NAME_TO_GEN)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            num = int(text[start:pos])
            den = 1
            if pos < n and text[pos] == "/" and pos + 1 < n and text[pos + 1].isdigit():
                pos += 1
                dstart = pos
                while pos < n and text[pos].isdigit():
                    pos += 1
                den = int(text[dstart:pos])
                if den == 0:
                    raise ParseError("zero denominator", dstart)
            tokens.append(("number", Fraction(num, den), start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("name", text[start:pos], start))
            continue
        if ch in "+-*^()":
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", off)
        return self.next()

    def parse(self) -> OperatorExpr:
        expr = self.parse_expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off)
        return expr

    def parse_expr(self) -> OperatorExpr:
        kind, val, off = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        out = self.parse_term()
        if negate:
            out = -out
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                term = self.parse_term()
                out = out - term if val == "-" else out + term
            else:
                return out

    def parse_term(self) -> OperatorExpr:
        out = self.parse_factor()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val == "*":
                self.next()
                out = out * self.parse_factor()
            else:
                return out

    def parse_factor(self) -> OperatorExpr:
        base = self.parse_atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, off = self.peek()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", off)
            if kind != "number":
                raise ParseError("expected integer exponent", off)
            self.next()
            if val.denominator != 1:
                raise ParseError("exponent must be an integer", off)
            return base ** int(val)
        return base

    def parse_atom(self) -> OperatorExpr:
        kind, val, off = self.next()
        if kind == "number":
            return OperatorExpr.rational(val)
        if kind == "name":
            if val in _ATOM_NAMES:
                return OperatorExpr.generator(_ATOM_NAMES[val])
            if val in _PARAM_INDEX or val == "i":
                return OperatorExpr.parameter(val)
            raise ParseError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}", off)


def parse_operator(text: str) -> OperatorExpr:
    """Parse operator text over atoms {x,y,z,t,px,py,pz,dt,hbar,m,q,E,wc,c,i}
    and rational literals, with operators + - * ^ and parentheses."""
    return _Parser(text).parse()


def _format_term(mono, word, coeff: Fraction) -> str:
    parts = []
    mag = abs(coeff)
    if mag != 1 or (mono == _MONO_ONE and not word):
        parts.append(str(mag))
    if mono[0] == 1:
        parts.append("i")
    for name, exp in zip(PARAMS, mono[1]):
        if exp == 1:
            parts.append(name)
        elif exp != 0:
            parts.append(f"{name}^{exp}")
    k = 0
    while k < len(word):
        g = word[k]
        run = 1
        while k + run < len(word) and word[k + run] == g:
            run += 1
        parts.append(GEN_NAMES[g] if run == 1 else f"{GEN_NAMES[g]}^{run}")
        k += run
    return "*".join(parts)


def to_text(expr: OperatorExpr) -> str:
    """Canonical normal-ordered text form.

    Reparses to the same expression whenever every parameter exponent is
    nonnegative; negative exponents (e.g. 1/m in a Hamiltonian built
    programmatically) print as name^-k for display only, since the grammar
    has no division.
    """
    if expr.is_zero:
        return "0"
    keys = sorted(expr.terms, key=lambda key: (len(key[1]), key[1], key[0][0], key[0][1]))
    out = []
    for key in keys:
        coeff = expr.terms[key]
        body = _format_term(key[0], key[1], coeff)
        if not out:
            out.append(body if coeff > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(out)
