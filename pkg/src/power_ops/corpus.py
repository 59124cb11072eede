"""Golden corpus: loading, canonical text, and the derivation registry.

Each record is a file ``<id>.txt`` whose first line is ``# id | locator``
and whose remaining lines hold one formula.  Polynomial formulas use the
``polyring.parse`` syntax, rational functions are written ``num // den``,
Dyer-Lashof relations use the gamma grammar, and K(1) records are integers.
A record passes when the canonical text of the transcription equals the
canonical text of the freshly derived value.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

from .polyring import Poly, parse, reduce_mod3_and_ideal, to_text, var

GOLDEN_PACKAGE = "power_ops"
GOLDEN_DIR = "golden"

# prefix of a record id -> module that derives it
SCOPES = {
    "torsion": "curve",
    "series": "series",
    "isogeny": "isogeny",
    "psi3": "powerops",
    "relations": "powerops",
    "gamma": "dyerlashof",
    "k1": "k1local",
}
MODULES = ("curve", "series", "isogeny", "powerops", "dyerlashof", "k1local")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class GoldenRecord:
    id: str
    expected: str  # transcription as stored
    locator: str

    @property
    def module(self) -> str:
        return SCOPES[self.id.split(".")[0]]


def parse_record(text: str, source: str = "<string>") -> GoldenRecord:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#") or "|" not in lines[0]:
        raise CorpusError(f"{source}: missing '# id | locator' header")
    rid, loc = (s.strip() for s in lines[0][1:].split("|", 1))
    body = " ".join(line.strip() for line in lines[1:] if line.strip())
    if not body:
        raise CorpusError(f"{source}: empty formula")
    return GoldenRecord(rid, body, loc)


def load_corpus(directory: str | Path | None = None) -> list[GoldenRecord]:
    if directory is None:
        root = resources.files(GOLDEN_PACKAGE) / GOLDEN_DIR
        files = [p for p in root.iterdir() if p.name.endswith(".txt")]
    else:
        files = [p for p in Path(directory).iterdir() if p.name.endswith(".txt")]
    records = [parse_record(p.read_text(encoding="utf-8"), p.name) for p in files]
    records.sort(key=lambda r: r.id)
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate record ids")
    for r in records:
        if r.id.split(".")[0] not in SCOPES:
            raise CorpusError(f"unknown scope in {r.id}")
    return records


def select(records: list[GoldenRecord], scope: str) -> list[GoldenRecord]:
    if scope == "all":
        return records
    if scope in MODULES:
        return [r for r in records if r.module == scope]
    chosen = [r for r in records if r.id == scope or r.id.startswith(scope + ".")]
    if not chosen:
        raise CorpusError(
            f"unknown scope {scope!r}: use all, a module ({', '.join(MODULES)}) or a record id prefix")
    return chosen


# -- canonical forms ---------------------------------------------------------------------

def poly_text(p: Poly) -> str:
    return to_text(p)


def rational_text(num: Poly, den: Poly) -> str:
    return f"{to_text(num)} // {to_text(den)}"


def _h_to_ab(p: Poly) -> Poly:
    return p.subs({"H": parse("a^2 + b")})


def mod3_text(p: Poly) -> str:
    return to_text(reduce_mod3_and_ideal(_h_to_ab(p)))


# -- derivations -------------------------------------------------------------------------
# Each entry: id -> (derive() -> canonical text, canon(transcription) -> canonical text)

def _poly_canon(body: str) -> str:
    return poly_text(parse(body))


def _rational_canon(body: str) -> str:
    num, den = body.split("//")
    return rational_text(parse(num), parse(den))


def _torsion():
    from .curve import compute_torsion_data
    return compute_torsion_data()


def _isogeny():
    from .isogeny import build_isogeny
    return build_isogeny()


@lru_cache(maxsize=None)
def _derived_W() -> Poly:
    from .isogeny import kappa_min_poly_derived
    return kappa_min_poly_derived(_isogeny())


@lru_cache(maxsize=None)
def _derived_kappa_prime() -> Poly:
    from .isogeny import dual_relations
    return dual_relations(_derived_W()).kappa_prime


def _derive_torsion(name: str) -> Callable[[], str]:
    def run():
        value = _torsion().records()[name]
        if hasattr(value, "num"):
            return rational_text(value.num, value.den)
        return poly_text(value)
    return run


def _derive_psi3_division(k: int) -> Callable[[], str]:
    def run():
        from .curve import division_polynomial_3
        return poly_text(division_polynomial_3()[k])
    return run


def _f_mod3() -> str:
    return mod3_text(_torsion().f)


def _series_v() -> str:
    from .curve import v_series
    return poly_text(v_series(12).to_poly())


def _kappa_ae_canon(body: str) -> str:
    from .isogeny import torsion_ring
    R, _, e = torsion_ring()
    return poly_text(R.reduce(parse(body).subs({"e": e})))


def _dual_product() -> str:
    from .polyring import QuotientRing
    Wring = QuotientRing(_derived_W(), "kappa")
    kappa = var("kappa")
    return poly_text(Wring.reduce(var("b") ** 4 * kappa * _derived_kappa_prime()))


def _vieta() -> str:
    return poly_text(_derived_W().coefficient("kappa", 0))


def _verschiebung_canon(body: str) -> str:
    return mod3_text(parse(body) * var("b") ** 4)


def _verschiebung() -> str:
    # kappa = 0 mod 3 on the formal branch
    minus_kp = -_derived_kappa_prime().subs({"kappa": 0})
    return mod3_text(minus_kp * var("b") ** 4)


def _chart(p: Poly) -> Poly:
    return p.subs({"a": var("c"), "b": 1, "kappa": var("alpha")})


def _psi3(name: str) -> Callable[[], str]:
    def run():
        from .powerops import specialize_chart
        return poly_text(getattr(specialize_chart(), f"psi_{name}"))
    return run


def _psi3_alpha() -> str:
    from .powerops import even_c_to_h
    return poly_text(even_c_to_h(_chart(_derived_kappa_prime())))


def _comm(key: str) -> Callable[[], str]:
    def run():
        from .powerops import derive_commutation
        return poly_text(derive_commutation()[key])
    return run


def _comm_i() -> str:
    from .powerops import derive_commutation
    rows = derive_commutation()
    base = rows["Q0(ix)"]
    for k in range(1, 4):
        if rows[f"Q{k}(ix)"] != base.subs({"Q0x": var(f"Q{k}x")}):
            return f"not uniform in k at Q{k}"
    return poly_text(base)


def _adem(key: str) -> Callable[[], str]:
    def run():
        from .powerops import derive_adem
        return poly_text(derive_adem()[key])
    return run


def _cartan(key: str) -> Callable[[], str]:
    def run():
        from .powerops import derive_cartan
        return poly_text(derive_cartan()[key])
    return run


def _frob_canon(body: str) -> str:
    from .powerops import reduce_i
    return mod3_text(reduce_i(parse(body)))


def _frob(gen: str) -> Callable[[], str]:
    def run():
        from .powerops import extract_Q, quotient_c, reduce_i, specialize_chart
        forms = specialize_chart()
        if gen == "c":
            q0 = extract_Q(forms.psi_c, quotient_c())[0]
        else:
            q0 = extract_Q(getattr(forms, f"psi_{gen}"))[0]
        return mod3_text(reduce_i(q0))
    return run


def _gamma_canon(body: str) -> str:
    from .dyerlashof import parse_gamma, to_text as gtext
    return gtext(parse_gamma(body))


def _gamma(word: tuple, scalar: str | None) -> Callable[[], str]:
    def run():
        from .dyerlashof import GammaElement, normalize, to_text as gtext
        e = GammaElement.word(*word)
        if scalar:
            e = e * GammaElement.scalar(var(scalar))
        return gtext(normalize(e))
    return run


def _gamma_i() -> str:
    from .dyerlashof import GammaElement, normalize, to_text as gtext
    i = GammaElement.scalar(var("i"))
    base = normalize(GammaElement.word(0) * i)
    for k in range(1, 4):
        got = normalize(GammaElement.word(k) * i)
        want = GammaElement.from_dict({(k,): c for (w, c) in base.terms})
        if got != want:
            return f"not uniform in k at q{k}"
    return gtext(base)


@lru_cache(maxsize=None)
def _k1(variable: str) -> dict:
    from .k1local import certified_expansion
    return certified_expansion(variable)


def _k1_coeff(variable: str, exponent: int) -> Callable[[], str]:
    def run():
        return str(_k1(variable).get(exponent, 0))
    return run


def _int_canon(body: str) -> str:
    return str(int(body))


def _expo(tag: str) -> int:
    return -int(tag[1:]) if tag.startswith("m") else int(tag)


@lru_cache(maxsize=None)
def registry() -> dict[str, tuple[Callable[[], str], Callable[[str], str]]]:
    reg: dict = {}
    P, R = _poly_canon, _rational_canon
    for name in ("f", "g", "f_tilde", "Q1", "R1", "K", "L", "M", "N"):
        reg[f"torsion.{name}"] = (_derive_torsion(name), P)
    for name in ("Q2", "R2"):
        reg[f"torsion.{name}"] = (_derive_torsion(name), R)
    reg["torsion.psi3"] = (_derive_psi3_division(0), P)
    reg["torsion.psi3_uv"] = (_derive_psi3_division(1), P)
    reg["torsion.f_mod3"] = (_f_mod3, lambda body: mod3_text(parse(body)))

    reg["series.v"] = (_series_v, P)
    reg["series.u_prime"] = (lambda: poly_text(_isogeny().u_prime.to_poly()), P)
    reg["series.v_prime"] = (lambda: poly_text(_isogeny().v_prime.to_poly()), P)

    def tc():
        from .isogeny import target_curve
        return target_curve()
    reg["isogeny.W"] = (lambda: poly_text(_derived_W()), P)
    reg["isogeny.a_prime"] = (lambda: poly_text(tc().a_prime_in_kappa), P)
    reg["isogeny.b_prime"] = (lambda: poly_text(tc().b_prime), P)
    reg["isogeny.kappa"] = (lambda: poly_text(_isogeny().kappa), P)
    reg["isogeny.kappa_ae"] = (lambda: poly_text(_isogeny().kappa), _kappa_ae_canon)
    reg["isogeny.lambda"] = (lambda: poly_text(_isogeny().lam), P)
    reg["isogeny.kappa_prime"] = (lambda: poly_text(_derived_kappa_prime()), P)
    reg["isogeny.dual_product"] = (_dual_product, P)
    reg["isogeny.vieta"] = (_vieta, P)
    reg["isogeny.verschiebung"] = (_verschiebung, _verschiebung_canon)

    reg["psi3.w"] = (lambda: poly_text(_chart(_derived_W())), P)
    for name in ("h", "c", "i"):
        reg[f"psi3.{name}"] = (_psi3(name), P)
    reg["psi3.c_prime"] = (_psi3("c"), P)
    reg["psi3.alpha"] = (_psi3_alpha, P)

    for k in range(4):
        for g in ("h", "c"):
            reg[f"relations.comm.q{k}{g}"] = (_comm(f"Q{k}({g}x)"), P)
        reg[f"relations.cartan.q{k}"] = (_cartan(f"Q{k}(xy)"), P)
    reg["relations.comm.qi"] = (_comm_i, P)
    for j in (1, 2, 3):
        reg[f"relations.adem.q{j}q0"] = (_adem(f"Q{j}Q0(x)"), P)
    for g in ("h", "c", "i"):
        reg[f"relations.frobenius.{g}"] = (_frob(g), _frob_canon)

    for k in range(4):
        reg[f"gamma.comm.q{k}h"] = (_gamma((k,), "h"), _gamma_canon)
    reg["gamma.comm.qi"] = (_gamma_i, _gamma_canon)
    for j in (1, 2, 3):
        reg[f"gamma.adem.q{j}q0"] = (_gamma((j, 0), None), _gamma_canon)

    for tag in ("3", "2", "1", "0", "m1", "m2"):
        reg[f"k1.psiF_h.{tag}"] = (_k1_coeff("h", _expo(tag)), _int_canon)
    for tag in ("3", "1", "m1", "m3", "m5", "m7"):
        reg[f"k1.psiF_c.{tag}"] = (_k1_coeff("c", _expo(tag)), _int_canon)
    return reg


# -- verification --------------------------------------------------------------------------

@dataclass(frozen=True)
class RecordResult:
    id: str
    passed: bool
    expected: str
    derived: str

    def diff(self) -> str:
        lines = difflib.unified_diff(
            _wrap(self.expected), _wrap(self.derived),
            fromfile=f"{self.id} (golden)", tofile=f"{self.id} (derived)", lineterm="")
        return "\n".join(lines)


def _wrap(text: str) -> list[str]:
    # one term per line keeps diffs readable
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.endswith(" "):
            out.append(cur.rstrip())
            cur = ""
        cur += ch
    out.append(cur.rstrip())
    return [line for line in out if line]


def check_record(record: GoldenRecord) -> RecordResult:
    reg = registry()
    if record.id not in reg:
        return RecordResult(record.id, False, record.expected, "no derivation registered")
    derive, canon = reg[record.id]
    try:
        expected = canon(record.expected)
    except Exception as exc:  # a malformed transcription is a mismatch
        expected = f"unparseable transcription: {exc}"
    try:
        derived = derive()
    except Exception as exc:
        derived = f"derivation failed: {type(exc).__name__}: {exc}"
    return RecordResult(record.id, expected == derived, expected, derived)


def verify(scope: str = "all", directory: str | Path | None = None) -> list[RecordResult]:
    records = select(load_corpus(directory), scope)
    return [check_record(r) for r in records]


def report(results: list[RecordResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.id}")
        if not r.passed:
            lines.append(r.diff())
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results)} records, {len(results) - failed} passed, {failed} failed")
    return "\n".join(lines)
