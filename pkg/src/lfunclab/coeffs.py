"""Dirichlet coefficients of standard and Rankin-Selberg L-functions.

Local factors are encoded by parameter multisets.  The four series kinds:

    lambda    coefficients of L             (complete homogeneous h_k)
    mu        coefficients of 1/L           (signed elementary e_k)
    biglambda coefficients of -L'/L         (power sums times log Np)
    logl      coefficients of log L         (power sums over ell)

For a pair of members the unramified local parameter multiset is the
product set {alpha_i * conj(beta_j)}.  At ramified primes two models are
available: "product" keeps the same product formula with zero parameters
included (a documented stand-in, labelled non-exact in reports), while
"gl1_exact" replaces the pair of degree-1 members by the primitive
Dirichlet character inducing chi_a * conj(chi_b), which is exact.

Pair coefficients use the Cauchy identity: the x^k coefficient of
prod_{i,j} (1 - a_i conj(b_j) x)^{-1} equals
sum over partitions lam of k with at most min(n, n') parts of
s_lam(a) * conj(s_lam(b)), with Schur values from the Jacobi-Trudi
determinant in complete homogeneous polynomials.  The determinant form
stays finite at repeated parameters, where quotient-of-alternants fails.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import characters as chars
from .errors import UsageError
from .ideals import (
    DEFAULT_IDEAL_CEILING,
    IdealIndex,
    NumberFieldSpec,
    enumerate_ideals,
    ideal_mul,
    prime_ideal,
    prime_ideals_up_to,
    unit_ideal,
)
from .localdata import LocalParameters, Representation, contragredient

SERIES_KINDS = ("lambda", "mu", "biglambda", "logl")
PARTITION_SIZE_CAP = 64
_IDEAL_CACHE_MAX_BOUND = 200_000


@functools.lru_cache(maxsize=8)
def _cached_ideal_list(field: NumberFieldSpec, bound: int) -> tuple[IdealIndex, ...]:
    return tuple(enumerate_ideals(field, bound))


def ideal_list(field: NumberFieldSpec, bound: int, max_count: int = DEFAULT_IDEAL_CEILING):
    """Ideal enumeration with a small cache for repeated moderate bounds."""
    if bound <= _IDEAL_CACHE_MAX_BOUND and max_count >= DEFAULT_IDEAL_CEILING:
        return _cached_ideal_list(field, bound)
    return enumerate_ideals(field, bound, max_count)


@dataclass
class CoefficientSeries:
    """Coefficients indexed by integral ideals up to a norm bound.

    biglambda and logl series store only their prime-power support.
    """

    field: NumberFieldSpec
    kind: str
    bound: int
    values: dict[IdealIndex, complex]
    exact: bool = True  # False when the ramified product model was used

    def value(self, ideal: IdealIndex) -> complex:
        return self.values.get(ideal, 0j)

    def items_sorted(self):
        return sorted(self.values.items(), key=lambda kv: kv[0].sort_key())

    def export_csv(self, path: str) -> None:
        from .report import emit_report

        records = [
            {
                "norm": ideal.norm,
                "ideal_id": repr(ideal),
                "re": val.real,
                "im": val.imag,
            }
            for ideal, val in self.items_sorted()
        ]
        emit_report(records, "csv", path, columns=["norm", "ideal_id", "re", "im"])


# ---------------------------------------------------------------------------
# symmetric-function kernels


def poly_from_roots(alphas) -> np.ndarray:
    """Coefficients c[0..n] of prod_j (1 - alpha_j x); c[k] = (-1)^k e_k."""
    c = np.zeros(len(alphas) + 1, dtype=np.complex128)
    c[0] = 1.0
    for j, a in enumerate(alphas):
        c[1 : j + 2] -= a * c[: j + 1].copy()
    return c


def hom_sym_values(alphas, kmax: int) -> np.ndarray:
    """h_0..h_kmax of the multiset, by inverting prod (1 - alpha x)."""
    c = poly_from_roots(alphas)
    h = np.zeros(kmax + 1, dtype=np.complex128)
    h[0] = 1.0
    for k in range(1, kmax + 1):
        acc = 0j
        for j in range(1, min(len(c) - 1, k) + 1):
            acc += c[j] * h[k - j]
        h[k] = -acc
    return h


def local_lambda(params: LocalParameters, k: int) -> complex:
    """Complete homogeneous symmetric polynomial h_k of the parameters."""
    if k < 0:
        raise UsageError("k must be nonnegative")
    if k == 0:
        return 1 + 0j
    return complex(hom_sym_values(params.alphas, k)[k])


def power_sum(alphas, k: int) -> complex:
    return complex(sum(a**k for a in alphas)) if k else complex(len(alphas))


@functools.lru_cache(maxsize=None)
def partitions_of(k: int, max_parts: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of k into at most max_parts parts, lexicographic order."""
    if k > PARTITION_SIZE_CAP:
        raise UsageError(f"partition size {k} exceeds the cap {PARTITION_SIZE_CAP}")
    if k == 0:
        return ((),)
    if max_parts == 0:
        return ()
    out = []

    def rec(remaining, largest, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(largest, remaining), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(k, k, [])
    return tuple(out)


def schur_from_h(h: np.ndarray, lam: tuple[int, ...]) -> complex:
    """Jacobi-Trudi: s_lam = det[ h_{lam_i - i + j} ]."""
    r = len(lam)
    if r == 0:
        return 1 + 0j
    if r == 1:
        return complex(h[lam[0]])
    m = np.zeros((r, r), dtype=np.complex128)
    for i in range(r):
        for j in range(r):
            idx = lam[i] - i + j
            if 0 <= idx < len(h):
                m[i, j] = h[idx]
            elif idx == 0:
                m[i, j] = 1.0
    return complex(np.linalg.det(m))


def rankin_selberg_local(
    a: LocalParameters,
    b: LocalParameters,
    k: int,
    ramified_model: str = "product",
    characters: tuple | None = None,
) -> complex:
    """x^k coefficient of the local pair factor at a common prime.

    product model: Cauchy identity sum over partitions of k of
    s_lam(alpha) * conj(s_lam(beta)).  gl1_exact model: value at p^k of
    the primitive character inducing chi_a * conj(chi_b).
    """
    if a.prime != b.prime:
        raise UsageError("local pair coefficients need a common prime")
    if ramified_model == "gl1_exact":
        if characters is None or characters[0] is None or characters[1] is None:
            raise UsageError("gl1_exact requires character data on both members")
        psi = product_primitive_character(characters[0], characters[1])
        p = a.prime.factors[0][0][0]
        return psi.value(p) ** k if k else 1 + 0j
    if ramified_model != "product":
        raise UsageError(f"unknown ramified model {ramified_model!r}")
    if k == 0:
        return 1 + 0j
    ha = hom_sym_values(a.alphas, k)
    hb = hom_sym_values(b.alphas, k)
    max_parts = min(len(a.alphas), len(b.alphas))
    acc = 0j
    for lam in partitions_of(k, max_parts):
        acc += schur_from_h(ha, lam) * np.conj(schur_from_h(hb, lam))
    return complex(acc)


@functools.lru_cache(maxsize=None)
def _product_primitive_cached(key_a, key_b, chi_a, chi_b):
    return chars.primitive_part(chars.multiply(chi_a, chars.conjugate(chi_b)))


def product_primitive_character(chi_a, chi_b):
    """Primitive character inducing chi_a * conj(chi_b), cached."""
    return _product_primitive_cached(
        chi_a.canonical_key(), chi_b.canonical_key(), chi_a, chi_b
    )


# ---------------------------------------------------------------------------
# local coefficient table for one member or pair


class _LocalEngine:
    """Per-(prime, exponent) coefficients for a member or a pair a x conj(b)."""

    def __init__(self, a: Representation, b: Representation | None, kind: str, model: str):
        if kind not in SERIES_KINDS:
            raise UsageError(f"unknown series kind {kind!r}")
        self.a, self.b, self.kind = a, b, kind
        self.model = model
        self.psi = None
        if model == "gl1_exact":
            if b is None:
                raise UsageError("gl1_exact applies to pairs of degree-1 members")
            if a.degree != 1 or b.degree != 1 or a.character is None or b.character is None:
                raise UsageError("gl1_exact requires two degree-1 members with character data")
            self.psi = product_primitive_character(a.character, b.character)
        elif model != "product":
            raise UsageError(f"unknown ramified model {model!r}")
        self._cache: dict[tuple[tuple[int, int], int], complex] = {}

    @property
    def exact(self) -> bool:
        if self.psi is not None:
            return True
        reps = [self.a] if self.b is None else [self.a, self.b]
        # the product model is exact whenever no ramified prime can occur
        return all(r.conductor.is_unit for r in reps)

    def value(self, field, pid, e: int) -> complex:
        key = (pid, e)
        if key not in self._cache:
            self._cache[key] = self._compute(field, pid, e)
        return self._cache[key]

    def _compute(self, field, pid, e: int) -> complex:
        if e == 0:
            return 1 + 0j
        kind = self.kind
        if self.psi is not None:
            p = pid[0]
            v = self.psi.value(p)
            if kind == "lambda":
                return v**e
            if kind == "mu":
                return -v if e == 1 else 0j
            if kind == "biglambda":
                return v**e * math.log(p)
            return v**e / e  # logl
        prime = prime_ideal(field, pid)
        pa = self.a.local_at(prime)
        if self.b is None:
            if kind == "lambda":
                return local_lambda(pa, e)
            if kind == "mu":
                c = poly_from_roots(pa.alphas)
                return complex(c[e]) if e < len(c) else 0j
            ps = power_sum(pa.alphas, e)
            if kind == "biglambda":
                return ps * math.log(prime.norm)
            return ps / e
        pb = self.b.local_at(prime)
        if kind == "lambda":
            return rankin_selberg_local(pa, pb, e)
        if kind == "mu":
            prod_poly = np.ones(1, dtype=np.complex128)
            for x in pa.alphas:
                for y in pb.alphas:
                    prod_poly = np.convolve(prod_poly, [1.0, -x * np.conj(y)])
            return complex(prod_poly[e]) if e < len(prod_poly) else 0j
        ps = power_sum(pa.alphas, e) * np.conj(power_sum(pb.alphas, e))
        if kind == "biglambda":
            return complex(ps * math.log(prime.norm))
        return complex(ps / e)


def expand_global(
    a: Representation,
    b: Representation | None,
    bound: int,
    kind: str,
    ramified_model: str = "product",
    max_count: int = DEFAULT_IDEAL_CEILING,
) -> CoefficientSeries:
    """Assemble global coefficients up to the norm bound.

    With b given, the series belongs to the pairing of a against the
    contragredient of b; pass b = contragredient(pi0) for a pairing with
    pi0 itself.  lambda and mu are multiplicative over coprime ideals;
    biglambda and logl are supported on prime powers only and the returned
    series stores just that support.
    """
    field = a.field
    if b is not None and b.field != field:
        raise UsageError("pair expansion requires a common field")
    engine = _LocalEngine(a, b, kind, ramified_model)
    values: dict[IdealIndex, complex] = {}
    if kind in ("biglambda", "logl"):
        for pid, pn in prime_ideals_up_to(field, bound):
            norm_pow = pn
            e = 1
            while norm_pow <= bound:
                ideal = IdealIndex(field, ((pid, e),), norm_pow)
                val = engine.value(field, pid, e)
                if val != 0:
                    values[ideal] = val
                norm_pow *= pn
                e += 1
    else:
        for ideal in ideal_list(field, bound, max_count):
            acc = 1 + 0j
            for pid, e in ideal.factors:
                acc *= engine.value(field, pid, e)
                if acc == 0:
                    break
            if acc != 0 or ideal.is_unit:
                values[ideal] = acc
    return CoefficientSeries(field, kind, bound, values, exact=engine.exact)


def pair_series(
    a: Representation,
    pi0: Representation,
    bound: int,
    kind: str,
    ramified_model: str = "product",
) -> CoefficientSeries:
    """Coefficients of the convolution of a with pi0 itself (not its dual)."""
    return expand_global(a, contragredient(pi0), bound, kind, ramified_model)


class KahanAccumulator:
    """Compensated complex accumulation, one guard per real component."""

    __slots__ = ("re", "im", "cre", "cim")

    def __init__(self):
        self.re = self.im = self.cre = self.cim = 0.0

    def add(self, z: complex):
        y = z.real - self.cre
        t = self.re + y
        self.cre = (t - self.re) - y
        self.re = t
        y = z.imag - self.cim
        t = self.im + y
        self.cim = (t - self.im) - y
        self.im = t

    def value(self) -> complex:
        return complex(self.re, self.im)


def dirichlet_convolve(a: CoefficientSeries, b: CoefficientSeries, bound: int) -> CoefficientSeries:
    """(a * b)(n) = sum over ideal factorizations n = d e of a(d) b(e)."""
    if a.field != b.field:
        raise UsageError("convolution requires series over a common field")
    if a.bound < bound or b.bound < bound:
        raise UsageError("operand series are shorter than the requested bound")
    a_items = [(i, v) for i, v in a.items_sorted() if i.norm <= bound]
    b_items = [(i, v) for i, v in b.items_sorted() if i.norm <= bound]
    acc: dict[IdealIndex, KahanAccumulator] = {}
    for ia, va in a_items:
        limit = bound // ia.norm
        for ib, vb in b_items:
            if ib.norm > limit:
                break
            key = ideal_mul(ia, ib)
            slot = acc.get(key)
            if slot is None:
                slot = acc[key] = KahanAccumulator()
            slot.add(va * vb)
    return CoefficientSeries(
        a.field,
        f"conv({a.kind},{b.kind})",
        bound,
        {k: v.value() for k, v in acc.items()},
        exact=a.exact and b.exact,
    )


def unit_indicator_series(field: NumberFieldSpec, bound: int) -> CoefficientSeries:
    return CoefficientSeries(field, "unit", bound, {unit_ideal(field): 1 + 0j})


def mertens_sum(rep: Representation, x: int, ramified_model: str | None = None) -> float:
    """sum over N(n) <= x of lambda_{pi x dual(pi)}(n) / N(n).

    Diagonal coefficients are nonnegative reals; the gl1_exact model is
    used automatically for character members, where it is exact.
    """
    if x < 3:
        raise UsageError("mertens_sum requires x >= 3")
    model = ramified_model
    if model is None:
        model = "gl1_exact" if (rep.degree == 1 and rep.character is not None) else "product"
    series = expand_global(rep, rep, x, "lambda", model)
    acc = KahanAccumulator()
    for ideal, val in series.items_sorted():
        acc.add(val / ideal.norm)
    total = acc.value()
    if abs(total.imag) > 1e-9 * max(1.0, abs(total.real)):
        raise UsageError(f"diagonal coefficient sum is not real: {total}")
    return float(total.real)


# ---------------------------------------------------------------------------
# fast vectorized series for GL1 members over Q (array indexed by n)


def mobius_sieve(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    primes = []
    is_comp = np.zeros(n + 1, dtype=bool)
    smallest = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            smallest[i] = i
            mu[i] = -1
        for p in primes:
            if p * i > n or p > smallest[i]:
                break
            is_comp[p * i] = True
            smallest[p * i] = p
            mu[p * i] = 0 if i % p == 0 else -mu[i]
    return mu


def von_mangoldt_sieve(n: int) -> np.ndarray:
    lam = np.zeros(n + 1, dtype=np.float64)
    for p in map(int, _primes(n)):
        pk = p
        while pk <= n:
            lam[pk] = math.log(p)
            pk *= p
    return lam


def _primes(n):
    from .ideals import primes_up_to

    return primes_up_to(n)


def gl1_series_array(
    a: Representation, b: Representation | None, bound: int, kind: str
) -> np.ndarray:
    """values[n] for n = 0..bound of the gl1_exact series over Q."""
    if a.field != NumberFieldSpec.rationals() or a.character is None:
        raise UsageError("gl1_series_array needs GL1 members over Q with characters")
    ns = np.arange(bound + 1)
    if b is None:
        psi = a.character
    else:
        if b.character is None:
            raise UsageError("gl1_series_array needs character data on both members")
        psi = product_primitive_character(a.character, b.character)
    vals = psi.values(ns)
    vals[0] = 0
    if kind == "lambda":
        return vals
    if kind == "mu":
        return vals * mobius_sieve(bound)
    if kind == "biglambda":
        return vals * von_mangoldt_sieve(bound)
    if kind == "logl":
        out = np.zeros(bound + 1, dtype=np.complex128)
        lam = von_mangoldt_sieve(bound)
        logs = np.log(np.maximum(ns, 1))
        support = lam > 0
        out[support] = vals[support] * lam[support] / logs[support]
        return out
    raise UsageError(f"unknown series kind {kind!r}")


def selftest() -> list[tuple[str, bool, str]]:
    from .localdata import synthetic_family, trivial_representation

    results = []
    rng = np.random.default_rng(1234)

    # Cauchy identity against direct series inversion
    worst = 0.0
    for _ in range(20):
        n, n2 = rng.integers(1, 4, size=2)
        al = rng.normal(size=n) + 1j * rng.normal(size=n)
        be = rng.normal(size=n2) + 1j * rng.normal(size=n2)
        prime = prime_ideal(NumberFieldSpec.rationals(), (2, 0))
        pa = LocalParameters(prime, tuple(map(complex, al)))
        pb = LocalParameters(prime, tuple(map(complex, be)))
        poly = np.ones(1, dtype=np.complex128)
        for x in al:
            for y in be:
                poly = np.convolve(poly, [1.0, -x * np.conj(y)])
        inv = np.zeros(9, dtype=np.complex128)
        inv[0] = 1.0
        for k in range(1, 9):
            inv[k] = -sum(poly[j] * inv[k - j] for j in range(1, min(len(poly) - 1, k) + 1))
        for k in range(9):
            got = rankin_selberg_local(pa, pb, k)
            ref = complex(inv[k])
            worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    results.append(("Cauchy identity vs inversion", worst < 1e-10, f"rel err {worst:.2e}"))

    # lambda * mu = unit indicator for the trivial member
    triv = trivial_representation()
    lam = expand_global(triv, None, 200, "lambda")
    mu = expand_global(triv, None, 200, "mu")
    conv = dirichlet_convolve(lam, mu, 200)
    resid = max(
        abs(v - (1.0 if i.is_unit else 0.0)) for i, v in conv.values.items()
    )
    results.append(("lambda * mu = unit", resid < 1e-12, f"residual {resid:.2e}"))

    # classical von Mangoldt from the trivial pair
    big = expand_global(triv, triv, 100, "biglambda")
    ok = abs(big.value(IdealIndex(triv.field, (((2, 0), 3),), 8)) - math.log(2)) < 1e-12
    results.append(("Lambda(8) = log 2", ok, ""))

    # diagonal nonnegativity on a synthetic family
    fam = synthetic_family(2, 2, seed=3)
    diag = expand_global(fam.members[0], fam.members[0], 300, "lambda")
    low = min(v.real for v in diag.values.values())
    results.append(("diagonal nonnegativity", low > -1e-12, f"min {low:.2e}"))

    h10 = mertens_sum(triv, 10)
    results.append(("harmonic mertens value", abs(h10 - 2.9289682539682538) < 1e-12, f"{h10}"))
    return results
