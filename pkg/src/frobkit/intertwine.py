"""Conjugating one Frobenius lift into another.

Solves f(xi(x)) = xi(f2(x)) for a power series xi with xi(0) = 0 and unit
leading coefficient, degree by degree.  The leading coefficient mu0 is
pinned by the lowest-degree terms (free when both lifts start in degree
one); every later coefficient comes from dividing the current residual
coefficient by an explicit nonzero divisor, so the precision loss per
degree is a known constant and the starting precision can be budgeted up
front.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PrecisionError, SpecMismatchError
from .scalars import DEFAULT_PREC, FElement, OFElement, OFExact, of_root
from .series import FrobLift, USeries, s_compose


@dataclass(frozen=True)
class CompatReport:
    s: int
    s2: int
    v: int
    v2: int

    @property
    def ok(self) -> bool:
        return self.s == self.s2 and self.v == self.v2

    def to_json(self) -> dict:
        return {"s": self.s, "s2": self.s2, "v": self.v, "v2": self.v2,
                "ok": self.ok}


def _lowest(f: FrobLift) -> tuple[int, int]:
    for i, a in enumerate(f.coeffs, start=1):
        if not a.is_zero():
            return i, a.val()
    raise AssertionError("unreachable: a_p = 1")


def check_compatible(f: FrobLift, f2: FrobLift) -> CompatReport:
    """Compatible iff the lowest-degree terms match in degree and valuation."""
    s, v = _lowest(f)
    s2, v2 = _lowest(f2)
    return CompatReport(s, s2, v, v2)


def compute_mu0(f: FrobLift, f2: FrobLift, choice=None,
                prec: int = DEFAULT_PREC) -> list[FElement]:
    """Leading-coefficient candidates.

    Degree-one lifts leave mu0 free (any unit works when a_1 = a_1'), so
    the caller's choice (default 1) is returned.  Otherwise mu0 must solve
    mu0^(s-1) = a_s'/a_s, and every residue-root candidate is returned.
    """
    comp = check_compatible(f, f2)
    if not comp.ok:
        raise SpecMismatchError(
            f"lifts are incompatible: lowest terms ({comp.s}, v={comp.v}) "
            f"vs ({comp.s2}, v={comp.v2})"
        )
    s = comp.s
    spec = f.spec
    if s == 1:
        if f.coeffs[0] != f2.coeffs[0]:
            raise SpecMismatchError("incompatible linear terms")
        if choice is None:
            choice = OFExact.one(spec)
        if isinstance(choice, int):
            choice = OFExact.make(spec, choice)
        if isinstance(choice, OFExact):
            return [FElement.from_exact(choice, prec)]
        if isinstance(choice, OFElement):
            return [FElement.make(choice)]
        return [choice]
    if choice is not None:
        raise ValueError("mu0 is determined by the lifts when s > 1")
    ratio = f2.coeffs[s - 1] / f.coeffs[s - 1]
    roots = of_root(ratio.at_prec(prec), s - 1)
    return [FElement.make(r) for r in roots]


@dataclass(frozen=True)
class IntertwineResult:
    xi: USeries
    mu0: FElement
    s: int
    integral: bool
    verified_to: tuple[int, int]
    losses: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "xi": self.xi.to_json(),
            "mu0": self.mu0.to_json(),
            "s": self.s,
            "integral": self.integral,
            "verified_to": {"M": self.verified_to[0], "N": self.verified_to[1]},
            "losses": list(self.losses),
        }


def _residual(fs: USeries, f2s: USeries, xi: USeries, length: int) -> USeries:
    lhs = s_compose(fs, xi).truncate(length)
    rhs = s_compose(xi, f2s).truncate(length)
    return lhs - rhs


def solve_intertwiner(f: FrobLift, f2: FrobLift, mu0, M: int,
                      N: int = DEFAULT_PREC) -> IntertwineResult:
    """Build xi through x^M with coefficients good modulo pi^N.

    Each degree d costs one division whose divisor valuation is known
    (v(a_1) when s = 1, v(s a_s) when s > 1), so the recursion starts at
    N + M*loss and the result still carries N digits.  The residual
    coefficient must vanish mod pi before each division; a visibly
    non-vanishing one means the inputs violate the compatibility theorem.
    """
    spec = f.spec
    comp = check_compatible(f, f2)
    if not comp.ok:
        raise SpecMismatchError("lifts are incompatible")
    s = comp.s
    if M < 1:
        raise ValueError("M must be at least 1")
    a_s = f.coeffs[s - 1]
    loss = a_s.val() + (spec.e_F if s == spec.p else 0)
    n_start = N + M * loss + 2

    if isinstance(mu0, int):
        mu0 = OFExact.make(spec, mu0)
    if isinstance(mu0, OFExact):
        mu0 = FElement.from_exact(mu0, n_start)
    elif isinstance(mu0, OFElement):
        mu0 = FElement.make(mu0)
    if mu0.is_zero_at_prec() or mu0.vlow() != 0:
        raise ValueError("mu0 must be a unit")

    fs = f.as_series(absprec=n_start)
    f2s = f2.as_series(absprec=n_start)

    coeffs: list = [FElement.zero_at(spec, n_start), mu0]
    losses: list[int] = []
    if s > 1:
        s_el = OFExact.make(spec, s)
        base = FElement.from_exact(s_el * a_s, n_start)
        div_const = base * mu0 ** (s - 1)
    for d in range(2, M + 1):
        xi = USeries.make(spec, coeffs, absprec=n_start)
        lam = _residual(fs, f2s, xi, d + s).coeff(d + s - 1)
        if s == 1:
            div = FElement.from_exact(f.coeffs[0] - f2.coeffs[0] ** d, n_start)
        else:
            div = div_const
        if not lam.is_zero_at_prec() and lam.vlow() < 1:
            raise SpecMismatchError(
                f"internal inconsistency: residual at degree {d} is a unit"
            )
        try:
            mu_d = -(lam / div)
        except PrecisionError as exc:
            raise PrecisionError(
                f"precision exhausted at degree {d}"
            ) from exc
        losses.append(div.vlow())
        coeffs.append(mu_d)
    xi = USeries.make(spec, coeffs, absprec=n_start)
    integral = all(c.is_integral() for c in coeffs)
    if a_s.val() == 1 and not integral:
        raise AssertionError(
            "theorem violated: v(a_s) = v(pi) guarantees an integral xi"
        )
    achieved = min((c.absprec for c in coeffs[1:]), default=n_start)
    return IntertwineResult(xi, mu0, s, integral, (M, min(N, achieved)),
                            tuple(losses))


def solve_intertwiner_all(f: FrobLift, f2: FrobLift, M: int,
                          N: int = DEFAULT_PREC,
                          choice=None) -> list[IntertwineResult]:
    """One result per mu0 candidate (s > 1 can have several)."""
    loss = _lowest(f)[1] + (f.spec.e_F if _lowest(f)[0] == f.spec.p else 0)
    cands = compute_mu0(f, f2, choice=choice, prec=N + M * loss + 2)
    return [solve_intertwiner(f, f2, mu, M, N) for mu in cands]


def verify_intertwine(f: FrobLift, f2: FrobLift, xi: USeries,
                      M: int, N: int) -> bool:
    """Direct-composition oracle: f(xi) - xi(f2) = 0 mod (x^M, pi^N)."""
    if not xi.coeff(0).is_zero_at_prec():
        raise ValueError("xi must vanish at 0")
    diff = _residual(f.as_series(absprec=N + 2), f2.as_series(absprec=N + 2),
                     xi, M)
    for k in range(M):
        c = diff.coeff(k)
        capped = c.cap_absprec(N)
        if not capped.is_zero_at_prec():
            return False
        if capped.absprec < N:
            raise PrecisionError(
                f"verification undecidable at x^{k}: only {capped.absprec} "
                f"digits available of the {N} requested"
            )
    return True
