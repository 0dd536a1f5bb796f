"""Randomized verification suites behind `padic-paths verify`."""

from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import structlog

from ..config.schemas import CheckStatus, VerificationReport
from ..config.settings import RunConfig
from ..propagator.actions import FIELD, FREE, OSCILLATOR, build_action, shift
from ..propagator.gauss import gauss_closed, gauss_stabilized, stabilization_terms
from ..propagator.kernel import (
    BallFunction,
    KernelSpec,
    evolve,
    kernel_at,
    normalization,
    off_diagonal_unitarity,
    relations_uv,
    textbook_kernel,
    time_sliced,
    unitarity_threshold,
    verify_group,
)
from ..propagator.padic_core import (
    ExactCircle,
    Place,
    character,
    digits,
    frac_part,
    lambda_fn,
    legendre,
    norm,
    valuation,
)
from .sampling import Sampler

logger = structlog.get_logger(__name__)

SUITES = (
    "core",
    "lambda",
    "gauss",
    "scaling",
    "group",
    "norms",
    "uv",
    "slice",
    "translation",
    "unitarity",
    "delta",
    "archimedean",
)

LAMBDA_CASES = 1000
GAUSS_CASES_PER_PRIME = 50
GAUSS_MAX_ATTEMPTS = 40
# cap on the largest exhaustive period a gauss suite case may enumerate
GAUSS_SUITE_TERMS = 10**6
GROUP_CASES = 100
OSCILLATOR_CASES = 25
INSTANCE_CASES = 50
SLICE_COUNTS = (1, 2, 3, 4, 8, 16)
OSCILLATOR_SLICE_COUNTS = (1, 2, 4)
SLICE_CASES = 5
DELTA_DEPTHS = (1, 2, 3)
DELTA_SAMPLES = 8
ARCHIMEDEAN_TOL = 1e-12
PLANCK_VALUES = (Fraction(1, 2), Fraction(2), Fraction(3))

Case = Tuple[Any, Any, bool]


def summarize(check: str, inputs: Dict[str, Any], cases: Iterable[Case], tol: Optional[float] = None) -> VerificationReport:
    """Fold many comparisons into one report; the first failure is the witness."""
    count = failures = 0
    witness: Optional[Tuple[Any, Any]] = None
    last: Tuple[Any, Any] = ("at least one case", "no cases")
    for expected, got, ok in cases:
        count += 1
        last = (expected, got)
        if not ok:
            failures += 1
            if witness is None:
                witness = (expected, got)
    expected, got = witness or last
    status = CheckStatus.PASS if count and not failures else CheckStatus.FAIL
    return VerificationReport(
        check=check,
        inputs={**inputs, "cases": count, "failures": failures},
        expected=expected,
        got=got,
        tol=tol,
        status=status,
    )


class SuiteService:
    """Runs the named verification suites with one seeded sampler each."""

    def __init__(self, config: RunConfig):
        self.config = config

    def run(self, name: str) -> Iterator[VerificationReport]:
        """Yield the reports of one suite, or of every suite for `all`."""
        if name == "all":
            for suite in SUITES:
                yield from self.run(suite)
            return
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; expected all or one of {', '.join(SUITES)}")
        handler: Callable[[Sampler], Iterator[VerificationReport]] = getattr(self, f"suite_{name}")
        passed = failed = 0
        for report in handler(Sampler(self.config.seed)):
            if report.passed:
                passed += 1
            else:
                failed += 1
            yield report
        logger.info("suite_finished", suite=name, passed=passed, failed=failed)

    def _planck(self, i: int) -> Fraction:
        """Cycle h through the configured value and a few others."""
        values = (self.config.h,) + PLANCK_VALUES
        return values[i % len(values)]

    def _padic_places(self, defaults: List[str]) -> List[Place]:
        places = [v for v in self.config.places(defaults) if not v.is_archimedean]
        if not places:
            raise ValueError("this suite runs at p-adic places only")
        return places

    def _systems(self, place: Place) -> List[str]:
        return [FREE, FIELD] if place.is_archimedean else [FREE, FIELD, OSCILLATOR]

    def _split_specs(self, sampler: Sampler, place: Place, system: str, h: Fraction) -> Tuple[KernelSpec, KernelSpec]:
        split = sampler.split(place, system)
        target = self.config.series_target
        later = build_action(system, split.params, split.t1, split.t2, place.prime, target)
        earlier = build_action(system, split.params, split.t0, split.t1, place.prime, target)
        return KernelSpec(later, place, h), KernelSpec(earlier, place, h)

    def suite_core(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Ultrametric inequality, character additivity, frac, digits, Legendre multiplicativity."""
        for place in self.config.places(["2", "3", "5", "7", "13"]):
            pairs = [(sampler.rational(place, -3, 3), sampler.rational(place, -3, 3)) for _ in range(INSTANCE_CASES)]
            yield summarize(
                f"core/character/{place}",
                {"place": place},
                ((character(x + y, place), character(x, place) * character(y, place),
                  character(x + y, place) == character(x, place) * character(y, place)) for x, y in pairs),
            )
            if place.is_archimedean:
                continue
            p = place.p
            yield summarize(
                f"core/ultrametric/{place}",
                {"place": place},
                ((max(norm(x, place), norm(y, place)), norm(x + y, place),
                  norm(x + y, place) <= max(norm(x, place), norm(y, place))) for x, y in pairs),
            )
            yield summarize(
                f"core/frac/{place}",
                {"place": place},
                ((frac_part(x, p), frac_part(frac_part(x, p), p),
                  frac_part(frac_part(x, p), p) == frac_part(x, p) and valuation(x - frac_part(x, p), p) >= 0)
                 for x, _ in pairs),
            )
            yield summarize(
                f"core/digits/{place}",
                {"place": place, "count": 4},
                ((x, digits(x, p, 4).reconstruct(),
                  valuation(x - digits(x, p, 4).reconstruct(), p) >= valuation(x, p) + 4) for x, _ in pairs),
            )
            if p != 2:
                units = [(sampler.integer(1, 10 * p) * p + sampler.integer(1, p - 1), sampler.integer(1, p - 1))
                         for _ in range(INSTANCE_CASES)]
                yield summarize(
                    f"core/legendre/{place}",
                    {"place": place},
                    ((legendre(a, p) * legendre(b, p), legendre(a * b, p),
                      legendre(a * b, p) == legendre(a, p) * legendre(b, p)) for a, b in units),
                )

    def suite_lambda(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """λ(0) = 1, |λ| = 1, λ*(x)λ(x) = 1, λ(a²x) = λ(x) and λ(x)λ(y) = λ(x + y)λ(1/x + 1/y)."""
        for place in self.config.places(["2", "3", "5", "7", "13", "inf"]):
            cases = [(sampler.rational(place, -3, 3), sampler.rational(place, -2, 2)) for _ in range(LAMBDA_CASES)]
            values = [(x, a, lambda_fn(x, place)) for x, a in cases]
            yield summarize(
                f"lambda/zero/{place}", {"place": place}, [(ExactCircle(), lambda_fn(0, place), lambda_fn(0, place) == ExactCircle())]
            )
            yield summarize(
                f"lambda/conjugate/{place}",
                {"place": place},
                ((ExactCircle(), lam.conjugate() * lam, lam.conjugate() * lam == ExactCircle() and lam.mag2 == 1)
                 for _, _, lam in values),
            )
            yield summarize(
                f"lambda/square/{place}",
                {"place": place},
                ((lam, lambda_fn(a * a * x, place), lambda_fn(a * a * x, place) == lam) for x, a, lam in values),
            )
            sums = [(x, y, lam) for x, y, lam in values if x + y != 0]
            yield summarize(
                f"lambda/sum/{place}",
                {"place": place},
                ((lam * lambda_fn(y, place), lambda_fn(x + y, place) * lambda_fn(1 / x + 1 / y, place),
                  lam * lambda_fn(y, place) == lambda_fn(x + y, place) * lambda_fn(1 / x + 1 / y, place))
                 for x, y, lam in sums),
            )

    def suite_gauss(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Closed form against stabilized brute-force sums, valuations in [−3, 3]."""
        cap = min(self.config.term_budget, GAUSS_SUITE_TERMS)
        tol = self.config.tolerance
        for place in self._padic_places(["2", "3", "5", "7"]):
            p = place.p
            accepted: List[Case] = []
            for _ in range(GAUSS_CASES_PER_PRIME * GAUSS_MAX_ATTEMPTS):
                if len(accepted) >= GAUSS_CASES_PER_PRIME:
                    break
                alpha = sampler.rational(place, -3, 3)
                beta = Fraction(0) if sampler.integer(0, 4) == 0 else sampler.rational(place, -3, 3)
                if stabilization_terms(alpha, beta, p) > cap:
                    continue
                closed = gauss_closed(alpha, beta, place)
                brute = gauss_stabilized(alpha, beta, p, tol, self.config.term_budget, self.config.workers)
                accepted.append(
                    ({"alpha": alpha, "beta": beta, "closed": closed}, brute, abs(complex(closed) - brute) < tol)
                )
            yield summarize(f"gauss/{place}", {"place": place, "max_terms": cap}, accepted, tol)

    def suite_scaling(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Substitution x → ax: |a|_v·G(αa², βa) = G(α, β)."""
        for place in self.config.places():
            cases = []
            for _ in range(INSTANCE_CASES):
                alpha, beta, a = (sampler.rational(place, -3, 3) for _ in range(3))
                direct = gauss_closed(alpha, beta, place)
                scaled = gauss_closed(alpha * a * a, beta * a, place) * ExactCircle(norm(a, place) ** 2)
                cases.append((direct, scaled, direct == scaled))
            yield summarize(f"scaling/{place}", {"place": place}, cases)

    def suite_group(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Group property over random splits of each catalog system."""
        for place in self.config.places():
            for system in self._systems(place):
                total = OSCILLATOR_CASES if system == OSCILLATOR else GROUP_CASES
                reports = [verify_group(*self._split_specs(sampler, place, system, self._planck(i))) for i in range(total)]
                yield summarize(
                    f"group/{system}/{place}",
                    {"place": place, "system": system},
                    ((r.expected, r.got, r.passed) for r in reports),
                )

    def suite_norms(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """mag2(N) = |b/h|_v for every catalog system."""
        for place in self.config.places():
            for system in self._systems(place):
                cases = []
                for i in range(INSTANCE_CASES):
                    spec, _ = self._split_specs(sampler, place, system, self._planck(i))
                    expected = norm(spec.action.b / spec.h, place)
                    got = normalization(spec).mag2
                    cases.append((expected, got, expected == got))
                yield summarize(f"norms/{system}/{place}", {"place": place, "system": system}, cases)

    def suite_uv(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """u = v = 1 for polynomial systems; trivial units for the oscillator."""
        for place in self.config.places():
            for system in self._systems(place):
                cases = []
                for i in range(INSTANCE_CASES):
                    later, earlier = self._split_specs(sampler, place, system, self._planck(i))
                    u, v, report = relations_uv(later.action, earlier.action, place)
                    exact = system == OSCILLATOR or (u == 1 and v == 1)
                    cases.append((report.expected, report.got, report.passed and exact))
                yield summarize(f"uv/{system}/{place}", {"place": place, "system": system}, cases)

    def suite_slice(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """time_sliced(n) equals the direct kernel for every slice count."""
        for place in self.config.places():
            for system in self._systems(place):
                counts = OSCILLATOR_SLICE_COUNTS if system == OSCILLATOR else SLICE_COUNTS
                cases = []
                for i in range(SLICE_CASES):
                    h = self._planck(i)
                    t0, t1, params, x2, x1 = self._slice_instance(sampler, place, system)
                    direct = build_action(system, params, t0, t1, place.prime, self.config.series_target)
                    expected = kernel_at(KernelSpec(direct, place, h), x2, x1)
                    for n in counts:
                        got = time_sliced(system, params, n, t0, t1, place, h, x2, x1, self.config.series_target)
                        cases.append(({"n": n, "kernel": expected}, got, got == expected))
                yield summarize(f"slice/{system}/{place}", {"place": place, "system": system, "counts": list(counts)}, cases)

    def _slice_instance(
        self, sampler: Sampler, place: Place, system: str
    ) -> Tuple[Fraction, Fraction, Dict[str, Fraction], Fraction, Fraction]:
        if system != OSCILLATOR:
            split = sampler.split(place, system)
            return split.t0, split.t2, split.params, sampler.rational(place, -1, 1), sampler.rational(place, -1, 1)
        p = place.p
        disk = 2 if p == 2 else 1
        # a quarter slice at p = 2 loses two valuations of ωT
        params = {"m": sampler.unit(p), "omega": sampler.unit(p) * Fraction(p) ** (disk + 2)}
        t0 = Fraction(sampler.integer(-3, 3))
        return t0, t0 + sampler.unit(p, positive=True), params, Fraction(sampler.integer(-5, 5)), Fraction(sampler.integer(-5, 5))

    def suite_translation(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Kernels of time-independent Lagrangians depend on t″ − t′ only."""
        for place in self.config.places():
            for system in self._systems(place):
                cases = []
                for i in range(INSTANCE_CASES):
                    spec, _ = self._split_specs(sampler, place, system, self._planck(i))
                    tau = sampler.rational(place, -2, 2)
                    x2, x1 = Fraction(sampler.integer(-5, 5)), Fraction(sampler.integer(-5, 5))
                    moved = shift(spec.action, tau)
                    rebuilt = build_action(
                        system, spec.action.parameters, moved.t_start, moved.t_end, place.prime, self.config.series_target
                    )
                    expected = kernel_at(spec, x2, x1)
                    got = kernel_at(KernelSpec(moved, place, spec.h), x2, x1)
                    same = got == expected and rebuilt.coefficients() == spec.action.coefficients()
                    cases.append((expected, got, same))
                yield summarize(f"translation/{system}/{place}", {"place": place, "system": system}, cases)

    def suite_unitarity(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Off-diagonal brute-force composition vanishes past the threshold radius."""
        tol = self.config.tolerance
        for place in self._padic_places(["3", "5"]):
            off, diagonal = [], []
            for i in range(INSTANCE_CASES):
                spec, _ = self._split_specs(sampler, place, FREE, self._planck(i))
                x2 = sampler.rational(place, -1, 1)
                z = x2 + sampler.rational(place, -1, 1)
                gamma = unitarity_threshold(spec, x2, z) + 1
                got = off_diagonal_unitarity(spec, x2, z, gamma, self.config.term_budget, self.config.workers)
                off.append(({"gamma": gamma, "value": 0}, got, abs(got) < tol))
                volume = float(normalization(spec).mag2 * Fraction(place.p) ** gamma)
                got = off_diagonal_unitarity(spec, x2, x2, gamma, self.config.term_budget, self.config.workers)
                diagonal.append((volume, got, abs(got - volume) < tol * max(1.0, volume)))
            yield summarize(f"unitarity/off_diagonal/{place}", {"place": place}, off, tol)
            yield summarize(f"unitarity/diagonal/{place}", {"place": place}, diagonal, tol)

    def suite_delta(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """Evolving 1_{Z_p} over p-adically short times keeps |Uψ| = 1 on Z_p and 0 outside."""
        tol = self.config.tolerance
        for place in self._padic_places(["3"]):
            p = place.p
            if p == 2:
                raise ValueError("the delta suite runs at odd primes")
            psi = BallFunction.indicator(p)
            for k in DELTA_DEPTHS:
                m = sampler.unit(p)
                T = sampler.unit(p, positive=True) * Fraction(p) ** k
                spec = KernelSpec(build_action(FREE, {"m": m}, 0, T), place, self.config.h)
                inside = [sampler.rational(place, 0, 2) for _ in range(DELTA_SAMPLES)]
                outside = [sampler.rational(place, -2, -1) for _ in range(DELTA_SAMPLES)]
                budget, workers = self.config.term_budget, self.config.workers
                values_in = evolve(spec, psi, inside, budget, workers)
                values_out = evolve(spec, psi, outside, budget, workers)
                cases = [({"x": x, "abs": 1.0}, abs(u), abs(abs(u) - 1) < tol) for x, u in zip(inside, values_in)]
                cases += [({"x": x, "abs": 0.0}, abs(u), abs(u) < tol) for x, u in zip(outside, values_out)]
                yield summarize(f"delta/k={k}/{place}", {"place": place, "m": m, "T": T}, cases, tol)

    def suite_archimedean(self, sampler: Sampler) -> Iterator[VerificationReport]:
        """The exact real-place kernel against the textbook closed form."""
        place = Place.infinity()
        for system in (FREE, FIELD):
            cases = []
            for i in range(INSTANCE_CASES):
                spec, _ = self._split_specs(sampler, place, system, self._planck(i))
                x2, x1 = sampler.rational(place, -1, 1), sampler.rational(place, -1, 1)
                expected = textbook_kernel(spec, x2, x1)
                got = complex(kernel_at(spec, x2, x1))
                cases.append((expected, got, abs(expected - got) < ARCHIMEDEAN_TOL))
            yield summarize(f"archimedean/{system}", {"place": place, "system": system}, cases, ARCHIMEDEAN_TOL)
