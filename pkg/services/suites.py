"""Named verification suites run by the verify scenario kind and the verify_suite command"""
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from services.carleson import (
    CarlesonBox,
    carleson_constant_h2,
    is_carleson_for_dz,
    is_multiplier_ku_to_dz,
    is_multiplier_of_dz,
    model_space_carleson_constant,
    model_space_dz_constant,
    multiplier_bound,
)
from services.catalog import example1_b, example2_b2, example4_nu, example4_phi, raised_cosine, singular_at_one
from services.dirichlet import (
    littlewood_paley_integral,
    local_dirichlet_area,
    local_dirichlet_decomposition,
    local_dirichlet_douglas,
    routes_agree,
    weighted_dirichlet,
)
from services.disk_functions import BlaschkeProduct, Polynomial, SchurFunction, SzegoKernel, UnitCirclePoint
from services.embedding import (
    embedding_constant,
    inclusion_criterion_ratio,
    kernel_norm_equality_check,
    quadratic_potential,
    quotient_operator_matrix,
    ratio_sweep,
    resolvent_kernel_check,
    separated_embedding_bound,
)
from services.exceptions import ConfigError
from services.kernels import (
    DbrKernel,
    TakenakaBasis,
    compressed_shift_matrix,
    dbr_kernel_norm_sq,
    gram_in_hb,
    hb_gram_by_quadrature,
    quotient_identity_residual,
)
from services.measures import BoundaryMeasure, CircleDensity
from services.quadrature import TWO_PI, QuadratureConfig, wrap_angle
from services.spectrum import boundary_spectrum, in_spectrum_sampled

logger = logging.getLogger(__name__)

SUITES = {'identities': [], 'acceptance': [], 'smoke': []}
ALIASES = {'paper-identities': 'identities'}


def check(*suites):
    """Register a check function in the named suites"""
    def register(func):
        for suite in suites:
            SUITES[suite].append(func)
        return func
    return register


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {'check': self.name, 'passed': self.passed, 'detail': self.detail, 'elapsed': self.elapsed}


@dataclass
class SuiteResult:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def to_frame(self) -> pd.DataFrame:
        # elapsed time stays out of the rows
        return pd.DataFrame([
            {'check': c.name, 'passed': c.passed, 'detail': json.dumps(_plain(c.detail), sort_keys=True)}
            for c in self.checks
        ], columns=['check', 'passed', 'detail'])

    def to_dict(self) -> dict:
        return {
            'suite': self.suite,
            'passed': self.passed,
            'summary': {'total': len(self.checks), 'failed': self.failed},
            'checks': [_plain(c.to_dict()) for c in self.checks],
        }


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def resolve_suite(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(SUITES) + sorted(ALIASES)}", field='suite')
    return name


def run_suite(name: str, quad: Optional[QuadratureConfig] = None, seed: int = 0) -> SuiteResult:
    """Run every check of a suite; a check that raises is recorded as failed"""
    suite = resolve_suite(name)
    quad = quad or QuadratureConfig.from_settings()
    results = []
    for func in SUITES[suite]:
        rng = np.random.default_rng(seed)
        started = time.perf_counter()
        try:
            detail = func(quad, rng)
            passed = bool(detail.pop('passed'))
        except Exception as e:
            logger.warning(f"check {func.__name__} raised {type(e).__name__}: {e}")
            detail, passed = {'error': f"{type(e).__name__}: {e}"}, False
        elapsed = time.perf_counter() - started
        logger.info(f"{suite}/{func.__name__}: {'pass' if passed else 'FAIL'} in {elapsed:.2f} s")
        results.append(CheckResult(func.__name__, passed, detail, elapsed))
    return SuiteResult(suite, results)


# Random objects

def random_zeros(rng, count: int, radius: float = 0.9) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    return r * np.exp(1j * TWO_PI * rng.random(count))


def random_blaschke(rng, max_degree: int = 6, radius: float = 0.9) -> BlaschkeProduct:
    return BlaschkeProduct(random_zeros(rng, int(rng.integers(1, max_degree + 1)), radius))


def random_inner(rng, max_degree: int = 4) -> SchurFunction:
    """Unimodular constant times a finite Blaschke product"""
    return SchurFunction(random_blaschke(rng, max_degree), constant=np.exp(1j * TWO_PI * rng.random()))


def random_rational_schur(rng, max_degree: int = 4) -> SchurFunction:
    """c B with |c| <= 1, not necessarily inner"""
    c = math.sqrt(rng.random()) * np.exp(1j * TWO_PI * rng.random())
    return SchurFunction(random_blaschke(rng, max_degree, radius=0.8), constant=c)


def random_circle_point(rng) -> UnitCirclePoint:
    return UnitCirclePoint(TWO_PI * rng.random())


def random_coefficients(rng, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def function_family(rng, count: int = 50) -> list:
    """Polynomials, Szego kernels and Blaschke products for route comparisons"""
    family = []
    for k in range(count):
        kind = k % 3
        if kind == 0:
            family.append(Polynomial(random_coefficients(rng, int(rng.integers(1, 5)))))
        elif kind == 1:
            family.append(SzegoKernel(complex(random_zeros(rng, 1, 0.8)[0])))
        else:
            family.append(random_blaschke(rng, 3, radius=0.8))
    return family


def _routes_agree(f, zeta, quad) -> tuple:
    values = [
        local_dirichlet_douglas(f, zeta, quad).value,
        local_dirichlet_area(f, zeta, quad).value,
        local_dirichlet_decomposition(f, zeta, quad).value,
    ]
    return routes_agree(values, quad), values


# Algebraic identities

@check('identities', 'acceptance')
def quotient_identity(quad, rng, cases: int = 500):
    worst = 0.0
    for _ in range(cases):
        b = random_inner(rng)
        omega = complex(random_zeros(rng, 1, 0.95)[0])
        z = complex(random_zeros(rng, 1, 0.95)[0])
        worst = max(worst, quotient_identity_residual(b, omega, random_circle_point(rng), z))
    return {'passed': worst <= 1e-10, 'cases': cases, 'max_residual': worst}


@check('identities', 'acceptance', 'smoke')
def compressed_shift_spectrum(quad, rng, cases: int = 50):
    worst = 0.0
    for _ in range(cases):
        blaschke = random_blaschke(rng)
        eigenvalues = np.linalg.eigvals(compressed_shift_matrix(blaschke))
        expected = np.conj(blaschke.zeros)
        gaps = np.abs(eigenvalues[:, None] - expected[None, :])
        worst = max(worst, float(np.max(np.min(gaps, axis=1))), float(np.max(np.min(gaps, axis=0))))
    return {'passed': worst <= 1e-8, 'cases': cases, 'max_gap': worst}


@check('identities')
def gram_positive_semidefinite(quad, rng, cases: int = 100, max_anchors: int = 6):
    smallest = math.inf
    for _ in range(cases):
        b = random_rational_schur(rng)
        gram = gram_in_hb(b, random_zeros(rng, int(rng.integers(1, max_anchors + 1)), 0.9))
        if not gram.is_hermitian():
            return {'passed': False, 'reason': 'Gram matrix is not Hermitian'}
        smallest = min(smallest, gram.min_eigenvalue())
    return {'passed': smallest >= -1e-10, 'cases': cases, 'min_eigenvalue': smallest}


@check('identities', 'acceptance')
def kernel_norms_by_quadrature(quad, rng, cases: int = 100):
    worst = 0.0
    for _ in range(cases):
        b = random_rational_schur(rng)
        omega = complex(random_zeros(rng, 1, 0.9)[0])
        closed = dbr_kernel_norm_sq(b, omega)
        gram = hb_gram_by_quadrature(b, [omega], quad)
        worst = max(worst, abs(float(gram.entries[0, 0].real) - closed) / max(1.0, closed))
    return {'passed': worst <= 1e-8, 'cases': cases, 'max_relative_gap': worst}


@check('identities', 'acceptance')
def resolvent_kernel_relation(quad, rng, cases: int = 20):
    worst = max(resolvent_kernel_check(random_blaschke(rng), random_circle_point(rng)) for _ in range(cases))
    return {'passed': worst <= 1e-8, 'max_residual': worst}


# Dirichlet integrals

@check('identities', 'smoke')
def monomial_local_dirichlet(quad, rng):
    value = local_dirichlet_douglas(Polynomial.monomial(2), UnitCirclePoint(0.0), quad).value
    return {'passed': abs(value - 2.0) <= 1e-8, 'value': value}


@check('identities')
def littlewood_paley_monomials(quad, rng):
    lebesgue = BoundaryMeasure.lebesgue_measure()
    rows = []
    passed = True
    for n in range(1, 5):
        monomial = Polynomial.monomial(n)
        weighted = weighted_dirichlet(monomial, lebesgue, quad).value
        paley = littlewood_paley_integral(monomial, quad).value
        rows.append({'n': n, 'weighted': weighted, 'littlewood_paley': paley})
        passed &= abs(weighted - n) <= 1e-6 * n and abs(paley - n / (n + 1)) <= 1e-6
    return {'passed': passed, 'rows': rows}


@check('identities', 'acceptance')
def atomic_disintegration(quad, rng):
    mu = BoundaryMeasure(atoms=((UnitCirclePoint(0.0), 2.0), (UnitCirclePoint(math.pi / 2), 3.0)))
    value = weighted_dirichlet(Polynomial.monomial(2), mu, quad).value
    return {'passed': abs(value - 10.0) <= 1e-8, 'value': value}


@check('acceptance')
def density_disintegration(quad, rng):
    mu = raised_cosine()
    f = Polynomial([0.3, -0.5j, 1.0])
    area = weighted_dirichlet(f, mu, quad, method='area').value
    direct = weighted_dirichlet(f, mu, quad, method='disintegration').value
    return {'passed': routes_agree([area, direct], quad), 'area': area, 'disintegration': direct}


@check('identities')
def three_routes_small(quad, rng):
    functions = [Polynomial.monomial(2), SzegoKernel(0.5), BlaschkeProduct([0.3, -0.4j])]
    disagreements = []
    for f in functions:
        agree, values = _routes_agree(f, random_circle_point(rng), quad)
        if not agree:
            disagreements.append({'function': repr(f), 'values': values})
    return {'passed': not disagreements, 'disagreements': disagreements}


@check('acceptance')
def three_routes_family(quad, rng):
    disagreements = []
    for f in function_family(rng):
        agree, values = _routes_agree(f, random_circle_point(rng), quad)
        if not agree:
            disagreements.append({'function': repr(f), 'values': values})
    return {'passed': not disagreements, 'functions': 50, 'disagreements': disagreements}


# Embeddings

@check('acceptance')
def finite_dimensional_embedding(quad, rng, spaces: int = 20, samples: int = 20):
    """||f||^2 + D_zeta(f) <= C ||f||^2 on K_B with D_zeta(f) measured by quadrature"""
    worst_excess, worst_gap, worst_resolvent = -math.inf, 0.0, 0.0
    for _ in range(spaces):
        blaschke = random_blaschke(rng)
        zeta = random_circle_point(rng)
        quotient = quotient_operator_matrix(blaschke, zeta)
        constant = embedding_constant(blaschke, zeta)
        basis = TakenakaBasis(blaschke)
        for _ in range(samples):
            c = random_coefficients(rng, blaschke.degree)
            # Takenaka coordinates are orthonormal, so ||f||^2 in H(B) is ||c||^2
            norm = float(np.sum(np.abs(c) ** 2))
            measured = local_dirichlet_douglas(basis.function(c), zeta, quad).value
            bound = constant * norm
            worst_excess = max(worst_excess, (norm + measured - bound) / max(1.0, bound))
            expected = float(np.sum(np.abs(quotient @ c) ** 2))
            worst_gap = max(worst_gap, abs(measured - expected) / max(1.0, expected))
        worst_resolvent = max(worst_resolvent, resolvent_kernel_check(blaschke, zeta))
    passed = worst_excess <= 1e-5 and worst_gap <= 1e-5 and worst_resolvent <= 1e-8
    return {'passed': passed, 'cases': spaces * samples, 'max_excess': worst_excess,
            'max_quadrature_gap': worst_gap, 'max_resolvent_residual': worst_resolvent}


@check('acceptance')
def ratio_blow_up(quad, rng):
    sweeps = {
        'singular-at-1': ratio_sweep(singular_at_one(), UnitCirclePoint(0.0), quad=quad,
                                     require_boundary_kernel=False),
        'example1-b': ratio_sweep(example1_b(), UnitCirclePoint(0.5), quad=quad, require_boundary_kernel=False),
    }
    detail = {name: {'max_ratio': s.max_ratio, 'lower_bound_holds': s.lower_bound_holds()}
              for name, s in sweeps.items()}
    passed = all(s.max_ratio > 1e3 and s.lower_bound_holds() for s in sweeps.values())
    return {'passed': passed, **detail}


@check('acceptance')
def example1_norm_equality(quad, rng, cases: int = 10):
    b = example1_b()
    gaps = []
    for _ in range(cases):
        omega = complex(random_zeros(rng, 1, 0.8)[0])
        gaps.append(kernel_norm_equality_check(b, UnitCirclePoint(0.0), omega, quad)['relative_gap'])
    return {'passed': max(gaps) <= 1e-3, 'max_relative_gap': max(gaps)}


@check('acceptance')
def example2_inclusion_failure(quad, rng):
    b1, b2 = example1_b(), example2_b2()
    ratios = {}
    for distance in (1e-5, 1e-6):
        angle = 2.0 * math.asin(distance / 2.0)
        for sign in (1.0, -1.0):
            ratios[f"{sign * distance:g}"] = inclusion_criterion_ratio(b2, b1, UnitCirclePoint(sign * angle))
    return {'passed': min(ratios.values()) > 1e2, 'ratios': ratios}


def _separated_grid():
    def bump(angles):
        offset = np.abs(wrap_angle(np.asarray(angles) - math.pi))
        return np.where(offset <= math.pi / 3, 1.0 + np.cos(3.0 * offset), 0.0)

    inner = {
        'blaschke-1': SchurFunction(BlaschkeProduct([0.5])),
        'blaschke-2': SchurFunction(BlaschkeProduct([0.3j, -0.6])),
        'singular-at-1': singular_at_one(),
    }
    density = CircleDensity.from_callback(bump, breakpoints=(2 * math.pi / 3, 4 * math.pi / 3),
                                          support=((2 * math.pi / 3, 4 * math.pi / 3),), name='bump')
    measures = {
        'atom-at-minus-1': BoundaryMeasure.dirac(math.pi),
        'two-atoms': BoundaryMeasure(atoms=((UnitCirclePoint(math.pi / 2), 2.0),
                                            (UnitCirclePoint(3 * math.pi / 2), 1.0))),
        'bump-density': BoundaryMeasure(density=density),
    }
    anchors = (0.0, 0.5, -0.5j, 0.3 + 0.3j, 0.7)
    return inner, measures, anchors


@check('acceptance')
def separated_embedding_grid(quad, rng):
    inner, measures, anchors = _separated_grid()
    failures = []
    for u_name, u in inner.items():
        for mu_name, mu in measures.items():
            for omega in anchors:
                bound = separated_embedding_bound(u, mu, DbrKernel(u, omega), quad)
                if not bound.holds:
                    failures.append({'u': u_name, 'mu': mu_name, 'omega': str(omega), **bound.to_dict()})
    return {'passed': not failures, 'cases': len(inner) * len(measures) * len(anchors), 'failures': failures}


@check('acceptance')
def potential_on_spectrum(quad, rng):
    inner, measures, _ = _separated_grid()
    worst = 0.0
    for u in inner.values():
        spectrum = boundary_spectrum(u, quad)
        for mu in measures.values():
            for point in spectrum.points:
                result = quadratic_potential(mu, point, quad)
                if result.diverged:
                    return {'passed': False, 'reason': f"potential diverged at {point.angle}"}
                worst = max(worst, result.value)
    atom = quadratic_potential(BoundaryMeasure.dirac(0.0), UnitCirclePoint(0.0), quad)
    return {'passed': atom.diverged, 'max_potential': worst, 'atom_on_spectrum': atom.to_dict()}


@check('acceptance')
def singular_inner_not_in_dirichlet(quad, rng):
    result = weighted_dirichlet(singular_at_one(), BoundaryMeasure.lebesgue_measure(), quad)
    exponent = result.growth_exponent or 0.0
    return {'passed': result.diverged and exponent > 0, 'result': result.to_dict()}


# Spectrum

@check('identities', 'smoke')
def sampled_spectrum_verdicts(quad, rng):
    atom = in_spectrum_sampled(singular_at_one(), UnitCirclePoint(0.0))
    rotation = in_spectrum_sampled(SchurFunction(BlaschkeProduct([0.0])), UnitCirclePoint(1.0))
    passed = atom.verdict == 'In' and rotation.verdict == 'Out'
    return {'passed': passed, 'atom': atom.verdict, 'rotation': rotation.verdict}


# Carleson measures and multipliers

@check('acceptance', 'smoke')
def ray_box_masses(quad, rng):
    nu = example4_nu()
    gaps = {}
    for delta in (1e-2, 1e-4, 1e-6):
        box = CarlesonBox(0.0, delta)
        gaps[f"{delta:g}"] = {
            'closed_form': abs(nu.box_mass(box) - 2.0 * math.sqrt(delta)),
            'gauss_jacobi': abs(nu.box_mass_quadrature(box) - nu.box_mass(box)),
        }
    passed = all(g['closed_form'] <= 1e-12 and g['gauss_jacobi'] <= 1e-10 for g in gaps.values())
    return {'passed': passed, 'gaps': gaps}


@check('acceptance')
def carleson_example(quad, rng):
    nu = example4_nu()
    plain = carleson_constant_h2(nu)
    weighted = is_carleson_for_dz(nu, UnitCirclePoint(0.0))
    passed = plain.carleson == 'unbounded' and weighted.carleson is True and weighted.constant <= 0.4 + 1e-6
    return {'passed': passed, 'plain': plain.to_dict(), 'weighted': weighted.to_dict()}


@check('acceptance')
def model_space_carleson(quad, rng):
    """A measure Carleson for D_1 is Carleson for K_B with constant at most C_nu * C_embed"""
    nu = example4_nu()
    zeta = UnitCirclePoint(0.0)
    weighted = is_carleson_for_dz(nu, zeta)
    rows = []
    for zeros in ([0.5, -0.3], [0.8j, -0.6, 0.2 + 0.4j]):
        blaschke = BlaschkeProduct(zeros)
        constant = model_space_carleson_constant(nu, blaschke, quad)
        dz_constant = model_space_dz_constant(nu, blaschke, zeta, quad)
        embed = embedding_constant(blaschke, zeta)
        product = dz_constant * embed
        rows.append({
            'zeros': [str(z) for z in blaschke.zeros],
            'model_space_constant': constant,
            'dz_constant': dz_constant,
            'embedding_constant': embed,
            'holds': constant <= product + quad.agreement_tolerance(product, abs_floor=1e-10),
        })
    passed = weighted.carleson is True and all(row['holds'] for row in rows)
    return {'passed': passed, 'box_constant': weighted.constant, 'spaces': rows}


@check('acceptance')
def multiplier_example(quad, rng, samples: int = 50):
    phi = example4_phi()
    blaschke = BlaschkeProduct([0.5, -0.3])
    zeta = UnitCirclePoint(0.0)
    model = is_multiplier_ku_to_dz(phi, blaschke, zeta, quad)
    full = is_multiplier_of_dz(phi, zeta, quad)
    passed = bool(model) and not full
    bounds = []
    if model:
        constant = model.certificates['carleson_constant']
        phi_dirichlet = model.certificates['dirichlet']['value']
        basis = TakenakaBasis(blaschke)
        for _ in range(samples):
            f = basis.function(random_coefficients(rng, blaschke.degree))
            bounds.append(multiplier_bound(phi, f, zeta, constant, phi_dirichlet, quad))
        passed = passed and all(b['holds'] for b in bounds)
    return {'passed': passed, 'model_space': model.to_dict(), 'dirichlet_space': full.to_dict(),
            'bounds_checked': len(bounds)}
