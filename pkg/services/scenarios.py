import json
import logging
import math
import os
import tempfile
import time
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from django.conf import settings
from django.utils import timezone

from api.serializers import (
    build_blaschke,
    build_disk_measure,
    build_function,
    build_measure,
    build_schur,
    parse_config,
)
from core.models import ScenarioRun
from services.carleson import (
    carleson_constant_h2,
    default_delta_grid,
    is_carleson_for_dz,
    is_multiplier_ku_to_dz,
    is_multiplier_of_dz,
)
from services.dirichlet import (
    local_dirichlet_area,
    local_dirichlet_decomposition,
    local_dirichlet_douglas,
    routes_agree,
    weighted_dirichlet,
)
from services.disk_functions import UnitCirclePoint
from services.embedding import DEFAULT_SWEEP_LEVELS, default_path, embedding_report, ratio_sweep
from services.exceptions import ConfigError
from services.quadrature import uniform_angles, wrap_angle
from services.spectrum import boundary_spectrum, in_spectrum_sampled
from services.suites import run_suite

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ROUTES = {
    'douglas': local_dirichlet_douglas,
    'area': local_dirichlet_area,
    'decomposition': local_dirichlet_decomposition,
}


def jsonable(value):
    """Replace non-finite floats and numpy scalars so the value survives strict JSON"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class ScenarioRunner:
    """Runs the scenarios of one config document and records each as a ScenarioRun"""

    CSV_COLUMNS = {
        'dirichlet': ['method', 'value', 'diverged', 'growth_exponent', 'levels'],
        'weighted': ['method', 'value', 'diverged', 'growth_exponent', 'levels'],
        'sweep': ['n', 're', 'im', 'ratio', 'lower', 'upper'],
        'embedding': ['verdict', 'constant', 'max_ratio', 'first_exceeding'],
        'spectrum': ['angle', 'verdict', 'liminf', 'in_closure'],
        'carleson': ['length', 'sup_ratio'],
        'multiplier': ['test', 'result', 'value'],
        'verify': ['check', 'passed', 'detail'],
    }

    FORMATS = ('csv', 'json')

    def __init__(self, config: Dict[str, Any], out_dir=None, fmt: str = 'csv', persist: bool = True):
        if fmt not in self.FORMATS:
            raise ConfigError(f"unknown output format {fmt!r}", field='format')
        self.config = config
        self.out_dir = Path(out_dir or settings.SCENARIO_OUTPUT_DIR)
        self.fmt = fmt
        self.persist = persist
        seed = config.get('seed')
        self.seed = int(seed if seed is not None else getattr(settings, 'SCENARIO_DEFAULT_SEED', 0))
        self.processing_log = []

    @classmethod
    def from_document(cls, document, **kwargs):
        return cls(parse_config(document), **kwargs)

    @classmethod
    def from_file(cls, config_path: str, **kwargs):
        """Read and validate a JSON config file"""
        try:
            with open(config_path, encoding='utf-8') as handle:
                document = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"file {config_path!r} does not exist", field='config') from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}", field='config') from None
        return cls.from_document(document, **kwargs)

    def run(self) -> Dict[str, Any]:
        """Run every scenario; the run passes only when every scenario completes and passes"""
        reports = [self.run_scenario(spec) for spec in self.config['scenarios']]
        passed = all(r['status'] == 'completed' and r['passed'] is not False for r in reports)
        return {
            'success': all(r['status'] == 'completed' for r in reports),
            'passed': passed,
            'seed': self.seed,
            'scenarios': reports,
        }

    def run_scenario(self, spec: Dict[str, Any]) -> Dict[str, Any]:
        self.processing_log = []
        run = ScenarioRun(
            scenario_id=spec['id'],
            kind=spec['kind'],
            config=jsonable(self._config_echo(spec)),
            seed=self.seed,
            status='pending',
        )
        self._save(run)
        started = time.perf_counter()
        try:
            run.status = 'running'
            self._save(run)
            self._add_log(f"Running {spec['kind']} scenario {spec['id']}")

            handler = getattr(self, f"_run_{spec['kind']}")
            frame, results = handler(spec)
            passed, failures = self._check_expectations(spec, results)
            if failures:
                for failure in failures:
                    self._add_log(f"Assertion failed: {failure}")
            artifacts = self._write(spec, frame, results)

            run.results = jsonable(results)
            run.passed = passed
            run.artifacts = artifacts
            run.status = 'completed'
            run.wall_time = time.perf_counter() - started
            run.completed_at = timezone.now()
            run.processing_log = {'logs': self.processing_log, 'summary': {'passed': passed, 'failures': failures}}
            self._save(run)

            return {
                'id': str(run.id),
                'scenario_id': spec['id'],
                'kind': spec['kind'],
                'status': 'completed',
                'passed': passed,
                'failures': failures,
                'results': run.results,
                'artifacts': artifacts,
                'wall_time': run.wall_time,
            }

        except Exception as e:
            message = f"scenario {spec['id']!r} ({spec['kind']}): {e}"
            logger.error(f"Scenario failed: {message}")
            self._add_log(message)
            run.status = 'failed'
            run.passed = False
            run.error_message = message
            run.wall_time = time.perf_counter() - started
            run.completed_at = timezone.now()
            run.processing_log = {'error': message, 'logs': self.processing_log}
            self._save(run)

            return {
                'id': str(run.id),
                'scenario_id': spec['id'],
                'kind': spec['kind'],
                'status': 'failed',
                'passed': False,
                'error': message,
                'error_type': type(e).__name__,
                'artifacts': [],
            }

    # Scenario kinds

    def _run_dirichlet(self, spec):
        quad = spec['quadrature']
        f = build_function(spec['function'], f"{spec['_path']}.function", quad)
        zeta = UnitCirclePoint(spec['zeta'])
        rows, values = [], {}
        for method in spec['methods']:
            result = ROUTES[method](f, zeta, quad)
            self._add_log(f"{method}: D = {result.value:.12g}")
            rows.append(self._integral_row(method, result))
            values[method] = result.value
        finite = [v for v in values.values() if math.isfinite(v)]
        spread = 0.0
        if len(finite) > 1:
            spread = (max(finite) - min(finite)) / max(1.0, abs(max(finite)))
        results = {
            'values': values,
            'value': finite[0] if finite else math.inf,
            'diverged': not finite,
            'spread': spread,
            'agree': routes_agree(values.values(), quad),
        }
        return pd.DataFrame(rows), results

    def _run_weighted(self, spec):
        quad = spec['quadrature']
        f = build_function(spec['function'], f"{spec['_path']}.function", quad)
        mu = build_measure(spec['measure'], f"{spec['_path']}.measure")
        result = weighted_dirichlet(f, mu, quad, method=spec['method'])
        self._add_log(f"weighted Dirichlet integral {result.value:.12g} by {result.method}")
        results = {
            'value': result.value,
            'diverged': result.diverged,
            'growth_exponent': result.growth_exponent,
            'method': result.method,
        }
        return pd.DataFrame([self._integral_row(result.method, result)]), results

    def _run_sweep(self, spec):
        quad = spec['quadrature']
        b = build_schur(spec['schur'], f"{spec['_path']}.schur", quad)
        zeta = UnitCirclePoint(spec['zeta'])
        path = spec.get('path') or default_path(zeta, spec.get('levels', DEFAULT_SWEEP_LEVELS))
        sweep = ratio_sweep(b, zeta, path, quad, require_boundary_kernel=False)
        ratios = sweep.ratios
        threshold = spec.get('threshold') or settings.RATIO_EXPLOSION_THRESHOLD
        self._add_log(f"{len(path)} sweep points, max ratio {sweep.max_ratio:.6g}")
        results = {
            'max_ratio': sweep.max_ratio,
            'first_exceeding': sweep.first_exceeding(threshold),
            'lower_bound_holds': sweep.lower_bound_holds(),
            'upper_bound_holds': sweep.upper_bound_holds(),
            'monotone': all(later >= earlier for earlier, later in zip(ratios[:-1], ratios[1:])),
            'sweep': sweep.to_dict(),
        }
        return sweep.to_frame(), results

    def _run_embedding(self, spec):
        quad = spec['quadrature']
        b = build_schur(spec['schur'], f"{spec['_path']}.schur", quad)
        zeta = UnitCirclePoint(spec['zeta'])
        report = embedding_report(b, zeta, quad, spec.get('path'), spec.get('threshold'))
        self._add_log(f"embedding verdict {report.verdict}")
        results = {
            'verdict': report.verdict,
            'constant': report.constant,
            'max_ratio': report.evidence.get('max_ratio'),
            'first_exceeding': report.evidence.get('first_exceeding'),
            'report': report.to_dict(),
        }
        row = {k: results[k] for k in ('verdict', 'constant', 'max_ratio', 'first_exceeding')}
        return pd.DataFrame([row]), results

    def _run_spectrum(self, spec):
        quad = spec['quadrature']
        b = build_schur(spec['schur'], f"{spec['_path']}.schur", quad)
        spectrum = boundary_spectrum(b, quad)
        angles = spec.get('points') or uniform_angles(8).tolist()
        edges = spectrum.boundary_angles()
        rows, verdicts, consistent = [], {}, True
        for angle in angles:
            point = UnitCirclePoint(angle)
            verdict = in_spectrum_sampled(b, point, spec['depth'])
            member = spectrum.in_spectrum(point)
            rows.append({'angle': point.angle, 'verdict': verdict.verdict, 'liminf': verdict.liminf,
                         'in_closure': spectrum.contains(point)})
            verdicts[f"{point.angle:.12g}"] = verdict.verdict
            near_edge = any(abs(float(wrap_angle(point.angle - e))) < 1e-3 for e in edges)
            if verdict.verdict != 'Undecided' and not near_edge and (verdict.verdict == 'In') != member:
                consistent = False
                self._add_log(f"sampled verdict {verdict.verdict} disagrees with the spectrum at {point.angle:.6f}")
        radius = min(0.999, 1.0 - quad.outer_margin)
        results = {
            'spectrum': spectrum.to_dict(),
            'empty': spectrum.is_empty,
            'verdicts': verdicts,
            'consistent': consistent,
            'max_modulus': b.max_modulus(radius=radius, seed=self.seed),
        }
        return pd.DataFrame(rows), results

    def _run_carleson(self, spec):
        quad = spec['quadrature']
        nu = build_disk_measure(spec['disk_measure'], f"{spec['_path']}.disk_measure", quad)
        grid = spec.get('delta_grid') or default_delta_grid()
        if spec['reweight']:
            verdict = is_carleson_for_dz(nu, UnitCirclePoint(spec['zeta']), grid)
        else:
            verdict = carleson_constant_h2(nu, grid)
        self._add_log(f"Carleson verdict {verdict.carleson} with constant {verdict.constant:.6g}")
        lengths = sorted(grid, reverse=True)
        frame = pd.DataFrame({'length': lengths, 'sup_ratio': verdict.level_sups})
        results = {'carleson': verdict.carleson, 'constant': verdict.constant, 'verdict': verdict.to_dict()}
        return frame, results

    def _run_multiplier(self, spec):
        quad = spec['quadrature']
        phi = build_function(spec['phi'], f"{spec['_path']}.phi", quad)
        zeta = UnitCirclePoint(spec['zeta'])
        if spec.get('blaschke') is not None:
            blaschke = build_blaschke(spec['blaschke'], f"{spec['_path']}.blaschke")
            verdict = is_multiplier_ku_to_dz(phi, blaschke, zeta, quad)
            constant = verdict.certificates['carleson_constant']
            rows = [{'test': 'carleson', 'result': constant != 'unbounded', 'value': constant}]
        else:
            verdict = is_multiplier_of_dz(phi, zeta, quad)
            sup = verdict.certificates['sup_norm']
            rows = [{'test': 'sup_norm', 'result': sup['bounded'], 'value': sup['sup']}]
        local = verdict.certificates['dirichlet']
        rows.append({'test': 'dirichlet', 'result': local['value'] != 'diverged', 'value': local['value']})
        self._add_log(f"multiplier verdict {verdict.result}")
        return pd.DataFrame(rows), {'multiplier': verdict.result, 'certificates': verdict.certificates}

    def _run_verify(self, spec):
        suite = run_suite(spec['suite'], spec['quadrature'], self.seed)
        for check in suite.checks:
            self._add_log(f"{check.name}: {'pass' if check.passed else 'FAIL'}")
        return suite.to_frame(), {'passed': suite.passed, 'suite': suite.to_dict()}

    # Helpers

    @staticmethod
    def _integral_row(method, result):
        return {
            'method': method,
            'value': result.value,
            'diverged': result.diverged,
            'growth_exponent': result.growth_exponent,
            'levels': len(result.evidence),
        }

    def _check_expectations(self, spec, results):
        """Compare ``expect`` entries against the results.

        Keys ending in _above/_below bound the named result from one side;
        numbers match within the relative ``tol`` (default 1e-6).
        """
        expect = dict(spec.get('expect') or {})
        tol = float(expect.pop('tol', 1e-6))
        if spec['kind'] == 'verify':
            expect.setdefault('passed', True)
        if not expect:
            return None, []
        failures = []
        for key, expected in expect.items():
            name, side = key, None
            for suffix in ('_above', '_below'):
                if key.endswith(suffix):
                    name, side = key[:-len(suffix)], suffix[1:]
            if name not in results:
                raise ConfigError(f"unknown result field {name!r}", field=f"{spec['_path']}.expect.{key}")
            actual = results[name]
            if side == 'above':
                ok = actual is not None and actual > expected
            elif side == 'below':
                ok = actual is not None and actual < expected
            elif isinstance(expected, bool) or isinstance(actual, (bool, str)) or expected is None:
                ok = actual == expected
            elif isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
                ok = abs(actual - expected) <= tol * max(1.0, abs(expected))
            else:
                ok = actual == expected
            if not ok:
                failures.append(f"{key}: expected {expected!r}, got {jsonable(actual)!r}")
        return not failures, failures

    def _config_echo(self, spec):
        echo = {k: v for k, v in spec.items() if not k.startswith('_') and k != 'quadrature'}
        echo['quadrature'] = spec['quadrature'].to_dict()
        return echo

    def _write(self, spec, frame: pd.DataFrame, results) -> list:
        """Write the scenario artifact atomically; rows carry no wall-clock data"""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / f"{spec['id']}.{self.fmt}"
        if self.fmt == 'csv':
            columns = self.CSV_COLUMNS[spec['kind']]
            frame = frame.reindex(columns=columns)
            body = f"# dbr_lab {spec['kind']} schema v{SCHEMA_VERSION}\n"
            body += frame.to_csv(index=False, float_format='%.17g', lineterminator='\n')
        else:
            body = json.dumps({
                'schema': SCHEMA_VERSION,
                'scenario': spec['id'],
                'kind': spec['kind'],
                'seed': self.seed,
                'config': jsonable(self._config_echo(spec)),
                'results': jsonable(results),
                'rows': jsonable(frame.to_dict(orient='records')),
            }, indent=2, sort_keys=True) + '\n'
        handle, temporary = tempfile.mkstemp(dir=self.out_dir, prefix=f".{spec['id']}.", suffix='.tmp')
        try:
            with os.fdopen(handle, 'w', encoding='utf-8') as out:
                out.write(body)
            os.replace(temporary, target)
        except OSError:
            if os.path.exists(temporary):
                os.remove(temporary)
            raise
        self._add_log(f"Wrote {target}")
        return [str(target)]

    def _save(self, run: ScenarioRun) -> None:
        if self.persist:
            run.save()

    def _add_log(self, message: str) -> None:
        """Add message to processing log"""
        self.processing_log.append({
            'timestamp': pd.Timestamp.now().isoformat(),
            'message': message
        })
        logger.info(f"Scenario run: {message}")


def run_scenario(config_path: str, out_dir: Optional[str] = None, fmt: str = 'csv',
                 persist: bool = True) -> Dict[str, Any]:
    return ScenarioRunner.from_file(config_path, out_dir=out_dir, fmt=fmt, persist=persist).run()
