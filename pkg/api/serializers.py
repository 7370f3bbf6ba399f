import logging
from contextlib import contextmanager

from rest_framework import serializers
from rest_framework.settings import api_settings

from core.models import ScenarioRun
from services.carleson import DiskAtoms, PowerLawRayMeasure, PushedBoundaryDensity
from services.catalog import build_named, get_entry
from services.disk_functions import (
    AnalyticFunction,
    AtomicSingularInner,
    BlaschkeProduct,
    ConstantOuter,
    Polynomial,
    SampledOuter,
    SchurFunction,
    SzegoKernel,
    UnitCirclePoint,
)
from services.exceptions import ConfigError
from services.kernels import DbrKernel, ModelSpaceFunction, TakenakaBasis
from services.measures import BoundaryMeasure, CircleDensity
from services.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

SCENARIO_KINDS = ('dirichlet', 'sweep', 'embedding', 'carleson', 'multiplier', 'verify', 'spectrum', 'weighted')
DIRICHLET_METHODS = ('douglas', 'area', 'decomposition')
FUNCTION_ENTRY_KINDS = ('function', 'schur', 'outer')
SCHUR_KEYS = {'blaschke', 'singular', 'outer', 'constant'}


class ComplexField(serializers.Field):
    """A complex number given as a real, a [re, im] pair or {"re": .., "im": ..}"""

    default_error_messages = {
        'invalid': 'Expected a number, a [re, im] pair or an object with re/im.',
    }

    def to_internal_value(self, data):
        try:
            if isinstance(data, bool):
                raise TypeError
            if isinstance(data, (int, float)):
                return complex(float(data), 0.0)
            if isinstance(data, (list, tuple)) and len(data) == 2:
                return complex(float(data[0]), float(data[1]))
            if isinstance(data, dict):
                return complex(float(data.get('re', 0.0)), float(data.get('im', 0.0)))
        except (TypeError, ValueError):
            pass
        self.fail('invalid')

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


def _error_path(detail, prefix=''):
    """Dotted path and message of the first error in a DRF error structure"""
    if isinstance(detail, dict):
        for key, value in detail.items():
            if key == api_settings.NON_FIELD_ERRORS_KEY:
                part = prefix
            elif isinstance(key, int) or str(key).isdigit():
                part = f"{prefix}[{key}]"
            else:
                part = f"{prefix}.{key}" if prefix else str(key)
            return _error_path(value, part)
    if isinstance(detail, list):
        if detail and not isinstance(detail[0], (dict, list)):
            return prefix, str(detail[0])
        for index, item in enumerate(detail):
            if item:
                return _error_path(item, f"{prefix}[{index}]")
    return prefix, str(detail)


def validated(serializer_class, data, path: str) -> dict:
    """Run a spec serializer, turning validation errors into ConfigError"""
    if not isinstance(data, dict):
        raise ConfigError("expected a JSON object", field=path)
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        field, message = _error_path(serializer.errors, path)
        raise ConfigError(message, field=field or path)
    return serializer.validated_data


@contextmanager
def _building(path: str):
    """Map constructor ValueErrors and catalog lookups onto ConfigError at ``path``"""
    try:
        yield
    except ConfigError as e:
        if e.field in ('name', 'params'):
            raise ConfigError(e.reason, field=f"{path}.{e.field}") from e
        raise
    except ValueError as e:
        raise ConfigError(str(e), field=path) from e


class QuadratureSpecSerializer(serializers.Serializer):
    circle_samples = serializers.IntegerField(required=False)
    radial_levels = serializers.IntegerField(required=False)
    gauss_order = serializers.IntegerField(required=False)
    refinement_factor = serializers.IntegerField(required=False)
    rel_tol = serializers.FloatField(required=False)
    abs_tol = serializers.FloatField(required=False)


def build_quadrature(data, path: str = 'quadrature', base: QuadratureConfig = None) -> QuadratureConfig:
    values = validated(QuadratureSpecSerializer, data or {}, path)
    try:
        if base is not None:
            return base.with_overrides(**values)
        return QuadratureConfig.from_settings(**values)
    except ConfigError as e:
        raise ConfigError(e.reason, field=f"{path}.{e.field}") from e


class NamedSpecSerializer(serializers.Serializer):
    name = serializers.CharField(required=False)
    value = serializers.CharField(required=False)
    params = serializers.DictField(required=False, default=dict)

    def validate(self, attrs):
        if not attrs.get('name') and not attrs.get('value'):
            raise serializers.ValidationError({'name': 'A named spec needs a name.'})
        attrs['name'] = attrs.get('name') or attrs.get('value')
        return attrs


def _build_from_catalog(data, path: str, kind: str):
    values = validated(NamedSpecSerializer, data, path)
    with _building(path):
        return build_named(values['name'], values['params'], kind=kind)


class AtomSpecSerializer(serializers.Serializer):
    angle = serializers.FloatField()
    mass = serializers.FloatField()

    def validate_mass(self, value):
        if value <= 0:
            raise serializers.ValidationError('Atom masses must be positive.')
        return value


class BlaschkeSpecSerializer(serializers.Serializer):
    zeros = serializers.ListField(child=ComplexField(), allow_empty=True)

    def validate_zeros(self, value):
        for index, zero in enumerate(value):
            if abs(zero) >= 1:
                raise serializers.ValidationError({index: 'Zeros must lie strictly inside the unit disk.'})
        return value


def build_blaschke(data, path: str = 'blaschke') -> BlaschkeProduct:
    if isinstance(data, list):
        data = {'zeros': data}
    zeros = validated(BlaschkeSpecSerializer, data, path)['zeros']
    return BlaschkeProduct(zeros)


class SingularSpecSerializer(serializers.Serializer):
    atoms = AtomSpecSerializer(many=True)


class OuterSpecSerializer(serializers.Serializer):
    KINDS = ('constant', 'samples', 'named')

    kind = serializers.ChoiceField(choices=KINDS)
    value = serializers.JSONField()
    params = serializers.DictField(required=False, default=dict)

    def validate(self, attrs):
        value = attrs['value']
        if attrs['kind'] == 'constant':
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value > 0:
                raise serializers.ValidationError({'value': 'Constant log-modulus must be a number <= 0.'})
        elif attrs['kind'] == 'samples':
            if not isinstance(value, list) or len(value) < 8:
                raise serializers.ValidationError({'value': 'Sampled log-modulus needs at least 8 samples.'})
        elif not isinstance(value, str):
            raise serializers.ValidationError({'value': 'Named outer factors are referenced by name.'})
        return attrs


class SchurSpecSerializer(serializers.Serializer):
    blaschke = serializers.JSONField(required=False)
    singular = serializers.JSONField(required=False)
    outer = serializers.JSONField(required=False)
    constant = ComplexField(required=False, default=1.0)

    def validate_constant(self, value):
        if abs(value) > 1.0 + 1e-12:
            raise serializers.ValidationError('The constant factor must have modulus at most one.')
        return value


def build_outer(data, path: str, quad: QuadratureConfig = None):
    values = validated(OuterSpecSerializer, data, path)
    with _building(path):
        if values['kind'] == 'constant':
            return ConstantOuter(float(values['value']), quad)
        if values['kind'] == 'samples':
            return SampledOuter(values['value'], quad)
        outer = build_named(values['value'], values['params'], kind='outer')
    return outer.with_quad(quad) if quad is not None else outer


def build_schur(data, path: str = 'schur', quad: QuadratureConfig = None) -> SchurFunction:
    """SchurFunction from {"blaschke": .., "singular": .., "outer": .., "constant": ..} or a named entry"""
    if isinstance(data, dict) and ('named' in data or data.get('kind') == 'named'):
        spec = dict(data)
        spec.setdefault('name', spec.pop('named', None))
        return _build_from_catalog(spec, path, 'schur')
    values = validated(SchurSpecSerializer, data, path)
    blaschke = singular = outer = None
    if values.get('blaschke') is not None:
        blaschke = build_blaschke(values['blaschke'], f"{path}.blaschke")
    if values.get('singular') is not None:
        atoms = validated(SingularSpecSerializer, values['singular'], f"{path}.singular")['atoms']
        with _building(f"{path}.singular"):
            singular = AtomicSingularInner([(UnitCirclePoint(a['angle']), a['mass']) for a in atoms])
    if values.get('outer') is not None:
        outer = build_outer(values['outer'], f"{path}.outer", quad)
    with _building(path):
        return SchurFunction(blaschke, singular, outer, values['constant'])


class FunctionSpecSerializer(serializers.Serializer):
    KINDS = ('polynomial', 'szego', 'blaschke', 'schur', 'kernel', 'model_space', 'named')

    kind = serializers.ChoiceField(choices=KINDS)
    coefficients = serializers.ListField(child=ComplexField(), required=False)
    pole = ComplexField(required=False)
    zeros = serializers.ListField(child=ComplexField(), required=False)
    schur = serializers.JSONField(required=False)
    anchor = serializers.JSONField(required=False)
    name = serializers.CharField(required=False)
    value = serializers.CharField(required=False)
    params = serializers.DictField(required=False, default=dict)

    REQUIRED = {
        'polynomial': ('coefficients',),
        'szego': ('pole',),
        'blaschke': ('zeros',),
        'schur': ('schur',),
        'kernel': ('schur', 'anchor'),
        'model_space': ('zeros', 'coefficients'),
        'named': (),
    }

    def validate(self, attrs):
        for name in self.REQUIRED[attrs['kind']]:
            if name not in attrs:
                raise serializers.ValidationError({name: f"Required for {attrs['kind']} functions."})
        if attrs['kind'] == 'szego' and abs(attrs['pole']) >= 1:
            raise serializers.ValidationError({'pole': 'The pole must lie strictly inside the unit disk.'})
        if attrs['kind'] == 'model_space' and len(attrs['zeros']) != len(attrs['coefficients']):
            raise serializers.ValidationError({'coefficients': 'Expected one coefficient per zero.'})
        if attrs['kind'] == 'named' and not (attrs.get('name') or attrs.get('value')):
            raise serializers.ValidationError({'name': 'A named function needs a name.'})
        return attrs


def _anchor(data, path: str):
    if isinstance(data, dict) and 'angle' in data:
        try:
            return UnitCirclePoint(float(data['angle']))
        except (TypeError, ValueError):
            raise ConfigError("expected a number", field=f"{path}.angle") from None
    field = ComplexField()
    try:
        return field.to_internal_value(data)
    except serializers.ValidationError as e:
        raise ConfigError(str(e.detail[0]), field=path) from None


def build_function(data, path: str = 'function', quad: QuadratureConfig = None) -> AnalyticFunction:
    if isinstance(data, dict) and 'kind' not in data and set(data) <= SCHUR_KEYS | {'named', 'params'}:
        return build_schur(data, path, quad)
    values = validated(FunctionSpecSerializer, data, path)
    kind = values['kind']
    with _building(path):
        if kind == 'polynomial':
            return Polynomial(values['coefficients'])
        if kind == 'szego':
            return SzegoKernel(values['pole'])
        if kind == 'blaschke':
            return BlaschkeProduct(values['zeros'])
        if kind == 'model_space':
            return ModelSpaceFunction(TakenakaBasis(BlaschkeProduct(values['zeros'])), values['coefficients'])
    if kind == 'schur':
        return build_schur(values['schur'], f"{path}.schur", quad)
    if kind == 'kernel':
        b = build_schur(values['schur'], f"{path}.schur", quad)
        anchor = _anchor(values['anchor'], f"{path}.anchor")
        with _building(f"{path}.anchor"):
            return DbrKernel(b, anchor)
    name = values.get('name') or values.get('value')
    with _building(path):
        entry = get_entry(name)
        if entry.kind not in FUNCTION_ENTRY_KINDS:
            raise ConfigError(f"{name!r} is a {entry.kind}, not a function", field='name')
        return entry.build(**values['params'])


class DensitySpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=('constant', 'samples', 'named'))
    value = serializers.JSONField()
    params = serializers.DictField(required=False, default=dict)


def build_density(data, path: str) -> CircleDensity:
    values = validated(DensitySpecSerializer, data, path)
    with _building(path):
        if values['kind'] == 'constant':
            return CircleDensity.constant(float(values['value']))
        if values['kind'] == 'samples':
            return CircleDensity.from_samples(values['value'])
        measure = build_named(str(values['value']), values['params'], kind='measure')
    if measure.density is None:
        raise ConfigError(f"{values['value']!r} has no density part", field=f"{path}.value")
    return measure.density


class MeasureSpecSerializer(serializers.Serializer):
    atoms = AtomSpecSerializer(many=True, required=False, default=list)
    density = serializers.JSONField(required=False)
    lebesgue = serializers.FloatField(required=False, default=0.0, min_value=0.0)


def build_measure(data, path: str = 'measure') -> BoundaryMeasure:
    if isinstance(data, dict) and ('named' in data or data.get('kind') == 'named'):
        spec = dict(data)
        spec.setdefault('name', spec.pop('named', None))
        return _build_from_catalog(spec, path, 'measure')
    values = validated(MeasureSpecSerializer, data, path)
    density = None
    if values.get('density') is not None:
        density = build_density(values['density'], f"{path}.density")
    with _building(path):
        return BoundaryMeasure(
            atoms=[(UnitCirclePoint(a['angle']), a['mass']) for a in values['atoms']],
            density=density,
            lebesgue=values['lebesgue'],
        )


class DiskMeasureSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=('ray', 'atoms', 'pushed', 'named'))
    angle = serializers.FloatField(required=False, default=0.0)
    exponent = serializers.FloatField(required=False, default=-0.5)
    coefficient = serializers.FloatField(required=False, default=1.0)
    points = serializers.ListField(child=ComplexField(), required=False)
    masses = serializers.ListField(child=serializers.FloatField(), required=False)
    measure = serializers.JSONField(required=False)
    epsilon = serializers.FloatField(required=False)
    name = serializers.CharField(required=False)
    value = serializers.CharField(required=False)
    params = serializers.DictField(required=False, default=dict)

    def validate(self, attrs):
        if attrs['kind'] == 'atoms':
            for name in ('points', 'masses'):
                if name not in attrs:
                    raise serializers.ValidationError({name: 'Required for disk atoms.'})
        if attrs['kind'] == 'pushed':
            for name in ('measure', 'epsilon'):
                if name not in attrs:
                    raise serializers.ValidationError({name: 'Required for pushed boundary measures.'})
        return attrs


def build_disk_measure(data, path: str = 'disk_measure', quad: QuadratureConfig = None):
    values = validated(DiskMeasureSpecSerializer, data, path)
    kind = values['kind']
    if kind == 'named':
        spec = {'name': values.get('name') or values.get('value'), 'params': values['params']}
        return _build_from_catalog(spec, path, 'disk-measure')
    if kind == 'pushed':
        measure = build_measure(values['measure'], f"{path}.measure")
        with _building(path):
            return PushedBoundaryDensity(measure, values['epsilon'], quad)
    with _building(path):
        if kind == 'ray':
            return PowerLawRayMeasure(values['angle'], values['exponent'], values['coefficient'])
        return DiskAtoms(values['points'], values['masses'])


class ScenarioSpecSerializer(serializers.Serializer):
    """One scenario; function and measure specs are validated by their own builders"""

    id = serializers.CharField(max_length=100)
    kind = serializers.ChoiceField(choices=SCENARIO_KINDS)
    function = serializers.JSONField(required=False)
    schur = serializers.JSONField(required=False)
    phi = serializers.JSONField(required=False)
    blaschke = serializers.JSONField(required=False)
    measure = serializers.JSONField(required=False)
    disk_measure = serializers.JSONField(required=False)
    zeta = serializers.FloatField(required=False, default=0.0)
    path = serializers.ListField(child=ComplexField(), required=False)
    levels = serializers.IntegerField(required=False, min_value=1, max_value=40)
    delta_grid = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    points = serializers.ListField(child=serializers.FloatField(), required=False)
    depth = serializers.IntegerField(required=False, default=24, min_value=3)
    methods = serializers.ListField(child=serializers.ChoiceField(choices=DIRICHLET_METHODS), required=False,
                                    default=list(DIRICHLET_METHODS))
    method = serializers.ChoiceField(choices=('auto', 'area', 'disintegration'), required=False, default='auto')
    reweight = serializers.BooleanField(required=False, default=False)
    threshold = serializers.FloatField(required=False, min_value=0.0)
    suite = serializers.CharField(required=False)
    quadrature = serializers.JSONField(required=False)
    expect = serializers.DictField(required=False, default=dict)

    REQUIRED = {
        'dirichlet': ('function',),
        'weighted': ('function', 'measure'),
        'sweep': ('schur',),
        'embedding': ('schur',),
        'spectrum': ('schur',),
        'carleson': ('disk_measure',),
        'multiplier': ('phi',),
        'verify': ('suite',),
    }

    def validate_delta_grid(self, value):
        if any(not 0 < v <= 6.283185307179586 for v in value):
            raise serializers.ValidationError('Arc lengths must lie in (0, 2 pi].')
        return value

    def validate(self, attrs):
        for name in self.REQUIRED[attrs['kind']]:
            if name not in attrs:
                raise serializers.ValidationError({name: f"Required for {attrs['kind']} scenarios."})
        return attrs


class ScenarioConfigSerializer(serializers.Serializer):
    seed = serializers.IntegerField(required=False)
    quadrature = serializers.JSONField(required=False)
    scenarios = serializers.ListField(child=serializers.JSONField(), allow_empty=False)


def parse_config(data) -> dict:
    """Validate a scenario config document.

    A document holding a single scenario at the top level is accepted as a
    one-element scenario list.
    """
    if isinstance(data, dict) and 'scenarios' not in data and 'kind' in data:
        data = {
            'seed': data.get('seed'),
            'quadrature': data.get('quadrature'),
            'scenarios': [{k: v for k, v in data.items() if k not in ('seed', 'quadrature')}],
        }
        data = {k: v for k, v in data.items() if v is not None}
    values = validated(ScenarioConfigSerializer, data, '')
    quad = build_quadrature(values.get('quadrature'))
    scenarios, seen = [], set()
    for index, raw in enumerate(values['scenarios']):
        path = f"scenarios[{index}]"
        spec = dict(validated(ScenarioSpecSerializer, raw, path))
        if spec['id'] in seen:
            raise ConfigError(f"duplicate scenario id {spec['id']!r}", field=f"{path}.id")
        seen.add(spec['id'])
        spec['quadrature'] = build_quadrature(spec.get('quadrature'), f"{path}.quadrature", base=quad)
        spec['_path'] = path
        scenarios.append(spec)
    return {'seed': values.get('seed'), 'quadrature': quad, 'scenarios': scenarios, 'raw': data}


class ScenarioRunSerializer(serializers.ModelSerializer):
    """Serializer for stored scenario runs"""

    class Meta:
        model = ScenarioRun
        fields = [
            'id', 'scenario_id', 'kind', 'status', 'passed', 'config', 'results',
            'processing_log', 'artifacts', 'wall_time', 'error_message', 'created_at', 'completed_at',
        ]
        read_only_fields = fields


class ScenarioRunSummarySerializer(serializers.ModelSerializer):
    class Meta:
        model = ScenarioRun
        fields = ['id', 'scenario_id', 'kind', 'status', 'passed', 'wall_time', 'created_at']


class NamedEntrySerializer(serializers.Serializer):
    name = serializers.CharField()
    kind = serializers.CharField()
    description = serializers.CharField()
    params = serializers.DictField()
    facts = serializers.DictField()

