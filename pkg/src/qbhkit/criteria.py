"""Algebraic compatibility criteria, checked numerically at sampled points.

Ground truth for every check is direct bracket / Schouten computation
plus pointwise least-squares span expansion. The printed closed-form
structure coefficients are reproduced verbatim for comparison and
documentation; where they disagree with direct expansion (they do, see
the comparison report) both values are reported and neither is patched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Point, require_same_chart
from .errors import (
    AllPointsSkippedError,
    PreconditionResidualError,
    SingularFactorError,
)
from .expr import ScalarExpr, constant, evaluate_at_points
from .fields import (
    DecomposableBivector,
    VectorField,
    bivector_components_at,
    contract_hamiltonian,
    lie_bracket,
    lie_derivative_bivector,
    schouten_bb,
    trivector_components_at,
    wedge,
    wedge3,
)
from .reports import ConditionResult, CriterionReport, make_report
from .sampling import VerifyConfig

# Global sign reconciling the Schouten convention of fields.schouten_bb
# with the Jacobi-structure identity [[L, L]] = 2 * sigma * X ^ L.
# Under our convention the self-bracket of X^Y is +2 [X,Y]^X^Y, which
# forces sigma = -1; the so(3) and Heisenberg fixtures pin this down.
JACOBI_STRUCTURE_SIGN = -1.0


# ---------------------------------------------------------------------------
# pointwise helpers


def _condition(name, values, points, informative=False, extra_skipped=0, notes=()):
    """Build a ConditionResult from per-point |residual| values (NaN =
    skipped point)."""
    values = np.asarray(values, dtype=float)
    valid = np.isfinite(values)
    skipped = int((~valid).sum()) + extra_skipped
    notes = list(notes)
    if skipped and not notes:
        notes.append(f"{skipped} point(s) skipped")
    if not valid.any():
        return ConditionResult(
            name=name,
            max_residual=None,
            worst_point=None,
            skipped=skipped,
            informative=informative,
            notes=tuple(notes + ["no usable points"]),
        )
    masked = np.where(valid, np.abs(values), -np.inf)
    worst = int(np.argmax(masked))
    return ConditionResult(
        name=name,
        max_residual=float(masked[worst]),
        worst_point=points[worst],
        skipped=skipped,
        informative=informative,
        notes=tuple(notes),
    )


def _scalar_values(expr: ScalarExpr, points) -> np.ndarray:
    return np.abs(evaluate_at_points(expr, points))


def _field_values(X: VectorField, points) -> np.ndarray:
    """Per-point max |component|; NaN where any component is undefined."""
    comps = X.components_at(points)
    bad = ~np.isfinite(comps).all(axis=1)
    values = np.max(np.abs(comps), axis=1)
    values[bad] = np.nan
    return values


def _grid_values(arr: np.ndarray) -> np.ndarray:
    """Collapse (m, ...) component arrays to per-point max |entry|."""
    flat = arr.reshape(arr.shape[0], -1)
    bad = ~np.isfinite(flat).all(axis=1)
    values = np.max(np.abs(flat), axis=1)
    values[bad] = np.nan
    return values


def _independent_mask(fields, points, tol) -> np.ndarray:
    """True where the given fields are pointwise linearly independent."""
    arrays = [X.components_at(points) for X in fields]
    m = len(points)
    mask = np.zeros(m, dtype=bool)
    for i in range(m):
        matrix = np.column_stack([a[i] for a in arrays])
        if not np.isfinite(matrix).all():
            continue
        smallest = np.linalg.svd(matrix, compute_uv=False)[-1]
        mask[i] = smallest > tol.independence
    return mask


# ---------------------------------------------------------------------------
# span expansion


@dataclass(frozen=True)
class SpanDecomposition:
    """Pointwise least-squares expansion of a field in a basis of fields.

    coefficients[i] and residuals[i] are None exactly at skipped points
    (degenerate basis or undefined expressions there).
    """

    points: tuple[Point, ...]
    coefficients: tuple[tuple[float, ...] | None, ...]
    residuals: tuple[float | None, ...]
    skipped: tuple[int, ...]
    notes: tuple[str, ...] = ()

    def max_residual(self) -> float | None:
        usable = [r for r in self.residuals if r is not None]
        return max(usable) if usable else None

    def residual_values(self) -> np.ndarray:
        return np.array(
            [np.nan if r is None else r for r in self.residuals], dtype=float
        )

    def coefficient_values(self, j: int) -> np.ndarray:
        return np.array(
            [np.nan if c is None else c[j] for c in self.coefficients],
            dtype=float,
        )


def span_expand(V: VectorField, basis, points, tol) -> SpanDecomposition:
    """Expand V(p) in the basis columns by least squares at every point.

    Points where the basis is degenerate (smallest singular value below
    the independence tolerance) or where some component is undefined are
    skipped and counted; if no point survives, AllPointsSkippedError.
    """
    basis = list(basis)
    points = list(points)
    target = V.components_at(points)
    arrays = [b.components_at(points) for b in basis]
    coeffs: list = []
    residuals: list = []
    skipped: list[int] = []
    degenerate = 0
    undefined = 0
    for i in range(len(points)):
        matrix = np.column_stack([a[i] for a in arrays])
        v = target[i]
        if not (np.isfinite(matrix).all() and np.isfinite(v).all()):
            undefined += 1
            skipped.append(i)
            coeffs.append(None)
            residuals.append(None)
            continue
        smallest = np.linalg.svd(matrix, compute_uv=False)[-1]
        if smallest <= tol.independence:
            degenerate += 1
            skipped.append(i)
            coeffs.append(None)
            residuals.append(None)
            continue
        c, *_ = np.linalg.lstsq(matrix, v, rcond=None)
        coeffs.append(tuple(float(x) for x in c))
        residuals.append(float(np.linalg.norm(v - matrix @ c)))
    notes = []
    if degenerate:
        notes.append(f"degenerate basis at {degenerate} point(s)")
    if undefined:
        notes.append(f"undefined expressions at {undefined} point(s)")
    if len(skipped) == len(points):
        raise AllPointsSkippedError(
            "span expansion skipped every sampled point: " + "; ".join(notes)
        )
    return SpanDecomposition(
        points=tuple(points),
        coefficients=tuple(coeffs),
        residuals=tuple(residuals),
        skipped=tuple(skipped),
        notes=tuple(notes),
    )


def _span_condition(name, V, basis, points, tol, informative=False):
    """Span expansion as a report condition. Informative conditions
    swallow the all-points-skipped error instead of raising."""
    try:
        decomp = span_expand(V, basis, points, tol)
    except AllPointsSkippedError as exc:
        if not informative:
            raise
        cond = ConditionResult(
            name=name,
            max_residual=None,
            worst_point=None,
            skipped=len(points),
            informative=True,
            notes=(str(exc),),
        )
        return cond, None
    cond = _condition(
        name,
        decomp.residual_values(),
        points,
        informative=informative,
        notes=decomp.notes,
    )
    return cond, decomp


# ---------------------------------------------------------------------------
# Poisson pair / automorphism / compatibility


def check_poisson_pair(X: VectorField, Y: VectorField, cfg: VerifyConfig) -> CriterionReport:
    """Is X ^ Y a Poisson tensor?

    Two routes, both required: the self-Schouten bracket components must
    vanish pointwise, and [X, Y] must lie in the pointwise span of X, Y.
    """
    points = cfg.points()
    self_bracket = schouten_bb(wedge(X, Y), wedge(X, Y))
    schouten_cond = _condition(
        "self-schouten",
        _grid_values(trivector_components_at(self_bracket, points)),
        points,
    )
    span_cond, _ = _span_condition(
        "bracket-in-span", lie_bracket(X, Y), (X, Y), points, cfg.tol
    )
    return make_report(
        "poisson-pair", (schouten_cond, span_cond), len(points), cfg.tol
    )


def check_automorphism(
    XH: VectorField, X: VectorField, Y: VectorField, cfg: VerifyConfig
) -> CriterionReport:
    """Does the flow of XH preserve the tensor X ^ Y?

    Gate: the Lie derivative [[XH, X^Y]] vanishes componentwise. The
    two bracket span expansions are reported alongside.
    """
    points = cfg.points()
    derivative = lie_derivative_bivector(XH, wedge(X, Y))
    lie_cond = _condition(
        "lie-derivative",
        _grid_values(bivector_components_at(derivative, points)),
        points,
    )
    span_x, _ = _span_condition(
        "bracket-x1-in-span", lie_bracket(XH, X), (X, Y), points, cfg.tol
    )
    span_y, _ = _span_condition(
        "bracket-x2-in-span", lie_bracket(XH, Y), (X, Y), points, cfg.tol
    )
    return make_report(
        "automorphism", (lie_cond, span_x, span_y), len(points), cfg.tol
    )


_COMPAT_SPANS = (
    # relation name, bracket pair index, basis description
    ("span-x1-x2-bracket", ("x1", "x2"), ("x1", "x2")),
    ("span-xh-x3-bracket", ("xh", "x3"), ("xh", "x3")),
    ("span-xh-x1-bracket", ("xh", "x1"), ("x1", "x2")),
    ("span-xh-x2-bracket", ("xh", "x2"), ("x1", "x2")),
    ("span-x3-x1-bracket", ("x3", "x1"), ("xh", "x2")),
    ("span-x3-x2-bracket", ("x3", "x2"), ("xh", "x1")),
)


def check_compatibility(
    X1: VectorField,
    X2: VectorField,
    XH: VectorField,
    X3: VectorField,
    cfg: VerifyConfig,
) -> CriterionReport:
    """Are X1^X2 and XH^X3 compatible Poisson tensors?

    The gate is the direct test: the Schouten bracket of the two
    tensors has vanishing components at every usable point. The six
    commutation-relation span expansions are reported as informative
    conditions; their bases may legitimately degenerate (the fixtures
    include an X3 that is pointwise dependent on X1, X2).

    Points where either wedge pair (X1, X2) or (XH, X3) degenerates are
    excluded everywhere; if none survive the check aborts.
    """
    points = cfg.points()
    mask = _independent_mask((X1, X2), points, cfg.tol) & _independent_mask(
        (XH, X3), points, cfg.tol
    )
    usable = [p for p, ok in zip(points, mask) if ok]
    dropped = len(points) - len(usable)
    if not usable:
        raise AllPointsSkippedError(
            "degenerate wedge pair (X1, X2) or (XH, X3) at every sampled point"
        )
    notes = []
    if dropped:
        notes.append(f"dropped {dropped} point(s) with degenerate wedge pairs")

    bracket_tensor = schouten_bb(wedge(X1, X2), wedge(XH, X3))
    conditions = [
        _condition(
            "schouten",
            _grid_values(trivector_components_at(bracket_tensor, usable)),
            usable,
            extra_skipped=dropped,
        )
    ]
    named = {"x1": X1, "x2": X2, "x3": X3, "xh": XH}
    for cond_name, (a, b), basis_names in _COMPAT_SPANS:
        bracket = lie_bracket(named[a], named[b])
        basis = tuple(named[n] for n in basis_names)
        cond, _ = _span_condition(
            cond_name, bracket, basis, usable, cfg.tol, informative=True
        )
        conditions.append(cond)
    return make_report(
        "compatibility", conditions, len(points), cfg.tol, notes=notes
    )


# ---------------------------------------------------------------------------
# the three-field commutation algebra


def check_delta(
    X1: VectorField, X2: VectorField, X3: VectorField, cfg: VerifyConfig
) -> CriterionReport:
    """Verify [X1,X2] = 0, [X3,X1] = X1 - X2, [X3,X2] = 0 pointwise.

    Purely componentwise; no basis is needed, so degenerate inputs
    still produce honest residuals rather than an abort.
    """
    points = cfg.points()
    conditions = (
        _condition(
            "bracket-x1-x2", _field_values(lie_bracket(X1, X2), points), points
        ),
        _condition(
            "bracket-x3-x1-minus-target",
            _field_values(lie_bracket(X3, X1) - (X1 - X2), points),
            points,
        ),
        _condition(
            "bracket-x3-x2", _field_values(lie_bracket(X3, X2), points), points
        ),
    )
    return make_report("delta", conditions, len(points), cfg.tol)


def hamiltonian_condition(
    X1: VectorField, X2: VectorField, H: ScalarExpr, cfg: VerifyConfig
) -> tuple[ScalarExpr, CriterionReport]:
    """The second-order condition X1(X2(H)) = 0; returns the expression
    and a report of its max |value| over the sampled points."""
    points = cfg.points()
    expr = X1.apply(X2.apply(H))
    cond = _condition("x1-x2-H", _scalar_values(expr, points), points)
    report = make_report(
        "hamiltonian-condition",
        (cond,),
        len(points),
        cfg.tol,
        notes=(f"expression: {expr}",),
    )
    return expr, report


def separable_hamiltonian(
    I1: ScalarExpr,
    I2: ScalarExpr,
    X1: VectorField,
    X2: VectorField,
    cfg: VerifyConfig,
) -> tuple[ScalarExpr, CriterionReport]:
    """H = I1 + I2 built from invariants of X1 and X2 respectively.

    I1 and I2 must be concrete composed expressions (e.g. a function of
    a known invariant); X1(I1) and X2(I2) are checked at the sampled
    points and a violation raises PreconditionResidualError.
    """
    points = cfg.points()
    inv1 = _condition("x1-invariance", _scalar_values(X1.apply(I1), points), points)
    inv2 = _condition("x2-invariance", _scalar_values(X2.apply(I2), points), points)
    for cond in (inv1, inv2):
        if not cond.within(cfg.tol.residual):
            raise PreconditionResidualError(cond.name, cond.max_residual or np.inf)
    commute = _condition(
        "bracket-x1-x2", _field_values(lie_bracket(X1, X2), points), points
    )
    H = (I1 + I2).simplified()
    expr = X1.apply(X2.apply(H))
    main = _condition("x1-x2-H", _scalar_values(expr, points), points)
    report = make_report(
        "separable-hamiltonian",
        (inv1, inv2, commute, main),
        len(points),
        cfg.tol,
        notes=(f"H = {H}",),
    )
    return H, report


# ---------------------------------------------------------------------------
# closed-form structure coefficients (reproduced verbatim) and their
# comparison against direct bracket expansion


@dataclass(frozen=True)
class StructureCoefficients:
    """The twelve scalar structure functions of the four-field algebra.

    Expressions that divide by X2(H) carry ``guard`` (the expression
    X2(H) itself) so callers can keep samples away from its zeros.
    """

    chart: object
    n1: ScalarExpr
    n2: ScalarExpr
    a1: ScalarExpr
    a2: ScalarExpr
    b1: ScalarExpr
    b2: ScalarExpr
    c1: ScalarExpr
    c2: ScalarExpr
    d1: ScalarExpr
    d2: ScalarExpr
    e1: ScalarExpr
    e2: ScalarExpr
    guard: ScalarExpr


@dataclass(frozen=True)
class Lemma4Result:
    coefficients: StructureCoefficients
    comparison: CriterionReport
    hamiltonian_field: VectorField


def delta_structure_functions(X1, X2, H):
    """The free-function choice that collapses the algebra to
    [X1,X2]=0, [X3,X1]=X1-X2, [X3,X2]=0: N1=E1=E2=0, D1=-1/X2(H),
    D2=-1+X1(H)/X2(H)."""
    chart = require_same_chart(X1, X2, H)
    zero = constant(chart, 0.0)
    h1 = X1.apply(H)
    h2 = X2.apply(H)
    d1 = (constant(chart, -1.0) / h2).simplified()
    d2 = (constant(chart, -1.0) + h1 / h2).simplified()
    return (zero, d1, d2, zero, zero)


def _check_guard(h2: ScalarExpr, points, tol):
    values = evaluate_at_points(h2, points)
    bad = ~np.isfinite(values) | (np.abs(values) < tol.guard_eps)
    if bad.any():
        index = int(np.argmax(bad))
        raise SingularFactorError(
            f"|X2(H)| < {tol.guard_eps:g} (or undefined) at sampled point "
            f"{points[index]}"
        )


def lemma4_coefficients(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: ScalarExpr,
    free,
    cfg: VerifyConfig,
) -> Lemma4Result:
    """Build the structure coefficients from the printed closed forms.

    ``free`` supplies (N1, D1, D2, E1, E2). The returned comparison
    report contrasts, pointwise, each printed coefficient with the
    least-squares expansion of the corresponding bracket; disagreements
    beyond tolerance are flagged in the notes (and do exist: the
    printed A1 has the opposite sign to direct expansion on the
    exponential fixture). All comparison conditions are informative.
    """
    chart = require_same_chart(X1, X2, X3, H)
    points = cfg.points()
    n1, d1, d2, e1, e2 = (
        f if isinstance(f, ScalarExpr) else constant(chart, f) for f in free
    )
    h1 = X1.apply(H)
    h2 = X2.apply(H)
    _check_guard(h2, points, cfg.tol)
    h11 = X1.apply(h1)
    h12 = X1.apply(h2)
    h21 = X2.apply(h1)
    h22 = X2.apply(h2)
    h31 = X3.apply(h1)
    h32 = X3.apply(h2)

    c1 = (h2 * n1 - h22).simplified()
    c2 = (h12 - h1 * n1).simplified()
    b1 = (-c2).simplified()
    b2 = ((h1 / h2) * (h12 - h1 * n1) + h21 / h2 - h11).simplified()
    n2 = (h12 / h2 - (h1 / h2) * n1 + h21 / h2).simplified()
    a1 = ((h1 / h2) * e2 - h2 * d1 - h1 * e1 + h32 / h2).simplified()
    a2 = (-(h2 * d2 + (h1 * h1 / h2) * e2 + h31 + (h32 * h1) / h2)).simplified()

    coefficients = StructureCoefficients(
        chart=chart,
        n1=n1, n2=n2, a1=a1, a2=a2, b1=b1, b2=b2,
        c1=c1, c2=c2, d1=d1, d2=d2, e1=e1, e2=e2,
        guard=h2,
    )

    xh = contract_hamiltonian(H, wedge(X1, X2))
    bracket_xh_x3 = lie_bracket(xh, X3)
    bracket_xh_x1 = lie_bracket(xh, X1)
    bracket_xh_x2 = lie_bracket(xh, X2)
    comparisons = (
        # (symbol, condition name, bracket, basis, column, printed coefficient)
        ("A1", "a1-vs-direct", bracket_xh_x3, (xh, X3), 0, a1),
        ("A2", "a2-vs-direct", bracket_xh_x3, (xh, X3), 1, a2),
        ("-C2", "neg-c2-vs-direct", bracket_xh_x1, (X1, X2), 0, (-c2).simplified()),
        ("B2", "b2-vs-direct", bracket_xh_x1, (X1, X2), 1, b2),
        ("C1", "c1-vs-direct", bracket_xh_x2, (X1, X2), 0, c1),
        ("C2", "c2-vs-direct", bracket_xh_x2, (X1, X2), 1, c2),
    )
    conditions = []
    notes = []
    span_cache: dict = {}
    for symbol, cond_name, bracket, basis, column, printed in comparisons:
        key = id(bracket)
        if key not in span_cache:
            try:
                span_cache[key] = span_expand(bracket, basis, points, cfg.tol)
            except AllPointsSkippedError as exc:
                span_cache[key] = exc
        decomp = span_cache[key]
        if isinstance(decomp, AllPointsSkippedError):
            conditions.append(
                ConditionResult(
                    cond_name, None, None, len(points), True, (str(decomp),)
                )
            )
            continue
        printed_values = evaluate_at_points(printed, points)
        deviation = np.abs(printed_values - decomp.coefficient_values(column))
        cond = _condition(cond_name, deviation, points, informative=True)
        conditions.append(cond)
        if cond.max_residual is not None and cond.max_residual > cfg.tol.residual:
            notes.append(
                f"printed {symbol} disagrees with direct bracket expansion "
                f"(max deviation {cond.max_residual:.3e})"
            )
    comparison = make_report(
        "lemma4-comparison", conditions, len(points), cfg.tol, notes=notes
    )
    return Lemma4Result(
        coefficients=coefficients, comparison=comparison, hamiltonian_field=xh
    )


def lemma4_residuals(
    coeffs: StructureCoefficients,
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: ScalarExpr,
    cfg: VerifyConfig,
) -> CriterionReport:
    """Evaluate the six scalar identities the coefficient choice must
    satisfy; residuals vanish when coeffs come from
    lemma4_coefficients (checked on the fixtures)."""
    points = cfg.points()
    h1 = X1.apply(H)
    h2 = X2.apply(H)
    _check_guard(h2, points, cfg.tol)
    h11 = X1.apply(h1)
    h12 = X1.apply(h2)
    h21 = X2.apply(h1)
    h22 = X2.apply(h2)
    h31 = X3.apply(h1)
    h32 = X3.apply(h2)
    c = coeffs
    residuals = (
        ("consistency-c2", h1 * c.n1 + c.c2 - h12),
        ("consistency-b2", h1 * c.n2 - c.b2 - h11),
        ("consistency-c1", h2 * c.n1 - c.c1 - h22),
        ("consistency-n2", h2 * c.n2 - c.c2 - h21),
        (
            "consistency-a2",
            c.a2 + c.a1 * h1 + c.d2 * h2 + c.d1 * h1 * h2 + c.e1 * h1 * h1 + h31,
        ),
        (
            "consistency-a1",
            c.a1 * h2 + c.d1 * h2 * h2 - c.e2 * h1 + c.e1 * h1 * h2 - h32,
        ),
    )
    conditions = [
        _condition(name, _scalar_values(expr.simplified(), points), points)
        for name, expr in residuals
    ]
    return make_report("lemma4-residuals", conditions, len(points), cfg.tol)


# ---------------------------------------------------------------------------
# Jacobi structures


def check_jacobi(
    X1: VectorField, X2: VectorField, XH: VectorField, cfg: VerifyConfig
) -> CriterionReport:
    """Is <X1 ^ X2, XH> a Jacobi structure?

    Commutation-rule form: [X1,X2] = -XH componentwise, both brackets
    [XH, Xi] lie in span{X1, X2}, and the trace coupling a + d = 0
    (coefficient of X1 in [XH,X1] plus coefficient of X2 in [XH,X2]).
    Direct form: [[L,L]] - 2*sigma*XH^L = 0 and [[XH, L]] = 0 with
    L = X1^X2 and sigma the global sign convention. Both forms gate.
    """
    points = cfg.points()
    mask = _independent_mask((X1, X2), points, cfg.tol)
    usable = [p for p, ok in zip(points, mask) if ok]
    dropped = len(points) - len(usable)
    if not usable:
        raise AllPointsSkippedError(
            "degenerate pair (X1, X2) at every sampled point"
        )
    notes = [f"sign convention sigma = {JACOBI_STRUCTURE_SIGN:+g}"]
    if dropped:
        notes.append(f"dropped {dropped} degenerate point(s)")

    bracket_cond = _condition(
        "bracket-plus-xh",
        _field_values(lie_bracket(X1, X2) + XH, usable),
        usable,
        extra_skipped=dropped,
    )
    span1, decomp1 = _span_condition(
        "bracket-xh-x1-in-span", lie_bracket(XH, X1), (X1, X2), usable, cfg.tol
    )
    span2, decomp2 = _span_condition(
        "bracket-xh-x2-in-span", lie_bracket(XH, X2), (X1, X2), usable, cfg.tol
    )
    if decomp1 is not None and decomp2 is not None:
        trace = decomp1.coefficient_values(0) + decomp2.coefficient_values(1)
        trace_cond = _condition("automorphism-trace", np.abs(trace), usable)
    else:
        trace_cond = ConditionResult(
            "automorphism-trace", None, None, len(usable), False,
            ("span expansion unavailable",),
        )

    lam = wedge(X1, X2)
    residual_tensor = schouten_bb(lam, lam) - wedge3(
        XH, X1, X2, 2.0 * JACOBI_STRUCTURE_SIGN
    )
    direct_cond = _condition(
        "schouten-identity",
        _grid_values(trivector_components_at(residual_tensor, usable)),
        usable,
        extra_skipped=dropped,
    )
    invariance_cond = _condition(
        "invariance",
        _grid_values(
            bivector_components_at(lie_derivative_bivector(XH, lam), usable)
        ),
        usable,
        extra_skipped=dropped,
    )
    conditions = (
        bracket_cond,
        span1,
        span2,
        trace_cond,
        direct_cond,
        invariance_cond,
    )
    theorem_pass = all(
        c.within(cfg.tol.residual) for c in (bracket_cond, span1, span2, trace_cond)
    )
    direct_pass = all(
        c.within(cfg.tol.residual) for c in (direct_cond, invariance_cond)
    )
    notes.append(f"commutation-rule form pass: {theorem_pass}")
    notes.append(f"direct-identity form pass: {direct_pass}")
    return make_report("jacobi", conditions, len(points), cfg.tol, notes=notes)


# ---------------------------------------------------------------------------
# the first-order (constant-of-motion) reduction


@dataclass(frozen=True)
class HojmanResult:
    rho: ScalarExpr
    rescaled_field: VectorField
    bivector: DecomposableBivector
    report: CriterionReport


def hojman_check(
    X1: VectorField, X3: VectorField, H: ScalarExpr, cfg: VerifyConfig
) -> HojmanResult:
    """Given [X3, X1] = X1 and X1(H) = 0, the function rho = X3(H) is a
    constant of the motion: X1(rho) = 0. Returns rho, the rescaled
    field rho * X1, and the bivector X1 ^ X3 the construction equips."""
    points = cfg.points()
    algebra = _condition(
        "bracket-x3-x1-minus-x1",
        _field_values(lie_bracket(X3, X1) - X1, points),
        points,
    )
    if not algebra.within(cfg.tol.residual):
        raise PreconditionResidualError(
            "[X3,X1] = X1", algebra.max_residual or np.inf
        )
    invariance = _condition(
        "x1-H", _scalar_values(X1.apply(H), points), points
    )
    if not invariance.within(cfg.tol.residual):
        raise PreconditionResidualError(
            "X1(H) = 0", invariance.max_residual or np.inf
        )
    rho = X3.apply(H)
    main = _condition("x1-rho", _scalar_values(X1.apply(rho), points), points)
    report = make_report(
        "hojman",
        (algebra, invariance, main),
        len(points),
        cfg.tol,
        notes=(f"rho = {rho}",),
    )
    return HojmanResult(
        rho=rho,
        rescaled_field=X1.scaled(rho),
        bivector=wedge(X1, X3),
        report=report,
    )


# ---------------------------------------------------------------------------
# linear realizations on semi-direct extensions of abelian algebras


@dataclass(frozen=True)
class LinearRealization:
    """X_A = sum A[i][j] x_j d/dx_i over the first n-1 coordinates and
    X_a = d/dx_n, the linear realization attached to a square matrix."""

    chart: object
    matrix: tuple[tuple[float, ...], ...]
    linear_field: VectorField
    shift_field: VectorField

    def residual_expressions(self, P) -> list[ScalarExpr]:
        """Residuals whose sampled vanishing makes X3 = sum P_j d/dx_j
        complete the three-field algebra with (X_A, X_a).

        P must list one expression per coordinate, none depending on
        the last coordinate.
        """
        P = list(P)
        n = self.chart.dimension
        if len(P) != n:
            raise ValueError(f"expected {n} candidate components, got {len(P)}")
        last = self.chart.names[-1]
        for expr in P:
            require_same_chart(self.linear_field, expr)
            if last in expr.depends_on():
                raise ValueError(
                    f"candidate components must not depend on {last!r}"
                )
        coords = [self.chart.coordinate(name) for name in self.chart.names]
        residuals = []
        for i in range(n - 1):
            rhs = self.chart.constant(0.0)
            for j in range(n - 1):
                rhs = rhs + self.matrix[i][j] * (P[j] - coords[j])
            residuals.append((self.linear_field.apply(P[i]) - rhs).simplified())
        residuals.append(
            (self.linear_field.apply(P[n - 1]) - 1.0).simplified()
        )
        return residuals


def linear_realization(matrix, chart) -> LinearRealization:
    """Build the pair (X_A, X_a) for an (n-1)x(n-1) real matrix A on an
    n-dimensional chart."""
    n = chart.dimension
    if n < 2:
        raise ValueError("chart must have dimension >= 2")
    rows = tuple(tuple(float(v) for v in row) for row in matrix)
    if len(rows) != n - 1 or any(len(row) != n - 1 for row in rows):
        raise ValueError(
            f"matrix must be {n - 1}x{n - 1} for chart of dimension {n}"
        )
    coords = [chart.coordinate(name) for name in chart.names]
    comps = []
    for i in range(n - 1):
        expr = chart.constant(0.0)
        for j in range(n - 1):
            if rows[i][j] != 0.0:
                expr = expr + rows[i][j] * coords[j]
        comps.append(expr.simplified())
    comps.append(chart.constant(0.0))
    linear_field = VectorField(chart, tuple(comps))
    shift_comps = [chart.constant(0.0)] * (n - 1) + [chart.constant(1.0)]
    shift_field = VectorField(chart, tuple(shift_comps))
    return LinearRealization(
        chart=chart, matrix=rows, linear_field=linear_field, shift_field=shift_field
    )


def check_linear_realization(
    realization: LinearRealization, P, cfg: VerifyConfig
) -> CriterionReport:
    """Sampled residuals of a candidate X3 for the linear realization."""
    points = cfg.points()
    residuals = realization.residual_expressions(P)
    conditions = [
        _condition(f"candidate-eq-{i + 1}", _scalar_values(expr, points), points)
        for i, expr in enumerate(residuals)
    ]
    return make_report("linear-realization", conditions, len(points), cfg.tol)
