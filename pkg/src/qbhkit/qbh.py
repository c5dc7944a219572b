"""Assembly and verification of quasi-bi-Hamiltonian systems.

The construction: from three fields realizing the commutation algebra
and a Hamiltonian H solving X1(X2(H)) = 0, form XH = dH | (X1 ^ X2);
for a second function F form XF = dF | (XH ^ X3) and rho = -X3(F).
The contraction identity XF = {H,F} X3 + rho XH always holds; when F
is an integral ({H,F} = 0) and rho never vanishes on the domain, the
system is exact: XF = rho XH. If moreover X3(F) = -1, the rescaling is
trivial and the pair of structures is genuinely bi-Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import require_same_chart
from .errors import (
    DeltaViolatedError,
    HamiltonianConditionViolatedError,
    NonVanishingRhoError,
    NotAnIntegralError,
)
from .expr import ScalarExpr, constant, evaluate_at_points
from .fields import (
    BivectorSum,
    VectorField,
    contract_hamiltonian,
    poisson_bracket,
    wedge,
    zero_field,
)
from .criteria import (
    _condition,
    _field_values,
    _scalar_values,
    check_delta,
    hamiltonian_condition,
)
from .reports import CriterionReport, make_report
from .sampling import VerifyConfig


@dataclass(frozen=True)
class HamiltonianSystem:
    """A bivector (Poisson candidate) together with a Hamiltonian.

    Whether the bivector really is Poisson is a sampled check, not a
    construction-time invariant; run check_poisson_pair on each term.
    """

    chart: object
    bivector: BivectorSum
    hamiltonian: ScalarExpr


def hamiltonian_vector_field(system: HamiltonianSystem) -> VectorField:
    """dH contracted into the bivector, term by term."""
    result = zero_field(system.chart)
    for coeff, biv in system.bivector.terms:
        result = result + contract_hamiltonian(system.hamiltonian, biv).scaled(coeff)
    return result


@dataclass(frozen=True)
class QuasiBiHamiltonianSystem:
    """The verified tuple <chart, X1^X2, H, XH^X3, F> with derived data."""

    chart: object
    x1: VectorField
    x2: VectorField
    x3: VectorField
    xh: VectorField
    xf: VectorField
    hamiltonian: ScalarExpr
    integral: ScalarExpr
    rho: ScalarExpr
    composite: BivectorSum
    exact: bool
    bi_hamiltonian: bool
    report: CriterionReport


def build_qbh(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: ScalarExpr,
    F: ScalarExpr,
    cfg: VerifyConfig,
    require_exact: bool = True,
) -> QuasiBiHamiltonianSystem:
    """Construct and verify the quasi-bi-Hamiltonian system.

    Raises DeltaViolatedError / HamiltonianConditionViolatedError when
    the algebraic preconditions fail, NotAnIntegralError when exactness
    is required but {H,F} does not vanish, and NonVanishingRhoError
    when exactness is required but rho = -X3(F) vanishes (or changes
    sign) somewhere on the sampled domain.
    """
    chart = require_same_chart(X1, X2, X3, H, F)
    delta_report = check_delta(X1, X2, X3, cfg)
    if not delta_report.passed:
        raise DeltaViolatedError(delta_report)
    _, ham_report = hamiltonian_condition(X1, X2, H, cfg)
    if not ham_report.passed:
        raise HamiltonianConditionViolatedError(ham_report)

    points = cfg.points()
    xh = contract_hamiltonian(H, wedge(X1, X2))
    xf = contract_hamiltonian(F, wedge(xh, X3))
    rho = (-X3.apply(F)).simplified()
    hf = poisson_bracket(wedge(X1, X2), H, F)

    conditions = []
    # the contraction identity XF = {H,F} X3 + rho XH holds for any F
    identity_field = xf - (X3.scaled(hf) + xh.scaled(rho))
    conditions.append(
        _condition("contraction-identity", _field_values(identity_field, points), points)
    )

    integral_cond = _condition(
        "integral", _scalar_values(hf, points), points,
        informative=not require_exact,
    )
    conditions.append(integral_cond)
    exact = integral_cond.within(cfg.tol.residual)
    if require_exact and not exact:
        raise NotAnIntegralError(integral_cond.max_residual or np.inf)

    if require_exact:
        rho_values = evaluate_at_points(rho, points)
        bad = ~np.isfinite(rho_values) | (np.abs(rho_values) < cfg.tol.guard_eps)
        if bad.any():
            index = int(np.argmax(bad))
            raise NonVanishingRhoError(
                f"|rho| < {cfg.tol.guard_eps:g} (or undefined) at sampled "
                f"point {points[index]}"
            )
        if (rho_values > 0).any() and (rho_values < 0).any():
            raise NonVanishingRhoError(
                "rho changes sign inside the sampled domain"
            )

    conditions.append(
        _condition(
            "exactness",
            _field_values(xf - xh.scaled(rho), points),
            points,
            informative=not exact,
        )
    )
    conditions.append(
        _condition("xf-of-F", _scalar_values(xf.apply(F), points), points)
    )

    bi_cond = _condition(
        "x3-F-plus-1",
        _scalar_values(X3.apply(F) + constant(chart, 1.0), points),
        points,
        informative=True,
    )
    conditions.append(bi_cond)
    bi_hamiltonian = exact and bi_cond.within(cfg.tol.residual)
    if bi_hamiltonian:
        conditions.append(
            _condition(
                "bi-degeneration", _field_values(xf - xh, points), points
            )
        )

    one = constant(chart, 1.0)
    composite = BivectorSum(
        chart, ((one, wedge(X1, X2)), (one, wedge(xh, X3)))
    )
    notes = [
        f"exact: {exact}",
        f"bi-hamiltonian: {bi_hamiltonian}",
        f"rho = {rho}",
    ]
    report = make_report("qbh-build", conditions, len(points), cfg.tol, notes=notes)
    return QuasiBiHamiltonianSystem(
        chart=chart,
        x1=X1,
        x2=X2,
        x3=X3,
        xh=xh,
        xf=xf,
        hamiltonian=H,
        integral=F,
        rho=rho,
        composite=composite,
        exact=exact,
        bi_hamiltonian=bi_hamiltonian,
        report=report,
    )


def jacobi_identity_check(B, test_functions, cfg: VerifyConfig) -> CriterionReport:
    """Max |{{F,G},K} + {{G,K},F} + {{K,F},G}| over triples and points.

    Points where a cyclic sum is undefined are skipped and counted.
    """
    triples = list(test_functions)
    if not triples:
        raise ValueError("at least one test-function triple is required")
    points = cfg.points()
    rows = []
    for F, G, K in triples:
        cyclic = (
            poisson_bracket(B, poisson_bracket(B, F, G), K)
            + poisson_bracket(B, poisson_bracket(B, G, K), F)
            + poisson_bracket(B, poisson_bracket(B, K, F), G)
        ).simplified()
        rows.append(evaluate_at_points(cyclic, points))
    table = np.abs(np.vstack(rows))
    # a point is usable for the max as long as every triple is defined there
    per_point = table.max(axis=0)
    cond = _condition("cyclic-sum", per_point, points)
    return make_report(
        "jacobi-identity",
        (cond,),
        len(points),
        cfg.tol,
        notes=(f"{len(triples)} test-function triple(s)",),
    )
