"""Shared builders for the test suite."""
import numpy as np

import qbhkit as qk


def make_cfg(chart, lo=-1.0, hi=1.0, samples=60, seed=7, guards=(), box=None, tol=None):
    if box is None:
        box = tuple((lo, hi) for _ in chart.names)
    domain = qk.SampleDomain(chart, box, tuple(guards), samples=samples, seed=seed)
    return qk.VerifyConfig(domain=domain, tol=tol or qk.ToleranceConfig())


def exp_triple():
    """X1 = e^z d/dx + d/dy, X2 = d/dy, X3 = d/dz on (x, y, z)."""
    chart = qk.CoordinateChart(("x", "y", "z"))
    z = chart.coordinate("z")
    x1 = qk.VectorField.from_mapping(
        chart, {"x": qk.exp(z), "y": chart.constant(1.0)}
    )
    x2 = qk.coordinate_field(chart, "y")
    x3 = qk.coordinate_field(chart, "z")
    return chart, x1, x2, x3


def exp_cfg(samples=60, seed=7):
    """Sampling box matching the exp realization: z stays in [0.1, 1]."""
    chart, x1, x2, x3 = exp_triple()
    box = ((-1.0, 1.0), (-1.0, 1.0), (0.1, 1.0))
    return chart, x1, x2, x3, make_cfg(chart, box=box, samples=samples, seed=seed)


def rotation_triple():
    """The planar-rotation realization with the closed-form X3."""
    chart = qk.CoordinateChart(("x1", "x2", "x3"))
    c1, c2 = chart.coordinate("x1"), chart.coordinate("x2")
    theta = qk.atan2(c2, c1)
    x1 = qk.VectorField.from_mapping(chart, {"x1": -c2, "x2": c1})
    x2 = qk.coordinate_field(chart, "x3")
    x3 = qk.VectorField(
        chart, ((theta * c2).simplified(), (-(theta * c1)).simplified(), theta)
    )
    return chart, x1, x2, x3


def rotation_cfg(samples=60, seed=7):
    chart, x1, x2, x3 = rotation_triple()
    r2 = qk.parse_expression("sqrt(x1^2 + x2^2 - 0.25)", chart)
    box = ((0.1, 1.5), (-1.2, 1.2), (-1.0, 1.0))
    cfg = make_cfg(
        chart, box=box, samples=samples, seed=seed, guards=(qk.Guard(r2),)
    )
    return chart, x1, x2, x3, cfg


def non_poisson_pair():
    """d/dx1 ^ (d/dx2 + x1 d/dx3): its self-Schouten bracket is constant 2."""
    chart = qk.CoordinateChart(("x1", "x2", "x3"))
    x = qk.coordinate_field(chart, "x1")
    y = qk.VectorField.from_mapping(
        chart,
        {"x2": chart.constant(1.0), "x3": chart.coordinate("x1")},
    )
    return chart, x, y


def max_field_deviation(X, Y, points):
    """Max over points and components of |X - Y|."""
    diff = X.components_at(points) - Y.components_at(points)
    return float(np.max(np.abs(diff)))


def random_fields(chart, rng, degree=2, count=2):
    fields = []
    for _ in range(count):
        comps = tuple(
            qk.random_polynomial(chart, rng, degree=degree)
            for _ in chart.names
        )
        fields.append(qk.VectorField(chart, comps))
    return fields
