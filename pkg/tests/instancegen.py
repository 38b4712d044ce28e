"""Seeded random instances for the property suites."""

import numpy as np

from rootlift import is_admissible, sample_selfmap
from rootlift.bundle import BundleError, build_bundle, poly_from_exprs


def _fmt(x):
    return repr(float(x))


def _coef_text(rng, var, scale=0.8):
    """A low-order random trigonometric coefficient expression."""
    a = scale * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
    terms = [f"({_fmt(a[0].real)}+{_fmt(a[0].imag)}i)"
             .replace("+-", "-")]
    for k, coef in enumerate(a[1:], start=1):
        re, im = _fmt(coef.real), _fmt(coef.imag)
        terms.append(f"({re}+{im}i)*cos({k}*{var})".replace("+-", "-"))
        terms.append(f"({re}+{im}i)*sin({k}*{var})".replace("+-", "-"))
    return "+".join(terms)


def random_admissible_poly(base, degree, rng, max_tries=60):
    """Random admissible polynomial with trigonometric coefficients."""
    var = "x" if base.kind == "interval" else "theta"
    for _ in range(max_tries):
        texts = [_coef_text(rng, var) for _ in range(degree)]
        poly = poly_from_exprs(base, texts)
        if not is_admissible(poly).admissible:
            continue
        try:
            build_bundle(poly)
        except BundleError:
            continue
        return poly
    raise RuntimeError("no admissible random polynomial found")


def random_circle_selfmap(base, rng, max_winding=2):
    """Random self-map of winding degree in [-max_winding, max_winding]."""
    d = int(rng.integers(-max_winding, max_winding + 1))
    a = float(rng.uniform(0.0, 2 * np.pi))
    b = float(rng.uniform(0.0, 0.8))
    c = float(rng.uniform(0.0, 2 * np.pi))
    text = f"{d}*theta+{_fmt(a)}+{_fmt(b)}*sin(theta+{_fmt(c)})"
    bound = abs(d) + 2.0
    return sample_selfmap(base, text, continuity_bound=bound)


def random_interval_selfmap(base, rng):
    """Random continuous self-map of [0, 1] (images stay in [0.05, 0.95])."""
    a = float(rng.uniform(0.3, 0.7))
    b = float(rng.uniform(0.0, 0.25))
    c = float(rng.uniform(0.0, 2 * np.pi))
    text = f"{_fmt(a)}+{_fmt(b)}*sin(3*x+{_fmt(c)})"
    return sample_selfmap(base, text, continuity_bound=4.0)
