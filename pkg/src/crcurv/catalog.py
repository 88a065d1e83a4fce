"""Built-in chart catalog and the chart file format.

Catalog entries pair a parametric chart with its model ambient space and
document the closed-form values the chart is expected to reproduce; the
self-test in the suite replays every documented value.

Chart file format (text, line oriented; '#' starts a comment)::

    ambient flat q=<int>                  | ambient holomorphic q=<int> c=<float>
    dims d=<int> l=<int>
    domain u<i> <lo> <hi>                 # one line per parameter, in order
    component <expression>                # exactly 2q lines

Loading validates the declared (d, l) with the CR split at the center of
the domain box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import (AmbientSpace, make_const_holomorphic_ambient,
                      make_flat_complex_ambient)
from .errors import ChartFileError
from .expressions import parse_expression
from .geometry import Chart, ToleranceConfig, point_geometry

__all__ = ["CatalogEntry", "catalog", "catalog_entry", "sphere_in_Cq",
           "flat_torus", "totally_geodesic_plane", "product_sphere_chart",
           "holomorphic_product", "load_chart_file"]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    chart: Chart
    ambient: AmbientSpace
    doc: str
    expected: dict = field(default_factory=dict)


def _parse_components(sources, m):
    return tuple(parse_expression(src, m) for src in sources)


def sphere_in_Cq(d, l, q=None):
    """Unit sphere S^{d+l}(1) spanning the first d+l+1 coordinates of C^q,
    in the hyperspherical angle chart.

    Supported CR signatures of round spheres: l = 1 when the spanned
    subspace closes under J (hypersurface-type split, any domain), and
    l = 2 when one coordinate pair is broken, where the split clusters
    only on the band |x_{m+1}| small; the default domain keeps the last
    angle inside that band.
    """
    m = d + l
    q_min = (m + 2) // 2
    if q is None:
        q = q_min
    if 2 * q < m + 1:
        raise ValueError(f"need 2q >= d+l+1, got q={q}")
    if d < 2 or d % 2 or l < 1:
        raise ValueError(f"unsupported CR signature (d={d}, l={l})")
    spanned = m + 1
    if l == 1 and spanned % 2 == 0:
        band = False
    elif l == 2 and spanned % 2 == 1:
        band = True
    else:
        raise ValueError(f"a round sphere in C^q cannot realize (d={d}, "
                         f"l={l}); l=1 needs d+l odd, l=2 needs d+l even")

    comps = []
    prefix = ""
    for i in range(1, m + 1):
        comps.append(f"{prefix}cos(u{i})" if prefix else f"cos(u{i})")
        prefix += f"sin(u{i})*"
    comps.append(prefix[:-1])  # product of all sines
    comps.extend(["0"] * (2 * q - spanned))

    domain = [(0.3, 2.8)] * m
    if band:
        domain[-1] = (0.02, 0.08)
    chart = Chart(components=_parse_components(comps, m),
                  domain=tuple(domain), cr_dims=(d, l),
                  name=f"sphere_in_Cq:{d},{l},{q}")
    return chart, make_flat_complex_ambient(q)


def flat_torus(q):
    """Flat CR chart in C^q: a complex plane times q-1 unit circles.

    The induced metric is flat, the curve factors carry unit normal
    curvature, the complex factor is totally geodesic, so every curvature
    invariant vanishes and the chart is D-minimal.  (A plain product of
    circles would be totally real, d = 0, hence outside the CR pipeline.)
    """
    if q < 2:
        raise ValueError("flat torus chart needs q >= 2")
    m = 2 + (q - 1)
    comps = ["u1", "u2"]
    for i in range(3, m + 1):
        comps.extend([f"cos(u{i})", f"sin(u{i})"])
    domain = [(-1.5, 1.5), (-1.5, 1.5)] + [(0.2, 6.0)] * (q - 1)
    chart = Chart(components=_parse_components(comps, m),
                  domain=tuple(domain), cr_dims=(2, q - 1),
                  name=f"flat_torus:{q}")
    return chart, make_flat_complex_ambient(q)


def totally_geodesic_plane(d, l, q=None):
    """Affine subspace spanned by one complex block and l totally real
    axes taken from distinct further coordinate pairs; h = 0, R = 0."""
    if d < 2 or d % 2 or l < 0:
        raise ValueError(f"invalid (d={d}, l={l})")
    if q is None:
        q = (d + 2 * l + 1) // 2
    if 2 * q < d + 2 * l:
        raise ValueError(f"need 2q >= d + 2l for totally real axes, q={q}")
    m = d + l
    comps = ["0"] * (2 * q)
    for i in range(d):
        comps[i] = f"u{i + 1}"
    for j in range(l):
        comps[d + 2 * j] = f"u{d + j + 1}"
    chart = Chart(components=_parse_components(comps, m),
                  domain=tuple([(-2.0, 2.0)] * m), cr_dims=(d, l),
                  name=f"totally_geodesic_plane:{d},{l},{q}")
    return chart, make_flat_complex_ambient(q)


def product_sphere_chart():
    """S^4(1) in C^3 in doubly polar coordinates: two circle angles and
    two tilt angles, a product-style chart of the d = l = 2 example with
    integrable coordinate distributions.  The domain keeps the split on
    the clustering band."""
    comps = [
        "cos(u3)*cos(u1)", "cos(u3)*sin(u1)",
        "sin(u3)*cos(u4)*cos(u2)", "sin(u3)*cos(u4)*sin(u2)",
        "sin(u3)*sin(u4)", "0",
    ]
    domain = ((0.3, 2.8), (0.3, 2.8), (0.6, 1.0), (0.02, 0.08))
    chart = Chart(components=_parse_components(comps, 4), domain=domain,
                  cr_dims=(2, 2), name="product_sphere_chart")
    return chart, make_flat_complex_ambient(3)


def holomorphic_product():
    """Product of the holomorphic curve (z, z^2/2) in C^2 with a real axis
    in a third complex line: a D-minimal CR chart with nonvanishing h on D."""
    comps = ["u1", "u2", "(u1^2 - u2^2)/2", "u1*u2", "u3", "0"]
    domain = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
    chart = Chart(components=_parse_components(comps, 3), domain=domain,
                  cr_dims=(2, 1), name="holomorphic_product")
    return chart, make_flat_complex_ambient(3)


def catalog():
    """Built-in entries with their documented closed-form values."""
    entries = []

    chart, amb = sphere_in_Cq(2, 1, 2)
    entries.append(CatalogEntry(
        name="sphere_in_Cq:2,1,2", params={"d": 2, "l": 1, "q": 2},
        chart=chart, ambient=amb,
        doc="Unit 3-sphere in C^2, hypersurface CR split (d=2, l=1). "
            "Umbilic: |H|^2 = 9, S_m(D, D_perp) = 2, |H_D| = 2, "
            "|H_Dperp| = 1, all sectional curvatures 1.",
        expected={"norm_H_sq": 9.0, "mixed_scalar": 2.0, "norm_H_D": 2.0,
                  "sectional": 1.0}))

    chart, amb = sphere_in_Cq(2, 2, 3)
    entries.append(CatalogEntry(
        name="sphere_in_Cq:2,2,3", params={"d": 2, "l": 2, "q": 3},
        chart=chart, ambient=amb,
        doc="Unit 4-sphere spanning R^5 in C^3 on the clustering band "
            "(d=l=2). Umbilic: |H|^2 = 16, S_m(D, D_perp) = 4, "
            "H_D = H_Dperp, mixed-scalar bound attains equality 4 = 16/4.",
        expected={"norm_H_sq": 16.0, "mixed_scalar": 4.0, "sectional": 1.0}))

    chart, amb = sphere_in_Cq(4, 1, 3)
    entries.append(CatalogEntry(
        name="sphere_in_Cq:4,1,3", params={"d": 4, "l": 1, "q": 3},
        chart=chart, ambient=amb,
        doc="Unit 5-sphere in C^3, hypersurface CR split (d=4, l=1). "
            "Umbilic: |H|^2 = 25, |H_D| = 4, S_m(D, D_perp) = 4, "
            "script_H(s) = s; the holomorphic bound attains equality.",
        expected={"norm_H_sq": 25.0, "mixed_scalar": 4.0, "norm_H_D": 4.0,
                  "sectional": 1.0}))

    chart, amb = flat_torus(2)
    entries.append(CatalogEntry(
        name="flat_torus:2", params={"q": 2}, chart=chart, ambient=amb,
        doc="Flat CR product C x S^1 in C^2 (d=2, l=1): induced curvature "
            "0, every invariant 0, |H| = 1 from the circle factor, "
            "D-minimal.",
        expected={"norm_H_sq": 1.0, "mixed_scalar": 0.0, "norm_H_D": 0.0,
                  "sectional": 0.0}))

    chart, amb = totally_geodesic_plane(2, 1, 2)
    entries.append(CatalogEntry(
        name="totally_geodesic_plane:2,1,2", params={"d": 2, "l": 1, "q": 2},
        chart=chart, ambient=amb,
        doc="Affine C x R plane in C^2: h = 0, all invariants and mean "
            "curvatures 0.",
        expected={"norm_H_sq": 0.0, "mixed_scalar": 0.0, "norm_H_D": 0.0,
                  "sectional": 0.0}))

    chart, amb = totally_geodesic_plane(4, 2, 4)
    entries.append(CatalogEntry(
        name="totally_geodesic_plane:4,2,4", params={"d": 4, "l": 2, "q": 4},
        chart=chart, ambient=amb,
        doc="Affine C^2 x R^2 plane in C^4 (d=4, l=2): h = 0; hosts the "
            "k >= 2 aggregate and holomorphic checks trivially.",
        expected={"norm_H_sq": 0.0, "mixed_scalar": 0.0, "norm_H_D": 0.0,
                  "sectional": 0.0}))

    chart, amb = product_sphere_chart()
    entries.append(CatalogEntry(
        name="product_sphere_chart", params={}, chart=chart, ambient=amb,
        doc="S^4(1) in C^3 in product-style doubly polar coordinates "
            "(d=l=2 band split): same closed forms as sphere_in_Cq:2,2,3.",
        expected={"norm_H_sq": 16.0, "mixed_scalar": 4.0, "sectional": 1.0}))

    chart, amb = holomorphic_product()
    entries.append(CatalogEntry(
        name="holomorphic_product", params={}, chart=chart, ambient=amb,
        doc="Holomorphic curve (z, z^2/2) times a real axis (d=2, l=1): "
            "D-minimal with curved D (nonpositive sectional curvature on "
            "D), mixed scalar curvature 0.",
        expected={"norm_H_D": 0.0, "mixed_scalar": 0.0}))

    return entries


def catalog_entry(name):
    for entry in catalog():
        if entry.name == name:
            return entry
    raise KeyError(f"no catalog entry named {name!r}; available: "
                   f"{[e.name for e in catalog()]}")


# ---------------------------------------------------------------------------
# chart files

def _parse_kv(parts, line_no, **converters):
    out = {}
    for part in parts:
        if "=" not in part:
            raise ChartFileError(f"expected key=value, got {part!r}", line_no)
        key, _, raw = part.partition("=")
        if key not in converters:
            raise ChartFileError(f"unknown key {key!r}", line_no)
        try:
            out[key] = converters[key](raw)
        except ValueError:
            raise ChartFileError(f"bad value for {key}: {raw!r}", line_no)
    missing = set(converters) - set(out)
    if missing:
        raise ChartFileError(f"missing keys: {sorted(missing)}", line_no)
    return out


def load_chart_file(path, tol=None):
    """Parse a chart file and validate its declared split at the domain
    center; returns (Chart, AmbientSpace)."""
    tol = tol or ToleranceConfig()
    ambient = None
    dims = None
    domains = []
    component_srcs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            head = parts[0]
            if head == "ambient":
                if len(parts) < 2:
                    raise ChartFileError("ambient needs a model name", line_no)
                model = parts[1]
                if model == "flat":
                    kv = _parse_kv(parts[2:], line_no, q=int)
                    ambient = make_flat_complex_ambient(kv["q"])
                elif model == "holomorphic":
                    kv = _parse_kv(parts[2:], line_no, q=int, c=float)
                    ambient = make_const_holomorphic_ambient(kv["q"], kv["c"])
                else:
                    raise ChartFileError(f"unknown ambient model {model!r}",
                                         line_no)
            elif head == "dims":
                kv = _parse_kv(parts[1:], line_no, d=int, l=int)
                dims = (kv["d"], kv["l"])
            elif head == "domain":
                if len(parts) != 4:
                    raise ChartFileError("domain needs: u<i> <lo> <hi>",
                                         line_no)
                idx = len(domains) + 1
                if parts[1] != f"u{idx}":
                    raise ChartFileError(f"domain lines must come in order; "
                                         f"expected u{idx}, got {parts[1]!r}",
                                         line_no)
                try:
                    lo, hi = float(parts[2]), float(parts[3])
                except ValueError:
                    raise ChartFileError("domain bounds must be numbers",
                                         line_no)
                domains.append((lo, hi))
            elif head == "component":
                component_srcs.append((line.split(None, 1)[1], line_no))
            else:
                raise ChartFileError(f"unknown directive {head!r}", line_no)

    if ambient is None:
        raise ChartFileError("missing 'ambient' line", 0)
    if dims is None:
        raise ChartFileError("missing 'dims' line", 0)
    if not domains:
        raise ChartFileError("missing 'domain' lines", 0)
    if len(component_srcs) != ambient.dim:
        raise ChartFileError(f"expected {ambient.dim} components, got "
                             f"{len(component_srcs)}", 0)
    m = len(domains)
    comps = []
    for src, line_no in component_srcs:
        try:
            comps.append(parse_expression(src, m))
        except Exception as exc:
            raise ChartFileError(f"bad component expression: {exc}", line_no)
    chart = Chart(components=tuple(comps), domain=tuple(domains),
                  cr_dims=dims, name=str(path))
    center = np.array([(lo + hi) / 2 for lo, hi in chart.domain])
    point_geometry(ambient, chart, center, tol)  # validates rank + split
    return chart, ambient
