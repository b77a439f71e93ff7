"""Fixed-length vectorizations of persistence diagrams.

Top-k lifespans, persistence images (Gaussian bumps on the
birth/lifespan plane), persistence landscapes (stacked triangle
functions), and scalar summaries. Infinite intervals are dropped by every
scheme: the one essential degree-0 class is shared by all shapes and
carries no signal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .persistence import PersistenceDiagram

Array = np.ndarray

PI_WEIGHTS = ("1", "y", "y2")


@dataclass(frozen=True)
class SignatureVector:
    """Fixed-length feature vector plus the scheme that produced it."""

    values: Array
    scheme: dict

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("signature values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _birth_life(pd: PersistenceDiagram, dim: int) -> Array:
    """(m, 2) births and lifespans of the finite intervals of the dimension."""
    pts = pd.finite_in_dim(dim)
    return np.column_stack([pts[:, 0], pts[:, 1] - pts[:, 0]]) if len(pts) else np.empty((0, 2))


def lifespans_topk(pd: PersistenceDiagram, dim: int, k: int) -> SignatureVector:
    """The k largest finite lifespans, sorted descending and zero-padded."""
    if k < 1:
        raise ValueError("k must be at least 1")
    spans = pd.lifespans(dim)
    out = np.zeros(k)
    take = min(k, len(spans))
    out[:take] = spans[:take]
    return SignatureVector(out, {"kind": "lifespans", "dim": dim, "k": k})


# ---------------------------------------------------------------------------
# persistence images
# ---------------------------------------------------------------------------


def _weight_values(weight: str, lifespans: Array) -> Array:
    if weight == "1":
        return np.ones_like(lifespans)
    if weight == "y":
        return lifespans
    if weight == "y2":
        return lifespans**2
    raise ValueError(f"weight must be one of {PI_WEIGHTS}, got {weight!r}")


@dataclass(frozen=True)
class ImageScheme:
    """Persistence-image scheme; the value range is fitted once on training
    diagrams and reused unchanged at test time."""

    dim: int
    resolution: int = 10
    sigma: float = 0.1
    weight: str = "y"
    birth_range: tuple | None = None
    life_range: tuple | None = None

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be at least 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        _weight_values(self.weight, np.zeros(1))

    def fit(self, diagrams) -> "ImageScheme":
        """Return a copy with ranges covering the given diagrams."""
        pts = [p for pd in diagrams for p in _birth_life(pd, self.dim)]
        if pts:
            arr = np.array(pts)
            births = arr[:, 0]
            lives = arr[:, 1]
            b_lo, b_hi = float(births.min()), float(births.max())
            l_hi = float(lives.max())
        else:
            b_lo = b_hi = 0.0
            l_hi = 0.0
        if b_hi <= b_lo:
            b_lo, b_hi = b_lo - 4 * self.sigma, b_hi + 4 * self.sigma
        if l_hi <= 0:
            l_hi = 4 * self.sigma
        return replace(self, birth_range=(b_lo, b_hi), life_range=(0.0, l_hi))

    def vector(self, pd: PersistenceDiagram) -> SignatureVector:
        scheme = self if self.birth_range is not None else self.fit([pd])
        return persistence_image(
            pd,
            scheme.dim,
            scheme.resolution,
            scheme.sigma,
            scheme.weight,
            birth_range=scheme.birth_range,
            life_range=scheme.life_range,
        )


def persistence_image(
    pd: PersistenceDiagram,
    dim: int,
    resolution: int = 10,
    sigma: float = 0.1,
    weight: str = "y",
    birth_range: tuple | None = None,
    life_range: tuple | None = None,
) -> SignatureVector:
    """Sum of weighted Gaussian bumps on the (birth, lifespan) plane,
    integrated per grid cell by center-point evaluation times cell area."""
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    pts = _birth_life(pd, dim)
    if birth_range is None or life_range is None:
        fitted = ImageScheme(dim, resolution, sigma, weight).fit([pd])
        birth_range = birth_range or fitted.birth_range
        life_range = life_range or fitted.life_range
    b_lo, b_hi = map(float, birth_range)
    l_lo, l_hi = map(float, life_range)
    bw = (b_hi - b_lo) / resolution
    lw = (l_hi - l_lo) / resolution
    bc = b_lo + (np.arange(resolution) + 0.5) * bw
    lc = l_lo + (np.arange(resolution) + 0.5) * lw
    image = np.zeros((resolution, resolution))
    if len(pts):
        w = _weight_values(weight, pts[:, 1])
        norm = 1.0 / (2.0 * np.pi * sigma**2)
        db = bc[None, :] - pts[:, 0:1]
        dl = lc[None, :] - pts[:, 1:2]
        gb = np.exp(-(db**2) / (2 * sigma**2))
        gl = np.exp(-(dl**2) / (2 * sigma**2))
        image = norm * np.einsum("k,kb,kl->bl", w, gb, gl) * (bw * lw)
    scheme = {
        "kind": "image",
        "dim": dim,
        "resolution": resolution,
        "sigma": sigma,
        "weight": weight,
        "birth_range": (b_lo, b_hi),
        "life_range": (l_lo, l_hi),
    }
    return SignatureVector(image.ravel(), scheme)


# ---------------------------------------------------------------------------
# persistence landscapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LandscapeScheme:
    """Persistence-landscape scheme.

    ``top`` truncates the diagram to its longest intervals before the
    landscape is evaluated (None keeps all); the number of levels is
    min(top or 10, 10). The sampling span is fitted on training diagrams.
    """

    dim: int
    resolution: int = 100
    top: int | None = None
    t_range: tuple | None = None

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.top is not None and self.top < 1:
            raise ValueError("top must be at least 1")

    @property
    def levels(self) -> int:
        return min(self.top, 10) if self.top is not None else 10

    def fit(self, diagrams) -> "LandscapeScheme":
        lo, hi = np.inf, -np.inf
        for pd in diagrams:
            pts = pd.finite_in_dim(self.dim)
            if len(pts):
                lo = min(lo, float(pts[:, 0].min()))
                hi = max(hi, float(pts[:, 1].max()))
        if not np.isfinite(lo) or hi <= lo:
            lo, hi = 0.0, 1.0
        return replace(self, t_range=(lo, hi))

    def vector(self, pd: PersistenceDiagram) -> SignatureVector:
        scheme = self if self.t_range is not None else self.fit([pd])
        return persistence_landscape(
            pd,
            scheme.dim,
            scheme.resolution,
            scheme.levels,
            top=scheme.top,
            t_range=scheme.t_range,
        )


def persistence_landscape(
    pd: PersistenceDiagram,
    dim: int,
    resolution: int = 100,
    levels: int = 1,
    top: int | None = None,
    t_range: tuple | None = None,
) -> SignatureVector:
    """Landscape levels sampled on a uniform grid over the diagram's span.

    lambda_k(t) is the k-th largest of max(0, min(t - b, d - t)); levels are
    concatenated in order k = 1..levels.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if levels < 1:
        raise ValueError("levels must be at least 1")
    pts = pd.finite_in_dim(dim)
    if top is not None and len(pts) > top:
        order = np.argsort(pts[:, 1] - pts[:, 0])[::-1]
        pts = pts[order[:top]]
    if t_range is None:
        if len(pts):
            t_range = (float(pts[:, 0].min()), float(pts[:, 1].max()))
        else:
            t_range = (0.0, 1.0)
    ts = np.linspace(t_range[0], t_range[1], resolution)
    out = np.zeros((levels, resolution))
    if len(pts):
        tent = np.maximum(
            0.0,
            np.minimum(ts[None, :] - pts[:, 0:1], pts[:, 1:2] - ts[None, :]),
        )
        take = min(levels, len(pts))
        ranked = -np.sort(-tent, axis=0)
        out[:take] = ranked[:take]
    scheme = {
        "kind": "landscape",
        "dim": dim,
        "resolution": resolution,
        "levels": levels,
        "top": top,
        "t_range": tuple(map(float, t_range)),
    }
    return SignatureVector(out.ravel(), scheme)


def scalar_summaries(pd: PersistenceDiagram, dim: int) -> tuple:
    """(cardinality, max, total, second-longest) over finite intervals."""
    spans = pd.lifespans(dim)
    n = len(spans)
    return (
        n,
        float(spans[0]) if n else 0.0,
        float(spans.sum()) if n else 0.0,
        float(spans[1]) if n >= 2 else 0.0,
    )
