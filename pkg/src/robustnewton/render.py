"""Basin-of-attraction rendering: color each pixel of a complex-plane
window by the root its seed's orbit reaches and by how fast.

Pixels are independent and the pixel loop is scheduling-free, so repeated
renders of the same inputs are byte-identical.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ModulusReductionError
from .poly import Polynomial
from .rnm import ZERO_REL_TOL
from .roots import RootSet, solve_all

_METHOD_CODES = {
    "rnm": kernels.METHOD_RNM,
    "modified_rnm": kernels.METHOD_MODIFIED,
    "newton": kernels.METHOD_NEWTON,
}


@dataclass(frozen=True)
class Window:
    """Axis-aligned view of the complex plane with a pixel raster.

    Pixel (i, j) is seeded at
    center + ((i+0.5)/px_w - 0.5)*width + 1j*((j+0.5)/px_h - 0.5)*height,
    with j increasing downward (row 0 is written first in the image).
    """

    center: complex
    width: float
    height: float
    px_w: int
    px_h: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("window dimensions must be positive")
        if self.px_w < 1 or self.px_h < 1:
            raise ValueError("raster must have at least one pixel")

    def seed(self, i: int, j: int) -> complex:
        re = ((i + 0.5) / self.px_w - 0.5) * self.width
        im = ((j + 0.5) / self.px_h - 0.5) * self.height
        return complex(self.center.real + re, self.center.imag + im)


@dataclass(frozen=True)
class BasinGrid:
    """Per-pixel classification: root_index[j, i] is the index into roots
    of the root pixel (i, j) converged to, or -1 for non-converged pixels
    (iteration cap, critical-point stop, or unmatched terminal point);
    iters[j, i] is the iteration count at termination."""

    root_index: np.ndarray
    iters: np.ndarray
    roots: RootSet
    max_iters: int


def render_basins(
    p: Polynomial,
    w: Window,
    method: str = "rnm",
    eps: float = 1e-10,
    max_iters: int = 10_000,
) -> BasinGrid:
    """Run the chosen iteration from every pixel seed and classify the
    terminal point against the polynomial's root set.

    A pixel that stops at root tolerance is matched to the nearest root
    within 10*sqrt(eps); everything else is marked -1.
    """
    if p.degree < 2:
        raise ValueError("rendering requires degree >= 2")
    if method not in _METHOD_CODES:
        raise ValueError(f"unknown method {method!r}")
    roots = solve_all(p, eps=min(eps, 1e-10))
    coeffs = p.monic().coeffs if method == "modified_rnm" else p.coeffs
    match_radius = 10.0 * eps ** 0.5
    idx, iters = kernels.render_grid(
        coeffs,
        w.center.real,
        w.center.imag,
        w.width,
        w.height,
        w.px_w,
        w.px_h,
        _METHOD_CODES[method],
        eps,
        max_iters,
        ZERO_REL_TOL,
        list(roots.roots),
        match_radius,
    )
    if idx is None:
        raise ModulusReductionError("a pixel orbit violated the decrement bound")
    shape = (w.px_h, w.px_w)
    return BasinGrid(
        root_index=np.array(idx, dtype=np.int32).reshape(shape),
        iters=np.array(iters, dtype=np.int32).reshape(shape),
        roots=roots,
        max_iters=max_iters,
    )


def palette_colors(n: int, palette: str = "classic") -> list[tuple[int, int, int]]:
    """Base colors (0..255 RGB) for n roots.

    classic: evenly spaced saturated hues; grayscale: evenly spaced grays.
    """
    if palette == "classic":
        out = []
        for m in range(n):
            r, g, b = colorsys.hsv_to_rgb(m / max(n, 1), 0.85, 1.0)
            out.append((round(r * 255), round(g * 255), round(b * 255)))
        return out
    if palette == "grayscale":
        if n == 1:
            return [(230, 230, 230)]
        return [
            (int(90 + 140 * m / (n - 1)),) * 3 for m in range(n)
        ]
    raise ValueError(f"unknown palette {palette!r}")


def grid_to_rgb(g: BasinGrid, palette: str = "classic") -> np.ndarray:
    """8-bit RGB image: hue by root index, brightness falling linearly with
    iteration count (capped at the grid's max_iters); -1 pixels are white."""
    base = np.array(palette_colors(len(g.roots), palette), dtype=np.float64)
    cap = max(g.max_iters, 1)
    ramp = 1.0 - 0.85 * np.minimum(g.iters, cap) / cap
    safe_idx = np.maximum(g.root_index, 0)
    rgb = base[safe_idx] * ramp[..., None]
    rgb = np.rint(rgb).astype(np.uint8)
    rgb[g.root_index < 0] = (255, 255, 255)
    return rgb


def write_image(g: BasinGrid, palette: str = "classic", path="basins.ppm",
                image_format: str = "ppm") -> None:
    """Write the grid as a binary PPM (P6, 8-bit, row-major, top row
    first), or as PNG when requested (PNG bytes are encoder-dependent; the
    byte-exact format is PPM)."""
    rgb = grid_to_rgb(g, palette)
    try:
        if image_format == "ppm":
            header = f"P6\n{g.root_index.shape[1]} {g.root_index.shape[0]}\n255\n"
            with open(path, "wb") as fh:
                fh.write(header.encode("ascii"))
                fh.write(rgb.tobytes())
        elif image_format == "png":
            from PIL import Image

            Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
        else:
            raise ValueError(f"unknown image format {image_format!r}")
    except OSError as exc:
        raise OSError(f"cannot write image to {path!r}: {exc}") from exc
