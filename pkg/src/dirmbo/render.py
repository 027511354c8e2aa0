"""Label renderers producing portable pixmaps (PPM, binary P6).

PPM needs no codec and is byte-reproducible: the same labeling always yields
the same image bytes.  Torus images put x1 left-to-right and x2 bottom-to-top;
slice montages keep the remaining axes in ascending order.  Sphere maps are
equirectangular (phi left-to-right, theta top-to-bottom starting at the north
pole) plus orthographic vertical/front/side disk views.

PALETTE is the fixed 20-color categorical palette used everywhere; labels
beyond 20 cycle through it.
"""

import numpy as np

from .domains import SphereDomain, TorusDomain

__all__ = [
    "PALETTE",
    "ppm_bytes",
    "write_ppm",
    "render_torus2",
    "render_slices",
    "render_sphere",
    "default_slice_positions",
]

# 20 distinguishable categorical colors (RGB 0-255)
PALETTE = np.array(
    [
        (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
        (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
        (188, 189, 34), (23, 190, 207), (174, 199, 232), (255, 187, 120),
        (152, 223, 138), (255, 152, 150), (197, 176, 213), (196, 156, 148),
        (247, 182, 210), (199, 199, 199), (219, 219, 141), (158, 218, 229),
    ],
    dtype=np.uint8,
)

BOUNDARY_COLOR = np.array((255, 0, 0), dtype=np.uint8)
BACKGROUND = np.array((255, 255, 255), dtype=np.uint8)


def ppm_bytes(image):
    """Binary P6 encoding of an (H, W, 3) uint8 image."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got {image.shape}")
    h, w = image.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + image.tobytes()


def write_ppm(image, path):
    with open(path, "wb") as f:
        f.write(ppm_bytes(image))


def _colorize(labels2d):
    return PALETTE[np.asarray(labels2d) % len(PALETTE)]


def _plane_image(plane):
    """Axes-(a, b) label plane -> image with a rightward, b upward."""
    return _colorize(plane.T[::-1, :])


def render_torus2(labeling, extend=1, boundary=False):
    """Color image of a 2d torus labeling, optionally tiled extend x extend.

    With ``boundary`` the edges of the original box are drawn in red on top
    of the tiling.
    """
    if not isinstance(labeling.domain, TorusDomain) or labeling.domain.d != 2:
        raise ValueError("needs a 2d torus labeling")
    if extend < 1:
        raise ValueError(f"extend must be >= 1, got {extend}")
    n = labeling.domain.n
    tiled = np.tile(labeling.labels, (extend, extend))
    img = _plane_image(tiled)
    if boundary:
        for t in range(extend + 1):
            r = min(t * n, img.shape[0] - 1)
            c = min(t * n, img.shape[1] - 1)
            img[r, :] = BOUNDARY_COLOR
            img[:, c] = BOUNDARY_COLOR
    return img


def default_slice_positions(length):
    """Eight equispaced cut positions starting at the box face."""
    return [-length / 2 + j * length / 8 for j in range(8)]


def _snap(domain, position):
    L, n = domain.length, domain.n
    if not (-L / 2 <= position < L / 2):
        raise ValueError(f"position {position} outside [{-L / 2}, {L / 2})")
    idx = int(np.rint((position + L / 2) * n / L)) % n
    return idx, -L / 2 + idx * L / n


def _montage(panels, ncols, pad=1):
    rows = -(-len(panels) // ncols)
    ph, pw = panels[0].shape[:2]
    out = np.empty((rows * ph + (rows - 1) * pad, ncols * pw + (ncols - 1) * pad, 3), dtype=np.uint8)
    out[:] = BACKGROUND
    for i, panel in enumerate(panels):
        r, c = divmod(i, ncols)
        y, x = r * (ph + pad), c * (pw + pad)
        out[y : y + ph, x : x + pw] = panel
    return out


def render_slices(labeling, axis, positions=None):
    """Cuts of a 3d/4d torus labeling perpendicular to one axis.

    Positions snap to the nearest grid plane; each entry of the returned list
    is (snapped_position, image).  For d = 3 the image is the remaining 2d
    plane; for d = 4 the remaining volume is itself cut along its first axis
    at the default positions and shown as a 2 x 4 montage.
    """
    dom = labeling.domain
    if not isinstance(dom, TorusDomain) or dom.d not in (3, 4):
        raise ValueError("needs a 3d or 4d torus labeling")
    if not 0 <= axis < dom.d:
        raise ValueError(f"axis {axis} out of range for d={dom.d}")
    if positions is None:
        positions = default_slice_positions(dom.length)
    out = []
    for pos in positions:
        idx, snapped = _snap(dom, pos)
        cut = np.take(labeling.labels, idx, axis=axis)
        if dom.d == 3:
            img = _plane_image(cut)
        else:
            panels = []
            for sub in default_slice_positions(dom.length):
                jdx, _ = _snap(dom, sub)
                panels.append(_plane_image(np.take(cut, jdx, axis=0)))
            img = _montage(panels, ncols=4)
        out.append((snapped, img))
    return out


def _nearest_theta(domain, theta):
    nodes = domain.theta_nodes
    pos = np.searchsorted(nodes, theta)
    pos = np.clip(pos, 1, len(nodes) - 1)
    left = theta - nodes[pos - 1]
    right = nodes[pos] - theta
    return np.where(left <= right, pos - 1, pos)


_VIEWS = ("equirect", "vertical", "front", "side")


def render_sphere(labeling, view="equirect", size=None):
    """Color map of a sphere labeling.

    "equirect" is the full (theta, phi) chart, n_theta x n_phi pixels.  The
    orthographic views project the hemisphere facing the +z (vertical), +y
    (front), or +x (side) direction onto a disk; pixels off the sphere are
    white.
    """
    dom = labeling.domain
    if not isinstance(dom, SphereDomain):
        raise ValueError("needs a sphere labeling")
    if view not in _VIEWS:
        raise ValueError(f"view must be one of {_VIEWS}")
    if view == "equirect":
        return _colorize(labeling.labels)
    size = size or dom.n_theta
    s = (np.arange(size) + 0.5) / size * 2 - 1
    sx, sy = np.meshgrid(s, -s)  # screen x rightward, screen y upward
    rr = sx**2 + sy**2
    inside = rr <= 1.0
    depth = np.sqrt(np.maximum(0.0, 1.0 - rr))
    if view == "vertical":  # looking down the z axis
        x, y, z = sx, sy, depth
    elif view == "front":  # looking down the y axis
        x, z, y = sx, sy, depth
    else:  # side: looking down the x axis
        y, z, x = -sx, sy, depth
    theta = np.arccos(np.clip(z, -1, 1))
    phi = np.mod(np.arctan2(x, y), 2 * np.pi)
    ti = _nearest_theta(dom, theta)
    pi_ = np.rint(phi / (2 * np.pi / dom.n_phi)).astype(np.int64) % dom.n_phi
    img = np.empty((size, size, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    img[inside] = _colorize(labeling.labels[ti[inside], pi_[inside]])
    return img
