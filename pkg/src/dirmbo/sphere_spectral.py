"""Heat semigroup of the Laplace-Beltrami operator on the unit sphere.

The transform pairs a fast Fourier transform in azimuth (separating the
order m) with dense Gauss-Legendre quadrature in inclination per order,
O(n^3) per field.  Spherical harmonics Y_l^m = Pbar_l^m(cos t) e^{i m p}
are eigenfunctions of the Laplace-Beltrami operator with eigenvalue
-l(l+1), so diffusing for time tau scales each degree-l coefficient by
exp(-l(l+1)*tau).

Pbar_l^m is the fully normalized associated Legendre function (Condon-
Shortley phase included): integral over the sphere of |Y_l^m|^2 is 1.
With the band limit capped at min(n_theta - 1, (n_phi - 1)/2) the forward
quadrature is exact on the band-limited space, so forward/inverse round-trip
to machine precision there.

Coefficients are stored for m >= 0 only (real fields obey the conjugate
symmetry s_{l,-m} = (-1)^m conj(s_{l,m})), packed order-major: for each m,
degrees l = m..lmax are contiguous.
"""

import numpy as np

from .domains import SphereDomain

__all__ = [
    "legendre_table",
    "ShCoeffs",
    "ShtPlan",
    "sht_forward",
    "sht_inverse",
    "diffuse_sphere",
    "SphereHeat",
]


def packed_size(lmax):
    return (lmax + 1) * (lmax + 2) // 2


def packed_offsets(lmax):
    """offsets[m] = start of the (l = m..lmax) block; offsets[lmax+1] = total."""
    offs = np.zeros(lmax + 2, dtype=np.int64)
    for m in range(lmax + 1):
        offs[m + 1] = offs[m] + (lmax + 1 - m)
    return offs


def legendre_table(lmax, x):
    """Fully normalized associated Legendre values Pbar_l^m(x), packed order-major.

    Returns an array of shape (len(x), packed_size(lmax)).  Uses the standard
    three-term recurrence in l at fixed m, seeded from the diagonal

        Pbar_m^m = (-1)^m sqrt((2m+1)/(4 pi) * (2m-1)!!/(2m)!!) (1-x^2)^(m/2),

    which stays finite for band limits of several hundred (values near the
    poles gradually underflow to zero, which is the correct absolute
    behavior).
    """
    x = np.asarray(x, dtype=np.float64)
    offs = packed_offsets(lmax)
    table = np.zeros((x.size, offs[-1]))
    sint = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    pmm = np.full(x.size, np.sqrt(1.0 / (4 * np.pi)))
    for m in range(lmax + 1):
        off = offs[m]
        table[:, off] = pmm
        if m + 1 <= lmax:
            p_prev = pmm
            p = np.sqrt(2 * m + 3.0) * x * pmm
            table[:, off + 1] = p
            for l in range(m + 2, lmax + 1):
                a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = np.sqrt(
                    ((2.0 * l + 1.0) * (l + m - 1.0) * (l - m - 1.0))
                    / ((2.0 * l - 3.0) * (l - m) * (l + m))
                )
                p_new = a * x * p - b * p_prev
                table[:, off + (l - m)] = p_new
                p_prev, p = p, p_new
        pmm = -np.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * sint * pmm
    return table


class ShCoeffs:
    """Spherical-harmonic coefficients s_{l,m} for m >= 0, packed order-major."""

    def __init__(self, lmax, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (packed_size(lmax),):
            raise ValueError(f"expected {packed_size(lmax)} coefficients, got {values.shape}")
        self.lmax = int(lmax)
        self.values = values
        self._offs = packed_offsets(lmax)

    def get(self, l, m):
        if not (0 <= m <= l <= self.lmax):
            raise IndexError(f"(l={l}, m={m}) outside band (m >= 0 stored)")
        return self.values[self._offs[m] + (l - m)]

    def copy(self):
        return ShCoeffs(self.lmax, self.values.copy())

    def power(self):
        """Total squared amplitude including implicit negative orders."""
        offs = self._offs
        p = float((np.abs(self.values[: offs[1]]) ** 2).sum())  # m = 0 block
        p += 2.0 * float((np.abs(self.values[offs[1]:]) ** 2).sum())
        return p


class ShtPlan:
    """Precomputed transform data for one SphereDomain (immutable, shareable)."""

    def __init__(self, domain):
        if not isinstance(domain, SphereDomain):
            raise ValueError("ShtPlan requires a SphereDomain")
        self.domain = domain
        self.lmax = domain.lmax
        self.offsets = packed_offsets(self.lmax)
        self.plm = legendre_table(self.lmax, domain.cos_theta)
        self.weights = domain.gl_weights
        # degree of each packed coefficient, for diffusion factors
        degs = np.concatenate([np.arange(m, self.lmax + 1) for m in range(self.lmax + 1)])
        self.degrees = degs

    def heat_factors(self, tau):
        return np.exp(-self.degrees * (self.degrees + 1.0) * tau)


def sht_forward(plan, values):
    """Band-limited analysis of a real field on the plan's grid."""
    dom = plan.domain
    values = np.asarray(values, dtype=np.float64)
    if values.shape != dom.shape:
        raise ValueError(f"field shape {values.shape} does not match domain {dom.shape}")
    lmax, offs = plan.lmax, plan.offsets
    fourier = np.fft.rfft(values, axis=1) * (2 * np.pi / dom.n_phi)
    weighted = plan.weights[:, None] * fourier
    coeffs = np.zeros(offs[-1], dtype=np.complex128)
    for m in range(lmax + 1):
        off, nl = offs[m], lmax + 1 - m
        coeffs[off : off + nl] = plan.plm[:, off : off + nl].T @ weighted[:, m]
    return ShCoeffs(lmax, coeffs)


def sht_inverse(plan, coeffs):
    """Synthesis: real field sum_{l,m} s_{l,m} Y_l^m at the grid nodes."""
    dom = plan.domain
    if coeffs.lmax > plan.lmax:
        raise ValueError(f"coefficients band {coeffs.lmax} exceeds plan band {plan.lmax}")
    lmax, offs = coeffs.lmax, coeffs._offs
    spec = np.zeros((dom.n_theta, dom.n_phi // 2 + 1), dtype=np.complex128)
    for m in range(lmax + 1):
        off, nl = offs[m], lmax + 1 - m
        spec[:, m] = plan.plm[:, plan.offsets[m] : plan.offsets[m] + nl] @ coeffs.values[off : off + nl]
    return np.fft.irfft(spec * dom.n_phi, n=dom.n_phi, axis=1)


def diffuse_sphere(values, tau, plan):
    """Solve the surface diffusion equation for time tau.

    The l = 0 coefficient is untouched, so the spherical mean is preserved;
    every other coefficient shrinks, so the L2 norm cannot increase.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    c = sht_forward(plan, values)
    c.values *= plan.heat_factors(tau)
    return sht_inverse(plan, c)


class SphereHeat:
    """Reusable diffusion operator with a fixed plan and tau."""

    def __init__(self, domain, tau):
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")
        self.domain = domain
        self.tau = float(tau)
        self.plan = ShtPlan(domain)
        self._factors = self.plan.heat_factors(self.tau)

    def apply(self, values):
        c = sht_forward(self.plan, values)
        c.values *= self._factors
        return sht_inverse(self.plan, c)
