"""Independent reference computations used by the tests.

Nothing here imports the package's transforms or recursions: sums are
written out directly, integrals go through scipy.integrate.quad, and
operator symbols are evaluated from their plane-wave formulas.
"""

import math

import numpy as np
from scipy import integrate


def direct_transform(values, x2, xi):
    """sum_n f(x_n) exp(-i xi x_n) h  for each xi (rows of values are x1)."""
    h = x2[1] - x2[0]
    return (values @ np.exp(-1j * np.outer(x2, xi))) * h


def causal_quad(g, rate, a, x):
    """int_a^x exp(-rate (x - y)) g(y) dy."""
    re = integrate.quad(lambda y: math.exp(-rate * (x - y)) * g(y), a, x,
                        epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return re


def oseen_green(alpha, xi, z):
    """Bounded Green's function of w'' - alpha w' - xi^2 w = delta."""
    d = math.sqrt(alpha * alpha + 4 * xi * xi)
    lam_p = 0.5 * (alpha + d)
    lam_m = 0.5 * (alpha - d)
    return -math.exp(lam_m * z) / d if z > 0 else -math.exp(lam_p * z) / d


def green_quad(g, alpha, xi, x, a, b):
    """int_a^b G(x - y) g(y) dy by adaptive quadrature, split at the kink."""
    f = lambda y: oseen_green(alpha, xi, x - y) * g(y)
    left = integrate.quad(f, a, min(x, b), epsabs=1e-14, epsrel=1e-13, limit=400)[0] if x > a else 0.0
    right = integrate.quad(f, max(x, a), b, epsabs=1e-14, epsrel=1e-13, limit=400)[0] if x < b else 0.0
    return left + right


# plane-wave symbols: operator applied to exp(i omega x1) exp(i xi x2)

def sym_D0(alpha, om, xi):
    return 1.0 / (-om * om - 1j * alpha * om - xi * xi)


def sym_D1(alpha, om, xi):
    return 1j * om * sym_D0(alpha, om, xi)


def sym_tildeD0_d3(alpha, om, xi):
    return -1j * xi ** 3 / (om * om + xi * xi) * sym_D0(alpha, om, xi)


def sym_tildeD1_d2(alpha, om, xi):
    return -xi * xi * 1j * om / (om * om + xi * xi) * sym_D0(alpha, om, xi)


SYMBOLS = {"D0": sym_D0, "D1": sym_D1, "tildeD0_d3": sym_tildeD0_d3,
           "tildeD1_d2": sym_tildeD1_d2}


def apply_symbol_x1(values, L1, alpha, xi, sym):
    """Apply a plane-wave symbol along x1 by periodic FFT (one xi2 mode per column)."""
    n1 = values.shape[0]
    om = np.fft.fftfreq(n1, 2 * L1 / n1) * 2 * np.pi
    out = np.empty(values.shape, complex)
    for c in range(values.shape[1]):
        with np.errstate(invalid="ignore", divide="ignore"):
            s = sym(alpha, om, xi[c])
        s[~np.isfinite(s)] = 0.0                         # singular only at om = xi = 0
        s[n1 // 2] = 0.0
        out[:, c] = np.fft.ifft(np.fft.fft(values[:, c]) * s)
    return out


def theta_ref(t):
    """Transition profile written from the bump definition."""
    if t <= 1.0:
        return 1.0
    if t >= 2.0:
        return 0.0
    s = t - 1.0
    a, b = math.exp(-1.0 / s), math.exp(-1.0 / (1.0 - s))
    return 1.0 - a / (a + b)


def phi_ref(j, xi):
    t = abs(xi) / 2.0 ** j
    return theta_ref(t) - theta_ref(2.0 * t)


def band_norms_ref(values, L1, L2, j_list, p1, p2):
    """Per-band L^p1_x1 L^p2_x2 norms by explicit DFT loops."""
    n1, n2 = values.shape
    h1, h2 = 2 * L1 / n1, 2 * L2 / n2
    x2 = -L2 + h2 * np.arange(n2)
    k = np.fft.fftfreq(n2, 1.0 / n2)
    xi = np.pi * k / L2
    fh = direct_transform(values, x2, xi)
    out = []
    for j in j_list:
        w = np.array([phi_ref(j, x) for x in xi])
        piece = (fh * w) @ np.exp(1j * np.outer(xi, x2)) / (2 * L2)
        a = np.abs(piece.real)
        inner = (np.sum(a ** p2, axis=1) * h2) ** (1 / p2) if math.isfinite(p2) else a.max(axis=1)
        out.append((np.sum(inner ** p1) * h1) ** (1 / p1) if math.isfinite(p1) else inner.max())
    return np.array(out)


def periodic_oseen(F_components, L1, L2, alpha):
    """-Delta u + alpha d1 u = P div F on the periodic box (independent 2D solve)."""
    F11, F12, F21, F22 = F_components
    n1, n2 = F11.shape
    k1 = np.fft.fftfreq(n1, 2 * L1 / n1) * 2 * np.pi
    k2 = np.fft.fftfreq(n2, 2 * L2 / n2) * 2 * np.pi
    K1, K2 = np.meshgrid(k1, k2, indexing="ij")
    hat = [np.fft.fft2(a) for a in (F11, F12, F21, F22)]
    f1 = 1j * K1 * hat[0] + 1j * K2 * hat[1]
    f2 = 1j * K1 * hat[2] + 1j * K2 * hat[3]
    kk = K1 ** 2 + K2 ** 2
    kk[0, 0] = 1.0
    dot = (K1 * f1 + K2 * f2) / kk
    p1, p2 = f1 - K1 * dot, f2 - K2 * dot
    sym = kk + 1j * alpha * K1
    u1, u2 = p1 / sym, p2 / sym
    for u in (u1, u2):
        u[0, 0] = 0.0
        u[n1 // 2, :] = 0.0
        u[:, n2 // 2] = 0.0
    return np.fft.ifft2(u1).real, np.fft.ifft2(u2).real
