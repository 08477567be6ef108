"""Deterministic uncoded-BER curves over AWGN, used to derive the shipped
pre-FEC SNR table in :mod:`thz3d.phy`.

Binary, PAM/QAM and OOK curves are exact closed forms. The 8-ary PSK/APSK
curves are integrated numerically on a Gaussian grid with minimum-distance
decisions. All functions take Eb/N0 as a linear ratio.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from thz3d.phy import Fec, Modulation


def qfunc(x):
    return ndtr(-np.asarray(x, dtype=float))


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def pam_gray_ber(levels: int, ebn0: float) -> float:
    """Exact BER of one Gray-labelled square-QAM axis."""
    bits_axis = int(np.log2(levels))
    # amplitudes +-1, +-3, ...; QAM symbol energy is twice the axis energy
    es = 2 * (levels**2 - 1) / 3
    n0 = es / (2 * bits_axis * ebn0)
    sigma = np.sqrt(n0 / 2)
    amps = np.arange(levels) * 2 - (levels - 1)
    edges = np.concatenate(([-np.inf], (amps[:-1] + 1).astype(float), [np.inf]))
    total = 0.0
    for i, a in enumerate(amps):
        cdf = ndtr((edges - a) / sigma)
        probs = np.diff(cdf)
        for j, p in enumerate(probs):
            if j != i:
                total += p * _popcount(_gray(i) ^ _gray(j))
    return total / (levels * bits_axis)


def psk8_points() -> np.ndarray:
    """Gray-labelled 8-PSK; ``points[label]``."""
    pts = np.zeros(8, dtype=complex)
    for q in range(8):
        pts[_gray(q)] = np.exp(1j * q * np.pi / 4)
    return pts


def apsk8_points() -> np.ndarray:
    """4+4 ring 8-APSK with unit average energy; ``points[label]``.

    Inner ring at 45 + k*90 degrees, outer ring at k*90 degrees, radius ratio
    (sqrt2 + sqrt6)/2 so inner-inner and inner-outer neighbours sit at the same
    distance. The top label bit selects the ring, the lower two bits are Gray
    coded around it.
    """
    r_outer = (np.sqrt(2) + np.sqrt(6)) / 2
    pts = np.zeros(8, dtype=complex)
    for q in range(4):
        pts[_gray(q)] = np.exp(1j * (np.pi / 4 + q * np.pi / 2))
        pts[4 + _gray(q)] = r_outer * np.exp(1j * q * np.pi / 2)
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


class GridIntegrator:
    """BER of a 2-D constellation by integrating the Gaussian over a fixed
    receive-plane grid.

    Decision regions (minimum distance) are evaluated once per grid cell; each
    noise level then only reweights cells by their exact per-axis Gaussian
    mass, which keeps the threshold search cheap. Cells on the grid border
    extend to infinity.
    """

    def __init__(self, points: np.ndarray, half_width: float = 3.0, n: int = 3001):
        self.points = np.asarray(points, dtype=complex)
        m = len(self.points)
        self.bits = int(np.log2(m))
        edges = np.linspace(-half_width, half_width, n + 1)
        centers = (edges[:-1] + edges[1:]) / 2
        self.edges = edges.copy()
        self.edges[0], self.edges[-1] = -np.inf, np.inf
        energy = np.abs(self.points) ** 2
        best = np.full((n, n), np.inf)
        decided = np.zeros((n, n), dtype=np.intp)
        for j, p in enumerate(self.points):
            # argmin |r - p_j|^2 == argmin |p_j|^2 - 2 Re(r conj p_j)
            metric = energy[j] - 2 * (centers[:, None] * p.real + centers[None, :] * p.imag)
            closer = metric < best
            best[closer] = metric[closer]
            decided[closer] = j
        hamming = np.array([[_popcount(i ^ j) for j in range(m)] for i in range(m)], dtype=float)
        # error-bit map seen by each transmitted point
        self.error_maps = [hamming[i][decided] for i in range(m)]

    def ber(self, ebn0: float) -> float:
        n0 = 1.0 / (self.bits * ebn0)
        sigma = np.sqrt(n0 / 2)
        total = 0.0
        for p, errors in zip(self.points, self.error_maps):
            wx = np.diff(ndtr((self.edges - p.real) / sigma))
            wy = np.diff(ndtr((self.edges - p.imag) / sigma))
            total += float(wx @ errors @ wy)
        return total / (len(self.points) * self.bits)


_INTEGRATORS: dict = {}


def grid_ber(points_name: str, ebn0: float) -> float:
    if points_name not in _INTEGRATORS:
        pts = psk8_points() if points_name == "8PSK" else apsk8_points()
        _INTEGRATORS[points_name] = GridIntegrator(pts)
    return _INTEGRATORS[points_name].ber(ebn0)


def ber(modulation: Modulation, ebn0_db: float) -> float:
    ebn0 = 10 ** (ebn0_db / 10)
    if modulation in (Modulation.BPSK, Modulation.QPSK):
        return float(qfunc(np.sqrt(2 * ebn0)))
    if modulation is Modulation.OOK:
        # coherent on/off detection, midpoint threshold, Eb = average energy
        return float(qfunc(np.sqrt(ebn0)))
    if modulation is Modulation.QAM16:
        return pam_gray_ber(4, ebn0)
    if modulation is Modulation.QAM64:
        return pam_gray_ber(8, ebn0)
    if modulation is Modulation.PSK8:
        return grid_ber("8PSK", ebn0)
    if modulation is Modulation.APSK8:
        return grid_ber("8APSK", ebn0)
    raise ValueError(modulation)


def ebn0_threshold_db(modulation: Modulation, target_ber: float) -> float:
    """Eb/N0 in dB where the uncoded BER falls to ``target_ber``."""
    def excess(x):
        return np.log(max(ber(modulation, x), 1e-300)) - np.log(target_ber)

    return brentq(excess, -5.0, 20.0, xtol=1e-5)


def derive_threshold_table() -> dict[tuple[Modulation, float], float]:
    targets = sorted({fec.ber_target for fec in Fec}, reverse=True)
    return {(mod, t): ebn0_threshold_db(mod, t) for mod in Modulation for t in targets}
