import cmath
import math

import numpy as np
import pytest

from cavity_bell.states import EntangledStateSpec, Polarization


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spec(rng, polarization=None):
    pol = polarization or rng.choice(list(Polarization))
    return EntangledStateSpec(pol, rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi))


def coherent_amp(j, gamma):
    """Real coherent amplitude gamma^j e^{-gamma^2/2} / sqrt(j!) (phi = 0)."""
    if j < 0:
        return 0.0
    if gamma == 0.0:
        return 1.0 if j == 0 else 0.0
    return math.exp(j * math.log(gamma) - 0.5 * gamma * gamma - 0.5 * math.lgamma(j + 1))


def reference_sector(spec, n, t, cfg):
    """Independent construction of rho_n(t): per-sector amplitude vector read off
    the evolution-operator matrix elements, then outer-producted.

    Shares no code with the element lists in cavity_bell.dynamics, so a
    transcription slip in either shows up as a mismatch.
    """
    g, gamma = cfg.g, cfg.gamma
    s = math.sin(spec.xi) * cmath.exp(1j * spec.eta)
    c = math.cos(spec.xi) * cmath.exp(-1j * spec.eta)
    if spec.polarization is Polarization.ANTIPARALLEL:
        k1 = math.sqrt(n + 1) * math.sin(g * t * math.sqrt(4 * n + 6)) / math.sqrt(4 * n + 6)
        x = g * t * math.sqrt((2 * n + 1) / 2)
        k2, k3 = math.cos(x) ** 2, -math.sin(x) ** 2
        k4 = (-math.sqrt(n) * math.sin(g * t * math.sqrt(4 * n - 2)) / math.sqrt(4 * n - 2)
              if n >= 1 else 0.0)
        amp = np.array([
            coherent_amp(n + 1, gamma) * k1 * (s + c),
            coherent_amp(n, gamma) * (k2 * s + k3 * c),
            coherent_amp(n, gamma) * (k3 * s + k2 * c),
            coherent_amp(n - 1, gamma) * k4 * (s + c),
        ])
    else:
        x = g * t * math.sqrt((2 * n + 3) / 2)
        u11 = 1.0 - 2 * (n + 1) * math.sin(x) ** 2 / (2 * n + 3)
        u14 = 2 * math.sqrt((n + 1) * (n + 2)) * math.sin(x) ** 2 / (2 * n + 3)
        r = math.sqrt(4 * n + 2)
        u21 = -math.sqrt(n) * math.sin(g * t * r) / r if n >= 1 else 0.0
        u24 = math.sqrt(n + 1) * math.sin(g * t * r) / r
        u41 = (2 * math.sqrt(n * (n - 1)) * math.sin(g * t * math.sqrt((2 * n - 1) / 2)) ** 2
               / (2 * n - 1) if n >= 2 else 0.0)
        u44 = 1.0 - (2 * n * math.sin(g * t * math.sqrt((2 * n - 1) / 2)) ** 2 / (2 * n - 1)
                     if n >= 1 else 0.0)
        mid = coherent_amp(n - 1, gamma) * u21 * s + coherent_amp(n + 1, gamma) * u24 * c
        amp = np.array([
            coherent_amp(n, gamma) * u11 * s + coherent_amp(n + 2, gamma) * u14 * c,
            mid,
            mid,
            coherent_amp(n - 2, gamma) * u41 * s + coherent_amp(n, gamma) * u44 * c,
        ])
    return np.outer(amp, amp.conj())
