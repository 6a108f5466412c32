"""Passive Lorentz boosts and matched spacetime points.

Convention: the primed frame moves with velocity ``v`` relative to the
unprimed one, so ``t' = gamma (t - v.x / c^2)`` and ``x'_par = gamma (x_par - v t)``.
Four-vectors are stored as ``(c t, x, y, z)``.
"""

from __future__ import annotations

import numpy as np


def check_velocity(v, c: float = 1.0) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    if np.linalg.norm(v) >= c:
        raise ValueError(f"boost speed |v| = {np.linalg.norm(v)} must be below c = {c}")
    return v


def gamma(v, c: float = 1.0) -> float:
    beta2 = float(np.dot(v, v)) / c**2
    return 1.0 / np.sqrt(1.0 - beta2)


def boost_matrix(v, c: float = 1.0) -> np.ndarray:
    """4x4 matrix taking unprimed four-vectors ``(a0, a)`` to the primed frame."""
    v = check_velocity(v, c)
    beta = v / c
    b2 = float(beta @ beta)
    g = gamma(v, c)
    lam = np.eye(4)
    lam[0, 0] = g
    lam[0, 1:] = -g * beta
    lam[1:, 0] = -g * beta
    if b2 > 0:
        lam[1:, 1:] += (g - 1.0) * np.outer(beta, beta) / b2
    return lam


def rest_frame_events(v, t_prime, x_prime, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Map primed events ``(t', x')`` back to unprimed ``(t, x)``.

    ``x_prime`` has shape ``(..., 3)``; ``t_prime`` broadcasts against its leading axes.
    """
    inv = np.linalg.inv(boost_matrix(v, c))
    x_prime = np.asarray(x_prime, dtype=float)
    t_prime = np.broadcast_to(np.asarray(t_prime, dtype=float), x_prime.shape[:-1])
    events = np.concatenate([c * t_prime[..., None], x_prime], axis=-1)
    rest = events @ inv.T
    return rest[..., 0] / c, rest[..., 1:]


def boost_wavevector(k, omega, v, c: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Transform plane-wave ``(omega / c, k)`` to the primed frame."""
    lam = boost_matrix(v, c)
    k = np.atleast_2d(np.asarray(k, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    four = np.concatenate([omega[:, None] / c, k], axis=1) @ lam.T
    return four[:, 1:], four[:, 0] * c


def four_vector_mismatch(boosted: np.ndarray, expected: np.ndarray) -> float:
    """Max over points of ``|boosted - expected|`` relative to the largest ``|expected|``.

    Both arrays have shape ``(..., 4)``.
    """
    scale = np.max(np.linalg.norm(expected, axis=-1))
    if scale == 0:
        return float(np.max(np.linalg.norm(boosted, axis=-1)))
    return float(np.max(np.linalg.norm(boosted - expected, axis=-1)) / scale)
