"""Candidate likelihoods and per-bit LLRs of the XOR (network-coded) bits.

Sign convention: a positive LLR favors bit value 1. An LLR whose opposing
hypothesis set is empty (possible with truncated candidate lists) would be
infinite; it saturates at +/- clamp instead so downstream arithmetic stays
total.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DEFAULT_LLR_CLAMP",
    "squared_distance",
    "log_likelihood",
    "max_star",
    "nc_llrs",
    "hard_decision",
]

DEFAULT_LLR_CLAMP = 100.0


def squared_distance(x: np.ndarray, y: np.ndarray) -> float:
    """||x - y||^2 with a fixed left-to-right accumulation order.

    Every distance in the package goes through this (or an elementwise
    np.add.reduce with the same order), so decoder, oracle, and harness
    agree bitwise.
    """
    d = np.asarray(x, dtype=np.complex128) - np.asarray(y, dtype=np.complex128)
    return float(np.add.reduce(d.real * d.real + d.imag * d.imag))


def log_likelihood(y: np.ndarray, x: np.ndarray, n0: float) -> float:
    """Log of the perfect-CSI complex Gaussian density of y given point x.

    Equals -M*ln(pi*N0) - ||y - x||^2 / N0 for M-dimensional vectors and
    per-entry complex noise variance N0.
    """
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    y = np.asarray(y)
    x = np.asarray(x)
    if y.shape != x.shape:
        raise ValueError("y and x must have the same shape")
    m = y.size
    return -m * math.log(math.pi * n0) - squared_distance(y, x) / n0


def max_star(values) -> float:
    """Jacobian logarithm ln(sum(exp(values))).

    Left fold of the pairwise rule max(x, y) + ln(1 + e^-|x-y|); -inf is
    the identity element and an all--inf input returns -inf.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("max_star needs a non-empty 1-D sequence")
    return float(np.logaddexp.reduce(arr))


def nc_llrs(
    labels: np.ndarray,
    log_likelihoods: np.ndarray,
    priors: np.ndarray | None = None,
    clamp: float = DEFAULT_LLR_CLAMP,
) -> np.ndarray:
    """Per-bit LLRs of the XOR bits from a candidate list.

    labels is (num_candidates, mu) with the XOR bit label of each
    candidate; log_likelihoods is the matching (num_candidates,) vector.
    Bit i compares, via max-star, the candidates labelled 1 against those
    labelled 0, each weighted by the a-priori term sum_{j != i} u_j v_j
    (priors v are all zero here unless supplied).
    """
    labels = np.asarray(labels)
    logps = np.asarray(log_likelihoods, dtype=np.float64)
    if labels.ndim != 2:
        raise ValueError("labels must be (num_candidates, mu)")
    n, mu = labels.shape
    if n == 0:
        raise ValueError("candidate list is empty")
    if logps.shape != (n,):
        raise ValueError("log_likelihoods must match the candidate count")
    out = np.empty(mu, dtype=np.float64)
    prior_total = None
    if priors is not None:
        priors = np.asarray(priors, dtype=np.float64)
        if priors.shape != (mu,):
            raise ValueError("priors must have one entry per bit")
        prior_total = labels @ priors
    for i in range(mu):
        ones = labels[:, i] == 1
        metrics = logps
        if prior_total is not None:
            metrics = logps + (prior_total - labels[:, i] * priors[i])
        pos = np.logaddexp.reduce(np.where(ones, metrics, -np.inf))
        neg = np.logaddexp.reduce(np.where(ones, -np.inf, metrics))
        out[i] = pos - neg
    return np.clip(out, -clamp, clamp, out=out)


def hard_decision(llrs: np.ndarray) -> np.ndarray:
    """1 where the LLR is strictly positive, else 0 (ties decide 0)."""
    return (np.asarray(llrs) > 0).astype(np.int8)
