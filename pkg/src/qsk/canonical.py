"""Reference constructions: the canonical observable pair, the maximally
entangled state, the CGLMP measurements, and the structural unitaries
relating them.

The canonical pair is ``Z`` (the qudit clock, diag(1, w, ..., w^(d-1)))
and its partner ``T``: unitary, symmetric, order d, simple spectrum.
Together with the maximally entangled state and the derived pair of
Alice-side observables they attain the maximal SATWAP value 2(d-1).
"""

from __future__ import annotations

import numpy as np

from .bell import Realization
from .linalg import assert_unitary, omega
from .satwap import coefficient_a


def z_observable(d: int) -> np.ndarray:
    """diag(1, w, ..., w^(d-1)): the d-dimensional clock observable."""
    return np.diag([omega(d, i) for i in range(d)]).astype(complex)


def t_observable(d: int) -> np.ndarray:
    """The canonical partner of the clock observable.

    Entries: ``w**(i+1/2)`` on the diagonal minus
    ``(2/d) (-1)**(delta_i0 + delta_j0) w**((i+j+1)/2)`` everywhere,
    with principal-branch half powers.  Unitary, symmetric, order d,
    with every d-th root of unity a simple eigenvalue.
    """
    t = np.zeros((d, d), dtype=complex)
    for i in range(d):
        t[i, i] += omega(d, i + 0.5)
    for i in range(d):
        for j in range(d):
            sign = (-1) ** ((i == 0) + (j == 0))
            t[i, j] -= (2.0 / d) * sign * omega(d, (i + j + 1) / 2)
    return t


def t_eigenvector(d: int, r: int) -> np.ndarray:
    """Closed-form unit eigenvector of the T observable for eigenvalue w**r.

    ``|r> = (2/d) sum_q (-1)**delta_q0 w**(-q/2) / (1 - w**(r-q-1/2)) |q>``.
    The explicit formula fixes the global phase, which downstream phase
    identities rely on.
    """
    if not 0 <= r < d:
        raise ValueError(f"r must be in [0, {d}), got {r}")
    v = np.array(
        [
            (-1) ** (q == 0) * omega(d, -q / 2) / (1 - omega(d, r - q - 0.5))
            for q in range(d)
        ]
    )
    return (2.0 / d) * v


def maximally_entangled(d: int) -> np.ndarray:
    """(1/sqrt(d)) sum_i |ii> on C^d (x) C^d."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v / np.sqrt(d)


def ideal_alice_observables(d: int) -> tuple[np.ndarray, np.ndarray]:
    """The Alice-side pair attaining the maximal value with Bob = (Z, T).

    A1 = a1* Z - 2 (a1*)^3 T  and  A2 = a1 Z + a1* T.  The signs of the
    T coefficients are forced: they are the unique solution of the linear
    system Z = a1 X + a1* Y, T = a1* w X + a1 Y satisfied by the
    w_alice conjugations, and the opposite choice is not order d.
    """
    z, t = z_observable(d), t_observable(d)
    a1 = coefficient_a(d, 1)
    a1c = a1.conjugate()
    alice1 = a1c * z - 2 * a1c**3 * t
    alice2 = a1 * z + a1c * t
    assert_unitary(alice1, what="first Alice observable")
    assert_unitary(alice2, what="second Alice observable")
    return alice1, alice2


def cglmp_eigenvector(d: int, party: str, setting: int, r: int) -> np.ndarray:
    """Fourier-basis eigenvector of a CGLMP measurement.

    Alice: (1/sqrt(d)) sum_q w**((r - alpha_x) q) |q>, alpha_x = (x - 1/2)/2.
    Bob:   (1/sqrt(d)) sum_q w**(-(r - beta_y) q) |q>, beta_y = y/2.
    Settings are numbered 1 and 2.
    """
    q = np.arange(d)
    if party.upper() == "A":
        alpha = (setting - 0.5) / 2
        v = np.exp(2j * np.pi * (r - alpha) * q / d)
    elif party.upper() == "B":
        beta = setting / 2
        v = np.exp(-2j * np.pi * (r - beta) * q / d)
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return v / np.sqrt(d)


def cglmp_observables(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four CGLMP observables (A1', A2', B1', B2') from their eigenbases."""

    def build(party: str, setting: int) -> np.ndarray:
        m = np.zeros((d, d), dtype=complex)
        for r in range(d):
            v = cglmp_eigenvector(d, party, setting, r)
            m += omega(d, r) * np.outer(v, v.conj())
        return m

    return build("A", 1), build("A", 2), build("B", 1), build("B", 2)


def structural_unitaries(d: int) -> tuple[np.ndarray, ...]:
    """The building blocks (F, Y, S, M1, M2) of the basis-change unitaries.

    F is the standard discrete Fourier matrix (1/sqrt(d)) sum w**(ij) |i><j|;
    Y and M_x are diagonal phase matrices, S the index reflection
    |j> <-> |d-1-j>.
    """
    idx = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)
    y = np.diag([(-1) ** (1 - (j == 0)) * omega(d, (d - j) / 2) for j in range(d)])
    s = np.zeros((d, d), dtype=complex)
    s[idx, d - 1 - idx] = 1.0
    m1 = np.diag([omega(d, j / 4) for j in range(d)])
    m2 = np.diag([omega(d, j / 2) for j in range(d)])
    return f, y, s, m1, m2


def w1_w2(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis changes mapping (Z, T) to the CGLMP observables.

    W1 (Z, T) W1^dag = (A1', A2') and W2 (Z, T) W2^dag = (B1', B2').
    Built entrywise:

        W1[i,j] = (-1)**(1-delta_j0) w**(-i/4 + ij + j/2) / sqrt(d)
        W2[d-1-i,j] = (-1)**(1-delta_j0) w**(-i/2 + ij + j/2) / sqrt(d)

    These equal -M1^dag F Y^dag and -S M2^dag F Y^dag respectively; the
    entrywise forms carry the global sign that makes the eigenvector
    phase identities hold, so they are the canonical ones.
    """
    w1 = np.zeros((d, d), dtype=complex)
    w2 = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            sign = (-1) ** (1 - (j == 0))
            w1[i, j] = sign * omega(d, -i / 4 + i * j + j / 2) / np.sqrt(d)
            w2[d - 1 - i, j] = sign * omega(d, -i / 2 + i * j + j / 2) / np.sqrt(d)
    return w1, w2


def w_alice(d: int) -> np.ndarray:
    """The qudit-side rotation W_A = W2^T W1 carrying (Z, T) to the ideal
    Alice observables: W_A Z W_A^dag = A1 and W_A T W_A^dag = A2."""
    w1, w2 = w1_w2(d)
    return w2.T @ w1


def ideal_realization(d: int) -> Realization:
    """The canonical maximal violator: |phi_d+>, Bob = (Z, T), derived Alice pair."""
    return Realization(
        d=d,
        dims=(d, d),
        state=maximally_entangled(d),
        observables_a=ideal_alice_observables(d),
        observables_b=(z_observable(d), t_observable(d)),
    )


def cglmp_realization(d: int) -> Realization:
    """|phi_d+> measured with the CGLMP observables; also a maximal violator."""
    a1, a2, b1, b2 = cglmp_observables(d)
    return Realization(
        d=d,
        dims=(d, d),
        state=maximally_entangled(d),
        observables_a=(a1, a2),
        observables_b=(b1, b2),
    )
