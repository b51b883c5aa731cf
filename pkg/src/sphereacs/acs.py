"""Pointwise orthogonal almost complex structures on the product tangent space.

An orthogonal almost complex structure (OACS) at a point is a real matrix J
on R^total_dim with J^T J = I and J^2 = -I; skewness J^T = -J follows.  The
factor splitting induces a block decomposition: ``block(a, b)`` is the plain
matrix block (rows of factor a, columns of factor b), which maps factor-b
frame vectors to factor-a components.  The mapping coefficients
``<J e(a)_i, e(b)_j>`` used by the component audits are the transposed layout
``coefficient_block(a, b) = block(b, a).T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import ContractViolation, InvalidManifold
from .manifold import ProductManifold
from .report import AuditReport


@dataclass(frozen=True)
class OrthogonalACS:
    """A pointwise orthogonal almost complex structure as a square matrix."""

    manifold: ProductManifold
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = self.manifold.total_dim
        if m.shape != (n, n):
            raise ContractViolation(f"ACS matrix must be {n}x{n}, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)

    def __call__(self, v) -> np.ndarray:
        return self.apply(v)

    def block(self, a: int, b: int) -> np.ndarray:
        """The dim_a x dim_b submatrix at the block offsets (rows a, cols b)."""
        man = self.manifold
        return self.matrix[man.block_slice(a), man.block_slice(b)]

    def coefficient_block(self, a: int, b: int) -> np.ndarray:
        """Array of mapping coefficients c[i, j] = <J e(a)_i, e(b)_j>."""
        return self.block(b, a).T

    def off_block_mass(self) -> float:
        """Max |entry| over all off-factor blocks (0.0 for block-diagonal J)."""
        man = self.manifold
        mass = 0.0
        for a in range(man.n_factors):
            for b in range(man.n_factors):
                if a != b:
                    blk = self.block(a, b)
                    if blk.size:
                        mass = max(mass, float(np.max(np.abs(blk))))
        return mass


def validate_acs(J: OrthogonalACS, tol: float = TOL.acs_validity) -> AuditReport:
    """Check orthogonality, J^2 = -I, skewness and the two block relations.

    The block relations are consequences of the first three; they are checked
    independently so a failure localises to the offending block pair.
    """
    m = J.matrix
    n = J.manifold.total_dim
    eye = np.eye(n)
    report = AuditReport(f"ACS validity on {J.manifold.describe()}")
    report.add(
        "orthogonality",
        float(np.max(np.abs(m.T @ m - eye))),
        0.0,
        tol,
        "max |J^T J - I| == 0",
    )
    report.add(
        "square",
        float(np.max(np.abs(m @ m + eye))),
        0.0,
        tol,
        "max |J^2 + I| == 0",
    )
    report.add(
        "skewness",
        float(np.max(np.abs(m.T + m))),
        0.0,
        tol,
        "max |J^T + J| == 0",
    )
    man = J.manifold
    block_skew = 0.0
    for a in range(man.n_factors):
        for b in range(man.n_factors):
            block_skew = max(block_skew, float(np.max(np.abs(J.block(a, b) + J.block(b, a).T))))
    report.add(
        "block-skew",
        block_skew,
        0.0,
        tol,
        "block(a,b) + block(b,a)^T == 0 for all factor pairs",
    )
    block_comp = 0.0
    for a in range(man.n_factors):
        for d in range(man.n_factors):
            acc = np.zeros((man.factors[a].dim, man.factors[d].dim))
            for c in range(man.n_factors):
                acc += J.block(a, c) @ J.block(c, d)
            target = -eye[man.block_slice(a), man.block_slice(d)]
            block_comp = max(block_comp, float(np.max(np.abs(acc - target))))
    report.add(
        "block-composition",
        block_comp,
        0.0,
        tol,
        "sum_c block(a,c) block(c,d) == -delta_ad I for all factor pairs",
    )
    return report


def is_valid_acs(J: OrthogonalACS, tol: float = TOL.acs_validity) -> bool:
    return validate_acs(J, tol).passed


ROTATION_2x2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def standard_rotation_structure(dim: int) -> np.ndarray:
    """Block-diagonal matrix of 2x2 rotations [[0,-1],[1,0]] on R^dim."""
    if dim < 2 or dim % 2 != 0:
        raise ContractViolation(f"need an even dimension >= 2, got {dim}")
    m = np.zeros((dim, dim))
    for k in range(0, dim, 2):
        m[k : k + 2, k : k + 2] = ROTATION_2x2
    return m


def canonical_product_acs(manifold: ProductManifold) -> OrthogonalACS:
    """The product of the per-factor rotations on a product of 2-spheres."""
    if any(f.dim != 2 for f in manifold.factors):
        raise InvalidManifold(
            "the canonical product structure needs every factor to be a 2-sphere"
        )
    return OrthogonalACS(manifold, standard_rotation_structure(manifold.total_dim))


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix from QR of a Gaussian sample, diagonal sign-fixed so
    the distribution is well defined (Haar on the full orthogonal group)."""
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.where(np.diag(r) >= 0, 1.0, -1.0)
    return q * signs[np.newaxis, :]


def random_orthogonal_acs(manifold: ProductManifold, seed: int) -> OrthogonalACS:
    """J = Q J0 Q^T for a seeded Haar-orthogonal Q and the standard block
    rotation J0; deterministic in the seed."""
    n = manifold.total_dim
    rng = np.random.default_rng(seed)
    q = haar_orthogonal(n, rng)
    j0 = standard_rotation_structure(n)
    return OrthogonalACS(manifold, q @ j0 @ q.T)


def random_block_diagonal_acs(manifold: ProductManifold, seed: int) -> OrthogonalACS:
    """Independent seeded OACS on each factor block, assembled block-diagonally."""
    n = manifold.total_dim
    m = np.zeros((n, n))
    for a, (f, sl) in enumerate(zip(manifold.factors, manifold.block_slices)):
        rng = np.random.default_rng([seed, a])
        q = haar_orthogonal(f.dim, rng)
        m[sl, sl] = q @ standard_rotation_structure(f.dim) @ q.T
    return OrthogonalACS(manifold, m)


def swap_acs(manifold: ProductManifold) -> OrthogonalACS:
    """The factor-exchanging structure e(1)_i -> e(2)_i, e(2)_i -> -e(1)_i on
    a product of exactly two equal-dimension factors; every diagonal block is
    zero, which makes it the canonical probe for factor-mixing behaviour."""
    if manifold.n_factors != 2:
        raise InvalidManifold("swap structure needs exactly two factors")
    d1, d2 = (f.dim for f in manifold.factors)
    if d1 != d2:
        raise InvalidManifold(f"swap structure needs equal factor dimensions, got {d1} != {d2}")
    n = manifold.total_dim
    m = np.zeros((n, n))
    s1, s2 = manifold.block_slices
    m[s2, s1] = np.eye(d1)
    m[s1, s2] = -np.eye(d1)
    return OrthogonalACS(manifold, m)


def acs_to_text(J: OrthogonalACS) -> str:
    """Plain-text row-major serialisation: header line with total_dim, then
    one whitespace-separated row per line at 17 significant digits."""
    lines = [str(J.manifold.total_dim)]
    for row in J.matrix:
        lines.append(" ".join(format(v, ".17g") for v in row))
    return "\n".join(lines) + "\n"


def acs_from_text(manifold: ProductManifold, text: str) -> OrthogonalACS:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ContractViolation("empty ACS serialisation")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ContractViolation(f"bad ACS header line: {lines[0]!r}") from exc
    if n != manifold.total_dim:
        raise ContractViolation(
            f"serialised dimension {n} does not match manifold total_dim {manifold.total_dim}"
        )
    if len(lines) != n + 1:
        raise ContractViolation(f"expected {n} matrix rows, got {len(lines) - 1}")
    try:
        rows = [np.array([float(tok) for tok in ln.split()]) for ln in lines[1:]]
    except ValueError as exc:
        raise ContractViolation(f"unparseable matrix entry: {exc}") from exc
    if any(r.shape != (n,) for r in rows):
        raise ContractViolation("matrix row with wrong number of entries")
    return OrthogonalACS(manifold, np.vstack(rows))
