"""
Lifting a MARGINAL source model to FULL mode by constructing a consistent :math:`P_{Z|XY}`.
"""
import numpy as np
from scipy.optimize import linprog, minimize

from pyHTSecrecy.probcore import CondPmf, EveMode, Pmf, SourceModel
from pyHTSecrecy.utility.exceptions import DimensionError
from pyHTSecrecy.utility.utils import devLogger, mylog

#: Largest residual of the marginal constraints accepted for a constructed channel.
CONSTRUCTION_TOLERANCE = 1e-8


def _constraints(pyx_row, py, h0_row, h1_row):
    """Equality system ``A t = b`` for one ``x``; ``t`` is the ``(|Y|, |Z|)`` block, flattened."""
    y_size, z_size = pyx_row.size, h0_row.size
    eye_z = np.eye(z_size)
    a = np.vstack(
        [
            np.kron(pyx_row[None, :], eye_z),
            np.kron(py[None, :], eye_z),
            np.kron(np.eye(y_size), np.ones((1, z_size))),
        ]
    )
    b = np.concatenate([h0_row, h1_row, np.ones(y_size)])
    return a, b


def _solve_row(pyx_row, py, h0_row, h1_row):
    a, b = _constraints(pyx_row, py, h0_row, h1_row)
    y_size, z_size = pyx_row.size, h0_row.size
    target = np.tile(h0_row, y_size)
    if np.max(np.abs(a @ target - b)) <= CONSTRUCTION_TOLERANCE:
        return target.reshape(y_size, z_size)

    lp = linprog(
        np.zeros(a.shape[1]), A_eq=a, b_eq=b, bounds=(0.0, 1.0), method="highs"
    )
    if lp.status != 0:
        return None

    res = minimize(
        lambda t: float(np.sum((t - target) ** 2)),
        lp.x,
        jac=lambda t: 2.0 * (t - target),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * a.shape[1],
        constraints=[{"type": "eq", "fun": lambda t: a @ t - b, "jac": lambda t: a}],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    best = lp.x
    if res.success and np.max(np.abs(a @ res.x - b)) <= CONSTRUCTION_TOLERANCE:
        best = res.x
    else:
        devLogger.debug(f"Projection did not converge ({res.message}); keeping the LP point.")
    return np.clip(best, 0.0, 1.0).reshape(y_size, z_size)


def construct_full_joint(pzx_h0: CondPmf, qzx_h1: CondPmf, pyx: CondPmf, px: Pmf):
    """
    Find a :math:`P_{Z|XY}` reproducing both eavesdropper marginals.

    For every :math:`x` the block :math:`t(z|x,\\cdot)` must satisfy
    :math:`\\sum_y P_{Y|X}(y|x)t(z|x,y) = P_{Z|X}(z|x)` and
    :math:`\\sum_y P_Y(y)t(z|x,y) = Q_{Z|X}(z|x)` with stochastic rows. Feasibility is decided
    by a linear program; among feasible blocks the one closest (in squared distance) to the
    :math:`y`-independent channel :math:`P_{Z|X}` is returned.

    Parameters
    ----------
    pzx_h0, qzx_h1: CondPmf
        Eavesdropper laws under H0 and H1.
    pyx: CondPmf
        :math:`P_{Y|X}`.
    px: Pmf
        :math:`P_X`.

    Returns
    -------
    CondPmf or None
        Rows indexed by ``x * |Y| + y``; ``None`` when no consistent channel exists.
    """
    x_size, y_size = px.size, pyx.n_out
    for label, law in (("pzx_h0", pzx_h0), ("qzx_h1", qzx_h1), ("pyx", pyx)):
        if law.n_in != x_size:
            raise DimensionError(f"{label} has {law.n_in} rows, |X| = {x_size}.")
    if pzx_h0.n_out != qzx_h1.n_out:
        raise DimensionError("pzx_h0 and qzx_h1 disagree on |Z|.")

    py = px.probs @ pyx.matrix
    blocks = []
    for x in range(x_size):
        block = _solve_row(pyx.matrix[x], py, pzx_h0.matrix[x], qzx_h1.matrix[x])
        if block is None:
            mylog.info(f"No consistent P_Z|XY exists (infeasible at x={x}).")
            return None
        blocks.append(block)

    rows = np.concatenate(blocks, axis=0)
    rows = rows / rows.sum(axis=1, keepdims=True)
    return CondPmf(rows, x_size * y_size, pzx_h0.out_alphabet)


def lift_to_full(model: SourceModel):
    """
    The FULL-mode model sharing ``model``'s marginals, or ``None`` if none exists.

    FULL models are returned unchanged.
    """
    if model.is_full:
        return model
    pzxy = construct_full_joint(model.pzx_h0, model.qzx_h1, model.pyx, model.px)
    if pzxy is None:
        return None
    full = SourceModel(
        px=model.px,
        pyx=model.pyx,
        eve_mode=EveMode.FULL,
        pzxy=pzxy,
        name=f"{model.name}_full",
    )
    gap = max(
        np.max(np.abs(full.pzx_h0.matrix - model.pzx_h0.matrix)),
        np.max(np.abs(full.qzx_h1.matrix - model.qzx_h1.matrix)),
    )
    if gap > CONSTRUCTION_TOLERANCE:
        mylog.warning(f"Constructed P_Z|XY misses the marginals by {gap:.3g}; not using it.")
        return None
    mylog.info(f"Lifted {model.name} to FULL mode (marginal residual {gap:.2g}).")
    return full
