"""Random synthetic configurations satisfying the error-bound hypotheses.

Two families:

* ``fm_single``: one amplitude-modulated sinusoidal-FM component (K=1),
  moderate window width; exercises the remainder bound with nonzero
  eps1/eps3.
* ``chirp_pair``: two near-linear chirps (K=2) with strong relative IF
  separation and a tiny amplitude modulation (keeps the remainder bound
  above the quadrature floor); the window width is solved by bisection so
  the interference ceiling meets a fixed ``2*Err/A`` target.

``run_theory_checks`` measures ridge errors with sub-grid refinement and
verifies them against the bound report, checks the linear-chirp surrogate
bound at every grid node, and validates the threshold-set partition.
"""

import numpy as np

from tscr.bounds import BoundsInput, error_bounds
from tscr.ridges import SeparationParams, argmax_in_zone_refined
from tscr.signal_model import Signal
from tscr.transform import PointEvaluator, TscrGrid, WindowSpec, compute_tscr, pft_gaussian

I1 = np.sqrt(2.0 / np.pi)
I3 = 2.0 * np.sqrt(2.0 / np.pi)


class TheoryConfig:
    def __init__(self, signal, grid, window, truth, inp):
        self.signal = signal
        self.grid = grid
        self.window = window
        self.truth = truth  # dict with K, ifs(b), crs(b), x(k, b)
        self.inp_template = inp  # dict of bound-input fields except if/cr values


def make_fm_single(seed: int) -> TheoryConfig:
    rng = np.random.default_rng(seed)
    rate = 48.0
    f0 = rng.uniform(10.0, 14.0)
    depth = rng.uniform(0.3, 0.6)
    fm = rng.uniform(0.15, 0.3)
    m_am = rng.uniform(0.04, 0.1)
    f_am = rng.uniform(0.1, 0.25)
    mu = 1.0
    f_lo, f_hi = 8.0, 17.0
    delta, delta1 = 0.45, 6.0
    eps1 = 2.0 * np.pi * f_am * m_am / (1.0 - m_am)
    eps3 = 4.0 * np.pi**2 * depth * fm**3
    a2 = mu / f_lo

    def ups_of(s):
        return max(
            (2.0 * np.pi**2) ** -0.25 * np.sqrt(a2 / (s * delta)),
            1.0 / (s * np.sqrt(2.0 * np.pi * delta1)),
        )

    def pi_of(s):
        return eps1 * I1 * s + (np.pi / 3.0) * eps3 * I3 * s**3

    sigma = None
    for s in np.linspace(0.25, 0.9, 60):
        if 2.0 * (pi_of(s) + ups_of(s)) <= 0.9 and 2.0 * pi_of(s) <= 0.19:
            sigma = s
            break
    assert sigma is not None, "no feasible window width for fm_single"
    duration = 2 * 5 * sigma + 2.5
    n = int(round(duration * rate))
    t = np.arange(n) / rate
    phase0 = rng.uniform(0.0, 1.0)

    def waveform(tt):
        amp = 1.0 + m_am * np.sin(2.0 * np.pi * f_am * tt)
        ph = f0 * tt + depth / (2.0 * np.pi) * np.sin(2.0 * np.pi * fm * tt) + phase0
        return amp * np.exp(2j * np.pi * ph)

    signal = Signal(waveform(t), rate, 0.0, is_real=False)
    n_b = 8
    b_vals = np.round(np.linspace(5 * sigma + 0.1, duration - 5 * sigma - 0.1, n_b) * rate) / rate
    f_axis = np.arange(f_lo, f_hi, 0.05)
    a_vals = np.sort(mu / f_axis)
    hw = 0.616 / sigma**2
    lam_max = 2.0 * np.pi * depth * fm**2 * 1.2 + 3.0 * hw
    lam_vals = np.arange(-lam_max, lam_max + 1e-12, hw / 4.0)
    grid = TscrGrid(b_vals, a_vals, lam_vals)
    window = WindowSpec.constant(sigma)
    truth = dict(
        K=1,
        ifs=lambda b: np.array([f0 + depth * fm * np.cos(2.0 * np.pi * fm * b)]),
        crs=lambda b: np.array([-2.0 * np.pi * depth * fm**2 * np.sin(2.0 * np.pi * fm * b)]),
        x=lambda k, b: complex(waveform(np.array([b]))[0]),
        amps=(1.0,),
    )
    inp = dict(eps1=eps1, eps3=eps3, sigma=sigma, mu=mu, delta=delta, delta1=delta1,
               a1=float(a_vals[0]), a2=float(a_vals[-1]), amplitudes=(1.0,))
    return TheoryConfig(signal, grid, window, truth, inp)


def make_chirp_pair(seed: int) -> TheoryConfig:
    rng = np.random.default_rng(seed)
    rate = 64.0
    f1 = rng.uniform(8.2, 8.7)
    f2 = rng.uniform(21.0, 22.0)
    delta = 0.40
    mu = 1.0
    f_lo, f_hi = 8.0, 23.0
    a2 = mu / f_lo
    delta1 = 0.30
    # slow chirps: the IF drift over the whole record must not erode the
    # relative separation below delta
    r1 = rng.uniform(0.0004, 0.0014)
    r2 = -rng.uniform(0.0004, 0.0014)
    # target 2*Err/A = 2*(2*Pi + Ups) = 0.18 with a fixed small Pi budget
    pi_budget = 0.008
    ups_budget = 0.09 - 2.0 * pi_budget

    def ups_of(s):
        return max(
            (2.0 * np.pi**2) ** -0.25 * np.sqrt(a2 / (s * delta)),
            1.0 / (s * np.sqrt(2.0 * np.pi * delta1)),
        )

    lo, hi = 0.5, 200.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if ups_of(mid) > ups_budget:
            lo = mid
        else:
            hi = mid
    sigma = hi
    eps1 = pi_budget / (I1 * sigma)
    f_am = 0.1
    m_am = eps1 / (2.0 * np.pi * f_am + eps1)
    eps3 = 0.0
    duration = 2 * 5 * sigma + 4.0
    f1_hi = f1 + abs(r1) * duration
    f2_lo = f2 - abs(r2) * duration
    assert (f2_lo - f1_hi) / (f1_hi + f2_lo) >= delta, "separation eroded by IF drift"
    n = int(round(duration * rate))
    t = np.arange(n) / rate
    phases = rng.uniform(0.0, 1.0, 2)

    def component(k, tt):
        fc, r = (f1, f2)[k], (r1, r2)[k]
        amp = 1.0 + m_am * np.sin(2.0 * np.pi * f_am * tt)
        return amp * np.exp(2j * np.pi * (fc * tt + 0.5 * r * tt * tt + phases[k]))

    signal = Signal(component(0, t) + component(1, t), rate, 0.0, is_real=False)
    n_b = 6
    b_vals = np.round(np.linspace(5 * sigma + 0.2, duration - 5 * sigma - 0.2, n_b) * rate) / rate
    df = 0.4 / sigma
    f_axis = np.arange(f_lo, f_hi, df)
    a_vals = np.sort(mu / f_axis)
    hw = 0.616 / sigma**2
    lam_vals = np.arange(-0.05, 0.05 + 1e-12, hw / 3.0)
    grid = TscrGrid(b_vals, a_vals, lam_vals)
    window = WindowSpec.constant(sigma)
    truth = dict(
        K=2,
        ifs=lambda b: np.array([f1 + r1 * b, f2 + r2 * b]),
        crs=lambda b: np.array([r1, r2]),
        x=lambda k, b: complex(component(k, np.array([b]))[0]),
        amps=(1.0, 1.0),
    )
    inp = dict(eps1=eps1, eps3=eps3, sigma=sigma, mu=mu, delta=delta, delta1=delta1,
               a1=float(a_vals[0]), a2=float(a_vals[-1]), amplitudes=(1.0, 1.0))
    return TheoryConfig(signal, grid, window, truth, inp)


def surrogate_volume(cfg: TheoryConfig):
    """Closed-form linear-chirp surrogate of the transform on cfg's grid."""
    grid, sigma, mu = cfg.grid, cfg.inp_template["sigma"], cfg.inp_template["mu"]
    out = np.zeros((grid.b_values.size, grid.a_values.size, grid.lambda_values.size), complex)
    for bi, b in enumerate(grid.b_values):
        ifs = cfg.truth["ifs"](b)
        crs = cfg.truth["crs"](b)
        for k in range(cfg.truth["K"]):
            eta = sigma * (mu / grid.a_values - ifs[k])
            lamt = sigma**2 * (grid.lambda_values - crs[k])
            out[bi] += cfg.truth["x"](k, b) * pft_gaussian(eta[:, None], lamt[None, :])
    return out


def run_theory_checks(cfg: TheoryConfig):
    """All bound/partition checks for one configuration.

    Returns a dict of measured maxima (each must stay at or below 1.0 for
    the ratio entries, True for the flags).
    """
    grid, window = cfg.grid, cfg.window
    sigma, mu = cfg.inp_template["sigma"], cfg.inp_template["mu"]
    volume = compute_tscr(cfg.signal, grid, window)
    k_comp = cfg.truth["K"]

    surrogate = surrogate_volume(cfg)
    resid = np.abs(volume.values - surrogate)
    m_total = sum(cfg.truth["amps"])
    b0 = float(grid.b_values[0])
    inp = BoundsInput(
        if_values=tuple(cfg.truth["ifs"](b0)),
        cr_values=tuple(cfg.truth["crs"](b0) + 1e-12),
        **cfg.inp_template,
    )
    report = error_bounds(inp)
    lemma1_ratio = float(resid.max() / (m_total * report.pi_value))

    evaluator = PointEvaluator(cfg.signal, window)
    lo, hi = report.eps_tilde_window
    threshold = 0.5 * (lo + hi)
    params = SeparationParams(inp.delta, inp.delta1, threshold)

    bd_ratios = np.zeros(3)
    partition_ok = True
    disjoint_ok = True
    nonempty_ok = True
    for bi, b in enumerate(grid.b_values):
        ifs = cfg.truth["ifs"](b)
        crs = cfg.truth["crs"](b)
        zones = []
        for k in range(k_comp):
            in_zone_a = np.abs(mu - grid.a_values * ifs[k]) < inp.delta
            in_zone_l = np.abs(grid.lambda_values - crs[k]) < inp.delta1
            zones.append(np.logical_and(in_zone_a[:, None], in_zone_l[None, :]))
        above = np.abs(volume.values[bi]) > threshold
        union = np.zeros_like(above)
        for k in range(k_comp):
            if not np.any(above & zones[k]):
                nonempty_ok = False
            union |= zones[k]
        if np.any(above & ~union):
            partition_ok = False
        for k in range(k_comp):
            for k2 in range(k + 1, k_comp):
                if np.any(zones[k] & zones[k2]):
                    disjoint_ok = False
        for k in range(k_comp):
            a_ref, lam_ref, u_ref = argmax_in_zone_refined(
                volume, bi, (mu / ifs[k], crs[k]), params, evaluator, mu=mu
            )
            bd_ratios[0] = max(bd_ratios[0], abs(mu / a_ref - ifs[k]) / report.bd1[k])
            bd_ratios[1] = max(bd_ratios[1], abs(lam_ref - crs[k]) / report.bd2[k])
            bd_ratios[2] = max(bd_ratios[2], abs(u_ref - cfg.truth["x"](k, b)) / report.bd3[k])

    return dict(
        hypothesis_ok=all(report.hypothesis_ok),
        theorem1_ok=report.theorem1_condition_ok,
        lemma1_ratio=lemma1_ratio,
        bd1_ratio=float(bd_ratios[0]),
        bd2_ratio=float(bd_ratios[1]),
        bd3_ratio=float(bd_ratios[2]),
        partition_ok=partition_ok,
        disjoint_ok=disjoint_ok,
        nonempty_ok=nonempty_ok,
    )
