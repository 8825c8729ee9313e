"""Monte Carlo simulation of household wealth under firm-level shocks.

Absolute-wealth runs step every household through realized firm payoffs:
each firm's production over a step is a random multiple of its inputs,
factor payments are proportional to the realized shock, flat taxes are
collected on realized incomes and redistributed equally, and households
save a fixed share of what remains.  Relative-wealth runs follow wealth
divided by its growing mean along a sustained-growth path.

Randomness is counter-based: step n of a run draws from a dedicated
Philox stream keyed by (seed, n), so trajectories are reproducible and
independent of how the work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DegenerateDynamicsError,
    DomainError,
    NonFiniteError,
    PriceUndefinedError,
)
from .network import AllocationNetwork
from .params import EconomyParams, ProductionFunction

__all__ = [
    "SimulationConfig",
    "WealthPanel",
    "sample_firm_shocks",
    "step_absolute",
    "run_absolute",
    "run_relative_growth",
    "integrate_mean_field",
    "empirical_noise_covariance",
    "analytic_noise_covariance",
]

FIRM_SHOCKS = "firm_shocks"
DIRECT_COVARIANCE = "direct_covariance"
MILSTEIN = "milstein"
EULER = "euler_maruyama"


@dataclass(frozen=True)
class SimulationConfig:
    """Time stepping and recording plan for a run.

    Snapshots are recorded at ``burn_in, burn_in + record_every, ...``
    up to ``t_end``; all three must be multiples of ``dt``.
    """

    dt: float
    t_end: float
    burn_in: float = 0.0
    record_every: float = 1.0
    seed: int = 0
    noise_model: str = FIRM_SHOCKS
    scheme: str = MILSTEIN
    labor_deterministic: bool = False

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not 0.0 <= self.burn_in < self.t_end:
            raise ConfigError(
                f"need 0 <= burn_in < t_end, got burn_in={self.burn_in} t_end={self.t_end}")
        if not self.record_every > 0.0:
            raise ConfigError(f"record_every must be positive, got {self.record_every}")
        if self.noise_model not in (FIRM_SHOCKS, DIRECT_COVARIANCE):
            raise ConfigError(f"unknown noise model {self.noise_model!r}")
        if self.scheme not in (MILSTEIN, EULER):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        for name in ("t_end", "burn_in", "record_every"):
            steps = getattr(self, name) / self.dt
            if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
                raise ConfigError(f"{name}={getattr(self, name)} is not a multiple of dt={self.dt}")

    def step_counts(self) -> tuple[int, int, int]:
        return (int(round(self.t_end / self.dt)),
                int(round(self.burn_in / self.dt)),
                max(1, int(round(self.record_every / self.dt))))


@dataclass(frozen=True)
class WealthPanel:
    """Recorded snapshots of a run.

    times      (n_snapshots,) recording times
    snapshots  (n_snapshots, n_households) wealth levels
    kind       'absolute' or 'relative'
    metadata   full echo of the inputs that produced the panel
    """

    times: np.ndarray
    snapshots: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    def mean_path(self) -> np.ndarray:
        return self.snapshots.mean(axis=1)

    def pooled(self) -> np.ndarray:
        return self.snapshots.ravel()

    def final(self) -> np.ndarray:
        return self.snapshots[-1]

    def to_csv(self, path):
        """Long-form CSV ``t,household_id,wealth`` at full precision."""
        n_snap, n_h = self.snapshots.shape
        with open(path, "w") as fh:
            fh.write("t,household_id,wealth\n")
            for t, row in zip(self.times, self.snapshots):
                for i in range(n_h):
                    fh.write(f"{t:.17g},{i},{row[i]:.17g}\n")


def _stream(seed: int, step: int) -> np.random.Generator:
    # one Philox block of 2**192 draws per step index: streams never overlap
    counter = np.zeros(4, dtype=np.uint64)
    counter[3] = np.uint64(step)
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=counter))


def sample_firm_shocks(n_firms: int, params: EconomyParams, dt: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Realized production per unit input for each firm over one step.

    Mean ``a * dt``, variance ``a**2 * delta * dt``, independent across
    firms and steps.  With ``delta = 0`` the draw is exactly the mean.
    """
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    mean = params.a * dt
    if params.delta == 0.0:
        return np.full(n_firms, mean)
    return mean + params.a * math.sqrt(params.delta * dt) * rng.standard_normal(n_firms)


def _firm_shock_increment(p, params, net, gval, gslope, lam, shocks, dt,
                          labor_deterministic, l_firm):
    """One-step wealth change given realized firm shocks.

    Factor payments scale with the realized shock of each firm a
    household is exposed to; taxes apply to realized incomes and the
    proceeds return as an equal per-household transfer.
    """
    n, f = net.n_households, net.n_firms
    wage_unit = gval - lam * gslope
    mean_flow = params.a * dt
    uniform_invest = net.invest_spread == f
    uniform_labor = net.labor_spread == f

    if shocks is None:
        cap_in = gslope * p * mean_flow
        lab_in = wage_unit * mean_flow
        pool = (params.tau_k * gslope * p.sum()
                + params.tau_l * wage_unit * n) * mean_flow
    else:
        shock_mean = shocks.mean()
        cap_flow = shock_mean if uniform_invest else net.invest @ shocks
        cap_in = gslope * p * cap_flow
        if labor_deterministic:
            lab_in = wage_unit * mean_flow
            lab_pool = params.tau_l * wage_unit * n * mean_flow
        else:
            lab_flow = shock_mean if uniform_labor else net.labor @ shocks
            lab_in = wage_unit * lab_flow
            lab_pool = params.tau_l * wage_unit * (
                n * shock_mean if uniform_labor else l_firm @ shocks)
        cap_pool = params.tau_k * gslope * (
            p.sum() * shock_mean if uniform_invest else (net.invest.T @ p) @ shocks)
        pool = cap_pool + lab_pool

    return (params.s * ((1.0 - params.tau_k) * cap_in
                        + (1.0 - params.tau_l) * lab_in + pool / n)
            - (params.chi + params.nu * p) * dt)


def step_absolute(state, params: EconomyParams, net: AllocationNetwork,
                  pf: ProductionFunction, shocks, dt: float,
                  labor_deterministic: bool = False) -> np.ndarray:
    """Advance absolute wealth by one step under given firm shocks."""
    p = np.asarray(state, dtype=float)
    if p.shape != (net.n_households,):
        raise DomainError(f"state must have length {net.n_households}")
    lam = p.mean()
    if not lam > 0.0:
        raise PriceUndefinedError(f"mean wealth {lam} is not positive")
    gval = pf.value(lam)
    gslope = pf.derivative(lam)
    l_firm = net.firm_labor()
    return p + _firm_shock_increment(p, params, net, gval, gslope, lam,
                                     None if shocks is None else np.asarray(shocks, float),
                                     dt, labor_deterministic, l_firm)


def analytic_noise_covariance(params: EconomyParams, net: AllocationNetwork,
                              pf: ProductionFunction, wealth,
                              labor_deterministic: bool = False) -> np.ndarray:
    """Per-unit-time covariance of the wealth noise at a frozen state.

    The entries combine pairwise portfolio overlaps weighted by wealth
    and labor exposures, the covariance of each household's income with
    the common redistribution transfer, and the variance of the transfer
    itself.  With deterministic labor income only the capital channels
    remain.
    """
    p = np.asarray(wealth, dtype=float)
    n = net.n_households
    lam = p.mean()
    if not lam > 0.0:
        raise PriceUndefinedError(f"mean wealth {lam} is not positive")
    rho = params.a * pf.derivative(lam)
    omega = params.a * (pf.value(lam) - lam * pf.derivative(lam))
    ov = net.overlaps()
    ck = 1.0 - params.tau_k
    cl = 1.0 - params.tau_l
    base = params.delta * params.s ** 2

    H = ck ** 2 * rho ** 2 * np.outer(p, p) * ov.invest
    if labor_deterministic:
        transfer_rate = params.tau_k * rho
        agg = ck * rho * p * (ov.invest @ p)
    else:
        H = H + cl ** 2 * omega ** 2 * ov.labor
        cross = p[:, None] * ov.cross
        H = H + ck * cl * rho * omega * (cross + cross.T)
        transfer_rate = params.tau_k * rho + params.tau_l * omega / lam
        agg = ck * rho * p * (ov.invest @ p) + cl * omega * (ov.cross @ p)
    H = H + (transfer_rate / n) * (agg[:, None] + agg[None, :])
    k = net.firm_capital(p)
    H = H + (transfer_rate / n) ** 2 * np.sum(k * k)
    return base * H


def empirical_noise_covariance(params: EconomyParams, net: AllocationNetwork,
                               pf: ProductionFunction, wealth, n_samples: int,
                               dt: float = 0.01, seed: int = 0,
                               labor_deterministic: bool = False):
    """Sampled covariance of one-step increments at a frozen wealth state.

    Draws ``n_samples`` independent shock vectors, forms the one-step
    increments without ever moving the state, and returns the increment
    covariance divided by dt next to its analytic counterpart.
    """
    p = np.asarray(wealth, dtype=float)
    n, f = net.n_households, net.n_firms
    if n_samples < 2:
        raise DomainError("need at least two samples for a covariance")
    lam = p.mean()
    if not lam > 0.0:
        raise PriceUndefinedError(f"mean wealth {lam} is not positive")
    gval = pf.value(lam)
    gslope = pf.derivative(lam)
    wage_unit = gval - lam * gslope
    l_firm = net.firm_labor()
    k = net.firm_capital(p)
    mean_flow = params.a * dt

    increments = np.empty((n_samples, n))
    chunk = max(1, (1 << 22) // max(f, 1))
    start = 0
    block = 0
    while start < n_samples:
        stop = min(start + chunk, n_samples)
        gen = _stream(seed, block)
        if params.delta == 0.0:
            shocks = np.full((stop - start, f), mean_flow)
        else:
            shocks = mean_flow + params.a * math.sqrt(params.delta * dt) \
                * gen.standard_normal((stop - start, f))
        cap_flow = (net.invest @ shocks.T).T
        cap_in = gslope * p[None, :] * cap_flow
        if labor_deterministic:
            lab_in = wage_unit * mean_flow
            lab_pool = params.tau_l * wage_unit * n * mean_flow
        else:
            lab_in = wage_unit * (net.labor @ shocks.T).T
            lab_pool = params.tau_l * wage_unit * (shocks @ l_firm)[:, None]
        cap_pool = params.tau_k * gslope * (shocks @ k)[:, None]
        increments[start:stop] = (params.s * ((1.0 - params.tau_k) * cap_in
                                              + (1.0 - params.tau_l) * lab_in
                                              + (cap_pool + lab_pool) / n)
                                  - (params.chi + params.nu * p)[None, :] * dt)
        start = stop
        block += 1

    empirical = np.cov(increments, rowvar=False) / dt
    analytic = analytic_noise_covariance(params, net, pf, p,
                                         labor_deterministic=labor_deterministic)
    return empirical, analytic


def _panel_metadata(config, params, pf, extra=None):
    meta = {
        "config": asdict(config),
        "params": asdict(params),
        "production": {"kind": type(pf).__name__, **asdict(pf)},
    }
    if extra:
        meta.update(extra)
    return meta


def run_absolute(config: SimulationConfig, params: EconomyParams,
                 net: AllocationNetwork, pf: ProductionFunction,
                 initial) -> WealthPanel:
    """Simulate absolute wealth for every household.

    Prices are recomputed from current mean wealth each step.  The run
    aborts if mean wealth turns non-positive or any state stops being
    finite; both errors carry the offending step index.
    """
    p = np.array(initial, dtype=float)
    n, f = net.n_households, net.n_firms
    if p.shape != (n,):
        raise DomainError(f"initial state must have length {n}")
    lam0 = p.mean()
    if not lam0 > 0.0:
        raise PriceUndefinedError(f"initial mean wealth {lam0} is not positive")
    rho0 = params.a * pf.derivative(lam0)
    if params.s * (1.0 - params.tau_k) * rho0 * config.dt >= 0.1:
        raise ConfigError(
            f"dt={config.dt} too coarse: s*(1-tau_k)*return*dt = "
            f"{params.s * (1.0 - params.tau_k) * rho0 * config.dt:.3g} >= 0.1")

    steps_total, burn_steps, rec_steps = config.step_counts()
    l_firm = net.firm_labor()
    direct = config.noise_model == DIRECT_COVARIANCE
    times, snaps = [], []
    if burn_steps == 0:
        times.append(0.0)
        snaps.append(p.copy())

    for step in range(1, steps_total + 1):
        lam = p.mean()
        if not lam > 0.0:
            raise PriceUndefinedError(
                f"mean wealth {lam} became non-positive at step {step}", step=step)
        gval = pf.value(lam)
        gslope = pf.derivative(lam)
        gen = _stream(config.seed, step)
        if direct:
            rho = params.a * gslope
            omega = params.a * (gval - lam * gslope)
            drift = (params.s * ((1.0 - params.tau_k) * rho * p
                                 + (1.0 - params.tau_l) * omega
                                 + params.tau_k * rho * lam + params.tau_l * omega)
                     - params.chi - params.nu * p)
            cov = analytic_noise_covariance(params, net, pf, p,
                                            labor_deterministic=config.labor_deterministic)
            vals, vecs = np.linalg.eigh(cov)
            root = vecs * np.sqrt(np.clip(vals, 0.0, None))
            p = p + drift * config.dt + math.sqrt(config.dt) * (root @ gen.standard_normal(n))
        else:
            shocks = sample_firm_shocks(f, params, config.dt, gen) \
                if params.delta > 0.0 else None
            p = p + _firm_shock_increment(p, params, net, gval, gslope, lam, shocks,
                                          config.dt, config.labor_deterministic, l_firm)
        if not np.all(np.isfinite(p)):
            raise NonFiniteError(f"state stopped being finite at step {step}", step=step)
        if step >= burn_steps and (step - burn_steps) % rec_steps == 0:
            times.append(step * config.dt)
            snaps.append(p.copy())

    return WealthPanel(
        times=np.array(times),
        snapshots=np.array(snaps),
        kind="absolute",
        metadata=_panel_metadata(config, params, pf, {
            "network": {"n_households": n, "n_firms": f,
                        "invest_spread": net.invest_spread,
                        "labor_spread": net.labor_spread},
        }),
    )


def run_relative_growth(config: SimulationConfig, params: EconomyParams,
                        invest_overlap_mean: float, capital_return: float,
                        initial) -> WealthPanel:
    """Simulate wealth relative to the growing mean along a growth path.

    Relative wealth reverts to 1 at rate ``s * return * tau_k`` and
    carries multiplicative noise with variance rate
    ``delta * s**2 * (1-tau_k)**2 * return**2 * overlap``.  Without
    capital taxation there is nothing to revert to and the run refuses.
    """
    if params.tau_k == 0.0:
        raise DegenerateDynamicsError(
            "tau_k = 0: relative wealth only spreads out; no stationary run exists")
    if capital_return <= 0.0 or invest_overlap_mean <= 0.0:
        raise DomainError("capital return and overlap must be positive")
    u = np.array(initial, dtype=float)
    if np.any(u <= 0.0):
        raise DomainError("initial relative wealth must be positive")
    if abs(u.mean() - 1.0) > 1e-8:
        raise DomainError(f"initial relative wealth must average 1, got {u.mean()!r}")

    revert = params.s * capital_return * params.tau_k
    sigma = math.sqrt(params.delta) * params.s * (1.0 - params.tau_k) \
        * capital_return * math.sqrt(invest_overlap_mean)
    if revert * config.dt >= 0.5 or sigma * sigma * config.dt >= 1.0:
        raise ConfigError("dt too coarse for the reversion or noise scale")
    milstein = config.scheme == MILSTEIN

    def advance(u_sub, dt_sub, gen, depth=0):
        sq = math.sqrt(dt_sub)
        for _ in range(10):
            dw = sq * gen.standard_normal(u_sub.shape[0])
            prop = u_sub + revert * (1.0 - u_sub) * dt_sub + sigma * u_sub * dw
            if milstein:
                prop += 0.5 * sigma * sigma * u_sub * (dw * dw - dt_sub)
            bad = prop <= 0.0
            if not bad.any():
                return prop
        if depth >= 5:
            raise NonFiniteError("relative wealth kept hitting zero despite step halving")
        half = advance(u_sub, 0.5 * dt_sub, gen, depth + 1)
        return advance(half, 0.5 * dt_sub, gen, depth + 1)

    steps_total, burn_steps, rec_steps = config.step_counts()
    times, snaps = [], []
    if burn_steps == 0:
        times.append(0.0)
        snaps.append(u.copy())
    for step in range(1, steps_total + 1):
        gen = _stream(config.seed, step)
        u = advance(u, config.dt, gen)
        if not np.all(np.isfinite(u)):
            raise NonFiniteError(f"state stopped being finite at step {step}", step=step)
        if step >= burn_steps and (step - burn_steps) % rec_steps == 0:
            times.append(step * config.dt)
            snaps.append(u.copy())

    return WealthPanel(
        times=np.array(times),
        snapshots=np.array(snaps),
        kind="relative",
        metadata={
            "config": asdict(config),
            "params": asdict(params),
            "capital_return": capital_return,
            "invest_overlap_mean": invest_overlap_mean,
        },
    )


def integrate_mean_field(params: EconomyParams, pf: ProductionFunction,
                         initial_mean: float, t_end: float, dt: float):
    """Classic fourth-order Runge-Kutta path of mean wealth.

    Integrates ``dp/dt = s*a*g(p) - chi - nu*p`` and returns the time
    grid and the trajectory.  Taxes never enter: redistribution cancels
    in the aggregate.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise DomainError("t_end and dt must be positive")
    steps = int(round(t_end / dt))
    if abs(steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise DomainError(f"t_end={t_end} is not a multiple of dt={dt}")
    if not initial_mean > 0.0:
        raise PriceUndefinedError(f"initial mean wealth {initial_mean} is not positive")

    def f(p):
        if not p > 0.0:
            raise PriceUndefinedError(f"mean wealth {p} left the positive domain")
        return params.s * params.a * pf.value(p) - params.chi - params.nu * p

    times = np.linspace(0.0, steps * dt, steps + 1)
    path = np.empty(steps + 1)
    path[0] = p = initial_mean
    for i in range(1, steps + 1):
        k1 = f(p)
        k2 = f(p + 0.5 * dt * k1)
        k3 = f(p + 0.5 * dt * k2)
        k4 = f(p + dt * k3)
        p = p + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        path[i] = p
    return times, path
