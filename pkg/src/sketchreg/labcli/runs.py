"""Experiment drivers.

Every (n, trial) cell draws its randomness from
``SeedSequence([master_seed, n, trial])``, so rows do not depend on
execution order or on the number of worker threads.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..diagnostics import projection_error_features, projection_error_population
from ..errors import ConfigError
from ..estimator import RegConfig, fit, fit_linear, predict
from ..kernels import DataSet, KernelSpec, cross_gram, gram
from ..linalg import sym_eigvals
from ..sketching import make_sketch
from ..subsampling import leverage_scores_approx, leverage_scores_approx_features, nystrom_als, nystrom_uniform
from ..synthworld import NormSpec, error_norm, population_effective_dim, sample
from .config import sketch_dim
from .ingest import ingest_dataset

RATE_COLUMNS = ("n", "trial", "lambda", "m", "sketch_kind", "filter", "tau", "a",
                "error_norm", "proj_err", "eff_dim", "wall_ms")
SKETCHDIM_COLUMNS = ("m", "trial", "n", "lambda", "sketch_kind", "projection_error",
                     "error_norm", "wall_ms")
DIAGNOSE_COLUMNS = ("n", "trial", "lambda", "m", "sketch_kind", "proj_err", "proj_err_pop",
                    "bound_6lambda_ok", "bound_3lambda_ok", "eff_dim", "eff_dim_pop",
                    "score_factor", "wall_ms")
BENCH_COLUMNS = ("n", "trial", "lambda", "m", "sketch_kind", "filter", "tau", "test_mse", "wall_ms")


@dataclass
class Table:
    columns: tuple
    rows: list

    def column(self, name):
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def medians(self, x="n", y="error_norm"):
        """Sorted ``(x, median y)`` pairs."""
        groups = {}
        for xv, yv in zip(self.column(x), self.column(y)):
            groups.setdefault(xv, []).append(yv)
        return [(k, float(np.median(v))) for k, v in sorted(groups.items())]


def trial_seeds(master_seed, *key, count=3):
    """Independent 32-bit seeds for one experiment cell."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, key)])
    return [int(s) for s in ss.generate_state(count)]


def _tx_spectrum(X):
    n, d = X.shape
    small = X @ X.T if n <= d else X.T @ X
    return sym_eigvals(small / n)


def _effdim(spectrum, lam):
    s = np.clip(spectrum, 0.0, None)
    return float(np.sum(s / (s + lam)))


def default_m0(n):
    return min(n, math.ceil(4 * math.sqrt(n)))


def build_sketch(cfg, X, lam, seeds, model=None, spectrum=None, K_bar=None):
    """Return ``(G, score_factor)`` for the configured sketch kind and dimension rule.

    ``K_bar`` switches leverage scores to the Gram route (non-linear kernels).
    """
    n = X.shape[0] if K_bar is None else K_bar.shape[0]
    sk = cfg.sketch
    factor = None
    if sk.kind == "nystrom_als":
        m0 = min(sk.m0 or default_m0(n), n)
        if K_bar is None:
            scores = leverage_scores_approx_features(X, lam, m0, seed=seeds[2])
        else:
            scores = leverage_scores_approx(K_bar, lam, m0, seed=seeds[2])
        factor = scores.als_factor
        m = sketch_dim(cfg, n, lam, model, eff_dim=float(scores.scores.sum()), als_factor=factor)
        return nystrom_als(scores, m, seeds[1]), factor
    eff = None
    if sk.rule == "leverage":
        if spectrum is None:
            spectrum = sym_eigvals(K_bar) if K_bar is not None else _tx_spectrum(X)
        eff = _effdim(spectrum, lam)
    m = sketch_dim(cfg, n, lam, model, eff_dim=eff)
    if sk.kind == "nystrom_uniform":
        return nystrom_uniform(n, m, seeds[1]), factor
    return make_sketch(sk.kind, m, n, seeds[1]), factor


def _run_cells(cells, work, threads):
    if threads <= 1:
        return [work(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, cells))


def _reg(cfg, lam):
    return RegConfig(lam, cfg.filter.spec(), cfg.lambda_rule.allow_out_of_range)


def _ms(t0):
    return round((time.perf_counter() - t0) * 1000.0, 3)


def run_rates(cfg, threads=None):
    model = cfg.build_model()
    spec = cfg.filter.spec()
    norm = NormSpec(cfg.norm_a)

    def work(cell):
        n, trial = cell
        t0 = time.perf_counter()
        seeds = trial_seeds(cfg.master_seed, n, trial)
        data = sample(model, n, seeds[0])
        X = data.points
        lam = cfg.lam(n)
        G, _ = build_sketch(cfg, X, lam, seeds, model)
        res = fit_linear(X, data.labels, G, _reg(cfg, lam))
        spectrum = res.tx_eigenvalues if res.tx_eigenvalues is not None else _tx_spectrum(X)
        err = error_norm(model, res.weights, norm)
        proj = projection_error_features(X, G)
        eff = _effdim(spectrum, lam)
        return (n, trial, lam, G.m, cfg.sketch.kind, spec.family, spec.tau, cfg.norm_a,
                err, proj, eff, _ms(t0))

    cells = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    rows = _run_cells(cells, work, threads or cfg.threads)
    rows.sort(key=lambda r: (r[0], r[1]))
    return Table(RATE_COLUMNS, rows)


def run_sketchdim(cfg, threads=None):
    """Sweep ``m_grid`` at ``n = n_grid[-1]``; data are shared across ``m`` within a trial."""
    if cfg.sketch.kind == "identity":
        raise ConfigError("sketchdim needs a randomized sketch kind", "sketch.kind")
    model = cfg.build_model()
    n = cfg.n_grid[-1]
    lam = cfg.lam(n)
    norm = NormSpec(cfg.norm_a)
    for m in cfg.m_grid:
        if cfg.sketch.kind in ("nystrom_uniform", "nystrom_als", "ros_hadamard") and m > n:
            raise ConfigError(f"m={m} exceeds n={n} for {cfg.sketch.kind}", "m_grid")

    def work(cell):
        m, trial = cell
        t0 = time.perf_counter()
        seeds = trial_seeds(cfg.master_seed, n, trial)
        data = sample(model, n, seeds[0])
        X = data.points
        sk_seeds = trial_seeds(cfg.master_seed, n, trial, m)
        if cfg.sketch.kind == "nystrom_uniform":
            G = nystrom_uniform(n, m, sk_seeds[1])
        elif cfg.sketch.kind == "nystrom_als":
            scores = leverage_scores_approx_features(X, lam, min(cfg.sketch.m0 or default_m0(n), n),
                                                     seed=sk_seeds[2], verify=False)
            G = nystrom_als(scores, m, sk_seeds[1])
        else:
            G = make_sketch(cfg.sketch.kind, m, n, sk_seeds[1])
        res = fit_linear(X, data.labels, G, _reg(cfg, lam))
        return (m, trial, n, lam, cfg.sketch.kind, projection_error_features(X, G),
                error_norm(model, res.weights, norm), _ms(t0))

    cells = [(m, t) for m in cfg.m_grid for t in range(cfg.trials)]
    rows = _run_cells(cells, work, threads or cfg.threads)
    rows.sort(key=lambda r: (r[0], r[1]))
    return Table(SKETCHDIM_COLUMNS, rows)


def run_diagnose(cfg, threads=None):
    """Projection errors and effective dimensions over ``n_grid`` x ``trials``."""
    model = cfg.build_model()

    def work(cell):
        n, trial = cell
        t0 = time.perf_counter()
        seeds = trial_seeds(cfg.master_seed, n, trial)
        X = sample(model, n, seeds[0]).points
        lam = cfg.lam(n)
        spectrum = _tx_spectrum(X)
        G, factor = build_sketch(cfg, X, lam, seeds, model, spectrum)
        emp = projection_error_features(X, G)
        pop = projection_error_population(model, X, G)
        eff = _effdim(spectrum, lam)
        return (n, trial, lam, G.m, cfg.sketch.kind, emp, pop, emp <= 6 * lam, emp <= 3 * lam,
                eff, population_effective_dim(model, lam),
                factor if factor is not None else float("nan"), _ms(t0))

    cells = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    rows = _run_cells(cells, work, threads or cfg.threads)
    rows.sort(key=lambda r: (r[0], r[1]))
    return Table(DIAGNOSE_COLUMNS, rows)


def _kernel_spec(ds_cfg):
    if ds_cfg.kernel == "linear":
        return KernelSpec.linear()
    if ds_cfg.kernel == "sobolev":
        return KernelSpec.sobolev()
    return KernelSpec.gaussian(ds_cfg.bandwidth)


def split_dataset(data, test_fraction, seed):
    """Deterministic train/test split."""
    n = data.points.shape[0]
    n_test = max(1, int(round(test_fraction * n)))
    if n_test >= n:
        raise ConfigError("dataset too small for the requested test split", "dataset.test_fraction")
    perm = np.random.default_rng(seed).permutation(n)
    te, tr = perm[:n_test], perm[n_test:]
    return (DataSet(data.points[tr], data.labels[tr]), DataSet(data.points[te], data.labels[te]))


def run_bench(cfg, threads=None):
    """Held-out mean squared error on a real dataset; no rate fitting."""
    ds = cfg.dataset
    data = ingest_dataset(ds.path, ds.format, n_features=ds.n_features, header=ds.header)
    train, test = split_dataset(data, ds.test_fraction, trial_seeds(cfg.master_seed, 0, 0)[0])
    spec = _kernel_spec(ds)
    n_train = train.points.shape[0]
    if cfg.n_grid[-1] > n_train:
        raise ConfigError(f"n_grid exceeds the {n_train} training points", "n_grid")
    fspec = cfg.filter.spec()

    def work(cell):
        n, trial = cell
        t0 = time.perf_counter()
        seeds = trial_seeds(cfg.master_seed, n, trial)
        idx = np.sort(np.random.default_rng(seeds[0]).choice(n_train, size=n, replace=False))
        sub = DataSet(train.points[idx], train.labels[idx])
        lam = cfg.lam(n)
        K = gram(spec, sub)
        G, _ = build_sketch(cfg, sub.points, lam, seeds, K_bar=K / n)
        res = fit(K, sub.labels, G, _reg(cfg, lam), kernel=spec)
        pred = predict(res, cross_gram(spec, sub, test.points))
        mse = float(np.mean((pred - test.labels) ** 2))
        return (n, trial, lam, G.m, cfg.sketch.kind, fspec.family, fspec.tau, mse, _ms(t0))

    cells = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    rows = _run_cells(cells, work, threads or cfg.threads)
    rows.sort(key=lambda r: (r[0], r[1]))
    return Table(BENCH_COLUMNS, rows)


RUNNERS = {"rates": run_rates, "sketchdim": run_sketchdim, "diagnose": run_diagnose, "bench": run_bench}
