"""Command-line driver: ``casimir-restrict <subcommand> [--config FILE] [flags]``.

Settings come from built-in defaults, then the ``[run]`` section of an INI
file, then command-line flags.  Every artifact carries the SHA-256 of the
canonical config (output location and worker count excluded, since they do
not change results).  Exit status: 0 when every checked invariant holds,
1 when one fails (named on stderr), 2 for an invalid configuration.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, matcoef, sphere, testfn, triple_kernel
from .circle_model import RepParameter
from .mobius import IDENTITY, GroupElement, diagonal, map_bound

SUBCOMMANDS = ("matcoef", "airy-check", "kernel", "testfn", "chain", "restrict", "sphere")
OUT_ENV = "CASIMIR_RESTRICT_OUT"
_UNHASHED = ("out", "workers")


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


class InvariantFailure(RuntimeError):
    """A checked invariant did not hold (exit status 1)."""


@dataclass
class RunConfig:
    subcommand: str
    # representation
    lam_imag: float = 2.0
    eps: int = 0
    weight: int | None = None
    # geometry: g = a(r) unless explicit entries are given ("identity" allowed via r = 0)
    r: float = 1.0
    g: list | None = None
    # grids
    ns: list = field(default_factory=lambda: [64, 128, 256])
    k_max: int | None = None
    taus: list = field(default_factory=lambda: [0.0, 1.0, 2.5, 5.0, 10.0])
    cs: list = field(default_factory=lambda: [0.1, 0.35, 0.6, 0.9, 1.3])
    N: int = 128
    T: int = 26
    # synthetic data
    height: float = 200.0
    density: float = bounds.WEYL_DENSITY
    a: float = 1.0
    b: float = 1.0
    seed: int = 0
    level: float = 0.4
    mode: str = "independent"
    chain_eps: float = 0.1
    sequence: str = "lindelof"
    seq_A: float = 2.0
    # sphere
    l_max: int = 400
    l_min: int = 50
    l_step: int = 10
    # tolerances
    tol: float = 1e-7
    growth_max: float = 0.2
    # output
    out: str = ""
    workers: int = 1

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.eps not in (0, 1):
            raise ConfigError("eps must be 0 or 1")
        if self.weight is not None and (self.weight < 2 or self.weight % 2):
            raise ConfigError("weight must be an even integer >= 2")
        if self.g is not None and len(self.g) != 4:
            raise ConfigError("g needs four entries a,b,c,d")
        if any(int(n) != n or n % 2 or n == 0 for n in self.ns):
            raise ConfigError("ns must be nonzero even integers")
        if self.k_max is not None and (self.k_max < 2 or self.k_max % 2):
            raise ConfigError("k_max must be an even integer >= 2")
        if any(t < 0 for t in self.taus):
            raise ConfigError("taus are |tau| values and must be nonnegative")
        if not 1 <= self.T <= self.N:
            raise ConfigError(f"need 1 <= T <= N, got N={self.N}, T={self.T}")
        if self.mode not in bounds.MODES:
            raise ConfigError(f"mode must be one of {bounds.MODES}")
        if self.sequence not in ("lindelof", "heavy", "zero"):
            raise ConfigError("sequence must be lindelof, heavy or zero")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.l_min % 2 or self.l_step % 2 or self.l_max < self.l_min:
            raise ConfigError("sphere grid needs even l_min, even l_step and l_max >= l_min")
        for name in ("height", "tol"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        for name in ("density", "a", "b", "level", "chain_eps"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")

    def hashed(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in _UNHASHED}

    def config_hash(self) -> str:
        blob = json.dumps(self.hashed(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def group_element(self) -> GroupElement:
        if self.g is not None:
            return GroupElement(*self.g)
        return IDENTITY if self.r == 0 else diagonal(self.r)

    @property
    def rep(self) -> RepParameter:
        return RepParameter.principal(self.lam_imag, self.eps)


# ---------------------------------------------------------------- config plumbing

_LIST_FIELDS = {"g": float, "ns": int, "taus": float, "cs": float}
_INT_FIELDS = {"eps", "weight", "k_max", "N", "T", "seed", "l_max", "l_min", "l_step", "workers"}
_STR_FIELDS = {"mode", "sequence", "out", "subcommand"}


def _convert(name: str, raw):
    if raw is None:
        return None
    if name in _LIST_FIELDS:
        if isinstance(raw, (list, tuple)):
            return [_LIST_FIELDS[name](v) for v in raw]
        text = str(raw).strip()
        if text.lower() in ("", "none"):
            return None if name == "g" else []
        return [_LIST_FIELDS[name](v) for v in text.split(",") if v.strip()]
    if name in _STR_FIELDS:
        return str(raw)
    if isinstance(raw, str) and raw.strip().lower() == "none":
        return None
    try:
        if name in _INT_FIELDS:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-restrict", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file with a [run] section")
        for f in fields(RunConfig):
            if f.name == "subcommand":
                continue
            p.add_argument(_flag(f.name), dest=f.name, default=None)
    return parser


def load_config(argv) -> RunConfig:
    """Parse argv into a validated RunConfig (raises ConfigError)."""
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        ini = configparser.ConfigParser()
        ini.optionxform = str
        if not ini.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        if "run" not in ini:
            raise ConfigError("config file needs a [run] section")
        known = {f.name for f in fields(RunConfig)} - {"subcommand"}
        for key, raw in ini["run"].items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _convert(key, raw)
    for f in fields(RunConfig):
        raw = getattr(args, f.name, None)
        if f.name != "subcommand" and raw is not None:
            values[f.name] = _convert(f.name, raw)
    cfg = RunConfig(subcommand=args.subcommand, **values)
    if not cfg.out:
        cfg.out = os.environ.get(OUT_ENV, "casimir_out")
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- artifacts

class Artifacts:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.digest = cfg.config_hash()
        self.dir = Path(cfg.out)
        self.written: list[Path] = []

    def _path(self, suffix: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        return self.dir / f"{self.cfg.subcommand}{suffix}"

    def csv(self, header: list, rows, suffix: str = ".csv"):
        buf = io.StringIO()
        buf.write(f"# config_sha256={self.digest}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        path = self._path(suffix)
        path.write_text(buf.getvalue())
        self.written.append(path)

    def json(self, report: dict, suffix: str = ".json"):
        doc = {"config_hash": self.digest, "config": self.cfg.hashed(), "report": report}
        path = self._path(suffix)
        path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        self.written.append(path)


def _pool_map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _check(failures: list, name: str, ok: bool):
    if not ok:
        failures.append(name)


# ---------------------------------------------------------------- subcommands

def _auto_k_max(cfg: RunConfig, M: float) -> int:
    if cfg.k_max is not None:
        return cfg.k_max
    k = int(np.ceil(1.6 * M * max(abs(n) for n in cfg.ns))) + 32
    return k + k % 2


def run_matcoef(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    g = cfg.group_element
    table = matcoef.build_table(cfg.ns, _auto_k_max(cfg, map_bound(g)), cfg.rep, g, cfg.workers)
    rows = []
    for i, n in enumerate(table.ns):
        for j, k in enumerate(table.ks):
            v = table.entries[i, j]
            rows.append([int(k), int(n), float(v.real), float(v.imag), float(abs(v)), table.regimes[i, j]])
    art.csv(["k", "n", "re", "im", "abs", "regime"], rows)
    parseval = {}
    for i, n in enumerate(table.ns):
        row = table.entries[i]
        if max(abs(row[0]), abs(row[-1])) < 1e-12:
            parseval[int(n)] = float(np.sum(np.abs(row) ** 2))
            _check(failures, f"parseval n={int(n)}", abs(parseval[int(n)] - 1) <= 1e-6)
    report = table.metadata()
    report["parseval"] = {str(k): v for k, v in parseval.items()}
    art.json(report)
    return report


def run_airy_check(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    g = cfg.group_element
    M = map_bound(g)
    if M <= 1.0 + 1e-9:
        raise ConfigError("airy-check needs a non-rotation g (M > 1)")
    ns = [abs(n) for n in cfg.ns]
    table = matcoef.build_table(ns, _auto_k_max(cfg, M), cfg.rep, g, cfg.workers)
    rows, maxima = [], {}
    for i, n in enumerate(table.ns):
        worst = 0.0
        for j, k in enumerate(table.ks):
            if k <= 0 or table.regimes[i, j] != matcoef.RESONANCE:
                continue
            d = table.entries[i, j]
            model = matcoef.uniform_airy_model(int(k), int(n), cfg.rep, g)
            res = abs(d - model) * k ** (2 / 3)
            worst = max(worst, res)
            rows.append([int(k), int(n), float(abs(d)), float(abs(model)), float(res)])
        maxima[int(n)] = worst
    art.csv(["k", "n", "abs_d", "abs_model", "residual_k23"], rows)
    # one constant must serve every n: no maximum may exceed twice the first
    vals = [maxima[int(n)] for n in table.ns]
    ratio = max(vals) / vals[0] if vals[0] > 0 else float("inf")
    _check(failures, "airy residual growth ratio <= 2", ratio <= 2)
    report = {"M": M, "max_scaled_residual": {str(k): v for k, v in maxima.items()}, "ratio": ratio}
    art.json(report)
    return report


def _kernel_spec(cfg: RunConfig, tau: float) -> triple_kernel.KernelSpec:
    if cfg.weight is not None:
        return triple_kernel.KernelSpec(0j, 1j * tau, cfg.eps, "discrete", cfg.weight)
    return triple_kernel.KernelSpec(1j * cfg.lam_imag, 1j * tau, cfg.eps)


def run_kernel(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    pairs = [(c, t) for t in cfg.taus for c in cfg.cs]

    def kernel_row(pair):
        c, t = pair
        spec = _kernel_spec(cfg, t)
        a = triple_kernel.averaged_kernel(c, spec, "graded")
        b = triple_kernel.averaged_kernel(c, spec, "split")
        return [float(c), float(t), float(a.real), float(a.imag), float(abs(a - b))]

    rows = _pool_map(kernel_row, pairs, cfg.workers)
    worst = max((r[4] for r in rows), default=0.0)
    _check(failures, f"kernel schemes agree to {cfg.tol}", worst <= cfg.tol)
    art.csv(["c", "tau_imag", "re", "im", "scheme_diff"], rows)
    u = testfn.build(cfg.N, cfg.T)
    sharp = _pool_map(lambda t: triple_kernel.sharp_transform(u, _kernel_spec(cfg, t)), cfg.taus, cfg.workers)
    art.csv(["tau_imag", "re", "im", "abs"], [[float(t), float(s.real), float(s.imag), float(abs(s))]
                                        for t, s in zip(cfg.taus, sharp)], suffix="_sharp.csv")
    report = {"max_scheme_diff": worst, "points": len(rows), "N": cfg.N, "T": cfg.T}
    art.json(report)
    return report


def run_testfn(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    u = testfn.build(cfg.N, cfg.T)
    taus = testfn.lemma_tau_grid(cfg.N, cfg.T) if not cfg.taus else np.asarray(cfg.taus, dtype=float)
    lam = 1j * cfg.lam_imag
    rep = testfn.verify_lemma(u, cfg.N, cfg.T, lam=lam, eps_prime=cfg.eps, taus=taus)
    for name, prop in rep.properties.items():
        _check(failures, f"window property {name}", prop["pass"])
    art.csv(["tau", "sharp_abs", "envelope"], list(zip(rep.tau_grid, rep.sharp_abs, rep.envelope)))
    report = json.loads(rep.to_json())
    art.json(report)
    return report


def _alpha(cfg: RunConfig):
    u = testfn.build(cfg.N, cfg.T)
    return testfn.verify_lemma(u, cfg.N, cfg.T, taus=[])


def run_chain(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    spec = bounds.generate_spectrum(cfg.height, cfg.density, cfg.a, cfg.b, cfg.seed, cfg.level, cfg.mode)
    try:
        res = bounds.chain_bound(cfg.N, cfg.T, spec, _alpha(cfg), cfg.chain_eps)
    except bounds.ChainStepViolation as exc:
        failures.append(str(exc))
        art.json({"failed_step": exc.step, "lhs": exc.lhs, "rhs": exc.rhs})
        return {}
    art.csv(["step", "value"], [[k, float(v)] for k, v in res.steps.items()])
    report = json.loads(res.to_json())
    report["spectrum_size"] = len(spec)
    report["normalized_bound"] = res.bound / cfg.N ** (2 / 3 + cfg.chain_eps)
    art.json(report)
    return report


def _sequence(cfg: RunConfig, k_max: int) -> bounds.CoefficientSequence:
    if cfg.sequence == "zero":
        return bounds.zero_sequence(k_max)
    if cfg.sequence == "heavy":
        return bounds.heavy_tailed_sequence(k_max, cfg.seed, cfg.seq_A)
    return bounds.lindelof_sequence(k_max, cfg.seed)


def run_restrict(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    g = cfg.group_element
    k_max = _auto_k_max(cfg, map_bound(g))
    table = matcoef.build_table(cfg.ns, k_max, cfg.rep, g, cfg.workers)
    seq = _sequence(cfg, k_max)
    rows, pairs = [], []
    for n in table.ns:
        try:
            total, per = bounds.assemble_restriction_norm(int(n), seq, table)
        except bounds.TableRangeError as exc:
            raise ConfigError(str(exc)) from None
        parts = per[matcoef.REGULAR] + per[matcoef.RESONANCE] + per[matcoef.CUTOFF]
        _check(failures, f"regime split sums to total n={int(n)}", parts == total)
        rows.append([int(n), total, per[matcoef.REGULAR], per[matcoef.RESONANCE], per[matcoef.CUTOFF]])
        pairs.append((abs(int(n)), total))
    art.csv(["n", "total", "regular", "resonance", "cutoff"], rows)
    report = {"k_max": k_max, "rows": rows}
    if len(pairs) >= 3 and all(v > 0 for _, v in pairs):
        slope, err = bounds.fit_growth_exponent(pairs)
        report["growth_exponent"], report["stderr"] = slope, err
        _check(failures, f"growth exponent <= {cfg.growth_max}", slope <= cfg.growth_max)
    else:
        report["growth_exponent"] = None
    art.json(report)
    return report


def run_sphere(cfg: RunConfig, art: Artifacts, failures: list) -> dict:
    rep = sphere.sharpness_experiment(cfg.l_max, cfg.l_min, cfg.l_step)
    eigen = {l: sphere.casimir_eigen_check(l) for l in range(0, 65)}
    _check(failures, "casimir magnitude 1/4", all(abs(v) == Fraction(1, 4) for v in eigen.values()))
    casimir = {str(l): str(v) for l, v in eigen.items()}
    top = rep.fits["top"]["exponent"]
    _check(failures, "m = l exponent 0.50 +- 0.05", abs(top - 0.5) <= 0.05)
    parity = [sphere.equator_norm(l, m) for l in range(0, 21) for m in range(-l, l + 1) if (l + m) % 2]
    _check(failures, "parity zeros exact", all(v == 0.0 for v in parity))
    path = art._path(".csv")
    path.write_text(rep.to_csv(f"# config_sha256={art.digest}"))
    art.written.append(path)
    report = json.loads(rep.to_json())
    report["casimir"] = casimir
    art.json(report)
    return report


RUNNERS = {
    "matcoef": run_matcoef, "airy-check": run_airy_check, "kernel": run_kernel,
    "testfn": run_testfn, "chain": run_chain, "restrict": run_restrict, "sphere": run_sphere,
}


def run(cfg: RunConfig) -> tuple[int, list]:
    """Execute one subcommand; returns (exit status, failed check names)."""
    art = Artifacts(cfg)
    failures: list = []
    RUNNERS[cfg.subcommand](cfg, art, failures)
    return (1 if failures else 0), failures


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = load_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:   # argparse usage errors
        return int(exc.code or 0) and 2
    try:
        status, failures = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, bounds.InfeasibleSpectrum) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for name in failures:
        print(f"FAILED: {name}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
