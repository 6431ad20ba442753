"""Command-line experiment runners.

Settings come from built-in defaults, then an optional ``key=value`` config
file (``--config``), then command-line flags. Each run writes its CSV/JSON
outputs and a ``manifest.json`` into ``--out``.

Exit codes: 0 success, 2 invalid configuration, 3 inapplicable preconditions.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass, fields
import hashlib
import json
import logging
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .covering import (census, choose_scales, cover_id, cover_weights, lemma15_statistic,
                       lemma75_statistic, log2_count_bound)
from .hessian import SlackVector, build_constraints, membership
from .quadratic import diameter_lower_bound, diameter_witness
from .sampler import ChainConfig, estimate_p, sample_uniform
from .spectral import SpectralWeights, eigenvalue_grid
from .volume import (cone_membership, estimate_volume, euler_volume, exact_volume_n2,
                     facet_weights_fd, normalized_f)

log = logging.getLogger("hessian_lab")

COMMANDS = ("sample", "volume", "weights", "spectrum", "cover", "concentration", "diameter")
EXIT_OK, EXIT_INVALID, EXIT_INAPPLICABLE = 0, 2, 3


class InvalidConfig(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "diameter"
    n: tuple = (4,)
    s0: float = 2.0
    s1: float = 2.0
    s2: float = 2.0
    eps0: float = 0.5
    eps1: float = 0.5
    seed: int = 0
    chains: int = 1
    burn_in: int | None = None
    thin: int | None = None
    samples: int = 1000
    target_rel_err: float = 0.05
    w0: float = 1.0
    w1: float = 1.0
    w2: float = 1.0
    offset_strategy: str = "fixed-zero"
    out: str = "out"

    @property
    def slack(self) -> SlackVector:
        return SlackVector(self.s0, self.s1, self.s2)

    @property
    def chain(self) -> ChainConfig:
        return ChainConfig(self.burn_in, self.thin, self.seed, self.chains)

    @property
    def single_n(self) -> int:
        if len(self.n) != 1:
            raise InvalidConfig(f"command {self.command!r} takes a single n")
        return self.n[0]

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InvalidConfig(f"unknown command {self.command!r}")
        if not self.n or min(self.n) < 2:
            raise InvalidConfig("n must be >= 2")
        try:
            self.slack
            self.chain
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        if self.samples < 1:
            raise InvalidConfig("samples must be >= 1")
        if self.eps0 <= 0 or not 0 < self.eps1 < 1:
            raise InvalidConfig("need eps0 > 0 and 0 < eps1 < 1")
        if self.offset_strategy not in ("fixed-zero", "mc-min"):
            raise InvalidConfig(f"unknown offset strategy {self.offset_strategy!r}")
        return self

    def canonical(self) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        return d


def _coerce(name: str, raw):
    ftype = {f.name: f.type for f in fields(RunConfig)}[name]
    if raw is None:
        return None
    if name == "n":
        return tuple(int(v) for v in str(raw).split(",") if v.strip())
    if "int" in ftype:
        return int(raw)
    if "float" in ftype:
        return float(raw)
    return str(raw)


def parse_config_file(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in {f.name for f in fields(RunConfig)}:
            raise InvalidConfig(f"{path}:{lineno}: expected key=value with a known key")
        out[key] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hessian-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key=value settings file")
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    merged = {}
    if args.config:
        merged.update(parse_config_file(args.config))
    merged.update({k: v for k, v in vars(args).items()
                   if k not in ("command", "config", "verbose") and v is not None})
    try:
        values = {k: _coerce(k, v) for k, v in merged.items()}
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    return RunConfig(command=args.command, **values).validate()


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_csv(path: Path, header, rows) -> None:
    def fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return str(bool(v)).lower()
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.17g}"
        return str(v)

    lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_manifest(cfg: RunConfig, outdir: Path, outputs, extra=None) -> Path:
    config = cfg.canonical()
    manifest = {
        "version": __version__,
        "command": cfg.command,
        "config": config,
        "config_hash": hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest(),
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    if extra:
        manifest["result"] = extra
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def run_sample(cfg: RunConfig, outdir: Path) -> int:
    n = cfg.single_n
    X = sample_uniform(build_constraints(n, cfg.slack), cfg.samples, cfg.chain)
    path = outdir / "samples.csv"
    write_csv(path, [f"x{v1}_{v2}" for v1 in range(n) for v2 in range(n)], X)
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def _volume_row(n, s, est, w=None):
    w = (np.nan,) * 3 if w is None else tuple(w.as_array())
    return (n, s.s0, s.s1, s.s2, est.log_volume, est.stderr_log, normalized_f(est, n)) + w


VOLUME_HEADER = ("n", "s0", "s1", "s2", "log_volume", "stderr", "f_n", "w0", "w1", "w2")


def run_volume(cfg: RunConfig, outdir: Path) -> int:
    rows = []
    for n in cfg.n:
        est = exact_volume_n2(cfg.slack) if n == 2 else estimate_volume(
            n, cfg.slack, cfg.target_rel_err, cfg.chain)
        rows.append(_volume_row(n, cfg.slack, est))
    path = outdir / "volume.csv"
    write_csv(path, VOLUME_HEADER, rows)
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def run_weights(cfg: RunConfig, outdir: Path) -> int:
    rows, extra = [], {}
    for n in cfg.n:
        est = exact_volume_n2(cfg.slack) if n == 2 else estimate_volume(
            n, cfg.slack, cfg.target_rel_err, cfg.chain)
        w = facet_weights_fd(n, cfg.slack, cfg=cfg.chain, target_rel_err=cfg.target_rel_err)
        rows.append(_volume_row(n, cfg.slack, est, w))
        extra[str(n)] = {"in_cone": cone_membership(w), "euler_volume": euler_volume(w, cfg.slack)}
    path = outdir / "weights.csv"
    write_csv(path, VOLUME_HEADER, rows)
    write_manifest(cfg, outdir, [path], extra)
    return EXIT_OK


def run_spectrum(cfg: RunConfig, outdir: Path) -> int:
    n = cfg.single_n
    w = SpectralWeights(cfg.w0, cfg.w1, cfg.w2)
    lam = eigenvalue_grid(w, n)
    path = outdir / "spectrum.csv"
    write_csv(path, ("i_hat", "j_hat", "lambda"),
              [(i, j, lam[i, j]) for i in range(n) for j in range(n)])
    nonzero = np.abs(lam.ravel()[1:])
    write_manifest(cfg, outdir, [path], {
        "alpha": w.alpha, "beta": w.beta, "gamma": w.gamma,
        "min_nonzero_mode_magnitude": float(nonzero.min()) if nonzero.size else None,
    })
    return EXIT_OK


def run_cover(cfg: RunConfig, outdir: Path) -> int:
    n = cfg.single_n
    try:
        scales = choose_scales(n, cfg.eps1)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    w = cover_weights(scales.n1, cfg.slack, cfg=cfg.chain, target_rel_err=cfg.target_rel_err)
    X = sample_uniform(build_constraints(n, cfg.slack), cfg.samples, cfg.chain)
    rows, ids = [], []
    for t, x in enumerate(X):
        l15 = lemma15_statistic(x, scales, cfg.slack, w)
        l75 = lemma75_statistic(x, scales, cfg.slack, w)
        ids.append(cover_id(x, scales, cfg.slack, cfg.offset_strategy, seed=cfg.seed))
        rows.append((t, l15.lhs_avg, l15.rhs, l15.holds, l75.avg_plus_part, l75.bound, l75.holds))
    counts = census(ids)
    applicable = l15.applicable
    path = outdir / "cover.csv"
    write_csv(path, ("sample", "l15_lhs_avg", "l15_rhs", "l15_holds",
                     "l75_avg_plus", "l75_bound", "l75_holds"), rows)
    report = {
        "scales": {"k": scales.k, "n1": scales.n1, "n2": scales.n2, "eps1": scales.eps1},
        "weights": list(w.as_array()), "eps2": l15.eps2, "applicable": applicable,
        "offset_strategy": cfg.offset_strategy,
        "census": {"distinct": len(counts), "log2_distinct": float(np.log2(len(counts))),
                   "log2_bound": log2_count_bound(n, cfg.eps1),
                   "counts": dict(sorted(counts.items()))},
    }
    rpath = outdir / "cover_report.json"
    rpath.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    write_manifest(cfg, outdir, [path, rpath], {"applicable": applicable, "eps2": l15.eps2})
    return EXIT_OK if applicable else EXIT_INAPPLICABLE


def run_concentration(cfg: RunConfig, outdir: Path) -> int:
    if min(cfg.slack) <= 0:
        raise InvalidConfig("concentration needs strictly positive slack")
    rows = []
    for n in cfg.n:
        X = sample_uniform(build_constraints(n, cfg.slack), cfg.samples, cfg.chain)
        p, se = estimate_p(X, cfg.eps0)
        rows.append((n, cfg.eps0, p, se))
        log.info("n=%d p_hat=%.4g stderr=%.3g", n, p, se)
    path = outdir / "concentration.csv"
    write_csv(path, ("n", "eps0", "p_hat", "stderr"), rows)
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


def run_diameter(cfg: RunConfig, outdir: Path) -> int:
    rows = []
    for n in cfg.n:
        w, linf = diameter_witness(n, cfg.slack)
        feasible = membership(build_constraints(n, cfg.slack), w).feasible
        rows.append((n, linf, diameter_lower_bound(n, cfg.slack), feasible))
    path = outdir / "diameter.csv"
    write_csv(path, ("n", "linf", "lower_bound", "feasible"), rows)
    write_manifest(cfg, outdir, [path])
    return EXIT_OK


RUNNERS = {
    "sample": run_sample, "volume": run_volume, "weights": run_weights,
    "spectrum": run_spectrum, "cover": run_cover,
    "concentration": run_concentration, "diameter": run_diameter,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(argv)
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[cfg.command](cfg, outdir)
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
