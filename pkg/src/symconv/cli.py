"""Command-line front door: verify, theorem, constants.

Experiments are configured by a flat key = value file plus flag overrides
(flags win).  CSV goes to --out (or stdout), the JSON summary always goes
to stdout, and log lines go to stderr so repeated runs with the same
config and seed are byte-identical on their data outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import arith, eigenform, lfun, sums, sympower, verify

log = logging.getLogger("symconv")

_DEF_N = 10**4
_DEF_P = 10**4
_DEF_TRUNC = 8
_DEF_SEED = 42
_DEF_MFULL = 10**6


@dataclass
class ExperimentConfig:
    theorem_id: str = "T1"
    j: int = 2
    k: int = 2
    kernel: str = "one"
    q_list: list[int] = field(default_factory=lambda: [1])
    x_list: list[int] = field(default_factory=lambda: [10**4])
    n_limit: int = 0  # 0: derive from max(x) + 1
    primes_cutoff: int = _DEF_P
    trunc: int = _DEF_TRUNC
    m_full: int = _DEF_MFULL
    seed: int = _DEF_SEED
    out: str | None = None
    threads: int = 1

    def validate(self) -> None:
        if self.theorem_id not in ("T1", "T2", "T3", "T4"):
            raise ValueError(f"unknown theorem id {self.theorem_id!r}")
        if not self.x_list:
            raise ValueError("empty x list")
        if any(x < 1 for x in self.x_list):
            raise ValueError("all x must be >= 1")
        if list(self.x_list) != sorted(set(self.x_list)):
            raise ValueError("x grid must be strictly increasing")
        if any(q < 1 for q in self.q_list):
            raise ValueError("all q must be >= 1")
        if self.j < 1:
            raise ValueError("j must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.n_limit == 0:
            self.n_limit = max(self.x_list) + 1
        if max(self.x_list) + 1 > self.n_limit:
            raise ValueError("max(x) + 1 exceeds the table limit n")


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = text.partition("=")
        out[key.strip()] = value.strip()
    return out


def _parse_int(s: str) -> int:
    return int(float(s)) if ("e" in s or "E" in s or "." in s) else int(s)


def _parse_int_list(s: str) -> list[int]:
    return [_parse_int(part) for part in s.split(",") if part.strip()]


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    values: dict[str, str] = {}
    if args.config:
        values.update(parse_config_file(args.config))
    # flag overrides
    flag_map = {
        "theorem": args.theorem,
        "j": args.j,
        "k": args.k,
        "kernel": args.kernel,
        "q": args.q,
        "x": args.x,
        "n": args.n,
        "primes_cutoff": args.primes_cutoff,
        "trunc": args.trunc,
        "m_full": getattr(args, "m_full", None),
        "seed": args.seed,
        "out": args.out,
        "threads": args.threads,
    }
    for key, val in flag_map.items():
        if val is not None:
            values[key] = str(val)
    if "theorem" in values:
        cfg.theorem_id = values["theorem"]
    if "j" in values:
        cfg.j = _parse_int(values["j"])
    if "k" in values:
        cfg.k = _parse_int(values["k"])
    if "kernel" in values:
        cfg.kernel = values["kernel"]
    if "q" in values:
        cfg.q_list = _parse_int_list(values["q"])
    if "x" in values:
        cfg.x_list = _parse_int_list(values["x"])
    if "n" in values:
        cfg.n_limit = _parse_int(values["n"])
    if "primes_cutoff" in values:
        cfg.primes_cutoff = _parse_int(values["primes_cutoff"])
    if "trunc" in values:
        cfg.trunc = _parse_int(values["trunc"])
    if "m_full" in values:
        cfg.m_full = _parse_int(values["m_full"])
    if "seed" in values:
        cfg.seed = _parse_int(values["seed"])
    if "out" in values:
        cfg.out = values["out"]
    if "threads" in values:
        cfg.threads = _parse_int(values["threads"])
    cfg.validate()
    return cfg


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, allow_nan=False))
    sys.stdout.write("\n")


def cmd_verify(cfg: ExperimentConfig) -> int:
    report = verify.run_all_suites(cfg.n_limit, cfg.seed, threads=cfg.threads)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(report, sort_keys=True, indent=2))
    _emit_json(report)
    return 0 if report["passed"] else 1


def _cached_value(cache: lfun.ConstantCache, key: str, compute) -> dict:
    hit = cache.get(key)
    if hit is not None:
        log.info("constant cache hit: %s", key)
        return hit
    value = compute()
    entry = {
        "value": value.value,
        "prime_cutoff": value.prime_cutoff,
        "tail_estimate": value.tail_estimate,
    }
    cache.put(key, entry)
    return entry


def _constant_key(kind: str, cfg: ExperimentConfig, label: str, q: int | None = None) -> str:
    parts = [kind, f"form={label}", f"P={cfg.primes_cutoff}", f"M={cfg.trunc}"]
    if kind == "c":
        parts.insert(1, f"j={cfg.j}")
    if q is not None:
        parts.append(f"q={q}")
    if kind in ("Cshift", "Dshift"):
        if kind == "Cshift":
            parts.insert(1, f"j={cfg.j}")
        parts.append(f"k={cfg.k}")
        parts.append(f"kernel={cfg.kernel}")
        parts.append(f"Mfull={cfg.m_full}")
    return ":".join(parts)


def cmd_constants(cfg: ExperimentConfig) -> int:
    sieve = arith.build_sieve(max(cfg.primes_cutoff, 2))
    eigen = eigenform.delta_table(max(cfg.primes_cutoff, 2), threads=cfg.threads)
    cache = lfun.ConstantCache()
    kernel = arith.builtin_kernel(cfg.kernel, cfg.k)
    payload: dict = {"schema": 1, "j": cfg.j, "k": cfg.k, "kernel": cfg.kernel}
    payload["c"] = {}
    payload["C3"] = {}
    for q in cfg.q_list:
        payload["c"][str(q)] = _cached_value(
            cache,
            _constant_key("c", cfg, eigen.label, q),
            lambda q=q: lfun.euler_product_c(
                cfg.j, q, eigen, cfg.primes_cutoff, trunc=cfg.trunc, sieve=sieve
            ),
        )
        payload["C3"][str(q)] = _cached_value(
            cache,
            _constant_key("C3", cfg, eigen.label, q),
            lambda q=q: lfun.euler_product_C3(
                q, eigen, cfg.primes_cutoff, trunc=cfg.trunc, sieve=sieve
            ),
        )
    density = lfun.kernel_density_sum(
        kernel, cfg.k, cfg.primes_cutoff, cfg.m_full, sieve=sieve
    )
    payload["kernel_density"] = density
    payload["C_shift"] = payload["c"].get("1", {}).get("value", None)
    if payload["C_shift"] is not None:
        payload["C_shift"] *= density
    payload["D_shift"] = payload["C3"].get("1", {}).get("value", None)
    if payload["D_shift"] is not None:
        payload["D_shift"] *= density
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(payload, sort_keys=True, indent=2))
    _emit_json(payload)
    return 0


def cmd_theorem(cfg: ExperimentConfig) -> int:
    sieve_limit = max(cfg.n_limit, cfg.primes_cutoff)
    sieve = arith.build_sieve(sieve_limit)
    eigen = eigenform.delta_table(max(cfg.n_limit, cfg.primes_cutoff), threads=cfg.threads)
    cache = lfun.ConstantCache()
    j_eff = 2 if cfg.theorem_id in ("T2", "T4") else cfg.j
    sym = sympower.sym_extend(eigen, j_eff, cfg.n_limit, sieve=sieve)
    kernel = arith.builtin_kernel(cfg.kernel, cfg.k)
    reports: list[sums.SumReport] = []
    if cfg.theorem_id in ("T1", "T2"):
        for q in cfg.q_list:
            key = _constant_key("c" if cfg.theorem_id == "T1" else "C3", cfg, eigen.label, q)
            if cfg.theorem_id == "T1":
                entry = _cached_value(
                    cache,
                    key,
                    lambda q=q: lfun.euler_product_c(
                        cfg.j, q, eigen, cfg.primes_cutoff, trunc=cfg.trunc, sieve=sieve
                    ),
                )
            else:
                entry = _cached_value(
                    cache,
                    key,
                    lambda q=q: lfun.euler_product_C3(
                        q, eigen, cfg.primes_cutoff, trunc=cfg.trunc, sieve=sieve
                    ),
                )
            for x in cfg.x_list:
                if cfg.theorem_id == "T1":
                    lhs = sums.progression_sum(sym, q, x)
                else:
                    lhs = sums.cube_progression_sum(sym, q, x)
                main = sums.main_term(cfg.theorem_id, entry["value"], x, q)
                reports.append(
                    sums.make_report(cfg.theorem_id, x, lhs, main, j_eff, q=q)
                )
    else:
        if cfg.theorem_id == "T3":
            const = lfun.constant_shifted(
                kernel, cfg.k, cfg.j, eigen, cfg.primes_cutoff,
                m_full=cfg.m_full, trunc=cfg.trunc, sieve=sieve,
            )
        else:
            const = lfun.constant_shifted_cube(
                kernel, cfg.k, eigen, cfg.primes_cutoff,
                m_full=cfg.m_full, trunc=cfg.trunc, sieve=sieve,
            )
        for x in cfg.x_list:
            if cfg.theorem_id == "T3":
                lhs = sums.shifted_sum_direct(sym, kernel, cfg.k, x, sieve)
            else:
                lhs = sums.cube_shifted_sum(sym, kernel, cfg.k, x, sieve)
            main = sums.main_term(cfg.theorem_id, const, x)
            reports.append(
                sums.make_report(
                    cfg.theorem_id, x, lhs, main, j_eff, k=cfg.k, kernel=cfg.kernel
                )
            )
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            sums.write_reports_csv(reports, fh)
    else:
        sums.write_reports_csv(reports, sys.stdout)
    summary: dict = {
        "schema": 1,
        "theorem": cfg.theorem_id,
        "j": j_eff,
        "k": cfg.k,
        "kernel": cfg.kernel if cfg.theorem_id in ("T3", "T4") else None,
        "seed": cfg.seed,
        "rows": len(reports),
        "claimed_exponent": sums.claimed_exponent(cfg.theorem_id, j_eff, cfg.k),
    }
    alt = sums.claimed_exponent_alternate(cfg.theorem_id, j_eff, cfg.k)
    if alt is not None:
        summary["claimed_exponent_alternate_reading"] = alt
    xs = sorted({r.x for r in reports})
    if len(xs) >= 3:
        fits = {}
        groups: dict = {}
        for r in reports:
            groups.setdefault("all" if r.q is None else str(r.q), []).append(r)
        for q, rows in groups.items():
            try:
                fit = sums.fit_error_exponent(rows)
                fits[q] = {"slope": fit.slope, "r2": fit.r2}
            except ValueError as exc:
                fits[q] = {"error": str(exc)}
        summary["fits"] = fits
    else:
        summary["fits"] = "insufficient points (need >= 3 x values)"
    _emit_json(summary)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symconv",
        description="Verify coefficient identities and measure the asymptotics "
        "of symmetric-power shifted convolution sums.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run the invariant suites and exit nonzero on violation"),
        ("theorem", "evaluate one asymptotic family over an x grid, emit CSV + JSON"),
        ("constants", "compute and cache the main-term constants, emit JSON"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--theorem", type=str, default=None, choices=["T1", "T2", "T3", "T4"])
        p.add_argument("--n", type=str, default=None, help="table limit")
        p.add_argument("--j", type=str, default=None, help="symmetric power index")
        p.add_argument("--k", type=str, default=None, help="k-full parameter")
        p.add_argument("--kernel", type=str, default=None, help="kernel name")
        p.add_argument("--q", type=str, default=None, help="comma-separated moduli")
        p.add_argument("--x", type=str, default=None, help="comma-separated x grid")
        p.add_argument("--primes-cutoff", dest="primes_cutoff", type=str, default=None)
        p.add_argument("--trunc", type=str, default=None, help="local series truncation")
        p.add_argument("--m-full", dest="m_full", type=str, default=None,
                       help="k-full summation bound for shifted constants")
        p.add_argument("--seed", type=str, default=None)
        p.add_argument("--out", type=str, default=None, help="output path (CSV or JSON)")
        p.add_argument("--threads", type=str, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"symconv: config error: {exc}\n")
    try:
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "theorem":
            return cmd_theorem(cfg)
        if args.command == "constants":
            return cmd_constants(cfg)
    except (ValueError, eigenform.IntegrityError) as exc:
        sys.stderr.write(f"symconv: {exc}\n")
        return 1
    parser.exit(2, "symconv: no command\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
