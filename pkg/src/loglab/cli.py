"""``loglab`` command line: solves, sweeps, eigenvalues and verification suites.

Exit codes: 0 success, 1 invalid input or configuration, 2 a check failed,
3 a solver did not converge.
"""
from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .energies import ProblemSpec
from .exceptions import ConfigError, LoglabError
from .experiments import (
    DEFAULT_S_LIST,
    check_s_list,
    constants_report,
    expansion_suite,
    inequality_suite,
    operator_expansion_errors,
    sweep_small_s,
)
from .grid import MIN_NODES, Grid1D, bump
from .reporting import write_csv, write_json
from .solvers import (
    SolverOptions,
    first_eigen_laplace,
    first_eigen_loglap,
    solve_least_energy_log,
    solve_least_energy_s,
)
from .specialfn import EULER_GAMMA, const_kappa, dimensional_constants, kappa_small_s_limit

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_NONCONVERGED = 0, 1, 2, 3

# (section, key, attribute, type)
_SCHEMA = (
    ("domain", "a", "a", float),
    ("domain", "b", "b", float),
    ("grid", "n", "n", int),
    ("problem", "lambda", "lam", float),
    ("problem", "mu", "mu", float),
    ("problem", "s", "s", float),
    ("problem", "s_list", "s_list", "floats"),
    ("solver", "tol", "tol", float),
    ("solver", "max_iter", "max_iter", int),
    ("solver", "seed", "seed", int),
    ("output", "dir", "out_dir", str),
)


@dataclass(frozen=True)
class RunConfig:
    a: float = -1.0
    b: float = 1.0
    n: int = 512
    lam: float | None = None
    mu: float | None = None
    s: float | None = None
    s_list: tuple | None = None
    tol: float = 1e-8
    max_iter: int = 20000
    seed: int = 0
    out_dir: str = "."

    def validate(self):
        try:
            Grid1D(self.a, self.b, self.n)
            SolverOptions(tol=self.tol, max_iter=self.max_iter, seed=self.seed)
            if self.lam is not None:
                ProblemSpec(self.lam)
            if self.mu is not None and not 0.0 < self.mu < 4.0:
                raise ConfigError(f"problem.mu must lie in (0, 4), got {self.mu!r}")
            if self.lam is not None and self.mu is not None and abs(self.mu - 4.0 * self.lam) > 1e-12:
                raise ConfigError(f"problem.mu = {self.mu!r} is inconsistent with 4 * lambda = {4.0 * self.lam!r}")
            if self.s is not None and not 0.0 < self.s < 0.25:
                raise ConfigError(f"problem.s must lie in (0, 1/4), got {self.s!r}")
            if self.s_list is not None:
                check_s_list(self.s_list)
        except ConfigError:
            raise
        except LoglabError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    @property
    def effective_mu(self):
        if self.mu is not None:
            return self.mu
        if self.lam is not None:
            return 4.0 * self.lam
        return None

    @property
    def effective_lam(self):
        if self.lam is not None:
            return self.lam
        if self.mu is not None:
            return self.mu / 4.0
        return None

    def grid(self):
        return Grid1D(self.a, self.b, self.n)

    def solver_options(self):
        return SolverOptions(tol=self.tol, max_iter=self.max_iter, seed=self.seed)

    def dumps(self):
        parser = configparser.ConfigParser()
        for section, key, attr, kind in _SCHEMA:
            value = getattr(self, attr)
            if value is None:
                continue
            if not parser.has_section(section):
                parser.add_section(section)
            if kind == "floats":
                text = ",".join(repr(float(v)) for v in value)
            elif kind is float:
                text = repr(float(value))
            else:
                text = str(value)
            parser.set(section, key, text)
        lines = []
        for section in parser.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in parser.items(section))
            lines.append("")
        return "\n".join(lines)

    @classmethod
    def loads(cls, text, source="<config>"):
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        known = {(sec, key) for sec, key, _, _ in _SCHEMA}
        for section in parser.sections():
            for key in parser[section]:
                if (section, key) not in known:
                    raise ConfigError(f"{source}: unknown field {section}.{key}")
        values = {}
        for section, key, attr, kind in _SCHEMA:
            if not parser.has_option(section, key):
                continue
            raw = parser.get(section, key)
            try:
                if kind == "floats":
                    values[attr] = tuple(float(v) for v in raw.split(",") if v.strip())
                elif kind is int:
                    values[attr] = int(raw)
                else:
                    values[attr] = kind(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: field {section}.{key}: cannot parse {raw!r}") from exc
        return cls(**values).validate()

    @classmethod
    def load(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.loads(text, source=str(path))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of reals: {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with domain/grid/problem/solver/output sections")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="number of interior grid nodes")
    common.add_argument("--dump-config", metavar="PATH", help="write the effective config to PATH and exit")

    parser = _Parser(prog="loglab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve-frac", parents=[common], help="least-energy solution of the fractional problem")
    p.add_argument("--s", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mu", type=float)

    p = sub.add_parser("solve-log", parents=[common], help="least-energy solution of the logarithmic problem")
    p.add_argument("--mu", type=float)
    p.add_argument("--lambda", dest="lam", type=float)

    p = sub.add_parser("sweep", parents=[common], help="small-order sweep against the limit problem")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--s-list", type=_float_list)

    p = sub.add_parser("eigen", parents=[common], help="first Dirichlet eigenvalue")
    p.add_argument("--which", choices=("loglap", "laplace"), default="loglap")

    p = sub.add_parser("verify", parents=[common], help="verification suites")
    p.add_argument("--suite", choices=("constants", "inequalities", "expansion"), required=True)
    p.add_argument("--samples", type=int, default=500)

    p = sub.add_parser("expand", parents=[common], help="operator expansion error table on the bump")
    p.add_argument("--s-list", type=_float_list)
    return parser


def _config_from_args(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {}
    for flag, attr in (("n", "n"), ("seed", "seed"), ("out", "out_dir"), ("s", "s"), ("lam", "lam"), ("mu", "mu"), ("s_list", "s_list")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[attr] = value
    # a flag for one of lambda/mu replaces a config value of the other
    if "lam" in overrides and "mu" not in overrides:
        overrides["mu"] = None
    if "mu" in overrides and "lam" not in overrides:
        overrides["lam"] = None
    return replace(cfg, **overrides).validate()


def _out(cfg, name):
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _cmd_solve_frac(cfg, args):
    if cfg.s is None:
        raise ConfigError("solve-frac needs --s (or problem.s)")
    lam = cfg.effective_lam
    if lam is None:
        raise ConfigError("solve-frac needs --lambda or --mu")
    report = solve_least_energy_s(ProblemSpec(lam, cfg.s), cfg.grid(), cfg.solver_options())
    report.write(_out(cfg, "solve_frac.json"), _out(cfg, "solve_frac_solution.csv"))
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def _cmd_solve_log(cfg, args):
    mu = cfg.effective_mu
    if mu is None:
        raise ConfigError("solve-log needs --mu or --lambda")
    report = solve_least_energy_log(mu, cfg.grid(), cfg.solver_options())
    report.write(_out(cfg, "solve_log.json"), _out(cfg, "solve_log_solution.csv"))
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def _cmd_sweep(cfg, args):
    if cfg.lam is None:
        raise ConfigError("sweep needs --lambda (the whole exponent family p(s) is required)")
    s_list = cfg.s_list or DEFAULT_S_LIST
    result = sweep_small_s(cfg.lam, s_list, cfg.grid(), cfg.solver_options())
    result.to_csv(_out(cfg, "sweep.csv"))
    write_json({"lambda": cfg.lam, "n": cfg.n, "s_list": list(s_list), "checks": result.checks}, _out(cfg, "sweep.json"))
    if not result.checks["solvers_converged_ok"]:
        return EXIT_NONCONVERGED
    return EXIT_OK if result.passed else EXIT_CHECK


def _cmd_eigen(cfg, args):
    grid = cfg.grid()
    lap = first_eigen_laplace(grid)
    doc = {"which": args.which, "n": grid.n, "a": grid.a, "b": grid.b, "lambda_1": lap, "ln_lambda_1": math.log(lap)}
    ok = True
    if args.which == "loglap":
        value, _ = first_eigen_loglap(grid)
        doc["lambda_1_L"] = value
        doc["ordering_ok"] = ok = value <= math.log(lap) + 1e-3
    write_json(doc, _out(cfg, f"eigen_{args.which}.json"))
    return EXIT_OK if ok else EXIT_CHECK


def _constants_checks():
    rep = constants_report()
    c1 = dimensional_constants(1)
    a1 = 2.0 * (EULER_GAMMA + math.log(2.0) - math.log(math.pi))
    lim = kappa_small_s_limit(1)
    root = const_kappa(1, 1e-4) ** 1e4
    checks = {
        "rho_1_zero_ok": abs(rep["rho_1"]) <= 1e-12,
        "rho_2_two_ln2_ok": abs(rep["rho_2"] - 2.0 * math.log(2.0)) <= 1e-12,
        "a_1_ok": abs(c1.a_N - a1) <= 1e-10,
        "kappa_limit_ok": abs(root - lim) / lim <= 1e-3,
    }
    rep["checks"] = checks
    return rep, all(checks.values())


def _cmd_verify(cfg, args):
    grid = None
    if args.suite == "constants":
        rep, ok = _constants_checks()
    elif args.suite == "inequalities":
        grid = Grid1D(cfg.a, cfg.b, args.n if args.n else 256)
        rep = inequality_suite(args.samples, cfg.seed if args.seed is not None else 42, grid)
        ok = rep["passed"]
    else:
        grid = Grid1D(cfg.a, cfg.b, args.n if args.n else 1024)
        rep = expansion_suite(grid)
        ok = rep["passed"]
    write_json(rep, _out(cfg, f"verify_{args.suite}.json"))
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_expand(cfg, args):
    s_list = check_s_list(cfg.s_list or (0.08, 0.04, 0.02, 0.01))
    grid = Grid1D(cfg.a, cfg.b, args.n if args.n else 1024)
    errors, floors = operator_expansion_errors(bump(grid), s_list)
    rows = []
    for k, (s, e, f) in enumerate(zip(s_list, errors, floors)):
        ratio = errors[k] / errors[k - 1] if k else float("nan")
        rows.append((s, e, f, ratio))
    write_csv(("s", "error", "floor", "ratio"), rows, _out(cfg, "expand.csv"))
    ok = all(r[3] <= 0.7 or r[1] <= r[2] for r in rows[1:])
    return EXIT_OK if ok else EXIT_CHECK


_COMMANDS = {
    "solve-frac": _cmd_solve_frac,
    "solve-log": _cmd_solve_log,
    "sweep": _cmd_sweep,
    "eigen": _cmd_eigen,
    "verify": _cmd_verify,
    "expand": _cmd_expand,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        if args.n is not None and args.n < MIN_NODES:
            raise ConfigError(f"--n must be >= {MIN_NODES}")
        if args.dump_config:
            Path(args.dump_config).write_text(cfg.dumps())
            return EXIT_OK
        return _COMMANDS[args.command](cfg, args)
    except (LoglabError, ValueError) as exc:
        print(f"loglab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
