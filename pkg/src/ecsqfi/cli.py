"""Command-line front end: ``qfi``, ``figure`` and ``validate``.

Exit status: 0 success, 1 usage error, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .closed_forms import (
    ecs_lossless_qfi,
    ecs_lossy_qfi,
    ecs_lossy_qfi_approx,
    noon_optimal_n,
    noon_qfi,
    noon_superposition_qfi,
)
from .crossover import crossover_roots, fitted_boundaries
from .errors import DomainError, NumericalError
from .fock import (
    DEFAULT_TAIL_TOL,
    apply_loss_channel,
    build_ecs_rho_analytic,
    build_noon_rho,
    build_noon_superposition,
    choose_cutoff,
    ecs_rho_via_channel,
    pure_qfi,
)
from .model import (
    GeneratorKind,
    LossChannel,
    NoonSpec,
    NoonSuperposition,
    delta_phi_min,
    ecs_from_alpha_sq,
    ecs_from_mean_photons,
)
from .qfi import qfi_spectral

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

DEFAULT_THRESHOLD = 1e-8
CROSS_CONSTRUCTION_TOL = 1e-10
POINTS_PER_DECADE = 200

FIGURES = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    """Locale-independent 12-significant-digit rendering."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


# -- qfi ---------------------------------------------------------------------


def _channel(args) -> LossChannel:
    if args.r is not None:
        return LossChannel.from_loss(args.r)
    return LossChannel(1.0 if args.t is None else args.t)


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def _parse_coeffs(text: str) -> NoonSuperposition:
    try:
        values = [complex(s.strip().replace(" ", "")) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse coefficients {text!r}") from exc
    if not values or not any(values):
        raise UsageError("coefficient list must contain a nonzero entry")
    return NoonSuperposition.normalized(values)


def cmd_qfi(args) -> dict:
    """Evaluate the closed-form QFI (and optionally the Fock-space oracle) for one state."""
    channel = _channel(args)
    generator = GeneratorKind(args.generator)
    rec: dict = {"state": args.state, "T": channel.transmission, "R": channel.loss}

    if args.state == "noon":
        if args.n is None:
            raise UsageError("--n is required for --state noon")
        spec = NoonSpec(args.n)
        total = noon_qfi(spec, channel)
        rec.update(N=spec.photon_number, qfi=total)
        if 0.0 < channel.transmission < 1.0:
            rec["n_opt"] = noon_optimal_n(channel)
        if args.oracle:
            rho = build_noon_rho(spec, channel, args.phi, generator, n_max=args.n_max)
            rec["oracle_qfi"] = qfi_spectral(rho)

    elif args.state == "ecs":
        if (args.alpha_sq is None) == (args.nbar is None):
            raise UsageError("give exactly one of --alpha-sq or --nbar for --state ecs")
        spec = ecs_from_alpha_sq(args.alpha_sq) if args.nbar is None else ecs_from_mean_photons(args.nbar)
        rec.update(alpha_sq=spec.alpha_sq, nbar=spec.mean_photons)
        if args.mode == "approx":
            br = ecs_lossy_qfi_approx(spec.mean_photons, channel)
        else:
            br = ecs_lossy_qfi(spec, channel)
        total = br.total
        rec.update(mode=args.mode, classical=br.classical_term, heisenberg=br.heisenberg_term, qfi=total)
        if args.oracle:
            rho = build_ecs_rho_analytic(spec, channel, args.phi, args.n_max, args.tail_tol)
            rec["n_max"] = rho.basis.n_max
            rec["oracle_qfi"] = qfi_spectral(rho)
            via = ecs_rho_via_channel(spec, channel, args.phi, rho.basis.n_max, args.tail_tol)
            rec["oracle_channel_qfi"] = qfi_spectral(via)
            rec["cross_construction_dev"] = float(np.max(np.abs(rho.rho - via.rho)))

    else:
        if args.coeffs is None:
            raise UsageError("--coeffs is required for --state superposition")
        c = _parse_coeffs(args.coeffs)
        state = build_noon_superposition(c, args.phi, generator, n_max=args.n_max)
        rec.update(nbar=c.mean_photons, generator=generator.value)
        if channel.transmission == 1.0:
            total = noon_superposition_qfi(c, generator)
            rec["qfi"] = total
            if args.oracle:
                rec["oracle_qfi"] = pure_qfi(state, generator)
        else:
            # no closed form under loss; the Fock-space value is the result
            total = qfi_spectral(apply_loss_channel(state, channel))
            rec["qfi"] = total

    rec["delta_phi_min"] = delta_phi_min(total)
    if "oracle_qfi" in rec:
        rec["oracle_rel_dev"] = _rel(total, rec["oracle_qfi"])
    return rec


def format_record(rec: dict) -> str:
    lines = []
    for k, v in rec.items():
        if v is None:
            continue
        lines.append(f"{k} = {fmt(v) if isinstance(v, (float, np.floating)) else v}")
    return "\n".join(lines) + "\n"


# -- figure ------------------------------------------------------------------


def log_grid(lo: float, hi: float, per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    decades = math.log10(hi / lo)
    return np.geomspace(lo, hi, int(round(decades * per_decade)) + 1)


def _ecs_dphi(n: float, channel: LossChannel) -> float:
    return delta_phi_min(ecs_lossy_qfi(ecs_from_mean_photons(n), channel).total)


def _noon_dphi(n: float, channel: LossChannel) -> float:
    return delta_phi_min(noon_qfi(n, channel))


def figure_table(figure_id: str) -> tuple[list[str], list[str], list[list[float]]]:
    """(comment lines, column names, rows) for one figure."""
    if figure_id == "fig1a":
        ts = (1.0, 0.9, 0.8)
        grid = log_grid(1.0, 100.0)
        cols = ["n"] + [f"{s}_T{t:g}" for t in ts for s in ("dphi_noon", "dphi_ecs")]
        rows = []
        for n in grid:
            row = [n]
            for t in ts:
                ch = LossChannel(t)
                row += [_noon_dphi(n, ch), _ecs_dphi(n, ch)]
            rows.append(row)
        notes = [f"n log grid [1, 100], {POINTS_PER_DECADE} points/decade; NOON N = n continuous; ECS exact"]
        return notes, cols, rows

    if figure_id == "fig1b":
        ns = (4.0, 20.0)
        grid = np.round(np.linspace(0.5, 1.0, 201), 6)
        cols = ["T"] + [f"{s}_n{n:g}" for n in ns for s in ("dphi_noon", "dphi_ecs")]
        rows = []
        for t in grid:
            ch = LossChannel(t)
            row = [t]
            for n in ns:
                row += [_noon_dphi(n, ch), _ecs_dphi(n, ch)]
            rows.append(row)
        notes = ["T linear grid [0.5, 1], step 0.0025; ECS exact"]
        return notes, cols, rows

    if figure_id in ("fig2a", "fig2b"):
        t, hi = (0.9, 1e3) if figure_id == "fig2a" else (0.99, 1e4)
        ch = LossChannel(t)
        cols = ["n", "dphi_classical_limit", "dphi_noon", "dphi_ecs_exact", "dphi_ecs_approx", "dphi_ecs_lossless"]
        rows = []
        for n in log_grid(1.0, hi):
            spec = ecs_from_mean_photons(n)
            rows.append([
                n,
                1.0 / math.sqrt(2.0 * t * n),
                _noon_dphi(n, ch),
                delta_phi_min(ecs_lossy_qfi(spec, ch).total),
                delta_phi_min(ecs_lossy_qfi_approx(n, ch).total),
                delta_phi_min(ecs_lossless_qfi(spec)),
            ])
        notes = [f"T={t:g}; n log grid [1, {hi:g}], {POINTS_PER_DECADE} points/decade"]
        return notes, cols, rows

    if figure_id == "fig3":
        grid = np.round(np.arange(850, 1000) / 1000.0, 6)
        cols = ["T", "root_lower", "root_upper", "fit_lower", "fit_upper"]
        rows = []
        for t in grid:
            roots = crossover_roots(t, search_max=1e5).roots
            lower, upper = (roots[0], roots[-1]) if len(roots) >= 2 else (math.nan, math.nan)
            fit_u, fit_l = fitted_boundaries(t)
            rows.append([t, lower, upper, fit_l, fit_u])
        notes = ["T grid 0.850..0.999 step 0.001; roots of the large-n crossover equation on [1, 1e5]; nan = no crossover"]
        return notes, cols, rows

    raise UsageError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")


def render_csv(figure_id: str) -> str:
    notes, cols, rows = figure_table(figure_id)
    buf = io.StringIO()
    buf.write(f"# ecsqfi {__version__} figure={figure_id}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_figure(figure_id: str, out: str | None) -> str:
    text = render_csv(figure_id)
    _write_text(text, out)
    return text


# -- validate ----------------------------------------------------------------

DEFAULT_ECS_ALPHA_SQ = (0.5, 1.0, 2.0, 4.0, 9.0, 16.0, 25.0)
DEFAULT_ECS_T = (0.5, 0.8, 0.9, 0.99, 1.0)
DEFAULT_NOON_N = (1, 2, 4, 8, 16)
DEFAULT_NOON_T = (0.5, 0.8, 0.9, 1.0)


@dataclass
class SweepConfig:
    state_kind: str = "ecs"
    values: tuple = DEFAULT_ECS_ALPHA_SQ  # |a|^2 for ecs, N for noon
    transmissions: tuple = DEFAULT_ECS_T
    phi: float = 0.7
    tail_tol: float = DEFAULT_TAIL_TOL
    threshold: float = DEFAULT_THRESHOLD
    out: str | None = None

    def __post_init__(self):
        if self.state_kind not in ("ecs", "noon"):
            raise UsageError(f"validate supports ecs and noon states, not {self.state_kind!r}")
        if not self.values or not self.transmissions:
            raise UsageError("empty validation grid")
        if not 0.0 < self.tail_tol < 1.0:
            raise UsageError("tail_tol must lie in (0, 1)")
        if any(not 0.0 <= t <= 1.0 for t in self.transmissions):
            raise UsageError("transmissions must lie in [0, 1]")


@dataclass
class ValidationReport:
    cases: list[dict] = field(default_factory=list)
    threshold: float = DEFAULT_THRESHOLD

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.cases)

    @property
    def max_rel_dev(self) -> float:
        devs = [c["rel_dev"] for c in self.cases if c["rel_dev"] is not None]
        return max(devs) if devs else math.nan


def _validate_case(config: SweepConfig, value, t: float) -> dict:
    channel = LossChannel(t)
    case = {"value": value, "T": t, "closed": None, "oracle": None, "rel_dev": None, "cross_dev": None}
    try:
        if config.state_kind == "ecs":
            spec = ecs_from_alpha_sq(value)
            n_max = choose_cutoff(spec.alpha_sq, config.tail_tol)
            rho = build_ecs_rho_analytic(spec, channel, config.phi, n_max, config.tail_tol)
            via = ecs_rho_via_channel(spec, channel, config.phi, n_max, config.tail_tol)
            case["cross_dev"] = float(np.max(np.abs(rho.rho - via.rho)))
            case["closed"] = ecs_lossy_qfi(spec, channel).total
        else:
            spec = NoonSpec(int(value))
            rho = build_noon_rho(spec, channel, config.phi)
            case["closed"] = noon_qfi(spec, channel)
        case["oracle"] = qfi_spectral(rho)
    except NumericalError as exc:
        case["status"] = f"error: {exc}"
        return case
    closed, oracle = case["closed"], case["oracle"]
    case["rel_dev"] = abs(closed - oracle) / closed if closed > 0 else abs(oracle)
    ok = case["rel_dev"] <= config.threshold
    if case["cross_dev"] is not None:
        ok = ok and case["cross_dev"] <= CROSS_CONSTRUCTION_TOL
    case["status"] = "pass" if ok else "FAIL"
    return case


def cmd_validate(config: SweepConfig) -> ValidationReport:
    """Closed form against the spectral Fock-space oracle over a parameter grid."""
    report = ValidationReport(threshold=config.threshold)
    for value in config.values:
        for t in config.transmissions:
            report.cases.append(_validate_case(config, value, t))
    if config.out is not None:
        _write_text(render_report_csv(config, report), config.out)
    return report


def render_report_csv(config: SweepConfig, report: ValidationReport) -> str:
    buf = io.StringIO()
    buf.write(f"# ecsqfi {__version__} validate state={config.state_kind} "
              f"threshold={fmt(config.threshold)} tail_tol={fmt(config.tail_tol)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    label = "alpha_sq" if config.state_kind == "ecs" else "N"
    writer.writerow([label, "T", "closed", "oracle", "rel_dev", "cross_dev", "status"])
    for c in report.cases:
        writer.writerow([
            fmt(c["value"]), fmt(c["T"]),
            *("" if c[k] is None else fmt(c[k]) for k in ("closed", "oracle", "rel_dev", "cross_dev")),
            c["status"],
        ])
    return buf.getvalue()


def format_report(report: ValidationReport) -> str:
    lines = []
    for c in report.cases:
        dev = "-" if c["rel_dev"] is None else f"{c['rel_dev']:.3e}"
        cross = "" if c["cross_dev"] is None else f"  cross={c['cross_dev']:.3e}"
        lines.append(f"{c['value']!s:>6} T={c['T']:<5g} rel_dev={dev}{cross}  {c['status']}")
    verdict = "PASS" if report.passed else "FAIL"
    lines.append(f"max rel_dev = {report.max_rel_dev:.3e} (threshold {report.threshold:.1e}): {verdict}")
    return "\n".join(lines) + "\n"


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ecsqfi", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("qfi", help="QFI and phase precision for one probe state")
    q.add_argument("--state", choices=("ecs", "noon", "superposition"), required=True)
    q.add_argument("--n", type=int, help="NOON photon number")
    q.add_argument("--nbar", type=float, help="ECS mean photon number")
    q.add_argument("--alpha-sq", type=float, help="ECS |alpha|^2")
    q.add_argument("--coeffs", help="comma-separated c_n for a NOON superposition (normalized for you)")
    loss = q.add_mutually_exclusive_group()
    loss.add_argument("--t", type=float, help="transmission T (default 1)")
    loss.add_argument("--r", type=float, help="loss rate R = 1 - T")
    q.add_argument("--phi", type=float, default=0.7)
    q.add_argument("--generator", choices=("n2", "halfdiff"), default="n2")
    q.add_argument("--mode", choices=("exact", "approx"), default="exact")
    q.add_argument("--oracle", action="store_true", help="also evaluate the Fock-space oracle")
    q.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    q.add_argument("--n-max", type=int, help="force the Fock cutoff")
    q.add_argument("--out", help="write the report here instead of stdout")

    f = sub.add_parser("figure", help="emit figure data as CSV")
    f.add_argument("figure_id", choices=FIGURES)
    f.add_argument("--out", help="CSV path (stdout if omitted)")

    v = sub.add_parser("validate", help="closed forms against the Fock-space oracle")
    v.add_argument("--state", choices=("ecs", "noon"), default="ecs")
    v.add_argument("--alpha-sq", type=float, nargs="*", help="ECS |alpha|^2 grid")
    v.add_argument("--n", type=int, nargs="*", help="NOON photon-number grid")
    v.add_argument("--t", type=float, nargs="*", help="transmission grid")
    v.add_argument("--phi", type=float, default=0.7)
    v.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    v.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    v.add_argument("--out", help="also write the per-case report as CSV")
    return p


def _sweep_config(args) -> SweepConfig:
    if args.state == "ecs":
        values = DEFAULT_ECS_ALPHA_SQ if args.alpha_sq is None else tuple(args.alpha_sq)
        ts = DEFAULT_ECS_T if args.t is None else tuple(args.t)
    else:
        values = DEFAULT_NOON_N if args.n is None else tuple(args.n)
        ts = DEFAULT_NOON_T if args.t is None else tuple(args.t)
    return SweepConfig(args.state, values, ts, args.phi, args.tail_tol, args.threshold, args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "qfi":
            _write_text(format_record(cmd_qfi(args)), args.out)
        elif args.command == "figure":
            cmd_figure(args.figure_id, args.out)
        else:
            report = cmd_validate(_sweep_config(args))
            sys.stdout.write(format_report(report))
            if not report.passed:
                return EXIT_VALIDATION
    except (UsageError, DomainError) as exc:
        print(f"ecsqfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"ecsqfi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"ecsqfi: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
