"""Command line entry point: ``mff tau|spectrum|verify|sample|project``.

Every CSV starts with a ``# config=<json>`` comment carrying the effective
configuration, followed by a header row.  Floats are written with ``repr``
(shortest round-trip form), so identical inputs give byte-identical files.
Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 resource
budget exceeded.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig, load_config, section_int, section_ints, section_number, section_numbers
from .exceptions import ConfigError, DegeneracyError, DomainError, MFFError, ResourceError, UnsupportedCodeError
from .experiments import coarse_spectrum, exponent_trace
from .measure import DigitMeasure
from .plotting import line_plot_svg
from .projection import _cell_count, interval_of_word, nu_log_mass_interval, word_of_index
from .spectrum import spectrum_domain, spectrum_point, tau_limits, tau_n, theta
from .verification import run_verify

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_RESOURCE = 0, 1, 2, 3
PROJECT_ROW_LIMIT = 2**16


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv(cfg: RunConfig, header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config={cfg.echo()}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


# -- subcommands ----------------------------------------------------------------

def cmd_tau(cfg: RunConfig) -> tuple[str, str | None]:
    sec = cfg.section("tau")
    qs = section_numbers(sec, "q_grid", [k / 4 for k in range(-8, 9)], "tau")
    depths = section_ints(sec, "depths", [255, 65535], "tau", 1)
    for d in depths:
        if d > cfg.schedule.max_depth:
            raise ConfigError(f"tau.depths: {d} exceeds schedule.max_depth {cfg.schedule.max_depth}")
    header = ["q", "theta_a", "theta_b", "tau_lower", "tau_upper", *(f"tau_n@{d}" for d in depths)]
    rows = []
    for q in qs:
        upper, lower = tau_limits(cfg.params, q)
        rows.append([q, theta(cfg.params, "a", q), theta(cfg.params, "b", q), lower, upper,
                     *(tau_n(cfg.params, cfg.schedule, d, q) for d in depths)])
    svg = None
    if qs:
        cols = list(zip(*rows))
        series = [("theta_a", qs, cols[1]), ("theta_b", qs, cols[2])]
        series += [(f"tau_n@{d}", qs, cols[5 + k]) for k, d in enumerate(depths)]
        svg = line_plot_svg(series, "moment scaling functions", "q", "tau")
    return _csv(cfg, header, rows), svg


def _alpha_grid(cfg: RunConfig, sec: dict) -> list[float]:
    if "alpha_grid" in sec:
        return section_numbers(sec, "alpha_grid", [], "spectrum")
    points = section_int(sec, "points", 41, "spectrum", 0)
    dom = spectrum_domain(cfg.params)
    if dom.empty or points == 0:
        return []
    # interior grid: the endpoints themselves are outside the open domain
    return [dom.alpha_min + (dom.alpha_max - dom.alpha_min) * (k + 1) / (points + 1)
            for k in range(points)]


def cmd_spectrum(cfg: RunConfig) -> tuple[str, str | None]:
    sec = cfg.section("spectrum")
    alphas = _alpha_grid(cfg, sec)
    header = ["alpha", "q_a", "q_b", "h_a", "h_b", "f_dim", "f_Dim", "Dim_valid", "status"]
    rows, ok_rows = [], []
    for alpha in alphas:
        try:
            pt = spectrum_point(cfg.params, alpha)
        except DomainError as exc:
            status = "degenerate" if isinstance(exc, DegeneracyError) else "out-of-domain"
            rows.append([alpha, "", "", "", "", "", "", "", status])
            continue
        rows.append([alpha, pt.q_a, pt.q_b, pt.h_a, pt.h_b, pt.f_dim, pt.f_Dim, pt.Dim_valid, "ok"])
        ok_rows.append(pt)
    points = []
    coarse = sec.get("coarse")
    if coarse is not None:
        if not isinstance(coarse, dict):
            raise ConfigError("spectrum.coarse: expected an object")
        depth = section_int(coarse, "depth", 16, "spectrum.coarse", 1)
        bins = section_int(coarse, "bins", 20, "spectrum.coarse", 1)
        hist = coarse_spectrum(DigitMeasure.base(cfg.params, cfg.schedule), cfg.code, depth, bins)
        points.append((f"coarse n={depth}", [r["alpha"] for r in hist], [r["log_count"] for r in hist]))
    series = [("f_dim", [p.alpha for p in ok_rows], [p.f_dim for p in ok_rows]),
              ("f_Dim", [p.alpha for p in ok_rows], [p.f_Dim for p in ok_rows])]
    svg = line_plot_svg(series, "level-set dimensions", "alpha", "dimension", points)
    return _csv(cfg, header, rows), svg


def cmd_verify(cfg: RunConfig, workers: int) -> tuple[str, bool]:
    report = run_verify(cfg, workers)
    report["config"] = cfg.raw
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return text, report["passed"]


def _sampling_measure(cfg: RunConfig, sec: dict) -> tuple[DigitMeasure, str]:
    alpha = section_number(sec, "alpha", None, "sample")
    q = section_number(sec, "q", None, "sample")
    if alpha is not None and q is not None:
        raise ConfigError("sample: give at most one of 'alpha' and 'q'")
    if alpha is not None:
        return DigitMeasure.tilted_alpha(cfg.params, cfg.schedule, alpha), f"alpha={alpha!r}"
    if q is not None:
        return DigitMeasure.tilted_q(cfg.params, cfg.schedule, q), f"q={q!r}"
    return DigitMeasure.base(cfg.params, cfg.schedule), "base"


def cmd_sample(cfg: RunConfig) -> tuple[str, str | None]:
    """Exponent traces of ``nu`` along sampled (or constant) digit streams."""
    sec = cfg.section("sample")
    depths = section_ints(sec, "depths", [16, 256, 4096, 65535], "sample", 1)
    samples = section_int(sec, "samples", 10, "sample", 0)
    nu = DigitMeasure.base(cfg.params, cfg.schedule)
    header = ["sample", "depth", "exponent"]
    rows, series = [], []
    if not depths:
        return _csv(cfg, header, rows), None
    n = max(depths)
    if n > cfg.schedule.max_depth:
        raise ConfigError(f"sample.depths: {n} exceeds schedule.max_depth {cfg.schedule.max_depth}")
    if "constant_digit" in sec:
        digit = section_int(sec, "constant_digit", 0, "sample", 0)
        if digit >= min(cfg.params.c1, cfg.params.c2):
            raise ConfigError(f"sample.constant_digit: {digit} is not a digit of both alphabets")
        # a constant digit stream names the point x directly
        images = [np.full(n, digit, dtype=np.int64)]
    else:
        sampler, _ = _sampling_measure(cfg, sec)
        images = [cfg.code.forward(cfg.schedule, sampler.sample(n, cfg.seed, i)) for i in range(samples)]
    for i, image in enumerate(images):
        trace = exponent_trace(nu, cfg.code, image, depths)
        rows.extend([i, d, v] for d, v in zip(trace.depths, trace.values))
        series.append((f"sample {i}", list(trace.depths), list(trace.values)))
    svg = line_plot_svg(series[:5], "coarse exponents", "depth", "exponent")
    return _csv(cfg, header, rows), svg


def cmd_project(cfg: RunConfig) -> tuple[str, str | None]:
    """Generation-``n`` basic intervals with their ``nu`` masses."""
    sec = cfg.section("project")
    depth = section_int(sec, "depth", 8, "project", 0)
    if depth > cfg.schedule.max_depth:
        raise ConfigError(f"project.depth: {depth} exceeds schedule.max_depth {cfg.schedule.max_depth}")
    total = _cell_count(cfg.schedule, depth)
    if "indices" in sec:
        indices = section_ints(sec, "indices", [], "project", 0)
        bad = [i for i in indices if i >= total]
        if bad:
            raise ConfigError(f"project.indices: {bad[0]} is outside [0, {total})")
    else:
        if total > PROJECT_ROW_LIMIT:
            raise ResourceError(f"depth {depth} has {total} intervals; list 'indices' explicitly "
                                f"(limit {PROJECT_ROW_LIMIT})")
        indices = range(total)
    nu = DigitMeasure.base(cfg.params, cfg.schedule)
    header = ["index", "word", "left", "right", "log_nu"]
    rows, xs, ys = [], [], []
    for i in indices:
        interval = interval_of_word(cfg.schedule, word_of_index(cfg.schedule, depth, i))
        log_nu = nu_log_mass_interval(nu, cfg.code, interval)
        rows.append([i, "".join(map(str, interval.word)) or "-", str(interval.left),
                     str(interval.right), log_nu])
        xs.append(float(interval.left))
        ys.append(log_nu - interval.log_length)
    svg = line_plot_svg([("log density", xs, ys)], f"projected measure, depth {depth}", "x", "log(nu(I)/|I|)")
    return _csv(cfg, header, rows), svg


# -- entry point -------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mff", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=("tau", "spectrum", "verify", "sample", "project"))
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--svg", help="also write an SVG plot here")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for sampling")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.workers < 1:
        print("mff: error: --workers must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = load_config(args.config, args.seed)
        svg = None
        status = EXIT_OK
        if args.command == "verify":
            text, passed = cmd_verify(cfg, args.workers)
            status = EXIT_OK if passed else EXIT_FAILED
        else:
            handler = {"tau": cmd_tau, "spectrum": cmd_spectrum,
                       "sample": cmd_sample, "project": cmd_project}[args.command]
            text, svg = handler(cfg)
        _emit(text, args.out)
        if args.svg:
            if svg is None:
                svg = line_plot_svg([], args.command, "", "")
            Path(args.svg).write_text(svg, encoding="utf-8", newline="\n")
        return status
    except ResourceError as exc:
        print(f"mff: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, DomainError, UnsupportedCodeError, OSError) as exc:
        print(f"mff: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MFFError as exc:
        print(f"mff: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
