"""Command-line front end.

Subcommands:

* ``synth``    write a builtin (optionally noisy) signal and its truth CSV
* ``analyze``  run the full transform/ridge/recovery pipeline on a signal
* ``bench``    Monte-Carlo noise sweep scoring IF and mode recovery
* ``bounds``   evaluate the theoretical error-bound report
* ``slice``    export one slice of a dumped transform volume to CSV

Options resolve in three layers: built-in defaults, then an INI-style
``key = value`` config file (``--config``, sections [signal] [grid]
[window] [detection] [noise] [output]), then command-line flags.
``--dump-config`` prints the resolved configuration and exits.

Exit codes: 0 success, 2 configuration error, 3 pipeline error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from .bounds import BoundsInput, error_bounds
from .pipeline import (
    DetectionConfig,
    TruthArrays,
    analyze_signal,
    bounds_input_from_truth,
    run_bench,
)
from .presets import BUILTIN_NAMES, make_builtin
from .recovery import write_components_csv
from .ridges import RidgeCountError, write_ridges_csv
from .signal_model import (
    add_noise,
    read_signal_csv,
    write_signal_csv,
    write_truth_csv,
)
from .transform import (
    TscrGrid,
    WindowSpec,
    read_volume_binary,
    write_slice_csv,
    write_volume_binary,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3


class ConfigError(Exception):
    pass


class PipelineError(Exception):
    pass


_CONFIG_KEYS = {
    "signal": ["builtin", "file", "c", "r", "amplitude", "duration", "rate", "complex", "tone_freq"],
    "grid": ["n_voices", "f_min", "f_max", "lambda_min", "lambda_max", "lambda_count"],
    "window": ["sigma", "sigma_table", "mu", "truncation_radius"],
    "detection": [
        "threshold_mode",
        "threshold",
        "k",
        "min_ridge_frac",
        "refine",
        "renormalize",
        "delta",
        "delta1",
    ],
    "noise": ["snr_db", "seed", "trials", "snrs"],
    "output": ["dir"],
}


def _load_config_file(path) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    out: dict = {}
    for section in parser.sections():
        if section not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _CONFIG_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            out[f"{section}.{key}"] = value
    return out


def _resolve(args, file_cfg: dict, section: str, key: str, cast, default=None):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    file_val = file_cfg.get(f"{section}.{key}")
    if file_val is not None:
        if cast is bool:
            return file_val.strip().lower() in ("1", "true", "yes", "on")
        return cast(file_val)
    return default


def _parse_sigma_table(text: str):
    knots = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            b_str, s_str = part.split(":")
            knots.append((float(b_str), float(s_str)))
        except ValueError as exc:
            raise ConfigError(f"bad sigma table entry {part!r}; expected b:sigma") from exc
    if not knots:
        raise ConfigError("empty sigma table")
    knots.sort()
    return [k[0] for k in knots], [k[1] for k in knots]


def _parse_float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


class _Run:
    """Resolved configuration for one command invocation."""

    def __init__(self, args):
        self.args = args
        self.file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
        self.resolved: dict = {}

    def get(self, section: str, key: str, cast=str, default=None):
        value = _resolve(self.args, self.file_cfg, section, key, cast, default)
        if value is not None:
            self.resolved[f"{section}.{key}"] = value
        return value

    def dump(self) -> str:
        lines = []
        by_section: dict = {}
        for full_key, value in sorted(self.resolved.items()):
            section, key = full_key.split(".", 1)
            by_section.setdefault(section, []).append((key, value))
        for section, items in by_section.items():
            lines.append(f"[{section}]")
            for key, value in items:
                lines.append(f"{key} = {value}")
            lines.append("")
        return "\n".join(lines)


def _load_signal_and_builtin(run: _Run):
    """Signal plus, when a builtin was requested, its config bundle."""
    builtin = run.get("signal", "builtin")
    file_path = run.get("signal", "file")
    if builtin and file_path:
        raise ConfigError("give either a builtin name or a signal file, not both")
    if builtin:
        if builtin not in BUILTIN_NAMES:
            raise ConfigError(f"unknown builtin {builtin!r}; choose from {BUILTIN_NAMES}")
        kwargs = {}
        for key in ("tone_freq", "amplitude", "duration", "rate"):
            val = run.get("signal", key, float)
            if val is not None:
                kwargs[key] = val
        c = run.get("signal", "c", float)
        r = run.get("signal", "r", float)
        if c is not None:
            kwargs["chirp_start" if builtin == "chirp" else "tone_freq"] = c
        if r is not None:
            kwargs["chirp_rate"] = r
        if run.get("signal", "complex", bool, False):
            kwargs["complex_output"] = True
        cfg = make_builtin(builtin, **kwargs)
        return cfg.signal, cfg
    if file_path:
        try:
            return read_signal_csv(file_path), None
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read signal file {file_path}: {exc}") from exc
    raise ConfigError("a signal source is required (--builtin or --signal)")


def _make_grid(run: _Run, signal, builtin_cfg):
    n_voices = run.get("grid", "n_voices", int)
    f_min = run.get("grid", "f_min", float)
    f_max = run.get("grid", "f_max", float)
    lam_min = run.get("grid", "lambda_min", float)
    lam_max = run.get("grid", "lambda_max", float)
    lam_count = run.get("grid", "lambda_count", int)
    if builtin_cfg is not None:
        return builtin_cfg.make_grid(
            n_voices=n_voices,
            f_min=f_min,
            f_max=f_max,
            lambda_min=lam_min,
            lambda_max=lam_max,
            lambda_count=lam_count,
        )
    if lam_min is None or lam_max is None or lam_count is None:
        raise ConfigError(
            "file signals need an explicit chirp-rate grid: "
            "--lambda-min, --lambda-max and --lambda-count"
        )
    try:
        return TscrGrid.dyadic(
            rate=signal.sample_rate,
            b_values=signal.times,
            f_min=f_min if f_min is not None else 2.0,
            f_max=f_max,
            n_voices=n_voices if n_voices is not None else 32,
            lambda_min=lam_min,
            lambda_max=lam_max,
            lambda_count=lam_count,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _make_window(run: _Run, builtin_cfg):
    sigma = run.get("window", "sigma", float)
    sigma_table = run.get("window", "sigma_table")
    mu = run.get("window", "mu", float, 1.0)
    trunc = run.get("window", "truncation_radius", float, 5.0)
    try:
        if sigma is not None and sigma_table:
            raise ConfigError("give either --sigma or --sigma-table, not both")
        if sigma_table:
            b_pts, s_pts = _parse_sigma_table(sigma_table)
            return WindowSpec.from_table(b_pts, s_pts, mu=mu, truncation_radius=trunc)
        if sigma is not None:
            return WindowSpec.constant(sigma, mu=mu, truncation_radius=trunc)
        if builtin_cfg is not None:
            base = builtin_cfg.window
            return WindowSpec(base.sigma_fn, mu=mu, truncation_radius=trunc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError("a window width is required (--sigma or --sigma-table)")


def _make_detection(run: _Run, builtin_cfg) -> DetectionConfig:
    mode = run.get("detection", "threshold_mode", str, "relative")
    if mode not in ("relative", "absolute"):
        raise ConfigError(f"threshold mode must be relative or absolute, got {mode!r}")
    default_thr = builtin_cfg.threshold_rel if builtin_cfg is not None else 0.3
    threshold = run.get("detection", "threshold", float, default_thr)
    k = run.get("detection", "k", int, builtin_cfg.k_components if builtin_cfg else None)
    min_frac = run.get("detection", "min_ridge_frac", float, 0.05)
    refine = run.get("detection", "refine", bool, False)
    delta = run.get("detection", "delta", float, 0.2)
    delta1 = run.get("detection", "delta1", float, 30.0)
    try:
        return DetectionConfig(
            threshold_mode=mode,
            threshold=threshold,
            delta=delta,
            delta1=delta1,
            k_expected=k,
            min_length_frac=min_frac,
            refine=refine,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(run: _Run) -> Path:
    out = run.get("output", "dir", str, ".")
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    return path


def _maybe_dump(run: _Run) -> bool:
    if getattr(run.args, "dump_config", False):
        print(run.dump())
        return True
    return False


def cmd_synth(args) -> int:
    run = _Run(args)
    signal, builtin_cfg = _load_signal_and_builtin(run)
    if builtin_cfg is None:
        raise ConfigError("synth requires a builtin signal")
    snr_db = run.get("noise", "snr_db", float)
    seed = run.get("noise", "seed", int, 0)
    out = _out_dir(run)
    if _maybe_dump(run):
        return EXIT_OK
    if snr_db is not None:
        signal = add_noise(signal, snr_db, seed)
    write_signal_csv(out / "signal.csv", signal)
    write_truth_csv(out / "truth.csv", signal.times, builtin_cfg.truth)
    print(f"wrote {out / 'signal.csv'} ({len(signal)} samples) and {out / 'truth.csv'}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    run = _Run(args)
    signal, builtin_cfg = _load_signal_and_builtin(run)
    grid = _make_grid(run, signal, builtin_cfg)
    window = _make_window(run, builtin_cfg)
    detection = _make_detection(run, builtin_cfg)
    renormalize = run.get(
        "detection", "renormalize", bool, builtin_cfg.renormalize if builtin_cfg else False
    )
    snr_db = run.get("noise", "snr_db", float)
    seed = run.get("noise", "seed", int, 0)
    out = _out_dir(run)
    if _maybe_dump(run):
        return EXIT_OK
    if snr_db is not None:
        signal = add_noise(signal, snr_db, seed)
    try:
        result = analyze_signal(signal, grid, window, detection, renormalize=renormalize)
    except (RidgeCountError, RuntimeError) as exc:
        raise PipelineError(f"no usable ridges: {exc}") from exc
    write_ridges_csv(out / "ridges.csv", result.ridge_set, mu=window.mu)
    write_components_csv(out / "components.csv", result.estimates)
    write_volume_binary(out / "volume.bin", result.volume)
    print(
        f"analyzed {len(signal)} samples: {result.ridge_set.k_detected} ridges -> "
        f"{out / 'ridges.csv'}, {out / 'components.csv'}, {out / 'volume.bin'}"
    )
    return EXIT_OK


def cmd_bench(args) -> int:
    run = _Run(args)
    signal, builtin_cfg = _load_signal_and_builtin(run)
    grid = _make_grid(run, signal, builtin_cfg)
    window = _make_window(run, builtin_cfg)
    detection = _make_detection(run, builtin_cfg)
    renormalize = run.get(
        "detection", "renormalize", bool, builtin_cfg.renormalize if builtin_cfg else True
    )
    snrs_text = run.get("noise", "snrs", str, "0,5,10,15,20")
    snrs = _parse_float_list(snrs_text)
    trials = run.get("noise", "trials", int, 20)
    seed = run.get("noise", "seed", int, 1234)
    truth_file = getattr(args, "truth", None)
    out = _out_dir(run)
    if _maybe_dump(run):
        return EXIT_OK
    if builtin_cfg is not None:
        truth = TruthArrays.from_ground_truth(builtin_cfg.truth, signal.times, signal.is_real)
    elif truth_file:
        truth = TruthArrays.from_csv(truth_file, signal.times, signal.is_real)
    else:
        raise ConfigError("bench on a file signal requires --truth with IF and waveform columns")
    result = run_bench(
        signal, truth, grid, window, detection, snrs, trials, seed=seed, renormalize=renormalize
    )
    result.to_csv(out / "metrics.csv")
    n_cells = len(snrs) * trials
    print(
        f"bench: {n_cells} runs ({len(snrs)} SNRs x {trials} trials), "
        f"{len(result.failures)} failures -> {out / 'metrics.csv'}"
    )
    for si, snr in enumerate(result.snr_values):
        if_part = "/".join(f"{v:.4f}" for v in result.if_nmse_mean[si])
        mode_part = "/".join(f"{v:.4f}" for v in result.mode_nmse_mean[si])
        print(f"  {snr:g} dB: IF {if_part}  mode {mode_part}")
    if result.failures and np.all(np.isnan(result.if_nmse_mean)):
        raise PipelineError("every bench trial failed")
    return EXIT_OK


def cmd_bounds(args) -> int:
    run = _Run(args)
    out = _out_dir(run)
    if _maybe_dump(run):
        return EXIT_OK
    required = {"eps1": args.eps1, "eps3": args.eps3, "delta": args.delta, "delta1": args.delta1}
    missing = [k for k, v in required.items() if v is None]
    if missing:
        raise ConfigError(f"bounds requires --{', --'.join(missing)}")
    try:
        builtin = getattr(args, "builtin", None)
        if builtin:
            cfg = make_builtin(builtin)
            b = args.b if args.b is not None else 0.5 * (
                cfg.signal.start_time + cfg.signal.end_time
            )
            sigma = args.sigma if args.sigma is not None else cfg.window.sigma(b)
            grid = cfg.make_grid()
            a1 = args.a1 if args.a1 is not None else float(grid.a_values[0])
            a2 = args.a2 if args.a2 is not None else float(grid.a_values[-1])
            inp = bounds_input_from_truth(
                cfg.truth,
                b,
                sigma=sigma,
                mu=args.mu if args.mu is not None else cfg.window.mu,
                delta=args.delta,
                delta1=args.delta1,
                a1=a1,
                a2=a2,
                eps1=args.eps1,
                eps3=args.eps3,
            )
        else:
            needed = {
                "sigma": args.sigma,
                "a1": args.a1,
                "a2": args.a2,
                "amplitudes": args.amplitudes,
                "ifs": args.ifs,
                "crs": args.crs,
            }
            missing = [k for k, v in needed.items() if v is None]
            if missing:
                raise ConfigError(
                    f"bounds without a builtin requires --{', --'.join(missing)}"
                )
            inp = BoundsInput(
                eps1=args.eps1,
                eps3=args.eps3,
                sigma=args.sigma,
                mu=args.mu if args.mu is not None else 1.0,
                delta=args.delta,
                delta1=args.delta1,
                a1=args.a1,
                a2=args.a2,
                amplitudes=_parse_float_list(args.amplitudes),
                if_values=_parse_float_list(args.ifs),
                cr_values=_parse_float_list(args.crs),
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = error_bounds(inp)
    path = out / "bounds.json"
    path.write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.to_json())
    print(f"wrote {path}")
    return EXIT_OK


def cmd_slice(args) -> int:
    run = _Run(args)
    out = _out_dir(run)
    try:
        volume = read_volume_binary(args.volume)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read volume {args.volume}: {exc}") from exc
    if args.axis not in ("b", "a", "lambda"):
        raise ConfigError(f"axis must be b, a or lambda, got {args.axis!r}")
    path = out / f"slice_{args.axis}_{args.value:g}.csv"
    write_slice_csv(path, volume, args.axis, args.value)
    print(f"wrote {path}")
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", help="INI-style configuration file")
    parser.add_argument("--dump-config", action="store_true", help="print resolved config and exit")
    parser.add_argument("--out", dest="dir", help="output directory (default: current)")


def _add_signal_opts(parser):
    parser.add_argument("--builtin", help=f"builtin signal: {', '.join(BUILTIN_NAMES)}")
    parser.add_argument("--signal", dest="file", help="signal CSV (t,re,im)")
    parser.add_argument("--c", type=float, help="tone frequency / chirp start frequency (Hz)")
    parser.add_argument("--r", type=float, help="chirp rate (Hz/s) for the chirp builtin")
    parser.add_argument("--amplitude", type=float, help="builtin amplitude")
    parser.add_argument("--duration", type=float, help="builtin duration (s)")
    parser.add_argument("--rate", type=float, help="builtin sample rate (Hz)")
    parser.add_argument("--complex", dest="complex", action="store_const", const=True,
                        default=None, help="emit the complex exponential form")


def _add_grid_opts(parser):
    parser.add_argument("--n-voices", dest="n_voices", type=int, help="scale voices per octave")
    parser.add_argument("--f-min", dest="f_min", type=float, help="lowest IF on the scale grid (Hz)")
    parser.add_argument("--f-max", dest="f_max", type=float, help="highest IF on the scale grid (Hz)")
    parser.add_argument("--lambda-min", dest="lambda_min", type=float, help="chirp-rate grid start")
    parser.add_argument("--lambda-max", dest="lambda_max", type=float, help="chirp-rate grid end")
    parser.add_argument("--lambda-count", dest="lambda_count", type=int, help="chirp-rate grid size")


def _add_window_opts(parser):
    parser.add_argument("--sigma", type=float, help="constant window width (s)")
    parser.add_argument("--sigma-table", dest="sigma_table",
                        help="piecewise-linear width, e.g. '0:0.05,0.5:0.16,1:0.05'")
    parser.add_argument("--mu", type=float, help="kernel frequency parameter (default 1)")
    parser.add_argument("--truncation-radius", dest="truncation_radius", type=float,
                        help="window truncation radius in widths (default 5)")


def _add_detection_opts(parser):
    parser.add_argument("--threshold-mode", dest="threshold_mode",
                        choices=("relative", "absolute"))
    parser.add_argument("--threshold", type=float, help="peak detection threshold")
    parser.add_argument("--k", type=int, help="expected number of components")
    parser.add_argument("--min-ridge-frac", dest="min_ridge_frac", type=float,
                        help="minimum ridge length as a fraction of frames")
    parser.add_argument("--refine", action="store_const", const=True, default=None,
                        help="enable sub-grid peak refinement")
    parser.add_argument("--renormalize", action="store_const", const=True, default=None,
                        help="renormalize truncated edge windows")
    parser.add_argument("--delta", type=float, help="scale-zone half width (dimensionless)")
    parser.add_argument("--delta1", type=float, help="chirp-rate zone half width (Hz/s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tscr",
        description="Time-scale-chirp-rate analysis of multicomponent signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a builtin signal and its ground truth")
    _add_common(p)
    _add_signal_opts(p)
    p.add_argument("--snr-db", dest="snr_db", type=float, help="add noise at this SNR")
    p.add_argument("--seed", type=int, help="noise seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="run the recovery pipeline")
    _add_common(p)
    _add_signal_opts(p)
    _add_grid_opts(p)
    _add_window_opts(p)
    _add_detection_opts(p)
    p.add_argument("--snr-db", dest="snr_db", type=float, help="add noise before analysis")
    p.add_argument("--seed", type=int, help="noise seed")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="Monte-Carlo noise sweep")
    _add_common(p)
    _add_signal_opts(p)
    _add_grid_opts(p)
    _add_window_opts(p)
    _add_detection_opts(p)
    p.add_argument("--truth", help="truth CSV for file signals (if_k + wave_re_k/wave_im_k)")
    p.add_argument("--snrs", help="comma-separated SNR list in dB (default 0,5,10,15,20)")
    p.add_argument("--trials", type=int, help="noise realizations per SNR (default 20)")
    p.add_argument("--seed", type=int, help="base seed (default 1234)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bounds", help="evaluate the error-bound report")
    _add_common(p)
    p.add_argument("--builtin", help="take amplitudes/IFs/chirp rates from a builtin's truth")
    p.add_argument("--b", type=float, help="analysis time for builtin truth (default: mid-record)")
    p.add_argument("--eps1", type=float, help="amplitude modulation bound (1/s)")
    p.add_argument("--eps3", type=float, help="third phase derivative bound (Hz/s^2)")
    p.add_argument("--delta", type=float, help="scale-zone half width")
    p.add_argument("--delta1", type=float, help="chirp-rate zone half width")
    p.add_argument("--sigma", type=float, help="window width at the analysis time")
    p.add_argument("--mu", type=float, help="kernel frequency parameter")
    p.add_argument("--a1", type=float, help="smallest scale of the evaluation region")
    p.add_argument("--a2", type=float, help="largest scale of the evaluation region")
    p.add_argument("--amplitudes", help="comma-separated component amplitudes")
    p.add_argument("--ifs", help="comma-separated component IFs (Hz)")
    p.add_argument("--crs", help="comma-separated component chirp rates (Hz/s)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("slice", help="export a volume slice to CSV")
    _add_common(p)
    p.add_argument("--volume", required=True, help="volume dump from analyze")
    p.add_argument("--axis", required=True, help="slice axis: b, a or lambda")
    p.add_argument("--value", required=True, type=float, help="coordinate of the slice")
    p.set_defaults(func=cmd_slice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except RidgeCountError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
