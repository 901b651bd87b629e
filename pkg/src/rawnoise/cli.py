"""Command-line interface: calibrate, synth, eval, sample-params, preview.

Exit codes: 0 success, 2 usage error, 3 data or file-format error,
4 calibration failure.  Every failure prints a single machine-parsable
line ``error: <category>: <message>`` to stderr, and partially written
output is removed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .calibration import CalibrationConfig, CameraProfile, calibrate_iso
from .errors import (
    CalibrationError,
    DegenerateDataError,
    DomainError,
    FormatError,
    InsufficientDataError,
)
from .fileio import (
    _atomic_write_bytes,
    read_frame,
    read_frame_meta,
    read_profile,
    write_frame,
    write_profile,
    write_report,
)
from .frames import FrameSet, pack_bayer
from .metrics import evaluate_pair
from .model import NOISE_COMPONENTS, SynthesisConfig, sample_noise_params
from .rng import RngStream
from .synthesis import synthesize_pair

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CALIBRATION = 4


def _fail(code: int, category: str, message) -> int:
    text = " ".join(str(message).split())
    print(f"error: {category}: {text}", file=sys.stderr)
    return code


def _components_arg(text: str) -> frozenset:
    names = frozenset(p.strip() for p in text.split(",") if p.strip())
    unknown = names - NOISE_COMPONENTS
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown noise components: {','.join(sorted(unknown))}"
        )
    return names


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rawnoise",
        description="Physics-based sensor noise calibration and low-light synthesis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate a camera noise profile from frames")
    p.add_argument("--flats", required=True, type=Path, help="directory of flat-field frames")
    p.add_argument("--biases", required=True, type=Path, help="directory of bias frames")
    p.add_argument("--out", required=True, type=Path, help="output profile JSON path")
    p.add_argument("--report", type=Path, help="optional diagnostics JSON path")
    p.add_argument("--seed", type=int, default=0, help="salt for internal subsampling")

    p = sub.add_parser("synth", help="generate noisy/clean training pairs")
    p.add_argument("--clean", required=True, type=Path, help="directory of clean frames")
    p.add_argument("--profile", required=True, type=Path, help="camera profile JSON")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--count", required=True, type=int, help="number of pairs")
    p.add_argument("--f-min", type=float, default=100.0, help="low-light factor lower bound")
    p.add_argument("--f-max", type=float, default=300.0, help="low-light factor upper bound")
    p.add_argument("--seed", type=int, default=0, help="synthesis seed")
    p.add_argument(
        "--disable",
        type=_components_arg,
        default=frozenset(),
        help="comma-separated noise components to disable (shot,read,row,quant)",
    )
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("eval", help="PSNR/SSIM between matching frame files")
    p.add_argument("--pred", required=True, type=Path, help="directory of predictions")
    p.add_argument("--ref", required=True, type=Path, help="directory of references")
    p.add_argument("--align", action="store_true", help="brightness-align before metrics")

    p = sub.add_parser("sample-params", help="draw noise parameter sets from a profile")
    p.add_argument("--profile", required=True, type=Path, help="camera profile JSON")
    p.add_argument("--count", required=True, type=int, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")

    p = sub.add_parser("preview", help="render a frame to an 8-bit grayscale image")
    p.add_argument("--in", dest="input", required=True, type=Path, help="frame raster path")
    p.add_argument("--out", required=True, type=Path, help="output 8-bit image path")
    return parser


# --------------------------------------------------------------------------
# calibrate


def _load_frames_dir(directory: Path) -> dict[int, list]:
    """All frames in a directory grouped by ISO, in filename order.

    The directory, not the sidecar kind tag, decides how frames are used;
    synthesized frames can serve as calibration input directly.
    """
    if not directory.is_dir():
        raise FormatError(f"{directory}: not a directory")
    paths = sorted(directory.glob("*.pgm"))
    if not paths:
        raise FormatError(f"{directory}: no .pgm frames found")
    by_iso: dict[int, list] = {}
    for path in paths:
        frame, _ = read_frame_meta(path)
        by_iso.setdefault(frame.iso, []).append(frame)
    return by_iso


def _flat_levels(frames: list) -> list[float]:
    """Illumination tags: exposure times when present, else clustered means."""
    if all(f.exposure_time_s is not None for f in frames):
        return [float(f.exposure_time_s) for f in frames]
    means = np.array([float(np.mean(f.data)) for f in frames])
    levels = np.empty(len(frames))
    current = None
    for idx in np.argsort(means):
        if current is None or means[idx] > current * 1.02:  # new cluster past 2%
            current = means[idx]
        levels[idx] = current
    return [float(v) for v in levels]


def _cmd_calibrate(args) -> int:
    flats_by_iso = _load_frames_dir(args.flats)
    biases_by_iso = _load_frames_dir(args.biases)
    isos = sorted(set(flats_by_iso) & set(biases_by_iso))
    missing = sorted(set(flats_by_iso) ^ set(biases_by_iso))
    if missing:
        raise CalibrationError(
            f"ISOs missing flats or biases: {', '.join(str(i) for i in missing)}"
        )
    if len(isos) < 3:
        raise CalibrationError(
            f"joint model needs >= 3 ISOs with flats and biases, got {len(isos)}"
        )
    camera_ids = {f.camera_id for fl in flats_by_iso.values() for f in fl}
    camera_ids |= {f.camera_id for fl in biases_by_iso.values() for f in fl}
    if len(camera_ids) != 1:
        raise FormatError(f"frames mix cameras: {', '.join(sorted(camera_ids))}")

    config = CalibrationConfig(seed=args.seed)
    reports = {}
    for iso in isos:
        flats = FrameSet(
            frames=flats_by_iso[iso],
            kind="flat_field",
            illumination_level=_flat_levels(flats_by_iso[iso]),
        )
        biases = FrameSet(frames=biases_by_iso[iso], kind="bias")
        reports[iso] = calibrate_iso(flats, biases, config)

    profile = CameraProfile.from_reports(camera_ids.pop(), reports)
    write_profile(profile, args.out)
    if args.report is not None:
        write_report(reports, profile.camera_id, args.report)
    print(f"calibrated {len(isos)} ISOs -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# synth

_WORKER_CTX: dict = {}


def _init_synth_worker(cleans, model, config, seed, out_dir) -> None:
    _WORKER_CTX.update(cleans=cleans, model=model, config=config, seed=seed, out_dir=out_dir)


def _synth_indices(indices: list[int]) -> None:
    cleans = _WORKER_CTX["cleans"]
    model = _WORKER_CTX["model"]
    config = _WORKER_CTX["config"]
    seed = _WORKER_CTX["seed"]
    out_dir = _WORKER_CTX["out_dir"]
    root = RngStream(seed).child("synth")
    for i in indices:
        clean = cleans[i % len(cleans)]
        noisy, clean_ref, params, f = synthesize_pair(clean, model, config, root.child(i))
        write_frame(
            noisy,
            out_dir / f"noisy_{i:05d}.pgm",
            kind="noisy",
            low_light_factor=f,
            noise_params=params,
            seed=seed,
        )
        write_frame(clean_ref, out_dir / f"clean_{i:05d}.pgm", kind="clean")


def _planned_paths(out_dir: Path, count: int) -> list[Path]:
    paths = []
    for i in range(count):
        for stem in (f"noisy_{i:05d}", f"clean_{i:05d}"):
            paths.append(out_dir / f"{stem}.pgm")
            paths.append(out_dir / f"{stem}.json")
    return paths


def _cmd_synth(args) -> int:
    if args.count < 1:
        raise DomainError(f"--count must be >= 1, got {args.count}")
    if args.workers < 1:
        raise DomainError(f"--workers must be >= 1, got {args.workers}")
    if not args.clean.is_dir():
        raise FormatError(f"{args.clean}: not a directory")
    clean_paths = sorted(args.clean.glob("*.pgm"))
    if not clean_paths:
        raise FormatError(f"{args.clean}: no .pgm frames found")
    cleans = [read_frame(p) for p in clean_paths]
    profile = read_profile(args.profile)
    config = SynthesisConfig(
        f_min=args.f_min,
        f_max=args.f_max,
        components=NOISE_COMPONENTS - args.disable,
    )

    out_dir = args.out
    created_dir = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        indices = list(range(args.count))
        if args.workers == 1:
            _init_synth_worker(cleans, profile.joint, config, args.seed, out_dir)
            _synth_indices(indices)
        else:
            chunks = [indices[w :: args.workers] for w in range(args.workers)]
            with ProcessPoolExecutor(
                max_workers=args.workers,
                initializer=_init_synth_worker,
                initargs=(cleans, profile.joint, config, args.seed, out_dir),
            ) as pool:
                list(pool.map(_synth_indices, chunks))
    except BaseException:
        for path in _planned_paths(out_dir, args.count):
            path.unlink(missing_ok=True)
        if created_dir:
            try:
                out_dir.rmdir()
            except OSError:
                pass
        raise
    print(f"wrote {args.count} pairs -> {out_dir}")
    return EXIT_OK


# --------------------------------------------------------------------------
# eval, sample-params, preview


def _fmt(v: float) -> str:
    return repr(float(v))


def _cmd_eval(args) -> int:
    for directory in (args.pred, args.ref):
        if not directory.is_dir():
            raise FormatError(f"{directory}: not a directory")
    names = sorted(
        {p.name for p in args.pred.glob("*.pgm")} & {p.name for p in args.ref.glob("*.pgm")}
    )
    if not names:
        raise FormatError(f"no common .pgm filenames between {args.pred} and {args.ref}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["name", "psnr_db", "ssim", "align_scalar"])
    results = []
    for name in names:
        pred = read_frame(args.pred / name)
        ref = read_frame(args.ref / name)
        result = evaluate_pair(pred.data, ref.data, peak=ref.saturation_dn, align=args.align)
        results.append(result)
        writer.writerow([name, _fmt(result.psnr), _fmt(result.ssim), _fmt(result.align_scalar)])
    writer.writerow(
        [
            "mean",
            _fmt(np.mean([r.psnr for r in results])),
            _fmt(np.mean([r.ssim for r in results])),
            _fmt(np.mean([r.align_scalar for r in results])),
        ]
    )
    return EXIT_OK


def _cmd_sample_params(args) -> int:
    if args.count < 1:
        raise DomainError(f"--count must be >= 1, got {args.count}")
    profile = read_profile(args.profile)
    root = RngStream(args.seed).child("params")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["index", "k", "lam", "sigma_tl", "sigma_r", "q"])
    for i in range(args.count):
        p = sample_noise_params(profile.joint, root.child(i))
        writer.writerow([i, _fmt(p.k), _fmt(p.lam), _fmt(p.sigma_tl), _fmt(p.sigma_r), _fmt(p.q)])
    return EXIT_OK


def _cmd_preview(args) -> int:
    frame = read_frame(args.input)
    planes = pack_bayer(frame.data, frame.bayer_pattern)
    gray = planes.mean(axis=0)
    top = max(float(gray.max()), 1e-9)
    img = np.rint(255.0 * np.clip(gray / top, 0.0, 1.0)).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    _atomic_write_bytes(args.out, header + img.tobytes())
    print(f"wrote preview -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------


_HANDLERS = {
    "calibrate": _cmd_calibrate,
    "synth": _cmd_synth,
    "eval": _cmd_eval,
    "sample-params": _cmd_sample_params,
    "preview": _cmd_preview,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except FormatError as exc:
        return _fail(EXIT_DATA, "format", exc)
    except CalibrationError as exc:
        return _fail(EXIT_CALIBRATION, "calibration", exc)
    except (InsufficientDataError, DegenerateDataError) as exc:
        if args.command == "calibrate":
            return _fail(EXIT_CALIBRATION, "calibration", exc)
        return _fail(EXIT_DATA, "data", exc)
    except DomainError as exc:
        return _fail(EXIT_DATA, "data", exc)
    except OSError as exc:
        return _fail(EXIT_DATA, "io", exc)


if __name__ == "__main__":
    sys.exit(main())
