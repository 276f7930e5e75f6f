"""``fracharm`` command-line driver.

Exit codes: 0 success, 1 input error, 2 numeric failure, 3 config error.
"""
import argparse
import logging
import os
import sys
import warnings

import numpy as np

from . import export
from .errors import ConfigError, FracHarmError
from .filtering import FilterSpec, apply_filter, smoothness_energy
from .fractional import imaginary_residue, pmfht_forward
from .lbo import dump_matrix_market
from .pipeline import COORDS, Pipeline, PipelineConfig, stage
from .ply_io import PointCloud, write_ply

log = logging.getLogger("fracharm")


def _order_tag(a):
    return f"{a:g}"


def _outdir(pipe):
    out = pipe.config.out
    if out is None:
        raise ConfigError("--out is required for this command")
    os.makedirs(out, exist_ok=True)
    return out


def _maybe_dump(pipe, out, outputs):
    if pipe.config.dump_matrices:
        dump_matrix_market(pipe.lbo, os.path.join(out, "Q.mtx"), os.path.join(out, "B.mtx"))
        outputs += ["Q.mtx", "B.mtx"]


def _channel_names(pipe):
    return list(pipe.config.channels)


def cmd_info(config, stream=None):
    """Print N, bounding box, epsilon, r/delta/t and eigensolve feasibility."""
    stream = stream or sys.stdout
    pipe = Pipeline(config)
    cloud = pipe.cloud
    p = pipe.parameters()
    lo, hi = cloud.points.min(axis=0), cloud.points.max(axis=0)
    lines = [
        f"points: {p['n']}" + (f" (downsampled from {p['n_input']})" if p["n"] != p["n_input"] else ""),
        f"bounding box min: {lo[0]:.6g} {lo[1]:.6g} {lo[2]:.6g}",
        f"bounding box max: {hi[0]:.6g} {hi[1]:.6g} {hi[2]:.6g}",
        f"epsilon: {p['epsilon']:.6g}",
        f"r: {p['r']:.6g}",
        f"delta: {p['delta']:.6g}",
        f"t: {p['t']:.6g}",
    ]
    if pipe.feasible:
        lines.append(f"dense eigensolve: feasible (N={p['n']} <= {config.dense_limit})")
    else:
        lines.append(f"dense eigensolve: WARNING N={p['n']} exceeds the dense limit "
                     f"{config.dense_limit}; pass --target-points to downsample")
    print("\n".join(lines), file=stream)
    report = dict(p, bbox_min=lo.tolist(), bbox_max=hi.tolist(), feasible=pipe.feasible)
    if config.out is not None:
        out = _outdir(pipe)
        export.write_json(os.path.join(out, "manifest.json"),
                          pipe.manifest("info", ["manifest.json"], report=report))
    return report


def cmd_basis(config):
    """Colored PLY per requested eigenfunction plus an eigenvalue CSV."""
    pipe = Pipeline(config)
    out = _outdir(pipe)
    basis = pipe.basis
    outputs = []
    with stage("export"):
        for k in config.modes:
            if k >= basis.n:
                raise ConfigError(f"mode {k} out of range for {basis.n} points")
            h = basis.H[:, k]
            colored = PointCloud(pipe.cloud.points, export.colorize(h, config.colormap),
                                 {"eigenfunction": h})
            name = f"basis_mode_{k}.ply"
            write_ply(colored, os.path.join(out, name), config.ply_format)
            outputs.append(name)
        with open(os.path.join(out, "lambdas.csv"), "w") as fh:
            fh.write("mode_index,lambda\n")
            for k, lam in enumerate(basis.lambdas):
                fh.write(f"{k},{float(lam)!r}\n")
        outputs.append("lambdas.csv")
        _maybe_dump(pipe, out, outputs)
        outputs.append("manifest.json")
        export.write_json(os.path.join(out, "manifest.json"), pipe.manifest(
            "basis", outputs, modes=[int(k) for k in config.modes],
            lambdas=[float(basis.lambdas[k]) for k in config.modes]))
    return outputs


def cmd_spectrum(config):
    """Per-order spectrum CSV/JSON and an SVG stem plot."""
    pipe = Pipeline(config)
    out = _outdir(pipe)
    opr, basis, f = pipe.operator, pipe.basis, pipe.signal
    channels = _channel_names(pipe)
    outputs = []
    residues = {}
    with stage("export"):
        for a in config.orders:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                sig = pmfht_forward(opr, f, a)
            tag = _order_tag(a)
            meta = dict(pipe.parameters(), order=float(a),
                        warnings=sorted({str(w.message) for w in caught}))
            stem = f"spectrum_a{tag}"
            export.write_spectrum_csv(os.path.join(out, stem + ".csv"), sig.coeffs,
                                      basis.lambdas, channels)
            export.write_spectrum_json(os.path.join(out, stem + ".json"), sig.coeffs,
                                       basis.lambdas, channels, meta)
            export.stem_plot_svg(os.path.join(out, stem + ".svg"), sig.coeffs, channels,
                                 config.plot, title=f"order a = {tag}")
            outputs += [stem + ".csv", stem + ".json", stem + ".svg"]
            residues[tag] = imaginary_residue(sig.coeffs)
        _maybe_dump(pipe, out, outputs)
        outputs.append("manifest.json")
        export.write_json(os.path.join(out, "manifest.json"), pipe.manifest(
            "spectrum", outputs, orders=[float(a) for a in config.orders],
            relative_imaginary_part=residues))
    return outputs


def cmd_filter(config):
    """Filter the channels at each order; write PLYs, spectra and a manifest."""
    pipe = Pipeline(config)
    out = _outdir(pipe)
    opr, basis, f = pipe.operator, pipe.basis, pipe.signal
    channels = _channel_names(pipe)
    outputs = []
    runs = {}
    with stage("filter"):
        before = {c: smoothness_energy(basis, f[:, k]) for k, c in enumerate(channels)}
        for a in config.orders:
            spec = FilterSpec(config.filter_kind, config.cutoff_lo, config.cutoff_hi, a,
                              rolloff=config.rolloff)
            mask = spec.mask(basis.n)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                sig = pmfht_forward(opr, f, a)
                g, residue = apply_filter(opr, basis, f, spec, full_output=True)
            tag = _order_tag(a)
            pts = pipe.cloud.points.copy()
            scalars = dict(pipe.cloud.scalars)
            for k, c in enumerate(channels):
                if c in COORDS:
                    pts[:, COORDS.index(c)] = g[:, k]
                else:
                    scalars[c] = g[:, k]
            name = f"filtered_a{tag}.ply"
            write_ply(PointCloud(pts, pipe.cloud.colors, scalars), os.path.join(out, name),
                      config.ply_format)
            export.write_spectrum_csv(os.path.join(out, f"spectrum_before_a{tag}.csv"),
                                      sig.coeffs, basis.lambdas, channels)
            export.write_spectrum_csv(os.path.join(out, f"spectrum_after_a{tag}.csv"),
                                      sig.coeffs * mask[:, None], basis.lambdas, channels)
            outputs += [name, f"spectrum_before_a{tag}.csv", f"spectrum_after_a{tag}.csv"]
            runs[tag] = {
                "order": float(a),
                "imaginary_residue": residue,
                "smoothness_energy_before": before,
                "smoothness_energy_after": {
                    c: smoothness_energy(basis, g[:, k]) for k, c in enumerate(channels)},
                "warnings": sorted({str(w.message) for w in caught}),
            }
        _maybe_dump(pipe, out, outputs)
        outputs.append("manifest.json")
        export.write_json(os.path.join(out, "manifest.json"), pipe.manifest(
            "filter", outputs, filter={"kind": config.filter_kind, "cutoff_lo": config.cutoff_lo,
                                       "cutoff_hi": config.cutoff_hi, "rolloff": config.rolloff},
            runs=runs))
    return outputs


COMMANDS = {"info": cmd_info, "basis": cmd_basis, "spectrum": cmd_spectrum, "filter": cmd_filter}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _modes(text):
    try:
        parts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or index list, got {text!r}")
    if len(parts) == 1 and "," not in text:
        return tuple(range(1, parts[0] + 1))
    return tuple(parts)


def build_parser():
    p = _Parser(prog="fracharm",
                description="Fractional manifold harmonic transforms on point clouds.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True, help="input PLY file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--target-points", type=int, help="farthest-point downsample to N points")
    p.add_argument("--epsilon", type=float, help="override the sampling density estimate")
    p.add_argument("--r-scale", type=float, default=10.0, help="PCA radius in units of epsilon")
    p.add_argument("--delta-scale", type=float, default=10.0,
                   help="Voronoi/kernel radius in units of epsilon")
    p.add_argument("--clip-scale", type=float, default=0.5,
                   help="Voronoi clip-disk radius in units of delta")
    t = p.add_mutually_exclusive_group()
    t.add_argument("--t", type=float, help="heat parameter")
    t.add_argument("--t-exponent", type=float, default=0.5,
                   help="exponent margin m in t = epsilon**(1/2 + m)")
    o = p.add_mutually_exclusive_group()
    o.add_argument("--order", type=float, help="fractional order a")
    o.add_argument("--orders", type=_float_list, help="comma-separated fractional orders")
    p.add_argument("--filter", choices=("low", "high", "band"), default="low")
    p.add_argument("--cutoff-lo", type=int, default=0)
    p.add_argument("--cutoff-hi", type=int)
    p.add_argument("--rolloff", type=int, default=0, help="raised-cosine ramp width in modes")
    p.add_argument("--modes", type=_modes, default=(1, 2, 3, 4, 5, 6),
                   help="K for modes 1..K, or an explicit comma list like 0,1,2")
    p.add_argument("--plot", choices=sorted(export.PLOT_QUANTITIES), default="magnitude")
    p.add_argument("--format", choices=("ascii", "binary"), default="binary")
    p.add_argument("--colormap", default="bwr")
    p.add_argument("--channels", default="x,y,z",
                   help="comma-separated channels: x, y, z or vertex property names")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dense-limit", type=int, default=4000)
    p.add_argument("--dump-matrices", action="store_true",
                   help="also write Q and B in Matrix Market format")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    if args.orders is not None:
        orders = args.orders
    elif args.order is not None:
        orders = (args.order,)
    else:
        orders = (1.0,)
    return PipelineConfig(
        input=args.input,
        out=args.out,
        target_points=args.target_points,
        epsilon=args.epsilon,
        r_scale=args.r_scale,
        delta_scale=args.delta_scale,
        clip_scale=args.clip_scale,
        t=args.t,
        t_exponent=args.t_exponent,
        orders=tuple(orders),
        filter_kind={"low": "lowpass", "high": "highpass", "band": "bandpass"}[args.filter],
        cutoff_lo=args.cutoff_lo,
        cutoff_hi=args.cutoff_hi,
        rolloff=args.rolloff,
        modes=tuple(args.modes),
        plot=args.plot,
        ply_format="ascii" if args.format == "ascii" else "binary_little_endian",
        colormap=args.colormap,
        channels=tuple(c.strip() for c in args.channels.split(",") if c.strip()),
        seed=args.seed,
        dump_matrices=args.dump_matrices,
        dense_limit=args.dense_limit,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](config_from_args(args))
    except FracHarmError as exc:
        where = getattr(exc, "stage", None)
        prefix = f"[{where}] " if where else ""
        print(f"fracharm: error: {prefix}{exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"fracharm: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
