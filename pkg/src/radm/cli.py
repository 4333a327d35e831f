"""Command-line driver: ``radm run | verify | spectrum | pulsatile``.

Exit codes: 0 ok, 1 configuration error, 2 numerical failure,
3 verification failure.
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import diagnostics, verify
from .config import ConfigError, PulsatileConfig, RunConfig
from .filters import SymbolTable
from .pulsatile import (
    BesselRangeError,
    BranchError,
    NearZeroDenominatorError,
    PulsatileCase,
    alpha_womersley,
    channel_profile,
    pipe_profile,
    womersley,
)
from .solver import BlowUpError, CFLViolation, ForcingError, Integrator, ModelParams, RADMSolver, SolverState, initial_field
from .spectral import CheckpointFormatError, read_checkpoint, write_checkpoint

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

log = logging.getLogger("radm")


def _slopes(spectrum, bands):
    out = []
    for lo, hi in bands:
        try:
            out.append(((lo, hi), diagnostics.fit_slope(spectrum, lo, hi)))
        except diagnostics.SlopeFitError:
            out.append(((lo, hi), float("nan")))
    return out


def _format_slopes(slopes):
    return " ".join(f"slope[{lo},{hi}]={s:.4f}" for (lo, hi), s in slopes)


def _write_spectrum(path, spectrum):
    with open(path, "w", newline="") as fh:
        spectrum.to_csv(fh)


def model_params(cfg):
    return ModelParams(
        alpha=cfg.alpha,
        nu=cfg.nu,
        N=cfg.N,
        dt=cfg.dt,
        n=cfg.n,
        forcing=cfg.forcing or None,
        steps=cfg.steps,
        cfl=cfg.cfl,
        cfl_action=cfg.cfl_action,
    )


def run(cfg, out=None):
    """Run one simulation described by ``cfg``; returns an exit code."""
    out = out or sys.stdout
    os.makedirs(cfg.output, exist_ok=True)
    with open(os.path.join(cfg.output, "config.txt"), "w") as fh:
        fh.write(cfg.to_text())
    params = model_params(cfg)
    solver = RADMSolver(params)
    state = SolverState(initial_field(cfg.n, cfg.seed, energy=cfg.init_energy, k0=cfg.k0))
    integ = Integrator(solver, state)
    avg_from = int(np.floor(cfg.average_start * cfg.steps))
    spectra = []

    def checkpoint(st):
        write_checkpoint(
            os.path.join(cfg.output, f"checkpoint_{st.step:06d}.radm"), st.v, st.time, cfg.alpha, cfg.nu, cfg.N
        )

    def sample_spectrum(st):
        spec = solver.spectrum(st)
        if cfg.spectrum_interval and st.step % cfg.spectrum_interval == 0:
            _write_spectrum(os.path.join(cfg.output, f"spectrum_{st.step:06d}.csv"), spec)
        if st.step >= avg_from:
            spectra.append(spec.E)

    log_path = os.path.join(cfg.output, "scalars.csv")
    with open(log_path, "w") as logf:
        diagnostics.write_scalar_log_header(logf)
        first = integ.report
        diagnostics.write_scalar_log_row(
            logf, 0, state.time, diagnostics.EnergyReport(first.energy, first.model_energy, first.dissipation, first.work, 0.0)
        )
        sample_spectrum(state)
        if cfg.checkpoint_interval:
            checkpoint(state)
        try:
            for _ in range(cfg.steps):
                st = integ.step()
                if st.step % cfg.log_interval == 0 or st.step == cfg.steps:
                    diagnostics.write_scalar_log_row(logf, st.step, st.time, integ.report)
                if (cfg.spectrum_interval and st.step % cfg.spectrum_interval == 0) or (
                    st.step >= avg_from and (not cfg.spectrum_interval or st.step % cfg.spectrum_interval == 0)
                ):
                    sample_spectrum(st)
                if cfg.checkpoint_interval and st.step % cfg.checkpoint_interval == 0:
                    checkpoint(st)
        except (BlowUpError, CFLViolation, ForcingError) as exc:
            logf.flush()
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL

    final = integ.state
    checkpoint_path = os.path.join(cfg.output, "final.radm")
    write_checkpoint(checkpoint_path, final.v, final.time, cfg.alpha, cfg.nu, cfg.N)
    spec = solver.spectrum(final)
    _write_spectrum(os.path.join(cfg.output, "spectrum_final.csv"), spec)
    if spectra:
        avg = diagnostics.Spectrum(spec.k, np.mean(spectra, axis=0), spec.EM)
        avg.EM = _model_spectrum(avg.k, avg.E, cfg)
        _write_spectrum(os.path.join(cfg.output, "spectrum_avg.csv"), avg)
        spec = avg
    r = integ.report
    print(
        f"final step={final.step} time={final.time:.6g} E={r.energy:.10g} E_M={r.model_energy:.10g} "
        f"balance={r.balance_residual if final.step else 0.0:.3e} {_format_slopes(_slopes(spec, cfg.bands))}",
        file=out,
    )
    return EXIT_OK


def _model_spectrum(k, E, cfg):
    from .filters import van_cittert_symbol

    ksq = k.astype(np.float64) ** 2
    return van_cittert_symbol(ksq, cfg.alpha, cfg.N) * (1.0 + cfg.alpha**2 * ksq) * 2.0 * E


def spectrum_command(path, out=None, bands=((4, 8), (16, 21))):
    out = out or sys.stdout
    ck = read_checkpoint(path)
    table = SymbolTable.build(ck.field.grid, ck.alpha, ck.N)
    spec = diagnostics.compute_spectrum(ck.field, table)
    spec.to_csv(out)
    print(f"# {_format_slopes(_slopes(spec, bands))}", file=out)
    return spec


def pulsatile_command(cfg, out=None):
    out = out or sys.stdout
    case = PulsatileCase(cfg.R, cfg.omega, cfg.nu, cfg.alpha)
    out.write(f"# geometry={cfg.geometry}\n# R={cfg.R!r}\n# omega={cfg.omega!r}\n# nu={cfg.nu!r}\n")
    out.write(f"# alpha={cfg.alpha!r}\n# Wo={womersley(case)!r}\n# alpha_Wo={alpha_womersley(case)!r}\n")
    if cfg.geometry == "channel":
        out.write(f"# t={cfg.t!r}\n")
        x = np.linspace(-cfg.R, cfg.R, cfg.npoints)
        w = channel_profile(case, cfg.t, x)
        out.write("x,w\n")
        for xi, wi in zip(x, w):
            out.write(f"{float(xi)!r},{float(wi)!r}\n")
    else:
        r = np.linspace(0.0, cfg.R, cfg.npoints)
        W = pipe_profile(case, r)
        out.write("r,ReW,ImW\n")
        for ri, wi in zip(r, W):
            out.write(f"{float(ri)!r},{float(wi.real)!r},{float(wi.imag)!r}\n")


def build_parser():
    p = argparse.ArgumentParser(prog="radm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a simulation from a key=value config file")
    r.add_argument("config")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")

    v = sub.add_parser("verify", help="run the built-in verification suites")
    v.add_argument("--inject", choices=verify.INJECTIONS, help="deliberately break one ingredient")

    s = sub.add_parser("spectrum", help="shell spectrum of a checkpoint as CSV")
    s.add_argument("checkpoint")
    s.add_argument("-o", "--output")
    s.add_argument("--band", action="append", default=[], metavar="LO:HI")

    q = sub.add_parser("pulsatile", help="exact pulsatile profile as CSV")
    q.add_argument("case")
    q.add_argument("-o", "--output")
    return p


def _open_out(path):
    return open(path, "w", newline="") if path else None


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "run":
        try:
            cfg = RunConfig.from_file(args.config)
            if args.set:
                from .config import parse_pairs

                pairs = parse_pairs(cfg.to_text())
                pairs.update(parse_pairs("\n".join(args.set)))
                cfg = RunConfig.from_dict(pairs)
            model_params(cfg)
        except (ConfigError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return run(cfg)

    if args.command == "verify":
        results = verify.run_all(inject=args.inject)
        print(verify.format_table(results))
        return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY

    if args.command == "spectrum":
        try:
            bands = [tuple(int(x) for x in b.split(":")) for b in args.band] or [(4, 8), (16, 21)]
        except ValueError:
            print(f"config error: bad band {args.band}", file=sys.stderr)
            return EXIT_CONFIG
        fh = _open_out(args.output)
        try:
            spectrum_command(args.checkpoint, fh or sys.stdout, bands)
        except (CheckpointFormatError, OSError) as exc:
            print(f"checkpoint error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        finally:
            if fh:
                fh.close()
        return EXIT_OK

    if args.command == "pulsatile":
        try:
            cfg = PulsatileConfig.from_file(args.case)
            PulsatileCase(cfg.R, cfg.omega, cfg.nu, cfg.alpha)
        except (ConfigError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        fh = _open_out(args.output)
        try:
            pulsatile_command(cfg, fh or sys.stdout)
        except (BesselRangeError, BranchError, NearZeroDenominatorError) as exc:
            print(f"numerical error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        finally:
            if fh:
                fh.close()
        return EXIT_OK
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
