"""Batch command-line front end.

Subcommands: catastrophe, condensate, defect, pi-field, compare-thm1,
compare-thm2, selftest.  A flat key=value config file can seed any long
option; explicit flags win.  Exit codes: 2 usage, 3 numeric failure,
4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

EXIT_NUMERIC = 3
EXIT_CAP = 4


def _parse_range(spec: str):
    try:
        lo, hi, n = spec.split(":")
        return float(lo), float(hi), int(n)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"range must be lo:hi:n, got {spec!r}") from exc


def _parse_range_pair(spec: str):
    try:
        a, b = spec.split(",")
        return _parse_range(a), _parse_range(b)
    except argparse.ArgumentTypeError:
        raise
    except Exception as exc:
        raise argparse.ArgumentTypeError(
            f"grid must be relo:rehi:n,imlo:imhi:n, got {spec!r}"
        ) from exc


def _profile_from_args(args):
    from .laxmap import gaussian_profile, sech_profile, table_profile

    if args.profile == "sech":
        return sech_profile(args.amplitude)
    if args.profile == "gaussian":
        return gaussian_profile(args.depth, args.width)
    if args.profile == "table":
        if not args.profile_table:
            raise SystemExit(2)
        data = np.loadtxt(args.profile_table, delimiter=",", skiprows=1)
        return table_profile(data[:, 0], data[:, 1])
    raise SystemExit(2)


def _emit_json(payload: dict, target: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)


def _outpath(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_catastrophe(args) -> int:
    from .gfunction import locate_catastrophe

    profile = _profile_from_args(args)
    data = locate_catastrophe(profile, with_phase=args.with_phase)
    payload = data.to_json_dict()
    payload["profile"] = profile.name
    _emit_json(payload, args.json if args.json else _outpath(args, "catastrophe.json"))
    if args.sign_chart is not None:
        from .gfunction import CatastropheFinder, phi_field

        finder = CatastropheFinder(profile)
        t_chart = args.sign_chart_t if args.sign_chart_t is not None else data.t_gc - 5e-4
        eta = finder.solve_eta(t_chart, eta_guess=data.theta - 0.01).eta
        (re_lo, re_hi, n_re), (im_lo, im_hi, n_im) = args.sign_chart
        res, ims, grid = phi_field(finder, eta, t_chart, (re_lo, re_hi), (im_lo, im_hi), n_re, n_im)
        with open(_outpath(args, "sign_chart.csv"), "w") as fh:
            fh.write("re_w,im_w,re_phi\n")
            for i in range(n_im):
                for j in range(n_re):
                    fh.write(f"{res[j]:.17g},{ims[i]:.17g},{grid[i, j]:.17g}\n")
    return 0


def cmd_condensate(args) -> int:
    from .condensate import bohr_sommerfeld, grid_evaluate

    profile = _profile_from_args(args)
    sd = bohr_sommerfeld(profile, args.N)
    x_lo, x_hi, nx = args.x
    t_lo, t_hi, nt = args.t
    grid = grid_evaluate(sd, (x_lo, x_hi), (t_lo, t_hi), nx, nt)
    base = f"condensate_N{args.N}"
    grid.write_csv(_outpath(args, base + ".csv"), _outpath(args, base + ".json"))
    return 0


def cmd_defect(args) -> int:
    from .defect import DefectParams, defect_grid

    x_lo, x_hi, nx = args.X
    t_lo, t_hi, nt = args.T
    if args.catalog:
        m_list = [math.sin(k * math.pi / 24.0) ** 2 for k in (1, 2, 3, 4, 5, 6, 7)]
        omegas = [0.0, math.pi / 3.0, 2.0 * math.pi / 3.0, math.pi]
        for i, m in enumerate(m_list):
            for j, om in enumerate(omegas):
                g = defect_grid(DefectParams(m, om), (x_lo, x_hi), (t_lo, t_hi), nx, nt)
                base = f"defect_m{i}_omega{j}"
                g.write_csv(_outpath(args, base + ".csv"), _outpath(args, base + ".json"))
        return 0
    g = defect_grid(DefectParams(args.m, args.omega), (x_lo, x_hi), (t_lo, t_hi), nx, nt)
    g.write_csv(_outpath(args, "defect.csv"), _outpath(args, "defect.json"))
    return 0


def cmd_pi_field(args) -> int:
    from .painleve1 import h_grid, pole_field

    poles = pole_field(radius=args.radius)
    with open(_outpath(args, "pi_poles.csv"), "w") as fh:
        fh.write("re_tau,im_tau,re_h0,im_h0,residue_check\n")
        for r in poles:
            fh.write(
                f"{r.tau_p.real:.17g},{r.tau_p.imag:.17g},{r.h0.real:.17g},"
                f"{r.h0.imag:.17g},{r.residue_check:.17g}\n"
            )
    if args.h_grid:
        (re_lo, re_hi, n_re) = args.h_grid[0]
        (im_lo, im_hi, n_im) = args.h_grid[1]
        tr, ti, H = h_grid((re_lo, re_hi), (im_lo, im_hi), n_re, n_im, poles=poles)
        with open(_outpath(args, "pi_hgrid.csv"), "w") as fh:
            fh.write("re_tau,im_tau,re_h,im_h\n")
            for i in range(n_im):
                for j in range(n_re):
                    fh.write(
                        f"{tr[j]:.17g},{ti[i]:.17g},{H[i, j].real:.17g},{H[i, j].imag:.17g}\n"
                    )
    return 0


def _cmd_compare(args, mode: str) -> int:
    from .universality import compare

    profile = _profile_from_args(args)
    report = compare(
        mode,
        profile,
        args.N,
        window=args.window,
        tau_radius=args.tau_radius,
        n_side=args.n_side,
        phase=args.phase,
        n_grid_thm2=args.n_grid,
    )
    report.write(_outpath(args, f"compare_{mode}.json"))
    return 0


def cmd_selftest(args) -> int:
    from .identities import run_identity_suite

    results = run_identity_suite(n_draws=args.draws)
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  max_res={r.max_residual:.3e}  tol={r.tolerance:g}  draws={r.draws}")
        ok &= r.passed
    print(f"identity suites: {sum(r.passed for r in results)}/{len(results)} passed")
    return 0 if ok else EXIT_NUMERIC


def _add_profile_args(sp) -> None:
    sp.add_argument("--profile", choices=("sech", "gaussian", "table"), default=None)
    sp.add_argument("--amplitude", type=float, default=0.25)
    sp.add_argument("--depth", type=float, default=1.0)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--profile-table", default=None, help="CSV with columns x,G")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sgfluxon", description=__doc__)
    ap.add_argument("--config", default=None, help="flat key=value file; flags win")
    ap.add_argument("--out", default=".", help="output directory")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("catastrophe", help="locate the gradient catastrophe")
    _add_profile_args(sp)
    sp.add_argument("--with-phase", action="store_true")
    sp.add_argument("--json", default=None, help="output path or - for stdout")
    sp.add_argument("--sign-chart", type=_parse_range_pair, default=None,
                    metavar="relo:rehi:n,imlo:imhi:n",
                    help="also emit a Re(phi) sign chart CSV near the catastrophe")
    sp.add_argument("--sign-chart-t", type=float, default=None)
    sp.set_defaults(func=cmd_catastrophe)

    sp = sub.add_parser("condensate", help="evaluate a condensate field grid")
    _add_profile_args(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--x", type=_parse_range, required=True, metavar="lo:hi:n")
    sp.add_argument("--t", type=_parse_range, required=True, metavar="lo:hi:n")
    sp.set_defaults(func=cmd_condensate)

    sp = sub.add_parser("defect", help="evaluate defect solution grids")
    sp.add_argument("--m", type=float, default=0.416708)
    sp.add_argument("--omega", type=float, default=0.0)
    sp.add_argument("--X", type=_parse_range, default=(-20.0, 20.0, 201), metavar="lo:hi:n")
    sp.add_argument("--T", type=_parse_range, default=(-20.0, 20.0, 201), metavar="lo:hi:n")
    sp.add_argument("--catalog", action="store_true", help="sweep the catalog parameter grid")
    sp.set_defaults(func=cmd_defect)

    sp = sub.add_parser("pi-field", help="tritronquee pole field / h grid")
    sp.add_argument("--radius", type=float, default=8.0)
    sp.add_argument("--h-grid", type=_parse_range_pair, default=None,
                    metavar="relo:rehi:n,imlo:imhi:n")
    sp.set_defaults(func=cmd_pi_field)

    for mode in ("thm1", "thm2"):
        sp = sub.add_parser(f"compare-{mode}", help=f"universality comparison ({mode})")
        _add_profile_args(sp)
        sp.add_argument("--N", type=int, nargs="+", required=True)
        sp.add_argument("--window", type=float, default=8.0)
        sp.add_argument("--tau-radius", type=float, default=3.0)
        sp.add_argument("--n-side", type=int, default=21)
        sp.add_argument("--n-grid", type=int, default=41)
        sp.add_argument("--phase", choices=("computed", "fit"), default="fit")
        sp.set_defaults(func=lambda a, m=mode: _cmd_compare(a, m))

    sp = sub.add_parser("selftest", help="run the identity suites")
    sp.add_argument("--draws", type=int, default=24)
    sp.set_defaults(func=cmd_selftest)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv):
    """Merge a flat key=value config under the command-line flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            if flag not in argv:
                extra.extend([flag, value.strip()])
    return argv + extra


_RANGE_FLAGS = {"--x", "--t", "--X", "--T", "--h-grid"}


def _merge_range_flags(argv):
    """Fold `--x -6:6:400` into `--x=-6:6:400` so argparse accepts the dash."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    argv = _apply_config(ap, argv)
    argv = _merge_range_flags(argv)
    args = ap.parse_args(argv)
    if getattr(args, "profile", "unset") is None:
        ap.error("a --profile is required for this command")
    try:
        return args.func(args)
    except (ValueError,) as exc:
        if "cap" in str(exc) or "exceeds" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CAP
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
