"""Command-line front end producing plot-ready tables.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys
from importlib import metadata

import numpy as np

from toprot.classical import Molecule, get_molecule, point_from_gamma, simulate_tre
from toprot.errors import DomainError, NumericalError, ToprotError
from toprot.quantum_spectrum import spectrum
from toprot.rotnum_classical import Definition, separatrix_asymptote, theta_cl, tre_distance
from toprot.rotnum_quantum import convergence_study, em_lattice, theta_q_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "unknown"


def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _choice(values):
    lookup = {v.lower(): v for v in values}

    def parse(text):
        key = str(text).lower()
        if key not in lookup:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(values)}")
        return lookup[key]

    return parse


def read_config(path):
    """Parse a ``key = value`` file; blank lines and ``#`` comments are ignored."""
    config = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DomainError(f"cannot read config file {path!r}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        config[key.replace("-", "_")] = value
    return config


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--molecule", help="preset name: water, ethylene, s4")
    common.add_argument("--A", type=float, dest="A", help="rotational constant A in cm^-1")
    common.add_argument("--B", type=float, dest="B", help="rotational constant B in cm^-1")
    common.add_argument("--C", type=float, dest="C", help="rotational constant C in cm^-1")
    common.add_argument("--config", help="key = value file merged under the command line")
    common.add_argument("--format", type=_choice(["csv", "json"]), default="csv")
    common.add_argument("--output", "-o", help="output path (default: standard output)")

    parser = _Parser(prog="toprot", description="Rotation numbers of asymmetric top molecules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="rotational levels")
    p.add_argument("--j", type=int, help="single angular momentum j")
    p.add_argument("--jmin", type=int, default=0)
    p.add_argument("--jmax", type=int)
    p.add_argument("--h", type=float, default=1.0)

    p = sub.add_parser("em", parents=[common], help="energy-momentum lattice and boundary curves")
    p.add_argument("--jmax", type=int, default=20)
    p.add_argument("--h", type=float, default=1.0)

    p = sub.add_parser("theta-cl", parents=[common], help="classical rotation number against gamma")
    p.add_argument("--gamma-min", type=float, default=-0.1)
    p.add_argument("--gamma-max", type=float, default=0.1)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--J", type=float, default=1.0, dest="J")

    p = sub.add_parser("theta-q", parents=[common], help="quantum rotation number grid")
    p.add_argument("--jmax", type=int, default=20)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--convention", type=_choice(["oscillating", "rotating"]), default="oscillating")
    p.add_argument("--representative", type=_choice(["mean", "lower", "upper"]), default="mean")

    p = sub.add_parser("converge", parents=[common], help="semiclassical convergence table")
    p.add_argument("--gamma", type=_float_list, default=[-0.3])
    p.add_argument("--J", type=float, default=10.0, dest="J")
    p.add_argument("--h-list", type=_float_list, default=[1.0, 0.5, 0.2, 0.1])
    p.add_argument("--convention", type=_choice(["oscillating", "rotating"]), default="oscillating")
    p.add_argument("--representative", type=_choice(["mean", "lower", "upper"]), default="mean")

    p = sub.add_parser("tre", parents=[common], help="tennis-racket distance and simulated flip")
    p.add_argument("--J", type=float, default=1.0, dest="J")
    parser.subcommands = sub.choices
    return parser


def resolve_molecule(args):
    constants = [args.A, args.B, args.C]
    if any(c is not None for c in constants):
        if any(c is None for c in constants):
            raise DomainError("give all of --A, --B and --C")
        if not all(math.isfinite(c) and c > 0 for c in constants):
            raise DomainError("constants must be positive and finite")
        if not (args.A < args.B < args.C):
            raise DomainError("constants must satisfy A < B < C")
        return Molecule(args.molecule or "custom", args.A, args.B, args.C)
    return get_molecule(args.molecule or "water")


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"--{name} must be positive, got {value!r}")


def _cmd_spectrum(mol, args):
    _check_positive("h", args.h)
    if args.j is not None:
        js = [args.j]
    else:
        jmax = args.jmin if args.jmax is None else args.jmax
        js = list(range(args.jmin, jmax + 1))
    if not js or min(js) < 0:
        raise DomainError("j range must be non-empty and non-negative")
    rows = []
    for j in js:
        for lvl in spectrum(mol, j, args.h):
            rows.append({"j": lvl.j, "Ka": lvl.Ka, "Kc": lvl.Kc, "J": lvl.J, "E": lvl.E})
    return rows


def _cmd_em(mol, args):
    _check_positive("h", args.h)
    if args.jmax < 0:
        raise DomainError("--jmax must be >= 0")
    levels, curves = em_lattice(mol, args.jmax, args.h)
    curve_at = {row[0]: row for row in curves}
    rows = []
    for j, J, E, ka, kc in levels:
        _, ea, eb, ec = curve_at[J]
        rows.append({"j": j, "J": J, "E": E, "Ka": ka, "Kc": kc, "E_A": ea, "E_B": eb, "E_C": ec})
    return rows


def _cmd_theta_cl(mol, args):
    _check_positive("J", args.J)
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    if not args.gamma_min <= args.gamma_max:
        raise DomainError("--gamma-min must not exceed --gamma-max")
    lo = max(args.gamma_min, mol.A / mol.B - 1.0)
    hi = min(args.gamma_max, mol.C / mol.B - 1.0)
    if lo > hi:
        raise DomainError("gamma range lies outside the energy-momentum diagram")
    asym = separatrix_asymptote(mol)
    rows = []
    for gamma in np.linspace(lo, hi, args.n):
        gamma = float(gamma)
        pt = point_from_gamma(mol, gamma, args.J)
        row = {"gamma": gamma, "regime": pt.regime.value}
        if pt.regime.value == "Separatrix":
            row.update(theta_cl=None, dynamical=None, geometric=None, theta_cl_rotating=None, asymptote=None)
        else:
            res = theta_cl(mol, pt)
            rot = theta_cl(mol, pt, Definition.ROTATING).theta_cl if pt.regime.value == "Rotating" else None
            row.update(
                theta_cl=res.theta_cl,
                dynamical=res.dynamical_part,
                geometric=res.geometric_part,
                theta_cl_rotating=rot,
                asymptote=float(asym(gamma)),
            )
        rows.append(row)
    return rows


def _cell_row(cell):
    return {
        "j": cell.j,
        "p": cell.p,
        "convention": cell.convention.value,
        "J_anchor": cell.J_anchor,
        "E_anchor": cell.E_anchor,
        "gamma_anchor": cell.gamma_anchor,
        "theta_q": cell.theta_q,
        "classical_ref": cell.classical_ref,
        "status": cell.status,
    }


def _cmd_theta_q(mol, args):
    _check_positive("h", args.h)
    return [_cell_row(c) for c in theta_q_grid(mol, args.jmax, args.h, args.convention, args.representative)]


def _cmd_converge(mol, args):
    _check_positive("J", args.J)
    if not args.h_list or not args.gamma:
        raise DomainError("need at least one gamma and one h")
    for h in args.h_list:
        _check_positive("h-list", h)
    probes = [(g, args.J) for g in args.gamma]
    rows = []
    for r in convergence_study(mol, probes, args.h_list, args.convention, args.representative):
        row = {"h": r.h, "target_gamma": r.target_gamma, "target_J": r.target_J, "status": r.status}
        cell = r.cell
        row.update(
            j=None if cell is None else cell.j,
            p=None if cell is None else cell.p,
            gamma_anchor=None if cell is None else cell.gamma_anchor,
            theta_q=None if cell is None else cell.theta_q,
            classical_ref=None if cell is None else cell.classical_ref,
            error=r.error,
        )
        rows.append(row)
    return rows


def _cmd_tre(mol, args):
    _check_positive("J", args.J)
    rows = []
    for side in (Definition.OSCILLATING, Definition.ROTATING):
        gamma = tre_distance(mol, side)
        sim = simulate_tre(mol, args.J, gamma)
        rows.append(
            {
                "side": side.value,
                "gamma_star": gamma,
                "theta_cl": theta_cl(mol, point_from_gamma(mol, gamma, args.J)).theta_cl,
                "delta_psi": sim.delta_psi,
                "delta_phi": sim.delta_phi,
            }
        )
    return rows


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "em": _cmd_em,
    "theta-cl": _cmd_theta_cl,
    "theta-q": _cmd_theta_q,
    "converge": _cmd_converge,
    "tre": _cmd_tre,
}


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".15g")
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return float(format(value, ".15g")) if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(rows, fmt, meta):
    if fmt == "json":
        payload = {"meta": meta, "rows": [{k: _json_value(v) for k, v in row.items()} for row in rows]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(k)) for k in header])
    return buf.getvalue()


def _parse(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        config = read_config(known.config)
        command = next((a for a in argv if a in COMMANDS), None)
        if command is None:
            raise DomainError("a subcommand is required")
        subparser = parser.subcommands[command]
        dests = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - dests)
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**config)
    return parser.parse_args(argv)


def run(argv=None):
    """Run the CLI and return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        mol = resolve_molecule(args)
        rows = COMMANDS[args.command](mol, args)
        params = {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("command", "config", "format", "output", "molecule", "A", "B", "C")
        }
        meta = {
            "command": args.command,
            "molecule": {"name": mol.name, "A": mol.A, "B": mol.B, "C": mol.C},
            "parameters": params,
            "version": _version(),
        }
        text = render(rows, args.format, meta)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except DomainError as exc:
        print(f"toprot: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"toprot: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ToprotError as exc:  # pragma: no cover - every subclass is either of the above
        print(f"toprot: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"toprot: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
