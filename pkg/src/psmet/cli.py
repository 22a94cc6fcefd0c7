"""``psmet`` command line.

Exit codes: 0 success, 1 theorem/limit violation, 2 usage or parse error,
3 numerical domain error. Data goes to stdout (or ``--out``), diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import io as _stringio
import re
import sys

from . import costrate, fisher, io, kdq, postselect, protocols, qcore, theorems
from .errors import InputError, LimitMismatch, NumericalDomainError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psmet", description="Postselected quantum metrology toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def out_flag(sp):
        sp.add_argument("--out", help="write output to this file instead of stdout")

    sp = sub.add_parser("qfi", help="QFI of a pure state under a generator")
    sp.add_argument("--generator", required=True)
    sp.add_argument("--state", required=True)
    out_flag(sp)

    sp = sub.add_parser("psqfi", help="postselected QFI of a pure state")
    sp.add_argument("--generator", required=True)
    sp.add_argument("--state", required=True)
    sp.add_argument("--projector", required=True)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--step", type=float, default=None, help="finite-difference step")
    out_flag(sp)

    sp = sub.add_parser("kdq", help="doubly extended KD distribution of the evolved state")
    sp.add_argument("--generator", required=True)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--state")
    src.add_argument("--density")
    sp.add_argument("--projector", required=True)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    out_flag(sp)

    def protocol_flags(sp):
        sp.add_argument("--protocol", choices=("supp3", "supp4"), required=True)
        sp.add_argument("--eigs", required=True, help="comma-separated ascending eigenvalues")
        sp.add_argument("--k", type=int, default=1, help="index of a_k (supp3)")
        sp.add_argument("--theta0", type=float, default=0.0)

    sp = sub.add_parser("sweep", help="(phi, delta_theta) grid of a divergent construction")
    protocol_flags(sp)
    sp.add_argument("--phi", default="0.02:1.0:50", help="grid a:b:n")
    sp.add_argument("--dtheta", default="-0.01:0.01:41", help="grid a:b:n")
    sp.add_argument("--var-theta0", type=float, default=1e-6)
    out_flag(sp)

    sp = sub.add_parser("limits", help="ordered delta_theta -> 0, phi -> 0 limits")
    protocol_flags(sp)
    out_flag(sp)

    sp = sub.add_parser("theorem-check", help="randomized theorem suites")
    sp.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    sp.add_argument("--trials", type=_positive_int, required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    out_flag(sp)

    sp = sub.add_parser("costrate", help="information-cost rates")
    sp.add_argument("--fisher", type=_nonneg_float, required=True,
                    help="Fisher information without postselection")
    sp.add_argument("--fisher-ps", type=_nonneg_float, required=True)
    sp.add_argument("--p-ps", type=float, required=True)
    sp.add_argument("--c-prepare", type=_nonneg_float, required=True)
    sp.add_argument("--c-measure", type=_nonneg_float, required=True)
    sp.add_argument("--c-postselect", type=_nonneg_float, default=0.0)
    sp.add_argument("--trials", type=_positive_int, default=1)
    out_flag(sp)
    return p


_NEG_VALUE = re.compile(r"^-[\d.]")


def _glue_negative_values(argv):
    # argparse refuses values like "-1,1,3" or "-0.01:0.01:41"; rewrite as --flag=value
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEG_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _protocol_config(args, **extra) -> protocols.ProtocolConfig:
    return protocols.ProtocolConfig(io.parse_floats(args.eigs), k_index=args.k,
                                    theta0=args.theta0, **extra)


def cmd_qfi(args):
    A = io.load_operator(args.generator)
    psi = io.load_state(args.state)
    rep = fisher.qfi_pure_generator(psi, A)
    best, _ = fisher.max_qfi(A)
    doc = {"qfi": rep.value, "max_qfi": best, "delta_a": qcore.spectral_range(A),
           "method": rep.method}
    return io.dumps(doc) + "\n", EXIT_OK


def cmd_psqfi(args):
    A = io.load_operator(args.generator)
    psi0 = io.load_state(args.state)
    ps = postselect.Postselection.from_projector(io.load_operator(args.projector))
    rep = postselect.postselected_qfi(psi0, A, ps, args.theta)
    fd = postselect.postselected_qfi_fd(psi0, A, ps, args.theta, args.step)
    psi = qcore.evolve_state(psi0, A, args.theta)
    kd = kdq.kd_doubly_extended(psi, A, ps.projector)
    neg = kdq.negativity(kd, None)
    best, _ = fisher.max_qfi(A)
    p = postselect.apply_postselection(psi, ps).p_ps
    doc = {"qfi_ps": rep.value, "qfi_ps_fd": fd.value, "qfi_kd": kdq.qfi_from_kd(kd).value,
           "p_ps": p, "qfi_times_pps": rep.value * p, "max_qfi": best,
           "delta_a": qcore.spectral_range(A), "anomalous": rep.value > best * (1 + 1e-6),
           "min_real": neg.min_real, "method": rep.method}
    return io.dumps(doc) + "\n", EXIT_OK


def cmd_kdq(args):
    A = io.load_operator(args.generator)
    F = io.load_operator(args.projector)
    if args.state is not None:
        rho0 = qcore.ket_bra(qcore.as_state(io.load_state(args.state)))
    else:
        rho0 = qcore.as_density(io.load_operator(args.density))
    kd = kdq.kd_doubly_extended(qcore.evolve(rho0, A, args.theta), A, F)
    if args.format == "csv":
        buf = _stringio.StringIO()
        kdq.write_csv(kd, buf)
        return buf.getvalue(), EXIT_OK
    neg = kdq.negativity(kd, "all")
    doc = {"dim": kd.dim, "eigs_a": kd.eigs_a, "eigs_f": kd.eigs_f,
           "total": float(kd.values.sum().real),
           "negativity": {"min_real": neg.min_real, "negativity_mass": neg.negativity_mass,
                          "max_imag_abs": neg.max_imag_abs, "is_classical": neg.is_classical}}
    try:
        cond_neg = kdq.negativity(kd, None)
        doc["p_ps"] = kdq.conditional_kd(kd, None)[1]
        doc["qfi_kd"] = kdq.qfi_from_kd(kd).value
        doc["conditional_min_real"] = cond_neg.min_real
    except InputError:
        pass  # F is not a projector; only the unconditioned report applies
    return io.dumps(doc) + "\n", EXIT_OK


def cmd_sweep(args):
    cfg = _protocol_config(args, var_theta0=args.var_theta0)
    rows = protocols.sweep(args.protocol, cfg, io.parse_grid(args.phi), io.parse_grid(args.dtheta))
    buf = _stringio.StringIO()
    io.write_sweep_csv(rows, buf)
    for row in rows:
        if row.error:
            print(f"phi={row.phi!r} delta_theta={row.delta_theta!r}: {row.error}", file=sys.stderr)
    return buf.getvalue(), EXIT_OK


def cmd_limits(args):
    cfg = _protocol_config(args)
    try:
        rep = protocols.ordered_limits(args.protocol, cfg)
    except LimitMismatch as exc:
        doc = {"protocol": args.protocol, "passed": False, "error": str(exc)}
        return io.dumps(doc) + "\n", EXIT_VIOLATION
    return io.dumps(rep.as_dict()) + "\n", EXIT_OK


def cmd_theorem_check(args):
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    if args.theorem == 1:
        summary = theorems.theorem1_suite(args.trials, args.dim, args.seed)
    else:
        summary = theorems.theorem2_search(args.trials, args.dim, args.seed)
    code = EXIT_VIOLATION if summary.violations else EXIT_OK
    return io.dumps(summary.as_dict()) + "\n", code


def cmd_costrate(args):
    costs = costrate.CostModel(args.c_prepare, args.c_measure, args.c_postselect, args.trials)
    doc = {"rate": costrate.rate(args.fisher, costs),
           "ps_rate": costrate.ps_rate(args.fisher_ps, args.p_ps, costs),
           "breakeven": costrate.breakeven(args.p_ps, costs)}
    return io.dumps(doc) + "\n", EXIT_OK


COMMANDS = {
    "qfi": cmd_qfi,
    "psqfi": cmd_psqfi,
    "kdq": cmd_kdq,
    "sweep": cmd_sweep,
    "limits": cmd_limits,
    "theorem-check": cmd_theorem_check,
    "costrate": cmd_costrate,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = COMMANDS[args.command](args)
    except (InputError, UsageError, OSError) as exc:
        print(f"psmet {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalDomainError as exc:
        print(f"psmet {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"psmet: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stdout = None  # reader went away; suppress the flush-at-exit error
    return code


if __name__ == "__main__":
    sys.exit(main())
