"""``hardy-cert`` command-line front end.

Results go to stdout (JSON or CSV) or to ``--out``.  Domain errors exit with
status 2 and a JSON object ``{"error": code, "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HardyCertError
from .report import RunConfig, format_csv, format_json, reproduce_figures

EXIT_DOMAIN = 2


def _config(args: argparse.Namespace) -> RunConfig:
    skip = {"func", "command"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    outputs = {k: params[k] for k in ("out", "outdir", "export_sdpa", "emit_test") if params.get(k)}
    from .npa.solve import GAP_TOL, solver_name

    return RunConfig(args.command, params, solver=solver_name(), tolerances={"gap": GAP_TOL},
                     seed=args.seed, outputs=outputs)


def _emit_text(args, text: str) -> None:
    if getattr(args, "out", None):
        p = Path(args.out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_csv(args, columns, rows) -> None:
    _emit_text(args, format_csv(_config(args), columns, rows))


def _emit_json(args, result: dict) -> None:
    _emit_text(args, format_json(_config(args), result))


def _setting(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"setting must look like 'x,y', got {text!r}") from exc
    if x not in (0, 1) or y not in (0, 1):
        raise argparse.ArgumentTypeError("setting entries must be 0 or 1")
    return x, y


# --- subcommands -------------------------------------------------------------------

def cmd_tilted(args) -> None:
    from .tilted import behavior_of, canonical_strategy, optimal_theta, quantum_max, randomness

    r = randomness(args.w)
    res = {"w": args.w, "theta": optimal_theta(args.w), "quantum_max": quantum_max(args.w),
           "h_local": r.h_local, "h_global": r.h_global, "branch": r.branch,
           "behavior": behavior_of(canonical_strategy(args.w)).to_json()}
    if args.selftest:
        from .tilted import selftest_uniqueness_check

        st = selftest_uniqueness_check(args.w, restarts=args.restarts, seed=args.seed)
        res["selftest"] = {"value": st.best_value, "passed": st.passed,
                          "distance": st.strategy_distance}
    if args.json or args.out:
        _emit_json(args, res)
    else:
        for k in ("w", "theta", "quantum_max", "h_local", "h_global", "branch"):
            print(f"{k}\t{res[k]!r}")


def cmd_tilted_sweep(args) -> None:
    from .tilted import optimal_theta, quantum_max, randomness

    rows = []
    for w in np.linspace(args.wmin, args.wmax, args.steps):
        r = randomness(float(w))
        rows.append([float(w), optimal_theta(w), quantum_max(w), r.h_local, r.h_global])
    _emit_csv(args, ["w", "theta", "pmax", "h_local", "h_global"], rows)


def cmd_colored(args) -> None:
    from .colored import ColoredModel

    m = ColoredModel(args.w)
    rows = [[p.p, p.guess_prob, p.h_bits, p.branch] for p in m.curve(args.steps)]
    _emit_csv(args, ["p", "guess_prob", "h_bits", "branch"], rows)


def cmd_iw(args) -> None:
    from .iw import iw_classical, iw_quantum_kkt, iw_quantum_numeric

    def row(w):
        num = iw_quantum_numeric(w)
        try:
            k = iw_quantum_kkt(w)
            kkt, alpha, rule = k.lambda_max, k.alpha1, k.stated_rule_agrees
        except HardyCertError:
            kkt, alpha, rule = float("nan"), num.alpha1, None
        return {"w": w, "classical": iw_classical(w), "quantum_kkt": kkt,
                "quantum_numeric": num.lambda_max, "alpha1": alpha, "stated_rule_agrees": rule}

    if args.sweep:
        rows = [row(float(w)) for w in np.linspace(args.wmin, args.wmax, args.steps)]
        cols = ["w", "classical", "quantum_kkt", "quantum_numeric", "alpha1"]
        _emit_csv(args, cols, [[r[c] for c in cols] for r in rows])
    else:
        _emit_json(args, row(args.w))


def cmd_npa_guess(args) -> None:
    from .npa.programs import guess_problem, guess_prob_vs_iw
    from .npa.sdpa import export_sdpa

    if args.export_sdpa:
        export_sdpa(guess_problem(args.w, args.iw, args.setting), args.export_sdpa)
    g = guess_prob_vs_iw(args.w, args.iw, args.setting)
    _emit_json(args, {"w": args.w, "iw": args.iw, "setting": list(args.setting),
                      "guess_prob": g.guess_prob, "h_bits": g.h_bits, "status": g.sdp.status,
                      "gap": g.sdp.gap})


def cmd_mdl_curve(args) -> None:
    from .npa.programs import guess_problem, max_functional_q2, mdl_rate_curve
    from .npa.sdpa import export_sdpa
    from .report import fig2_l_grid

    ls = fig2_l_grid(args.steps)
    pts = mdl_rate_curve(args.w, ls, args.rule, setting=args.setting)
    if args.export_sdpa:
        from .iw import iw_functional

        q2 = max_functional_q2(iw_functional(args.w)).value
        stem = Path(args.export_sdpa)
        for k, p in enumerate(pts):
            prob = guess_problem(args.w, min(p.threshold, q2 - 1e-7), args.setting, at_least=True)
            export_sdpa(prob, stem.with_name(f"{stem.stem}-{k:02d}{stem.suffix or '.dat-s'}"))
    rows = [[p.l, p.h, p.tilde_max, p.threshold, p.guess_prob, p.h_bits, p.clamped, p.status]
            for p in pts]
    _emit_csv(args, ["l", "h", "tilde_max", "threshold", "guess_prob", "h_bits", "clamped", "status"],
              rows)


def cmd_ns_bound(args) -> None:
    from .errors import Infeasible
    from .nosignaling import SeedBounds, hardy_level_from_mdl, ns_analytic_bound, ns_lp_mdl_max_prob

    bounds = SeedBounds(args.l, args.h)
    cap = ns_analytic_bound(args.w, args.delta, bounds)
    if not args.lp_verify:
        _emit_json(args, {"w": args.w, "delta": args.delta, "l": args.l, "h": args.h,
                          "hardy_level": hardy_level_from_mdl(args.w, args.delta, bounds),
                          "analytic_bound": cap})
        return
    rows = []
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    try:
                        lp = ns_lp_mdl_max_prob(args.w, args.delta, bounds, (a, b, x, y))
                    except Infeasible:
                        lp = float("nan")
                    rows.append([a, b, x, y, lp, cap, bool(lp <= cap + 1e-9) if lp == lp else True])
    _emit_csv(args, ["a", "b", "x", "y", "lp_max", "analytic_bound", "within_bound"], rows)


def cmd_ladder(args) -> None:
    from .ladder import (LadderParams, ladder_global_randomness, ladder_hardy_prob,
                         ladder_optimal_t)

    if args.sweep:
        rows = []
        for t in np.linspace(0, 1, args.steps + 2)[1:-1]:
            hp = ladder_hardy_prob(LadderParams(args.n, float(t)))
            rows.append([float(t), hp.value, ladder_global_randomness(args.n, float(t))])
        _emit_csv(args, ["t", "p_hardy", "h_global"], rows)
        return
    if args.t is None:
        t, _ = ladder_optimal_t(args.n)
    else:
        t = args.t
    hp = ladder_hardy_prob(LadderParams(args.n, t))
    _emit_json(args, {"N": args.n, "t": t, "p_hardy": hp.value, "printed_form": hp.printed,
                      "h_global": ladder_global_randomness(args.n, t)})


def cmd_gadget(args) -> None:
    from .gadget.graph import build_gadget15, rotate_copies, verify_gadget_coloring
    from .gadget.hardy import compile_hardy_test, quantum_verify, write_test_json

    g = build_gadget15()
    res: dict = {"vertices": g.n, "edges": len(g.edges), "maximal_cliques": len(g.cliques)}
    if args.verify:
        c = verify_gadget_coloring(g)
        res["coloring"] = {"colorings_all_maximal": c.colorings_all_maximal,
                           "distinguished_all_maximal": c.distinguished_all_maximal,
                           "colorings_max_size": c.colorings_max_size,
                           "distinguished_max_size": c.distinguished_max_size,
                           "certified": c.certified}
    r = rotate_copies(g)
    test = compile_hardy_test(r)
    q = quantum_verify(test)
    res.update({"rotated_vertices": r.n, "rotated_edges": len(r.edges), "inputs": test.n_inputs,
                "completion_vectors": test.n_completed, "zero_pairs": len(test.zero_pairs),
                "x_star": test.x_star, "y_star": test.y_star,
                "uniform_1_16": q.uniform, "zeros_exact": q.zeros_exact,
                "h_global": q.h_global, "h_local": q.h_local})
    if args.emit_test:
        write_test_json(test, args.emit_test, q)
    _emit_json(args, res)


def cmd_reproduce(args) -> None:
    from .npa.programs import guess_problem
    from .npa.sdpa import export_sdpa
    from .iw import iw_quantum

    out = reproduce_figures(args.outdir, _config(args), steps=args.steps,
                            fig1_points=args.fig1_points, plots=not args.no_plots)
    if args.export_sdpa:
        export_sdpa(guess_problem(0.44, iw_quantum(0.44), (1, 1)), args.export_sdpa)
    for k, p in sorted(out.items()):
        print(f"{k}\t{p}")


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardy-cert", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed for multi-start optimizers")
    common.add_argument("--out", help="write the artifact here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tilted", parents=[common], help="optimal tilted Hardy strategy")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--selftest", action="store_true", help="also run the multi-start uniqueness check")
    p.add_argument("--restarts", type=int, default=50)
    p.set_defaults(func=cmd_tilted)

    p = sub.add_parser("tilted-sweep", parents=[common], help="randomness versus w")
    p.add_argument("--wmin", type=float, default=-0.24)
    p.add_argument("--wmax", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_tilted_sweep)

    p = sub.add_parser("colored", parents=[common], help="colored-noise guessing curve")
    p.add_argument("--w", type=float, default=None, help="tilt (default: the lower breakpoint)")
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_colored)

    p = sub.add_parser("iw", parents=[common], help="classical and quantum values of I_w")
    p.add_argument("--w", type=float, default=0.44)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--wmin", type=float, default=-0.24)
    p.add_argument("--wmax", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=cmd_iw)

    p = sub.add_parser("npa-guess", parents=[common], help="guessing probability at a given I_w")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--iw", type=float, required=True)
    p.add_argument("--setting", type=_setting, default=(1, 1))
    p.add_argument("--export-sdpa", metavar="PATH")
    p.set_defaults(func=cmd_npa_guess)

    p = sub.add_parser("mdl-curve", parents=[common], help="min-entropy versus seed bound l")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--rule", choices=["sum", "third"], default="sum")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--setting", type=_setting, default=(1, 1))
    p.add_argument("--export-sdpa", metavar="PATH", help="one file per grid point, suffixed -NN")
    p.set_defaults(func=cmd_mdl_curve)

    p = sub.add_parser("ns-bound", parents=[common], help="no-signalling cap from an MDL value")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--lp-verify", action="store_true")
    p.set_defaults(func=cmd_ns_bound)

    p = sub.add_parser("ladder", parents=[common], help="ladder Hardy test")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--steps", type=int, default=99)
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("gadget", parents=[common], help="01-gadget Hardy test")
    p.add_argument("--verify", action="store_true", help="run the exhaustive coloring search")
    p.add_argument("--emit-test", metavar="PATH")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reproduce-figures", parents=[common], help="figure data, plots and summary")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--fig1-points", type=int, default=12)
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--export-sdpa", metavar="PATH")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "colored" and args.w is None:
        from .colored import W0

        args.w = W0
    try:
        args.func(args)
    except HardyCertError as exc:
        json.dump({"error": exc.code, "message": str(exc), "command": args.command}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
