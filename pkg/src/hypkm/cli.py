"""Configuration-driven command line front end.

Subcommands map one-to-one onto the library modules: axioms, iterate,
rates, product, uafpp, and demo (the full acceptance suite).  Every output
embeds the artifact version and a hash of the effective config, so any two
runs with the same config and seed are byte-identical.

Exit codes: 0 success, 1 property violation, 2 config error, 3 budget
exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import __version__
from .config import (
    build_alpha,
    build_map,
    build_schedule,
    build_space,
    canonical_json,
    config_hash,
    config_rational,
    load_config,
    parse_point,
)
from .errors import (
    ArgumentError,
    BudgetExhausted,
    ConfigError,
    HypkmError,
    RateOverflowError,
    ScheduleError,
)
from .km import km_iterate, require_valid_schedule, residuals_nonincreasing
from .product_afpp import DEFAULT_BUDGET, EXAMPLES, solve_example
from .rates import (
    describe_overflow,
    digit_count,
    rate_g,
    rate_g_tilde,
    rate_h,
    rate_h_tilde,
)
from .spaces import DEFAULT_ETA, HyperbolicSpace, check_axioms
from .uafpp import UafppModulus, banach_ufpp_modulus, modulus_table, uafpp_to_regularity

#: full decimals are printed up to this many digits; larger rate values are
#: reported as a sound scientific-notation upper bound plus the digit count.
MAX_PRINT_DIGITS = 1_000_000


def _headers(cfg: dict) -> list[str]:
    return [f"# version={__version__}", f"# config_hash={config_hash(cfg)}"]


def _emit(lines: list[str], out: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)
        print(f"wrote {out}")


def _seed(cfg: dict, args) -> int:
    return args.seed if args.seed is not None else int(cfg.get("seed", 0))


def _eta(cfg: dict, args) -> float:
    if args.eta is not None:
        return float(config_rational({"eta": args.eta}, "eta"))
    v = config_rational(cfg, "eta")
    return float(v) if v is not None else DEFAULT_ETA


def _budget(cfg: dict, args) -> int:
    if args.budget is not None:
        return args.budget
    return int(cfg.get("budget", DEFAULT_BUDGET))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_axioms(cfg: dict, args) -> int:
    space = build_space(cfg.get("space") or _missing("space"))
    samples = int(cfg.get("samples", 10_000))
    rep = check_axioms(space, samples, seed=_seed(cfg, args), eta=_eta(cfg, args))
    lines = _headers(cfg)
    lines.append(f"# space={canonical_json(space.descriptor)}")
    lines.extend(rep.summary_lines())
    verdict = "all axioms pass" if rep.passed else f"FAILED: {', '.join(rep.failures())}"
    lines.append(verdict)
    _emit(lines, args.out)
    return 0 if rep.passed else 1


def cmd_iterate(cfg: dict, args) -> int:
    space = build_space(cfg.get("space") or _missing("space"))
    if not isinstance(space, HyperbolicSpace):
        raise ConfigError("iterate needs a space with a combine operator")
    T = build_map(space, cfg.get("map") or _missing("map"))
    sched = build_schedule(cfg.get("schedule") or _missing("schedule"))
    if "x0" not in cfg:
        raise ConfigError("iterate: missing required key 'x0'")
    x0 = parse_point(space, cfg["x0"])
    if "N" not in cfg:
        raise ConfigError("iterate: missing required key 'N'")
    N = int(cfg["N"])
    try:
        require_valid_schedule(sched, N)
    except ScheduleError as exc:
        raise ConfigError(f"schedule invalid up to N={N}: {exc}") from exc
    trace = km_iterate(space, T, x0, sched, N)
    meta = {
        "version": __version__,
        "config_hash": config_hash(cfg),
        "space": canonical_json(space.descriptor),
        "map": T.label,
        "schedule": sched.label,
    }
    _emit(trace.csv_lines(meta), args.out)
    if not residuals_nonincreasing(trace, tol=_eta(cfg, args)):
        print("residuals are not nonincreasing: map is not nonexpansive "
              "or schedule is out of range", file=sys.stderr)
        return 1
    return 0


def _missing(key: str):
    raise ConfigError(f"missing required key {key!r}")


def _rate_line(name: str, compute) -> str:
    """`name = <exact decimal>`, or a sound upper bound when the value is
    unprintable or was never exactly computed."""
    try:
        v = compute()
    except RateOverflowError as exc:
        return f"{name} {describe_overflow(exc)}"
    digits = digit_count(v)
    if digits > MAX_PRINT_DIGITS:
        lead = v // 10 ** (digits - 5)
        mantissa = (lead + 1) / 10_000  # rounded up: sound as an upper bound
        return f"{name} <= {mantissa:.4f}e+{digits - 1} (exact value has {digits} decimal digits)"
    return f"{name} = {v}"


def cmd_rates(cfg: dict, args) -> int:
    if "K" not in cfg:
        raise ConfigError("rates: missing required key 'K'")
    K = int(cfg["K"])
    alpha = build_alpha(cfg.get("alpha") or _missing("alpha"))
    eps = config_rational(cfg, "eps")
    if eps is None:
        _missing("eps")
    b = config_rational(cfg, "b")
    b1 = config_rational(cfg, "b1")
    b2 = config_rational(cfg, "b2")
    lines = _headers(cfg)
    if b is not None:
        lines.append(_rate_line("h", lambda: rate_h(eps, b, K, alpha)))
        lines.append(_rate_line("h_tilde", lambda: rate_h_tilde(eps, b, K, alpha)))
        lines.append(_rate_line("g_tilde", lambda: rate_g_tilde(eps, b, K, alpha)))
    if b1 is not None and b2 is not None:
        lines.append(_rate_line("g", lambda: rate_g(eps, b1, b2, K, alpha)))
    if b is None and (b1 is None or b2 is None):
        raise ConfigError("rates needs 'b' (for h, h_tilde, g_tilde) or 'b1' and 'b2' (for g)")
    _emit(lines, args.out)
    return 0


def cmd_product(cfg: dict, args) -> int:
    name = cfg.get("example") or _missing("example")
    if name not in EXAMPLES:
        raise ConfigError(
            f"unknown product example {name!r}; available: {', '.join(sorted(EXAMPLES))}"
        )
    ex = EXAMPLES[name]()
    eps = config_rational(cfg, "eps")
    if eps is None:
        _missing("eps")
    mode = cfg.get("mode")
    if mode is not None and mode not in ("sup-rC", "bounded-orbit"):
        raise ConfigError(f"unknown mode {mode!r}")
    try:
        res = solve_example(ex, eps, mode=mode, budget=_budget(cfg, args), seed=_seed(cfg, args))
    except ArgumentError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {
        "version": __version__,
        "config_hash": config_hash(cfg),
        "command": "product",
        "example": name,
        "mode": res.mode,
        "eps": f"{res.eps_target:.17g}",
        "exhausted": res.exhausted,
        "best_residual": f"{res.best_residual:.17g}",
        "attempts": [
            {
                "eps_attempt": f"{a.eps_attempt:.17g}",
                "n": a.n,
                "truncated": a.truncated,
                "residual": f"{a.residual:.17g}",
            }
            for a in res.attempts
        ],
        "certificate": res.certificate.to_record() if res.certificate else None,
    }
    _emit([json.dumps(doc, sort_keys=True, indent=2)], args.out)
    return 0 if res.certificate is not None else 3


def cmd_uafpp(cfg: dict, args) -> int:
    desc = cfg.get("modulus") or _missing("modulus")
    kind = desc.get("kind") if isinstance(desc, dict) else None
    if kind == "banach":
        k = config_rational(desc, "k")
        if k is None:
            raise ConfigError("banach modulus needs 'k'")
        modulus = UafppModulus(
            D_of=lambda eps, b: banach_ufpp_modulus(k, b), label=f"banach(k={k})"
        )
        value_col = "D"
    elif kind == "constant":
        D = config_rational(desc, "D")
        if D is None:
            raise ConfigError("constant modulus needs 'D'")
        modulus = UafppModulus(D_of=lambda eps, b: D, label=f"constant(D={D})")
        value_col = "D"
    elif kind == "regularity_from_constant":
        D = config_rational(desc, "D")
        if D is None:
            raise ConfigError("regularity_from_constant needs 'D'")
        sched = build_schedule(desc.get("schedule") or _missing("schedule"))
        phi = UafppModulus(D_of=lambda eps, b: D, label=f"constant(D={D})")
        modulus = uafpp_to_regularity(phi, sched)
        value_col = "N"
    else:
        raise ConfigError(f"unknown modulus kind {kind!r}")
    eps_values = cfg.get("eps_values") or _missing("eps_values")
    b_values = cfg.get("b_values") or _missing("b_values")
    try:
        rows = modulus_table(modulus, eps_values, b_values)
    except (ArgumentError, RateOverflowError) as exc:
        raise ConfigError(f"modulus grid: {exc}") from exc
    lines = _headers(cfg)
    lines.append(f"# modulus={modulus.label}")
    lines.append(f"eps,b,{value_col}")
    lines.extend(",".join(row) for row in rows)
    _emit(lines, args.out)
    return 0


def cmd_demo(cfg: dict, args) -> int:
    from .acceptance import run_all

    results = run_all()
    lines = [f"# version={__version__}"]
    for r in results:
        lines.append(r.line())
    ok = all(r.passed for r in results)
    lines.append("all criteria pass" if ok else "SOME CRITERIA FAILED")
    _emit(lines, args.out)
    return 0 if ok else 1


COMMANDS = {
    "axioms": cmd_axioms,
    "iterate": cmd_iterate,
    "rates": cmd_rates,
    "product": cmd_product,
    "uafpp": cmd_uafpp,
    "demo": cmd_demo,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hypkm",
        description="averaged iteration on hyperbolic spaces: axioms, rates, "
        "and product-space approximate fixed points",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "axioms": "check metric and convexity axioms on a configured space",
        "iterate": "run the averaged iteration and write a residual trace CSV",
        "rates": "evaluate the exact rate bounds h, h_tilde, g, g_tilde",
        "product": "run the product-space approximate-fixed-point solver",
        "uafpp": "tabulate a displacement or regularity modulus on a grid",
        "demo": "run the built-in acceptance suite",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="path to a JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--budget", type=int, help="override the iteration budget")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--eta", help="override the test tolerance (rational)")
    args = parser.parse_args(argv)

    # exact rate values are legitimately enormous; raise the print guard
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(max(MAX_PRINT_DIGITS + 100, 10_000))

    try:
        if args.command == "demo":
            cfg = {}
        else:
            if not args.config:
                raise ConfigError(f"{args.command} needs --config")
            cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except HypkmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
