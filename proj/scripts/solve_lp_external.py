#!/usr/bin/env python3
"""Cross-check an exported .lp file against scipy's HiGHS solver.

Usage: solve_lp_external.py MODEL.lp [MODEL2.lp ...]

Parses the whitespace-tokenized LP text the library writes, relaxes any
integrality (this is a bound check, not a MILP solve), and reports the LP
optimum. Exits nonzero if scipy finds the model infeasible/unbounded in a
way the file's header does not explain, or if parsing fails.
"""

import re
import sys

import numpy as np
from scipy.optimize import linprog


def tokenize(text):
    out = []
    for line in text.splitlines():
        if line.lstrip().startswith("\\"):
            continue
        out.extend(line.replace(":", " : ").split())
    return out


SECTIONS = {
    "minimize", "maximize", "subject", "st", "s.t.", "bounds", "general",
    "generals", "binary", "binaries", "end",
}


def parse_lp(text):
    """Return (sense, c_dict, rows, bounds, names) from LP text."""
    toks = tokenize(text)
    i = 0

    def peek():
        return toks[i].lower() if i < len(toks) else None

    def is_number(tok):
        try:
            float(tok)
            return True
        except ValueError:
            return False

    def parse_terms():
        """Parse a signed linear expression; returns (coeffs, stop_token_index)."""
        nonlocal i
        coeffs = {}
        sign = 1.0
        pending = None
        while i < len(toks):
            tok = toks[i]
            low = tok.lower()
            if low in SECTIONS or tok in ("<=", ">=", "=", "<", ">"):
                break
            if tok == "+":
                sign, pending = 1.0, None
                i += 1
            elif tok == "-":
                sign, pending = -1.0, None
                i += 1
            elif is_number(tok):
                pending = float(tok)
                i += 1
            else:
                coef = sign * (1.0 if pending is None else pending)
                coeffs[tok] = coeffs.get(tok, 0.0) + coef
                sign, pending = 1.0, None
                i += 1
        return coeffs

    sense = peek()
    if sense not in ("minimize", "maximize"):
        raise ValueError(f"expected objective section, got {sense!r}")
    i += 1
    if i + 1 < len(toks) and toks[i + 1] == ":":
        i += 2
    objective = parse_terms()

    if peek() in ("subject", "st", "s.t."):
        if peek() == "subject":
            i += 2  # "subject to"
        else:
            i += 1
    rows = []
    while peek() not in ("bounds", "general", "generals", "binary", "binaries",
                         "end", None):
        if i + 1 < len(toks) and toks[i + 1] == ":":
            i += 2  # row label
        coeffs = parse_terms()
        rel = toks[i]
        i += 1
        rhs = float(toks[i])
        i += 1
        rows.append((coeffs, rel, rhs))

    bounds = {}
    if peek() == "bounds":
        i += 1
        while peek() not in ("general", "generals", "binary", "binaries", "end",
                             None):
            # forms: "x free" | "lb <= x <= ub" | "x <= ub" | "x >= lb" | "x = v"
            if is_number(toks[i]) or toks[i] == "-inf":
                lo = float(toks[i])
                i += 1  # "<="
                assert toks[i] in ("<=", "<")
                i += 1
                name = toks[i]
                i += 1
                lo_prev, hi_prev = bounds.get(name, (0.0, np.inf))
                hi = hi_prev
                if i < len(toks) and toks[i] in ("<=", "<"):
                    i += 1
                    hi = float(toks[i])
                    i += 1
                bounds[name] = (lo, hi)
            else:
                name = toks[i]
                i += 1
                if toks[i].lower() == "free":
                    i += 1
                    bounds[name] = (-np.inf, np.inf)
                elif toks[i] in ("<=", "<"):
                    i += 1
                    lo_prev, _ = bounds.get(name, (0.0, np.inf))
                    bounds[name] = (lo_prev, float(toks[i]))
                    i += 1
                elif toks[i] in (">=", ">"):
                    i += 1
                    _, hi_prev = bounds.get(name, (0.0, np.inf))
                    bounds[name] = (float(toks[i]), hi_prev)
                    i += 1
                elif toks[i] == "=":
                    i += 1
                    v = float(toks[i])
                    i += 1
                    bounds[name] = (v, v)
                else:
                    raise ValueError(f"bad bounds line near {toks[i]!r}")

    # Integrality sections: relax, but record the names so they get bounds.
    while peek() in ("general", "generals", "binary", "binaries"):
        binary = peek() in ("binary", "binaries")
        i += 1
        while peek() not in ("general", "generals", "binary", "binaries", "end",
                             None):
            name = toks[i]
            i += 1
            if binary and name not in bounds:
                bounds[name] = (0.0, 1.0)

    names = sorted(
        set(objective) | set(bounds)
        | {v for coeffs, _, _ in rows for v in coeffs})
    return sense, objective, rows, bounds, names


def solve(path):
    with open(path) as f:
        text = f.read()
    sense, objective, rows, bounds, names = parse_lp(text)
    idx = {n: j for j, n in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for name, coef in objective.items():
        c[idx[name]] = coef
    if sense == "maximize":
        c = -c

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in rows:
        row = np.zeros(n)
        for name, coef in coeffs.items():
            row[idx[name]] = coef
        if rel in ("<=", "<"):
            a_ub.append(row)
            b_ub.append(rhs)
        elif rel in (">=", ">"):
            a_ub.append(-row)
            b_ub.append(-rhs)
        else:
            a_eq.append(row)
            b_eq.append(rhs)

    lim = [bounds.get(name, (0.0, np.inf)) for name in names]
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=lim,
        method="highs")
    if not res.success:
        return None, res.message
    obj = -res.fun if sense == "maximize" else res.fun
    return obj, None


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    rc = 0
    for path in argv[1:]:
        try:
            obj, err = solve(path)
        except Exception as e:  # parse failures are real failures
            print(f"{path}: PARSE ERROR: {e}", file=sys.stderr)
            rc = 1
            continue
        if err is not None:
            print(f"{path}: solver: {err}", file=sys.stderr)
            rc = 1
        else:
            print(f"{path}: optimum (integrality relaxed) = {obj:.12g}")
    return rc


if __name__ == "__main__":
    sys.exit(main(sys.argv))
