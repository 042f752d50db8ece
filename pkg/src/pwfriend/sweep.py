"""Grid classification of the Wigner's-friend parameter space.

Each grid point produces one ``RegionRecord``; ``write_csv`` renders records
with a fixed column layout and ``.17g`` formatting so that identical inputs
give byte-identical files.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .conditions import DegenerateParametersError, def2a_residuals, nondisturbance_check
from .decoherence import decoherence_functional
from .linalg import TOL
from .params import WignerFriendParams
from .rules import Rule
from .scenarios import build_wigner_friend, wigner_friend_family
from .tables import F_LABELS, W_LABELS, operator_tables

PARAM_COLUMNS = ("a", "b", "alpha", "beta", "phi_S", "phi_SF", "phi")
FLAG_COLUMNS = ("def2a_normalized", "def3_valid", "nondisturbance", "consistent",
                "weakly_consistent", "rules_coincide_1_2a_2b")
RESIDUAL_COLUMNS = ("r1", "r2", "def2a_norm_up", "def2a_norm_down", "commutator_max",
                    "offdiag_max", "offdiag_real_max")
# (column prefix, rule, direction, complex?)
RULE_BLOCKS = (
    ("def1_fwd", Rule.DEF1, "forward", False),
    ("def1_rev", Rule.DEF1, "reversed", False),
    ("def2a_fwd", Rule.DEF2A, "forward", False),
    ("def2b_fwd", Rule.DEF2B, "forward", False),
    ("def2b_rev", Rule.DEF2B, "reversed", False),
    ("def3_fwd", Rule.DEF3, "forward", True),
    ("def3_rev", Rule.DEF3, "reversed", True),
)


def value_columns() -> list[str]:
    cols = []
    for prefix, _, _, cplx in RULE_BLOCKS:
        for f in F_LABELS:
            for w in W_LABELS:
                base = f"{prefix}_{f}_{w}"
                cols += [base + "_re", base + "_im"] if cplx else [base]
    return cols


def columns() -> list[str]:
    return [*PARAM_COLUMNS, *value_columns(), *FLAG_COLUMNS, *RESIDUAL_COLUMNS]


COLUMN_HELP = f"""\
CSV columns, in order:
  parameters : {', '.join(PARAM_COLUMNS)}   (phi = phi_S - phi_SF)
  rule values: <rule>_<dir>_<f>_<w> for rule/dir in
               {', '.join(b[0] for b in RULE_BLOCKS)};
               f in (up, down), w in (yes, no); def3 columns carry _re/_im.
               'fwd' conditions on the Friend's record, 'rev' on Wigner's.
               Entries conditioned on a null outcome are 'nan'.
  flags (0/1): {', '.join(FLAG_COLUMNS)}
  residuals  : {', '.join(RESIDUAL_COLUMNS)}   (r1, r2 are 'nan' when a*b = 0)
Numbers use 17 significant digits."""


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"{self.name}: steps must be >= 1")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    """Grid over alpha, phi and either ``a`` or ``a_over_alpha``.

    Axes not given as ranges may be fixed in ``fixed``.  Points whose
    amplitudes leave [0, 1] are skipped.
    """

    alpha: Axis
    phi: Axis
    a: Axis | None = None
    a_over_alpha: Axis | None = None
    fixed: dict[str, float] = field(default_factory=dict)
    tol: float = TOL
    out: str | None = None

    def __post_init__(self):
        if (self.a is None) == (self.a_over_alpha is None):
            raise ValueError("give exactly one of the axes 'a' or 'a_over_alpha'")
        if not 0 <= self.alpha.lo <= 1 or not 0 <= self.alpha.hi <= 1:
            raise ValueError("alpha range must lie within [0, 1]")
        if self.a is not None and not (0 <= self.a.lo <= 1 and 0 <= self.a.hi <= 1):
            raise ValueError("a range must lie within [0, 1]")

    def points(self) -> list[WignerFriendParams]:
        """Grid points in lexicographic (alpha, a-axis, phi) order."""
        a_axis = self.a if self.a is not None else self.a_over_alpha
        phi_sf = self.fixed.get("phi_SF", 0.0)
        times = {k: v for k, v in self.fixed.items() if k.startswith("t_")}
        out = []
        for alpha in self.alpha.values():
            for x in a_axis.values():
                a = x if self.a is not None else x * alpha
                if not 0 <= a <= 1 + 1e-15:
                    continue
                a = min(a, 1.0)
                for phi in self.phi.values():
                    p = WignerFriendParams.from_amplitudes(
                        float(a), float(alpha), phi_S=float(phi) + phi_sf, phi_SF=phi_sf, **times)
                    out.append(p)
        return out


@dataclass(frozen=True, eq=False)
class RegionRecord:
    params: WignerFriendParams
    values: dict[str, float]
    flags: dict[str, bool]
    residuals: dict[str, float]

    def row(self) -> list[float]:
        p = self.params
        return ([p.a, p.b, p.alpha, p.beta, p.phi_S, p.phi_SF, p.phi]
                + [self.values[c] for c in value_columns()]
                + [int(self.flags[c]) for c in FLAG_COLUMNS]
                + [self.residuals[c] for c in RESIDUAL_COLUMNS])


def _agree(tables: list, tol: float) -> bool:
    ref = tables[0]
    for t in tables[1:]:
        if np.any(t.null != ref.null):
            return False
        mask = ~ref.null
        if np.any(np.abs(t.values[mask] - ref.values[mask]) > tol):
            return False
    return True


def classify(p: WignerFriendParams, tol: float = TOL) -> RegionRecord:
    """Evaluate every rule, flag and residual at one parameter point."""
    h = build_wigner_friend(p)
    ops = operator_tables(p, h, tol)

    values: dict[str, float] = {}
    for prefix, rule, direction, cplx in RULE_BLOCKS:
        t = ops[rule, direction]
        for i, f in enumerate(F_LABELS):
            for j, w in enumerate(W_LABELS):
                base = f"{prefix}_{f}_{w}"
                v = complex(t.values[i, j]) if not t.null[i, j] else complex(math.nan, math.nan)
                if cplx:
                    values[base + "_re"], values[base + "_im"] = v.real, v.imag
                else:
                    values[base] = v.real

    d2a = ops[Rule.DEF2A, "forward"]
    norm = {}
    for k, f in enumerate(F_LABELS):
        res = d2a.results[2 * k]
        norm[f] = res.diagnostics.get(f"normalization[{f}]", math.nan) if res else math.nan
    try:
        r = def2a_residuals(p, tol).residuals
        r1, r2 = r["r1"], r["r2"]
    except DegenerateParametersError:
        r1 = r2 = math.nan

    def3 = [ops[Rule.DEF3, d] for d in ("forward", "reversed")]
    def3_valid = all(bool(np.all(t.valid | t.null)) for t in def3)
    commutators = [res.diagnostics["commutator"] for t in def3 for res in t.results if res]

    dec = decoherence_functional(wigner_friend_family(h, p), h, tol)
    flags = {
        "def2a_normalized": bool(np.all(d2a.valid | d2a.null)),
        "def3_valid": def3_valid,
        "nondisturbance": nondisturbance_check(p, tol).satisfied,
        "consistent": dec.consistent,
        "weakly_consistent": dec.weakly_consistent,
        "rules_coincide_1_2a_2b": _agree([ops[Rule.DEF1, "forward"], d2a,
                                          ops[Rule.DEF2B, "forward"]], tol),
    }
    residuals = {
        "r1": r1, "r2": r2,
        "def2a_norm_up": norm["up"], "def2a_norm_down": norm["down"],
        "commutator_max": max(commutators, default=math.nan),
        "offdiag_max": dec.max_off_diagonal,
        "offdiag_real_max": dec.max_off_diagonal_real,
    }
    return RegionRecord(p, values, flags, residuals)


def _classify_star(args):
    return classify(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[RegionRecord]:
    """Records in grid order; ``jobs > 1`` evaluates in worker processes."""
    pts = spec.points()
    if jobs <= 1:
        return [classify(p, spec.tol) for p in pts]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_classify_star, [(p, spec.tol) for p in pts], chunksize=16))


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def render_csv(records: list[RegionRecord]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns()) + "\n")
    for rec in records:
        buf.write(",".join(fmt(v) for v in rec.row()) + "\n")
    return buf.getvalue()


def write_csv(records: list[RegionRecord], path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(render_csv(records))
