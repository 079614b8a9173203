"""Command implementations shared by the argparse front end and the tests.

Every command takes a :class:`RunConfig` and returns a :class:`Report`.
Exit codes: 0 = all checks agree with the predicted structure, 1 = a
mathematical check failed, 2 = usage or parse error.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..algebra import block_decompose, generate_algebra
from ..channels import (
    ChannelError,
    KrausChannel,
    duality_gap,
    graph_via_dual,
    is_operator_system as space_is_operator_system,
    nc_graph,
    pseudo_diagonal,
)
from ..checks import Check
from ..fpalgebra import FPPresentation, kernel_of_psi, psi, verify_theorem2
from ..graph import build_generators, check_relations, graph_span, is_operator_system
from ..linalg import CMatrix, subspace_equal
from ..reptheory import canonical_value, decompose_phi
from ..scalars import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    QQi,
    Theta,
    ThetaError,
    format_scalar,
    is_gaussian_rational_text,
    is_zero,
    parse_theta,
)
from .expr import ExprError, parse_element
from .jsonio import channel_from_json, frame_from_json, is_frame, load_json, matrix_to_json

COMMANDS = ("verify", "sweep", "fp", "rep", "channel")
ACTIONS = ("graph", "graph-check", "duality-test", "match-L")


class UsageError(ValueError):
    """Bad input; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    theta: str | None = None
    backend: str = "auto"
    tol: float = DEFAULT_TOL
    seed: int = 0
    output: str = "text"
    output_path: str | None = None
    exprs: list[str] = field(default_factory=list)
    channel_file: str | None = None
    action: str = "graph"
    trials: int = 20
    jobs: int = 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class Report:
    command: str
    config: RunConfig
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return 0 if all(c.passed for c in self.checks) else 1

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config.to_dict(),
            "exit_code": self.exit_code,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
            "wall_time": self.wall_time,
        }

    def render_text(self) -> str:
        lines = [f"{self.command}: " + ", ".join(f"{k}={v}" for k, v in self.data.get("summary", {}).items())]
        for row in self.data.get("table", []):
            lines.append("  " + "  ".join(f"{k}={v}" for k, v in row.items()))
        for c in self.checks:
            res = "" if c.residual is None else f"  residual={c.residual:.3g}"
            obs = "" if c.observed is None else f"  observed={c.observed}"
            exp = "" if c.expected is None else f"  expected={c.expected}"
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}{obs}{exp}{res}  ({c.backend})")
        for k, v in self.data.items():
            if k not in ("summary", "table"):
                lines.append(f"{k}: {v}")
        lines.append(f"exit={self.exit_code}  time={self.wall_time:.3f}s")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# helpers

def resolve_theta(text: str | None, backend: str, tol: float) -> Theta:
    if text is None:
        raise UsageError("--theta is required")
    if backend == "auto":
        backend = EXACT if is_gaussian_rational_text(text) else FLOAT
    try:
        return parse_theta(text, backend, tol)
    except ThetaError as exc:
        raise UsageError(str(exc)) from None


def _fmt(s) -> str:
    return format_scalar(s)


def _expected_characters(theta: Theta, tol: float):
    return canonical_value(theta.value, tol), canonical_value(-theta.value, tol)


def _close(a, b, tol: float) -> bool:
    return is_zero(a - b, tol)


def structure_checks(theta: Theta, tol: float, seed: int) -> tuple[list[Check], dict]:
    """Relations, M_theta dimension/blocks, A_theta kernel suite, decomposition, operator system."""
    be = theta.backend
    klein = theta.is_plus_minus_one(tol)
    checks: list[Check] = []
    data: dict = {}

    gens = build_generators(theta)
    rel = check_relations(gens, max(tol, 1e-12) if be == FLOAT else tol)
    checks.append(Check("relations X^2=Y^2=Z^2=I, XZ=ZX, YZ=ZY, XY+YX=(t+1/t)Z", rel.ok,
                        max(rel.residuals.values()), backend=be, detail=rel.residuals))

    alg = generate_algebra(gens.as_list(), True, tol)
    want_dim = 4 if klein else 8
    checks.append(Check("dim M_theta", alg.dimension == want_dim, expected=want_dim,
                        observed=alg.dimension, backend=be))
    rep = block_decompose(alg, tol, seed)
    want_blocks = [[1, True, 1]] * 4 if klein else [[4, True, 2]] * 2
    blocks = [list(b) for b in rep.blocks]
    res_ok = rep.residual == 0 if rep.backend == EXACT else rep.residual <= 1e-10
    checks.append(Check("block structure of M_theta", blocks == want_blocks and res_ok,
                        rep.residual, expected=want_blocks, observed=blocks, backend=rep.backend))
    checks.append(Check("radical of M_theta is zero", rep.radical_dim == 0, expected=0,
                        observed=rep.radical_dim, backend=be))
    data["M_theta"] = rep.to_dict()

    t2 = verify_theorem2(theta, tol)
    for c in t2.checks:
        c.name = f"A_theta: {c.name}"
    checks.extend(t2.checks)
    data["A_theta"] = {k: v for k, v in t2.to_dict().items() if k != "checks"}

    dec = decompose_phi(theta, tol, seed)
    dres_ok = dec.residual == 0 if dec.backend == EXACT else dec.residual <= 1e-10
    if klein:
        ok = [b.dim for b in dec.blocks] == [1, 1, 1, 1] and dres_ok
        checks.append(Check("phi_theta splits into four 1-dim blocks", ok, dec.residual,
                            expected=[1, 1, 1, 1], observed=[b.dim for b in dec.blocks], backend=dec.backend))
        kr = dec.klein_residual()
        checks.append(Check("Klein relations xy = yx = (t+1/t)/2 z on each block", kr <= tol, kr,
                            backend=dec.backend))
    else:
        chi_plus, chi_minus = _expected_characters(dec.theta, tol)
        by_z = {round(complex(b.character.chi_z).real): b for b in dec.blocks}
        ok = (
            [b.dim for b in dec.blocks] == [2, 2]
            and set(by_z) == {1, -1}
            and _close(by_z[1].character.chi_g, chi_plus, 1e-9)
            and _close(by_z[-1].character.chi_g, chi_minus, 1e-9)
            and all(b.irreducible for b in dec.blocks)
            and dres_ok
        )
        checks.append(Check("phi_theta = V_chi + V_chi2 with chi(g) ~ theta, chi2(g) ~ -theta (up to inversion)", ok,
                            dec.residual, expected=[_fmt(chi_plus), _fmt(chi_minus)],
                            observed=[_fmt(b.character.chi_g) for b in dec.blocks], backend=dec.backend))
        inter = dec.block_intertwiner_dims(tol)
        checks.append(Check("blocks are inequivalent (no intertwiner)", all(v == 0 for v in inter.values()),
                            observed=list(inter.values()), backend=dec.backend))
    data["decomposition"] = dec.to_dict()

    opsys = is_operator_system(theta, tol)
    unit = theta.value.abs2() == 1 if be == EXACT else abs(abs(theta.value) - 1) <= tol
    checks.append(Check("span L(theta) is an operator system iff |theta| = 1", opsys == unit,
                        expected=unit, observed=opsys, backend=be))
    data["operator_system"] = opsys
    return checks, data


def _timed(fn):
    def wrapper(config: RunConfig) -> Report:
        t0 = time.perf_counter()
        rep = fn(config)
        rep.wall_time = time.perf_counter() - t0
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# commands

@_timed
def cmd_verify(config: RunConfig) -> Report:
    theta = resolve_theta(config.theta, config.backend, config.tol)
    checks, data = structure_checks(theta, config.tol, config.seed)
    data["summary"] = {
        "theta": str(theta),
        "backend": theta.backend,
        "dim_M": data["M_theta"]["dimension"],
        "blocks": data["M_theta"]["profile"],
        "dim_ker_psi": data["A_theta"]["dim_ker_psi"],
        "operator_system": data["operator_system"],
    }
    return Report("verify", config, checks, data)


_QUARTER = {Fraction(0): QQi(1), Fraction(1, 4): QQi(0, 1), Fraction(1, 2): QQi(-1), Fraction(3, 4): QQi(0, -1)}


def sweep_points(spec: str, backend: str, tol: float) -> list[Theta]:
    """Expand a sweep spec: ``unit-circle:n=N`` or a comma-separated list.

    Unit-circle sweeps always contain the four points 1, i, -1, -i.
    """
    spec = spec.strip()
    if spec.startswith("unit-circle"):
        _, _, opts = spec.partition(":")
        n = 64
        for part in filter(None, opts.split(",")):
            key, _, val = part.partition("=")
            if key.strip() != "n" or not val.strip().isdigit() or int(val) < 1:
                raise UsageError(f"bad sweep option {part!r}; expected n=<positive int>")
            n = int(val)
        turns = sorted({Fraction(k, n) for k in range(n)} | set(_QUARTER))
        out = []
        for t in turns:
            if t in _QUARTER:
                v = _QUARTER[t]
                if backend == FLOAT:
                    v = complex(v)
                out.append(Theta.from_value(v, FLOAT if backend == FLOAT else EXACT, tol))
            else:
                if backend == EXACT:
                    raise UsageError(f"unit-circle point at {t} turns is not Gaussian rational")
                ang = 2 * math.pi * t
                out.append(Theta.from_value(complex(math.cos(ang), math.sin(ang)), FLOAT, tol))
        return out
    return [resolve_theta(item, backend, tol) for item in spec.split(",") if item.strip()]


def _sweep_point(theta: Theta, tol: float, seed: int) -> dict:
    klein = theta.is_plus_minus_one(tol)
    gens = build_generators(theta)
    alg = generate_algebra(gens.as_list(), True, tol)
    rep = block_decompose(alg, tol, seed)
    ker = kernel_of_psi(FPPresentation(theta, tol), tol).dim
    want = (4, "Mat1+Mat1+Mat1+Mat1", 4) if klein else (8, "Mat2+Mat2", 0)
    got = (alg.dimension, rep.profile, ker)
    return {
        "theta": str(theta),
        "backend": theta.backend,
        "dim_M": alg.dimension,
        "blocks": rep.profile,
        "dim_ker_psi": ker,
        "consistent": got == want,
    }


@_timed
def cmd_sweep(config: RunConfig) -> Report:
    if not config.theta:
        raise UsageError("sweep needs --theta (e.g. unit-circle:n=64 or 1,-1,i)")
    points = sweep_points(config.theta, config.backend, config.tol)
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            rows = list(pool.map(_sweep_point, points, [config.tol] * len(points), [config.seed] * len(points)))
    else:
        rows = [_sweep_point(t, config.tol, config.seed) for t in points]
    checks = [
        Check(f"theta={r['theta']}: dim M, blocks, dim Ker psi", r["consistent"],
              observed=[r["dim_M"], r["blocks"], r["dim_ker_psi"]], backend=r["backend"])
        for r in rows
    ]
    data = {
        "summary": {"points": len(rows), "dims": [r["dim_M"] for r in rows]},
        "table": rows,
    }
    return Report("sweep", config, checks, data)


@_timed
def cmd_fp(config: RunConfig) -> Report:
    theta = resolve_theta(config.theta, config.backend, config.tol)
    pres = FPPresentation(theta, config.tol)
    if not config.exprs:
        raise UsageError("fp needs at least one expression")
    elems = []
    for text in config.exprs:
        try:
            elems.append(parse_element(text, pres))
        except ExprError as exc:
            raise UsageError(f"{text!r}: {exc}") from None
    prod = elems[0]
    for e in elems[1:]:
        prod = prod * e
    image = psi(prod)
    data = {
        "summary": {"theta": str(theta), "backend": theta.backend, "regime": pres.regime},
        "basis": pres.basis_labels,
        "normal_forms": [str(e) for e in elems],
        "product": str(prod),
        "psi_product_is_zero": image.is_zero(config.tol),
        "psi_product": matrix_to_json(image),
    }
    return Report("fp", config, [], data)


@_timed
def cmd_rep(config: RunConfig) -> Report:
    theta = resolve_theta(config.theta, config.backend, config.tol)
    dec = decompose_phi(theta, config.tol, config.seed)
    checks = [
        Check("off-block residual", dec.residual == 0 if dec.backend == EXACT else dec.residual <= 1e-10,
              dec.residual, backend=dec.backend)
    ]
    inter = dec.block_intertwiner_dims(config.tol)
    checks.append(Check("blocks pairwise inequivalent", all(v == 0 for v in inter.values()),
                        observed=list(inter.values()), backend=dec.backend))
    data = dec.to_dict()
    data["summary"] = {
        "theta": str(theta),
        "backend": dec.backend,
        "blocks": [b.dim for b in dec.blocks],
        "characters": [(b.character.to_dict()["chi_g"], b.character.to_dict()["chi_z"]) for b in dec.blocks],
    }
    return Report("rep", config, checks, data)


def load_channel(path: str, backend: str, tol: float) -> tuple[KrausChannel, str]:
    try:
        raw = load_json(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        if is_frame(raw):
            return pseudo_diagonal(frame_from_json(raw), max(tol, 1e-9)), "frame"
        ch = channel_from_json(raw, None if backend == "auto" else backend)
    except ChannelError as exc:
        raise UsageError(str(exc)) from None
    return ch, "kraus"


def _random_rational_matrix(n: int, rng: random.Random) -> CMatrix:
    return CMatrix([[QQi(Fraction(rng.randint(-5, 5), rng.randint(1, 3)), Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
                     for _ in range(n)] for _ in range(n)], EXACT)


@_timed
def cmd_channel(config: RunConfig) -> Report:
    if not config.channel_file:
        raise UsageError("channel needs a channel or frame JSON file")
    if config.action not in ACTIONS:
        raise UsageError(f"unknown action {config.action!r}; choose from {', '.join(ACTIONS)}")
    ch, kind = load_channel(config.channel_file, config.backend, config.tol)
    be = ch.backend
    tp = ch.trace_preservation_residual()
    checks = [Check("trace preserving: sum V_k^* V_k = I", ch.is_trace_preserving(config.tol), tp, backend=be)]
    data = {"summary": {"source": kind, "dim_in": ch.dim_in, "dim_out": ch.dim_out, "env_dim": ch.env_dim,
                        "backend": be, "action": config.action}}
    if not checks[0].passed:
        return Report("channel", config, checks, data)

    tol = config.tol
    if config.action == "graph":
        g = nc_graph(ch, tol)
        data["summary"]["graph_dim"] = g.dim
        data["graph_basis"] = [matrix_to_json(b) for b in g.basis]
        checks.append(Check("graph is an operator system", space_is_operator_system(g, tol), backend=be))
    elif config.action == "graph-check":
        g, h = nc_graph(ch, tol), graph_via_dual(ch, tol)
        data["summary"]["graph_dim"] = g.dim
        checks.append(Check("span{V_j^* V_k} = dual of complementary channel applied to B(H_E)",
                            subspace_equal(g, h, tol), expected=g.dim, observed=h.dim, backend=be))
        checks.append(Check("graph is an operator system", space_is_operator_system(g, tol), backend=be))
    elif config.action == "duality-test":
        worst = 0.0
        if be == EXACT:
            rng = random.Random(config.seed)
            for _ in range(config.trials):
                rho = _random_rational_matrix(ch.dim_in, rng)
                x = _random_rational_matrix(ch.dim_out, rng)
                worst = max(worst, duality_gap(ch, rho, x))
            ok = worst == 0
        else:
            nrng = np.random.default_rng(config.seed)
            for _ in range(config.trials):
                rho = CMatrix.from_numpy(nrng.standard_normal((ch.dim_in,) * 2) + 1j * nrng.standard_normal((ch.dim_in,) * 2))
                x = CMatrix.from_numpy(nrng.standard_normal((ch.dim_out,) * 2) + 1j * nrng.standard_normal((ch.dim_out,) * 2))
                worst = max(worst, duality_gap(ch, rho, x))
            ok = worst <= max(tol, 1e-12)
        checks.append(Check(f"Tr(rho Phi*(x)) = Tr(Phi(rho) x) on {config.trials} random pairs", ok, worst, backend=be))
    elif config.action == "match-L":
        theta = resolve_theta(config.theta, config.backend if config.backend != "auto" else "auto", tol)
        if be == FLOAT and theta.backend == EXACT:
            theta = Theta.from_value(complex(theta.value), FLOAT, tol)
        g = nc_graph(ch, tol)
        target = graph_span(theta, tol)
        if g.shape != target.shape:
            match = False
        else:
            if target.backend != g.backend:
                target = graph_span(Theta.from_value(complex(theta.value), FLOAT, tol), tol)
            match = subspace_equal(g, target, tol)
        data["summary"]["graph_dim"] = g.dim
        checks.append(Check(f"graph equals span L(theta={theta})", match, expected=target.dim,
                            observed=g.dim, backend=g.backend))
    return Report("channel", config, checks, data)


RUNNERS = {"verify": cmd_verify, "sweep": cmd_sweep, "fp": cmd_fp, "rep": cmd_rep, "channel": cmd_channel}


def run(config: RunConfig) -> Report:
    if config.command not in RUNNERS:
        raise UsageError(f"unknown command {config.command!r}")
    if config.backend not in ("auto", EXACT, FLOAT):
        raise UsageError(f"unknown backend {config.backend!r}")
    return RUNNERS[config.command](config)
