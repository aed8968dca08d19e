"""Batch front end: read an INI job file, run the pipelines, write a deterministic JSON report.

Each section of the config is one job.  Keys:

    command   solve | christoffel | curvature | symmetries | conformal | mixed-trace
              | etale-check | determinant
    p         odd prime (mixed-trace takes primes = p, p')
    N         precision (default 2)
    field     rational (default) or cyclotomic; cyclotomic needs m and gauge = a_1, ..., a_n
    metric    one symmetric matrix as JSON rows; cyclotomic entries are coefficient lists
    metrics   alternatively a JSON list of n matrices (rational field only)
    d, d1, d2 integers for conformal and mixed jobs
    n         matrix size for etale-check, determinant
    points    random evaluation points for n = 3 (default 50)

Exit status: 0 every check passed, 1 some check failed, 2 configuration error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import ArithError, DomainError, ExactDivisionFailure
from .padic import CyclotomicInt, GaloisElement, PadicScalar, make_context

log = logging.getLogger("arithlc")

COMMANDS = ("solve", "christoffel", "curvature", "symmetries", "conformal", "mixed-trace", "etale-check",
            "determinant")
WITNESS_TERMS = 10


class ConfigError(Exception):
    """Invalid job configuration; message names the section and field."""


@dataclass
class Check:
    name: str
    anchor: str
    status: str
    witness: str = ""
    timing: int = 0  # deterministic work count; wall time goes to stderr


@dataclass
class JobResult:
    name: str
    config: dict
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    internal_error: str = ""

    def add(self, name, anchor, ok, witness="", timing=0):
        self.checks.append(Check(name, anchor, "pass" if ok else "fail", witness if not ok else "", timing))

    def error(self, name, anchor, exc):
        self.checks.append(Check(name, anchor, "error", f"{type(exc).__name__}: {exc}"))

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks) and not self.internal_error


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class JobConfig:
    name: str
    command: str
    raw: dict


def _get(cfg: JobConfig, key, conv=str, default=None, required=False):
    if key not in cfg.raw:
        if required:
            raise ConfigError(f"[{cfg.name}] missing field '{key}'")
        return default
    try:
        return conv(cfg.raw[key])
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"[{cfg.name}] field '{key}': {exc}") from None


def _int_list(s):
    return [int(v) for v in s.replace(" ", "").split(",") if v]


def _prime(cfg, key="p"):
    p = _get(cfg, key, int, required=True)
    if p == 2 or p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
        raise ConfigError(f"[{cfg.name}] field '{key}': {p} is not an odd prime")
    return p


def _parse_entry(v, m, where):
    if isinstance(v, int):
        return v
    if isinstance(v, list) and m is not None and all(isinstance(c, int) for c in v):
        return CyclotomicInt.from_list(m, v)
    raise ConfigError(f"{where}: bad matrix entry {v!r}")


def _matrix(cfg, text, m):
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"[{cfg.name}] metric: {exc}") from None
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
        raise ConfigError(f"[{cfg.name}] metric must be a square list of rows")
    return tuple(tuple(_parse_entry(v, m, f"[{cfg.name}] metric") for v in r) for r in rows)


def build_metric(cfg: JobConfig):
    """MetricTuple from the config (twisted by the gauge for cyclotomic fields)."""
    from .solver import MetricTuple, vertical_setup

    fld = _get(cfg, "field", default="rational")
    try:
        if fld == "rational":
            if "metrics" in cfg.raw:
                mats = _get(cfg, "metrics", json.loads)
                qs = tuple(_matrix(cfg, json.dumps(q), None) for q in mats)
                return MetricTuple(qs)
            q = _matrix(cfg, _get(cfg, "metric", required=True), None)
            return MetricTuple.constant(q)
        if fld == "cyclotomic":
            m = _get(cfg, "m", int, required=True)
            q = _matrix(cfg, _get(cfg, "metric", required=True), m)
            gauge = _get(cfg, "gauge", _int_list, default=[1] * len(q))
            if len(gauge) != len(q):
                raise ConfigError(f"[{cfg.name}] gauge needs {len(q)} exponents")
            if gauge[0] % m != 1 % m:
                raise ConfigError(f"[{cfg.name}] gauge: the first exponent must be 1")
            return vertical_setup(q, [GaloisElement(a, m) for a in gauge])
    except DomainError as exc:
        raise ConfigError(f"[{cfg.name}] metric: {exc}") from None
    raise ConfigError(f"[{cfg.name}] field: unknown field type {fld!r}")


def load_config(path) -> list[JobConfig]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # N (precision) and n (matrix size) are different keys
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    jobs = []
    for section in parser.sections():
        raw = dict(parser[section])
        cmd = raw.get("command")
        if cmd not in COMMANDS:
            raise ConfigError(f"[{section}] command: expected one of {', '.join(COMMANDS)}, got {cmd!r}")
        cfg = JobConfig(section, cmd, raw)
        _validate(cfg)
        jobs.append(cfg)
    if not jobs:
        raise ConfigError("config has no jobs")
    return jobs


def _validate(cfg: JobConfig):
    if cfg.command == "mixed-trace":
        primes = _get(cfg, "primes", _int_list, required=True)
        if len(primes) != 2:
            raise ConfigError(f"[{cfg.name}] primes: need exactly two")
        for i, p in enumerate(primes):
            _prime(JobConfig(cfg.name, cfg.command, {"p": str(p)}), "p")
        return
    if cfg.command == "determinant":
        n = _get(cfg, "n", int, required=True)
        if n < 2:
            raise ConfigError(f"[{cfg.name}] n: must be >= 2")
        return
    p = _prime(cfg)
    N = _get(cfg, "N", int, default=2)
    if N < 1:
        raise ConfigError(f"[{cfg.name}] N: must be >= 1")
    if cfg.command in ("christoffel", "curvature", "symmetries") and N < 2:
        raise ConfigError(f"[{cfg.name}] N: {cfg.command} needs N >= 2")
    if cfg.command == "conformal":
        for k in ("d1", "d2"):
            _get(cfg, k, int, required=True)
        return
    metric = build_metric(cfg)
    if metric.m is not None and metric.m % p == 0:
        raise ConfigError(f"[{cfg.name}] p = {p} divides the conductor {metric.m}")


# ---------------------------------------------------------------------------
# jobs


def _scalar_text(s: PadicScalar) -> str:
    return f"{list(s.coeffs) if s.ctx.f > 1 else s.coeffs[0]} mod {s.ctx.p}^{s.prec}"


def _witness(e) -> str:
    if hasattr(e, "serialize"):
        return e.serialize(max_terms=WITNESS_TERMS)
    return repr(e)


def _reports_into(res: JobResult, reports, anchors: dict):
    for r in reports:
        bad = r.failures()
        res.add(r.name, anchors.get(r.name, r.name), r.passed,
                r.witness or (f"failing indices {bad[:WITNESS_TERMS]}" if bad else ""), len(r.table))


ANCHORS = {
    "metric": "Lambda_i^t A_i Lambda_i = B_i",
    "torsion": "(A_i(Lambda_i-1))_kj = (A_j(Lambda_j-1))_ki",
    "christoffel_mod_p": "Gamma_ijk = (C_ijk + C_jik - C_kij)/2 mod p",
    "christoffel_mod_p_x1": "Gamma_ijk = -(dq_ijk + dq_jik - dq_kij)/2 mod (p, x-1)",
    "riemann_mod_p": "R_ijmk = ((C_ik + C_jm - C_jk - C_im)/2)^p mod p",
    "riemann_mod_p_x1": "R_ijmk = ((dq_jk + dq_im - dq_ik - dq_jm)/2)^p mod (p, x-1)",
    "antisym_last_pair": "R_ijkm = -R_ijmk mod p",
    "antisym_first_pair": "R_ijkm = -R_jikm mod p",
    "bianchi": "R_mijk + R_mjki + R_mkij = 0 mod p",
    "pair_exchange": "R_ijkm = R_kmij mod p",
    "ricci_symmetric": "R_ik = R_ki mod p",
    "curvature_mod_p": "Phi_ijmk from first-order metric data mod p",
    "curvature_mod_p_x1": "Phi_ijmk from dq mod (p, x-1)",
    "phi12_mod_p_x1": "Phi_12 = [[0, r^p], [-r^p, 0]] mod (p, x-1), r = dd/d^p",
}


def _solve_like(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .solver import (closed_form_n1, identity_point, point_context, random_point, solve_at_point, solve_for,
                         verify_congruence_christoffel)

    metric = build_metric(cfg)
    p = _prime(cfg)
    N = _get(cfg, "N", int, default=2)
    res.values["metric"] = metric.describe()
    if metric.n <= 2:
        conn = solve_for(metric, p, N)
        cost = sum(e.nterms() for L in conn.lams for e in L.entries())
        if cfg.command == "solve":
            res.add("metric", ANCHORS["metric"], conn.verify_metric(), timing=cost)
            res.add("torsion", ANCHORS["torsion"], conn.verify_torsion(), timing=cost)
            res.values["lambda"] = [[_witness(e) for e in L.entries()] for L in conn.lams]
            res.values["lambda_at_identity"] = [
                [_scalar_text(e.evaluate(_identity_point_ints(conn.ring))) for e in L.entries()] for L in conn.lams]
            if metric.n == 1:
                q = metric.qs[0][0][0]
                cf = closed_form_n1(q, p, N, metric.m)
                lam = conn.lams[0][0, 0]
                res.values["closed_form"] = _scalar_text(cf)
                res.add("closed_form_n1", "Lambda = (d^p/phi(d))^(1/2), branch 1 mod p",
                        (lam - conn.ring.const(cf, N)).is_zero(), _witness(lam))
        else:
            _reports_into(res, verify_congruence_christoffel(conn), ANCHORS)
        return
    if not metric.is_rational():
        raise DomainError("n = 3 runs by point evaluation, which needs an integer metric")
    points = _get(cfg, "points", int, default=50)
    ctx = point_context(p, N)
    at_id = solve_at_point(metric, identity_point(ctx, metric.n), N)
    tallies: dict = {}
    for _ in range(points):
        conn = solve_at_point(metric, random_point(ctx, metric.n, rng), N)
        if cfg.command == "solve":
            tallies.setdefault("metric", []).append(conn.verify_metric())
            tallies.setdefault("torsion", []).append(conn.verify_torsion())
        else:
            for r in verify_congruence_christoffel(conn, at_id):
                tallies.setdefault(r.name, []).append(r.passed)
    for name, vals in tallies.items():
        res.add(name, ANCHORS[name] + f" at {len(vals)} points", all(vals),
                f"failed at {vals.count(False)} of {len(vals)} points", len(vals))


def _identity_point_ints(R):
    n = R.n
    return [1 if i == j else 0 for i in range(n) for j in range(n)]


def _curvature_job(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .curvature import (antisymmetric, curvature, den_exponent_bound, phi12_residue_check, phi12_restricted_nonzero,
                            point_riemann_suite, riemann, riemann_checks, verify_first_order_curvature)
    from .solver import solve_for

    metric = build_metric(cfg)
    p = _prime(cfg)
    N = _get(cfg, "N", int, default=2)
    if metric.n >= 3:
        if cfg.command != "symmetries":
            raise DomainError("curvature tensors for n = 3 are only checked through the symmetry suite")
        points = _get(cfg, "points", int, default=50)
        for name, (ok, count) in point_riemann_suite(metric, p, points, rng).items():
            res.add(name, ANCHORS[name] + f" at {count} points", ok, timing=count)
        return
    conn = solve_for(metric, p, N)
    ct = curvature(conn)
    res.values["den_exponent_bound"] = den_exponent_bound(ct)
    if cfg.command == "curvature":
        res.add("antisymmetry", "Phi_ij = -Phi_ji", antisymmetric(ct))
        _reports_into(res, verify_first_order_curvature(ct, conn), ANCHORS)
        if metric.n == 2 and all(q == metric.qs[0] for q in metric.qs):
            q = metric.qs[0]
            if q[0][1] == 0 and q[0][0] == q[1][1]:
                rep = phi12_residue_check(ct, conn)
                _reports_into(res, [rep], ANCHORS)
                res.values["phi12_restricted_nonzero"] = phi12_restricted_nonzero(ct, conn)
        res.values["phi"] = {f"{i + 1}{j + 1}": [_witness(e) for e in M.entries()]
                             for (i, j), M in sorted(ct.Phi.items()) if i < j}
        return
    riemann(ct, conn)
    _reports_into(res, riemann_checks(ct, conn), ANCHORS)


def _conformal_job(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .conformal import (det_compat, det_perp_commutator, delta_at_identity_check, restriction_agrees, solve_conformal,
                            unit_circle_horizontal, value_at_identity)
    from .padic import embed, p_derivation_base

    p = _prime(cfg)
    N = _get(cfg, "N", int, default=2)
    m = _get(cfg, "m", int)
    d1, d2 = _get(cfg, "d1", int), _get(cfg, "d2", int)
    cd = solve_conformal(d1, d2, p, N, m)
    cn = solve_conformal(d1, d2, p, N, m, ring=cd.ring, method="newton")
    r1, r2 = cd.residuals()
    res.add("circle_system", "both circle equations vanish at (v1, v2)", r1.is_zero() and r2.is_zero())
    res.add("series_vs_newton", "series root = Newton root", cn.v1.equals(cd.v1) and cn.v2.equals(cd.v2))
    res.add("restriction", "closed-form lifts = restricted GL_2 lifts", restriction_agrees(cd))
    res.values["v1_at_identity"] = _scalar_text(value_at_identity(cd.v1))
    res.values["v2_at_identity"] = _scalar_text(value_at_identity(cd.v2))
    horiz = unit_circle_horizontal(cd)
    flat = all(p_derivation_base(embed(d, cd.base)).is_zero() for d in (d1, d2))
    res.values["unit_circle_horizontal"] = horiz
    res.add("horizontality_iff", "a^2+b^2=1 horizontal iff dd1 = dd2 = 0", all(horiz) == flat)
    if d1 == d2:
        fx = delta_at_identity_check(cd)
        res.add("delta_at_identity", "delta_i(matrix) = -(dd/d^p)/2 * pattern mod (p, a-1, b)", all(fx.values()))
        table, factor = det_compat(cd)
        res.values["det_factor"] = _scalar_text(factor)
        res.add("det_compat", "phi_i(a^2+b^2) = (d^p/phi(d)) (a^2+b^2)^p", all(table.values()))
        try:
            dp = det_perp_commutator(cd)
        except DomainError as exc:
            res.values["det_perp"] = f"skipped: {exc}"
        else:
            res.values["det_perp"] = {"sqrt_minus_one": _scalar_text(dp.sqrt_minus_one),
                                      "commutator_zero": dp.commutator_zero,
                                      "commutator": _witness(dp.commutator)}
            res.add("commute_iff", "lifts commute on the group iff on s", dp.consistent)


def _mixed_job(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .mixed import star_congruence_check, moebius_lifts, star_curvature_traces

    p, p2 = _get(cfg, "primes", _int_list)
    d = _get(cfg, "d", int, default=1)
    sc = star_curvature_traces(d, p, p2)
    res.add("trace_routes", "matrix powering = quadratic-extension trace", sc.routes_agree)
    for prime, ok in star_congruence_check(sc).items():
        res.add(f"star_alpha_mod_{prime}", f"value(a) = -2(a^(pp') + b^(pp')) mod {prime}", ok,
                _witness(sc.value_alpha))
    res.add("star_nonzero", "value(a) != 0 and value(b) != 0",
            not sc.value_alpha.is_zero() and not sc.value_beta.is_zero())
    res.values["value_alpha"] = sc.value_alpha.serialize(WITNESS_TERMS)
    res.values["value_beta"] = sc.value_beta.serialize(WITNESS_TERMS)
    for q in sorted({p, p2}):
        ml = moebius_lifts(d, q)
        res.add(f"moebius_roundtrip_{q}", "v recovered from (t^p, image of t)", ml.roundtrip and ml.coefficient_nonzero)


def _etale_job(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .mixed import etale_presentation, section_check

    metric = build_metric(cfg)
    if not metric.is_rational():
        raise DomainError("etale-check needs an integer metric")
    pres = etale_presentation(metric.qs, _prime(cfg))
    out = section_check(pres)
    res.values["generators"] = out["count"]
    res.add("section_metric", "(y^t A y - B)(y = 1) = 0 mod p", out["metric_mod_p"], timing=out["count"])
    res.add("section_torsion", "torsion generators vanish at y = 1", out["torsion_exact"], timing=out["count"])


def _determinant_job(cfg: JobConfig, res: JobResult, rng: random.Random):
    from .mixed import d_determinant, identity_y, n2_factored, odd_part, random_y

    n = _get(cfg, "n", int)
    d1 = d_determinant(n, identity_y(n))
    res.values["D_at_identity"] = d1
    res.add("no_odd_prime_divides", "D(1,...,1) = +-2^k", odd_part(d1) == 1)
    res.add("bareiss_vs_flint", "fraction-free elimination = FLINT determinant",
            d1 == d_determinant(n, identity_y(n), method="bareiss"))
    if n == 2:
        points = _get(cfg, "points", int, default=20)
        ratios = set()
        for _ in range(points):
            y = random_y(2, rng)
            f = n2_factored(y)
            D = d_determinant(2, y)
            ratios.add(0 if f == 0 else (1 if D == f else (-1 if D == -f else 2)))
        ratios.discard(0)
        res.add("n2_factored", "D = +-det(y1) det(y2) det(y_1|2), one sign", len(ratios) == 1 and 2 not in ratios)


HANDLERS = {
    "solve": _solve_like,
    "christoffel": _solve_like,
    "curvature": _curvature_job,
    "symmetries": _curvature_job,
    "conformal": _conformal_job,
    "mixed-trace": _mixed_job,
    "etale-check": _etale_job,
    "determinant": _determinant_job,
}


def run_job(cfg: JobConfig, seed: int) -> JobResult:
    res = JobResult(cfg.name, dict(sorted(cfg.raw.items())))
    rng = random.Random(f"{seed}:{cfg.name}")
    start = time.perf_counter()
    try:
        HANDLERS[cfg.command](cfg, res, rng)
    except ExactDivisionFailure as exc:
        res.internal_error = f"{type(exc).__name__}: {exc}"
    except ArithError as exc:
        res.error(cfg.command, "mathematical precondition", exc)
    log.info("job %s finished in %.2fs", cfg.name, time.perf_counter() - start)
    return res


def _run_job_args(args):
    return run_job(*args)


def run(jobs: list[JobConfig], seed: int, workers: int = 1) -> list[JobResult]:
    if workers <= 1 or len(jobs) <= 1:
        return [run_job(j, seed) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job_args, [(j, seed) for j in jobs]))


def render_report(results: list[JobResult], seed: int) -> str:
    doc = {
        "engine": f"arithlc {__version__}",
        "seed": seed,
        "jobs": [
            {
                "name": r.name,
                "config": r.config,
                "status": "pass" if r.passed else ("internal-error" if r.internal_error else "fail"),
                "internal_error": r.internal_error,
                "checks": [asdict(c) for c in r.checks],
                "values": r.values,
            }
            for r in results
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="arithlc", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="INI job file")
    ap.add_argument("--report", help="output path (default stdout)")
    ap.add_argument("--seed", type=int, default=0, help="seed for random evaluation points")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("-v", "--verbose", action="store_true")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        jobs = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        results = run(jobs, args.seed, args.jobs)
    except Exception as exc:  # anything escaping the job runner is a broken invariant
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text = render_report(results, args.seed)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(results)} jobs in {time.perf_counter() - start:.2f}s", file=sys.stderr)
    if any(r.internal_error for r in results):
        return 3
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
