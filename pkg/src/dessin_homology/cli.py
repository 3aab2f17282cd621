"""
Command-line pipeline: schemes -> bases -> complex -> rank -> betti.

Every stage writes its artifacts into the work directory and records itself
in ``manifest.json`` together with a hash of the configuration.  A rerun
with the same configuration skips completed stages; a rerun with a different
configuration in the same directory is refused (exit code 3).  The rank
stage also checkpoints after each matrix.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .complex_builder import (
    ComplexLevels,
    boundary_matrix,
    build_complex,
    default_modulus,
    cell_orbits,
    euler_characteristic,
    symmetry_subgroup,
)
from .gf2_linalg import (
    DEFAULT_DENSE_CAP,
    BettiError,
    RankCertificate,
    SparseBoolMatrix,
    betti_numbers,
    rank_dense,
    rank_wiedemann,
)
from .gf2_linalg.elimination import rank_elimination
from .gf2_linalg.equivariant import character_block_ranks, character_classes
from .ribbon import closure_under_contraction, enumerate_trivalent_one_face, symmetry_table
from .surface_homology import sp_order

log = logging.getLogger("dessin_homology")

SCHEMA_VERSION = 1
STAGES = ["schemes", "bases", "complex", "rank", "betti"]
ENV_PREFIX = "DESSIN_HOMOLOGY_"

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_CHECKPOINT = 3


class CheckpointMismatch(RuntimeError):
    pass


class VerificationFailed(RuntimeError):
    def __init__(self, failures):
        super().__init__("; ".join(failures))
        self.failures = list(failures)


# ---------------------------------------------------------------------------
# small I/O helpers
# ---------------------------------------------------------------------------

def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path: Path) -> dict:
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("schema_version") != SCHEMA_VERSION:
        raise CheckpointMismatch(f"{path.name}: schema version {data.get('schema_version')} != {SCHEMA_VERSION}")
    return data


def write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def code_str(code) -> str:
    return ".".join(map(str, code))


# ---------------------------------------------------------------------------
# configuration and manifest
# ---------------------------------------------------------------------------

class Config:
    def __init__(self, genus, modulus, seed, workdir, threads, dense_cap, method, allow_large):
        self.genus = int(genus)
        self.modulus = int(modulus) if modulus is not None else default_modulus(self.genus)
        self.seed = int(seed)
        self.workdir = Path(workdir)
        self.threads = int(threads)
        self.dense_cap = int(dense_cap)
        self.method = method
        self.allow_large = bool(allow_large)
        if self.genus < 1:
            raise ValueError("genus must be at least 1")
        if self.modulus not in (2, 3):
            raise ValueError("modulus must be 2 or 3")

    def identity(self) -> dict:
        """Settings that determine artifact contents (threads excluded)."""
        return {
            "genus": self.genus,
            "modulus": self.modulus,
            "seed": self.seed,
            "dense_cap": self.dense_cap,
            "method": self.method,
        }

    def digest(self) -> str:
        blob = json.dumps(self.identity(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class Manifest:
    def __init__(self, cfg: Config):
        self.cfg = cfg
        self.path = cfg.workdir / "manifest.json"
        if self.path.exists():
            data = read_json(self.path)
            if data["config_hash"] != cfg.digest():
                raise CheckpointMismatch(
                    f"{cfg.workdir} holds artifacts for {data['config']}, not {cfg.identity()}"
                )
            self.done = list(data["completed"])
        else:
            self.done = []

    def save(self) -> None:
        write_json(self.path, {
            "config": self.cfg.identity(),
            "config_hash": self.cfg.digest(),
            "completed": self.done,
            "version": __version__,
        })

    def mark(self, stage: str) -> None:
        if stage not in self.done:
            self.done.append(stage)
        self.save()


# ---------------------------------------------------------------------------
# size estimate for large genera
# ---------------------------------------------------------------------------

def one_face_gluings(g: int, n: int) -> int:
    """Rooted one-face gluings of a 2n-gon into genus g (Harer-Zagier recursion)."""
    table = {}

    def eps(h, k):
        if h < 0 or k < 0 or 2 * h > k:
            return 0
        if k == 0:
            return 1 if h == 0 else 0
        if (h, k) not in table:
            val = 2 * (2 * k - 1) * eps(h, k - 1) + (k - 1) * (2 * k - 1) * (2 * k - 3) * eps(h - 1, k - 2)
            table[h, k] = val // (k + 1)
        return table[h, k]

    return eps(g, n)


def estimate_top_cells(g: int, m: int) -> int:
    """Upper estimate of top-dimensional cells: one-face maps with 6g-3 edges
    (counted unrooted) times the number of symplectic bases."""
    n = 6 * g - 3
    return sp_order(g, m) * -(-one_face_gluings(g, n) // (2 * n))


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

class Pipeline:
    def __init__(self, cfg: Config):
        self.cfg = cfg
        cfg.workdir.mkdir(parents=True, exist_ok=True)
        self.manifest = Manifest(cfg)
        self._cx: ComplexLevels | None = None

    @property
    def wd(self) -> Path:
        return self.cfg.workdir

    def complex(self) -> ComplexLevels:
        if self._cx is None:
            self._cx = build_complex(self.cfg.genus, self.cfg.modulus)
        return self._cx

    def run(self, stages: list[str]) -> None:
        if self.cfg.genus > 2 and not self.cfg.allow_large:
            est = estimate_top_cells(self.cfg.genus, self.cfg.modulus)
            raise SystemExit(
                f"genus {self.cfg.genus}: about {est:.3e} top cells or fewer; pass --allow-large to proceed"
            )
        for stage in stages:
            if stage in self.manifest.done:
                log.info("stage %s already complete", stage)
                continue
            t0 = time.perf_counter()
            getattr(self, f"stage_{stage}")()
            self.manifest.mark(stage)
            log.info("stage %s done in %.1fs", stage, time.perf_counter() - t0)

    def stage_schemes(self) -> None:
        tops = enumerate_trivalent_one_face(self.cfg.genus)
        levels = closure_under_contraction(tops.values())
        write_csv(self.wd / "schemes.csv", ["edges", "symmetry_order", "count"], symmetry_table(levels))
        lines = []
        for k in sorted(levels, reverse=True):
            for code, d in levels[k].items():
                lines.append(f"{code_str(code)} ; {d.serialize()}\n")
        atomic_write_text(self.wd / "dessins.txt", "".join(lines))

    def stage_bases(self) -> None:
        cx = self.complex()
        rows = []
        for dim, level in enumerate(cx.levels):
            for dc in level:
                rows.append([
                    dim, dc.n_edges, code_str(dc.code), dc.aut_order, dc.action_order,
                    len(cx.group), dc.n_cells,
                ])
        write_csv(
            self.wd / "bases.csv",
            ["dim", "edges", "dessin_code", "automorphism_order", "effective_order", "bases", "cells"],
            rows,
        )

    def stage_complex(self) -> None:
        cx = self.complex()
        tmp = self.wd / "cells.csv.tmp"
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write("dim,index,dessin_code,basis_hash\n")
            for dim, level in enumerate(cx.levels):
                for dc in level:
                    code = code_str(dc.code)
                    keys = dc.keys[dc.reps]
                    fh.write("".join(
                        f"{dim},{dc.offset + i},{code},{int(k):016x}\n" for i, k in enumerate(keys)
                    ))
        os.replace(tmp, self.wd / "cells.csv")
        for j in range(1, cx.max_dim + 1):
            boundary_matrix(cx, j).write_sms(self.wd / f"d{j}.sms")
        chi, ratio = euler_characteristic(cx)
        write_json(self.wd / "counts.json", {"counts": cx.counts, "group_order": len(cx.group)})
        write_json(self.wd / "chi.json", {
            "chi": chi, "chi_over_group_order": str(ratio), "group_order": len(cx.group),
        })

    def load_matrix(self, j: int) -> SparseBoolMatrix:
        return SparseBoolMatrix.read_sms(self.wd / f"d{j}.sms")

    def stage_rank(self) -> None:
        counts = read_json(self.wd / "counts.json")["counts"]
        top = len(counts) - 1
        path = self.wd / "ranks.json"
        if self.cfg.method == "equivariant":
            certs = self._rank_equivariant(counts)
            write_json(path, {"certificates": certs, "ranks": _rank_list(certs, top)})
            return
        certs: dict[str, dict] = read_json(path)["certificates"] if path.exists() else {}
        drop = None
        for j in range(top, 0, -1):
            piv_path = self.wd / f"pivots_d{j}.npy"
            if str(j) in certs and (self.cfg.method != "elimination" or piv_path.exists()):
                drop = np.load(piv_path) if piv_path.exists() else None
                continue
            m = self.load_matrix(j)
            cert, pivots = self._rank_one(m, j, drop)
            certs[str(j)] = cert.to_json()
            if pivots is not None:
                np.save(piv_path, pivots)
            drop = pivots
            write_json(path, {"certificates": certs, "ranks": _rank_list(certs, top)})
            log.info("rank d%d = %d (%s, %.1fs)", j, cert.rank, cert.method, cert.seconds)
        write_json(path, {"certificates": certs, "ranks": _rank_list(certs, top)})

    def _rank_one(self, m: SparseBoolMatrix, j: int, drop):
        cfg = self.cfg
        seed = cfg.seed * 1000 + j
        if cfg.method == "wiedemann":
            return rank_wiedemann(m, seed=seed, dense_cap=cfg.dense_cap), None
        if cfg.method == "dense":
            t0 = time.perf_counter()
            r = rank_dense(m, cap=cfg.dense_cap)
            return RankCertificate(r, "dense", 1, Fraction(0), seed, m.shape, (r,), True,
                                   time.perf_counter() - t0), None
        full_shape = m.shape
        if drop is not None and len(drop):
            keep = np.ones(m.n_cols, dtype=bool)
            keep[drop] = False
            m = m.submatrix(np.arange(m.n_rows), np.flatnonzero(keep))
        res = rank_elimination(m, dense_cap=cfg.dense_cap)
        verified = m.n_rows * m.n_cols <= cfg.dense_cap
        if verified and rank_dense(m, cap=cfg.dense_cap) != res.rank:
            raise VerificationFailed([f"d{j}: sparse and dense elimination disagree"])
        cert = RankCertificate(
            rank=res.rank, method="elimination", trials=1, failure_probability_bound=Fraction(0),
            seed=seed, shape=full_shape, estimates=(res.rank,),
            dense_verified=verified, seconds=res.seconds,
        )
        return cert, res.pivot_rows

    def _rank_equivariant(self, counts: list[int]) -> dict[str, dict]:
        """All ranks at once, one character of the symmetry subgroup at a time.

        Each character's block ranks are checkpointed in ``characters.json``.
        """
        cfg = self.cfg
        cx = self.complex()
        if cx.counts != counts:
            raise VerificationFailed(["cell counts of the rebuilt complex differ from counts.json"])
        sub = symmetry_subgroup(cx.group)
        orbits = cell_orbits(cx, sub)
        mats = [self.load_matrix(j) for j in range(1, len(counts))]
        path = self.wd / "characters.json"
        done: dict[str, dict] = read_json(path)["characters"] if path.exists() else {}
        classes = character_classes(sub.exponents.shape[1], sub.p)
        t0 = time.perf_counter()
        for cls in classes:
            key = ",".join(map(str, cls.k))
            if key in done:
                continue
            dims, results = character_block_ranks(
                mats, orbits, sub.exponents, sub.p, cls.k, dense_cap=cfg.dense_cap
            )
            done[key] = {"weight": cls.weight, "dims": dims, "ranks": [r.rank for r in results]}
            write_json(path, {"p": sub.p, "rank": len(sub.generators), "characters": done})
            log.info("character %s (x%d): ranks %s", key, cls.weight, done[key]["ranks"])
        seconds = time.perf_counter() - t0
        dims = [sum(c["weight"] * c["dims"][j] for c in done.values()) for j in range(len(counts))]
        if dims != counts:
            raise VerificationFailed([f"character blocks have dimensions {dims}, expected {counts}"])
        certs = {}
        for j, m in enumerate(mats, start=1):
            rank = sum(c["weight"] * c["ranks"][j - 1] for c in done.values())
            verified = m.n_rows * m.n_cols <= cfg.dense_cap
            if verified and rank_dense(m, cap=cfg.dense_cap) != rank:
                raise VerificationFailed([f"d{j}: character splitting and dense elimination disagree"])
            certs[str(j)] = RankCertificate(
                rank=rank, method="equivariant", trials=1, failure_probability_bound=Fraction(0),
                seed=cfg.seed * 1000 + j, shape=m.shape, estimates=(rank,),
                dense_verified=verified, seconds=seconds,
            ).to_json()
        return certs

    def stage_betti(self) -> None:
        counts = read_json(self.wd / "counts.json")["counts"]
        ranks = read_json(self.wd / "ranks.json")["ranks"]
        b = betti_numbers(counts, ranks)
        write_json(self.wd / "betti.json", {
            "betti": b, "counts": counts, "ranks": ranks,
            "euler_from_betti": sum((-1) ** j * x for j, x in enumerate(b)),
        })


def _rank_list(certs: dict, top: int) -> list[int | None]:
    return [certs[str(j)]["rank"] if str(j) in certs else None for j in range(1, top + 1)]


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify(pipe: Pipeline, sample_minors: int = 0) -> list[str]:
    """Re-check the artifacts on disk; return the list of failures."""
    wd = pipe.wd
    failures: list[str] = []
    counts = read_json(wd / "counts.json")["counts"]
    group_order = sp_order(pipe.cfg.genus, pipe.cfg.modulus)

    if (wd / "bases.csv").exists():
        per_dim = [Fraction(0)] * len(counts)
        for row in read_csv(wd / "bases.csv"):
            per_dim[int(row["dim"])] += Fraction(int(row["bases"]), int(row["effective_order"]))
        for j, (n, f) in enumerate(zip(counts, per_dim)):
            if f != n:
                failures.append(f"n_{j} = {n} but sum of |Sp|/|Aut| over dessins is {f}")
    cells = np.zeros(len(counts), dtype=np.int64)
    with open(wd / "cells.csv", encoding="ascii") as fh:
        next(fh)
        for line in fh:
            cells[int(line[: line.index(",")])] += 1
    if list(cells) != list(counts):
        failures.append(f"cells.csv has {list(cells)} cells per dimension, counts.json {counts}")

    mats = [pipe.load_matrix(j) for j in range(1, len(counts))]
    for j, m in enumerate(mats, start=1):
        if m.shape != (counts[j - 1], counts[j]):
            failures.append(f"d{j} has shape {m.shape}, expected {(counts[j - 1], counts[j])}")
    for j in range(1, len(mats)):
        prod = mats[j - 1] @ mats[j]
        if not prod.is_zero():
            failures.append(f"d{j} d{j + 1} != 0 ({prod.nnz} nonzeros)")

    chi_n = sum((-1) ** j * n for j, n in enumerate(counts))
    chi = read_json(wd / "chi.json")
    if chi["chi"] != chi_n or Fraction(chi["chi_over_group_order"]) != Fraction(chi_n, group_order):
        failures.append(f"chi.json {chi} disagrees with counts (chi = {chi_n})")

    if (wd / "ranks.json").exists():
        ranks = read_json(wd / "ranks.json")["ranks"]
        for j, m in enumerate(mats, start=1):
            r = ranks[j - 1]
            small = m.n_rows * m.n_cols <= pipe.cfg.dense_cap
            if r is not None and small and rank_dense(m, cap=pipe.cfg.dense_cap) != r:
                failures.append(f"d{j}: recorded rank {r} differs from dense elimination")
        if None not in ranks:
            full = [0, *ranks, 0]
            for j, n in enumerate(counts):
                if full[j] + full[j + 1] > n:
                    failures.append(f"r_{j} + r_{j + 1} = {full[j] + full[j + 1]} exceeds n_{j} = {n}")
            try:
                b = betti_numbers(counts, ranks)
            except BettiError as exc:
                failures.append(str(exc))
            else:
                chi_b = sum((-1) ** j * x for j, x in enumerate(b))
                if chi_b != chi_n:
                    failures.append(f"Euler characteristic from Betti numbers {chi_b} != {chi_n}")
                if (wd / "betti.json").exists() and read_json(wd / "betti.json")["betti"] != b:
                    failures.append("betti.json disagrees with counts and ranks")

    if sample_minors:
        rng = np.random.default_rng(pipe.cfg.seed)
        for t in range(sample_minors):
            m = mats[t % len(mats)]
            side = int(np.sqrt(pipe.cfg.dense_cap))
            rows = np.sort(rng.choice(m.n_rows, size=min(m.n_rows, side, 400), replace=False))
            cols = np.sort(rng.choice(m.n_cols, size=min(m.n_cols, side, 400), replace=False))
            sub = m.submatrix(rows, cols)
            a = rank_dense(sub, cap=pipe.cfg.dense_cap)
            b = rank_wiedemann(sub, seed=rng.integers(1 << 31), dense_cap=0).rank
            if a != b:
                failures.append(f"minor {t} of d{t % len(mats) + 1}: dense {a} != wiedemann {b}")
    return failures


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=int(_env("genus", 1)))
    common.add_argument("--modulus", type=int, default=_env("modulus", None))
    common.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    common.add_argument("--workdir", default=_env("workdir", None),
                        help="artifact directory (default: ./run-g<genus>-m<modulus>)")
    common.add_argument("--threads", type=int, default=int(_env("threads", 1)))
    common.add_argument("--dense-cap", type=int, default=int(_env("dense_cap", DEFAULT_DENSE_CAP)))
    common.add_argument("--method", choices=["equivariant", "elimination", "wiedemann", "dense"],
                        default=_env("method", "equivariant"), help="rank engine")
    common.add_argument("--allow-large", action="store_true",
                        default=_env("allow_large", "0") not in ("", "0", "false"))
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="dessin-homology",
        description="Mod-2 Betti numbers of level-m covers of moduli spaces of one-pointed curves.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for stage in STAGES:
        sub.add_parser(stage, parents=[common], help=f"run the pipeline up to '{stage}'")
    p_all = sub.add_parser("all", aliases=["run"], parents=[common], help="run the pipeline")
    p_all.add_argument("--stages", default=_env("stages", ",".join(STAGES)),
                       help="comma-separated prefix of " + ",".join(STAGES))
    p_ver = sub.add_parser("verify", parents=[common], help="re-check artifacts")
    p_ver.add_argument("--sample-minors", type=int, default=int(_env("sample_minors", 0)),
                       help="also compare dense and Wiedemann ranks on this many random minors")
    return parser


def parse_stages(text: str) -> list[str]:
    stages = [s.strip() for s in text.split(",") if s.strip()]
    if stages != STAGES[: len(stages)] or not stages:
        raise ValueError(f"--stages must be a nonempty prefix of {','.join(STAGES)}, got {text!r}")
    return stages


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(message)s",
    )
    modulus = int(args.modulus) if args.modulus not in (None, "") else None
    genus = args.genus
    workdir = args.workdir or f"run-g{genus}-m{modulus or default_modulus(genus)}"
    try:
        cfg = Config(genus, modulus, args.seed, workdir, args.threads, args.dense_cap,
                     args.method, args.allow_large)
        if args.command == "verify":
            pipe = Pipeline(cfg)
            failures = verify(pipe, sample_minors=args.sample_minors)
            for f in failures:
                print(f"FAIL {f}")
            if failures:
                return EXIT_VERIFY
            print("all checks passed")
            return EXIT_OK
        if args.command in ("all", "run"):
            stages = parse_stages(args.stages)
        else:
            stages = STAGES[: STAGES.index(args.command) + 1]
        pipe = Pipeline(cfg)
        pipe.run(stages)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except CheckpointMismatch as exc:
        print(f"checkpoint mismatch: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _summary(pipe)
    return EXIT_OK


def _summary(pipe: Pipeline) -> None:
    wd = pipe.wd
    for name in ("counts.json", "chi.json", "ranks.json", "betti.json"):
        p = wd / name
        if p.exists():
            data = read_json(p)
            data.pop("certificates", None)
            data.pop("schema_version", None)
            print(f"{name}: {json.dumps(data, sort_keys=True)}")


if __name__ == "__main__":
    sys.exit(main())
