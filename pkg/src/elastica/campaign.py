"""Seeded Monte Carlo trials, their CSV persistence, and the campaign analysis."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .beam import REFERENCE_CONFIG, BeamConfig, DisplacementField, simulate
from .complexity import (
    HEADER_BYTES, INFO_BYTES, compress_len, output_complexity, serialize_system,
)
from .forcing import BinaryForceSpec, TernaryForceSpec, assemble_force_field, entropy
from .rng import Xoshiro256, mix_seed
from .stats import (
    DegenerateSample, RegressionReport, Sample, confidence_band, linfit,
    nn_spread_w, nn_spread_z, pearson_r, sqrt_model_fit, trend_test,
)
from .symbolize import frequency_ones, nonzero_subsequence, output_sequence

log = logging.getLogger(__name__)

CSV_HEADER = ("trial_id", "seed", "p", "with_input", "m_ratio", "o_ratio",
              "freq_ones", "subseq_len", "x_prime", "entropy_p")

# stream tags folded into the trial seed
_P_STREAM, _SYSTEM_STREAM, _INPUT_STREAM = 0, 1, 2


class CampaignError(RuntimeError):
    def __init__(self, message, trial_id=None, completed=()):
        super().__init__(message)
        self.trial_id = trial_id
        self.completed = list(completed)


@dataclass(frozen=True)
class CampaignConfig:
    trials: int = 723
    master_seed: int = 12345
    with_input: bool = True
    beam: BeamConfig = REFERENCE_CONFIG
    tau: float = 0.1
    k: int = 7
    system_amplitude: float = 30.0
    input_amplitude: float = 10.0
    system_node: int = 15
    input_node: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


_BEAM_KEYS = {f.name for f in fields(BeamConfig)}
_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}


def parse_config(text: str, base: CampaignConfig | None = None) -> CampaignConfig:
    """Read ``key = value`` lines (``#`` starts a comment) over ``base``."""
    base = base or CampaignConfig()
    beam_kw, kw = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _BEAM_KEYS:
            beam_kw[key] = int(value) if key in ("N", "M") else float(value)
        elif key in ("seed", "master_seed"):
            kw["master_seed"] = int(value, 0)
        elif key == "with_input":
            if value.lower() not in _BOOL_WORDS:
                raise ValueError(f"line {lineno}: bad boolean {value!r}")
            kw["with_input"] = _BOOL_WORDS[value.lower()]
        elif key in ("trials", "k", "system_node", "input_node"):
            kw[key] = int(value)
        elif key in ("tau", "system_amplitude", "input_amplitude"):
            kw[key] = float(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if beam_kw:
        kw["beam"] = replace(base.beam, **beam_kw)
    return replace(base, **kw)


def load_config(path) -> CampaignConfig:
    return parse_config(Path(path).read_text())


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    seed: int
    p: float
    with_input: bool
    m_ratio: float
    o_ratio: float
    freq_ones: Optional[float]
    subseq_len: int
    x_prime: Optional[float]
    entropy_p: float

    def csv_fields(self) -> list[str]:
        def num(v):
            return "" if v is None else f"{v:.9g}"
        return [str(self.trial_id), str(self.seed), num(self.p),
                "true" if self.with_input else "false", num(self.m_ratio),
                num(self.o_ratio), num(self.freq_ones), str(self.subseq_len),
                num(self.x_prime), num(self.entropy_p)]


@dataclass
class TrialResult:
    """A record plus the intermediate objects behind it."""

    record: TrialRecord
    force: object
    field: DisplacementField
    output: object
    system_comp_len: int


def trial_seed(master_seed: int, trial_id: int) -> int:
    return mix_seed(master_seed, trial_id)


def draw_p(seed: int) -> float:
    """Uniform on (0, 1]."""
    return 1.0 - Xoshiro256(mix_seed(seed, _P_STREAM)).random()


def execute_trial(config: CampaignConfig, seed: int, p: float, trial_id: int = 0) -> TrialResult:
    """One trial with an explicit trial seed and system probability."""
    beam = config.beam
    system = TernaryForceSpec(p=p, seed=mix_seed(seed, _SYSTEM_STREAM),
                              amplitude=config.system_amplitude, length=beam.M,
                              node=config.system_node)
    inp = None
    if config.with_input:
        inp = BinaryForceSpec(seed=mix_seed(seed, _INPUT_STREAM),
                              amplitude=config.input_amplitude, length=beam.M,
                              node=config.input_node)
    force = assemble_force_field(beam, system, inp)
    field_ = simulate(beam, force)
    out = output_sequence(field_, beam, config.tau)
    desc = serialize_system(force, beam)
    sys_len = compress_len(desc.to_bytes())
    m_ratio = sys_len / desc.total_bytes
    o_ratio = output_complexity(out).ratio
    sub = nonzero_subsequence(out)
    freq = frequency_ones(sub) if len(sub) else None
    xp = sys_len / len(sub) if len(sub) else None
    record = TrialRecord(trial_id=trial_id, seed=seed, p=p, with_input=config.with_input,
                         m_ratio=m_ratio, o_ratio=o_ratio, freq_ones=freq,
                         subseq_len=len(sub), x_prime=xp, entropy_p=entropy(p))
    return TrialResult(record, force, field_, out, sys_len)


def run_trial(config: CampaignConfig, trial_id: int) -> TrialRecord:
    seed = trial_seed(config.master_seed, trial_id)
    try:
        return execute_trial(config, seed, draw_p(seed), trial_id).record
    except Exception as exc:
        raise CampaignError(f"trial {trial_id} failed: {exc}", trial_id) from exc


def _run_one(args):
    config, trial_id = args
    return run_trial(config, trial_id)


def thread_count() -> int:
    """Worker cap from ELASTICA_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("ELASTICA_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("ELASTICA_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def run_campaign(
    config: CampaignConfig,
    csv_path=None,
    first_id: int = 0,
    progress: Optional[Callable[[int, int], None]] = None,
    workers: Optional[int] = None,
) -> list[TrialRecord]:
    """Run trials ``first_id .. first_id + trials - 1``; rows come back in id order.

    With ``csv_path`` the rows are written there.  If a trial fails, the
    completed rows go to ``<csv>.partial.csv`` with a JSON manifest of the
    finished ids in ``<csv>.manifest.json``, and CampaignError is raised.
    """
    ids = list(range(first_id, first_id + config.trials))
    workers = workers or thread_count()
    done: dict[int, TrialRecord] = {}
    total = len(ids)
    try:
        if workers <= 1 or total == 1:
            for tid in ids:
                done[tid] = run_trial(config, tid)
                if progress:
                    progress(len(done), total)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                chunk = max(1, total // (workers * 8))
                for tid, rec in zip(ids, pool.map(_run_one, ((config, t) for t in ids),
                                                  chunksize=chunk)):
                    done[tid] = rec
                    if progress:
                        progress(len(done), total)
    except CampaignError as exc:
        records = [done[t] for t in sorted(done)]
        if csv_path is not None:
            _write_partial(Path(csv_path), records, exc)
        raise CampaignError(str(exc), exc.trial_id, sorted(done)) from exc
    records = [done[t] for t in ids]
    if csv_path is not None:
        write_records(csv_path, records)
    return records


def _write_partial(path: Path, records, exc: CampaignError):
    write_records(path.with_suffix(".partial.csv"), records)
    manifest = {"completed": [r.trial_id for r in records], "failed": exc.trial_id,
                "error": str(exc)}
    path.with_suffix(".manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


# -- CSV --------------------------------------------------------------------

def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.csv_fields())
    return buf.getvalue()


def write_records(path, records: Iterable[TrialRecord]):
    Path(path).write_text(records_to_csv(records))


class SchemaError(ValueError):
    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


def parse_records(text: str) -> list[TrialRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise SchemaError("empty CSV")
    header = [h.strip() for h in header]
    for want, got in zip(CSV_HEADER, header + [None] * len(CSV_HEADER)):
        if want != got:
            raise SchemaError(f"column {want!r} expected, found {got!r}", want)
    if len(header) != len(CSV_HEADER):
        raise SchemaError(f"unexpected column {header[len(CSV_HEADER)]!r}",
                          header[len(CSV_HEADER)])

    def opt(v):
        return float(v) if v != "" else None

    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise SchemaError(f"row {reader.line_num} has {len(row)} fields")
        vals = dict(zip(CSV_HEADER, row))
        col = None
        try:
            col = "trial_id"; tid = int(vals[col])
            col = "seed"; seed = int(vals[col])
            col = "p"; p = float(vals[col])
            col = "with_input"; wi = _BOOL_WORDS[vals[col].lower()]
            col = "m_ratio"; m = float(vals[col])
            col = "o_ratio"; o = float(vals[col])
            col = "freq_ones"; fr = opt(vals[col])
            col = "subseq_len"; sl = int(vals[col])
            col = "x_prime"; xp = opt(vals[col])
            col = "entropy_p"; h = float(vals[col])
        except (ValueError, KeyError) as exc:
            raise SchemaError(f"row {reader.line_num}: bad value in column {col!r}", col) from exc
        records.append(TrialRecord(tid, seed, p, wi, m, o, fr, sl, xp, h))
    return records


def read_records(path) -> list[TrialRecord]:
    return parse_records(Path(path).read_text())


# -- analysis ---------------------------------------------------------------

@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray


def histogram(values, bins: int = 20) -> Histogram:
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins)
    return Histogram(edges, counts)


@dataclass
class DecileSummary:
    """freq_ones summarized over M deciles."""

    centers: np.ndarray
    means: np.ndarray
    spreads: np.ndarray  # standard deviation within each decile
    counts: np.ndarray
    trend_slope: float
    trend_p: float


@dataclass
class AnalysisReport:
    k: int
    fits: dict = field(default_factory=dict)       # name -> RegressionReport | None
    absent: dict = field(default_factory=dict)     # name -> reason
    samples: dict = field(default_factory=dict)    # name -> Sample
    histograms: dict = field(default_factory=dict)  # name -> Histogram
    band: Optional[dict] = None
    noinput_r: Optional[float] = None
    deciles: Optional[DecileSummary] = None
    entropy_table: Optional[dict] = None

    @property
    def fit_Y_on_X(self):
        return self.fits.get("fit_Y_on_X")

    @property
    def fit_noinput(self):
        return self.fits.get("fit_noinput")

    @property
    def fit_Z_on_X(self):
        return self.fits.get("fit_Z_on_X")

    @property
    def fit_W2_on_X(self):
        return self.fits.get("fit_W2_on_X")

    @property
    def fit_W2_on_Xprime(self):
        return self.fits.get("fit_W2_on_Xprime")


FIT_NAMES = ("fit_Y_on_X", "fit_noinput", "fit_Z_on_X", "fit_W2_on_X", "fit_W2_on_Xprime")


def decile_summary(m, freq, groups: int = 10) -> DecileSummary:
    """Split trials into M-quantile groups and test the spread for an upward trend."""
    m = np.asarray(m, dtype=float)
    freq = np.asarray(freq, dtype=float)
    order = np.lexsort((np.arange(len(m)), m))
    parts = np.array_split(order, groups)
    centers = np.array([m[p].mean() for p in parts])
    means = np.array([freq[p].mean() for p in parts])
    spreads = np.array([freq[p].std(ddof=1) for p in parts])
    counts = np.array([len(p) for p in parts])
    slope, pval = trend_test(np.arange(groups, dtype=float), spreads)
    return DecileSummary(centers, means, spreads, counts, slope, pval)


def analyze(records: Sequence[TrialRecord], k: int = 7, band_points: int = 101,
            bins: int = 20, beam: BeamConfig = REFERENCE_CONFIG) -> AnalysisReport:
    """Run every regression the campaign supports over ``records``.

    Records with and without input are split by their flag.  ``beam`` fixes
    the serialized system length used for the bits-per-character table.  A sub-analysis
    that lacks data is recorded in ``report.absent`` and the rest proceed.
    """
    report = AnalysisReport(k=k)
    with_in = [r for r in records if r.with_input]
    no_in = [r for r in records if not r.with_input]

    def attempt(name, fn):
        try:
            report.fits[name] = fn()
        except (DegenerateSample, ValueError) as exc:
            report.fits[name] = None
            report.absent[name] = str(exc)

    def need(rows, what):
        if len(rows) < 3:
            raise DegenerateSample(f"{what}: need at least 3 records, got {len(rows)}")
        return rows

    m_in = np.array([r.m_ratio for r in with_in])
    o_in = np.array([r.o_ratio for r in with_in])
    report.samples["O_vs_M"] = Sample(m_in, o_in)

    attempt("fit_Y_on_X", lambda: linfit(Sample(*_xy(need(with_in, "with-input"), "m_ratio", "o_ratio"))))

    def noinput():
        rows = need(no_in, "no-input")
        x, y = _xy(rows, "m_ratio", "o_ratio")
        report.samples["O_vs_M_noinput"] = Sample(x, y)
        fit = linfit(Sample(x, y))
        try:
            report.noinput_r = pearson_r(x, y)
        except ValueError:
            report.noinput_r = None
        return fit
    attempt("fit_noinput", noinput)

    def z_fit():
        x, y = _xy(need(with_in, "with-input"), "m_ratio", "o_ratio")
        z = nn_spread_z(Sample(x, y), k)
        report.samples["Z_vs_M"] = z
        return linfit(z)
    attempt("fit_Z_on_X", z_fit)

    freq_rows = [r for r in with_in if r.freq_ones is not None]

    def w_fit():
        x, y = _xy(need(freq_rows, "frequency"), "m_ratio", "freq_ones")
        report.samples["freq_vs_M"] = Sample(x, y)
        w = nn_spread_w(Sample(x, y), k)
        report.samples["W_vs_M"] = w
        return sqrt_model_fit(w)
    attempt("fit_W2_on_X", w_fit)

    def wp_fit():
        rows = need([r for r in freq_rows if r.x_prime is not None], "X'")
        x, y = _xy(rows, "x_prime", "freq_ones")
        w = nn_spread_w(Sample(x, y), k)
        report.samples["W_vs_Xprime"] = w
        return sqrt_model_fit(w)
    attempt("fit_W2_on_Xprime", wp_fit)

    for name, fit in report.fits.items():
        if fit is not None:
            report.histograms[name] = histogram(fit.residuals, bins)

    fit = report.fit_Y_on_X
    if fit is not None:
        grid = np.linspace(m_in.min(), m_in.max(), band_points)
        lo, hi = confidence_band(fit, grid, 0.95)
        report.band = {"x": grid, "fit": fit.predict(grid), "lower": lo, "upper": hi}

    if len(freq_rows) >= 20:
        x, y = _xy(freq_rows, "m_ratio", "freq_ones")
        report.deciles = decile_summary(x, y)

    if with_in:
        total = HEADER_BYTES + (beam.N + 1) * beam.M
        report.entropy_table = {
            "p": np.array([r.p for r in with_in]),
            "m_ratio": m_in,
            "bits_per_char": m_in * total * 8 / INFO_BYTES,
            "entropy": np.array([r.entropy_p for r in with_in]),
        }
    return report


def _xy(rows, xname, yname):
    return (np.array([getattr(r, xname) for r in rows], dtype=float),
            np.array([getattr(r, yname) for r in rows], dtype=float))
