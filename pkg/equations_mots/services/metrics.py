"""
Service Layer Pattern: Mesures par etape et par phase d'un run guide.

Chaque enregistrement est recalcule integralement depuis l'etat courant
(longueurs, bits de Huffman, H_d, H_n, sommes de la strategie). Les runs
s'exportent en JSON ou en CSV et se relisent a l'identique.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from equations_mots.config import FLOAT_DIGITS, METRICS_SCHEMA_VERSION
from equations_mots.errors import EquationError
from equations_mots.models import CoverageState, Equation, Side
from equations_mots.services.depfactors import (
    PhaseCounters,
    compute_potentials,
    init_depfactors,
    verify_invariants,
)
from equations_mots.services.encoding import EncodedSize, measure
from equations_mots.services.strategy import TARGETS, PartitionChoice, StrategySums
from equations_mots.utils import ceil_log2

logger = logging.getLogger(__name__)

# Constantes de la recurrence par phase
PHASE_EVENT_FACTOR = 129
H_D_RATIO = 2 / 3
H_D_SLACK = 41
H_N_RATIO = 5 / 6
H_N_SLACK = 15540
PEAK_RATIO = 8
PEAK_SLACK = 2104
# Chaque somme non nulle est ciblee une fois toutes les CYCLE_LENGTH partitions
CYCLE_LENGTH = 4

# ============================================================
# ENREGISTREMENTS
# ============================================================


@dataclass
class StepRecord:
    """Mesures apres une etape (les sommes sont None hors strategie)."""
    phase: int
    step: int
    label: str
    len_u: int
    len_v: int
    letter_bits: int
    total_bits: int
    padded_bits: int
    letters_only_bits: int
    dep_encoding_bits: int
    h_d: float
    h_n: float
    s_a: int | None = None
    s_b: int | None = None
    s_c: int | None = None
    s_d: int | None = None
    uncovered: int = 0
    target: str | None = None
    target_pre: int | None = None
    target_post: int | None = None

    @property
    def h_total(self) -> float:
        return self.h_d + self.h_n


STEP_FIELDS = [f.name for f in fields(StepRecord)]
_INT_FIELDS = {"phase", "step", "len_u", "len_v", "letter_bits", "total_bits", "padded_bits",
               "letters_only_bits", "dep_encoding_bits", "uncovered"}
_FLOAT_FIELDS = {"h_d", "h_n"}
_OPTIONAL_INT_FIELDS = {"s_a", "s_b", "s_c", "s_d", "target_pre", "target_post"}


@dataclass
class PhaseMetrics:
    """
    Mesures d'une phase.

    Attributes:
        phase: Numero de phase.
        steps: Enregistrements de la phase, dans l'ordre.
        partitions: Nombre de partitions appliquees.
        sum_k: Somme des k_D (sup-D symboles en debut de phase).
        sum_p: Somme des p_D.
        sum_e: Somme des e_D.
        sum_h_p: Somme des h(p_D).
        sum_h_e: Somme des h(e_D).
        alphabet_size: |Gamma| en debut de phase.
        initial_sum: Plus grande des sommes S_a..S_d en debut de phase (0 hors strategie).
    """
    phase: int
    steps: list[StepRecord] = field(default_factory=list)
    partitions: int = 0
    alphabet_size: int = 0
    initial_sum: int = 0
    sum_k: int = 0
    sum_p: int = 0
    sum_e: int = 0
    sum_h_p: float = 0.0
    sum_h_e: float = 0.0

    @property
    def start(self) -> StepRecord | None:
        return self.steps[0] if self.steps else None

    @property
    def end(self) -> StepRecord | None:
        return self.steps[-1] if self.steps else None


_PHASE_FIELDS = ("phase", "partitions", "alphabet_size", "initial_sum",
                 "sum_k", "sum_p", "sum_e", "sum_h_p", "sum_h_e")


@dataclass
class MetricsRun:
    """
    Mesures d'un run complet.

    Attributes:
        input_bits: Abs(U0, V0), marqueurs compris.
        input_bits_without_markers: Abs(U0, V0) hors marqueurs.
        phases: Mesures par phase.
        violations: Violations des invariants des facteurs constatees pendant le run.
        max_blocked_pops: Plus grand nombre de depilements d'un cote deja bloque.
    """
    input_bits: int = 0
    input_bits_without_markers: int = 0
    phases: list[PhaseMetrics] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    max_blocked_pops: int | None = None

    @property
    def steps(self) -> list[StepRecord]:
        return [s for p in self.phases for s in p.steps]

    def max_ratio(self) -> float:
        """Maximum de (H_d + H_n) / Abs(U0, V0) sur le run."""
        steps = self.steps
        if not steps or not self.input_bits:
            return 0.0
        return max(s.h_total for s in steps) / self.input_bits


class MetricsRecorder:
    """
    Enregistreur branche sur run_phase.

    Attributes:
        ctx: Contexte d'origine des facteurs de dependance.
        run: Mesures accumulees.
        sums_of: Calcul des sommes de la strategie (None en mode canonique).
        check_invariants: Verifie les invariants des facteurs a chaque etape.
    """

    def __init__(self, eq: Equation, sums_of: Callable[[Equation], StrategySums] | None = None,
                 check_invariants: bool = True) -> None:
        self.ctx = init_depfactors(eq).ctx
        self.run = MetricsRun(self.ctx.input_bits, self.ctx.input_bits_without_markers)
        self.sums_of = sums_of
        self.check_invariants = check_invariants
        self.counters: PhaseCounters | None = None
        self._current: PhaseMetrics | None = None

    def start_phase(self, eq: Equation, phase: int) -> PhaseCounters:
        self.counters = PhaseCounters.start(eq)
        self._current = PhaseMetrics(phase, alphabet_size=len(eq.alphabet))
        self.run.phases.append(self._current)
        start = self.record("phase_start", eq, measure(eq), CoverageState(eq.alphabet))
        if start.s_a is not None:
            self._current.initial_sum = max(start.s_a, start.s_b, start.s_c, start.s_d)  # type: ignore[type-var]
        return self.counters

    def record(self, label: str, eq: Equation, size: EncodedSize, coverage: CoverageState,
               choice: object | None = None) -> StepRecord:
        """
        Ajoute un enregistrement recalcule depuis l'equation courante.

        Returns:
            Enregistrement ajoute.
        """
        if self._current is None:
            raise EquationError("record() appele hors d'une phase")
        potentials = compute_potentials(eq, self.ctx)
        sums = self.sums_of(eq) if self.sums_of is not None else None
        record = StepRecord(
            phase=self._current.phase,
            step=len(self._current.steps),
            label=label,
            len_u=eq.length(Side.LHS),
            len_v=eq.length(Side.RHS),
            letter_bits=size.letter_bits,
            total_bits=size.total_bits,
            padded_bits=size.padded_bits,
            letters_only_bits=size.letters_only_bits,
            dep_encoding_bits=potentials.dep_encoding_bits,
            h_d=potentials.h_d,
            h_n=potentials.h_n,
            uncovered=coverage.uncovered_count(),
        )
        if sums is not None:
            record.s_a, record.s_b, record.s_c, record.s_d = sums.s_a, sums.s_b, sums.s_c, sums.s_d
        if isinstance(choice, PartitionChoice):
            record.target, record.target_pre, record.target_post = choice.target, choice.pre, choice.post
        if label == "pair_compress":
            self._current.partitions += 1
        if self.check_invariants:
            for violation in verify_invariants(eq, self.ctx):
                self.run.violations.append(f"phase {record.phase} etape {record.step} ({label}): {violation}")
        self._current.steps.append(record)
        logger.debug("%s phase %d: |U|=%d |V|=%d bits=%d H_d=%.1f H_n=%.1f", label, record.phase,
                     record.len_u, record.len_v, record.total_bits, record.h_d, record.h_n)
        return record

    def end_phase(self, eq: Equation) -> None:
        if self._current is None or self.counters is None:
            return
        counters = self.counters
        self._current.sum_k = sum(counters.k.values())
        self._current.sum_p = sum(counters.p.values())
        self._current.sum_e = sum(counters.e.values())
        self._current.sum_h_p = counters.sum_h_p
        self._current.sum_h_e = counters.sum_h_e
        self._current = None


# ============================================================
# EXPORT / CHARGEMENT
# ============================================================


def _round(value: float) -> float:
    return round(value, FLOAT_DIGITS)


def _step_json(step: StepRecord) -> dict[str, object]:
    data = asdict(step)
    for name in _FLOAT_FIELDS:
        data[name] = _round(data[name])
    return data


def _csv_cell(name: str, value: object) -> str:
    if value is None:
        return ""
    if name in _FLOAT_FIELDS:
        return f"{value:.{FLOAT_DIGITS}f}"
    return str(value)


def export(run: MetricsRun, fmt: str) -> bytes:
    """
    Serialise un run (ordre des champs stable, flottants a 6 decimales).

    Args:
        run: Mesures a exporter.
        fmt: "json" ou "csv" (une ligne par etape, en-tete de version).

    Returns:
        Contenu encode en UTF-8.

    Raises:
        ValueError: Format inconnu.
    """
    if fmt == "json":
        payload = {
            "schema_version": METRICS_SCHEMA_VERSION,
            "input_bits": run.input_bits,
            "input_bits_without_markers": run.input_bits_without_markers,
            "max_blocked_pops": run.max_blocked_pops,
            "violations": list(run.violations),
            "phases": [
                {name: (_round(getattr(p, name)) if name.startswith("sum_h") else getattr(p, name))
                 for name in _PHASE_FIELDS}
                for p in run.phases
            ],
            "steps": [_step_json(s) for s in run.steps],
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buffer = io.StringIO()
        buffer.write(f"# schema_version={METRICS_SCHEMA_VERSION}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(STEP_FIELDS)
        for step in run.steps:
            writer.writerow([_csv_cell(name, getattr(step, name)) for name in STEP_FIELDS])
        return buffer.getvalue().encode("utf-8")
    raise ValueError(f"format inconnu: {fmt}")


def _parse_cell(name: str, raw: str) -> object:
    if name in _INT_FIELDS:
        return int(raw)
    if name in _FLOAT_FIELDS:
        return float(raw)
    if name in _OPTIONAL_INT_FIELDS:
        return int(raw) if raw else None
    if name == "target":
        return raw or None
    return raw


def _attach(run: MetricsRun, steps: list[StepRecord]) -> None:
    by_phase = {p.phase: p for p in run.phases}
    for step in steps:
        phase = by_phase.get(step.phase)
        if phase is None:
            phase = PhaseMetrics(step.phase)
            by_phase[step.phase] = phase
            run.phases.append(phase)
        phase.steps.append(step)


def load_metrics(data: bytes, fmt: str) -> MetricsRun:
    """
    Relit un export; export(load_metrics(b, fmt), fmt) == b.

    Raises:
        ValueError: Format ou version de schema inconnus.
    """
    text = data.decode("utf-8")
    if fmt == "json":
        payload = json.loads(text)
        if payload.get("schema_version") != METRICS_SCHEMA_VERSION:
            raise ValueError(f"schema_version inattendue: {payload.get('schema_version')}")
        run = MetricsRun(
            input_bits=payload["input_bits"],
            input_bits_without_markers=payload["input_bits_without_markers"],
            violations=list(payload["violations"]),
            max_blocked_pops=payload["max_blocked_pops"],
            phases=[PhaseMetrics(**p) for p in payload["phases"]],
        )
        _attach(run, [StepRecord(**s) for s in payload["steps"]])
        return run
    if fmt == "csv":
        lines = text.splitlines()
        if not lines or lines[0] != f"# schema_version={METRICS_SCHEMA_VERSION}":
            raise ValueError("en-tete de version absent")
        reader = csv.reader(lines[1:])
        header = next(reader)
        if header != STEP_FIELDS:
            raise ValueError("colonnes inattendues")
        run = MetricsRun()
        steps = [StepRecord(**{n: _parse_cell(n, raw) for n, raw in zip(header, row)}) for row in reader]
        _attach(run, steps)
        return run
    raise ValueError(f"format inconnu: {fmt}")


# ============================================================
# BORNES
# ============================================================


def partition_bound(initial_sum: int, alphabet_size: int) -> int:
    """Nombre maximal de partitions d'une phase: 4 ceil(log2 max(S0, 2)) + 2 ceil(log2 |Gamma|) + 4."""
    return 4 * ceil_log2(max(initial_sum, 2)) + 2 * ceil_log2(alphabet_size) + 4


def _cycle_problems(pm: PhaseMetrics, tag: str) -> list[str]:
    """Chaque somme non nulle est au moins divisee par deux sur toute fenetre de CYCLE_LENGTH partitions."""
    snapshots = [s for s in pm.steps if s.label in ("block_compress", "pair_compress") and s.s_a is not None]
    problems = []
    for before, after in zip(snapshots, snapshots[CYCLE_LENGTH:]):
        for target in TARGETS:
            pre = getattr(before, f"s_{target}")
            post = getattr(after, f"s_{target}")
            if pre and 2 * post > pre:
                problems.append(f"{tag} etape {after.step}: S_{target} {pre} -> {post} "
                                f"en {CYCLE_LENGTH} partitions")
    return problems


def verify_bounds(run: MetricsRun) -> list[str]:
    """
    Verifie, phase par phase, les bornes d'espace d'un run guide.

    Controles: sommes de h(p_D) et h(e_D), recurrences de H_d et H_n,
    enveloppe des pics, division par deux de la somme ciblee (a chaque
    partition et sur chaque cycle de quatre), nombre de partitions, et la
    chaine Huffman lettres <= codage par facteurs <= H_d + H_n.

    Returns:
        Violations lisibles (liste vide si tout est respecte).
    """
    abs0 = run.input_bits
    problems: list[str] = []
    for pm in run.phases:
        start, end = pm.start, pm.end
        if start is None or end is None:
            continue
        tag = f"phase {pm.phase}"
        if pm.sum_h_p > PHASE_EVENT_FACTOR * abs0:
            problems.append(f"{tag}: somme h(p_D) = {pm.sum_h_p:.2f} > {PHASE_EVENT_FACTOR} Abs0")
        if pm.sum_h_e > PHASE_EVENT_FACTOR * abs0:
            problems.append(f"{tag}: somme h(e_D) = {pm.sum_h_e:.2f} > {PHASE_EVENT_FACTOR} Abs0")
        if end.h_d > H_D_RATIO * start.h_d + H_D_SLACK * abs0:
            problems.append(f"{tag}: H_d {end.h_d:.2f} > 2/3 * {start.h_d:.2f} + {H_D_SLACK} Abs0")
        if end.h_n > H_N_RATIO * start.h_n + H_N_SLACK * abs0:
            problems.append(f"{tag}: H_n {end.h_n:.2f} > 5/6 * {start.h_n:.2f} + {H_N_SLACK} Abs0")
        if pm.alphabet_size:
            limit = partition_bound(pm.initial_sum, pm.alphabet_size)
            if pm.partitions > limit:
                problems.append(f"{tag}: {pm.partitions} partitions > {limit}")
        problems.extend(_cycle_problems(pm, tag))
        envelope = PEAK_RATIO * start.h_total + PEAK_SLACK * abs0
        for step in pm.steps:
            where = f"{tag} etape {step.step}"
            if step.h_total > envelope:
                problems.append(f"{where}: pic H {step.h_total:.2f} > {envelope:.2f}")
            if step.target is not None and step.target_pre and step.label == "pair_compress":
                measured = getattr(step, f"s_{step.target}")
                post = measured if measured is not None else step.target_post
                if post is not None and 2 * post > step.target_pre:
                    problems.append(f"{where}: S_{step.target} {step.target_pre} -> {post} non divise par deux")
            if step.letters_only_bits > step.dep_encoding_bits:
                problems.append(f"{where}: Huffman {step.letters_only_bits} > codage D#i {step.dep_encoding_bits}")
            if step.dep_encoding_bits > step.h_total + 1e-9:
                problems.append(f"{where}: codage D#i {step.dep_encoding_bits} > H_d + H_n {step.h_total:.2f}")
    return problems


def ratio_trend(points: Sequence[tuple[int, float]]) -> float:
    """
    Pente de la regression du ratio maximal sur log(Abs0).

    Args:
        points: Couples (Abs0, ratio maximal) d'un balayage.

    Returns:
        Pente de la droite des moindres carres.

    Raises:
        ValueError: Moins de deux tailles distinctes.
    """
    if len({size for size, _ in points}) < 2:
        raise ValueError("au moins deux tailles distinctes sont necessaires")
    x = np.log(np.array([size for size, _ in points], dtype=float))
    y = np.array([ratio for _, ratio in points], dtype=float)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
