import logging
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import EntrographError, InvalidInputError, LevelOutOfRangeError, NonInvertibleError
from entrograph.schemas.growth import GrowthClass, GrowthSeries
from entrograph.schemas.profile import (
    CheckResult,
    CountProfile,
    LevelRecord,
    LyapunovResult,
    ProfileStatus,
    RegularityResult,
    SandwichResult,
)
from entrograph.services.growth_service import GrowthService
from entrograph.services.orbit_service import OrbitService
from entrograph.systems.base import DynamicalSystem, concat_states
from entrograph.systems.double_arrow import DoubleArrow, project_compact, semiconjugacy_projection
from entrograph.uniformity.base import EntourageFamily, PointRef, SampledCompact
from entrograph.uniformity.partition import PartitionFamily

logger = logging.getLogger(__name__)

PAIR_CHUNK = 256


class DynamicalBallSpec:
    def __init__(self, center: PointRef, n: int, k: int):
        if n < 1:
            raise InvalidInputError(f"dynamical ball length must be >= 1, got {n}")
        self.center = center
        self.n = n
        self.k = k


def _check_horizon(horizon: int) -> None:
    if horizon < 1:
        raise InvalidInputError(f"horizon must be >= 1, got {horizon}")


def _rows(block: np.ndarray) -> np.ndarray:
    return block[:, None] if block.ndim == 1 else block[:, None, :]


def close_pairs(family: EntourageFamily, k: int, frame: np.ndarray, chunk: int = PAIR_CHUNK) -> Tuple[np.ndarray, np.ndarray]:
    """All sample pairs a < b inside entourage k in one time slice."""
    first, second = [], []
    for start in range(0, len(frame), chunk):
        inside = np.asarray(family.contains(k, _rows(frame[start : start + chunk]), frame[None]), dtype=bool)
        a, b = np.nonzero(inside)
        a += start
        keep = a < b
        first.append(a[keep])
        second.append(b[keep])
    return np.concatenate(first).astype(np.int64), np.concatenate(second).astype(np.int64)


def greedy_separated(
    features: np.ndarray,
    family: EntourageFamily,
    k: int,
    horizon: int,
    order: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Greedy maximal (n, k)-separated subsets for n = 1..horizon.

    Scan n+1 starts from the set admitted at n, so the series is monotone.
    `counts[q]` is the number of admitted points whose dynamical ball holds q;
    the tracked (a, q) pairs are exactly those memberships, tested one more
    time step each round. Returns the series, the final admitted mask and
    whether the admitted set covered the samples at every n.
    """
    size = features.shape[1]
    order = np.arange(size) if order is None else np.asarray(order, dtype=np.int64)
    admitted = np.zeros(size, dtype=bool)
    counts = np.zeros(size, dtype=np.int64)
    pair_a = np.empty(0, dtype=np.int64)
    pair_q = np.empty(0, dtype=np.int64)
    series = np.zeros(horizon, dtype=np.int64)
    covered = True

    for n in range(1, horizon + 1):
        t = n - 1
        if t > 0 and pair_q.size:
            keep = np.asarray(family.contains(k, features[t, pair_a], features[t, pair_q]), dtype=bool)
            keep &= ~admitted[pair_q]
            dropped = pair_q[~keep]
            if dropped.size:
                counts -= np.bincount(dropped, minlength=size)
            pair_a, pair_q = pair_a[keep], pair_q[keep]

        new_a: List[np.ndarray] = []
        new_q: List[np.ndarray] = []
        for q in order[~admitted[order] & (counts[order] == 0)]:
            if counts[q]:
                continue
            admitted[q] = True
            candidates = np.flatnonzero(~admitted)
            for s in [t] + list(range(t)):
                if not candidates.size:
                    break
                inside = np.asarray(family.contains(k, features[s, q], features[s, candidates]), dtype=bool)
                candidates = candidates[inside]
            if candidates.size:
                counts[candidates] += 1
                new_a.append(np.full(candidates.size, q, dtype=np.int64))
                new_q.append(candidates)
        if new_a:
            pair_a = np.concatenate([pair_a] + new_a)
            pair_q = np.concatenate([pair_q] + new_q)

        covered &= bool(np.all(admitted | (counts > 0)))
        series[t] = int(admitted.sum())
    return series, admitted, covered


def greedy_cover_size(size: int, pair_a: np.ndarray, pair_b: np.ndarray) -> int:
    """Greedy set cover of `size` samples by closed neighbourhoods of the given graph."""
    src = np.concatenate([pair_a, pair_b])
    dst = np.concatenate([pair_b, pair_a])
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    indptr = np.searchsorted(src, np.arange(size + 1))
    degree = 1 + np.diff(indptr)
    uncovered = np.ones(size, dtype=bool)
    remaining, picked = size, 0

    while remaining:
        x = int(np.argmax(degree))
        newly = np.concatenate([[x], dst[indptr[x] : indptr[x + 1]]])
        newly = newly[uncovered[newly]]
        uncovered[newly] = False
        remaining -= newly.size
        lengths = indptr[newly + 1] - indptr[newly]
        offsets = np.repeat(indptr[newly] - (np.cumsum(lengths) - lengths), lengths) + np.arange(lengths.sum())
        degree -= np.bincount(np.concatenate([dst[offsets], newly]), minlength=size)
        picked += 1
    return picked


def greedy_cover(features: np.ndarray, family: EntourageFamily, k: int, horizon: int) -> np.ndarray:
    """Greedy (n, k)-generator sizes for n = 1..horizon."""
    size = features.shape[1]
    pair_a, pair_b = close_pairs(family, k, features[0])
    series = np.zeros(horizon, dtype=np.int64)
    for n in range(1, horizon + 1):
        t = n - 1
        if t > 0 and pair_a.size:
            keep = np.asarray(family.contains(k, features[t, pair_a], features[t, pair_b]), dtype=bool)
            pair_a, pair_b = pair_a[keep], pair_b[keep]
        series[t] = greedy_cover_size(size, pair_a, pair_b)
    return series


def subsample_indices(size: int, cap: int) -> np.ndarray:
    if size <= cap:
        return np.arange(size)
    return np.unique(np.linspace(0, size - 1, cap).round().astype(np.int64))


class _Counter:
    """Memoized separated and cover counts for one orbit cache."""

    def __init__(self, features: np.ndarray, family: EntourageFamily, horizon: int):
        self.features = features
        self.family = family
        self.horizon = horizon
        self._separated: Dict[int, np.ndarray] = {}
        self._cover: Dict[int, np.ndarray] = {}

    def separated(self, k: int) -> np.ndarray:
        if k not in self._separated:
            series, _, covered = greedy_separated(self.features, self.family, k, self.horizon)
            if not covered:
                raise EntrographError(f"greedy separated set at level {k} failed to cover the samples")
            self._separated[k] = series
        return self._separated[k]

    def cover(self, k: int) -> np.ndarray:
        """Greedy cover sizes, capped by the separated set, which is a cover itself."""
        if k not in self._cover:
            self._cover[k] = np.minimum(greedy_cover(self.features, self.family, k, self.horizon), self.separated(k))
        return self._cover[k]


def _series(values: Sequence[int], label: str) -> GrowthSeries:
    return GrowthSeries.from_values([float(v) for v in values], label=label)


def _first_violation(s_coarse: np.ndarray, g_fine: np.ndarray, s_fine: np.ndarray) -> Optional[int]:
    bad = np.flatnonzero((s_coarse > g_fine) | (g_fine > s_fine))
    return int(bad[0]) + 1 if bad.size else None


def _describe(state: Any) -> str:
    if isinstance(state, np.ndarray):
        return str(state.tolist())
    return str(state)


class EntropyService:
    @staticmethod
    def _orbit_features(system: DynamicalSystem, compact: SampledCompact, times: int, inverse: bool = False) -> np.ndarray:
        return OrbitService.orbits(system, compact, times, inverse).features

    @classmethod
    def dynamical_ball(cls, system: DynamicalSystem, spec: DynamicalBallSpec, universe: SampledCompact) -> List[PointRef]:
        """Samples whose first n iterates stay k-close to the center's."""
        family = system.entourages
        family.check_level(spec.k)
        frames = cls._orbit_features(system, universe, spec.n)
        state = system.state_batch([spec.center.state])
        mask = np.ones(len(universe), dtype=bool)
        for i in range(spec.n):
            center = system.features(state)[0]
            mask &= np.asarray(family.contains(spec.k, center, frames[i]), dtype=bool)
            state = system.step(state)
        return [universe.point(i) for i in np.flatnonzero(mask)]

    @classmethod
    def separated_count(cls, system: DynamicalSystem, compact: SampledCompact, k: int, horizon: int) -> GrowthSeries:
        _check_horizon(horizon)
        system.entourages.check_level(k)
        features = cls._orbit_features(system, compact, horizon)
        series, _, covered = greedy_separated(features, system.entourages, k, horizon)
        if not covered:
            raise EntrographError(f"greedy separated set at level {k} failed to cover the samples")
        return _series(series, f"s[{system.name}, {compact.label}, k={k}]")

    @classmethod
    def generator_count(cls, system: DynamicalSystem, compact: SampledCompact, k: int, horizon: int) -> GrowthSeries:
        """Greedy cover sizes on the deterministic subsample used for validation."""
        _check_horizon(horizon)
        system.entourages.check_level(k)
        indices = subsample_indices(len(compact), settings.generator_sample_cap)
        features = cls._orbit_features(system, compact, horizon)[:, indices]
        counter = _Counter(features, system.entourages, horizon)
        return _series(counter.cover(k), f"g[{system.name}, {compact.label}, k={k}]")

    @classmethod
    def sandwich_check(cls, system: DynamicalSystem, compact: SampledCompact, k: int, horizon: int) -> SandwichResult:
        """Check s(k, n) <= g(k_f, n) <= s(k_f, n) with k_f = square_root_level(k)."""
        _check_horizon(horizon)
        family = system.entourages
        family.check_level(k)
        k_fine = family.square_root_level(k)
        if k_fine > family.k_max:
            raise LevelOutOfRangeError(k_fine, family.k_min, family.k_max)

        indices = subsample_indices(len(compact), settings.generator_sample_cap)
        counter = _Counter(cls._orbit_features(system, compact, horizon)[:, indices], family, horizon)
        return cls._sandwich(counter, k, k_fine)

    @staticmethod
    def _sandwich(counter: _Counter, k: int, k_fine: int) -> SandwichResult:
        s_coarse, g_fine, s_fine = counter.separated(k), counter.cover(k_fine), counter.separated(k_fine)
        violation = _first_violation(s_coarse, g_fine, s_fine)
        if violation is not None:
            logger.warning(f"sandwich violated at level {k} (fine {k_fine}) first at n={violation}")
        return SandwichResult(
            ok=violation is None,
            k=k,
            k_fine=k_fine,
            violation_n=violation,
            s_coarse=s_coarse.tolist(),
            g_fine=g_fine.tolist(),
            s_fine=s_fine.tolist(),
        )

    @staticmethod
    def aggregate(classes: List[GrowthClass]) -> Tuple[Optional[GrowthClass], ProfileStatus]:
        """The finest class, declared only when the two finest levels agree."""
        if not classes:
            return None, ProfileStatus.UNSTABLE
        if len(classes) == 1 or classes[-1].label == classes[-2].label:
            return classes[-1], ProfileStatus.STABLE
        return None, ProfileStatus.UNSTABLE

    @classmethod
    def entropy_profile(
        cls,
        system: DynamicalSystem,
        compact: SampledCompact,
        levels: Sequence[int],
        horizon: int,
    ) -> CountProfile:
        _check_horizon(horizon)
        levels = sorted(set(levels))
        if not levels:
            raise InvalidInputError("at least one level is required")
        family = system.entourages
        for k in levels:
            family.check_level(k)

        logger.info("=" * 80)
        logger.info(f"🚀 entropy profile: {system.name} on '{compact.label}' ({len(compact)} samples), levels {levels}, N={horizon}")
        logger.info("=" * 80)
        started = time.perf_counter()

        features = cls._orbit_features(system, compact, horizon)
        full = _Counter(features, family, horizon)
        indices = subsample_indices(len(compact), settings.generator_sample_cap)
        sub = full if len(indices) == len(compact) else _Counter(features[:, indices], family, horizon)

        def run_level(k: int) -> np.ndarray:
            series = full.separated(k)
            logger.info(f"📊 level {k}: s(1)={series[0]}, s(N)={series[-1]}")
            return series

        if settings.threads > 1 and len(levels) > 1:
            with ThreadPoolExecutor(max_workers=settings.threads) as pool:
                list(pool.map(run_level, levels))
        else:
            for k in levels:
                run_level(k)

        records = []
        for k in levels:
            s_series = _series(full.separated(k), f"s[k={k}]")
            k_fine = family.square_root_level(k)
            sandwich = cls._sandwich(sub, k, k_fine) if k_fine <= family.k_max else None
            records.append(
                LevelRecord(
                    k=k,
                    s_series=s_series,
                    g_series=_series(sub.cover(k), f"g[k={k}]"),
                    sandwich_ok=None if sandwich is None else sandwich.ok,
                    sandwich_violation_n=None if sandwich is None else sandwich.violation_n,
                    growth_class=GrowthService.classify(s_series),
                )
            )

        aggregate, status = cls.aggregate([r.growth_class for r in records])
        metadata: Dict[str, Any] = {
            "grid_size": len(compact),
            "density_level": compact.density_level,
            "horizon": horizon,
            "levels": levels,
            "greedy_order": "fixed",
            "generator_sample_size": int(len(indices)),
            "wall_time": round(time.perf_counter() - started, 3),
        }
        if isinstance(family, PartitionFamily):
            metadata["ambiguous_comparisons"] = family.ambiguous_comparisons
        if settings.randomized_order_pass:
            metadata["greedy_spread"] = {
                k: cls.greedy_variance(system, compact, k, horizon).details["max_relative_spread"] for k in levels
            }

        if status == ProfileStatus.STABLE:
            logger.info(f"✅ aggregate: {aggregate.label.value} (degree {aggregate.degree:.3f}, rate {aggregate.rate:.3f})")
        else:
            logger.warning(f"⚠️ finest levels disagree: {[r.growth_class.label.value for r in records[-2:]]}")
        return CountProfile(
            system=system.name,
            compact=compact.label,
            levels=records,
            aggregate=aggregate,
            status=status,
            metadata=metadata,
        )

    @classmethod
    def restricted_profile(
        cls,
        system: DynamicalSystem,
        compact_selector: str,
        levels: Sequence[int],
        horizon: int,
    ) -> CountProfile:
        """Profile on a named compact or a '+'-joined union of them."""
        compact = system.compact(compact_selector, ladder_horizon=horizon)
        profile = cls.entropy_profile(system, compact, levels, horizon)
        if "+" not in compact_selector:
            return profile

        features = cls._orbit_features(system, compact, horizon)
        pieces: Dict[str, List[GrowthSeries]] = {}
        for name, indices in compact.pieces.items():
            counter = _Counter(features[:, indices], system.entourages, horizon)
            pieces[name] = [_series(counter.separated(r.k), f"s[{name}, k={r.k}]") for r in profile.levels]
        piece_sup = [
            GrowthService.sup([pieces[name][i] for name in pieces]) for i in range(len(profile.levels))
        ]
        union_checks = {r.k: cls.union_bound_check(system, compact, r.k, horizon).passed for r in profile.levels if system.entourages.square_root_level(r.k) <= system.entourages.k_max}
        metadata = dict(profile.metadata, union_bound_ok=union_checks)
        return profile.model_copy(update={"pieces": pieces, "piece_sup": piece_sup, "metadata": metadata})

    @classmethod
    def union_bound_check(cls, system: DynamicalSystem, compact: SampledCompact, k: int, horizon: int) -> CheckResult:
        """Bounds for a union of pieces.

        Greedy counts certify max_i s_i(k) <= s_U(k_f) and s_U(k) <= sum_i s_i(k_f),
        with k_f = square_root_level(k); the same-level comparison is reported
        alongside.
        """
        family = system.entourages
        k_fine = family.square_root_level(k)
        if k_fine > family.k_max:
            raise LevelOutOfRangeError(k_fine, family.k_min, family.k_max)
        features = cls._orbit_features(system, compact, horizon)
        union = _Counter(features, family, horizon)
        parts = [_Counter(features[:, idx], family, horizon) for idx in compact.pieces.values()]

        upper = union.separated(k) <= np.sum([p.separated(k_fine) for p in parts], axis=0)
        lower = np.max([p.separated(k) for p in parts], axis=0) <= union.separated(k_fine)
        same_level = (np.max([p.separated(k) for p in parts], axis=0) <= union.separated(k)) & (
            union.separated(k) <= np.sum([p.separated(k) for p in parts], axis=0)
        )
        return CheckResult(
            name="union_bound",
            passed=bool(upper.all() and lower.all()),
            details={
                "k": k,
                "k_fine": k_fine,
                "pieces": list(compact.pieces),
                "same_level_holds": bool(same_level.all()),
                "union": union.separated(k).tolist(),
                "pieces_sum": np.sum([p.separated(k) for p in parts], axis=0).tolist(),
            },
        )

    @classmethod
    def lyapunov_probe(
        cls,
        system: DynamicalSystem,
        compact: SampledCompact,
        target_k: int,
        horizon: int,
        inverse: bool = False,
    ) -> LyapunovResult:
        """Find the coarsest v >= target_k whose close pairs stay target_k-close for 0 <= i <= horizon."""
        _check_horizon(horizon)
        family = system.entourages
        family.check_level(target_k)
        if inverse and not system.invertible:
            raise NonInvertibleError(system.name, "lyapunov_probe(inverse)")
        frames = cls._orbit_features(system, compact, horizon + 1, inverse)
        # below the sample density every ball is a single sample
        finest = max(target_k, min(family.k_max, compact.density_level))

        # finest level at time 0 of any pair that leaves target_k later
        worst_level, worst_pair = target_k - 1, None
        for start in range(0, len(compact), PAIR_CHUNK):
            block = frames[0, start : start + PAIR_CHUNK]
            inside = np.asarray(family.contains(target_k, _rows(block), frames[0][None]), dtype=bool)
            a, b = np.nonzero(inside)
            a += start
            keep = a < b
            a, b = a[keep], b[keep]
            stays = np.ones(a.size, dtype=bool)
            for t in range(1, horizon + 1):
                live = np.flatnonzero(stays)
                if not live.size:
                    break
                stays[live] = np.asarray(family.contains(target_k, frames[t, a[live]], frames[t, b[live]]), dtype=bool)
            a, b = a[~stays], b[~stays]
            level = target_k
            while a.size and level <= finest:
                still = np.asarray(family.contains(level, frames[0, a], frames[0, b]), dtype=bool)
                if not still.any():
                    break
                a, b = a[still], b[still]
                if level > worst_level:
                    worst_level, worst_pair = level, (int(a[0]), int(b[0]))
                level += 1

        if worst_level < finest:
            witness = max(target_k, worst_level + 1)
            logger.info(f"🔒 {system.name}: stable at target {target_k} with witness level {witness}")
            return LyapunovResult(stable=True, target_k=target_k, witness_level=witness, horizon=horizon, inverse=inverse)

        logger.info(f"🔓 {system.name}: no witness up to level {finest}")
        return LyapunovResult(
            stable=False,
            target_k=target_k,
            horizon=horizon,
            inverse=inverse,
            counterexample=worst_pair,
            counterexample_states=(
                _describe(compact.states[worst_pair[0]]),
                _describe(compact.states[worst_pair[1]]),
            ),
        )

    @classmethod
    def _regularity_witness(
        cls,
        system: DynamicalSystem,
        x: PointRef,
        universe: SampledCompact,
        target_k: int,
        horizon: int,
    ) -> Optional[int]:
        family = system.entourages
        forward = cls._orbit_features(system, universe, horizon + 1)
        backward = cls._orbit_features(system, universe, horizon + 1, inverse=True)
        center = system.make_compact("center", system.state_batch([x.state]), 0)
        ahead = OrbitService.orbits(system, center, horizon + 1).features[:, 0]
        behind = OrbitService.orbits(system, center, horizon + 1, inverse=True).features[:, 0]

        stays = np.ones(len(universe), dtype=bool)
        for t in range(horizon + 1):
            stays &= np.asarray(family.contains(target_k, ahead[t], forward[t]), dtype=bool)
            stays &= np.asarray(family.contains(target_k, behind[t], backward[t]), dtype=bool)

        leaving = np.flatnonzero(~stays)
        level = target_k
        while leaving.size:
            near = np.asarray(family.contains(level, ahead[0], forward[0, leaving]), dtype=bool)
            if not near.any():
                return level
            if level == family.k_max:
                return None
            leaving = leaving[near]
            level += 1
        return level

    @classmethod
    def regularity_probe(
        cls,
        system: DynamicalSystem,
        x: PointRef,
        target_k: int,
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> RegularityResult:
        """Two-sided probe around x.

        A regular point has a witness level that does not move when the
        horizon doubles; a witness that keeps refining with the horizon, or
        none at all, means the orbit of x is not uniformly shadowed.
        """
        _check_horizon(horizon)
        if not system.invertible:
            raise NonInvertibleError(system.name, "regularity_probe")
        system.entourages.check_level(target_k)
        universe = universe or system.default_compact(horizon)

        witness = cls._regularity_witness(system, x, universe, target_k, horizon)
        half = cls._regularity_witness(system, x, universe, target_k, max(1, horizon // 2))
        regular = witness is not None and witness == half
        logger.info(f"🔍 regularity at {_describe(x.state)}: witness {half} -> {witness}, regular={regular}")
        return RegularityResult(
            regular=regular,
            target_k=target_k,
            horizon=horizon,
            witness_level=witness,
            half_horizon_witness_level=half,
        )

    @classmethod
    def semiconjugacy_inequality_check(
        cls,
        system: DoubleArrow,
        horizon: int,
        compact: Optional[SampledCompact] = None,
    ) -> CheckResult:
        """Compare separated counts of x -> x^2 on the interval with those of its double-arrow lift."""
        _check_horizon(horizon)
        project, target = semiconjugacy_projection(system)
        compact = compact or system.default_compact(horizon)

        lhs = project(system.step(compact.states))
        rhs = target.step(project(compact.states))
        mismatched = [i for i, (p, q) in enumerate(zip(lhs, rhs)) if p != q]
        if mismatched:
            raise InvalidInputError(f"projection is not equivariant at sample {mismatched[0]}")

        projected = project_compact(project, target, compact)
        arrow_family: PartitionFamily = system.entourages
        matched: Dict[int, int] = {}
        for k_g in target.entourages.levels:
            half = Fraction(target.entourages.epsilon(k_g)) / 2
            fine = [k for k in arrow_family.levels if arrow_family.cell_width(k) < half]
            if fine:
                matched[k_g] = fine[0]
        if not matched:
            raise InvalidInputError("no double-arrow level is fine enough for any interval level")

        arrow = _Counter(cls._orbit_features(system, compact, horizon), arrow_family, horizon)
        interval = _Counter(cls._orbit_features(target, projected, horizon), target.entourages, horizon)
        results = {}
        for k_g, k_f in matched.items():
            s_g, s_f = interval.separated(k_g), arrow.separated(k_f)
            bad = np.flatnonzero(s_g > s_f)
            results[k_g] = {"arrow_level": k_f, "ok": not bad.size, "first_violation_n": int(bad[0]) + 1 if bad.size else None}
        passed = all(r["ok"] for r in results.values())
        logger.info(f"{'✅' if passed else '❌'} semiconjugacy inequality over levels {sorted(matched)}")
        return CheckResult(name="semiconjugacy_inequality", passed=passed, details={"horizon": horizon, "levels": results})

    @classmethod
    def power_monotonicity_check(
        cls,
        system: DynamicalSystem,
        k: int,
        horizon: int,
        r: int,
        compact_selector: str = "default",
    ) -> CheckResult:
        """class(s for f) <= class(s for f^r) at the same level and compact."""
        if r < 2:
            raise InvalidInputError(f"power must be >= 2, got {r}")
        compact = system.compact(compact_selector, ladder_horizon=r * horizon)
        base_class = GrowthService.classify(cls.separated_count(system, compact, k, horizon))
        power_class = GrowthService.classify(cls.separated_count(system.power(r), compact, k, horizon))
        passed = base_class.at_most(power_class)
        return CheckResult(
            name="power_monotonicity",
            passed=passed,
            details={"k": k, "r": r, "base": base_class.model_dump(mode="json"), "power": power_class.model_dump(mode="json")},
        )

    @classmethod
    def alpha_limit_probe(cls, system: DynamicalSystem, x: PointRef, k: int, horizon: int) -> CheckResult:
        """Separated counts on the backward orbit of x when that orbit leaves every k-ball around x.

        Reports the constant c = max_n (n - s(n)) and whether the counts grow
        at least linearly.
        """
        _check_horizon(horizon)
        if not system.invertible:
            raise NonInvertibleError(system.name, "alpha_limit_probe")
        family = system.entourages
        family.check_level(k)

        orbit = [system.state_batch([x.state])]
        for _ in range(horizon):
            orbit.append(system.step_inv(orbit[-1]))
        path = concat_states(orbit)
        frames = system.features(path)
        returns = np.flatnonzero(np.asarray(family.contains(k, frames[0], frames[1:]), dtype=bool)) + 1
        exit_time = int(returns.max()) + 1 if returns.size else 1
        exits = exit_time <= horizon // 2

        compact = system.make_compact("backward-orbit", concat_states([path, system.non_wandering_states()]), 0)
        series = cls.separated_count(system, compact, k, horizon)
        values = series.array()
        c = float(max(0.0, np.max(np.arange(1, horizon + 1) - values)))
        degree = GrowthService.project_poly(series) if horizon >= 16 else float("nan")
        passed = exits and (horizon < 16 or degree >= settings.linear_band[0])
        return CheckResult(
            name="alpha_limit",
            passed=bool(passed),
            details={"k": k, "exits": exits, "exit_time": exit_time, "c": c, "degree": degree, "s_series": values.tolist()},
        )

    @classmethod
    def greedy_variance(
        cls,
        system: DynamicalSystem,
        compact: SampledCompact,
        k: int,
        horizon: int,
        passes: int = 1,
        seed: Optional[int] = None,
    ) -> CheckResult:
        """Spread between the fixed-order greedy count and seeded random-order reruns."""
        features = cls._orbit_features(system, compact, horizon)
        rng = np.random.default_rng(settings.seed if seed is None else seed)
        runs = [greedy_separated(features, system.entourages, k, horizon)[0]]
        for _ in range(passes):
            runs.append(greedy_separated(features, system.entourages, k, horizon, order=rng.permutation(len(compact)))[0])
        stacked = np.stack(runs)
        spread = (stacked.max(axis=0) - stacked.min(axis=0)) / stacked.max(axis=0)
        return CheckResult(
            name="greedy_variance",
            passed=True,
            details={"k": k, "passes": passes, "max_relative_spread": float(spread.max()), "series": stacked.tolist()},
        )
