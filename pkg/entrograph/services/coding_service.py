import itertools
import logging
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import FamilyValidationError, InvalidInputError, NonInvertibleError
from entrograph.schemas.coding import (
    CodingCounts,
    CodingFamily,
    FamilyMember,
    HittingData,
    Shape,
    SingularityResult,
    SingularWitness,
    VisitsResult,
    WanderingResult,
)
from entrograph.schemas.growth import GrowthSeries, Relation
from entrograph.schemas.profile import CheckResult
from entrograph.services.entropy_service import EntropyService, subsample_indices
from entrograph.services.growth_service import GrowthService
from entrograph.services.orbit_service import OrbitService
from entrograph.systems.base import DynamicalSystem, ExactIntervalMap, concat_states
from entrograph.uniformity.base import SampledCompact

logger = logging.getLogger(__name__)

# neighbourhood tests compare against at most this many samples of a member
NEIGHBOURHOOD_SAMPLES = 256
MAX_SUBFAMILY_MEMBERS = 8


def unit_pattern(uniform: int = 65, geometric: int = 32) -> np.ndarray:
    """Points of [0, 1], uniform plus geometric refinement toward both ends."""
    tail = 2.0 ** -np.linspace(1.0, 12.0, geometric)
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, uniform), tail, 1.0 - tail]))


def count_codings(member: np.ndarray, cap: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """Distinct coding words of length n = 1..T from an (orbits, T, members) membership tensor.

    Letter 0 is ∞. Orbits in several members at once carry every choice,
    at most `cap` words per orbit. Returns the counts and how many orbits
    hit the cap.
    """
    orbits, horizon, letters = member.shape
    cap = cap or settings.max_words_per_orbit
    base = letters + 1
    series = np.zeros(horizon, dtype=np.int64)

    if (member.sum(axis=2) <= 1).all():
        word = np.zeros(orbits, dtype=np.int64)
        symbols = np.where(member.any(axis=2), member.argmax(axis=2) + 1, 0)
        for t in range(horizon):
            uniq, word = np.unique(word * base + symbols[:, t], return_inverse=True)
            word = word.reshape(-1)
            series[t] = len(uniq)
        return series, 0

    owner = np.arange(orbits)
    word = np.zeros(orbits, dtype=np.int64)
    overflowed = set()
    for t in range(horizon):
        here = member[owner, t, :]
        rows, cols = np.nonzero(here)
        outside = np.flatnonzero(~here.any(axis=1))
        pick = np.concatenate([rows, outside])
        symbol = np.concatenate([cols + 1, np.zeros(outside.size, dtype=np.int64)])
        uniq, word_id = np.unique(word[pick] * base + symbol, return_inverse=True)
        pairs = np.unique(np.stack([owner[pick], word_id.reshape(-1)], axis=1), axis=0)
        owner, word = pairs[:, 0], pairs[:, 1]

        per_owner = np.bincount(owner, minlength=orbits)
        if (per_owner > cap).any():
            starts = np.cumsum(per_owner) - per_owner
            rank = np.arange(len(owner)) - starts[owner]
            keep = rank < cap
            new = set(np.flatnonzero(per_owner > cap).tolist()) - overflowed
            if new:
                logger.warning(f"word cap {cap} reached for {len(new)} orbit(s) at n={t + 1}")
            overflowed |= new
            owner, word = owner[keep], word[keep]
        series[t] = len(np.unique(word))
    return series, len(overflowed)


def _gather(member: np.ndarray, orbit: int, label: int) -> np.ndarray:
    return np.flatnonzero(member[orbit, :, label])


def best_schedule(visits: List[np.ndarray]) -> Tuple[int, List[int]]:
    """Largest g with one visit time per member, pairwise at least g apart, and such a schedule."""
    if any(v.size == 0 for v in visits):
        return -1, []
    if len(visits) == 1:
        return 0, [int(visits[0][0])]

    def feasible(gap: int) -> Optional[List[int]]:
        chosen: List[int] = []

        def extend(i: int) -> bool:
            if i == len(visits):
                return True
            for t in visits[i]:
                if all(abs(int(t) - c) >= gap for c in chosen):
                    chosen.append(int(t))
                    if extend(i + 1):
                        return True
                    chosen.pop()
            return False

        return list(chosen) if extend(0) else None

    every = np.concatenate(visits)
    candidates = np.unique(np.abs(every[:, None] - every[None, :]))
    lo, hi = 0, len(candidates) - 1
    best, schedule = -1, []
    while lo <= hi:
        mid = (lo + hi) // 2
        found = feasible(int(candidates[mid]))
        if found is not None:
            best, schedule = int(candidates[mid]), found
            lo = mid + 1
        else:
            hi = mid - 1
    return best, schedule


class CodingService:
    # universes and validation

    @staticmethod
    def validate_family(system: DynamicalSystem, family: CodingFamily) -> None:
        for m in family.members:
            for kind in m.shape.kinds():
                if kind not in system.shape_kinds:
                    raise FamilyValidationError(f"'{m.label}': {kind} shapes do not fit {system.name} (use {system.shape_kinds})")
        if system.non_wandering_everything:
            raise FamilyValidationError(f"every point of {system.name} is non-wandering")
        fixed = system.coordinates(system.non_wandering_states())
        for m in family.members:
            if len(fixed) and m.shape.contains(fixed).any():
                raise FamilyValidationError(f"member '{m.label}' intersects the non-wandering set")

    @staticmethod
    def sample_shape(system: DynamicalSystem, shape: Shape) -> Any:
        batches = []
        pattern = unit_pattern()
        for leaf in shape.leaves():
            b = [float(x) for x in leaf.rationals]
            if leaf.kind == "interval":
                coords = b[0] + (b[1] - b[0]) * pattern
            elif leaf.kind == "arc":
                length = (b[1] - b[0]) % 1.0
                coords = (b[0] + length * pattern) % 1.0
            else:
                xs = b[0] + (b[1] - b[0]) * unit_pattern(17, 16)
                ys = b[2] + (b[3] - b[2]) * unit_pattern(17, 48)
                x, y = np.meshgrid(xs, ys, indexing="ij")
                coords = np.stack([x.ravel(), y.ravel()], axis=1)
            batches.append(system.from_coordinates(coords))
        return concat_states(batches)

    @classmethod
    def family_universe(cls, system: DynamicalSystem, family: CodingFamily, horizon: int) -> SampledCompact:
        """The default compact plus samples inside every member."""
        base = system.default_compact(horizon)
        parts = [base.states] + [cls.sample_shape(system, m.shape) for m in family.members]
        sizes = np.cumsum([0] + [len(p) for p in parts])
        names = ["default"] + family.labels
        return system.make_compact(
            f"{base.label}+family",
            concat_states(parts),
            base.density_level,
            pieces={name: np.arange(sizes[i], sizes[i + 1]) for i, name in enumerate(names)},
        )

    @staticmethod
    def uses_exact(system: DynamicalSystem, family: CodingFamily, universe: Optional[SampledCompact]) -> bool:
        return (
            universe is None
            and isinstance(system, ExactIntervalMap)
            and all(kind == "interval" for m in family.members for kind in m.shape.kinds())
        )

    # membership tensors

    @staticmethod
    def sampled_membership(system: DynamicalSystem, shapes: Sequence[Shape], states: Any, start: int, stop: int) -> np.ndarray:
        """(orbits, stop - start, members) membership of f^t(x) for start <= t < stop."""
        out = np.zeros((len(states), stop - start, len(shapes)), dtype=bool)

        def fill(t: int, current: Any) -> None:
            coords = system.coordinates(current)
            for j, shape in enumerate(shapes):
                out[:, t - start, j] = shape.contains(coords)

        current = states
        for t in range(0, stop):
            if t >= start:
                fill(t, current)
            if t + 1 < stop:
                current = system.step(current)
        if start < 0:
            if not system.invertible:
                raise NonInvertibleError(system.name, "two-sided orbits")
            current = states
            for t in range(-1, start - 1, -1):
                current = system.step_inv(current)
                fill(t, current)
        return out

    @staticmethod
    def exact_representatives(system: ExactIntervalMap, shapes: Sequence[Shape], start: int, stop: int) -> List[Optional[Fraction]]:
        """One point per class of equal words: preimages of every endpoint, points between them and the ends."""
        endpoints = {e for shape in shapes for interval in shape.intervals() for e in interval}
        breakpoints = set()
        for e in endpoints:
            # f^t(r) = e  <=>  r = f^-t(e)
            x = e
            for _ in range(0, stop):
                breakpoints.add(x)
                x = system.exact_step_inv(x)
            x = e
            for _ in range(0, -start):
                x = system.exact_step(x)
                breakpoints.add(x)
        breakpoints.discard(None)
        ordered = sorted(breakpoints)
        gaps = [(a + b) / 2 for a, b in zip(ordered, ordered[1:])]
        return ordered + gaps + system.exact_domain_points(ordered)

    @staticmethod
    def exact_membership(system: ExactIntervalMap, shapes: Sequence[Shape], points: List[Optional[Fraction]], start: int, stop: int) -> np.ndarray:
        out = np.zeros((len(points), stop - start, len(shapes)), dtype=bool)
        for i, x0 in enumerate(points):
            x = x0
            for t in range(0, stop):
                if t >= start:
                    out[i, t - start] = [s.contains_exact(x) for s in shapes]
                x = system.exact_step(x)
            x = x0
            for t in range(-1, start - 1, -1):
                x = system.exact_step_inv(x)
                out[i, t - start] = [s.contains_exact(x) for s in shapes]
        return out

    @classmethod
    def membership(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        start: int,
        stop: int,
        universe: Optional[SampledCompact],
        horizon: int,
    ) -> Tuple[np.ndarray, List[str], bool]:
        """Membership tensor, printable sample states and whether it came from the exact path."""
        shapes = [m.shape for m in family.members]
        if cls.uses_exact(system, family, universe):
            points = cls.exact_representatives(system, shapes, start, stop)
            labels = ["∞" if p is None else str(p) for p in points]
            return cls.exact_membership(system, shapes, points, start, stop), labels, True
        universe = universe or cls.family_universe(system, family, horizon)
        tensor = cls.sampled_membership(system, shapes, universe.states, start, stop)
        return tensor, [str(s) for s in universe.states], False

    # operations

    @classmethod
    def codings_count(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> CodingCounts:
        if horizon < 1:
            raise InvalidInputError(f"horizon must be >= 1, got {horizon}")
        cls.validate_family(system, family)
        tensor, states, exact = cls.membership(system, family, 0, horizon, universe, horizon)
        series, overflow = count_codings(tensor)
        logger.info(f"🔤 {system.name}: {series[-1]} coding words of length {horizon} over {len(states)} {'exact' if exact else 'sampled'} orbits")
        return CodingCounts(
            family=family.labels,
            disjoint=family.disjoint,
            horizon=horizon,
            exact=exact,
            series=GrowthSeries.from_values([float(v) for v in series], label=f"c[{'+'.join(family.labels)}]"),
            universe_size=len(states),
            overflow_orbits=overflow,
        )

    @classmethod
    def wandering_check(
        cls,
        system: DynamicalSystem,
        member: FamilyMember,
        bound: int,
        universe: Optional[SampledCompact] = None,
    ) -> WanderingResult:
        """First n in 1..bound with f^n(Y) meeting Y, if any."""
        single = CodingFamily(members=[member])
        if cls.uses_exact(system, single, universe):
            intervals = member.shape.intervals()
            images = list(intervals)
            for n in range(1, bound + 1):
                images = [(system.exact_step(a), system.exact_step(b)) for a, b in images]
                if any(a0 <= b1 and b0 <= a1 for a0, a1 in images for b0, b1 in intervals):
                    return WanderingResult(label=member.label, wandering=False, bound=bound, exact=True, first_return=n)
            return WanderingResult(label=member.label, wandering=True, bound=bound, exact=True)

        states = cls.sample_shape(system, member.shape)
        if universe is not None:
            inside = member.shape.contains(system.coordinates(universe.states))
            states = concat_states([states, universe.states[inside]])
        tensor = cls.sampled_membership(system, [member.shape], states, 0, bound + 1)[:, :, 0]
        tensor = tensor[tensor[:, 0]]
        returns = np.flatnonzero(tensor[:, 1:].any(axis=0))
        first = int(returns[0]) + 1 if returns.size else None
        return WanderingResult(label=member.label, wandering=first is None, bound=bound, exact=False, first_return=first)

    @classmethod
    def max_visits(
        cls,
        system: DynamicalSystem,
        member: FamilyMember,
        bound: int,
        universe: Optional[SampledCompact] = None,
    ) -> VisitsResult:
        """Most visit times in [-bound, bound] of a single orbit to Y."""
        if not system.invertible:
            raise NonInvertibleError(system.name, "max_visits")
        single = CodingFamily(members=[member])
        if universe is None and not cls.uses_exact(system, single, None):
            universe = system.make_compact(member.label, cls.sample_shape(system, member.shape), 0)
        tensor, _, exact = cls.membership(system, single, -bound, bound + 1, universe, bound)
        visits = int(tensor[:, :, 0].sum(axis=1).max())
        return VisitsResult(label=member.label, bound=bound, exact=exact, max_visits=visits)

    @classmethod
    def hitting_sets(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        bound: int,
        universe: Optional[SampledCompact] = None,
    ) -> List[HittingData]:
        """m in [0, bound] with f^m(Y_i) meeting Y_j, for every ordered pair i != j."""
        if len(family.members) < 2:
            raise InvalidInputError("hitting sets need at least two members")
        exact = cls.uses_exact(system, family, universe)
        out = []
        if exact:
            for i, src in enumerate(family.members):
                images = src.shape.intervals()
                reach = []
                for m in range(bound + 1):
                    reach.append(images)
                    images = [(system.exact_step(a), system.exact_step(b)) for a, b in images]
                for j, dst in enumerate(family.members):
                    if i == j:
                        continue
                    targets = dst.shape.intervals()
                    hits = [
                        m for m, imgs in enumerate(reach)
                        if any(a0 <= b1 and b0 <= a1 for a0, a1 in imgs for b0, b1 in targets)
                    ]
                    out.append(HittingData(source=src.label, target=dst.label, bound=bound, hits=hits))
            return out

        universe = universe or cls.family_universe(system, family, bound)
        tensor = cls.sampled_membership(system, [m.shape for m in family.members], universe.states, 0, bound + 1)
        for i, src in enumerate(family.members):
            starting = tensor[tensor[:, 0, i]]
            for j, dst in enumerate(family.members):
                if i == j:
                    continue
                hits = np.flatnonzero(starting[:, :, j].any(axis=0)).tolist()
                out.append(HittingData(source=src.label, target=dst.label, bound=bound, hits=hits))
        return out

    @staticmethod
    def d_lower_bound(hitting: HittingData, horizon: int) -> GrowthSeries:
        """d(n) = sum over n' = 1..n-1 of #{m in R : m <= n - n'}."""
        if hitting.bound < horizon:
            raise InvalidInputError(f"hitting bound {hitting.bound} is below the horizon {horizon}")
        below = np.zeros(horizon + 1, dtype=np.int64)
        for m in hitting.hits:
            if m <= horizon:
                below[m:] += 1
        # d(n) = sum_{m=1}^{n-1} below[m]
        partial = np.concatenate([[0], np.cumsum(below[1:])])
        values = [float(partial[n - 1]) for n in range(1, horizon + 1)]
        return GrowthSeries.from_values(values, label=f"d[{hitting.source}->{hitting.target}]")

    @classmethod
    def mutually_singular_probe(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        n0_max: int,
        search_bound: int,
        universe: Optional[SampledCompact] = None,
    ) -> SingularityResult:
        """Search sampled orbits for one visit per member, pairwise more than n0 apart, for n0 = 0..n0_max."""
        if len(family.members) < 2:
            raise InvalidInputError("mutual singularity needs at least two members")
        if not family.disjoint:
            raise FamilyValidationError("mutual singularity is probed on disjoint families only")
        cls.validate_family(system, family)
        tensor, states, exact = cls.membership(system, family, 0, search_bound + 1, universe, search_bound)

        everywhere = np.flatnonzero(tensor.any(axis=1).all(axis=1))
        best = np.full(len(states), -1, dtype=np.int64)
        schedules = {}
        for orbit in everywhere:
            gap, schedule = best_schedule([_gather(tensor, orbit, j) for j in range(len(family.members))])
            best[orbit], schedules[int(orbit)] = gap, schedule

        witnesses = []
        for n0 in range(n0_max + 1):
            found = np.flatnonzero(best > n0)
            if not found.size:
                break
            orbit = int(found[0])
            witnesses.append(SingularWitness(n0=n0, sample=orbit, state=states[orbit], times=schedules[orbit]))

        certified = None
        if isinstance(system, ExactIntervalMap) and all(k == "interval" for m in family.members for k in m.shape.kinds()):
            ends = [[system.conjugacy(e) for iv in m.shape.intervals() for e in iv] for m in family.members]
            spread = max(abs(a - b) for i, j in itertools.permutations(range(len(ends)), 2) for a in ends[i] for b in ends[j])
            certified = spread / abs(system.conjugacy_shift)

        max_gap = int(best.max()) if best.size and best.max() >= 0 else None
        singular = len(witnesses) == n0_max + 1
        logger.info(f"{'🔗' if singular else '✂️'} singular={singular} (max gap {max_gap}, certified bound {certified})")
        return SingularityResult(
            singular=singular,
            n0_max=n0_max,
            search_bound=search_bound,
            max_gap=max_gap,
            certified_bound=certified,
            witnesses=witnesses,
        )

    @classmethod
    def _neighbourhoods(cls, system: DynamicalSystem, universe: SampledCompact, masks: List[np.ndarray], k: int) -> List[np.ndarray]:
        frame = universe.features
        family = system.entourages
        out = []
        for mask in masks:
            members = np.flatnonzero(mask)
            reps = members[subsample_indices(len(members), NEIGHBOURHOOD_SAMPLES)]
            near = np.zeros(len(universe), dtype=bool)
            for r in reps:
                near |= np.asarray(family.contains(k, frame[r], frame), dtype=bool)
            out.append(near)
        return out

    @classmethod
    def coding_entropy_bound_check(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        levels: Sequence[int],
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> CheckResult:
        """c(n) <= 2^#F s(u, n) at a level u whose member neighbourhoods are disjoint and wandering."""
        cls.validate_family(system, family)
        if not family.disjoint:
            raise FamilyValidationError("the coding bound needs a disjoint family")
        universe = universe or cls.family_universe(system, family, horizon)
        for m in family.members:
            if not cls.wandering_check(system, m, horizon, universe).wandering:
                raise FamilyValidationError(f"member '{m.label}' is not wandering within {horizon} steps")

        coords = system.coordinates(universe.states)
        masks = [m.shape.contains(coords) for m in family.members]
        frames = OrbitService.orbits(system, universe, horizon).features
        entourages = system.entourages
        chosen = None
        for k in sorted(levels):
            entourages.check_level(k)
            near = cls._neighbourhoods(system, universe, masks, k)
            if (np.sum(near, axis=0) > 1).any():
                continue
            returns = False
            for mask, hood in zip(masks, near):
                reps = np.flatnonzero(mask)
                reps = reps[subsample_indices(len(reps), NEIGHBOURHOOD_SAMPLES)]
                inside = np.flatnonzero(hood)
                inside = inside[subsample_indices(len(inside), 4 * NEIGHBOURHOOD_SAMPLES)]
                for t in range(1, horizon):
                    back = entourages.contains(k, frames[t, inside][:, None], frames[0, reps][None])
                    if np.asarray(back).any():
                        returns = True
                        break
                if returns:
                    break
            if not returns:
                chosen = k
                break
        if chosen is None:
            raise FamilyValidationError(f"members are not separable at levels {sorted(levels)}")

        u = min(entourages.square_root_level(chosen), entourages.k_max)
        coding = cls.codings_count(system, family, horizon, universe).series.array()
        separated = EntropyService.separated_count(system, universe, u, horizon).array()
        factor = 2 ** len(family.members)
        bad = np.flatnonzero(coding > factor * separated)
        return CheckResult(
            name="coding_entropy_bound",
            passed=not bad.size,
            details={
                "neighbourhood_level": chosen,
                "level": u,
                "factor": factor,
                "first_violation_n": int(bad[0]) + 1 if bad.size else None,
                "c_series": coding.tolist(),
                "s_series": separated.tolist(),
            },
        )

    @classmethod
    def monotonicity_check(
        cls,
        system: DynamicalSystem,
        smaller: CodingFamily,
        larger: CodingFamily,
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> CheckResult:
        """c over F' <= c over F when every member of F' lies inside a member of F."""
        probe = universe or cls.family_universe(system, larger, horizon)
        coords = system.coordinates(probe.states)
        big = [m.shape.contains(coords) for m in larger.members]
        for m in smaller.members:
            mask = m.shape.contains(coords)
            if not any(not (mask & ~b).any() for b in big):
                raise InvalidInputError(f"'{m.label}' is not contained in any member of the larger family")
        c_small = cls.codings_count(system, smaller, horizon, universe).series.array()
        c_large = cls.codings_count(system, larger, horizon, universe).series.array()
        bad = np.flatnonzero(c_small > c_large)
        return CheckResult(
            name="coding_monotonicity",
            passed=not bad.size,
            details={"first_violation_n": int(bad[0]) + 1 if bad.size else None, "smaller": c_small.tolist(), "larger": c_large.tolist()},
        )

    @classmethod
    def additivity_check(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> CheckResult:
        """c over {∪F} and c over F are equivalent at the horizon."""
        whole = cls.codings_count(system, family.union(), horizon, universe).series
        parts = cls.codings_count(system, family, horizon, universe).series
        verdict = GrowthService.compare(whole, parts)
        return CheckResult(
            name="coding_additivity",
            passed=verdict.relation == Relation.EQUIVALENT,
            details={"verdict": verdict.model_dump(mode="json"), "union": whole.values, "family": parts.values},
        )

    @classmethod
    def disjoint_representatives_count(
        cls,
        system: DynamicalSystem,
        family: CodingFamily,
        horizon: int,
        universe: Optional[SampledCompact] = None,
    ) -> GrowthSeries:
        """Pointwise sup of c over every pairwise-disjoint subfamily."""
        size = len(family.members)
        if size > MAX_SUBFAMILY_MEMBERS:
            raise InvalidInputError(f"subfamily enumeration is limited to {MAX_SUBFAMILY_MEMBERS} members, got {size}")
        series = []
        for r in range(1, size + 1):
            for chosen in itertools.combinations(range(size), r):
                sub = family.subfamily(list(chosen))
                if sub.disjoint:
                    series.append(cls.codings_count(system, sub, horizon, universe).series)
        return GrowthService.sup(series)
