"""Backdoor dataset poisoning and the two injection strategies.

Three attack families are supported. One-to-one stamps a single trigger and
relabels to one target. One-to-N cycles poisoned samples round-robin through
a list of (trigger, target) pairs so a single dataset carries several
backdoors at different intensities. N-to-one stamps every trigger of the
list onto each poisoned sample; the backdoor is meant to fire only when all
of them are present together.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .datamodel import ImageDataset, ModelParams, TrainConfig, train_local
from .errors import InvalidConfig, InvalidInput
from .numerics import RngStream


class AttackFamily(enum.Enum):
    ONE_TO_ONE = "one_to_one"
    ONE_TO_N = "one_to_n"
    N_TO_ONE = "n_to_one"


class InjectionStrategy(enum.Enum):
    MULTI_ROUND = "multi_round"
    MODEL_REPLACEMENT = "replacement"


@dataclass(frozen=True)
class TriggerSpec:
    """Pixel indices forced to a fixed intensity."""

    mask: tuple[int, ...]
    intensity: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.intensity <= 1.0:
            raise InvalidConfig("TriggerSpec: intensity must be in [0, 1]")
        if len(set(self.mask)) != len(self.mask):
            raise InvalidConfig("TriggerSpec: duplicate pixels in mask")


def row_trigger(row: int, width: int, intensity: float = 1.0) -> TriggerSpec:
    """Trigger covering one full pixel row."""
    return TriggerSpec(
        mask=tuple(range(row * width, (row + 1) * width)), intensity=intensity
    )


@dataclass
class AttackPlan:
    """What the compromised clients do.

    rho is the fixed poisoning ratio, or None for the adaptive mode where
    attackers re-derive their constrained best response from the published
    reputation each round. replacement_round and boost only apply to the
    model-replacement strategy.
    """

    family: AttackFamily
    triggers: list[TriggerSpec]
    target_labels: list[int]
    strategy: InjectionStrategy = InjectionStrategy.MULTI_ROUND
    rho: float | None = 0.5
    replacement_round: int | None = None
    boost: float | None = None

    def __post_init__(self):
        if self.family is AttackFamily.ONE_TO_ONE:
            if len(self.triggers) != 1 or len(self.target_labels) != 1:
                raise InvalidConfig("one_to_one: needs exactly 1 trigger and 1 target")
        elif self.family is AttackFamily.ONE_TO_N:
            if len(self.triggers) < 2 or len(self.triggers) != len(self.target_labels):
                raise InvalidConfig(
                    "one_to_n: needs >= 2 triggers with matching targets"
                )
        else:
            if len(self.triggers) < 2 or len(self.target_labels) != 1:
                raise InvalidConfig("n_to_one: needs >= 2 triggers and 1 target")
        if self.rho is not None and not 0.0 <= self.rho <= 1.0:
            raise InvalidConfig("AttackPlan: rho must be in [0, 1] or None (adaptive)")
        if self.boost is not None and self.boost < 1.0:
            raise InvalidConfig("AttackPlan: boost must be >= 1")

    @property
    def adaptive(self) -> bool:
        return self.rho is None


def apply_trigger(image: np.ndarray, trigger: TriggerSpec) -> np.ndarray:
    """Stamp one trigger onto a copy of the pixel vector."""
    out = np.asarray(image, dtype=float).copy()
    if trigger.mask:
        idx = np.asarray(trigger.mask, dtype=int)
        if idx.min() < 0 or idx.max() >= out.shape[-1]:
            raise InvalidInput("apply_trigger: mask outside image bounds")
        out[..., idx] = trigger.intensity
    return np.clip(out, 0.0, 1.0)


def _stamp(images: np.ndarray, trigger: TriggerSpec) -> np.ndarray:
    out = images.copy()
    if trigger.mask:
        idx = np.asarray(trigger.mask, dtype=int)
        if idx.min() < 0 or idx.max() >= out.shape[1]:
            raise InvalidInput("trigger mask outside image bounds")
        out[:, idx] = trigger.intensity
    return np.clip(out, 0.0, 1.0)


def poison_dataset(
    ds: ImageDataset, plan: AttackPlan, rho: float, rng: RngStream
) -> ImageDataset:
    """Poison exactly floor(rho * n) uniformly chosen samples.

    Unchosen rows are bit-identical to the input. One-to-N assigns its
    (trigger, target) pairs round-robin over the chosen rows, so pair counts
    differ by at most one.
    """
    if not 0.0 <= rho <= 1.0:
        raise InvalidInput(f"poison_dataset: rho={rho} outside [0, 1]")
    n = len(ds)
    count = int(np.floor(rho * n))
    images = ds.images.copy()
    labels = ds.labels.copy()
    if count:
        chosen = np.sort(rng.gen.choice(n, size=count, replace=False))
        if plan.family is AttackFamily.ONE_TO_ONE:
            images[chosen] = _stamp(images[chosen], plan.triggers[0])
            labels[chosen] = plan.target_labels[0]
        elif plan.family is AttackFamily.ONE_TO_N:
            for k, trig in enumerate(plan.triggers):
                part = chosen[k :: len(plan.triggers)]
                images[part] = _stamp(images[part], trig)
                labels[part] = plan.target_labels[k]
        else:  # N_TO_ONE: all triggers on every poisoned sample
            block = images[chosen]
            for trig in plan.triggers:
                block = _stamp(block, trig)
            images[chosen] = block
            labels[chosen] = plan.target_labels[0]
    return ImageDataset(
        images=images,
        labels=labels,
        height=ds.height,
        width=ds.width,
        n_classes=ds.n_classes,
    )


def craft_replacement_update(
    global_model: ModelParams,
    poisoned_ds: ImageDataset,
    cfg: TrainConfig,
    boost: float,
) -> ModelParams:
    """Fine-tune on the poisoned shard, then amplify the delta.

    The boosted update global + boost * (trained - global) survives plain
    averaging: with boost equal to the number of aggregated clients and all
    other updates at the global, the average lands exactly on the trained
    model.
    """
    if boost < 1.0:
        raise InvalidInput("craft_replacement_update: boost must be >= 1")
    trained = train_local(global_model, poisoned_ds, cfg)
    flat = global_model.flat + boost * (trained.flat - global_model.flat)
    return ModelParams(flat=flat, shape=global_model.shape)


def _family_testset(ds: ImageDataset, plan: AttackPlan, triggers: list[TriggerSpec]):
    """Stamp per family and relabel to targets; drop true-target collisions."""
    if plan.family is AttackFamily.ONE_TO_N:
        images = []
        labels = []
        for j in range(len(ds)):
            k = j % len(triggers)
            if ds.labels[j] == plan.target_labels[k]:
                continue
            images.append(_stamp(ds.images[j : j + 1], triggers[k])[0])
            labels.append(plan.target_labels[k])
        if not images:
            raise InvalidInput("build_triggered_testset: no eligible samples")
        return np.array(images), np.array(labels, dtype=int)
    target = plan.target_labels[0]
    keep = ds.labels != target
    if not np.any(keep):
        raise InvalidInput("build_triggered_testset: no eligible samples")
    images = ds.images[keep]
    for trig in triggers:
        images = _stamp(images, trig)
    return images, np.full(int(keep.sum()), target, dtype=int)


def build_triggered_testset(ds: ImageDataset, plan: AttackPlan) -> ImageDataset:
    """Evaluation set for the attack success rate.

    Every sample is stamped according to the plan's family and labeled with
    the attack target; samples whose true label already equals their target
    are excluded so trivial agreement does not count as success.
    """
    if len(ds) == 0:
        raise InvalidInput("build_triggered_testset: empty dataset")
    images, labels = _family_testset(ds, plan, plan.triggers)
    return ImageDataset(
        images=images,
        labels=labels,
        height=ds.height,
        width=ds.width,
        n_classes=ds.n_classes,
    )


def build_partial_trigger_testset(
    ds: ImageDataset, plan: AttackPlan, drop: int = 1
) -> ImageDataset:
    """Negative control for N-to-one: stamp all but `drop` triggers.

    With any trigger missing the combined backdoor should stay dormant, so
    the success rate on this set is expected to sit at chance.
    """
    if plan.family is not AttackFamily.N_TO_ONE:
        raise InvalidInput("partial-trigger control only applies to n_to_one")
    if not 1 <= drop < len(plan.triggers):
        raise InvalidInput("build_partial_trigger_testset: bad drop count")
    reduced = plan.triggers[: len(plan.triggers) - drop]
    images, labels = _family_testset(ds, plan, reduced)
    return ImageDataset(
        images=images,
        labels=labels,
        height=ds.height,
        width=ds.width,
        n_classes=ds.n_classes,
    )


def default_plan(
    family: AttackFamily,
    width: int,
    height: int,
    strategy: InjectionStrategy = InjectionStrategy.MULTI_ROUND,
    rho: float | None = 0.5,
) -> AttackPlan:
    """Stock trigger/target layouts used by the scenario presets.

    Every class template keeps its first pixel bright, so a dark first row
    never collides with clean content and stays linearly separable from it;
    the bright variant is the natural second intensity for the one-to-N
    pair. The N-to-one companion trigger uses a mid-gray last row: some
    class templates have naturally dark or bright rows, and a trigger that
    resembles one would make that class's honest holders look like
    attackers to the defense round after round.
    """
    dark_row = row_trigger(0, width, 0.0)
    if family is AttackFamily.ONE_TO_ONE:
        triggers, targets = [dark_row], [9]
    elif family is AttackFamily.ONE_TO_N:
        triggers = [dark_row, row_trigger(0, width, 1.0)]
        targets = [9, 8]
    else:
        triggers = [dark_row, row_trigger(height - 1, width, 0.5)]
        targets = [9]
    return AttackPlan(
        family=family,
        triggers=triggers,
        target_labels=targets,
        strategy=strategy,
        rho=rho,
    )
