"""Seeded generator for a synthetic insurance claim handling log.

Each case runs register -> notify_<channel> -> submit_claim -> decide ->
pay|reject. The customer's age is drawn per case from a truncated normal
distribution and stored on the register event; which notification channels
are available depends on that age (postal mail always, phone below one age
bound, email below a lower one), and the channel is chosen uniformly among
the available ones. A drift is injected by switching the age mean on a
configurable day, which indirectly shifts the notification mix.

Timing is laid out so that, with one-day intervals anchored at the first
register event, all register events of arrival day ``d`` land in interval
``d`` (1-based) and the rest of the case lands in interval ``d + 1``. The
data-perspective consequence of the drift therefore appears exactly one
interval before the control-flow consequence, giving a known ground truth
for lag analysis. Identical configurations produce identical logs, event
identifiers included.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import ConfigInvalid
from .model import Case, Event, EventLog, sort_and_validate

ACTIVITY_REGISTER = "register"
ACTIVITY_SUBMIT = "submit_claim"
ACTIVITY_DECIDE = "decide"
ACTIVITY_PAY = "pay"
ACTIVITY_REJECT = "reject"
CHANNELS = ("notify_post", "notify_phone", "notify_email")

_AGE_LO, _AGE_HI = 18.0, 95.0


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 1
    days: int = 260
    cases_per_day: int = 20
    drift_day: int = 130
    pre_age_mean: float = 50.0
    post_age_mean: float = 35.0
    age_stddev: float = 10.0
    email_max_age: float = 40.0
    phone_max_age: float = 60.0
    pay_probability: float = 0.8
    resource_pool: tuple[str, ...] = (
        "clerk_01", "clerk_02", "clerk_03", "clerk_04", "clerk_05",
    )
    start: datetime = datetime(2021, 1, 4)

    def __post_init__(self):
        if self.days < 1 or self.cases_per_day < 1:
            raise ConfigInvalid("days and cases_per_day must be at least 1")
        if not 1 <= self.drift_day <= self.days:
            raise ConfigInvalid(
                f"drift_day must lie in 1..{self.days}, got {self.drift_day}"
            )
        if self.age_stddev <= 0:
            raise ConfigInvalid("age_stddev must be positive")
        if not 0 < self.email_max_age <= self.phone_max_age:
            raise ConfigInvalid("need 0 < email_max_age <= phone_max_age")
        if not 0.0 <= self.pay_probability <= 1.0:
            raise ConfigInvalid("pay_probability must lie in [0, 1]")
        if not self.resource_pool:
            raise ConfigInvalid("resource pool must not be empty")


def _truncated_age(rng: random.Random, mean: float, stddev: float) -> float:
    for _ in range(100):
        value = rng.gauss(mean, stddev)
        if _AGE_LO <= value <= _AGE_HI:
            return float(round(value))
    return float(round(min(max(mean, _AGE_LO), _AGE_HI)))


def available_channels(age: float, config: GeneratorConfig) -> list[str]:
    """Notification channels offered to a customer of the given age."""
    channels = ["notify_post"]
    if age < config.phone_max_age:
        channels.append("notify_phone")
    if age < config.email_max_age:
        channels.append("notify_email")
    return channels


def generate(config: GeneratorConfig) -> EventLog:
    """Generate and validate a synthetic claim handling log."""
    rng = random.Random(config.seed)
    log = EventLog()
    event_serial = 0
    resource_serial = 0

    def next_resource() -> str:
        nonlocal resource_serial
        r = config.resource_pool[resource_serial % len(config.resource_pool)]
        resource_serial += 1
        return r

    def emit(case: Case, activity: str, ts: datetime, attrs: dict | None = None) -> None:
        nonlocal event_serial
        event_serial += 1
        case.events.append(
            Event(
                event_id=f"e{event_serial}",
                case_id=case.case_id,
                activity=activity,
                timestamp=ts,
                resource=next_resource(),
                attrs=attrs or {},
            )
        )

    for day in range(1, config.days + 1):
        day_start = config.start + timedelta(days=day - 1)
        age_mean = config.pre_age_mean if day < config.drift_day else config.post_age_mean
        for case_no in range(1, config.cases_per_day + 1):
            case = Case(case_id=f"c{day:04d}_{case_no:03d}")
            log.cases[case.case_id] = case

            # The very first register event anchors the interval grid at
            # exactly 08:00, so every other timing window below stays inside
            # a single one-day interval relative to that anchor.
            if day == 1 and case_no == 1:
                register_hour = 8.0
            else:
                register_hour = rng.uniform(8.0, 10.0)
            t_register = day_start + timedelta(hours=register_hour)
            age = _truncated_age(rng, age_mean, config.age_stddev)
            emit(case, ACTIVITY_REGISTER, t_register, {"age": age})

            channel = rng.choice(available_channels(age, config))
            t_notify = t_register + timedelta(hours=rng.uniform(24.0, 36.0))
            emit(case, channel, t_notify)

            t_submit = t_notify + timedelta(hours=rng.uniform(1.0, 2.0))
            emit(case, ACTIVITY_SUBMIT, t_submit)

            t_decide = t_submit + timedelta(hours=rng.uniform(1.0, 2.0))
            emit(case, ACTIVITY_DECIDE, t_decide)

            outcome = ACTIVITY_PAY if rng.random() < config.pay_probability else ACTIVITY_REJECT
            t_close = t_decide + timedelta(hours=rng.uniform(0.5, 1.0))
            emit(case, outcome, t_close)

    return sort_and_validate(log)
