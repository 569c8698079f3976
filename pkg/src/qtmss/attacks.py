"""Executable adversary scenarios against the sharing protocol.

Two internal attacks are modelled on top of the channel-level
intercept-resend adversary:

* A dishonest reconstructor announces forged measurement bits to farm
  sigma angles from the other participants.  The collected angles are
  uniform on the session grid whenever the private deltas are, so an
  exhaustive consistency attacker is reduced to guessing the weight at
  chance level 1/q.
* Colluding participants pool their shares, weights, and deltas.  With
  the reconstructor in the ring nothing quantum is intercepted, and the
  scan shows the honest user's values never reach the pooled view; with
  the reconstructor outside the ring the colluders must tap the dealer
  transfer and the decoy check catches them at the usual rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .channel import AdversaryModel, expected_pass_rate
from .fields import RationalAngle
from .protocol import (DEALER, PrivateValues, Session, SessionConfig,
                       sample_delta, scan_transcript, user_sigma)


@dataclass
class AttackerView:
    """Everything a forging reconstructor sees: forged bits and replies."""

    sigma_primes: list[tuple[str, int, int, RationalAngle]] = field(
        default_factory=list)


def fake_result_attack(session: Session, forged_bits, rng) -> AttackerView:
    """Run the split and teleports honestly, then farm sigmas with fake bits.

    ``forged_bits`` maps (user, j) to the bit the dishonest
    reconstructor announces; missing entries are coin flips from rng.
    The users answer sigma' = (-1)^(m'+1) delta + gamma exactly as in an
    honest run, so the view contains only grid-uniform angles.
    """
    session.run_split()
    session.run_distribution()
    view = AttackerView()
    for j in range(1, session.config.m + 1):
        session.run_teleports(j)
        for user in session.helpers:
            ctx = session.contexts[user]
            forged = forged_bits.get((user, j)) if forged_bits else None
            if forged is None:
                forged = int(rng.integers(0, 2))
            sigma = user_sigma(forged, ctx.deltas[j], ctx.gammas[j - 1])
            view.sigma_primes.append((user, j, forged, sigma))
    return view


def sigma_samples(gamma: RationalAngle, m_bit: int, config: SessionConfig,
                  trials: int, rng) -> list[RationalAngle]:
    """Angles a user would publish across fresh delta draws (for stats)."""
    return [user_sigma(m_bit, sample_delta(config, rng), gamma)
            for _ in range(trials)]


def consistent_weights(sigma: RationalAngle, w: int,
                       config: SessionConfig) -> list[int]:
    """All weight values c for which some legal delta explains sigma.

    The attacker inverts sigma = +-delta + gamma_c for every candidate
    c in GF(q); a candidate stays when the implied delta is a nonzero
    point of the session grid for at least one sign.
    """
    q = config.modulus.q
    den = math.lcm(config.delta_denominator, q)
    survivors = []
    for c in range(q):
        gamma_turns = Fraction(w * c, q)
        ok = False
        for sign in (1, -1):
            delta_turns = (sign * (sigma.turns - gamma_turns)) % 1
            if delta_turns != 0 and (delta_turns * den).denominator == 1:
                ok = True
        if ok:
            survivors.append(c)
    return survivors


@dataclass(frozen=True)
class GuessReport:
    trials: int
    successes: int
    expected_rate: float

    @property
    def observed_rate(self) -> float:
        return self.successes / self.trials


def fake_results_campaign(config: SessionConfig, secrets, trials: int,
                          seed: int) -> GuessReport:
    """Monte Carlo guess game: one forged sigma, one weight guess per session.

    The attacker keeps every candidate weight consistent with the
    observed sigma and guesses uniformly among them; with the
    q-refined grid all q candidates survive, so the success rate sits
    at chance level 1/q.
    """
    q = config.modulus.q
    successes = 0
    for i in range(trials):
        child = np.random.default_rng(np.random.SeedSequence([seed, i]))
        cfg = SessionConfig(
            modulus=config.modulus, t=config.t, n=config.n, w=config.w,
            seed=0, names=config.names, x=config.x,
            decoy_d1=0, decoy_d2=0,
            delta_denominator=config.delta_denominator)
        session = Session(cfg, secrets, rng=child)
        view = fake_result_attack(session, {}, child)
        user, j, _, sigma = view.sigma_primes[0]
        candidates = consistent_weights(sigma, cfg.w[j - 1], cfg)
        guess = candidates[int(child.integers(0, len(candidates)))]
        if guess == session.contexts[user].weight.c:
            successes += 1
    return GuessReport(trials, successes, 1.0 / q)


@dataclass(frozen=True)
class CollusionReport:
    colluding: tuple[str, ...]
    honest: tuple[str, ...]
    trials: int
    aborts: int
    expected_abort_rate: float | None
    leaked: tuple[str, ...]

    @property
    def abort_rate(self) -> float:
        return self.aborts / self.trials


def _restrict_private(private: PrivateValues,
                      honest: Sequence[str]) -> PrivateValues:
    keep = set(honest)
    return PrivateValues(
        shares={k: v for k, v in private.shares.items() if k in keep},
        weights={k: v for k, v in private.weights.items() if k in keep},
        deltas={k: v for k, v in private.deltas.items() if k[0] in keep},
        gammas={k: v for k, v in private.gammas.items() if k[0] in keep},
    )


def collusion_scenario(config: SessionConfig, secrets, colluding,
                       seed: int, trials: int = 1) -> CollusionReport:
    """Run sessions under a colluding set and scan what the ring can see.

    The pooled view is the colluders' own private data plus the public
    transcript.  The scan therefore reduces to: does the transcript
    carry any honest participant's share, weight, or delta?  When the
    reconstructor is outside the ring, the colluders intercept the
    dealer-to-reconstructor transfer and the abort rate is compared
    against 1 - (3/4)^(d1+d2).
    """
    colluding = tuple(colluding)
    participating = config.names[:config.t]
    honest = tuple(name for name in participating if name not in colluding)
    if not honest:
        raise ValueError("at least one participant must stay honest")
    reconstructor = participating[-1]
    intercepting = reconstructor not in colluding
    adversary = (AdversaryModel.intercept_resend(transfers={"split"})
                 if intercepting else AdversaryModel.none())
    aborts = 0
    leaked: list[str] = []
    for i in range(trials):
        child = np.random.default_rng(np.random.SeedSequence([seed, i]))
        session = Session(config, secrets, adversary=adversary, rng=child)
        report = session.run()
        aborts += report.aborted
        private = _restrict_private(session.private_values(),
                                    honest + (DEALER,))
        leaked.extend(scan_transcript(report.transcript, private))
    expected = (1.0 - expected_pass_rate(config.channel_config())
                if intercepting else None)
    return CollusionReport(colluding, honest, trials, aborts, expected,
                           tuple(leaked))
