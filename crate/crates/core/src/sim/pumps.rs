//! Pump fleet (repaired system) dataset generator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::PumpSimConfig;
use crate::dataset::{PumpEvent, PumpEventKind, PumpHistory};
use crate::rng::stream;
use crate::Result;

/// Days before the drawn failure at which a condition-based suspension
/// pulls the pump from service.
const SUSPENSION_LEAD: (f64, f64) = (2.0, 12.0);
/// Placement of the prompted final measurement before an intervention.
const LATE_LEAD: (f64, f64) = (8.0, 25.0);
/// Placement of the routine check early in each interval.
const EARLY_CHECK: (f64, f64) = (15.0, 45.0);

struct IntervalPlan {
    start: f64,
    /// Drawn failure instant; band escalation races toward it whether or
    /// not a suspension intervenes first.
    would_fail: f64,
    term: Option<Terminator>,
    sudden: bool,
}

enum Terminator {
    Failure(f64),
    Suspension(f64),
}

impl Terminator {
    fn day(&self) -> f64 {
        match self {
            Terminator::Failure(d) | Terminator::Suspension(d) => *d,
        }
    }
}

/// Generates one sparse event history per pump.
///
/// Pumps split into a long-lived subpopulation (first life drawn around
/// `strong_first_life_mean`, one or two interventions over the horizon)
/// and a short-lived one (first life around `weak_first_life_mean`, about
/// four interventions). Post-repair lives shrink to `repair_degradation`
/// times the first-life mean: repairs are imperfect. Band averages drift
/// upward within each interval, accelerating toward failure, except for
/// sudden failures, which give no warning. Measurements are sparse: one
/// routine check early in each interval, occasional gap-driven readings,
/// and a final reading prompted by visible deterioration.
pub fn simulate_pumps(cfg: &PumpSimConfig) -> Result<Vec<PumpHistory>> {
    cfg.validate()?;
    let strong_count = (cfg.strong_fraction * cfg.n_pumps as f64).round() as usize;
    let mut fleet = Vec::with_capacity(cfg.n_pumps);

    for p in 0..cfg.n_pumps {
        let mut rng = stream(cfg.seed, p as u64);
        let strong = p < strong_count;
        let (first_mean, first_spread) = if strong {
            (cfg.strong_first_life_mean, cfg.strong_first_life_spread)
        } else {
            (cfg.weak_first_life_mean, cfg.weak_first_life_spread)
        };
        let later_mean = first_mean * cfg.repair_degradation;
        let band_mult = cfg.band_choice.multiplier();
        let base1 = cfg.band_baseline * band_mult * rng.random_range(0.85..=1.15);
        let base2 = cfg.band_baseline * band_mult * rng.random_range(0.85..=1.15);

        let mut events: Vec<PumpEvent> = Vec::new();
        let mut start = 0.0_f64;
        let mut first_interval = true;

        while start < cfg.horizon_days - 1.0 {
            let life = if first_interval {
                rng.random_range(first_mean - first_spread..=first_mean + first_spread)
            } else {
                let spread = cfg.subsequent_life_spread * later_mean;
                rng.random_range(later_mean - spread..=later_mean + spread)
            };
            first_interval = false;
            let would_fail = (start + life).round();

            // Draw the interval's fate in a fixed order so the stream
            // stays aligned regardless of the outcome.
            let sudden = rng.random::<f64>() < cfg.sudden_prob;
            let suspend = rng.random::<f64>() < cfg.suspension_prob;

            let plan = if would_fail > cfg.horizon_days {
                IntervalPlan {
                    start,
                    would_fail,
                    term: None,
                    sudden,
                }
            } else if !sudden && suspend {
                let lead = rng.random_range(SUSPENSION_LEAD.0..=SUSPENSION_LEAD.1).round();
                IntervalPlan {
                    start,
                    would_fail,
                    term: Some(Terminator::Suspension((would_fail - lead).max(start + 1.0))),
                    sudden,
                }
            } else {
                IntervalPlan {
                    start,
                    would_fail,
                    term: Some(Terminator::Failure(would_fail)),
                    sudden,
                }
            };

            place_interval(cfg, &mut rng, &plan, base1, base2, &mut events);

            match plan.term {
                Some(t) => {
                    events.push(PumpEvent {
                        day: t.day(),
                        kind: match t {
                            Terminator::Failure(_) => PumpEventKind::Failure,
                            Terminator::Suspension(_) => PumpEventKind::Suspension,
                        },
                    });
                    start = t.day();
                }
                None => break,
            }
        }

        fleet.push(PumpHistory::new(format!("pump{p}"), events)?);
    }
    Ok(fleet)
}

/// Schedules and appends one interval's measurements.
fn place_interval(
    cfg: &PumpSimConfig,
    rng: &mut ChaCha8Rng,
    plan: &IntervalPlan,
    base1: f64,
    base2: f64,
    events: &mut Vec<PumpEvent>,
) {
    let end = plan
        .term
        .as_ref()
        .map(|t| t.day())
        .unwrap_or(cfg.horizon_days);

    let mut days: Vec<f64> = Vec::new();
    let early = plan.start + rng.random_range(EARLY_CHECK.0..=EARLY_CHECK.1).round();
    if early < end {
        days.push(early);
    }
    let mut t = early;
    loop {
        t += cfg.measurement_gap_days * rng.random_range(0.75..=1.25);
        if t.round() >= end {
            break;
        }
        days.push(t.round());
    }
    // The approach of failure is visible in the band readings, so the
    // interval's last reading is usually prompted by them; a sudden
    // failure gives no such warning.
    if plan.term.is_some() && !plan.sudden {
        let late = end - rng.random_range(LATE_LEAD.0..=LATE_LEAD.1).round();
        if late > plan.start {
            days.push(late);
        }
    }
    days.sort_by(|a, b| a.partial_cmp(b).expect("finite days"));

    let mut prev = events.last().map(|e| e.day).unwrap_or(-1.0);
    for mut day in days {
        if day <= prev {
            day = prev + 1.0;
        }
        if day >= end {
            continue;
        }
        let progress = ((day - plan.start) / (plan.would_fail - plan.start)).clamp(0.0, 1.0);
        let escalation = if plan.sudden {
            1.0
        } else {
            1.0 + cfg.band_escalation * progress.powi(3)
        };
        events.push(PumpEvent {
            day,
            kind: PumpEventKind::Measurement {
                band_avg_brg1: base1 * escalation * rng.random_range(0.9..=1.1),
                band_avg_brg2: base2 * escalation * rng.random_range(0.9..=1.1),
            },
        });
        prev = day;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PumpEventKind;

    fn fleet(seed: u64) -> Vec<PumpHistory> {
        simulate_pumps(&PumpSimConfig {
            seed,
            ..PumpSimConfig::default()
        })
        .unwrap()
    }

    fn intervention_days(h: &PumpHistory) -> Vec<f64> {
        h.events
            .iter()
            .filter(|e| !matches!(e.kind, PumpEventKind::Measurement { .. }))
            .map(|e| e.day)
            .collect()
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(fleet(5), fleet(5));
    }

    #[test]
    fn events_are_ordered_and_inside_the_horizon() {
        for seed in 0..20 {
            for pump in fleet(seed) {
                let mut prev = -1.0;
                for e in &pump.events {
                    assert!(e.day > prev, "{}: day order violated", pump.pump_id);
                    assert!(e.day <= 791.0);
                    prev = e.day;
                }
            }
        }
    }

    #[test]
    fn fleet_statistics_match_the_known_history() {
        let mut first_lives = Vec::new();
        let mut later_lives = Vec::new();
        let mut counts = Vec::new();
        for seed in 0..200 {
            let mut measurements = 0usize;
            for pump in fleet(seed) {
                let days = intervention_days(&pump);
                if let Some(&first) = days.first() {
                    first_lives.push(first);
                }
                for pair in days.windows(2) {
                    later_lives.push(pair[1] - pair[0]);
                }
                measurements += pump
                    .events
                    .iter()
                    .filter(|e| matches!(e.kind, PumpEventKind::Measurement { .. }))
                    .count();
            }
            counts.push(measurements);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let first_mean = mean(&first_lives);
        let later_mean = mean(&later_lives);
        assert!(
            (first_mean - 469.0).abs() <= 0.15 * 469.0,
            "fleet mean first life {first_mean}"
        );
        assert!(
            (90.0..=160.0).contains(&later_mean),
            "later-life mean {later_mean}"
        );
        let (lo, hi) = counts
            .iter()
            .fold((usize::MAX, 0), |(l, h), &c| (l.min(c), h.max(c)));
        assert!(
            lo >= 40 && hi <= 70,
            "fleet-wide measurement counts ranged over [{lo}, {hi}]"
        );
    }

    #[test]
    fn failure_intervals_carry_at_least_one_measurement() {
        for seed in 0..200 {
            for pump in fleet(seed) {
                let mut measurements_in_interval = 0usize;
                for e in &pump.events {
                    match e.kind {
                        PumpEventKind::Measurement { .. } => measurements_in_interval += 1,
                        PumpEventKind::Failure => {
                            assert!(
                                measurements_in_interval > 0,
                                "{} seed {seed}: failure at {} with no measurement",
                                pump.pump_id,
                                e.day
                            );
                            measurements_in_interval = 0;
                        }
                        PumpEventKind::Suspension => measurements_in_interval = 0,
                    }
                }
            }
        }
    }

    #[test]
    fn strong_pumps_outlive_weak_pumps() {
        let mut strong_first = Vec::new();
        let mut weak_first = Vec::new();
        let mut weak_interventions = Vec::new();
        for seed in 0..50 {
            for (p, pump) in fleet(seed).into_iter().enumerate() {
                let days = intervention_days(&pump);
                if p < 5 {
                    strong_first.push(days[0]);
                } else {
                    weak_first.push(days[0]);
                    weak_interventions.push(days.len());
                }
            }
        }
        assert!(strong_first.iter().all(|&d| d > 490.0));
        let weak_mean = weak_first.iter().sum::<f64>() / weak_first.len() as f64;
        assert!((weak_mean - 357.0).abs() < 40.0, "weak first mean {weak_mean}");
        let avg_interventions =
            weak_interventions.iter().sum::<usize>() as f64 / weak_interventions.len() as f64;
        assert!(
            (3.0..=5.0).contains(&avg_interventions),
            "weak pumps averaged {avg_interventions} interventions"
        );
    }
}
