//! Baggage arrival process: fixed-interval or piecewise-constant Poisson,
//! driven by the dedicated arrival RNG stream.

use super::config::{ArrivalSpec, ExitChoice};
use super::rng::RngStream;
use crate::vehicle::BagId;
use crate::world::NodeId;

#[derive(Debug, Clone, Copy)]
pub struct NewBag {
    pub bag: BagId,
    pub arrival_s: f64,
    pub dropoff: NodeId,
}

pub struct ArrivalState {
    spec: ArrivalSpec,
    exits: Vec<NodeId>,
    exit_choice: ExitChoice,
    next_bag: u32,
    total_bags: u32,
    /// Absolute time of the next arrival, seconds.
    next_time_s: f64,
    rng: RngStream,
    exit_rng: RngStream,
    round_robin: usize,
}

impl ArrivalState {
    pub fn new(
        spec: ArrivalSpec,
        total_bags: u32,
        exits: Vec<NodeId>,
        exit_choice: ExitChoice,
        seed: u64,
    ) -> Self {
        let mut rng = RngStream::new(seed, "arrivals");
        let next_time_s = match &spec {
            ArrivalSpec::FixedInterval { .. } => 0.0,
            ArrivalSpec::PiecewisePoisson { segments } => {
                let start = segments[0].start_s;
                start + sample_gap(&mut rng, segments, start)
            }
        };
        Self {
            spec,
            exits,
            exit_choice,
            next_bag: 0,
            total_bags,
            next_time_s,
            rng,
            exit_rng: RngStream::new(seed, "exit_selection"),
            round_robin: 0,
        }
    }

    /// Bags arriving in `[t_prev_s, t_now_s)`, each with its drop-off exit.
    pub fn spawn(&mut self, t_prev_s: f64, t_now_s: f64) -> Vec<NewBag> {
        debug_assert!(t_prev_s <= t_now_s);
        let mut out = Vec::new();
        while self.next_bag < self.total_bags && self.next_time_s < t_now_s {
            if self.next_time_s >= t_prev_s {
                let bag = BagId(self.next_bag);
                let dropoff = self.pick_exit();
                out.push(NewBag {
                    bag,
                    arrival_s: self.next_time_s,
                    dropoff,
                });
            }
            self.next_bag += 1;
            self.advance_clock();
        }
        out
    }

    fn advance_clock(&mut self) {
        match &self.spec {
            ArrivalSpec::FixedInterval { period_s } => {
                self.next_time_s = self.next_bag as f64 * period_s;
            }
            ArrivalSpec::PiecewisePoisson { segments } => {
                self.next_time_s += sample_gap(&mut self.rng, segments, self.next_time_s);
            }
        }
    }

    fn pick_exit(&mut self) -> NodeId {
        match self.exit_choice {
            ExitChoice::RoundRobin => {
                let exit = self.exits[self.round_robin % self.exits.len()];
                self.round_robin += 1;
                exit
            }
            ExitChoice::Random => self.exits[self.exit_rng.next_index(self.exits.len())],
        }
    }
}

/// Gap to the next Poisson event from absolute time `t`, respecting segment
/// boundaries (memorylessness lets each segment restart the clock).
fn sample_gap(rng: &mut RngStream, segments: &[super::config::RateSegment], t: f64) -> f64 {
    let mut now = t;
    loop {
        let (rate, boundary) = active_segment(segments, now);
        let gap = rng.next_exponential(rate);
        match boundary {
            Some(b) if now + gap >= b => now = b,
            _ => return now + gap - t,
        }
    }
}

/// Rate in force at `t` plus the time the next segment takes over.
fn active_segment(segments: &[super::config::RateSegment], t: f64) -> (f64, Option<f64>) {
    let mut rate = segments[0].rate_per_s;
    let mut boundary = None;
    for (i, seg) in segments.iter().enumerate() {
        if t >= seg.start_s {
            rate = seg.rate_per_s;
            boundary = segments.get(i + 1).map(|s| s.start_s);
        } else {
            break;
        }
    }
    (rate, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::config::RateSegment;

    fn exits() -> Vec<NodeId> {
        vec![NodeId(1), NodeId(2)]
    }

    #[test]
    fn fixed_interval_spawns_at_multiples_of_the_period() {
        let mut arrivals = ArrivalState::new(
            ArrivalSpec::FixedInterval { period_s: 18.0 },
            100,
            exits(),
            ExitChoice::RoundRobin,
            1,
        );
        let bags = arrivals.spawn(0.0, 90.0);
        let times: Vec<f64> = bags.iter().map(|b| b.arrival_s).collect();
        assert_eq!(times, vec![0.0, 18.0, 36.0, 54.0, 72.0]);
        // round-robin exits alternate
        assert_eq!(bags[0].dropoff, NodeId(1));
        assert_eq!(bags[1].dropoff, NodeId(2));
        assert_eq!(bags[2].dropoff, NodeId(1));
    }

    #[test]
    fn zero_length_window_spawns_nothing() {
        let mut arrivals = ArrivalState::new(
            ArrivalSpec::FixedInterval { period_s: 5.0 },
            10,
            exits(),
            ExitChoice::RoundRobin,
            1,
        );
        assert!(arrivals.spawn(3.0, 3.0).is_empty());
    }

    #[test]
    fn bag_cap_is_respected() {
        let mut arrivals = ArrivalState::new(
            ArrivalSpec::FixedInterval { period_s: 1.0 },
            3,
            exits(),
            ExitChoice::RoundRobin,
            1,
        );
        assert_eq!(arrivals.spawn(0.0, 100.0).len(), 3);
        assert!(arrivals.spawn(100.0, 200.0).is_empty());
    }

    #[test]
    fn poisson_count_tracks_rate_within_five_percent() {
        // Expectation over many seeded windows of length L approaches r * L.
        let rate = 0.2;
        let len_s = 500.0;
        let mut total = 0usize;
        let seeds = 1000;
        for seed in 0..seeds {
            let mut arrivals = ArrivalState::new(
                ArrivalSpec::PiecewisePoisson {
                    segments: vec![RateSegment { start_s: 0.0, rate_per_s: rate }],
                },
                u32::MAX,
                exits(),
                ExitChoice::RoundRobin,
                seed,
            );
            total += arrivals.spawn(0.0, len_s).len();
        }
        let mean = total as f64 / seeds as f64;
        let expected = rate * len_s;
        assert!(
            (mean - expected).abs() / expected < 0.05,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn piecewise_rate_change_shows_up_in_counts() {
        let mut lo = 0usize;
        let mut hi = 0usize;
        for seed in 0..200 {
            let mut arrivals = ArrivalState::new(
                ArrivalSpec::PiecewisePoisson {
                    segments: vec![
                        RateSegment { start_s: 0.0, rate_per_s: 0.05 },
                        RateSegment { start_s: 500.0, rate_per_s: 0.5 },
                    ],
                },
                u32::MAX,
                exits(),
                ExitChoice::RoundRobin,
                seed,
            );
            lo += arrivals.spawn(0.0, 500.0).len();
            hi += arrivals.spawn(500.0, 1000.0).len();
        }
        assert!(hi > 5 * lo, "hi {hi} lo {lo}");
    }

    #[test]
    fn identical_seeds_reproduce_the_arrival_sequence() {
        let spec = ArrivalSpec::PiecewisePoisson {
            segments: vec![RateSegment { start_s: 0.0, rate_per_s: 0.1 }],
        };
        let mut a = ArrivalState::new(spec.clone(), 50, exits(), ExitChoice::Random, 99);
        let mut b = ArrivalState::new(spec, 50, exits(), ExitChoice::Random, 99);
        let ta: Vec<(f64, NodeId)> = a.spawn(0.0, 1e4).iter().map(|x| (x.arrival_s, x.dropoff)).collect();
        let tb: Vec<(f64, NodeId)> = b.spawn(0.0, 1e4).iter().map(|x| (x.arrival_s, x.dropoff)).collect();
        assert_eq!(ta, tb);
    }
}
