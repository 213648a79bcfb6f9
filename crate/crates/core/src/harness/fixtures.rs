use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blocks::{determinant, format_fraction, is_p_power_big, positive_definite, tau_from_cartan, Fraction};

/// Random degree vectors drawn per fixture.
pub const FIXTURE_SAMPLES: usize = 1000;

/// Largest sampled Brauer degree.
const MAX_SAMPLED_DEGREE: u64 = 10_000;

/// A published 2-block Cartan matrix together with its defect data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PublishedFixture {
    pub name: String,
    pub prime: u64,
    pub cartan: Vec<Vec<u64>>,
    pub defect_group_order: u64,
    pub sectional_rank: u32,
    /// Trace as published (or summed by hand from the published matrix).
    pub expected_trace: u64,
    /// Brauer degrees, where the block is small enough to know them.
    pub degrees: Option<Vec<u64>>,
}

pub fn published_fixtures() -> Vec<PublishedFixture> {
    let fx = |name: &str, cartan: Vec<Vec<u64>>, order, s, trace, degrees| PublishedFixture {
        name: name.into(),
        prime: 2,
        cartan,
        defect_group_order: order,
        sectional_rank: s,
        expected_trace: trace,
        degrees,
    };
    vec![
        fx(
            "J1",
            vec![
                vec![8, 4, 4, 4, 4],
                vec![4, 4, 3, 3, 1],
                vec![4, 3, 4, 2, 2],
                vec![4, 3, 2, 4, 2],
                vec![4, 1, 2, 2, 4],
            ],
            8,
            3,
            24,
            None,
        ),
        fx(
            "Co3",
            vec![
                vec![4, 2, 4, 2, 2],
                vec![2, 4, 4, 2, 2],
                vec![4, 4, 8, 4, 3],
                vec![2, 2, 4, 4, 2],
                vec![2, 2, 3, 2, 2],
            ],
            8,
            3,
            22,
            None,
        ),
        fx(
            "KleinA",
            vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]],
            4,
            2,
            6,
            Some(vec![1, 1, 1]),
        ),
        fx(
            "KleinB",
            vec![vec![4, 2, 2], vec![2, 2, 1], vec![2, 1, 2]],
            4,
            2,
            8,
            Some(vec![1, 2, 2]),
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub symmetric: bool,
    pub max_diagonal: u64,
    pub diagonal_bound: u64,
    pub diagonal_bound_holds: bool,
    pub trace: u64,
    pub trace_matches: bool,
    pub determinant: String,
    pub determinant_p_power: bool,
    pub positive_definite: bool,
    /// `tau` at the known degree vector, if any.
    #[serde(serialize_with = "crate::blocks::serialize_opt_fraction")]
    pub tau: Option<Fraction>,
    pub samples: usize,
    /// `tau <= Tr(C)` for every sample.
    pub rayleigh_holds: bool,
    /// `p^s |P|`.
    pub ineq3_bound: u64,
    /// `tau < p^s |P|` for every sample.
    pub ineq3_holds: bool,
    #[serde(serialize_with = "crate::blocks::serialize_opt_fraction")]
    pub max_sampled_tau: Option<Fraction>,
    pub passed: bool,
}

fn check(f: &PublishedFixture, seed: u64) -> FixtureOutcome {
    let c = &f.cartan;
    let n = c.len();
    let square = c.iter().all(|r| r.len() == n);
    let symmetric = square && (0..n).all(|i| (0..n).all(|j| c[i][j] == c[j][i]));
    let max_diagonal = (0..n).filter(|_| square).map(|i| c[i][i]).max().unwrap_or(0);
    let trace: u64 = (0..n).filter(|_| square).map(|i| c[i][i]).sum();
    let det = if square { determinant(c) } else { 0.into() };
    let determinant_p_power = is_p_power_big(&det, f.prime);
    let pd = square && positive_definite(c);
    let tr = Fraction::from_integer(trace);
    let ineq3_bound = f.prime.pow(f.sectional_rank) * f.defect_group_order;
    let bound = Fraction::from_integer(ineq3_bound);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ name_hash(&f.name));
    let (mut rayleigh_holds, mut ineq3_holds) = (square, square);
    let mut max_sampled_tau: Option<Fraction> = None;
    for _ in 0..FIXTURE_SAMPLES {
        let d: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=MAX_SAMPLED_DEGREE)).collect();
        match tau_from_cartan(c, &d) {
            Ok(t) => {
                rayleigh_holds &= t <= tr;
                ineq3_holds &= t < bound;
                max_sampled_tau = Some(max_sampled_tau.map_or(t, |m| m.max(t)));
            }
            Err(_) => {
                rayleigh_holds = false;
                ineq3_holds = false;
            }
        }
    }
    let tau = f.degrees.as_ref().and_then(|d| tau_from_cartan(c, d).ok());
    let diagonal_bound_holds = square && max_diagonal <= f.defect_group_order;
    let trace_matches = trace == f.expected_trace;
    let passed = symmetric
        && diagonal_bound_holds
        && trace_matches
        && determinant_p_power
        && pd
        && rayleigh_holds
        && ineq3_holds
        && tau.is_none_or(|t| t <= tr && t < bound);
    FixtureOutcome {
        name: f.name.clone(),
        symmetric,
        max_diagonal,
        diagonal_bound: f.defect_group_order,
        diagonal_bound_holds,
        trace,
        trace_matches,
        determinant: det.to_string(),
        determinant_p_power,
        positive_definite: pd,
        tau,
        samples: FIXTURE_SAMPLES,
        rayleigh_holds,
        ineq3_bound,
        ineq3_holds,
        max_sampled_tau,
        passed,
    }
}

/// Stable per-name stream offset so fixtures draw independent samples.
fn name_hash(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

pub fn fixture_checks(fixtures: &[PublishedFixture], seed: u64) -> Vec<FixtureOutcome> {
    fixtures.iter().map(|f| check(f, seed)).collect()
}

impl FixtureOutcome {
    pub fn tau_display(&self) -> String {
        self.tau.as_ref().map_or_else(|| "-".into(), format_fraction)
    }
}
