#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relctl::election::{Election, VoterOrder};

pub const RUNNING: &str = include_str!("../../data/running_example.txt");

pub fn running() -> Election {
    Election::parse(RUNNING).unwrap()
}

pub fn names(m: usize) -> Vec<String> {
    (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Random profile; with `ties`, roughly a quarter of the ballots merge
/// neighbouring alternatives into one tier.
pub fn random_election(rng: &mut impl Rng, n: usize, m: usize, ties: bool) -> Election {
    let voters = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            if ties && m > 1 && rng.gen_bool(0.25) {
                let mut tiers: Vec<Vec<usize>> = vec![vec![order[0]]];
                for &a in &order[1..] {
                    if rng.gen_bool(0.4) {
                        tiers.last_mut().unwrap().push(a);
                    } else {
                        tiers.push(vec![a]);
                    }
                }
                VoterOrder::from_tiers(tiers, m)
            } else {
                VoterOrder::linear(&order)
            }
        })
        .collect();
    Election::new(names(m), voters)
}

/// The fixed family of small elections used across test files.
pub fn small_elections(seed: u64, count: usize, max_n: usize, max_m: usize) -> Vec<Election> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_n);
            let m = rng.gen_range(1..=max_m);
            random_election(&mut rng, n, m, false)
        })
        .collect()
}
