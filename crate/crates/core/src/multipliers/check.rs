//! Oracle-based equivalence sweeps for multiplier netlists.

use crate::bits::BitVec;
use crate::netlist::{simulate_pipelined, Evaluator, Netlist, NetlistError};
use num_bigint::{BigInt, BigUint};
use num_traits::{Euclid, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// How many failing pairs a sweep keeps for reporting.
const KEPT_FAILURES: usize = 8;

/// The product a width-`n` multiplier must emit for operands `a` and `b`:
/// `a * b` over `2n` bits, with the operands read as two's complement when
/// `signed` is set. Signed products are reported as their `2n`-bit
/// pattern, which is also what the unsigned reading of the output shows.
pub fn reference_product(a: &BigUint, b: &BigUint, width: usize, signed: bool) -> BigUint {
    if signed {
        let modulus = BigInt::from(BigUint::one() << (2 * width));
        let half = BigUint::one() << (width - 1);
        let as_signed = |v: &BigUint| -> BigInt {
            if *v >= half {
                BigInt::from(v.clone()) - (BigInt::one() << width)
            } else {
                BigInt::from(v.clone())
            }
        };
        let prod = (as_signed(a) * as_signed(b)).rem_euclid(&modulus);
        prod.to_biguint().expect("rem_euclid is non-negative")
    } else {
        a * b
    }
}

/// Every operand pair of the given width, lexicographic.
pub fn exhaustive_pairs(width: usize) -> Vec<(BigUint, BigUint)> {
    assert!(width <= 8, "exhaustive sweeps are for small widths");
    let n = 1u64 << width;
    let mut pairs = Vec::with_capacity((n * n) as usize);
    for a in 0..n {
        for b in 0..n {
            pairs.push((BigUint::from(a), BigUint::from(b)));
        }
    }
    pairs
}

/// Uniform random operand pairs from a seeded generator, reproducible.
pub fn random_pairs(width: usize, count: usize, seed: u64) -> Vec<(BigUint, BigUint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> BigUint {
        let mut bytes = vec![0u8; (width + 7) / 8];
        rng.fill(bytes.as_mut_slice());
        let spare = bytes.len() * 8 - width;
        if spare > 0 {
            let last = bytes.last_mut().unwrap();
            *last &= 0xff >> spare;
        }
        BigUint::from_bytes_le(&bytes)
    };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

/// One operand pair the netlist got wrong.
#[derive(Clone, Debug)]
pub struct Failure {
    pub a: BigUint,
    pub b: BigUint,
    pub expected: BigUint,
    pub got: BigUint,
}

/// Tally of an equivalence sweep.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub total: u64,
    pub passed: u64,
    /// At most a handful of failing pairs, in encounter order.
    pub failures: Vec<Failure>,
}

impl SweepOutcome {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// Runs every pair through the netlist and compares against the exact
/// product. Combinational netlists are evaluated one pair at a time with
/// a reusable evaluator; pipelined ones are streamed, which also exercises
/// their latency behavior.
pub fn check_pairs(
    nl: &Netlist,
    pairs: &[(BigUint, BigUint)],
    signed: bool,
) -> Result<SweepOutcome, NetlistError> {
    let width = nl.input_bus("A").map(|b| b.width()).unwrap_or(0);
    let mut outcome = SweepOutcome { total: pairs.len() as u64, passed: 0, failures: Vec::new() };
    let tally = |a: &BigUint, b: &BigUint, got: BigUint, outcome: &mut SweepOutcome| {
        let expected = reference_product(a, b, width, signed);
        if got == expected {
            outcome.passed += 1;
        } else if outcome.failures.len() < KEPT_FAILURES {
            outcome.failures.push(Failure { a: a.clone(), b: b.clone(), expected, got });
        }
    };

    if nl.is_combinational() {
        let mut ev = Evaluator::new(nl)?;
        for (a, b) in pairs {
            ev.set_input(0, &BitVec::from_biguint(a, width).expect("operand fits"));
            ev.set_input(1, &BitVec::from_biguint(b, width).expect("operand fits"));
            ev.run();
            tally(a, b, ev.output(0).to_biguint(), &mut outcome);
        }
    } else {
        let stream: Vec<BTreeMap<String, BitVec>> = pairs
            .iter()
            .map(|(a, b)| {
                BTreeMap::from([
                    ("A".to_string(), BitVec::from_biguint(a, width).expect("operand fits")),
                    ("B".to_string(), BitVec::from_biguint(b, width).expect("operand fits")),
                ])
            })
            .collect();
        let run = simulate_pipelined(nl, &stream)?;
        for ((a, b), outputs) in pairs.iter().zip(&run.outputs) {
            tally(a, b, outputs["P"].to_biguint(), &mut outcome);
        }
    }
    Ok(outcome)
}
