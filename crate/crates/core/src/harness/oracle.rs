use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{check_solution, CircuitModel};
use crate::geometry::Point;
use crate::halfcheck::{build_propagator, HalfCheckConfig, PropKind};
use crate::kernel::{
    propagate, Fixpoint, PropRef, PropagationStats, PropagatorSet, Schedule, Space, VarId,
};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, Serialize)]
pub struct OracleConfig {
    pub trials: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            min_n: 5,
            max_n: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    pub propagator: String,
    pub trials: usize,
    /// Full assignments accepted at a fixpoint that pass the checker.
    pub accepted_valid: usize,
    /// Full assignments accepted at a fixpoint that the checker refutes.
    pub accepted_invalid: usize,
    /// Trials where propagation failed or removed the target.
    pub rejected: usize,
    /// Seeds reproducing each violation.
    pub violations: Vec<u64>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.accepted_invalid == 0
    }
}

/// `n` random points on a 50 x 50 integer grid.
pub fn random_instance(rng: &mut impl Rng, n: usize) -> TspInstance {
    let coords = (0..n)
        .map(|_| Point::new(rng.gen_range(0..=50) as f64, rng.gen_range(0..=50) as f64))
        .collect();
    TspInstance::from_coords(format!("rand{n}"), coords)
}

/// A target full assignment of `S` and `c`: a random circuit with its
/// weight, a random circuit with a wrong weight, or an arbitrary successor
/// function.
fn random_target(rng: &mut impl Rng, inst: &TspInstance) -> (Vec<i64>, i64) {
    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut succ = vec![0i64; n];
    for k in 0..n {
        succ[order[k]] = order[(k + 1) % n] as i64;
    }
    let weight = inst.tour_weight(&order);
    match rng.gen_range(0..4) {
        0 | 1 => (succ, weight),
        2 => (succ, (weight + rng.gen_range(-5..=5)).max(0)),
        _ => {
            let succ = (0..n)
                .map(|i| {
                    let v = rng.gen_range(0..n - 1);
                    (if v >= i { v + 1 } else { v }) as i64
                })
                .collect();
            (succ, weight)
        }
    }
}

enum Trial {
    Rejected,
    Accepted(Vec<i64>),
}

/// Shrink the domains of `S` and `c` towards a target, propagating now and
/// then, until everything is assigned or propagation gives up.
fn run_trial(model: &CircuitModel, props: Vec<PropRef>, rng: &mut ChaCha8Rng) -> Trial {
    let n = model.n();
    let (succ, cost) = random_target(rng, model.instance());
    let set = PropagatorSet::new(model.num_vars(), props);
    let mut space = Space::new(model.root_store(), &set);
    let mut stats = PropagationStats::default();
    if propagate(&mut space, &set, Schedule::All, &mut stats) == Fixpoint::Failed {
        return Trial::Rejected;
    }
    let mut vars: Vec<VarId> = model.succ_vars();
    vars.push(model.cost());
    let target = |x: VarId| if x.index() < n { succ[x.index()] } else { cost };
    loop {
        let open: Vec<VarId> = vars
            .iter()
            .copied()
            .filter(|&x| !space.store.is_assigned(x))
            .collect();
        let Some(&x) = open.choose(rng) else {
            break;
        };
        let t = target(x);
        if !space.store.contains(x, t) {
            return Trial::Rejected;
        }
        let store = &mut space.store;
        if x == model.cost() {
            let (lo, hi) = (store.min(x), store.max(x));
            let _ = store.set_min(x, lo + (t - lo + 1) / 2);
            let _ = store.set_max(x, hi - (hi - t + 1) / 2);
        } else {
            let others: Vec<i64> = store.domain(x).values().filter(|&v| v != t).collect();
            let keep_one = others.choose(rng).copied();
            for v in others {
                if Some(v) != keep_one || rng.gen_bool(0.5) {
                    let _ = store.remove(x, v);
                }
            }
        }
        let all = vars.iter().all(|&y| space.store.is_assigned(y));
        if (all || rng.gen_bool(0.5))
            && propagate(&mut space, &set, Schedule::Touched, &mut stats) == Fixpoint::Failed
        {
            return Trial::Rejected;
        }
    }
    // Run everything once more on the full assignment before accepting.
    if propagate(&mut space, &set, Schedule::All, &mut stats) == Fixpoint::Failed {
        return Trial::Rejected;
    }
    let mut values: Vec<i64> = (0..n)
        .map(|i| space.store.value(model.succ(i)).unwrap())
        .collect();
    values.push(space.store.value(model.cost()).unwrap());
    Trial::Accepted(values)
}

/// Randomized check that fully assigned stores accepted by `factory`'s
/// propagators satisfy cost-circuit.
pub fn hc_oracle_suite(
    name: &str,
    factory: &dyn Fn(&CircuitModel, u64) -> Vec<PropRef>,
    cfg: &OracleConfig,
) -> OracleReport {
    let mut report = OracleReport {
        propagator: name.to_string(),
        ..OracleReport::default()
    };
    for t in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(t as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(cfg.min_n..=cfg.max_n);
        let inst = Arc::new(random_instance(&mut rng, n));
        let model =
            CircuitModel::new(inst.clone()).expect("oracle instances have at least 3 nodes");
        report.trials += 1;
        match run_trial(&model, factory(&model, seed), &mut rng) {
            Trial::Rejected => report.rejected += 1,
            Trial::Accepted(values) if check_solution(&inst, &values) => report.accepted_valid += 1,
            Trial::Accepted(_) => {
                report.accepted_invalid += 1;
                report.violations.push(seed);
            }
        }
    }
    report
}

/// The oracle for one half-checking propagator on its own.
pub fn oracle_for(kind: PropKind, cfg: &OracleConfig) -> OracleReport {
    let factory = move |model: &CircuitModel, seed: u64| {
        let hc = HalfCheckConfig {
            seed,
            ..HalfCheckConfig::default()
        };
        vec![build_propagator(kind, model, &hc).expect("oracle instances are small")]
    };
    hc_oracle_suite(kind.name(), &factory, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fail_accepts_nothing() {
        let r = oracle_for(
            PropKind::Fail,
            &OracleConfig {
                trials: 50,
                ..OracleConfig::default()
            },
        );
        assert_eq!(r.rejected, 50);
        assert!(r.passed());
    }

    #[test]
    fn standard_model_passes() {
        let r = hc_oracle_suite(
            "standard",
            &|m: &CircuitModel, _| m.standard_propagators(),
            &OracleConfig {
                trials: 200,
                min_n: 4,
                max_n: 7,
                seed: 9,
            },
        );
        assert!(r.passed(), "{r:?}");
        assert!(r.accepted_valid > 0);
    }

    #[test]
    fn empty_propagator_set_is_caught() {
        // Without any propagation arbitrary successor functions slip through.
        let r = hc_oracle_suite(
            "none",
            &|_: &CircuitModel, _| Vec::new(),
            &OracleConfig {
                trials: 100,
                ..OracleConfig::default()
            },
        );
        assert!(!r.passed());
    }
}
