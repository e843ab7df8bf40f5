mod common;

use std::sync::Arc;

use hcprop::branching::WarnsdorffBrancher;
use hcprop::circuit::CircuitModel;
use hcprop::kernel::{
    enumerate_solutions, propagate, Asset, Fixpoint, PropagationStats, PropagatorSet,
    RestartPolicy, Schedule, Space,
};
use proptest::prelude::*;

fn enumerate(model: &CircuitModel) -> Vec<(Vec<i64>, i64)> {
    let asset = Asset::new(
        "standard",
        model.standard_propagators(),
        Arc::new(WarnsdorffBrancher::new(model, 0, 0.0)),
    )
    .with_restarts(RestartPolicy::Never);
    let res = enumerate_solutions(asset, Arc::new(model.problem()));
    assert!(res.exhausted);
    let n = model.n();
    let mut out: Vec<(Vec<i64>, i64)> = res
        .solutions
        .iter()
        .map(|s| (s.values[..n].to_vec(), s.values[2 * n]))
        .collect();
    out.sort();
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 3..=7 {
        let inst = common::random_euclidean(40 + n as u64, n);
        let model = CircuitModel::new(inst.clone()).unwrap();
        assert_eq!(enumerate(&model), common::all_circuits(&inst), "n = {n}");
    }
}

#[test]
fn three_cities_have_two_directed_tours() {
    let inst = common::random_euclidean(3, 3);
    let model = CircuitModel::new(inst).unwrap();
    assert_eq!(enumerate(&model).len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Fixing a few successors of some circuit and propagating never
    /// removes an arc of a circuit that agrees with those successors.
    #[test]
    fn standard_filtering_keeps_consistent_circuits(seed in 0u64..5000, n in 4usize..8, fix in 1usize..4) {
        let inst = common::random_euclidean(seed, n);
        let model = CircuitModel::new(inst.clone()).unwrap();
        let circuits = common::all_circuits(&inst);
        let (target, _) = &circuits[(seed as usize) % circuits.len()];
        let fixed: Vec<usize> = (0..n).filter(|i| (i * 7 + seed as usize) % n < fix).collect();

        let set = PropagatorSet::new(model.num_vars(), model.standard_propagators());
        let mut root = model.root_store();
        for &i in &fixed {
            root.assign(model.succ(i), target[i]).unwrap();
        }
        let mut space = Space::new(root, &set);
        let fp = propagate(&mut space, &set, Schedule::All, &mut PropagationStats::default());
        prop_assert_eq!(fp, Fixpoint::Stable);
        for (succ, cost) in &circuits {
            if fixed.iter().all(|&i| succ[i] == target[i]) {
                for i in 0..n {
                    prop_assert!(space.store.contains(model.succ(i), succ[i]));
                    prop_assert!(space.store.contains(model.pred(succ[i] as usize), i as i64));
                }
                prop_assert!(space.store.contains(model.cost(), *cost));
            }
        }
    }
}
