//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use hcprop::geometry::Point;
use hcprop::tsplib::TspInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn berlin52() -> Arc<TspInstance> {
    Arc::new(TspInstance::read(data("berlin52.tsp")).expect("fixture parses"))
}

/// `n` points with integer coordinates in `[0, 100)`, from `seed`.
pub fn random_euclidean(seed: u64, n: usize) -> Arc<TspInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| Point::new(rng.gen_range(0..100) as f64, rng.gen_range(0..100) as f64))
        .collect();
    Arc::new(TspInstance::from_coords(format!("r{seed}-{n}"), coords))
}

fn dist(inst: &TspInstance, i: usize, j: usize) -> i64 {
    let (a, b) = (inst.point(i), inst.point(j));
    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
    (d + 0.5).floor() as i64
}

/// Held–Karp dynamic program over subsets.
pub fn held_karp(inst: &TspInstance) -> i64 {
    let n = inst.n();
    let full = 1usize << n;
    let mut dp = vec![vec![i64::MAX; n]; full];
    dp[1][0] = 0;
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        for j in 0..n {
            let cur = dp[mask][j];
            if cur == i64::MAX {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let c = cur + dist(inst, j, k);
                if c < dp[next][k] {
                    dp[next][k] = c;
                }
            }
        }
    }
    (1..n)
        .map(|j| dp[full - 1][j] + dist(inst, j, 0))
        .min()
        .unwrap()
}

/// Every Hamiltonian circuit as `(successors, cost)`, sorted.
pub fn all_circuits(inst: &TspInstance) -> Vec<(Vec<i64>, i64)> {
    let n = inst.n();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    permute(&mut rest, 0, &mut |perm| {
        let mut order = vec![0];
        order.extend_from_slice(perm);
        let mut succ = vec![0i64; n];
        let mut cost = 0;
        for k in 0..n {
            let (a, b) = (order[k], order[(k + 1) % n]);
            succ[a] = b as i64;
            cost += dist(inst, a, b);
        }
        out.push((succ, cost));
    });
    out.sort();
    out
}

fn permute(xs: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Minimum 1-tree rooted at `root` by trying every edge subset of the
/// right size on `V ∖ {root}` and every pair of root edges.
pub fn brute_min_one_tree(inst: &TspInstance, root: usize) -> i64 {
    let n = inst.n();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut edges = Vec::new();
    for a in 0..others.len() {
        for b in a + 1..others.len() {
            edges.push((others[a], others[b]));
        }
    }
    let need = others.len() - 1;
    let mut best_tree = i64::MAX;
    let mut pick = Vec::new();
    choose(&edges, need, 0, &mut pick, &mut |sel| {
        if spans(n, root, sel) {
            let w: i64 = sel.iter().map(|&(u, v)| dist(inst, u, v)).sum();
            best_tree = best_tree.min(w);
        }
    });
    let mut root_w: Vec<i64> = others.iter().map(|&v| dist(inst, root, v)).collect();
    root_w.sort();
    best_tree + root_w[0] + root_w[1]
}

fn choose(
    edges: &[(usize, usize)],
    k: usize,
    from: usize,
    pick: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    if pick.len() == k {
        f(pick);
        return;
    }
    if edges.len() - from < k - pick.len() {
        return;
    }
    for i in from..edges.len() {
        pick.push(edges[i]);
        choose(edges, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Whether `sel` connects every node except `root` (it has exactly
/// `n - 2` edges, so connected means spanning tree).
fn spans(n: usize, root: usize, sel: &[(usize, usize)]) -> bool {
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for &(u, v) in sel {
        let (a, b) = (find(&mut comp, u), find(&mut comp, v));
        if a == b {
            return false;
        }
        comp[a] = b;
    }
    let start = if root == 0 { 1 } else { 0 };
    let r = find(&mut comp, start);
    (0..n)
        .filter(|&v| v != root)
        .all(|v| find(&mut comp, v) == r)
}

/// Proper crossing of two segments by exact integer orientation tests.
pub fn brute_cross(a: (Point, Point), b: (Point, Point)) -> bool {
    fn orient(p: Point, q: Point, r: Point) -> i64 {
        let v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        (v > 0.0) as i64 - (v < 0.0) as i64
    }
    let (o1, o2) = (orient(a.0, a.1, b.0), orient(a.0, a.1, b.1));
    let (o3, o4) = (orient(b.0, b.1, a.0), orient(b.0, b.1, a.1));
    o1 * o2 < 0 && o3 * o4 < 0
}

/// The Luby sequence by its defining recurrence.
pub fn luby_reference(count: usize) -> Vec<u64> {
    fn at(i: u64) -> u64 {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if i == (1u64 << k) - 1 {
            1 << (k - 1)
        } else {
            at(i - (1u64 << (k - 1)) + 1)
        }
    }
    (1..=count as u64).map(at).collect()
}
