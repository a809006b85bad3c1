//! The pillowcase quotient metric against graph geodesics on a fine net.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use cellseq::{builtin, Model};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn quotient_distance_matches_net_geodesics() {
    let ex = builtin::pillowcase();
    let model = ex.realization.unwrap().model;
    let Model::Pillowcase { side } = model else {
        panic!("pillowcase model expected")
    };
    let period = 2.0 * side;
    let k: i64 = 32;
    let n = (period * k as f64) as i64;
    let delta = 1.0 / k as f64;
    let canon = |p: (i64, i64)| {
        let a = (p.0.rem_euclid(n), p.1.rem_euclid(n));
        let b = ((-p.0).rem_euclid(n), (-p.1).rem_euclid(n));
        a.min(b)
    };
    let mut nodes: Vec<(i64, i64)> = (0..n).flat_map(|i| (0..n).map(move |j| canon((i, j)))).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let index: HashMap<(i64, i64), usize> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let steps: Vec<(i64, i64)> = (-5..=5i64)
        .flat_map(|a| (-5..=5i64).map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0) && gcd(a, b) == 1)
        .collect();

    for source in [(0, 0), (5, 9), (16, 16), (40, 3)] {
        let s = index[&canon(source)];
        let mut dist = vec![f64::INFINITY; nodes.len()];
        dist[s] = 0.0;
        let mut heap = BinaryHeap::from([(Reverse(0u64), s)]);
        while let Some((Reverse(dk), u)) = heap.pop() {
            let du = f64::from_bits(dk);
            if du > dist[u] {
                continue;
            }
            let p = nodes[u];
            for &(a, b) in &steps {
                let v = index[&canon((p.0 + a, p.1 + b))];
                let nd = du + delta * ((a * a + b * b) as f64).sqrt();
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push((Reverse(nd.to_bits()), v));
                }
            }
        }
        let x = [source.0 as f64 * delta, source.1 as f64 * delta];
        for (i, &p) in nodes.iter().enumerate() {
            let exact = model.dist(&x, &[p.0 as f64 * delta, p.1 as f64 * delta]);
            if exact > 8.0 * delta {
                let rel = (dist[i] - exact) / exact;
                assert!((-1e-9..0.02).contains(&rel), "{source:?} -> {p:?}: net {} exact {exact}", dist[i]);
            }
        }
    }
}
