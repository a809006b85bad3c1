//! Joining numbers against exhaustive search over connected chamber sets.

use std::collections::BTreeSet;

use cellseq::{builtin, LevelCell, Tower};

/// Smallest connected set of level-`m` chambers whose closures meet `D_0`
/// cells with empty common intersection, by increasing size.
fn brute_force(t: &Tower, m: u32, max_size: usize) -> Option<usize> {
    let (chambers, adj) = t.chamber_graph(m).unwrap();
    let n = chambers.len();
    for size in 1..=max_size {
        // Connected sets with minimum element `root`, grown by extension sets.
        for root in 0..n {
            let mut stack = vec![(vec![root], adj[root].iter().map(|&x| x as usize).filter(|&x| x > root).collect::<BTreeSet<_>>())];
            while let Some((set, ext)) = stack.pop() {
                if set.len() == size {
                    let cells: Vec<LevelCell> = set.iter().map(|&i| chambers[i]).collect();
                    if joins(t, &cells) {
                        return Some(size);
                    }
                    continue;
                }
                let mut ext = ext;
                while let Some(&w) = ext.iter().next() {
                    ext.remove(&w);
                    let mut next_set = set.clone();
                    next_set.push(w);
                    let mut next_ext = ext.clone();
                    for &u in &adj[w] {
                        let u = u as usize;
                        if u > root && !set.contains(&u) && u != w && !is_neighbour(&adj, &set, u) {
                            next_ext.insert(u);
                        }
                    }
                    stack.push((next_set, next_ext));
                }
            }
        }
    }
    None
}

fn is_neighbour(adj: &[Vec<u32>], set: &[usize], u: usize) -> bool {
    set.iter().any(|&s| adj[s].contains(&(u as u32)))
}

/// Geometric check: `D_0` closed cells met by the set have no common point.
fn joins(t: &Tower, cells: &[LevelCell]) -> bool {
    let base = t.rule().base();
    let mut met = BTreeSet::new();
    for &c in cells {
        for f in t.closure(c).unwrap() {
            let b = t.ancestor(f, 0).unwrap();
            met.extend(base.star_ix(b.ix()));
        }
    }
    let mut common: Option<BTreeSet<usize>> = None;
    for c in met {
        let cl: BTreeSet<usize> = base.closure_ix(c).into_iter().collect();
        common = Some(match common {
            None => cl,
            Some(a) => a.intersection(&cl).copied().collect(),
        });
    }
    common.is_some_and(|s| s.is_empty())
}

#[test]
fn torus_joining_numbers_match_search() {
    let t = Tower::from_example(&builtin::torus_doubling(2).unwrap());
    for m in 0..=2 {
        let dp = t.joining_number(m, 64).unwrap();
        assert!(dp.verified);
        assert_eq!(dp.value, brute_force(&t, m, 5), "level {m}");
    }
}

#[test]
fn pillow_joining_numbers_match_search() {
    let t = Tower::from_example(&builtin::pillowcase());
    for m in 0..=2 {
        let dp = t.joining_number(m, 64).unwrap();
        assert!(dp.verified);
        assert_eq!(dp.value, brute_force(&t, m, 5), "level {m}");
    }
}
