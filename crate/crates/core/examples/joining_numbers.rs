//! Fewest chambers of `D_m` joining opposite sides of `D_0`.

use cellseq::{builtin, Tower};

pub fn run() -> cellseq::Result<()> {
    let t = Tower::from_example(&builtin::torus_doubling(2)?);
    let summary = t.joining_numbers(3, 64)?;
    for r in &summary.reports {
        println!("J(D{}, D0) = {:?} verified={}", r.level, r.value, r.verified);
    }
    println!("monotone: {}", summary.monotone);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
