//! Flower invariance, the ffi table and local multiplicities.

use cellseq::{builtin, Tower};

pub fn run() -> cellseq::Result<()> {
    let ex = builtin::pillowcase();
    let mult = ex.rule.multiplicity_table();
    println!("max multiplicity {} inequality {}", mult.max(), mult.inequality_holds());
    for v in mult.vertices.iter().filter(|v| v.multiplicity > 1) {
        println!("  {} i={} N1={} N0={}", v.vertex.as_str(), v.multiplicity, v.n_refined, v.n_base);
    }
    let t = Tower::from_example(&ex);
    for m in 1..=4 {
        let r = t.check_flower_invariance(m)?;
        println!("level {m}: {} vertices, invariant={}", r.vertices, r.ok());
    }
    for row in t.ffi_report(5)? {
        println!("ffi level {} -> {}", row.level, row.max_vertex_chambers);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
