//! Chamber counts of the tower `D_m` grow like `deg^m`.

use cellseq::{builtin, Tower};

pub fn run() -> cellseq::Result<()> {
    for ex in [builtin::torus_doubling(2)?, builtin::pillowcase()] {
        let t = Tower::from_example(&ex);
        let deg = ex.rule.degree()? as u64;
        for m in 0..=6 {
            let n = t.chamber_count(m)?;
            println!("{} m={m} chambers={n} deg^m*|D0|={}", ex.name, deg.pow(m) * t.chamber_count(0)?);
        }
        let x = t.chambers_at_level(3)?[5];
        println!("address of {x}: {}", t.address(x)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
