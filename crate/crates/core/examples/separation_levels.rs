//! Separation levels `m(x, y)`, the hyperbolicity constant and the iteration bound.

use cellseq::{builtin, Tower};

pub fn run() -> cellseq::Result<()> {
    let t = Tower::from_example(&builtin::torus_doubling(2)?);
    let x = t.locate(&[0.0, 0.0], 6)?;
    let y = t.locate(&[1.0, 0.0], 6)?;
    println!("m(x, y) = {:?}", t.separation_level(&x, &y)?);
    let h = t.hyperbolicity_constants(4)?;
    println!("k0 = {} over {} points, iteration ok = {}", h.k0, h.points, h.iteration_ok);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
