//! Boxes, meshes, markings and Lebesgue numbers under the flat realization.

use cellseq::geometry::Cover;
use cellseq::{builtin, Tower};

pub fn run() -> cellseq::Result<()> {
    let t = Tower::from_example(&builtin::pillowcase());
    let e = t.expansion_check(4)?;
    println!("mesh {:?}", e.mesh);
    println!("rate {} expanding {}", e.fitted_rate, e.expanding);
    let marking = t.make_marking(3, None)?;
    println!("marking error {}", t.marking_error(&marking)?);
    let leb = t.lebesgue_number(Cover::Flowers(1))?;
    println!("Lebesgue number of level-1 flowers ~ {} (spacing {})", leb.value, leb.sample_spacing);
    let a = t.locate(&[0.3, 0.7], 4)?;
    println!("carrier of (0.3, 0.7): {} box {:?}", t.address(a.carrier)?, t.geom_of(a.carrier)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
