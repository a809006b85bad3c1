//! Chain metric `rho` from the quasi-distance `2^{-m(x,y)}` and its cell bounds.

use cellseq::visual::checkerboard_sample;
use cellseq::{builtin, Tower, VisualMetricConfig};

pub fn run() -> cellseq::Result<()> {
    let t = Tower::from_example(&builtin::torus_doubling(2)?);
    for depth in [3, 4, 5] {
        let cfg = VisualMetricConfig::vertices(&t, 2.0, 1.0, depth)?;
        let r = t.chain_metric(&cfg)?;
        println!(
            "depth {depth}: {} points, C_meas = {}, metric = {}, rho/flat in {:?}",
            r.len(),
            r.c_meas,
            r.check.ok(),
            r.flat_ratio
        );
    }
    let cfg = VisualMetricConfig::new(2.0, 1.0, 5, checkerboard_sample(&t, 3, 5)?)?;
    let r = t.chain_metric(&cfg)?;
    let table = t.cell_metric_report(&r, &cfg, 3)?;
    for row in &table.rows {
        println!("level {}: diam*2^m in [{}, {}]", row.level, row.min_diam_scaled, row.max_diam_scaled);
    }
    println!("C' = {:?}", table.c_prime);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
