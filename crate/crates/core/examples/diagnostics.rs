//! Quasi-visual constants, the BQS envelope, CXC axioms and the QS modulus.

use cellseq::{builtin, Tower, VisualMetricConfig};

pub fn run() -> cellseq::Result<()> {
    let t = Tower::from_example(&builtin::torus_doubling(2)?);
    let qv = t.qv_constants(3, 3)?;
    println!("alpha {:?} lambda_sep {:?} mu {}", qv.alpha, qv.lambda_sep, qv.mu);
    let bqs = t.bqs_envelope(1..=3, 0)?;
    println!("eta(t)/t in [{}, {}]", bqs.min_eta_over_t, bqs.max_eta_over_t);
    let cxc = t.cxc_report(3)?;
    println!("theta {} K {} deg {}", cxc.theta, cxc.k, cxc.deg_max);
    let cfg = VisualMetricConfig::vertices(&t, 2.0, 1.0, 4)?;
    let rep = t.chain_metric(&cfg)?;
    let qs = t.qs_identity_modulus(&rep, &cfg, 32)?;
    println!("QS modulus: theta(t) <= {} t over {} triples", qs.linear_slope, qs.triples);

    let id = Tower::from_example(&builtin::identity_rule());
    println!("identity expanding: {}", id.cxc_report(2)?.expanding);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
