//! Validate the built-in rules, then break one and watch the report name the cell.

use cellseq::json::{rule_file, rule_from_str};
use cellseq::{builtin, CellId};

pub fn run() -> cellseq::Result<()> {
    for name in ["torus2", "torus3", "pillow"] {
        let ex = name.parse::<cellseq::ExampleSpec>()?.build()?;
        let mut report = ex.rule.validate();
        if let Some(r) = &ex.realization {
            report.merge(r.validate(&ex.rule));
        }
        println!("{name}: ok={} degree={}", report.ok, ex.rule.degree()?);
    }

    // Send a refined edge to a base vertex.
    let ex = builtin::torus_doubling(2)?;
    let mut file = rule_file(&ex);
    let edge = CellId::new("e(0+,0)");
    file.image.insert(edge, CellId::new("v(0,0)"));
    let broken = rule_from_str(&serde_json::to_string(&file)?)?;
    let report = broken.rule.validate();
    for v in report.violations.iter().take(3) {
        println!("{:?} {:?}: {}", v.check, v.cells, v.detail);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
