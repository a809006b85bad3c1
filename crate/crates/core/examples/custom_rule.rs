//! Round-trip a rule through JSON and run the tower on the loaded copy.

use cellseq::{builtin, json, Tower};

pub fn run() -> cellseq::Result<()> {
    let text = json::rule_to_string(&builtin::pillowcase())?;
    let dir = std::env::temp_dir().join("cellseq-custom-rule");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("pillow.json");
    std::fs::write(&path, &text)?;

    let ex = builtin::load_rule(&path)?;
    println!("loaded {} cells, valid = {}", ex.rule.refined().len(), ex.rule.validate().ok);
    let t = Tower::from_example(&ex);
    println!("level 3 chambers: {}", t.chamber_count(3)?);

    let truncated = &text[..text.len() / 2];
    match json::rule_from_str(truncated) {
        Err(e) => println!("truncated file: {e}"),
        Ok(_) => println!("truncated file unexpectedly parsed"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cellseq::Result<()> {
    run()
}
