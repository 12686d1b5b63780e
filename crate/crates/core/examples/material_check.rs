//! Hinge strain screen: strain budgets and Mooney-Rivlin stress for the
//! bundled flexible resins.
//!
//! cargo run --example material_check [-- STRAIN_PCT SAFETY_FACTOR]

use armwing::analysis::{mooney_rivlin_uniaxial, strain_budget_check, MaterialDb};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let strain: f64 = args.next().map_or(Ok(43.0), |s| s.parse())?;
    let sf: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;

    let db = MaterialDb::load_default()?;
    for name in db.names() {
        let mat = db.get(name)?;
        let b = strain_budget_check(strain, mat, sf)?;
        let verdict = if b.pass { "pass" } else { "FAIL" };
        println!(
            "{name}: {verdict} ({:.1}% demand vs {:.1}% minimum break, margin {:+.1})",
            b.demand_pct, b.limit_pct, b.margin_pct
        );
        if mat.mooney_rivlin.is_some() {
            let lambda = 1.0 + strain / 100.0;
            println!("  uniaxial stress at stretch {lambda:.3}: {:.4} MPa", mooney_rivlin_uniaxial(lambda, mat)?);
        }
    }
    Ok(())
}
