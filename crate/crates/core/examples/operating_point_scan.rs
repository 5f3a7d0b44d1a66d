//! Scans the operating point `(f, detuning)` against the reference ratios
//! in `data/platforms.csv`.
//!
//! cargo run -p drivenjc --example operating_point_scan > crates/core/data/operating_point_scan.txt

use std::path::Path;

use drivenjc::feasibility::{load_platforms, operating_point_scan, row_at, OperatingDetuning};

fn main() -> drivenjc::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/platforms.csv");
    let platforms = load_platforms(&path)?;
    let omega_over_g = 20.0;
    let coarse: Vec<f64> = (2..=9).map(|k| k as f64 * 0.05).collect();
    println!("omega/g = {omega_over_g}");
    println!("{:>6} {:>9} {:>7} {:>7}", "f", "detuning", "matched", "worst");
    for r in operating_point_scan(&platforms, omega_over_g, &coarse)? {
        println!("{:>6.3} {:>9?} {:>4}/{:<2} {:>7.3}", r.f, r.detuning, r.matches, r.total, r.worst);
    }

    println!();
    println!("fine scan, optimal detuning");
    let fine: Vec<f64> = (0..=40).map(|k| 0.24 + k as f64 * 0.0005).collect();
    for r in operating_point_scan(&platforms, omega_over_g, &fine)?
        .into_iter()
        .filter(|r| r.detuning == OperatingDetuning::Optimal)
    {
        println!("{:>7.4} {:>4}/{:<2} {:>7.3}", r.f, r.matches, r.total, r.worst);
    }

    println!();
    println!("rows at f = 0.25, optimal detuning");
    for p in &platforms {
        let row = row_at(p, omega_over_g, 0.25, OperatingDetuning::Optimal)?;
        let reference = p.reference.map(|r| format!("{r:?}")).unwrap_or_default();
        println!(
            "{:<18} ({:.4}, {:.4}, {:.5})  reference {reference}",
            p.name, row[0], row[1], row[2]
        );
    }
    Ok(())
}
