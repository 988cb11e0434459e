// PIT matrices for a range of economy states.
//
// `cargo run --example stress_matrix`

use ttc_stress::{sample, AssetCorrelation, EconomyState, Result};

const GRADES: [&str; 8] = ["AAA", "AA", "A", "BBB", "BB", "B", "CCC", "D"];

pub fn run_example() -> Result<Vec<f64>> {
    let t = sample::agency_matrix();
    let rho = AssetCorrelation::new(0.10)?;

    println!("default column of T(z), rho = 0.10");
    print!("{:>6}", "z");
    for g in &GRADES[..7] {
        print!("{g:>9}");
    }
    println!();
    let mut bbb = Vec::new();
    for z in [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0] {
        let s = t.stressed(rho, EconomyState::new(z)?);
        print!("{z:>6.1}");
        for p in &s.default_column()[..7] {
            print!("{:>8.3}%", 100.0 * p);
        }
        println!();
        bbb.push(s.get(3, 7));
    }

    let severe = t.stressed(rho, EconomyState::new(-2.0)?);
    println!("\nBBB row at z = -2.0:");
    for (g, p) in GRADES.iter().zip(severe.row(3)) {
        println!("  {g:<4}{p:.6}");
    }
    Ok(bbb)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
