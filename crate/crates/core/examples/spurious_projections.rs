// Unstressed projections of four books under the same parameters.
//
// Only the book that is already close to the TTC portfolio has a flat PD
// path. Charts go to `$TMPDIR/ttc-stress-examples`.
//
// `cargo run --example spurious_projections`

use std::fs;

use ttc_stress::io::{emit_path_csv, emit_svg_chart};
use ttc_stress::{detect_spurious_dynamics, project_zero_stress, sample, Result, SpuriousReport};

pub fn run_example() -> Result<Vec<(&'static str, SpuriousReport)>> {
    let t = sample::agency_matrix();
    let o = sample::agency_origination();
    let dir = std::env::temp_dir().join("ttc-stress-examples");
    fs::create_dir_all(&dir)?;

    let books = [
        ("mid_grades", sample::portfolio_mid_grades()),
        ("barbell", sample::portfolio_barbell()),
        ("sub_investment", sample::portfolio_sub_investment()),
        ("seasoned", sample::portfolio_seasoned()),
    ];
    let mut out = Vec::new();
    for (name, w) in books {
        let path = project_zero_stress(&w, &t, &o, 50)?;
        let r = detect_spurious_dynamics(&path, 0.05)?;
        println!(
            "{name:<15} start {:.3}%  min {:.3}% (t={:>2})  max {:.3}% (t={:>2})  end {:.3}%  {}",
            100.0 * r.pds[0],
            100.0 * r.min_pd,
            r.min_period,
            100.0 * r.max_pd,
            r.max_period,
            100.0 * r.terminal_pd,
            r.classification
        );
        fs::write(dir.join(format!("{name}.csv")), emit_path_csv(&path))?;
        fs::write(
            dir.join(format!("{name}.svg")),
            emit_svg_chart(&path, &format!("Average PD, {name} book")),
        )?;
        out.push((name, r));
    }
    println!("charts in {}", dir.display());
    Ok(out)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
