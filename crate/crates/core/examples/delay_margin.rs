//! Brackets the lumped delay at which a scenario stops being stable.
//!
//! cargo run --release --example delay_margin -- [preset] [lo_s] [hi_s]

use posture_core::batch::bisect_lumped_delay;
use posture_core::config::preset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("fig3", String::as_str);
    let lo: f64 = args.get(1).map_or(Ok(0.18), |s| s.parse())?;
    let hi: f64 = args.get(2).map_or(Ok(0.40), |s| s.parse())?;
    let config = preset(name)?;
    let bracket = bisect_lumped_delay(&config, lo, hi, 0.002, 8)?;
    println!(
        "{name}: stable at {:.1} ms, unstable at {:.1} ms",
        bracket.stable * 1e3,
        bracket.unstable * 1e3
    );
    Ok(())
}
