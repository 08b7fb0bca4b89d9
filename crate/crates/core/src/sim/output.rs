use std::io::{self, Write};

use super::sweep::ErrorRateCurve;

pub const CSV_HEADER: &str = "scenario,decoder,snr_db,trials,errors,pe,ci95_half";

/// Writes curves one row per (decoder, SNR point), in curve order.
pub fn write_csv<W: Write>(mut w: W, curves: &[ErrorRateCurve]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in curves {
        for p in &c.points {
            writeln!(
                w,
                "{},{},{},{},{},{:.6e},{:.6e}",
                c.scenario, c.decoder, p.snr_db, p.trials, p.errors, p.pe, p.ci95_half
            )?;
        }
    }
    Ok(())
}
