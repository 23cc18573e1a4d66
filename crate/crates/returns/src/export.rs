use std::io::Write;

use ce_dynamics::OrbitRecord;

use crate::ReturnEvent;

/// Columns: n, kind, r, p, ell, alpha_n, gamma_n.
pub fn write_timeline_csv<W: Write>(
    events: &[ReturnEvent],
    orbit: &OrbitRecord,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "kind", "r", "p", "ell", "alpha_n", "gamma_n"])?;
    for e in events {
        w.write_record([
            e.n.to_string(),
            e.kind.label().to_string(),
            e.r.to_string(),
            e.p.to_string(),
            e.ell.to_string(),
            format!("{:e}", orbit.alpha[e.n]),
            format!("{:e}", orbit.gamma[e.n]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
