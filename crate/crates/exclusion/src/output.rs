use std::io::Write;

use ce_partition::PartitionTree;

use crate::engine::{ReturnRecord, SquareRecord};
use crate::Summary;

/// One row per (leaf, free return): leaf_id, nu, alpha_tilde, gamma_under,
/// deleted_fraction, status. Leaves are numbered in tree leaf order.
pub fn write_ledger_csv<W: Write>(tree: &PartitionTree<SquareRecord>, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["leaf_id", "nu", "alpha_tilde", "gamma_under", "deleted_fraction", "status"])?;
    for (id, i) in tree.leaves().into_iter().enumerate() {
        let node = tree.node(i);
        let l = &node.ledger.ledger;
        for j in 0..l.nu.len() {
            let del = l
                .deleted_fraction_at
                .iter()
                .rev()
                .find(|(t, _)| *t == l.nu[j])
                .map_or(String::new(), |(_, f)| f.to_string());
            out.write_record([
                id.to_string(),
                l.nu[j].to_string(),
                l.alpha_tilde[j].to_string(),
                l.gamma_under[j].to_string(),
                del,
                node.status().label().to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_returns_csv<W: Write>(returns: &[ReturnRecord], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in returns {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary_json<W: Write>(summary: &Summary, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)
}
