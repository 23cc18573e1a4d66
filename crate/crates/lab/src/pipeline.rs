use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ce_density::outside_expansion_estimate;
use ce_dynamics::{critical_orbit, Complex64, FamilyParams};
use ce_exclusion::{
    run, write_ledger_csv, write_returns_csv, write_summary_json, InitialDeletion, RunConstants, RunOutput,
    StartupReport,
};
use serde::Serialize;

use crate::scenario::Scenario;
use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionEstimate {
    pub c_u: f64,
    pub gamma_h: f64,
    pub segments: usize,
    pub segment_length: usize,
}

/// `gamma_H` from segments of the anchor's own critical orbit, or `None`
/// when no segment qualifies.
pub fn measure_outside_expansion(sc: &Scenario) -> Result<Option<ExpansionEstimate>, LabError> {
    let params = FamilyParams::new(sc.d, sc.c0())?;
    let orbit = critical_orbit(&params, sc.gamma_h_pool + sc.gamma_h_segment)?;
    let starts: Vec<Complex64> = (1..=orbit.length().min(sc.gamma_h_pool)).map(|k| orbit.point(k)).collect();
    Ok(outside_expansion_estimate(&params, &sc.neighborhoods()?, &starts, sc.gamma_h_segment)
        .ok()
        .map(|e| ExpansionEstimate {
            c_u: e.c_u,
            gamma_h: e.gamma_h,
            segments: e.segments,
            segment_length: sc.gamma_h_segment,
        }))
}

pub struct RunArtifacts {
    pub scenario: Scenario,
    pub expansion: Option<ExpansionEstimate>,
    pub output: RunOutput,
}

pub fn run_scenario(sc: &Scenario) -> Result<RunArtifacts, LabError> {
    let expansion = measure_outside_expansion(sc)?;
    let cfg = sc.run_config(expansion.map_or(f64::NAN, |e| e.gamma_h))?;
    let output = run(&cfg)?;
    Ok(RunArtifacts { scenario: sc.clone(), expansion, output })
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a Scenario,
    outside_expansion: Option<ExpansionEstimate>,
    startup: &'a StartupReport,
    constants: Option<&'a RunConstants>,
    initial_deletion: Option<&'a InitialDeletion>,
    files: [&'static str; 7],
}

pub const RUN_FILES: [&str; 7] =
    ["manifest.json", "scenario.txt", "summary.json", "ledger.csv", "returns.csv", "leaves.csv", "q_checks.csv"];
pub const TREE_FILE: &str = "tree.jsonl";

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, LabError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes the run directory. Nothing in it depends on timing or thread count.
pub fn write_run_dir(a: &RunArtifacts, dir: &Path) -> Result<(), LabError> {
    fs::create_dir_all(dir)?;
    let out = &a.output;
    let manifest = Manifest {
        tool: "ce-lab",
        version: env!("CARGO_PKG_VERSION"),
        scenario: &a.scenario,
        outside_expansion: a.expansion,
        startup: &out.startup,
        constants: out.constants.as_ref(),
        initial_deletion: out.initial.as_ref(),
        files: RUN_FILES,
    };
    let mut w = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    create(dir, "scenario.txt")?.write_all(a.scenario.to_text().as_bytes())?;
    write_summary_json(&out.summary, create(dir, "summary.json")?)?;
    write_ledger_csv(&out.tree, create(dir, "ledger.csv")?)?;
    write_returns_csv(&out.returns, create(dir, "returns.csv")?)?;
    let mut leaves = csv::Writer::from_writer(create(dir, "leaves.csv")?);
    for l in &out.leaves {
        leaves.serialize(l)?;
    }
    leaves.flush()?;
    let mut q = csv::Writer::from_writer(create(dir, "q_checks.csv")?);
    for c in &out.q_checks {
        q.serialize(c)?;
    }
    q.flush()?;
    let mut t = create(dir, TREE_FILE)?;
    out.tree.write_jsonl(&mut t)?;
    t.flush()?;
    Ok(())
}
