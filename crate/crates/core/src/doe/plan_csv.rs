use std::io::Write;

use super::RunPlan;

/// Leading columns of the plan export; one column per design factor follows,
/// in the order the factors are declared in the design.
pub const PLAN_CSV_FIXED_COLUMNS: [&str; 3] = ["run", "block", "replicate"];

/// Writes `plan` as CSV: header row, then one row per run in execution order.
/// The block cell is empty for unblocked designs.
pub fn write_plan_csv<W: Write>(plan: &RunPlan, out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = PLAN_CSV_FIXED_COLUMNS.to_vec();
    header.extend(plan.factor_names());
    writer.write_record(&header)?;
    for run in &plan.runs {
        let mut row = vec![run.run.to_string(), run.block.clone().unwrap_or_default(), run.replicate.to_string()];
        for factor in &plan.spec.factors {
            row.push(run.combination.get(&factor.name).map(|l| l.to_string()).unwrap_or_default());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
