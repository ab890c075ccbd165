//! Reconstruction with the cell grid spread over a thread pool.

use ecu_core::audit::{recover_dtilde, AuditError, AuditGrids, PreferenceOracle, Reconstruction, ReconstructionPlan};
use rayon::prelude::*;

/// Same result as [`ecu_core::audit::reconstruct_ecu`], cell for cell.
pub fn reconstruct_ecu<O: PreferenceOracle + Sync + ?Sized>(oracle: &O, grids: &AuditGrids) -> Result<Reconstruction, AuditError> {
    grids.validate()?;
    let dtilde = recover_dtilde(oracle, &grids.x_grid, &grids.alpha_grid, grids.tol)?;
    let plan = ReconstructionPlan::new(oracle.space(), dtilde, grids);
    let values = (0..plan.len()).into_par_iter().map(|i| plan.cell(oracle, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(Reconstruction { dtilde, model: plan.finish(values)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ecu_core::reference;

    #[test]
    fn matches_sequential_reconstruction() {
        let m = reference::betweenness_violation(reference::Reading::AsComputed);
        let grids = AuditGrids::uniform(m.space, 5.0, 20, 1e-9);
        let seq = ecu_core::audit::reconstruct_ecu(&m, &grids).unwrap();
        assert_eq!(reconstruct_ecu(&m, &grids).unwrap(), seq);
    }
}
