//! Many-points regime: as n doubles, the uniformity diagnostics of optimized
//! configurations shrink (each step allowed 10% slack).

use etflab::optimize::{minimize, ConfigOrPair, Objective, OptParams};
use etflab::sphere::sample_uniform;
use etflab::uniformity::uniformity_report;

#[test]
fn diagnostics_shrink_as_n_doubles() {
    let mut previous: Option<Vec<f64>> = None;
    for n in [50usize, 100, 200, 400] {
        let init = sample_uniform::<f64>(n, 3, 1234).unwrap();
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
        params.max_iters = 600;
        params.seed = 1234;
        let result = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        let report = uniformity_report(result.best.as_single().unwrap(), 4).unwrap();

        let mut diagnostics = vec![report.mean_resultant, report.frame_ratio - 1.0];
        diagnostics.extend(report.moments.iter().map(|&(_, v)| v));
        if let Some(prev) = &previous {
            for (i, (cur, old)) in diagnostics.iter().zip(prev).enumerate() {
                assert!(
                    *cur <= 1.1 * old,
                    "diagnostic {i} grew from {old:.3e} to {cur:.3e} at n={n}"
                );
            }
        }
        previous = Some(diagnostics);
    }
}
