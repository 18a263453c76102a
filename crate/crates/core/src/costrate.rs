//! Information-cost rates for postselection-free and postselected experiments.

use crate::error::{Error, Result};

/// Per-trial experiment costs. The trial count N cancels out of both rates
/// and is kept only for bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct CostModel {
    pub c_prepare: f64,
    pub c_measure: f64,
    pub c_postselect: f64,
    pub trials: u64,
}

impl CostModel {
    pub fn new(c_prepare: f64, c_measure: f64, c_postselect: f64, trials: u64) -> Result<Self> {
        if !(c_prepare > 0.0) || !c_prepare.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "preparation cost must be positive, got {c_prepare}"
            )));
        }
        if !(c_measure > 0.0) || !c_measure.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "measurement cost must be positive, got {c_measure}"
            )));
        }
        if !(c_postselect >= 0.0) || !c_postselect.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "postselection cost must be nonnegative, got {c_postselect}"
            )));
        }
        if trials < 1 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(CostModel {
            c_prepare,
            c_measure,
            c_postselect,
            trials,
        })
    }
}

/// Information-cost rate of a postselection-free experiment:
/// N·I/(N·C_P + N·C_M) = I/(C_P + C_M).
pub fn rate(fisher: f64, costs: &CostModel) -> f64 {
    debug_assert!(fisher >= 0.0, "fisher information must be nonnegative");
    fisher / (costs.c_prepare + costs.c_measure)
}

/// Postselected information-cost rate:
/// p·I^ps/(C_P + C_ps + p·C_M).
pub fn ps_rate(fisher_ps: f64, p_ps: f64, costs: &CostModel) -> Result<f64> {
    if !(p_ps > 0.0 && p_ps <= 1.0) {
        return Err(Error::InvalidProbability { value: p_ps });
    }
    debug_assert!(fisher_ps >= 0.0, "fisher information must be nonnegative");
    Ok(p_ps * fisher_ps / (costs.c_prepare + costs.c_postselect + p_ps * costs.c_measure))
}

/// Postselection pays whenever the postselection cost stays below the
/// measurement cost saved on discarded trials: C_ps < (1 - p_ps)·C_M.
pub fn breakeven(p_ps: f64, costs: &CostModel) -> bool {
    costs.c_postselect < (1.0 - p_ps) * costs.c_measure
}

#[cfg(test)]
mod tests {
    use super::*;

    fn costs(cp: f64, cm: f64, cps: f64) -> CostModel {
        CostModel::new(cp, cm, cps, 1).unwrap()
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate(16.0, &costs(1.0, 1.0, 0.0)), 8.0);
        assert_eq!(rate(0.0, &costs(0.3, 2.0, 0.1)), 0.0);
        // The trial count cancels.
        let many = CostModel::new(1.0, 1.0, 0.0, 10_000).unwrap();
        assert_eq!(rate(16.0, &many), rate(16.0, &costs(1.0, 1.0, 0.0)));
    }

    #[test]
    fn ps_rate_reduces_to_rate_without_postselection() {
        let c = costs(0.4, 1.2, 0.0);
        let r = ps_rate(5.0, 1.0, &c).unwrap();
        assert!((r - rate(5.0, &c)).abs() < 1e-15);
        assert_eq!(ps_rate(0.0, 0.5, &c).unwrap(), 0.0);
    }

    #[test]
    fn lossless_endpoint_beats_the_optimized_rate() {
        // p·I ≈ (Δa)² = 16 at p = 1e-4, with cheap preparation and
        // postselection against an expensive measurement.
        let c = costs(0.01, 1.0, 0.01);
        let p_ps = 1e-4;
        let fisher_ps = 16.0 / p_ps;
        let rp = ps_rate(fisher_ps, p_ps, &c).unwrap();
        assert!((rp - 16.0 / 0.0201).abs() < 1e-9);
        let r_max = rate(16.0, &c);
        assert!(rp / r_max > 50.0, "rp = {rp}, r_max = {r_max}");
    }

    #[test]
    fn ps_rate_rejects_bad_probability() {
        let c = costs(1.0, 1.0, 0.0);
        assert!(matches!(
            ps_rate(1.0, 0.0, &c),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            ps_rate(1.0, 1.5, &c),
            Err(Error::InvalidProbability { .. })
        ));
    }

    #[test]
    fn breakeven_examples() {
        assert!(breakeven(0.5, &costs(1.0, 1.0, 0.4)));
        assert!(!breakeven(0.99, &costs(1.0, 1.0, 0.05)));
    }

    #[test]
    fn breakeven_orders_the_rates_at_the_lossless_endpoint() {
        // When p·I^ps equals the optimized information exactly, postselection
        // beats the optimized rate precisely when the break-even condition
        // holds.
        let max_info = 16.0;
        let p_ps = 1e-4;
        let fisher_ps = max_info / p_ps;
        for i in 0..10 {
            for j in 0..10 {
                let cm = 0.2 + 0.5 * i as f64;
                let cps = 0.01 + 0.11 * j as f64;
                let c = costs(0.05, cm, cps);
                let ahead = ps_rate(fisher_ps, p_ps, &c).unwrap() > rate(max_info, &c);
                assert_eq!(breakeven(p_ps, &c), ahead, "cm {cm} cps {cps}");
            }
        }
    }

    #[test]
    fn cost_model_validation() {
        assert!(CostModel::new(-1.0, 1.0, 0.0, 1).is_err());
        assert!(CostModel::new(1.0, 0.0, 0.0, 1).is_err());
        assert!(CostModel::new(1.0, 1.0, -0.1, 1).is_err());
        assert!(CostModel::new(1.0, 1.0, 0.0, 0).is_err());
    }
}
