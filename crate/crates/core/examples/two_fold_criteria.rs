//! The three odd/even criteria on a noiseless series whose large second jump
//! sits at an odd position: squared error prefers one change-point, absolute
//! and modified squared error recover both.

use cpcv::{two_fold_curve, select_k, Series, TwoFoldLoss};

fn main() -> cpcv::Result<()> {
    // n = 22, changes after 6 and 11, levels 1, 0, 10
    let values: Vec<f64> = (1..=22)
        .map(|i| if i <= 6 { 1.0 } else if i <= 11 { 0.0 } else { 10.0 })
        .collect();
    let series = Series::univariate(values)?;

    for loss in [TwoFoldLoss::Squared, TwoFoldLoss::Absolute, TwoFoldLoss::ModifiedSquared] {
        let curve = two_fold_curve(&series, 4, loss)?;
        let values: Vec<String> = curve.values().iter().map(|v| format!("{v:8.2}")).collect();
        println!("{:<16} [{}]  selects {}", format!("{loss:?}"), values.join(""), select_k(&curve)?);
    }
    Ok(())
}
