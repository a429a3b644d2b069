use crate::error::{Error, Result};

fn check_len(a: &[f64], x: &[f64]) -> Result<()> {
    if a.len() != x.len() {
        return Err(Error::Dimension(format!(
            "estimate of length {} against truth of length {}",
            a.len(),
            x.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("empty vectors".into()));
    }
    Ok(())
}

/// `(1/N) sum_i (a_i - x_i)^2`.
pub fn mse(a: &[f64], x: &[f64]) -> Result<f64> {
    check_len(a, x)?;
    Ok(a.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / a.len() as f64)
}

/// `||a - x||^2 / ||x||^2`; infinite when `x = 0` and `a != 0`.
pub fn normalized_mse(a: &[f64], x: &[f64]) -> Result<f64> {
    check_len(a, x)?;
    let err: f64 = a.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum();
    let energy: f64 = x.iter().map(|q| q * q).sum();
    Ok(if energy == 0.0 {
        if err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        err / energy
    })
}

/// Exact support recovery of a 0/1 signal after thresholding the estimate
/// at `threshold`.
pub fn support_recovered(a: &[f64], x: &[f64], threshold: f64) -> Result<bool> {
    check_len(a, x)?;
    Ok(a.iter().zip(x).all(|(&p, &q)| (p > threshold) == (q > threshold)))
}
