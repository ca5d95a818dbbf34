use super::FourierError;

/// `Σ_{m=0}^{N} (e^{i(qm+a)t} + e^{−i(qm+a)t})` in closed form,
/// `[sin((q(2N+1)/2 + a)t) − sin((a − q/2)t)] / sin(qt/2)`.
///
/// Poles at `t ∈ (2π/q)Z` are reported, not evaluated.
pub fn dirichlet_block_sum(q: u64, a: i64, t: f64, n: u64) -> Result<f64, FourierError> {
    let q = q.max(1);
    let half_q = 0.5 * q as f64;
    let denom = (half_q * t).sin();
    if denom.abs() < 1e-12 {
        return Err(FourierError::Pole { q, t });
    }
    let a = a as f64;
    let top = ((half_q * (2 * n + 1) as f64 + a) * t).sin() - ((a - half_q) * t).sin();
    Ok(top / denom)
}
