//! Closed-form guarantees, all with natural logarithms.

/// Number of binary-search tasks the identifier uses to pin every coordinate of
/// `[-1, 1]` to an interval of width at most `epsilon`: `ceil(log2(2 / epsilon))`.
pub fn identification_tasks(epsilon: f64) -> usize {
    (2.0 / epsilon).log2().ceil().max(0.0) as usize
}

/// Mistake bound of the ellipsoid learner on `[-1, 1]^d`: `2d(d+1) ln(4 sqrt(d) / epsilon)`.
pub fn ellipsoid_mistake_bound(d: usize, epsilon: f64) -> f64 {
    let d = d as f64;
    2.0 * d * (d + 1.0) * (4.0 * d.sqrt() / epsilon).ln()
}

/// Number of adversary phases that keep a learner's error probability at least
/// 1/4: `floor(log2(2 / (5 epsilon)))`.
pub fn adversary_phases(epsilon: f64) -> usize {
    (2.0 / (5.0 * epsilon)).log2().floor().max(0.0) as usize
}

/// Expected-mistake lower bound against the adversarial stream: `(d/4) * phases`.
pub fn adversary_lower_bound(d: usize, epsilon: f64) -> f64 {
    d as f64 / 4.0 * adversary_phases(epsilon) as f64
}

/// Statistical slack applied to the lower bound when checking a finite sample.
pub const LOWER_BOUND_FACTOR: f64 = 0.8;

/// Identification accuracy in a fixed environment: `epsilon sqrt((K-1)/2) / spread`.
pub fn spread_accuracy_bound(epsilon: f64, num_actions: usize, spread: f64) -> f64 {
    epsilon * ((num_actions as f64 - 1.0) / 2.0).sqrt() / spread
}

/// Demonstration horizon `ceil(ln(12 / epsilon) / (1 - gamma))`.
pub fn trajectory_horizon(epsilon: f64, gamma: f64) -> usize {
    ((12.0 / epsilon).ln() / (1.0 - gamma)).ceil() as usize
}

/// Mini-batch size `ceil(ln(4d(d+1) ln(6 sqrt(d) / epsilon) / delta) / (32 epsilon^2))`.
pub fn trajectory_batch_size(d: usize, epsilon: f64, delta: f64) -> usize {
    let df = d as f64;
    let inner = 4.0 * df * (df + 1.0) * (6.0 * df.sqrt() / epsilon).ln() / delta;
    (inner.ln() / (32.0 * epsilon * epsilon)).ceil() as usize
}

/// Number of batch updates the trajectory learner can make: `2d(d+1) ln(12 sqrt(d) / epsilon)`.
pub fn trajectory_update_bound(d: usize, epsilon: f64) -> f64 {
    let d = d as f64;
    2.0 * d * (d + 1.0) * (12.0 * d.sqrt() / epsilon).ln()
}

/// Total mistake bound of the trajectory learner: batch size times update bound.
pub fn trajectory_mistake_bound(d: usize, epsilon: f64, batch_size: usize) -> f64 {
    batch_size as f64 * trajectory_update_bound(d, epsilon)
}

/// Per-cut log-volume decrease guaranteed for a central cut in `d` dimensions.
pub fn cut_log_volume_drop(d: usize) -> f64 {
    1.0 / (2.0 * (d as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(identification_tasks(2f64.powi(-10)), 11);
        assert_eq!(identification_tasks(1e-3), 11);
        let b = ellipsoid_mistake_bound(5, 0.1);
        assert!((b - 269.61).abs() < 0.01, "{b}");
        assert_eq!(adversary_phases(0.01), 5);
        assert_eq!(adversary_lower_bound(8, 0.01), 10.0);
        assert_eq!(trajectory_horizon(0.1, 0.9), 48);
        assert_eq!(trajectory_batch_size(5, 0.1, 0.1), 28);
    }

    #[test]
    fn truncation_tail_at_configured_horizon() {
        let h = trajectory_horizon(0.1, 0.9);
        assert!(0.9f64.powi(h as i32) <= 0.1 / 6.0);
    }
}
