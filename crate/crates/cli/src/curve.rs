//! Piecewise-linear approximation of the GE 2.75-103 power curve in per-unit
//! of its 2.75 MW rating. Cut-in 3 m/s, rated output from 12 m/s, cut-out
//! above 25 m/s. Points between the knots are interpolated linearly.

/// Speeds (m/s) the curve is defined on.
pub const DOMAIN: (f64, f64) = (0.0, 25.0);

/// `(speed m/s, power p.u.)` knots, strictly increasing in speed.
pub const GE_2_75_103: [(f64, f64); 21] = [
    (0.0, 0.0),
    (3.0, 0.0),
    (3.5, 0.016),
    (4.0, 0.042),
    (4.5, 0.075),
    (5.0, 0.115),
    (5.5, 0.163),
    (6.0, 0.220),
    (6.5, 0.287),
    (7.0, 0.362),
    (7.5, 0.447),
    (8.0, 0.539),
    (8.5, 0.635),
    (9.0, 0.729),
    (9.5, 0.815),
    (10.0, 0.887),
    (10.5, 0.941),
    (11.0, 0.976),
    (11.5, 0.994),
    (12.0, 1.0),
    (25.0, 1.0),
];

/// Per-unit output at `speed`. Zero outside [`DOMAIN`].
pub fn power(speed: f64) -> f64 {
    let (lo, hi) = DOMAIN;
    if !(lo..=hi).contains(&speed) {
        return 0.0;
    }
    let k = GE_2_75_103.partition_point(|&(v, _)| v <= speed);
    if k >= GE_2_75_103.len() {
        return GE_2_75_103[GE_2_75_103.len() - 1].1;
    }
    let (v0, p0) = GE_2_75_103[k - 1];
    let (v1, p1) = GE_2_75_103[k];
    p0 + (p1 - p0) * (speed - v0) / (v1 - v0)
}
